"""Command-line interface: ``adaspec analyze|resynth|demo|selftest``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import acceptance
from .adaptive import MultiFrameConfig, adapt
from .entropy import DEFAULT_ALPHA
from .errors import AdaspecError
from .export import DEFAULT_DB_FLOOR, export_selection, export_spectrogram
from .resynthesis import interior_error, reconstruct
from .signal import SIGNAL_KINDS, synth_test_signal
from .wavio import WAV_FORMATS, read_wav, write_wav

DEMO_PRESETS = {
    "sine": {"freq": 1000.0},
    "fm_sine": dict(acceptance.FM_PARAMS),
    "impulse": {"position": 22050},
    "percussive_harmonic": dict(acceptance.MARIMBA_PARAMS),
}


def _analysis_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("analysis")
    g.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="Rényi order (default 0.7)")
    g.add_argument("--min-window", type=int, default=512, help="smallest window, samples")
    g.add_argument("--max-window", type=int, default=4096, help="largest window, samples")
    g.add_argument("--num-windows", type=int, default=8)
    g.add_argument("--version", choices=("v1", "v2"), default="v2", dest="algo",
                   help="v1: common hop; v2: per-window hop (default)")
    g.add_argument("--segment-frames", type=int, default=4,
                   help="segment length in frames of the largest window")
    g.add_argument("--segment-overlap", type=int, default=2,
                   help="overlap of consecutive segments, in frames")
    g.add_argument("--overlap-ratio", type=float, default=0.75)
    g.add_argument("--hop", type=int, default=None, help="common hop for v1")
    g.add_argument("--seed", type=int, default=0, help="seed for stochastic test signals")
    g.add_argument("--workers", type=int, default=1, help="threads for segment evaluation")


def _output_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("outputs")
    g.add_argument("--out-prefix", default=None,
                   help="base path for exports (default: input stem or demo name)")
    g.add_argument("--out-csv", default=None, help="spectrogram CSV path")
    g.add_argument("--out-pgm", default=None, help="spectrogram PGM path")
    g.add_argument("--out-selection", default=None, help="selection track path")
    g.add_argument("--out-figure", default=None, help="figure path (PNG/PDF/SVG)")
    g.add_argument("--no-figure", action="store_true", help="skip the matplotlib figure")
    g.add_argument("--db-floor", type=float, default=DEFAULT_DB_FLOOR)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaspec", description="Entropy-based time-adaptive spectrograms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="adaptive analysis of a WAV file")
    p.add_argument("--in", dest="input", required=True, help="input WAV")
    _analysis_flags(p)
    _output_flags(p)

    p = sub.add_parser("resynth", help="analyse, reconstruct and report the round-trip error")
    p.add_argument("--in", dest="input", required=True, help="input WAV")
    p.add_argument("--out-wav", required=True, help="reconstructed WAV")
    p.add_argument("--wav-format", choices=WAV_FORMATS, default="float32")
    _analysis_flags(p)

    p = sub.add_parser("demo", help="synthesize a test signal and analyse it")
    p.add_argument("kind", choices=SIGNAL_KINDS)
    p.add_argument("--duration", type=float, default=2.0, help="seconds")
    p.add_argument("--sample-rate", type=float, default=44100.0)
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="override a signal parameter (repeatable)")
    p.add_argument("--out-wav", default=None, help="also write the synthesized signal")
    _analysis_flags(p)
    _output_flags(p)

    sub.add_parser("selftest", help="run the acceptance checks")
    return parser


def _config(args) -> MultiFrameConfig:
    return MultiFrameConfig(
        version=args.algo, min_len=args.min_window, max_len=args.max_window,
        num_windows=args.num_windows, alpha=args.alpha, segment_frames=args.segment_frames,
        segment_overlap_frames=args.segment_overlap, overlap_ratio=args.overlap_ratio,
        hop=args.hop)


def _write_reports(analysis, args, default_prefix: str):
    prefix = args.out_prefix or default_prefix
    paths = {
        "csv": args.out_csv or f"{prefix}.spectrogram.csv",
        "pgm": args.out_pgm or f"{prefix}.spectrogram.pgm",
        "selection": args.out_selection or f"{prefix}.selection.csv",
    }
    export_spectrogram(analysis, "csv", paths["csv"], args.db_floor)
    export_spectrogram(analysis, "pgm", paths["pgm"], args.db_floor)
    export_selection(analysis.selection, paths["selection"])
    if not args.no_figure:
        from .plotting import plot_adaptive
        paths["figure"] = args.out_figure or f"{prefix}.adaptive.png"
        plot_adaptive(analysis, paths["figure"], args.db_floor)
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")


def _parse_params(items, parser):
    params = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            parser.error(f"--param expects NAME=VALUE, got {item!r}")
        params[name] = value
    return params


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            results = acceptance.run_all(sys.stdout)
            failed = sum(not r.passed for r in results)
            print(f"{len(results) - failed}/{len(results)} acceptance checks passed")
            return 1 if failed else 0

        config = _config(args)
        if args.command == "analyze":
            sig = read_wav(args.input)
            analysis = adapt(sig, config, workers=args.workers)
            _write_reports(analysis, args, str(Path(args.input).with_suffix("")))
        elif args.command == "resynth":
            sig = read_wav(args.input)
            rebuilt = reconstruct(adapt(sig, config, workers=args.workers))
            write_wav(rebuilt, args.out_wav, args.wav_format)
            err = interior_error(sig, rebuilt, config.max_len)
            print(f"wrote {args.out_wav}")
            print(f"interior relative L2 error: {err:.3e}")
        elif args.command == "demo":
            params = dict(DEMO_PRESETS[args.kind])
            params.update(_parse_params(args.param, parser))
            sig = synth_test_signal(args.kind, params, args.duration, args.sample_rate, seed=args.seed)
            if args.out_wav:
                write_wav(sig, args.out_wav)
                print(f"wrote wav: {args.out_wav}")
            analysis = adapt(sig, config, workers=args.workers)
            _write_reports(analysis, args, f"demo_{args.kind}")
            lengths = analysis.selection.chosen_lengths
            print("selected window lengths per segment: " + " ".join(str(n) for n in lengths))
    except (AdaspecError, OSError) as exc:
        print(f"adaspec: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
