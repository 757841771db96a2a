"""Matplotlib figures written next to the delimited exports."""
from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .entropy import dm_family, renyi_entropy
from .export import DEFAULT_DB_FLOOR, power_db

__all__ = ["plot_adaptive", "plot_alpha_study", "save"]

_RC = {"dpi": 110}


def save(fig: Figure, path) -> None:
    FigureCanvasAgg(fig)
    # no timestamps, so equal inputs give equal files
    fig.savefig(path, dpi=_RC["dpi"], metadata={"Software": None})


def plot_adaptive(analysis, path, db_floor: float = DEFAULT_DB_FLOOR, max_freq: float | None = None):
    """Selected window length over time (top) and the adaptive spectrogram (bottom)."""
    sr = analysis.sample_rate
    fig = Figure(figsize=(9, 6))
    top, bottom = fig.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": [1, 3]})

    xs = [s.start / sr for s in analysis.slices] + [analysis.slices[-1].stop / sr]
    ys = [s.window.length for s in analysis.slices]
    top.stairs(ys, xs, color="k", lw=1.5, baseline=None)
    top.set_ylabel("window (samples)")
    top.set_yscale("log", base=2)
    lengths = analysis.selection.window_lengths
    top.set_yticks(lengths)
    top.set_yticklabels([str(n) for n in lengths], fontsize=7)

    vmax = max((power_db(np.abs(s.coeffs) ** 2, db_floor).max() for s in analysis.slices),
               default=db_floor)
    vmin = max(db_floor, vmax - 100)
    # each frame extends halfway to its neighbours, across slice boundaries
    centers = np.concatenate([s.frame_centers for s in analysis.slices])
    mids = (centers[1:] + centers[:-1]) / 2
    first = analysis.slices[0].lattice.hop / 2
    last = analysis.slices[-1].lattice.hop / 2
    edges_all = np.concatenate([[centers[0] - first], mids, [centers[-1] + last]]) / sr
    mesh = None
    offset = 0
    for s in analysis.slices:
        nfft = s.lattice.fft_size
        half = nfft // 2 + 1
        db = power_db(np.abs(s.coeffs[:, :half]) ** 2, db_floor)
        edges = edges_all[offset:offset + s.num_frames + 1]
        offset += s.num_frames
        fedges = (np.arange(half + 1) - 0.5) * sr / nfft
        mesh = bottom.pcolormesh(edges, fedges, db.T, vmin=vmin, vmax=vmax,
                                 cmap="magma", shading="flat", rasterized=True)
    bottom.set_xlabel("time (s)")
    bottom.set_ylabel("frequency (Hz)")
    bottom.set_ylim(0, max_freq or sr / 2)
    if mesh is not None:
        fig.colorbar(mesh, ax=[top, bottom], label="power (dB)")
    save(fig, path)
    return fig


def plot_alpha_study(path, n: int = 100, seed: int = 0, ms=(1, 10, 30, 50, 70, 90, 100),
                     alphas=None):
    """Entropy of peaky-to-flat densities as a function of the order alpha."""
    alphas = np.linspace(0, 30, 121) if alphas is None else np.asarray(alphas)
    fig = Figure(figsize=(7, 4.5))
    ax = fig.subplots()
    for m in ms:
        d = dm_family(n, m, seed)
        ax.plot(alphas, [renyi_entropy(d, a) for a in alphas], label=f"M = {m}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("Rényi entropy (bits)")
    ax.legend(fontsize=8)
    save(fig, path)
    return fig
