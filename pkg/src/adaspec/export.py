"""CSV/PGM spectrogram exports and the selection-track text format.

Spectrogram CSV::

    # sample_rate=<Hz>
    # slices=<count>
    time_sec,freq_hz,power_db,window_len     (one row per frame and bin)

Only the non-negative frequency bins ``0 .. fft_size/2`` are exported; the
row count is the number of frames times ``fft_size // 2 + 1``. ``time_sec``
is the frame center.

The PGM raster is binary P5 with one row per non-negative bin (highest
frequency on top) and one column per step of the smallest hop in the
analysis; each column shows the frame whose center is nearest.
"""
from __future__ import annotations

import io
import math

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "DEFAULT_DB_FLOOR",
    "power_db",
    "export_spectrogram",
    "read_spectrogram_csv",
    "spectrogram_raster",
    "read_pgm",
    "export_selection",
    "read_selection",
]

DEFAULT_DB_FLOOR = -120.0
SELECTION_HEADER = "start_sec,end_sec,window_len,entropies_bits"


def power_db(power, db_floor=DEFAULT_DB_FLOOR) -> np.ndarray:
    power = np.asarray(power, dtype=float)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(power)
    return np.maximum(db, db_floor)


def _onesided(coeffs):
    half = coeffs.shape[1] // 2 + 1
    c = coeffs[:, :half]
    return c.real ** 2 + c.imag ** 2


def export_spectrogram(analysis, format: str, path, db_floor: float = DEFAULT_DB_FLOOR) -> None:
    if format == "csv":
        _write_csv(analysis, path, db_floor)
    elif format == "pgm":
        raster = spectrogram_raster(analysis, db_floor)
        h, w = raster.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(raster.astype(np.uint8).tobytes())
    else:
        raise InvalidArgumentError(f"unknown export format {format!r}; expected 'csv' or 'pgm'")


def _write_csv(analysis, path, db_floor):
    sr = analysis.sample_rate
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# sample_rate={sr:g}\n# slices={len(analysis.slices)}\n")
        for s in analysis.slices:
            power = _onesided(s.coeffs)
            nbins = power.shape[1]
            freqs = np.arange(nbins) * (sr / s.lattice.fft_size)
            times = s.frame_centers / sr
            rows = np.column_stack([
                np.repeat(times, nbins),
                np.tile(freqs, times.size),
                power_db(power, db_floor).ravel(),
                np.full(times.size * nbins, s.window.length),
            ])
            buf = io.StringIO()
            np.savetxt(buf, rows, fmt=("%.6f", "%.4f", "%.4f", "%d"), delimiter=",")
            fh.write(buf.getvalue())


def read_spectrogram_csv(path):
    """Return ``(meta, rows)`` where rows has columns time, freq, dB, window length."""
    meta = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = float(value) if key == "sample_rate" else int(value)
        elif line:
            body.append(line)
    rows = np.loadtxt(body, delimiter=",", ndmin=2) if body else np.zeros((0, 4))
    return meta, rows


def spectrogram_raster(analysis, db_floor: float = DEFAULT_DB_FLOOR) -> np.ndarray:
    """8-bit image (rows = bins, top = highest) of the adaptive spectrogram."""
    fft_size = max(s.lattice.fft_size for s in analysis.slices)
    nbins = fft_size // 2 + 1
    step = min(s.lattice.hop for s in analysis.slices)
    ncols = max(1, math.ceil(analysis.signal_len / step))

    centers, columns = [], []
    for s in analysis.slices:
        power = _onesided(s.coeffs)
        # bin duplication onto the common grid
        src = np.minimum(np.arange(nbins) * s.lattice.fft_size // fft_size, power.shape[1] - 1)
        columns.append(power[:, src])
        centers.append(s.frame_centers)
    centers = np.concatenate(centers)
    frames = np.concatenate(columns, axis=0)
    order = np.argsort(centers, kind="stable")
    centers, frames = centers[order], frames[order]

    t = (np.arange(ncols) + 0.5) * step
    idx = np.clip(np.searchsorted(centers, t), 1, centers.size - 1) if centers.size > 1 else \
        np.zeros(ncols, dtype=int)
    if centers.size > 1:
        left_closer = (t - centers[idx - 1]) <= (centers[idx] - t)
        idx = np.where(left_closer, idx - 1, idx)
    db = power_db(frames[idx], db_floor).T[::-1]
    top = db.max()
    if top <= db_floor:
        return np.zeros(db.shape, dtype=np.uint8)
    return np.rint(255.0 * (db - db_floor) / (top - db_floor)).astype(np.uint8)


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise InvalidArgumentError("not a binary PGM file")
    w, h, maxval = (int(v) for v in tokens[1:])
    pixels = np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8)
    if maxval != 255 or pixels.size != w * h:
        raise InvalidArgumentError("unsupported or truncated PGM")
    return pixels.reshape(h, w)


def export_selection(track, path) -> None:
    """One line per segment: start, end, chosen window length, entropy vector."""
    with open(path, "w", newline="\n") as fh:
        fh.write(SELECTION_HEADER + "\n")
        for start, stop, length, ent in track.records():
            vec = ";".join("nan" if math.isnan(e) else f"{e:.9f}" for e in ent)
            fh.write(f"{start:.6f},{stop:.6f},{length},{vec}\n")


def read_selection(path) -> list[tuple[float, float, int, tuple]]:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != SELECTION_HEADER:
        raise InvalidArgumentError("not a selection-track file")
    records = []
    for line in lines[1:]:
        if not line:
            continue
        start, stop, length, vec = line.split(",")
        records.append((float(start), float(stop), int(length),
                        tuple(float(v) for v in vec.split(";")) if vec else ()))
    return records
