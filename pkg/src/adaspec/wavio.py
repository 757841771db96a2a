"""Minimal RIFF/WAVE reader and writer (PCM 16-bit and IEEE float 32)."""
from __future__ import annotations

import struct

import numpy as np

from .errors import UnsupportedFormatError, WavParseError
from .signal import Signal

__all__ = ["read_wav", "write_wav", "WAV_FORMATS"]

_PCM = 1
_FLOAT = 3
_EXTENSIBLE = 0xFFFE

WAV_FORMATS = ("float32", "pcm16")


def _need(data: bytes, offset: int, size: int, what: str):
    if offset + size > len(data):
        raise WavParseError(f"truncated {what}: need {size} bytes, {len(data) - offset} left", offset)


def read_wav(path) -> Signal:
    """Read a mono or multichannel WAV file; channels are averaged."""
    with open(path, "rb") as fh:
        data = fh.read()
    _need(data, 0, 12, "RIFF header")
    if data[0:4] != b"RIFF":
        raise WavParseError("missing RIFF tag", 0)
    if data[8:12] != b"WAVE":
        raise WavParseError("missing WAVE tag", 8)

    fmt = None
    pos = 12
    while pos < len(data):
        _need(data, pos, 8, "chunk header")
        cid = data[pos:pos + 4]
        size, = struct.unpack_from("<I", data, pos + 4)
        body = pos + 8
        if cid == b"fmt ":
            _need(data, body, 16, "fmt chunk")
            tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", data, body)
            if tag == _EXTENSIBLE:
                _need(data, body, 26, "extensible fmt chunk")
                tag, = struct.unpack_from("<H", data, body + 24)
            if channels < 1 or rate < 1:
                raise WavParseError(f"bad fmt values: {channels} channels at {rate} Hz", body)
            fmt = (tag, channels, rate, bits, block_align)
        elif cid == b"data":
            if fmt is None:
                raise WavParseError("data chunk before fmt chunk", pos)
            _need(data, body, size, "data chunk")
            return _decode(data[body:body + size], fmt)
        pos = body + size + (size & 1)
    raise WavParseError("no data chunk", pos)


def _decode(raw: bytes, fmt) -> Signal:
    tag, channels, rate, bits, _ = fmt
    if tag == _PCM and bits == 16:
        x = np.frombuffer(raw[:len(raw) - len(raw) % 2], dtype="<i2").astype(float) / 32768.0
    elif tag == _FLOAT and bits == 32:
        x = np.frombuffer(raw[:len(raw) - len(raw) % 4], dtype="<f4").astype(float)
    else:
        raise UnsupportedFormatError(f"unsupported WAV encoding (format tag {tag}, {bits} bits)")
    frames = x.size // channels
    x = x[:frames * channels].reshape(frames, channels)
    if channels > 1:
        x = x.mean(axis=1)
    else:
        x = x[:, 0]
    return Signal(x, rate)


def write_wav(signal: Signal, path, format: str = "float32") -> None:
    """Write a mono WAV file.

    ``float32`` stores the samples rounded to single precision; ``pcm16``
    clips to ``[-1, 1 - 2**-15]`` and rounds to the nearest integer step.
    """
    x = signal.samples
    rate = int(round(signal.sample_rate))
    if format == "float32":
        payload = x.astype("<f4").tobytes()
        tag, bits = _FLOAT, 32
    elif format == "pcm16":
        q = np.rint(np.clip(x, -1.0, 1.0 - 2.0 ** -15) * 32768.0)
        payload = q.astype("<i2").tobytes()
        tag, bits = _PCM, 16
    else:
        raise UnsupportedFormatError(f"unknown WAV format {format!r}; expected one of {WAV_FORMATS}")
    block = bits // 8
    if tag == _PCM:
        fmt = struct.pack("<4sIHHIIHH", b"fmt ", 16, tag, 1, rate, rate * block, block, bits)
        extra = b""
    else:
        fmt = struct.pack("<4sIHHIIHHH", b"fmt ", 18, tag, 1, rate, rate * block, block, bits, 0)
        extra = struct.pack("<4sII", b"fact", 4, x.size)
    chunks = fmt + extra + struct.pack("<4sI", b"data", len(payload)) + payload
    if len(payload) & 1:
        chunks += b"\x00"
    header = struct.pack("<4sI4s", b"RIFF", 4 + len(chunks), b"WAVE")
    with open(path, "wb") as fh:
        fh.write(header + chunks)
