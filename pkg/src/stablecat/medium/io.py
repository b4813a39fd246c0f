"""Binary format for medium samples.

Layout (little-endian)::

    magic  8 bytes  b"STCMED\\x00\\x01"
    header struct   version u32, d u32, gamma f64, eps_min f64, pad f64,
                    drift f64, seed u64, count u64, lo[d] f64, hi[d] f64
    body            count records of (x_1 .. x_d, weight) as f64
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .sampler import StableMediumSample

MAGIC = b"STCMED\x00\x01"
VERSION = 1
_HEAD = struct.Struct("<IIddddQQ")


def write_sample(sample: StableMediumSample, path) -> None:
    d = sample.d
    head = _HEAD.pack(VERSION, d, sample.gamma, sample.eps_min, sample.pad, sample.drift,
                      int(sample.seed) & ((1 << 64) - 1), len(sample))
    box = np.asarray(list(sample.lo) + list(sample.hi), dtype="<f8").tobytes()
    body = np.column_stack([sample.locations, sample.weights]).astype("<f8").tobytes()
    Path(path).write_bytes(MAGIC + head + box + body)


def read_sample(path) -> StableMediumSample:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError("not a medium sample file")
    version, d, gamma, eps_min, pad, drift, seed, count = _HEAD.unpack_from(raw, 8)
    if version != VERSION:
        raise ValueError(f"unsupported medium file version {version}")
    off = 8 + _HEAD.size
    box = np.frombuffer(raw, "<f8", 2 * d, off)
    off += 16 * d
    body = np.frombuffer(raw, "<f8", count * (d + 1), off).reshape(count, d + 1).astype(float)
    return StableMediumSample(np.ascontiguousarray(body[:, :d]), np.ascontiguousarray(body[:, d]),
                              tuple(box[:d]), tuple(box[d:]), pad, gamma, eps_min, seed, drift)
