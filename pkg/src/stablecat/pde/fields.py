"""Space-time grid fields and their on-disk formats."""

from __future__ import annotations

import csv
import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..lattice import Lattice

QUANTITIES = ("u", "w", "m", "v", "heat", "medium")
MAGIC = b"STCFLD\x00\x01"
VERSION = 1


@dataclass(frozen=True)
class SpaceTimeField:
    """Snapshots ``values[i]`` of one quantity at ``times[i]`` on ``lattice``."""

    quantity: str
    lattice: Lattice
    times: np.ndarray
    values: np.ndarray
    config_hash: str = ""

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.values.shape != (len(self.times),) + self.lattice.shape:
            raise ValueError("values do not match times x lattice")

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[i], t, rtol=0, atol=1e-12 * max(1.0, abs(t))):
            raise KeyError(f"time {t} not recorded")
        return self.values[i]

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def pair(self, mu, t: float | None = None) -> float:
        """``<mu, field(t)>`` (final time by default)."""
        f = self.final if t is None else self.at(t)
        return mu.pair(f, self.lattice)


def write_field(fld: SpaceTimeField, path) -> None:
    """Binary layout: magic, JSON header length (u32), JSON header, row-major ``<f8`` body."""
    lat = fld.lattice
    header = json.dumps({"version": VERSION, "quantity": fld.quantity, "config_hash": fld.config_hash,
                         "d": lat.d, "N": lat.n, "L": lat.side, "origin": lat.origin,
                         "times": [float(t) for t in fld.times]}, sort_keys=True).encode()
    body = np.ascontiguousarray(fld.values, dtype="<f8").tobytes()
    Path(path).write_bytes(MAGIC + struct.pack("<I", len(header)) + header + body)


def read_field(path) -> SpaceTimeField:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError("not a field file")
    (n,) = struct.unpack_from("<I", raw, 8)
    head = json.loads(raw[12:12 + n])
    if head["version"] != VERSION:
        raise ValueError(f"unsupported field file version {head['version']}")
    lat = Lattice(head["d"], head["N"], head["L"], head["origin"])
    times = np.array(head["times"], dtype=float)
    vals = np.frombuffer(raw, "<f8", offset=12 + n).reshape((len(times),) + lat.shape).astype(float)
    return SpaceTimeField(head["quantity"], lat, times, vals, head["config_hash"])


def csv_slice(fld: SpaceTimeField, t: float | None = None, axis: int = 0) -> str:
    """Values along one lattice axis through the origin of space, as CSV."""
    lat = fld.lattice
    f = fld.final if t is None else fld.at(t)
    mid = int(np.argmin(np.abs(lat.axis)))
    sl = [mid] * lat.d
    sl[axis] = slice(None)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", fld.quantity])
    for x, v in zip(lat.axis, f[tuple(sl)]):
        w.writerow([repr(float(x)), repr(float(v))])
    return buf.getvalue()
