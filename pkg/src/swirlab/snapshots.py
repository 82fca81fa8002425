"""Snapshot sequences and their on-disk container.

One file per time level, ``snap_00000.npz``, holds a JSON header (grid
counts and spacings, time, kind list) and one row-major float64 array per
kind.  A ``run.json`` sidecar describes the run.  Round trips are bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError, DomainError
from .geometry import FIELD_KINDS, CylGrid, Field

FORMAT_VERSION = 1
SIDECAR = "run.json"


@dataclass
class SnapshotSeries:
    """Time-ordered samples of several field kinds on one grid.

    ``data[kind]`` has shape ``(n_times, n_rho + 1, n_z + 1)``.
    """

    grid: CylGrid
    times: np.ndarray
    data: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ContractError("need at least one time level")
        if np.any(np.diff(self.times) <= 0):
            raise ContractError("snapshot times must be strictly increasing")
        for kind, arr in self.data.items():
            if kind not in FIELD_KINDS:
                raise ContractError(f"unknown field kind {kind!r}")
            arr = np.asarray(arr, dtype=np.float64)
            if arr.shape != (len(self.times),) + self.grid.shape:
                raise ContractError(f"{kind} array has shape {arr.shape}")
            self.data[kind] = arr

    def __len__(self):
        return len(self.times)

    @property
    def kinds(self) -> list[str]:
        return list(self.data)

    def has(self, *kinds: str) -> bool:
        return all(k in self.data for k in kinds)

    def require(self, *kinds: str) -> None:
        missing = [k for k in kinds if k not in self.data]
        if missing:
            raise ContractError(f"snapshots lack {', '.join(missing)}")

    def field(self, kind: str, index: int) -> Field:
        self.require(kind)
        return Field(self.grid, kind, self.data[kind][index], float(self.times[index]))

    def speed(self) -> np.ndarray:
        """``|v|`` at every sample, from whichever velocity components exist."""
        comps = [k for k in ("v_rho", "v_phi", "v_3") if k in self.data]
        if not comps:
            raise ContractError("snapshots carry no velocity component")
        return np.sqrt(sum(self.data[k] ** 2 for k in comps))

    def scaled(self, factor: float, kinds=("v_rho", "v_phi", "v_3")) -> "SnapshotSeries":
        data = {k: (v * factor if k in kinds else v.copy()) for k, v in self.data.items()}
        return SnapshotSeries(self.grid, self.times.copy(), data, dict(self.meta))

    def with_data(self, **arrays) -> "SnapshotSeries":
        data = dict(self.data)
        data.update(arrays)
        return SnapshotSeries(self.grid, self.times, data, dict(self.meta))

    def index_at(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"no snapshot at t={t}")
        return k

    @classmethod
    def from_function(cls, grid: CylGrid, times, fn, kinds) -> "SnapshotSeries":
        """Sample ``fn(rho, z, t) -> {kind: array}`` on the grid at ``times``."""
        R, Z = grid.mesh()
        data = {k: [] for k in kinds}
        for t in times:
            out = fn(R, Z, float(t))
            for k in kinds:
                data[k].append(np.broadcast_to(out[k], grid.shape).astype(np.float64))
        return cls(grid, np.asarray(times, float), {k: np.stack(v) for k, v in data.items()})

    # -- persistence -------------------------------------------------------

    def save(self, directory, sidecar: dict | None = None) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for old in d.glob("snap_*.npz"):
            old.unlink()
        g = self.grid
        for k, t in enumerate(self.times):
            header = {"format": FORMAT_VERSION, "n_rho": g.n_rho, "n_z": g.n_z,
                      "h_rho": g.h_rho, "h_z": g.h_z, "z_min": g.z_min,
                      "rho_max": g.rho_max, "z_max": g.z_max,
                      "time": float(t).hex(), "kinds": self.kinds}
            arrays = {kind: np.ascontiguousarray(self.data[kind][k]) for kind in self.kinds}
            np.savez(d / f"snap_{k:05d}.npz", header=np.array(json.dumps(header)), **arrays)
        doc = {"format": FORMAT_VERSION, "grid": g.to_dict(), "n_snapshots": len(self),
               "kinds": self.kinds, "meta": self.meta}
        if sidecar:
            doc.update(sidecar)
        (d / SIDECAR).write_text(json.dumps(doc, indent=2, sort_keys=True, default=_jsonable))
        return d

    @classmethod
    def load(cls, directory) -> "SnapshotSeries":
        d = Path(directory)
        files = sorted(d.glob("snap_*.npz"))
        if not files or not (d / SIDECAR).exists():
            raise FileNotFoundError(f"no snapshot run in {d}")
        doc = json.loads((d / SIDECAR).read_text())
        grid = CylGrid.from_dict(doc["grid"])
        times, data = [], {}
        for f in files:
            with np.load(f) as z:
                header = json.loads(str(z["header"]))
                if (header["n_rho"], header["n_z"]) != (grid.n_rho, grid.n_z):
                    raise ContractError(f"{f.name}: grid mismatch")
                times.append(float.fromhex(header["time"]))
                for kind in header["kinds"]:
                    data.setdefault(kind, []).append(z[kind])
        return cls(grid, np.array(times), {k: np.stack(v) for k, v in data.items()},
                   doc.get("meta", {}))


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
