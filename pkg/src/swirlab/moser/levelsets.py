"""Measures of superlevel sets ``e_kappa(t) = {x in C(R): pi(x, t) >= kappa k_R}``.

Set measures are nodal: a node belongs to the set or not, and carries its
quadrature weight over ``C(R)`` (dual-cell volume with the ``2 pi rho``
Jacobian, clipped to the cylinder).  Near the set boundary this is exact to
within one layer of cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, DomainError
from ..geometry import CylGrid, ParabolicCylinder, check_region, spatial_weights
from ..snapshots import SnapshotSeries


def boundary_layer_fraction(grid: CylGrid, R: float) -> float:
    """Volume fraction of ``C(R)`` within one cell of its boundary."""
    h = max(grid.h_rho, grid.h_z)
    inner = max(0.0, 1.0 - h / R)
    return 1.0 - inner**3


def set_measure(W: np.ndarray, mask: np.ndarray) -> float:
    return float(np.sum(W[mask]))


def window_weights(times: np.ndarray, t_lo: float, t_hi: float) -> np.ndarray:
    """Nearest-sample time weights over ``]t_lo, t_hi[``.

    Samples inside the window split it at midpoints between neighbours and
    the outermost ones extend to the window ends, so the weights sum to
    ``t_hi - t_lo`` and each is an interval on which that sample is nearest.
    """
    teps = 1e-12 * max(1.0, abs(t_lo), abs(t_hi))
    idx = np.nonzero((times >= t_lo - teps) & (times <= t_hi + teps))[0]
    w = np.zeros(len(times))
    if len(idx) == 0:
        return w
    ts = times[idx]
    edges = np.concatenate([[t_lo], 0.5 * (ts[1:] + ts[:-1]), [t_hi]])
    w[idx] = np.diff(edges)
    return w


@dataclass(frozen=True)
class LevelSetReport:
    kappa: float
    k_R: float
    R: float
    times: np.ndarray          # snapshot times inside the window
    measures: np.ndarray       # |e_kappa(t)| at those times
    volume: float              # |C(R)|
    E_measure: float           # |E_kappa|
    t_bar: float
    tol: float                 # one-boundary-layer slack as a fraction of |C(R)|

    @property
    def fractions(self) -> np.ndarray:
        return self.measures / self.volume

    @property
    def E_fraction(self) -> float:
        """``|E_kappa| / |Q^{1,1/4}(R)|``."""
        return self.E_measure / (self.volume * 0.25 * self.R**2)

    @property
    def t_bar_measure(self) -> float:
        return float(self.measures[np.argmin(np.abs(self.times - self.t_bar))])

    @property
    def mean_value_holds(self) -> bool:
        """``|e_kappa(t_bar)| R^2/4 >= |E_kappa|``."""
        return self.t_bar_measure * 0.25 * self.R**2 >= self.E_measure * (1 - 1e-12)

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "k_R": self.k_R, "R": self.R,
                "times": self.times.tolist(), "fractions": self.fractions.tolist(),
                "E_fraction": self.E_fraction, "t_bar": self.t_bar,
                "mean_value_holds": self.mean_value_holds, "tol": self.tol}


def level_sets(series: SnapshotSeries, R: float, kappa: float, k_R: float,
               z0: float = 0.0, t0: float | None = None, kind: str = "scalar") -> LevelSetReport:
    """``|e_kappa(t)|`` for ``t`` in ``[t0 - R^2, t0 - 3R^2/4]``, ``|E_kappa|`` and ``t_bar``.

    ``t0`` defaults to the last snapshot time.  ``|E_kappa|`` integrates
    ``|e_kappa(t)|`` with nearest-sample weights, so the maximiser ``t_bar``
    over the window samples satisfies the mean-value property exactly.
    """
    series.require(kind)
    if not k_R > 0:
        raise ContractError("k_R must be positive")
    if not R > 0:
        raise DomainError("R must be positive")
    g = series.grid
    t0 = float(series.times[-1]) if t0 is None else t0
    check_region(g, ParabolicCylinder(R, z0, t0), series.times)
    t_lo, t_hi = t0 - R * R, t0 - 0.75 * R * R
    wt = window_weights(series.times, t_lo, t_hi)
    idx = np.nonzero(wt > 0)[0]
    if len(idx) == 0:
        raise DomainError(f"no snapshot inside [{t_lo}, {t_hi}]")
    W = spatial_weights(g, R, z0)
    inside = W > 0
    pi = series.data[kind][idx]
    if np.any(pi[:, inside] < 0):
        raise ContractError("pi is negative inside C(R)")
    level = kappa * k_R
    meas = np.array([set_measure(W, (p >= level) & inside) for p in pi])
    E = float(np.dot(wt[idx], meas))
    t_bar = float(series.times[idx[int(np.argmax(meas))]])
    vol = math.pi * R * R * 2 * R
    return LevelSetReport(kappa, k_R, R, series.times[idx].copy(), meas, vol, E, t_bar,
                          boundary_layer_fraction(g, R))
