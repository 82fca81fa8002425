"""Axisymmetric (rho, z) grids, parabolic cylinders, fields and cylindrical calculus.

Nodes are collocated: ``rho[i] = i * h_rho`` for ``i = 0..n_rho`` (the first
node line is the symmetry axis) and ``z[j] = z_min + j * h_z`` for
``j = 0..n_z``.  Every sampled quantity is a 2-D array of shape
``(n_rho + 1, n_z + 1)`` indexed ``(i_rho, i_z)``.

Volume integrals use the axisymmetric reduction ``dx = 2*pi*rho drho dz``.
Each grid cell is integrated with a one-point rule placed at the cell's
Jacobian-weighted centroid, the integrand being bilinearly interpolated from
the four corner nodes.  That rule is exact for integrands that are bilinear
on a cell, and cells cut by a region boundary are clipped exactly, so the
measure of any axis-centred cylinder is reproduced to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError

FIELD_KINDS = ("v_rho", "v_phi", "v_3", "pressure", "swirl", "scalar")
SCALAR_KINDS = ("v_3", "pressure", "swirl", "scalar")
# kinds that vanish on the axis
AXIS_ZERO_KINDS = ("v_rho", "v_phi", "swirl")


@dataclass(frozen=True)
class CylGrid:
    """Uniform node grid on ``[0, rho_max] x [z_min, z_max]`` with a time axis."""

    rho_max: float
    z_min: float
    z_max: float
    n_rho: int
    n_z: int
    dt: float = 0.0
    t_start: float = 0.0
    t_end: float = 0.0

    def __post_init__(self):
        if self.n_rho < 3 or self.n_z < 3:
            raise DomainError("need at least 3 cells in each direction")
        if not self.rho_max > 0 or not self.z_max > self.z_min:
            raise DomainError("grid extents must be positive")
        if self.dt < 0 or self.t_end < self.t_start:
            raise DomainError("invalid time axis")

    @property
    def h_rho(self) -> float:
        return self.rho_max / self.n_rho

    @property
    def h_z(self) -> float:
        return (self.z_max - self.z_min) / self.n_z

    @property
    def h(self) -> float:
        """Smallest spacing; the one that limits explicit time steps."""
        return min(self.h_rho, self.h_z)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rho + 1, self.n_z + 1)

    @property
    def rho(self) -> np.ndarray:
        return np.arange(self.n_rho + 1) * self.h_rho

    @property
    def z(self) -> np.ndarray:
        return self.z_min + np.arange(self.n_z + 1) * self.h_z

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.rho, self.z, indexing="ij")

    def refined(self, factor: int = 2) -> "CylGrid":
        return CylGrid(self.rho_max, self.z_min, self.z_max,
                       self.n_rho * factor, self.n_z * factor,
                       self.dt / factor**2, self.t_start, self.t_end)

    def to_dict(self) -> dict:
        return {"rho_max": self.rho_max, "z_min": self.z_min, "z_max": self.z_max,
                "n_rho": self.n_rho, "n_z": self.n_z, "dt": self.dt,
                "t_start": self.t_start, "t_end": self.t_end}

    @classmethod
    def from_dict(cls, d: dict) -> "CylGrid":
        return cls(float(d["rho_max"]), float(d["z_min"]), float(d["z_max"]),
                   int(d["n_rho"]), int(d["n_z"]), float(d.get("dt", 0.0)),
                   float(d.get("t_start", 0.0)), float(d.get("t_end", 0.0)))


@dataclass(frozen=True, eq=False)
class Field:
    """A sampled scalar or velocity component at one time level.

    The value array is copied and frozen on construction.  Components that
    must vanish on the axis (``v_rho``, ``v_phi``, ``swirl``) are checked.
    ``v_3`` and scalars only carry the even-symmetry condition, which the
    operators impose through their axis stencils rather than by checking.
    """

    grid: CylGrid
    kind: str
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ContractError(f"unknown field kind {self.kind!r}")
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ContractError(
                f"values shape {values.shape} does not match grid {self.grid.shape}")
        if self.kind in AXIS_ZERO_KINDS:
            scale = max(1.0, float(np.max(np.abs(values))))
            if np.max(np.abs(values[0])) > 1e-12 * scale:
                raise ContractError(f"{self.kind} must vanish on the axis")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def with_values(self, values, kind: str | None = None) -> "Field":
        return Field(self.grid, kind or self.kind, values, self.time)


@dataclass(frozen=True)
class ParabolicCylinder:
    """``Q^{lam,mu}(z0, r) = C(x0, lam*r) x ]t0 - mu*r^2, t0[`` with ``x0`` on the axis.

    ``C(x0, s)`` is ``{|x'| < s, |x_3 - z0| < s}``.  Only axis-centred
    cylinders are representable in the axisymmetric reduction.
    """

    r: float
    z0: float = 0.0
    t0: float = 0.0
    lam: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.r < 0 or not self.lam > 0 or not self.mu > 0:
            raise DomainError("cylinder needs r >= 0, lam > 0, mu > 0")

    @property
    def radius(self) -> float:
        """Spatial radius (and half-height) ``lam * r``."""
        return self.lam * self.r

    @property
    def t_min(self) -> float:
        return self.t0 - self.mu * self.r**2

    @property
    def duration(self) -> float:
        return self.mu * self.r**2


@dataclass(frozen=True)
class AnnularCylinder:
    """``P(a, b; h) = {a < |x'| < b, |x_3 - z0| < h}`` over ``]t_min, t_max[``."""

    a: float
    b: float
    h: float
    z0: float = 0.0
    t_min: float = 0.0
    t_max: float = 0.0

    def __post_init__(self):
        if not (0 <= self.a < self.b) or not self.h > 0:
            raise DomainError("annulus needs 0 <= a < b and h > 0")
        if self.t_max < self.t_min:
            raise DomainError("empty time window")


def cyl_volume(c) -> tuple[float, float]:
    """Return ``(spatial volume, space-time measure)`` of a cylinder."""
    if isinstance(c, ParabolicCylinder):
        s = c.radius
        vol = math.pi * s * s * 2.0 * s
        return vol, vol * c.duration
    if isinstance(c, AnnularCylinder):
        vol = math.pi * (c.b**2 - c.a**2) * 2.0 * c.h
        return vol, vol * (c.t_max - c.t_min)
    raise ContractError(f"not a cylinder: {type(c).__name__}")


# ---------------------------------------------------------------------------
# quadrature weights


def _radial_weights(rho: np.ndarray, a: float, b: float) -> np.ndarray:
    """Node weights of int_a^b f(rho) rho drho, exact for f linear per cell."""
    h = rho[1] - rho[0]
    w = np.zeros_like(rho)
    lo = np.maximum(rho[:-1], a)
    hi = np.minimum(rho[1:], b)
    ok = hi > lo
    m = np.where(ok, 0.5 * (hi**2 - lo**2), 0.0)
    cen = np.divide((hi**3 - lo**3) / 3.0, m, out=np.zeros_like(m), where=m > 0)
    frac = np.where(ok, (cen - rho[:-1]) / h, 0.0)
    np.add.at(w, np.arange(len(rho) - 1), m * (1.0 - frac))
    np.add.at(w, np.arange(1, len(rho)), m * frac)
    return w


def _linear_weights(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """Node weights of int_a^b f(x) dx for the piecewise-linear interpolant of f."""
    w = np.zeros(len(x))
    if len(x) == 1 or b <= a:
        return w
    lo = np.maximum(x[:-1], a)
    hi = np.minimum(x[1:], b)
    ok = hi > lo
    length = np.where(ok, hi - lo, 0.0)
    frac = np.where(ok, (0.5 * (lo + hi) - x[:-1]) / np.diff(x), 0.0)
    np.add.at(w, np.arange(len(x) - 1), length * (1.0 - frac))
    np.add.at(w, np.arange(1, len(x)), length * frac)
    return w


def spatial_weights(grid: CylGrid, radius: float, z0: float = 0.0,
                    inner: float = 0.0, half_height: float | None = None) -> np.ndarray:
    """Node weights for volume integrals over an axis-centred (annular) cylinder.

    ``sum(W * f)`` approximates ``int f dx`` over
    ``{inner < |x'| < radius, |x_3 - z0| < half_height}`` including ``2*pi``.
    """
    hh = radius if half_height is None else half_height
    wr = _radial_weights(grid.rho, inner, radius)
    wz = _linear_weights(grid.z, z0 - hh, z0 + hh)
    return 2.0 * np.pi * np.outer(wr, wz)


def time_weights(times: np.ndarray, t_min: float, t_max: float) -> np.ndarray:
    return _linear_weights(np.asarray(times, dtype=float), t_min, t_max)


def check_region(grid: CylGrid, region: ParabolicCylinder, times=None) -> None:
    """Raise :class:`DomainError` unless ``region`` keeps one cell off the outer boundary."""
    s = region.radius
    eps = 1e-12 * max(1.0, grid.rho_max, abs(grid.z_max), abs(grid.z_min))
    if s > grid.rho_max - grid.h_rho + eps:
        raise DomainError(f"radius {s} exceeds grid (rho_max={grid.rho_max}, margin one cell)")
    if region.z0 - s < grid.z_min + grid.h_z - eps or region.z0 + s > grid.z_max - grid.h_z + eps:
        raise DomainError(f"cylinder |z-{region.z0}|<{s} leaves the grid interior")
    if times is not None:
        times = np.asarray(times, dtype=float)
        teps = 1e-9 * max(1.0, abs(times[-1]))
        if region.t_min < times[0] - teps or region.t0 > times[-1] + teps:
            raise DomainError(
                f"time window [{region.t_min}, {region.t0}] not covered by samples "
                f"[{times[0]}, {times[-1]}]")


def integrate_lp(grid: CylGrid, times: Sequence[float], values: np.ndarray,
                 region: ParabolicCylinder, p_space: float,
                 p_time: float | None = None) -> float:
    """Space-time Lebesgue norm of sampled magnitudes over a parabolic cylinder.

    ``values`` has shape ``(n_times, n_rho + 1, n_z + 1)`` and holds
    ``|u|``.  With ``p_time=None`` the result is the single-exponent norm
    ``(int_Q |u|^p dz)^(1/p)``.  Otherwise the inner spatial integral is
    raised to ``p_time`` as is, giving
    ``(int (int |u|^p_space dx)^p_time dt)^(1/p_time)``; for ``(3, 4/3)``
    this is the cube of the ``L_{3,4}`` norm, the form the swirl criterion
    uses.  Time integration uses the piecewise-linear interpolant between
    samples, clipped to the window.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (len(times),) + grid.shape:
        raise ContractError(f"values shape {values.shape} inconsistent with grid/times")
    check_region(grid, region, times)
    if region.r == 0.0:
        return 0.0
    ws = spatial_weights(grid, region.radius, region.z0)
    wt = time_weights(times, region.t_min, region.t0)
    inner = np.einsum("ij,kij->k", ws, np.abs(values) ** p_space)
    if p_time is None:
        return float(np.dot(wt, inner)) ** (1.0 / p_space)
    return float(np.dot(wt, inner**p_time)) ** (1.0 / p_time)


# ---------------------------------------------------------------------------
# finite differences


def d_rho(f: np.ndarray, h: float, odd: bool = False) -> np.ndarray:
    """Centred radial derivative; axis value from the even (or odd) reflection."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    out[0] = f[1] / h if odd else 0.0
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return out


def d_z(f: np.ndarray, h: float) -> np.ndarray:
    return np.gradient(f, h, axis=1, edge_order=2)


def d_rho2(f: np.ndarray, h: float) -> np.ndarray:
    """Second radial derivative; axis uses the even ghost ``f[-1] = f[1]``."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    out[0] = 2 * (f[1] - f[0]) / h**2
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return out


def d_z2(f: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(f)
    out[:, 1:-1] = (f[:, 2:] - 2 * f[:, 1:-1] + f[:, :-2]) / h**2
    out[:, 0] = (2 * f[:, 0] - 5 * f[:, 1] + 4 * f[:, 2] - f[:, 3]) / h**2
    out[:, -1] = (2 * f[:, -1] - 5 * f[:, -2] + 4 * f[:, -3] - f[:, -4]) / h**2
    return out


def laplacian_array(f: np.ndarray, grid: CylGrid) -> np.ndarray:
    """``f_rr + f_r/rho + f_zz`` off the axis and ``2 f_rr + f_zz`` on it."""
    hr = grid.h_rho
    frr = d_rho2(f, hr)
    out = frr + d_z2(f, grid.h_z)
    out[1:] += d_rho(f, hr)[1:] / grid.rho[1:, None]
    out[0] += frr[0]
    return out


def _require(f: Field, kinds, op: str) -> None:
    if f.kind not in kinds:
        raise ContractError(f"{op} is undefined for field kind {f.kind!r}")


def cyl_laplacian(f: Field) -> Field:
    """Axisymmetric scalar Laplacian of ``f`` (second order, exact on quadratics)."""
    _require(f, SCALAR_KINDS, "cyl_laplacian")
    return Field(f.grid, "scalar", laplacian_array(f.values, f.grid), f.time)


def cyl_gradient(f: Field) -> tuple[Field, Field]:
    """Return ``(d f/d rho, d f/d z)``; the radial part is zero on the axis."""
    _require(f, SCALAR_KINDS, "cyl_gradient")
    g = f.grid
    return (Field(g, "v_rho", d_rho(f.values, g.h_rho), f.time),
            Field(g, "v_3", d_z(f.values, g.h_z), f.time))


def divergence_array(v_rho: np.ndarray, v_3: np.ndarray, grid: CylGrid) -> np.ndarray:
    dr = d_rho(v_rho, grid.h_rho, odd=True)
    out = dr + d_z(v_3, grid.h_z)
    out[1:] += v_rho[1:] / grid.rho[1:, None]
    # L'Hopital: v_rho / rho -> d v_rho / d rho on the axis
    out[0] += dr[0]
    return out


def divergence(v_rho: Field, v_phi: Field, v_3: Field) -> Field:
    """Nodal divergence ``d_rho v_rho + v_rho/rho + d_z v_3`` (``v_phi`` drops out)."""
    for f, k in ((v_rho, "v_rho"), (v_phi, "v_phi"), (v_3, "v_3")):
        if f.kind != k:
            raise ContractError(f"divergence expects {k}, got {f.kind!r}")
    return Field(v_rho.grid, "scalar",
                 divergence_array(v_rho.values, v_3.values, v_rho.grid), v_rho.time)
