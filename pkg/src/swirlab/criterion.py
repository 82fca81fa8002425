"""Scale-invariant velocity norms, the supercritical gauge and the energy-inequality check.

For an axis point ``z0 = (0, h, t0)`` and radius ``R``::

    f(R; z0) = R^-1/2 (int_{t0-R^2}^{t0} (int_{C(x0,R)} |v|^3 dx)^(4/3) dt)^(3/4)
    M(R; z0) = R^-1/2 (int_{Q(z0,R)} |v|^(10/3) dz)^(3/10)
    g(R)     = max(1, c_* (ln ln^(1/2)(1/R))^alpha),   0 < R <= 2/3

The regularity hypothesis asks ``f + M <= g`` at every scale; here it is
scanned over a finite list of axis probes and radii.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError
from .geometry import (ParabolicCylinder, check_region, d_rho, d_z, integrate_lp,
                       spatial_weights)
from .snapshots import SnapshotSeries

ALPHA_MAX = 1.0 / 224.0
R_GAUGE_MAX = 2.0 / 3.0


@dataclass(frozen=True)
class GaugeParams:
    c_star: float = 1.0
    alpha: float = ALPHA_MAX

    def __post_init__(self):
        if not self.c_star > 0:
            raise DomainError("c_star must be positive")
        if not 0 < self.alpha <= ALPHA_MAX:
            raise DomainError(f"alpha={self.alpha} violates 0 < alpha <= 1/224")


def eval_f(series: SnapshotSeries, z0: float, t0: float, R: float) -> float:
    """``f(R; (0, z0, t0))`` from the sampled velocity."""
    region = ParabolicCylinder(R, z0, t0)
    return integrate_lp(series.grid, series.times, series.speed(), region, 3.0, 4.0 / 3.0) / math.sqrt(R)


def eval_M(series: SnapshotSeries, z0: float, t0: float, R: float) -> float:
    """``M(R; (0, z0, t0))`` from the sampled velocity."""
    region = ParabolicCylinder(R, z0, t0)
    return integrate_lp(series.grid, series.times, series.speed(), region, 10.0 / 3.0) / math.sqrt(R)


def inner_log(R: float) -> float:
    """``ln(ln^(1/2)(1/R))``, the quantity the gauge raises to ``alpha``."""
    return math.log(math.sqrt(-math.log(R)))


def eval_g(R: float, params: GaugeParams) -> float:
    """Gauge ``g(R)``, clamped below by 1 (which also covers a nonpositive inner log)."""
    if not 0 < R <= R_GAUGE_MAX:
        raise DomainError(f"g(R) needs 0 < R <= 2/3, got {R}")
    L = inner_log(R)
    if L <= 0:
        return 1.0
    return max(1.0, params.c_star * L**params.alpha)


# ---------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class ProbeRecord:
    z0: float
    t0: float
    R: float
    f: float
    M: float
    g: float

    @property
    def margin(self) -> float:
        return self.g - (self.f + self.M)

    @property
    def passed(self) -> bool:
        return self.margin >= 0


@dataclass
class CriterionReport:
    records: list[ProbeRecord]
    sigma0: float = float("nan")
    params: GaugeParams = field(default_factory=GaugeParams)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: (r.R, r.z0, r.t0))

    @property
    def worst_margin(self) -> float:
        return min((r.margin for r in self.records), default=math.inf)

    @property
    def passed(self) -> bool:
        return self.worst_margin >= 0

    @property
    def first_failure(self) -> ProbeRecord | None:
        """Failing record at the largest radius (radii are scanned downward)."""
        bad = [r for r in self.records if not r.passed]
        return max(bad, key=lambda r: r.R) if bad else None

    def to_dict(self) -> dict:
        ff = self.first_failure
        return {"c_star": self.params.c_star, "alpha": self.params.alpha,
                "sigma0": self.sigma0, "worst_margin": self.worst_margin,
                "passed": self.passed, "first_failing_R": ff.R if ff else None,
                "records": [dict(asdict(r), margin=r.margin, passed=r.passed)
                            for r in self.records]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["probe_z", "probe_t", "R", "f", "M", "g", "margin"])
        for r in self.records:
            w.writerow([repr(r.z0), repr(r.t0), repr(r.R), repr(r.f), repr(r.M), repr(r.g),
                        repr(r.margin)])
        return buf.getvalue()


def dyadic_radii(r_max: float, count: int) -> list[float]:
    return [r_max * 2.0**-j for j in range(count)]


def scan_condition(series: SnapshotSeries, probes: Sequence[tuple[float, float]],
                   radii: Sequence[float], params: GaugeParams) -> CriterionReport:
    """Evaluate ``f + M`` against ``g`` for every ``(probe, R)``.

    ``probes`` are axis points ``(z0, t0)``.  The supremum over all heights
    is replaced by this finite list.
    """
    speed = series.speed()
    recs = []
    for z0, t0 in probes:
        for R in radii:
            if not 0 < R <= R_GAUGE_MAX:
                raise DomainError(f"radius {R} outside (0, 2/3]")
            region = ParabolicCylinder(R, z0, t0)
            f = integrate_lp(series.grid, series.times, speed, region, 3.0, 4.0 / 3.0) / math.sqrt(R)
            M = integrate_lp(series.grid, series.times, speed, region, 10.0 / 3.0) / math.sqrt(R)
            recs.append(ProbeRecord(z0, t0, R, f, M, eval_g(R, params)))
    sigma0 = eval_sigma0(series) if series.has("v_phi") else float("nan")
    return CriterionReport(recs, sigma0, params)


def eval_sigma0(series: SnapshotSeries) -> float:
    """``sup |rho v_phi|`` over the first snapshot."""
    series.require("v_phi")
    return float(np.max(np.abs(series.grid.rho[:, None] * series.data["v_phi"][0])))


# ---------------------------------------------------------------------------
# local energy inequality


@dataclass(frozen=True)
class Bump:
    """Canonical test function ``phi = ((1 - |x-x0|^2/a^2)_+ * tau(t))^2``.

    ``x0 = (0, 0, z0)`` and ``tau(t) = (1 - ((t - t_c)/b)^2)_+``, so ``phi``
    is C^1, nonnegative and supported in ``|x - x0| < a``,
    ``|t - t_c| < b``.
    """

    a: float
    z0: float
    t_c: float
    b: float

    def parts(self, rho, z, t):
        """Return ``phi, d_t phi, Lap phi, d_rho phi, d_z phi`` on a ``(rho, z)`` mesh at time ``t``."""
        a2 = self.a**2
        s = np.clip(1 - (rho**2 + (z - self.z0) ** 2) / a2, 0.0, None)
        inside = s > 0
        u = (t - self.t_c) / self.b
        tau = max(0.0, 1 - u * u)
        dtau = -2 * u / self.b if tau > 0 else 0.0
        phi = (s * tau) ** 2
        dt_phi = 2 * s * s * tau * dtau
        # spatial derivatives of S = s^2: grad S = 2 s grad s, grad s = -2 x / a^2
        ds_dr = np.where(inside, -2 * rho / a2, 0.0)
        ds_dz = np.where(inside, -2 * (z - self.z0) / a2, 0.0)
        lap_s = np.where(inside, -6.0 / a2, 0.0)
        lap_S = 2 * (ds_dr**2 + ds_dz**2) + 2 * s * lap_s
        t2 = tau * tau
        return phi, dt_phi, t2 * lap_S, t2 * 2 * s * ds_dr, t2 * 2 * s * ds_dz


def grad_norm_sq(grid, v_rho, v_phi, v_3) -> np.ndarray:
    """``|grad v|^2`` for an axisymmetric vector field in cylindrical components."""
    hr, hz = grid.h_rho, grid.h_z
    out = (d_rho(v_rho, hr, odd=True) ** 2 + d_z(v_rho, hz) ** 2
           + d_rho(v_phi, hr, odd=True) ** 2 + d_z(v_phi, hz) ** 2
           + d_rho(v_3, hr) ** 2 + d_z(v_3, hz) ** 2)
    hoop = np.zeros(grid.shape)
    rho = grid.rho[1:, None]
    hoop[1:] = (v_rho[1:] / rho) ** 2 + (v_phi[1:] / rho) ** 2
    # axis limits: v/rho -> d_rho v
    hoop[0] = d_rho(v_rho, hr, odd=True)[0] ** 2 + d_rho(v_phi, hr, odd=True)[0] ** 2
    return out + hoop


@dataclass(frozen=True)
class EnergyResidual:
    times: np.ndarray
    residual: np.ndarray  # RHS - LHS at every snapshot time after the first
    scale: float          # size of the largest term, for relative reading

    @property
    def worst(self) -> float:
        return float(self.residual.min()) if len(self.residual) else 0.0


def energy_inequality_residual(series: SnapshotSeries, bump: Bump) -> EnergyResidual:
    """``RHS - LHS`` of the local energy inequality for the canonical bump.

    For every snapshot time ``t`` the inequality::

        int phi |v|^2 (t) + 2 int_{T1}^t int phi |grad v|^2
            <= int_{T1}^t int |v|^2 (d_t phi + Lap phi) + v . grad phi (|v|^2 + 2 q)

    is evaluated with ``T1`` the first snapshot time; time integrals use the
    trapezoidal rule over snapshots and the ``|v|^2 Lap phi`` term is
    integrated by parts.  The bump must vanish at ``T1`` and be
    supported inside the grid.
    """
    if not series.has("pressure"):
        raise ContractError("energy inequality needs pressure snapshots")
    series.require("v_rho", "v_phi", "v_3")
    g = series.grid
    T1 = series.times[0]
    if bump.t_c - bump.b < T1 - 1e-12:
        raise DomainError("bump must vanish at the first snapshot time")
    check_region(g, ParabolicCylinder(bump.a, bump.z0, series.times[-1], mu=1e-30))
    R, Z = g.mesh()
    W = spatial_weights(g, bump.a, bump.z0)
    lhs_now, dissip, rhs = [], [], []
    for k, t in enumerate(series.times):
        vr, vp, w, q = (series.data[x][k] for x in ("v_rho", "v_phi", "v_3", "pressure"))
        phi, dt_phi, lap_phi, dr_phi, dz_phi = bump.parts(R, Z, t)
        v2 = vr**2 + vp**2 + w**2
        lhs_now.append(np.sum(W * phi * v2))
        dissip.append(2 * np.sum(W * phi * grad_norm_sq(g, vr, vp, w)))
        # |v|^2 Lap phi enters as -grad|v|^2 . grad phi: Lap phi jumps at the edge of the
        # support and would spoil the quadrature order
        diff = d_rho(v2, g.h_rho) * dr_phi + d_z(v2, g.h_z) * dz_phi
        rhs.append(np.sum(W * (v2 * dt_phi - diff + (vr * dr_phi + w * dz_phi) * (v2 + 2 * q))))
    lhs_now, dissip, rhs = map(np.asarray, (lhs_now, dissip, rhs))
    ts = series.times
    cum = lambda y: np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(ts))])
    res = cum(rhs) - (lhs_now + cum(dissip))
    scale = float(max(np.abs(lhs_now).max(), np.abs(cum(dissip)).max(), np.abs(cum(rhs)).max()))
    return EnergyResidual(ts[1:], res[1:], scale)
