"""Oscillation of the swirl on nested parabolic cylinders.

``osc_{Q(r)} sigma = M_r - m_r`` with ``M_r``, ``m_r`` the nodal sup and
inf over all samples in ``Q(r)``.  Near a regular axis point the oscillation
decays like a power of the radius,

    osc_{Q(r)} sigma <= C1 (r / 2R)^C2 osc_{Q(2R)} sigma,

and the fitter below estimates ``C1``, ``C2`` from a dyadic scan.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import stats

from .errors import ContractError, DomainError
from .geometry import ParabolicCylinder, check_region
from .snapshots import SnapshotSeries

# err <= C h^2 for the swirl operator; measured max err/h^2 on a smooth
# manufactured solution is 3.571, 3.601, 3.614, 3.620 at n = 16..128, frozen with headroom
CONVERGENCE_CONSTANT = 3.7


@dataclass(frozen=True)
class OscRecord:
    z0: float
    t0: float
    r: float
    sup: float
    inf: float

    @property
    def osc(self) -> float:
        return self.sup - self.inf


def _region_mask(series: SnapshotSeries, q: ParabolicCylinder):
    g = series.grid
    s = q.radius
    eps = 1e-9 * max(1.0, s)
    in_r = g.rho <= s + eps
    in_z = np.abs(g.z - q.z0) <= s + eps
    teps = 1e-9 * max(1.0, abs(q.t0))
    in_t = (series.times >= q.t_min - teps) & (series.times <= q.t0 + teps)
    return in_t, in_r, in_z


def measure_osc(series: SnapshotSeries, q: ParabolicCylinder, kind: str = "swirl") -> OscRecord:
    """Nodal sup, inf and oscillation of ``kind`` over the closed cylinder ``q``."""
    series.require(kind)
    check_region(series.grid, q, series.times)
    in_t, in_r, in_z = _region_mask(series, q)
    if not (in_t.any() and in_r.any() and in_z.any()):
        raise DomainError(f"no samples inside Q(r={q.r})")
    block = series.data[kind][in_t][:, in_r][:, :, in_z]
    return OscRecord(q.z0, q.t0, q.r, float(block.max()), float(block.min()))


def dyadic_scan(series: SnapshotSeries, z0: float, t0: float, r_min: float, r_max: float,
                kind: str = "swirl") -> list[OscRecord]:
    """Records at ``r_max * 2^-j`` for every radius not below ``r_min``.

    Radii under four grid spacings are rejected: nodal extrema below that
    scale say nothing about the continuum oscillation.
    """
    h = max(series.grid.h_rho, series.grid.h_z)
    if r_min < 4 * h * (1 - 1e-12):
        raise DomainError(f"r_min={r_min} is below 4h={4 * h}")
    if r_max < r_min:
        raise DomainError("r_max < r_min")
    out = []
    r = r_max
    while r >= r_min * (1 - 1e-12):
        out.append(measure_osc(series, ParabolicCylinder(r, z0, t0), kind))
        r /= 2
    return out


@dataclass(frozen=True)
class DecayFit:
    R: float
    radii: tuple
    ratios: tuple          # osc(r) / osc(2R)
    C1: float
    C2: float
    C2_ci95: float         # half-width of the 95% interval on C2
    residual: float        # RMS of the log-log residual
    C2_envelope: float     # largest C2 with osc(r) <= 2 (r/2R)^C2 osc(2R) on every record
    violations: tuple = ()  # indices of records above the fitted C1 (r/2R)^C2 curve
    degenerate: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def fit_decay(records: Sequence[OscRecord], R: float) -> DecayFit:
    """Fit ``log(osc(r)/osc(2R)) = log C1 + C2 log(r/2R)`` by least squares.

    One record must sit at ``r = 2R``.  All-zero oscillations produce a
    degenerate fit (NaN constants) instead of an error.
    """
    two_r = 2 * R
    ref = [rec for rec in records if abs(rec.r - two_r) <= 1e-12 * two_r]
    if not ref:
        raise DomainError(f"no record at the reference radius 2R={two_r}")
    osc_ref = ref[0].osc
    radii = tuple(rec.r for rec in records)
    oscs = np.array([rec.osc for rec in records])
    if osc_ref <= 0 or np.all(oscs <= 0):
        nan = float("nan")
        return DecayFit(R, radii, tuple(np.zeros(len(radii))), nan, nan, nan, nan, nan, (), True)
    ratios = oscs / osc_ref
    keep = ratios > 0
    if keep.sum() < 4:
        raise DomainError("need at least 4 records with nonzero oscillation")
    x = np.log(np.array(radii)[keep] / two_r)
    y = np.log(ratios[keep])
    fit = stats.linregress(x, y)
    C2, C1 = float(fit.slope), float(math.exp(fit.intercept))
    n = int(keep.sum())
    ci = float(stats.t.ppf(0.975, n - 2) * fit.stderr) if n > 2 else float("inf")
    resid = float(np.sqrt(np.mean((y - (fit.intercept + fit.slope * x)) ** 2)))
    below = x < 0
    env = float(np.min((y[below] - math.log(2.0)) / x[below])) if below.any() else float("inf")
    pred = C1 * np.exp(C2 * np.log(np.array(radii) / two_r))
    viol = tuple(int(i) for i in np.nonzero(ratios > pred * (1 + 1e-9))[0])
    return DecayFit(R, radii, tuple(float(v) for v in ratios), C1, C2, ci, resid, env, viol)


def envelope_holds(records: Sequence[OscRecord], R: float, exponent: float,
                   prefactor: float = 2.0) -> list[bool]:
    """Per record: ``osc(r) <= prefactor (r/2R)^exponent osc(2R)``."""
    two_r = 2 * R
    osc_ref = next(rec.osc for rec in records if abs(rec.r - two_r) <= 1e-12 * two_r)
    return [rec.osc <= prefactor * (rec.r / two_r) ** exponent * osc_ref * (1 + 1e-12)
            for rec in records]


def records_to_csv(records: Sequence[OscRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["center_z", "center_t", "r", "M_r", "m_r", "osc"])
    for rec in records:
        w.writerow([repr(rec.z0), repr(rec.t0), repr(rec.r), repr(rec.sup), repr(rec.inf),
                    repr(rec.osc)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# maximum principle


@dataclass(frozen=True)
class MaxPrincipleReport:
    times: np.ndarray
    sup_abs: np.ndarray
    sigma0: float
    tol_rel: float
    violations: tuple = field(default=())

    @property
    def first_violation(self):
        return float(self.times[self.violations[0]]) if self.violations else None

    @property
    def ok(self) -> bool:
        return not self.violations


def default_tol_rel(h: float) -> float:
    return 10.0 * CONVERGENCE_CONSTANT * h * h


def max_principle_monitor(series: SnapshotSeries, tol_rel: float | None = None,
                          kind: str = "swirl") -> MaxPrincipleReport:
    """Track ``sup|sigma(., t)|`` and flag times exceeding ``Sigma_0 (1 + tol_rel)``."""
    series.require(kind)
    if tol_rel is None:
        tol_rel = default_tol_rel(series.grid.h)
    sup = np.abs(series.data[kind]).reshape(len(series), -1).max(axis=1)
    sigma0 = float(sup[0])
    bad = tuple(int(i) for i in np.nonzero(sup > sigma0 * (1 + tol_rel))[0])
    return MaxPrincipleReport(series.times.copy(), sup, sigma0, float(tol_rel), bad)


# ---------------------------------------------------------------------------
# iterated contraction


@dataclass(frozen=True)
class OscIteration:
    radii: np.ndarray
    betas: np.ndarray
    log_eta: float
    log_bound_integral: float   # -(1/2) sum bound via the integral comparison
    log_bound_geometric: float  # -c ln 2^(k+1), the geometric-decay form

    @property
    def eta(self) -> float:
        return math.exp(self.log_eta)


BetaSource = Union[Callable[[float], float], Sequence[float]]


def iterate_osc_bound(beta_fn: BetaSource, R: float, k: int, c: float | None = None) -> OscIteration:
    """``eta_k = prod_{i=0}^{k} (1 - beta_i / 2)`` with ``beta_i = beta(R / 2^(2i+1))``.

    Computed in log space.  When ``c`` is given (for ``beta(r) = c/ln(1/r)``)
    the report also carries the integral-comparison bound
    ``ln eta_k <= -(c/2) int_0^{k+1} dx / (ln(1/R) + (2x+1) ln 2)`` and the
    geometric form ``-c ln 2^(k+1)``; only the former is implied by the
    product (the latter fails for large ``k``).
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if not 0 < R < 1:
        raise DomainError("R must lie in (0, 1)")
    radii = R / 2.0 ** (2 * np.arange(k + 1) + 1)
    if callable(beta_fn):
        betas = np.array([float(beta_fn(r)) for r in radii])
    else:
        betas = np.asarray(beta_fn, float)[: k + 1]
        if len(betas) != k + 1:
            raise ContractError(f"need {k + 1} contraction factors")
    if np.any(betas <= 0) or np.any(betas > 1):
        raise ContractError("contraction factors must lie in (0, 1]")
    log_eta = float(np.sum(np.log1p(-betas / 2)))
    nan = float("nan")
    integral = geometric = nan
    if c is not None:
        L, l2 = math.log(1 / R), math.log(2.0)
        integral = -(c / 2) * (math.log(L + (2 * (k + 1) + 1) * l2) - math.log(L + l2)) / (2 * l2)
        geometric = -c * (k + 1) * l2
    return OscIteration(radii, betas, log_eta, integral, geometric)
