"""Empirical check of the level-set growth lemmas on sampled fields.

``pi`` is a nonnegative solution of the swirl-type equation near an axis
probe ``(0, z0, t0)``.  Every lemma is evaluated as a (hypothesis,
conclusion) pair on the samples; a lemma fails only when its hypothesis
holds and its conclusion misses by more than the discretisation slack (one
boundary-cell layer for measures, one cell of variation for pointwise
values).  Cylinders are ``Q^{lam,theta}((0, z0, t), R) = C(lam R) x ]t - theta R^2, t[``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..criterion import GaugeParams, eval_f, eval_M, eval_g
from ..errors import ContractError, DomainError, PreconditionError
from ..geometry import ParabolicCylinder, check_region, integrate_lp, spatial_weights, time_weights
from ..snapshots import SnapshotSeries
from . import constants as K
from .levelsets import boundary_layer_fraction, level_sets

PASS, FAIL, VACUOUS, SKIPPED = "pass", "fail", "vacuous", "skipped"


@dataclass(frozen=True)
class LemmaInputs:
    """Parameters of the lemma checks; ``f2R``/``M2R`` default to values measured on the data."""

    c: float = 1.0
    M0: float = 2.0
    gauge: GaugeParams = field(default_factory=GaugeParams)
    f2R: Optional[float] = None
    M2R: Optional[float] = None
    # sup bound for (k - pi)_+
    tau1: float = 0.5
    tau: float = 1.0
    gamma1: float = 0.5
    gamma: float = 1.0
    # measure-to-pointwise step
    lam1: float = 0.5
    lam: float = 1.0
    theta: float = 0.5
    # iteration count s
    delta1: float = 1.0 / 3.0
    mu1: float = 0.1
    theta1: float = 0.25
    # one-step lower bound beta_2
    sigma_frac: float = 0.5


@dataclass
class LemmaResult:
    lemma: str
    status: str
    hypothesis_holds: Optional[bool]
    conclusion_holds: Optional[bool]
    margins: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class LemmaLedger:
    R: float
    z0: float
    t0: float
    k_R: float
    results: list

    @property
    def failures(self) -> list:
        return [r for r in self.results if r.status == FAIL]

    def to_dict(self) -> dict:
        return {"R": self.R, "z0": self.z0, "t0": self.t0, "k_R": self.k_R,
                "n_failures": len(self.failures),
                "lemmas": [asdict(r) for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_plain)


def _plain(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


# ---------------------------------------------------------------------------
# construction of pi from the swirl


def pi_from_swirl(series: SnapshotSeries, R: float, z0: float = 0.0, t0: float | None = None):
    """Return ``(pi_series, k_R, side)`` with ``pi = M_2R - sigma`` or ``sigma - m_2R``.

    ``k_R = osc_{Q(2R)} sigma / 2``.  The side whose axis values stay above
    ``k_R`` throughout ``Q(2R)`` is chosen (``"upper"`` for ``M_2R - sigma``);
    :class:`PreconditionError` if neither does.
    """
    from ..oscillation import measure_osc

    series.require("swirl")
    t0 = float(series.times[-1]) if t0 is None else t0
    rec = measure_osc(series, ParabolicCylinder(2 * R, z0, t0))
    k_R = 0.5 * rec.osc
    if not k_R > 0:
        raise PreconditionError("sigma has zero oscillation on Q(2R); k_R would vanish")
    sig = series.data["swirl"]
    for side, pi in (("upper", rec.sup - sig), ("lower", sig - rec.inf)):
        cand = series.with_data(scalar=pi)
        if axis_lower_bound(cand, R, z0, t0) >= k_R * (1 - 1e-12):
            return cand, k_R, side
    raise PreconditionError("neither M_2R - sigma nor sigma - m_2R stays above k_R on the axis")


# ---------------------------------------------------------------------------
# sample selection helpers


def _tmask(times, lo, hi):
    teps = 1e-9 * max(1.0, abs(lo), abs(hi))
    return (times >= lo - teps) & (times <= hi + teps)


def _smask(grid, radius, z0, half_height=None):
    hh = radius if half_height is None else half_height
    eps = 1e-9 * max(1.0, radius)
    return (grid.rho[:, None] <= radius + eps) & (np.abs(grid.z[None, :] - z0) <= hh + eps)


def axis_lower_bound(series: SnapshotSeries, R: float, z0: float, t0: float,
                     kind: str = "scalar") -> float:
    """``min pi(0, x_3, t)`` over ``|x_3 - z0| < 2R``, ``t0 - 4R^2 <= t <= t0``."""
    g = series.grid
    tm = _tmask(series.times, t0 - 4 * R * R, t0)
    zm = np.abs(g.z - z0) <= 2 * R * (1 + 1e-9)
    return float(series.data[kind][tm][:, 0, :][:, zm].min())


def _block(series, kind, lam_r, z0, lo, hi):
    tm = _tmask(series.times, lo, hi)
    sm = _smask(series.grid, lam_r, z0)
    return series.data[kind][tm][:, sm], tm


def _cell_slack(series, kind, radius, z0, lo, hi) -> float:
    """Largest nodal jump of ``kind`` between neighbours in the region: one cell of variation."""
    tm = _tmask(series.times, lo, hi)
    g = series.grid
    sm = _smask(g, radius + max(g.h_rho, g.h_z), z0, radius + max(g.h_rho, g.h_z))
    d = series.data[kind][tm]
    jr = np.abs(np.diff(d, axis=1))
    jz = np.abs(np.diff(d, axis=2))
    mr = sm[1:, :] & sm[:-1, :]
    mz = sm[:, 1:] & sm[:, :-1]
    out = 0.0
    if jr.size and mr.any():
        out = max(out, float(jr[:, mr].max()))
    if jz.size and mz.any():
        out = max(out, float(jz[:, mz].max()))
    return out


def _fraction_at(series, kind, W, vol, k, level, strict=False):
    p = series.data[kind][k]
    inside = W > 0
    m = (p > level) if strict else (p >= level)
    return float(np.sum(W[m & inside])) / vol


# ---------------------------------------------------------------------------
# the lemmas


def verify_growth_lemmas(series: SnapshotSeries, k_R: float, R: float, z0: float = 0.0,
                         t0: float | None = None, inputs: LemmaInputs = LemmaInputs(),
                         kind: str = "scalar") -> LemmaLedger:
    """Evaluate every growth lemma at the probe and return a ledger.

    Raises :class:`ContractError` if ``k_R <= 0`` or ``pi`` is negative on
    ``Q(2R)``.  When property (B_R) fails every row is ``skipped``.
    """
    series.require(kind)
    if not k_R > 0:
        raise ContractError("k_R must be positive")
    if not 0 < R <= K.R_CAP + 1e-12:
        raise DomainError("lemmas are stated for 0 < R <= 1/6")
    t0 = float(series.times[-1]) if t0 is None else t0
    g = series.grid
    check_region(g, ParabolicCylinder(2 * R, z0, t0), series.times)
    blk, _ = _block(series, kind, 2 * R, z0, t0 - 4 * R * R, t0)
    if blk.size == 0:
        raise DomainError("no samples in Q(2R)")
    if blk.min() < 0:
        raise ContractError("pi is negative on Q(2R)")
    names = ("level_set_mean_value", "positivity_spreading", "level_iterations",
             "measure_to_pointwise", "sup_bound", "one_step_lower_bound", "chained_lower_bound")
    axis = axis_lower_bound(series, R, z0, t0, kind)
    if axis < k_R * (1 - 1e-12):
        note = f"precondition (B_R) fails: axis minimum {axis:.6g} < k_R = {k_R:.6g}"
        return LemmaLedger(R, z0, t0, k_R, [LemmaResult(n, SKIPPED, None, None, {}, note)
                                            for n in names])

    inp = inputs
    if inp.f2R is not None:
        f2R = inp.f2R
    elif series.has("v_rho") or series.has("v_phi") or series.has("v_3"):
        f2R = eval_f(series, z0, t0, 2 * R)
    else:
        f2R = 0.0
    if inp.M2R is not None:
        M2R = inp.M2R
    elif series.has("v_rho") or series.has("v_phi") or series.has("v_3"):
        M2R = eval_M(series, z0, t0, 2 * R)
    else:
        M2R = 0.0
    c = inp.c
    W = spatial_weights(g, R, z0)
    vol = math.pi * 2 * R**3
    layer = boundary_layer_fraction(g, R)
    sup_pi = float(blk.max())
    results = []

    # -- level-set selection: t_bar with |e_kappa0(t_bar)| >= delta0 |C(R)|
    kappa0, delta0 = K.const_kappa0_delta0(f2R, inp.M0, c)
    hyp = sup_pi <= inp.M0 * k_R * (1 + 1e-12)
    ls = level_sets(series, R, kappa0, k_R, z0, t0, kind)
    frac = ls.t_bar_measure / vol
    concl = frac >= delta0 - layer and ls.mean_value_holds
    results.append(_result("level_set_mean_value", hyp, concl,
                           {"kappa0": kappa0, "delta0": delta0, "fraction_at_t_bar": frac,
                            "t_bar": ls.t_bar, "E_fraction": ls.E_fraction,
                            "sup_pi_over_k_R": sup_pi / k_R}))
    t_bar = ls.t_bar

    # -- positivity spreads forward in time over theta0 R^2
    d0 = min(1.0, max(delta0, 1e-300))
    theta0 = K.const_theta0(d0, f2R, c)
    k0 = kappa0 * k_R
    ks = np.nonzero(_tmask(series.times, t_bar, min(t0, t_bar + theta0 * R * R)))[0]
    k_start = int(np.argmin(np.abs(series.times - t_bar)))
    f_start = _fraction_at(series, kind, W, vol, k_start, k0)
    hyp = f_start > d0
    fr = [_fraction_at(series, kind, W, vol, k, d0 * k0 / 3) for k in ks]
    concl = bool(fr) and min(fr) > d0 / 3 - layer
    results.append(_result("positivity_spreading", hyp, concl,
                           {"delta0": d0, "theta0": theta0, "start_fraction": f_start,
                            "min_fraction": min(fr) if fr else None, "n_times": len(ks)}))

    # -- the number of halvings s that makes {pi < 2^-s k1} small
    k1 = d0 * k0 / 3
    t_e = t0
    lo = t_e - inp.theta1 * R * R
    ks = np.nonzero(_tmask(series.times, lo, t_e))[0]
    fr = [_fraction_at(series, kind, W, vol, k, k1) for k in ks]
    hyp = bool(fr) and min(fr) >= inp.delta1
    s = K.const_s(inp.delta1, inp.mu1, inp.theta1, f2R, c)
    level = k1 * 2.0 ** -s if s < 1075 else 0.0
    small = _spacetime_fraction(series, kind, R, z0, lo, t_e, lambda p: p < level)
    concl = small <= inp.mu1 + layer
    results.append(_result("level_iterations", hyp, concl,
                           {"s": s, "k1": k1, "min_fraction": min(fr) if fr else None,
                            "small_fraction": small, "mu1": inp.mu1}))

    # -- small measure of {pi < k} forces pi >= k/2 on a smaller cylinder
    c1 = K.const_c1(inp.lam1, inp.lam, inp.theta / 2, inp.theta, M2R, c)
    mu_star = K.const_mu_star(c1)
    k = k_R
    lo = t0 - inp.theta * R * R
    below = _spacetime_fraction(series, kind, inp.lam * R, z0, lo, t0, lambda p: p < k)
    hyp = below < mu_star
    inner, _ = _block(series, kind, inp.lam1 * R, z0, t0 - inp.theta / 2 * R * R, t0)
    slack = _cell_slack(series, kind, inp.lam1 * R, z0, t0 - inp.theta / 2 * R * R, t0)
    mn = float(inner.min()) if inner.size else math.inf
    concl = mn >= k / 2 - slack
    results.append(_result("measure_to_pointwise", hyp, concl,
                           {"mu_star": mu_star, "below_fraction": below, "min_pi": mn,
                            "k_over_2": k / 2, "slack": slack}))

    # -- sup of (k - pi)_+ against its L^{10/3} mean
    c1 = K.const_c1(inp.tau1, inp.tau, inp.gamma1, inp.gamma, M2R, c)
    trunc = np.clip(k_R - series.data[kind], 0.0, None)
    tser = series.with_data(scalar=trunc)
    sup_blk, _ = _block(tser, "scalar", inp.tau1 * R, z0, t0 - inp.gamma1 * R * R, t0)
    sup_val = float(sup_blk.max()) if sup_blk.size else 0.0
    big = ParabolicCylinder(R, z0, t0, lam=inp.tau, mu=inp.gamma)
    vol_big = math.pi * 2 * (inp.tau * R) ** 3 * inp.gamma * R * R
    mean = integrate_lp(g, series.times, trunc, big, 10.0 / 3.0) / vol_big ** 0.3
    slack = _cell_slack(tser, "scalar", inp.tau1 * R, z0, t0 - inp.gamma1 * R * R, t0)
    concl = sup_val <= c1 * mean + slack
    results.append(_result("sup_bound", True, concl,
                           {"c1": c1, "sup": sup_val, "mean_10_3": mean, "slack": slack}))

    # -- one-step lower bound pi >= beta_2 k_2 (log-space comparison)
    g2R = eval_g(2 * R, inp.gauge) if 2 * R <= 2 / 3 else 1.0
    th = K.const_thresholds(inp.gauge, 1.0, inp.M0, c)
    lnln = K.lnln_of(R)
    tb = t0 - R * R
    kb = int(np.argmin(np.abs(series.times - tb)))
    start, _ = _block(series, kind, R, z0, series.times[kb], series.times[kb])
    k2 = min(k_R, float(start.min()))
    theta_b2 = min(1.0, (c / g2R) ** (4.0 / 3.0))
    hyp = k2 > 0 and th["R*1"].admits(lnln)
    b2 = K.const_beta2_log2(inp.sigma_frac, g2R, c)
    reg, _ = _block(series, kind, inp.sigma_frac * R, z0, tb, min(t0, tb + theta_b2 * R * R))
    mn = float(reg.min()) if reg.size else math.inf
    if mn > 0 and k2 > 0:
        concl = math.log2(mn) >= b2.log2 + math.log2(k2)
    else:
        concl = mn > 0
    results.append(_result("one_step_lower_bound", hyp, concl,
                           {"log2_beta2": b2.log2, "k2": k2, "min_pi": mn,
                            "theta0": theta_b2}))

    # -- chained lower bound pi >= beta_0 k on C(2R/3) x [t_bar, t0]
    r2 = th["R*2"]
    hyp = r2.admits(lnln)
    concl = None
    margins = {"lnln_R": lnln, "lnln_R*2": r2.lnln if r2.exists else None}
    if hyp:
        b0 = K.const_beta0_log(R, -R * R, 1.0, inp.gauge, c, thresholds=th)
        reg, _ = _block(series, kind, 2 * R / 3, z0, tb, t0)
        mn = float(reg.min())
        concl = mn > 0 and math.log(mn) >= b0.ln_beta0 + math.log(k2)
        margins.update(ln_beta0=b0.ln_beta0, N=b0.N, min_pi=mn)
    results.append(_result("chained_lower_bound", hyp, concl, margins,
                           "" if hyp else "R lies above R*2; the lemma says nothing here"))
    return LemmaLedger(R, z0, t0, k_R, results)


def _spacetime_fraction(series, kind, radius, z0, lo, hi, pred) -> float:
    """``|{pred(pi)} cap C(radius) x ]lo, hi[| / |C(radius) x ]lo, hi[|``."""
    g = series.grid
    W = spatial_weights(g, radius, z0)
    wt = time_weights(series.times, lo, hi)
    if wt.sum() <= 0:
        # window shorter than the sample spacing: use the nearest sample
        k = int(np.argmin(np.abs(series.times - 0.5 * (lo + hi))))
        wt = np.zeros(len(series.times))
        wt[k] = 1.0
    inside = W > 0
    num = 0.0
    for k in np.nonzero(wt > 0)[0]:
        num += wt[k] * float(np.sum(W[pred(series.data[kind][k]) & inside]))
    return num / (wt.sum() * W.sum())


def _result(name, hyp, concl, margins, note="") -> LemmaResult:
    hyp = bool(hyp)
    concl = None if concl is None else bool(concl)
    if not hyp:
        status = VACUOUS
    else:
        status = PASS if concl else FAIL
    return LemmaResult(name, status, hyp, concl, margins, note)


MAX_TRACE_STEPS = 12


def moser_trace(series: SnapshotSeries, k: float, R: float, z0: float = 0.0,
                t0: float | None = None, tau1: float = 0.5, tau: float = 1.0,
                gamma1: float = 0.5, gamma: float = 1.0, steps: int = MAX_TRACE_STEPS,
                kind: str = "scalar") -> list[dict]:
    """Normalised norms ``G_i`` of ``(k - pi)_+`` on the shrinking cylinders of the iteration.

    ``G_i = (|t_i|^-1 r_i^-3 int_{t_i}^{0} int_{C(r_i)} (k-pi)_+^(5 m_i/2))^(2/(5 m_i))``
    with ``m_i = (4/3)^i``, ``r_i = tau1 R + (tau-tau1) R 2^(1-i)`` and
    ``t_i = -gamma1 R^2 - (gamma-gamma1) R^2 4^(1-i)`` relative to ``t0``.
    Capped at 12 steps, where the exponent ``5 m_i/2`` is already about 79.
    """
    if not 1 <= steps <= MAX_TRACE_STEPS:
        raise DomainError(f"steps must lie in [1, {MAX_TRACE_STEPS}]")
    series.require(kind)
    t0 = float(series.times[-1]) if t0 is None else t0
    trunc = np.clip(k - series.data[kind], 0.0, None)
    scale = float(trunc.max())
    out = []
    for i in range(1, steps + 1):
        m = (4.0 / 3.0) ** i
        p = 2.5 * m
        r_i = tau1 * R + (tau - tau1) * R * 2.0 ** (1 - i)
        t_i = gamma1 * R * R + (gamma - gamma1) * R * R * 4.0 ** (1 - i)
        q = ParabolicCylinder(R, z0, t0, lam=r_i / R, mu=t_i / (R * R))
        if scale == 0:
            G = 0.0
        else:
            # normalise before the high power to keep it in range
            G = scale * integrate_lp(series.grid, series.times, trunc / scale, q, p) \
                * (t_i * r_i**3) ** (-1.0 / p)
        out.append({"i": i, "m": m, "r": r_i, "t": -t_i, "G": G})
    return out
