"""Acceptance suite: one test per criterion, each reporting a single PASS/FAIL line.

Tolerances are fixed here and never adjusted to make a run pass.  The
convergence constant ``C`` used by criteria 2, 3 and 10 is the frozen
``CONVERGENCE_CONSTANT``; criterion 1 re-measures it and checks the frozen
value still bounds the measurement.
"""

from __future__ import annotations

import functools
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from swirlab.criterion import (Bump, GaugeParams, energy_inequality_residual, eval_f, eval_g,
                               eval_M)
from swirlab.dynamics import SolverConfig, run_scenario, stable_dt, swirl_residual
from swirlab.errors import PreconditionError
from swirlab.geometry import CylGrid, Field, ParabolicCylinder
from swirlab.moser import (LemmaInputs, const_beta0_log, const_beta2_log2, const_c1,
                           const_c1_prime, const_hatbeta2_bound, const_kappa0_delta0,
                           const_mu_star, const_s, const_theta0, const_thresholds, level_sets,
                           pi_from_swirl, verify_growth_lemmas)
from swirlab.oscillation import (CONVERGENCE_CONSTANT, default_tol_rel, dyadic_scan,
                                 envelope_holds, fit_decay, max_principle_monitor)
from swirlab.scenarios import lamb_oseen, rigid_rotation, zero
from swirlab.snapshots import SnapshotSeries

C = CONVERGENCE_CONSTANT
RESULTS: list[str] = []


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d} {title}: {detail}"
    RESULTS.append(line)
    print(line)


# ---------------------------------------------------------------------------
# shared runs


@functools.lru_cache(maxsize=None)
def rigid_run():
    """Rigid rotation, 128 x 128 nodes-intervals on C(1), 1000 full Navier-Stokes steps."""
    g = CylGrid(1.0, -1.0, 1.0, 128, 128)
    dt = stable_dt(g, cfl_safety=0.9)
    t0 = time.perf_counter()
    res = run_scenario(rigid_rotation(), g, SolverConfig(dt, 1000 * dt), snapshot_stride=10)
    return res, time.perf_counter() - t0


LO_SIZES = (32, 64, 128)


@functools.lru_cache(maxsize=None)
def lamb_oseen_run(n: int):
    """Full Navier-Stokes Lamb-Oseen on [0, 4] x [-1/2, 1/2] up to t = 0.1."""
    g = CylGrid(4.0, -0.5, 0.5, n, n // 4)
    dt = stable_dt(g, cfl_safety=0.9, swirl_drift=True)
    return run_scenario(lamb_oseen(), g, SolverConfig(dt, 0.1), snapshot_stride=1)


@functools.lru_cache(maxsize=None)
def lamb_oseen_axis_run():
    """Swirl-only Lamb-Oseen, h = 1/128, snapshots on the dyadic times k/1024 up to 1/8."""
    g = CylGrid(0.5, -5 / 16, 5 / 16, 64, 80)
    per = 72                                     # steps per 1/1024
    dt = 1.0 / (1024 * per)
    return run_scenario(lamb_oseen(), g, SolverConfig(dt, 0.125), snapshot_stride=per,
                        flow=False)


@functools.lru_cache(maxsize=None)
def zero_run():
    g = CylGrid(1.0, -1.0, 1.0, 16, 32)
    dt = stable_dt(g, cfl_safety=0.9)
    return run_scenario(zero(), g, SolverConfig(dt, 100 * dt), snapshot_stride=10)


def exact_runs():
    out = {"rigid_rotation": rigid_run()[0].series, "zero": zero_run().series,
           "lamb_oseen_axis": lamb_oseen_axis_run().series}
    for n in LO_SIZES:
        out[f"lamb_oseen_{n}"] = lamb_oseen_run(n).series
    return out


def constant_series(U=1.0, n=128):
    g = CylGrid(1.0, -1.0, 1.0, n, n)
    times = np.linspace(-0.5, 0.0, 11)
    z = np.zeros((len(times),) + g.shape)
    return SnapshotSeries(g, times, {"v_rho": z, "v_phi": z.copy(), "v_3": z + U,
                                     "pressure": z.copy()})


# ---------------------------------------------------------------------------
# manufactured swirl for the convergence study


def manufactured_error(n: int) -> tuple[float, float]:
    """Max truncation error of the discrete swirl operator on a smooth steady profile."""
    g = CylGrid(1.0, -1.0, 1.0, n, 2 * n)
    R, Z = g.mesh()
    zf = 1 + 0.5 * np.sin(Z)
    sigma = R**2 * np.exp(-R**2) * zf
    exact = (-8 * R**2 + 4 * R**4) * np.exp(-R**2) * zf - 0.5 * np.sin(Z) * R**2 * np.exp(-R**2)
    zero_ = np.zeros(g.shape)
    res = swirl_residual(Field(g, "swirl", sigma), Field(g, "v_rho", zero_), Field(g, "v_3", zero_))
    # residual = -L_h sigma; error of the discrete operator against L sigma
    err = np.abs(-res - exact)[1:-1, 1:-1]
    return float(err.max()), g.h


# ---------------------------------------------------------------------------
# criteria


def test_criterion_01_rigid_rotation():
    res, secs = rigid_run()
    s = res.series
    g = s.grid
    R, _ = g.mesh()
    drift_v = float(np.abs(s.data["v_phi"] - s.data["v_phi"][0]).max())
    drift_s = float(np.abs(s.data["swirl"] - s.data["swirl"][0]).max())
    zero_ = np.zeros(g.shape)
    r_sig = float(np.nanmax(np.abs(swirl_residual(Field(g, "swirl", R**2), Field(g, "v_rho", zero_),
                                                  Field(g, "v_3", zero_)))))
    errs = [manufactured_error(n) for n in (32, 64, 128)]
    orders = [math.log(errs[i][0] / errs[i + 1][0]) / math.log(errs[i][1] / errs[i + 1][1])
              for i in range(2)]
    c_meas = max(e / h**2 for e, h in errs)
    ok = (s.meta["n_steps"] == 1000 and max(drift_v, drift_s) <= 5e-3
          and r_sig <= C * g.h**2 and all(1.9 <= p <= 2.1 for p in orders)
          and c_meas <= C and secs <= 120)
    report(1, "rigid rotation", ok,
           f"drift v_phi {drift_v:.2e}, sigma {drift_s:.2e} (<= 5e-3); residual of rho^2 "
           f"{r_sig:.2e} (<= C h^2 = {C * g.h**2:.2e}); orders {orders[0]:.3f}, {orders[1]:.3f}; "
           f"measured C {c_meas:.3f} <= {C}; {secs:.1f} s")
    assert ok


def test_criterion_02_lamb_oseen_oracle():
    rows, ok = [], True
    for n in LO_SIZES:
        s = lamb_oseen_run(n).series
        g = s.grid
        k = s.index_at(0.1)
        ex = lamb_oseen().exact_fields(g, 0.1)["swirl"]
        err = float(np.abs(s.data["swirl"][k] - ex).max())
        ok &= err <= C * g.h**2
        rows.append(f"n={n}: {err:.2e} <= {C * g.h**2:.2e}")
    s = lamb_oseen_run(LO_SIZES[-1]).series
    i2 = int(np.argmin(np.abs(s.grid.rho - 2.0)))
    spot = float(s.data["swirl"][0, i2, 0])
    ok &= s.grid.rho[i2] == 2.0 and round(spot, 4) == 0.6321
    report(2, "Lamb-Oseen oracle", ok, "; ".join(rows) + f"; sigma(2, 0) = {spot:.4f}")
    assert ok


def test_criterion_03_maximum_principle():
    worst, total, ok = [], 0, True
    for name, s in exact_runs().items():
        rep = max_principle_monitor(s)
        total += len(rep.violations)
        ok &= rep.ok and rep.tol_rel == default_tol_rel(s.grid.h)
        if rep.sigma0 > 0:
            worst.append(f"{name} {rep.sup_abs.max() / rep.sigma0 - 1:+.1e}")
        else:
            worst.append(f"{name} sup {rep.sup_abs.max():.1e}")
    report(3, "maximum principle", ok, f"{total} violations; sup/Sigma0 - 1: " + ", ".join(worst))
    assert ok


def test_criterion_04_homogeneity_and_closed_forms():
    s = lamb_oseen_run(LO_SIZES[-1]).series
    args = (0.0, 0.1, 0.3)
    f0, m0 = eval_f(s, *args), eval_M(s, *args)
    devs = []
    for mu in (2.0, 10.0):
        sm = s.scaled(mu)
        devs.append(abs(eval_f(sm, *args) / f0 / mu**3 - 1))
        devs.append(abs(eval_M(sm, *args) / m0 / mu - 1))
    qerr = []
    for U, R in ((1.0, 0.5), (2.0, 0.5), (1.0, 0.37)):
        c = constant_series(U)
        qerr.append(abs(eval_f(c, 0.0, 0.0, R) - 2 * math.pi * U**3 * R**4))
        qerr.append(abs(eval_M(c, 0.0, 0.0, R) - (2 * math.pi) ** 0.3 * U * R))
    ok = max(devs) <= 1e-12 and max(qerr) <= 1e-3
    report(4, "criterion homogeneity", ok,
           f"max homogeneity deviation {max(devs):.1e} (<= 1e-12); "
           f"closed-form error {max(qerr):.1e} (<= 1e-3)")
    assert ok


def test_criterion_05_gauge():
    p = GaugeParams(1.0, 1 / 224)
    g0 = eval_g(math.exp(-math.e**2), p)
    radii = np.logspace(-6, math.log10(2 / 3), 100)
    vals = [eval_g(float(r), p) for r in radii]
    mono = all(a >= b for a, b in zip(vals, vals[1:]))
    ok = g0 == 1.0 and mono and radii[0] > 1e-6 * (1 - 1e-12)
    report(5, "gauge law", ok, f"g(e^-e^2) = {g0!r}; nonincreasing on 100-point scan: {mono}")
    assert ok


def test_criterion_06_oscillation_decay():
    s = lamb_oseen_axis_run().series
    t0 = time.perf_counter()
    R = 1 / 8
    recs = dyadic_scan(s, 0.0, float(s.times[-1]), 4 * s.grid.h, 2 * R)
    fit = fit_decay(recs, R)
    env = envelope_holds(recs, R, fit.C2 - 0.1)
    secs = time.perf_counter() - t0
    ok = len(recs) >= 4 and 1.9 <= fit.C2 <= 2.1 and all(env) and secs <= 60
    report(6, "oscillation decay", ok,
           f"{len(recs)} radii {recs[-1].r:.4g}..{recs[0].r:.4g}; C2 = {fit.C2:.4f} "
           f"+- {fit.C2_ci95:.1e}, C1 = {fit.C1:.4f}; envelope holds on {sum(env)}/{len(env)}; "
           f"{secs:.2f} s")
    assert ok


def _mp_rel(a, b):
    return abs(mpmath.mpf(a) - b) / abs(b)


def test_criterion_07_constants():
    mpmath.mp.dps = 40
    mp = mpmath.mpf
    examples = [
        (const_c1(0.5, 1.0, 0.5, 1.0, 0.0, 1.0), mp(2) ** (mp(16) / 3) * (1 + mp(0.5) / mpmath.sqrt(mp(0.5))) ** 3),
        (const_c1_prime(0.5, 0.5, 1.0, 1.0), mp(2) ** (mp(16) / 3) * (1 + mp(16) ** mp(0.1)) ** 3),
        (const_mu_star(0.5), mp(1)),
        (const_mu_star(1.0), mp(2) ** (-mp(10) / 3)),
        (const_theta0(1.0, 0.0), mp(1)),
        (const_theta0(0.5, 1.0), (mp(1) / 80) ** (mp(4) / 3)),
        (const_s(1, 1, 1, 0), mp(2)),
        (const_s(1 / 3, 0.1, 0.5, 1.0), mp(3601)),
        (const_kappa0_delta0(1.0, 2.0)[0], mp(0.5)),
        (const_kappa0_delta0(1.0, 2.0)[1], mp(0.25) ** mp(2.25)),
        (const_kappa0_delta0(0.0, 1.0)[1], mp(1)),
    ]
    R = mp("1e-10")
    L = mpmath.log(1 / R)
    examples.append((const_hatbeta2_bound(1e-10, 1 / 224).value,
                     L ** -0.5 * mpmath.log(mpmath.log(mpmath.sqrt(L)) ** (mp(1) / 224))))
    th = const_thresholds(GaugeParams())
    examples.append((th["R*3"].lnln, mpmath.log(mpmath.e**2 + mpmath.log(2))))
    worst = max(float(_mp_rel(a, b)) for a, b in examples)
    # N formula at a representable radius
    Rf = 1e-10
    b0 = const_beta0_log(Rf, -Rf * Rf, 1.0, GaugeParams(), enforce=False)
    n_ok = b0.N == math.floor(9 / 8 / (1 / eval_g(4 * Rf / 3, GaugeParams())) ** (4 / 3)) + 1
    degenerate = const_hatbeta2_bound(math.exp(-math.e**2), 1 / 224).degenerate
    # 10^3-point monotonicity sweeps
    sweeps = {
        "c1 vs gap": (np.diff([const_c1(1 - x, 1, 0.5, 1) for x in np.linspace(0.01, 0.99, 1000)]) < 0).all(),
        "mu* vs c1": (np.diff([const_mu_star(x) for x in np.linspace(0.1, 100, 1000)]) < 0).all(),
        "theta0 vs f": (np.diff([const_theta0(0.5, x) for x in np.linspace(0, 50, 1000)]) <= 0).all(),
        "s vs f": (np.diff([const_s(1 / 3, 0.1, 0.5, x) for x in np.linspace(0, 10, 1000)]) >= 0).all(),
        "beta2 vs g": (np.diff([const_beta2_log2(0.5, x).log2 for x in np.linspace(1, 2, 1000)]) < 0).all(),
        "delta0 vs M0": (np.diff([const_kappa0_delta0(0.5, x)[1] for x in np.linspace(1, 20, 1000)]) < 0).all(),
        "beta0 vs g": (np.diff([const_beta0_log(None, None, 1.0, GaugeParams(x), lnln=60.0,
                                                tbar_ratio=-1.0, enforce=False).ln_beta0
                                for x in np.linspace(1, 3, 1000)]) <= 0).all(),
    }
    b2 = const_beta2_log2(Fraction(1, 2), 1, 1)
    exact_b2 = b2.exponent == -(2**46) and isinstance(b2.exponent, int) and b2.offset == -math.log2(6)
    ok = worst <= 1e-12 and n_ok and degenerate and all(sweeps.values()) and exact_b2
    report(7, "constants ledger", ok,
           f"{len(examples)} examples, worst rel error {worst:.1e} (<= 1e-12); N formula {n_ok}; "
           f"{sum(map(bool, sweeps.values()))}/{len(sweeps)} sweeps monotone; "
           f"log2 beta2 = {b2.exponent} - log2 6 exact: {exact_b2}")
    assert ok


def _pi_series(name, s):
    """Level-set input for a run: pi built from the swirl, or the raw swirl when it is constant."""
    g = s.grid
    t0 = float(s.times[-1])
    R = min(1 / 8, 0.45 * math.sqrt(t0 - s.times[0]), 0.45 * (g.rho_max - g.h_rho),
            0.45 * (min(-g.z_min, g.z_max) - g.h_z))
    pi, k_R, _ = pi_from_swirl(s, R, 0.0, t0)
    return pi, k_R, R


def test_criterion_08_level_sets():
    g = CylGrid(0.5, -0.5, 0.5, 64, 128)
    R, kR = 0.2, 1.0
    rr, _ = g.mesh()
    times = np.linspace(0, 0.1, 41)
    s = SnapshotSeries(g, times, {"scalar": np.broadcast_to(rr**2 / R**2 * kR, (41,) + g.shape).copy()})
    rep = level_sets(s, R, 0.25, kR)
    dev = float(np.abs(rep.fractions - 0.75).max())
    ok = dev <= rep.tol
    mv = []
    for name, run in exact_runs().items():
        if name == "zero":
            continue
        pi, k_R, Rr = _pi_series(name, run)
        kappa0, _ = const_kappa0_delta0(0.0, 2.0)
        r = level_sets(pi, Rr, kappa0, k_R)
        mv.append(r.mean_value_holds)
    ok &= all(mv)
    report(8, "level sets", ok,
           f"annulus fraction deviation {dev:.4f} <= one layer {rep.tol:.4f}; "
           f"mean-value property on {sum(mv)}/{len(mv)} runs")
    assert ok


def test_criterion_09_harness():
    failures, rows = 0, []
    g = CylGrid(0.5, -0.5, 0.5, 32, 64)
    times = np.linspace(0, 0.12, 49)
    for k in (0.5, 1.0, 7.0):
        s = SnapshotSeries(g, times, {"scalar": np.full((49,) + g.shape, k)})
        led = verify_growth_lemmas(s, k, 1 / 8)
        failures += len(led.failures)
    rows.append("constant fields: 3 ledgers")
    for name, run in exact_runs().items():
        try:
            pi, k_R, R = _pi_series(name, run)
        except PreconditionError:
            rows.append(f"{name}: refused, (B_R) unavailable")
            continue
        led = verify_growth_lemmas(pi, k_R, R, inputs=LemmaInputs())
        failures += len(led.failures)
        st = [r.status for r in led.results]
        rows.append(f"{name}: {st.count('pass')} pass/{st.count('vacuous')} vacuous")
    ok = failures == 0
    report(9, "lemma harness", ok, f"{failures} hypothesis-holds-conclusion-fails events; " + ", ".join(rows))
    assert ok


def test_criterion_10_energy_inequality():
    rows, ok = [], True
    cases = [("rigid_rotation", rigid_run()[0].series, 0.8)]
    cases += [(f"lamb_oseen_{n}", lamb_oseen_run(n).series, 0.3) for n in LO_SIZES]
    for name, s, a in cases:
        T = float(s.times[-1])
        res = energy_inequality_residual(s, Bump(a, 0.0, T / 2, T / 2))
        bound = -C * s.grid.h**2
        ok &= res.worst >= bound
        rows.append(f"{name} {res.worst:+.1e} (>= {bound:.1e})")
    report(10, "energy inequality", ok, "; ".join(rows))
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
