from __future__ import annotations

import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from swirlab.errors import ContractError, DomainError
from swirlab.geometry import CylGrid, ParabolicCylinder
from swirlab.oscillation import (OscRecord, default_tol_rel, dyadic_scan, envelope_holds,
                                 fit_decay, iterate_osc_bound, max_principle_monitor,
                                 measure_osc, records_to_csv)
from swirlab.scenarios import lamb_oseen, rigid_rotation, zero
from swirlab.snapshots import SnapshotSeries

from conftest import sampled, unit_grid


def test_constant_swirl_has_zero_oscillation():
    g = unit_grid(16, 32)
    s = SnapshotSeries(g, [0.0, 0.5, 1.0], {"swirl": np.zeros((3,) + g.shape) + 0.0})
    recs = dyadic_scan(s, 0.0, 1.0, 0.25, 0.5)
    assert [r.osc for r in recs] == [0.0, 0.0]
    fit = fit_decay(recs + [OscRecord(0, 1, 0.125, 0, 0), OscRecord(0, 1, 1 / 16, 0, 0)], 0.25)
    assert fit.degenerate and math.isnan(fit.C2)


def test_rigid_rotation_oscillation_is_r_squared():
    g = unit_grid(64, 128)
    s = sampled(rigid_rotation(), g, np.linspace(0, 0.3, 31))
    recs = dyadic_scan(s, 0.0, 0.3, 1 / 16, 0.5)
    assert [r.r for r in recs] == [0.5, 0.25, 0.125, 0.0625]
    for r in recs:
        assert r.osc == pytest.approx(r.r**2, rel=1e-14)
    fit = fit_decay(recs, 0.25)
    assert 1.9 <= fit.C2 <= 2.1
    assert fit.C2 == pytest.approx(2.0, abs=1e-12)


def test_lamb_oseen_oscillation_matches_dense_closed_form():
    g = unit_grid(64, 128)
    times = np.linspace(-0.25, 0.0, 257)   # contains every window start -r^2
    s = sampled(lamb_oseen(), g, times)
    for r in (0.5, 0.25, 0.125):
        rec = measure_osc(s, ParabolicCylinder(r, 0.0, 0.0))
        rho = np.linspace(0, r, 4001)[:, None]
        tt = np.linspace(-r * r, 0, 401)[None, :]
        dense = -np.expm1(-rho**2 / (4 * (tt + 1)))
        assert rec.osc == pytest.approx(dense.max() - dense.min(), rel=1e-12)
        assert rec.osc == pytest.approx(r * r / 4, rel=0.3)
    small = measure_osc(s, ParabolicCylinder(0.125, 0.0, 0.0)).osc
    assert small == pytest.approx(0.125**2 / 4, rel=0.02)


def test_exact_power_data_fits_exactly():
    R = 0.25
    recs = [OscRecord(0, 0, r, (r / (2 * R)) ** 2, 0.0) for r in 2 * R * 0.5 ** np.arange(6)]
    fit = fit_decay(recs, R)
    assert fit.C2 == pytest.approx(2.0, abs=1e-12)
    assert fit.C1 == pytest.approx(1.0, abs=1e-12)
    assert fit.residual == pytest.approx(0.0, abs=1e-12)
    assert fit.violations == ()
    assert all(envelope_holds(recs, R, fit.C2 - 0.1))
    assert json.loads(fit.to_json())["C2"] == pytest.approx(2.0)


def test_fit_needs_reference_and_enough_records():
    recs = [OscRecord(0, 0, r, r, 0.0) for r in (0.5, 0.25, 0.125)]
    with pytest.raises(DomainError):
        fit_decay(recs, 0.1)
    with pytest.raises(DomainError):
        fit_decay(recs, 0.25)


def test_scan_rejects_sub_grid_radii():
    g = unit_grid(16, 32)
    s = sampled(rigid_rotation(), g, np.linspace(0, 0.3, 4))
    with pytest.raises(DomainError):
        dyadic_scan(s, 0.0, 0.3, 0.1, 0.5)
    with pytest.raises(DomainError):
        measure_osc(s, ParabolicCylinder(0.5, 0.0, 0.1))   # window starts before the data


def test_records_csv_columns():
    text = records_to_csv([OscRecord(0.0, 1.0, 0.5, 2.0, 1.0)])
    assert text.splitlines()[0] == "center_z,center_t,r,M_r,m_r,osc"
    assert text.splitlines()[1].split(",")[-1] == "1.0"


@given(st.integers(0, 2**32 - 1))
def test_oscillation_is_nested(seed):
    g = unit_grid(16, 32)
    rng = np.random.default_rng(seed)
    s = SnapshotSeries(g, np.linspace(0, 1, 6), {"swirl": rng.normal(size=(6,) + g.shape)})
    recs = dyadic_scan(s, 0.0, 1.0, 0.25, 0.75 * rng.uniform(0.5, 1.0) + 0.1)
    osc = [r.osc for r in recs]
    assert all(a >= b for a, b in zip(osc, osc[1:]))


# -- maximum principle -------------------------------------------------------


def test_max_principle_on_exact_scenarios(lo_series, rr_series):
    rep = max_principle_monitor(lo_series)
    assert rep.ok and rep.first_violation is None
    assert np.all(np.diff(rep.sup_abs) <= 1e-15)   # bounded grid: boundary value decays
    rep = max_principle_monitor(rr_series)
    assert rep.ok and np.all(rep.sup_abs == rep.sigma0) and rep.sigma0 == pytest.approx(1.0)
    s = sampled(zero(), unit_grid(8, 8), [0.0, 1.0])
    assert np.all(max_principle_monitor(s).sup_abs == 0)


def test_max_principle_on_unbounded_lamb_oseen_plateau():
    g = CylGrid(12.0, -1.0, 1.0, 96, 8)
    s = sampled(lamb_oseen(), g, np.linspace(0, 1.0, 11))
    rep = max_principle_monitor(s)
    assert rep.ok and np.all(rep.sup_abs <= 1.0)


def test_max_principle_flags_growth():
    g = unit_grid(8, 8)
    base = np.zeros(g.shape)
    base[3, 3] = 1.0
    s = SnapshotSeries(g, [0.0, 1.0, 2.0], {"swirl": np.stack([base, base, 1.01 * base])})
    rep = max_principle_monitor(s, tol_rel=1e-3)
    assert rep.violations == (2,) and rep.first_violation == 2.0
    assert default_tol_rel(0.1) == pytest.approx(10 * 3.7 * 0.01)


# -- iterated contraction ----------------------------------------------------


def test_unit_contractions_halve():
    for k in range(6):
        it = iterate_osc_bound([1.0] * (k + 1), 0.1, k)
        assert it.eta == pytest.approx(2.0 ** -(k + 1), rel=1e-15)


def test_k_zero():
    assert iterate_osc_bound([0.3], 0.1, 0).eta == pytest.approx(0.85, rel=1e-15)


def test_log_contraction_against_mpmath():
    mpmath.mp.dps = 50
    R, k = mpmath.mpf(1) / 6, 3
    exact = mpmath.mpf(1)
    for i in range(k + 1):
        r = R / 2 ** (2 * i + 1)
        exact *= 1 - 1 / (2 * mpmath.log(1 / r))
    it = iterate_osc_bound(lambda r: 1 / math.log(1 / r), 1 / 6, 3, c=1.0)
    assert it.eta == pytest.approx(float(exact), rel=1e-13)
    assert it.log_eta <= it.log_bound_integral


def test_geometric_form_is_not_implied():
    it = iterate_osc_bound(lambda r: 1 / math.log(1 / r), 1 / 6, 50, c=1.0)
    assert it.log_eta <= it.log_bound_integral
    assert it.log_eta > it.log_bound_geometric


def test_contraction_contracts():
    with pytest.raises(ContractError):
        iterate_osc_bound([0.0, 0.5], 0.1, 1)
    with pytest.raises(ContractError):
        iterate_osc_bound([1.5], 0.1, 0)
    with pytest.raises(ContractError):
        iterate_osc_bound([0.5], 0.1, 2)
    with pytest.raises(DomainError):
        iterate_osc_bound([0.5], 1.5, 0)


@given(st.floats(1e-6, 1 / 6), st.floats(0.01, 1.7), st.integers(0, 40))
def test_eta_decreases_and_respects_integral_bound(R, c, k):
    beta = lambda r: c / math.log(1 / r)  # noqa: E731
    a = iterate_osc_bound(beta, R, k, c=c)
    b = iterate_osc_bound(beta, R, k + 1, c=c)
    assert b.log_eta < a.log_eta
    assert a.log_eta <= a.log_bound_integral + 1e-12
