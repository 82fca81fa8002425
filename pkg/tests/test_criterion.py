from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swirlab.criterion import (Bump, GaugeParams, energy_inequality_residual, eval_f, eval_g,
                               eval_M, eval_sigma0, scan_condition)
from swirlab.errors import ContractError, DomainError
from swirlab.geometry import CylGrid
from swirlab.oscillation import CONVERGENCE_CONSTANT
from swirlab.scenarios import lamb_oseen, rigid_rotation, zero

from conftest import constant_speed, exact_lamb_oseen, sampled, unit_grid

G = GaugeParams()


def test_zero_field_gives_zero_norms_and_passes():
    g = unit_grid(16, 32)
    s = sampled(zero(), g, np.linspace(0, 0.5, 6))
    assert eval_f(s, 0.0, 0.5, 0.5) == 0 and eval_M(s, 0.0, 0.5, 0.5) == 0
    rep = scan_condition(s, [(0.0, 0.5)], [0.5, 0.25, 0.125], G)
    assert rep.passed
    assert [r.margin for r in rep.records] == [r.g for r in rep.records]
    assert all(r.g >= 1 for r in rep.records)
    assert eval_sigma0(s) == 0


def test_constant_speed_closed_forms():
    g = unit_grid(64, 128)
    s = constant_speed(g, np.linspace(-0.5, 0.0, 11))
    assert eval_f(s, 0.0, 0.0, 0.5) == pytest.approx(math.pi / 8, rel=1e-12)
    assert eval_M(s, 0.0, 0.0, 0.5) == pytest.approx((2 * math.pi) ** 0.3 * 0.5, rel=1e-12)
    assert round(eval_M(s, 0.0, 0.0, 0.5), 3) == 0.868


@pytest.mark.parametrize("mu", [2.0, 10.0, 0.3])
def test_homogeneity(lo_series, mu):
    f0, M0 = eval_f(lo_series, 0.0, 0.3, 0.4), eval_M(lo_series, 0.0, 0.3, 0.4)
    s = lo_series.scaled(mu)
    assert eval_f(s, 0.0, 0.3, 0.4) / f0 == pytest.approx(mu**3, rel=1e-12)
    assert eval_M(s, 0.0, 0.3, 0.4) / M0 == pytest.approx(mu, rel=1e-12)


def test_gauge_boundary_and_clamp():
    assert eval_g(math.exp(-math.e**2), G) == 1.0
    assert eval_g(2 / 3, G) == 1.0
    assert eval_g(1e-3, G) == 1.0
    assert eval_g(1e-100, G) > 1.0
    with pytest.raises(DomainError):
        eval_g(0.7, G)
    with pytest.raises(DomainError):
        eval_g(0.0, G)


def test_gauge_params_validated():
    with pytest.raises(DomainError):
        GaugeParams(alpha=0.01)
    with pytest.raises(DomainError):
        GaugeParams(c_star=0.0)


def test_gauge_value_against_direct_formula():
    R = 1e-200
    inner = math.log(math.sqrt(math.log(1 / R)))
    assert eval_g(R, GaugeParams(2.0)) == pytest.approx(2.0 * inner ** (1 / 224), rel=1e-15)


@given(st.floats(-300, math.log(2 / 3)), st.floats(-300, math.log(2 / 3)),
       st.floats(0.1, 10), st.floats(1e-4, 1 / 224))
def test_gauge_nonincreasing(la, lb, c_star, alpha):
    a, b = sorted((math.exp(la), math.exp(lb)))
    p = GaugeParams(c_star, alpha)
    if a > 0:
        assert eval_g(a, p) >= eval_g(b, p)


def test_lamb_oseen_passes_at_all_scales(lo_series):
    rep = scan_condition(lo_series, [(0.0, 0.3), (0.2, 0.3)], [0.5, 0.25, 0.125, 0.0625], G)
    assert rep.passed and rep.worst_margin > 0
    doc = json.loads(rep.to_json())
    assert doc["passed"] and len(doc["records"]) == 8
    assert rep.to_csv().count("\n") == 9


def test_scaled_field_first_fails_at_largest_radius(lo_series):
    radii = [0.5, 0.25, 0.125, 0.0625]
    rep = scan_condition(lo_series.scaled(50.0), [(0.0, 0.3)], radii, G)
    assert not rep.passed
    assert rep.first_failure.R == 0.5
    # the largest radius carries the largest f + M
    sums = {r.R: r.f + r.M for r in rep.records}
    assert sums[0.5] == max(sums.values())


def test_scan_rejects_radius_outside_gauge_domain(lo_series):
    with pytest.raises(DomainError):
        scan_condition(lo_series, [(0.0, 0.3)], [0.7], G)


def test_sigma0_examples():
    big = CylGrid(12.0, -1.0, 1.0, 96, 8)
    s = sampled(lamb_oseen(), big, [0.0])
    assert eval_sigma0(s) == pytest.approx(1.0, abs=1e-12)
    s = sampled(rigid_rotation(), unit_grid(16, 16), [0.0])
    assert eval_sigma0(s) == pytest.approx(1.0, rel=1e-15)


def _bump(T):
    return Bump(0.8, 0.0, T / 2, T / 2)


def test_energy_residual_zero_field():
    s = sampled(zero(), unit_grid(16, 32), np.linspace(0, 0.2, 21))
    assert np.all(energy_inequality_residual(s, _bump(0.2)).residual == 0)


@pytest.mark.parametrize("scenario", [rigid_rotation(), lamb_oseen()])
def test_energy_residual_is_small_on_smooth_solutions(scenario):
    for n in (32, 64):
        g = unit_grid(n, 2 * n)
        s = sampled(scenario, g, np.linspace(0, 0.25, 101))
        res = energy_inequality_residual(s, _bump(0.25))
        assert res.worst >= -CONVERGENCE_CONSTANT * g.h**2


def test_energy_residual_contracts(lo_series):
    with pytest.raises(ContractError):
        energy_inequality_residual(lo_series.with_data().__class__(
            lo_series.grid, lo_series.times,
            {k: v for k, v in lo_series.data.items() if k != "pressure"}), _bump(0.3))
    with pytest.raises(DomainError):
        energy_inequality_residual(lo_series, Bump(0.8, 0.0, 0.1, 0.2))   # alive at t=0
    with pytest.raises(DomainError):
        energy_inequality_residual(lo_series, Bump(0.99, 0.0, 0.15, 0.15))  # leaves the grid


def test_bump_derivatives_match_finite_differences():
    b = Bump(0.7, 0.1, 0.5, 0.3)
    rho, z, t = np.array([[0.2]]), np.array([[0.3]]), 0.55
    phi, dt_phi, lap, dr, dz = b.parts(rho, z, t)
    e = 1e-6
    num_t = (b.parts(rho, z, t + e)[0] - b.parts(rho, z, t - e)[0]) / (2 * e)
    num_r = (b.parts(rho + e, z, t)[0] - b.parts(rho - e, z, t)[0]) / (2 * e)
    num_z = (b.parts(rho, z + e, t)[0] - b.parts(rho, z - e, t)[0]) / (2 * e)
    assert dt_phi == pytest.approx(num_t, rel=1e-6)
    assert dr == pytest.approx(num_r, rel=1e-6)
    assert dz == pytest.approx(num_z, rel=1e-6)
    e = 1e-4
    f = lambda r, zz: b.parts(np.array([[r]]), np.array([[zz]]), t)[0][0, 0]  # noqa: E731
    r0, z0 = 0.2, 0.3
    num_lap = ((f(r0 + e, z0) - 2 * f(r0, z0) + f(r0 - e, z0)) / e**2
               + (f(r0 + e, z0) - f(r0 - e, z0)) / (2 * e) / r0
               + (f(r0, z0 + e) - 2 * f(r0, z0) + f(r0, z0 - e)) / e**2)
    assert lap[0, 0] == pytest.approx(num_lap, rel=1e-5)
