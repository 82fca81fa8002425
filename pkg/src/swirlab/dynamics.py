"""Explicit time stepping for axisymmetric Navier-Stokes flow and for the swirl equation.

Momentum, in cylindrical components with unit viscosity::

    d_t v_rho + (v.grad) v_rho - v_phi^2/rho = -d_rho q + (Lap - 1/rho^2) v_rho
    d_t v_phi + (v.grad) v_phi + v_rho v_phi/rho =        (Lap - 1/rho^2) v_phi
    d_t v_3   + (v.grad) v_3                  = -d_z q   +  Lap v_3

is advanced with the two-stage strong-stability-preserving Runge-Kutta
scheme.  Each stage is followed by an incremental pressure projection.

The projection is exact on cell faces: face normal velocities (averages of
the node values, or the wall value on a wall face) are corrected with the
compact face gradient of the pressure increment, so the discrete face
divergence vanishes to the Poisson tolerance.  Node velocities receive the
averaged face gradient (an approximate projection), so their centred
divergence is only small, not zero; both residuals are reported.

The swirl ``sigma = rho v_phi`` solves::

    d_t sigma + (v_rho + 2/rho) d_rho sigma + v_3 d_z sigma - Lap sigma = 0

with ``sigma = 0`` on the axis.  The singular drift is only evaluated at
``rho >= h_rho``; the first off-axis row reaches the axis value through its
centred stencil.  Under the step bound the update is a convex combination
of neighbour values, so the discrete scheme obeys the maximum principle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContractError, DomainError, SolverError, StepSizeError
from .geometry import (CylGrid, Field, d_rho, d_z, divergence_array, laplacian_array,
                       spatial_weights)
from .scenarios import Scenario
from .snapshots import SnapshotSeries

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    viscosity: float = 1.0
    cfl_safety: float = 0.9
    pressure_tol: float = 1e-10
    max_pressure_iters: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.t_end < 0:
            raise DomainError("t_end must be nonnegative")
        if self.viscosity != 1.0:
            raise DomainError("viscosity is normalised to 1")
        if not 0 < self.cfl_safety <= 1:
            raise DomainError("cfl_safety must lie in (0, 1]")
        if self.max_pressure_iters < 1:
            raise DomainError("max_pressure_iters must be >= 1")


def stable_dt(grid: CylGrid, v_rho=None, v_3=None, cfl_safety: float = 1.0,
              swirl_drift: bool = False) -> float:
    """``cfl_safety * min(h^2/4, h/max|v|)``; optionally counts the ``2/rho`` drift."""
    h = grid.h
    limit = h * h / 4
    speeds = []
    if v_rho is not None:
        ur = np.abs(v_rho[1:]) if not swirl_drift else np.abs(v_rho[1:] + 2.0 / grid.rho[1:, None])
        speeds.append(float(ur.max()) / grid.h_rho)
    elif swirl_drift:
        speeds.append(2.0 / grid.h_rho**2)
    if v_3 is not None:
        speeds.append(float(np.abs(v_3).max()) / grid.h_z)
    rate = max(speeds, default=0.0)
    if rate > 0:
        limit = min(limit, 1.0 / rate)
    return cfl_safety * limit


# ---------------------------------------------------------------------------
# state and boundary data


@dataclass
class FlowState:
    grid: CylGrid
    time: float
    v_rho: np.ndarray
    v_phi: np.ndarray
    v_3: np.ndarray
    q: np.ndarray

    def fields(self) -> dict[str, Field]:
        g, t = self.grid, self.time
        return {"v_rho": Field(g, "v_rho", self.v_rho, t),
                "v_phi": Field(g, "v_phi", self.v_phi, t),
                "v_3": Field(g, "v_3", self.v_3, t),
                "pressure": Field(g, "pressure", self.q, t)}

    def copy(self) -> "FlowState":
        return FlowState(self.grid, self.time, self.v_rho.copy(), self.v_phi.copy(),
                         self.v_3.copy(), self.q.copy())

    @classmethod
    def from_fields(cls, v_rho: Field, v_phi: Field, v_3: Field, q: Field) -> "FlowState":
        return cls(v_rho.grid, v_rho.time, v_rho.values.copy(), v_phi.values.copy(),
                   v_3.values.copy(), q.values.copy())


@dataclass(frozen=True)
class StepStats:
    div_face: float
    div_node: float
    pressure_iters: int
    max_speed: float


class Boundary:
    """Outer-boundary data: the scenario's exact solution when it has one, else no-slip."""

    def __init__(self, grid: CylGrid, scenario: Optional[Scenario] = None):
        self.grid = grid
        self.exact = scenario.exact if scenario is not None else None
        R, Z = grid.mesh()
        self._R, self._Z = R, Z
        mask = np.zeros(grid.shape, bool)
        mask[-1, :] = True
        mask[:, 0] = True
        mask[:, -1] = True
        self.mask = mask

    def values(self, t: float) -> dict[str, np.ndarray]:
        if self.exact is None:
            zero = np.zeros(int(self.mask.sum()))
            return {k: zero for k in ("v_rho", "v_phi", "v_3", "swirl")}
        out = self.exact(self._R[self.mask], self._Z[self.mask], t)
        return {k: np.asarray(out[k], float) for k in ("v_rho", "v_phi", "v_3", "pressure", "swirl")}

    def apply_velocity(self, v_rho, v_phi, v_3, t: float) -> None:
        b = self.values(t)
        v_rho[self.mask] = b["v_rho"]
        v_phi[self.mask] = b["v_phi"]
        v_3[self.mask] = b["v_3"]
        v_rho[0] = 0.0
        v_phi[0] = 0.0

    def apply_pressure(self, q, t: float) -> None:
        if self.exact is not None:
            q[self.mask] = self.values(t)["pressure"]
            return
        q[-1, :] = 2 * q[-2, :] - q[-3, :]
        q[:, 0] = 2 * q[:, 1] - q[:, 2]
        q[:, -1] = 2 * q[:, -2] - q[:, -3]

    def apply_swirl(self, sigma, t: float, v_phi=None) -> None:
        if self.exact is not None:
            sigma[self.mask] = self.values(t)["swirl"]
        elif v_phi is not None:
            sigma[self.mask] = (self._R * v_phi)[self.mask]
        else:
            sigma[self.mask] = 0.0
        sigma[0] = 0.0


# ---------------------------------------------------------------------------
# pressure projection


class Projector:
    """Face-exact pressure projection on the nodes off the outer boundary.

    Unknowns live on nodes ``i = 0..n_rho-1``, ``j = 1..n_z-1``.  Their
    control volumes tile ``[0, rho_max] x [z_min, z_max]``; the volumes of
    the last node row/column reach the wall so that wall faces carry the
    prescribed normal velocity.  The Poisson matrix is the (volume-scaled)
    compact cylindrical Laplacian.  It is singular (constants), so the
    right-hand side is made compatible and one node is pinned.  The sparse
    LU factorisation is reused across steps, and each solve is refined
    iteratively until the face divergence meets ``tol``.
    """

    def __init__(self, grid: CylGrid):
        self.grid = grid
        nr, nz = grid.n_rho, grid.n_z
        hr, hz = grid.h_rho, grid.h_z
        self.ni, self.nj = nr, nz - 1
        edges_r = np.concatenate([[0.0], (np.arange(nr - 1) + 0.5) * hr, [grid.rho_max]])
        self.rho_lo, self.rho_hi = edges_r[:-1], edges_r[1:]
        z = grid.z
        edges_z = np.concatenate([[z[0]], 0.5 * (z[1:-2] + z[2:-1]), [z[-1]]])
        self.dz_cv = np.diff(edges_z)                     # (nj,)
        self.area_z = 0.5 * (self.rho_hi**2 - self.rho_lo**2)   # (ni,)
        self.vol = np.outer(self.area_z, self.dz_cv)       # (ni, nj)
        # radial faces between unknown rows i and i+1 sit at rho_hi[i]
        self.cr = (self.rho_hi[:-1] / hr)[:, None] * self.dz_cv[None, :]  # (ni-1, nj)
        self.cz = np.repeat((self.area_z / hz)[:, None], self.nj - 1, axis=1)  # (ni, nj-1)
        self.A = self._assemble()
        self.pin = (self.ni - 1) * self.nj  # outer row, lowest z unknown
        Ap = self.A.tolil()
        Ap.rows[self.pin] = [self.pin]
        Ap.data[self.pin] = [1.0]
        self.lu = spla.splu(Ap.tocsc())

    def _idx(self, i, j):
        return i * self.nj + j

    def _assemble(self):
        ni, nj = self.ni, self.nj
        rows, cols, vals = [], [], []
        I, J = np.meshgrid(np.arange(ni - 1), np.arange(nj), indexing="ij")
        a, b, c = self._idx(I, J).ravel(), self._idx(I + 1, J).ravel(), self.cr.ravel()
        rows += [a, b, a, b]; cols += [b, a, a, b]; vals += [c, c, -c, -c]
        I, J = np.meshgrid(np.arange(ni), np.arange(nj - 1), indexing="ij")
        a, b, c = self._idx(I, J).ravel(), self._idx(I, J + 1).ravel(), self.cz.ravel()
        rows += [a, b, a, b]; cols += [b, a, a, b]; vals += [c, c, -c, -c]
        n = ni * nj
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(n, n))

    def net_outflow(self, v_rho, v_3) -> np.ndarray:
        """Volume flux out of every control volume (per radian), shape ``(ni, nj)``."""
        ni, nj = self.ni, self.nj
        vr = v_rho[:, 1:-1]
        face_r = 0.5 * (vr[:-1] + vr[1:])[: ni - 1]          # faces between rows 0..ni-1
        flux_r = np.zeros((ni + 1, nj))
        flux_r[1:ni] = self.rho_hi[:-1, None] * self.dz_cv[None, :] * face_r
        flux_r[ni] = self.grid.rho_max * self.dz_cv * v_rho[-1, 1:-1]
        w = v_3[:ni]
        face_z = 0.5 * (w[:, 1:-2] + w[:, 2:-1])               # between unknown cols
        flux_z = np.zeros((ni, nj + 1))
        flux_z[:, 1:nj] = self.area_z[:, None] * face_z
        flux_z[:, 0] = self.area_z * w[:, 0]
        flux_z[:, nj] = self.area_z * w[:, -1]
        return (flux_r[1:] - flux_r[:-1]) + (flux_z[:, 1:] - flux_z[:, :-1])

    def face_divergence(self, v_rho, v_3, phi=None, scale=0.0) -> np.ndarray:
        out = self.net_outflow(v_rho, v_3)
        if phi is not None:
            out = out - scale * (self.A @ phi.ravel()).reshape(out.shape)
        return out / self.vol

    def project(self, v_rho, v_3, scale: float, tol: float, max_iters: int):
        """Correct ``v_rho``, ``v_3`` in place; return ``(phi, face residual, iterations)``."""
        ni, nj = self.ni, self.nj
        b = self.net_outflow(v_rho, v_3).ravel() / scale
        b -= self.vol.ravel() * (b.sum() / self.vol.sum())
        b_pin = b.copy()
        b_pin[self.pin] = 0.0
        phi = np.zeros_like(b)
        res = math.inf
        for it in range(1, max_iters + 1):
            r = b_pin - self._apply_pinned(phi)
            phi += self.lu.solve(r)
            res = float(np.abs(self.face_divergence(v_rho, v_3, phi, scale)).max())
            if res <= tol:
                break
        else:
            raise SolverError(f"pressure solve stalled at face divergence {res:.3e}", res)
        phi2 = phi.reshape(ni, nj)
        g_r, g_z = self._node_gradient(phi2)
        v_rho[1:ni, 1:-1] -= scale * g_r[1:]
        v_3[:ni, 1:-1] -= scale * g_z
        return phi2, res, it

    def _apply_pinned(self, phi):
        out = self.A @ phi
        out[self.pin] = phi[self.pin]
        return out

    def _node_gradient(self, phi):
        hr, hz = self.grid.h_rho, self.grid.h_z
        fr = np.diff(phi, axis=0) / hr
        g_r = np.zeros_like(phi)
        g_r[1:-1] = 0.5 * (fr[:-1] + fr[1:])
        g_r[-1] = fr[-1]
        fz = np.diff(phi, axis=1) / hz
        g_z = np.zeros_like(phi)
        g_z[:, 1:-1] = 0.5 * (fz[:, :-1] + fz[:, 1:])
        g_z[:, 0] = fz[:, 0]
        g_z[:, -1] = fz[:, -1]
        return g_r, g_z


_PROJECTORS: dict[CylGrid, Projector] = {}


def projector_for(grid: CylGrid) -> Projector:
    key = replace(grid, dt=0.0, t_start=0.0, t_end=0.0)
    if key not in _PROJECTORS:
        _PROJECTORS[key] = Projector(key)
    return _PROJECTORS[key]


# ---------------------------------------------------------------------------
# right-hand sides


def momentum_rhs(grid: CylGrid, v_rho, v_phi, v_3, q):
    hr, hz = grid.h_rho, grid.h_z
    rho = grid.rho[1:, None]
    dr_vr, dz_vr = d_rho(v_rho, hr, odd=True), d_z(v_rho, hz)
    dr_vp, dz_vp = d_rho(v_phi, hr, odd=True), d_z(v_phi, hz)
    dr_w, dz_w = d_rho(v_3, hr), d_z(v_3, hz)
    lap_vr, lap_vp, lap_w = (laplacian_array(f, grid) for f in (v_rho, v_phi, v_3))
    f_r = np.zeros(grid.shape)
    f_p = np.zeros(grid.shape)
    f_r[1:] = (-(v_rho * dr_vr + v_3 * dz_vr)[1:] + v_phi[1:] ** 2 / rho
               + lap_vr[1:] - v_rho[1:] / rho**2 - d_rho(q, hr)[1:])
    f_p[1:] = (-(v_rho * dr_vp + v_3 * dz_vp)[1:] - v_rho[1:] * v_phi[1:] / rho
               + lap_vp[1:] - v_phi[1:] / rho**2)
    f_w = -(v_rho * dr_w + v_3 * dz_w) + lap_w - d_z(q, hz)
    return f_r, f_p, f_w


def swirl_rhs(grid: CylGrid, sigma, v_rho, v_3):
    """``-(v_rho + 2/rho) d_rho sigma - v_3 d_z sigma + Lap sigma``; zero on the axis row."""
    out = np.zeros(grid.shape)
    rho = grid.rho[1:, None]
    drift = v_rho[1:] + 2.0 / rho
    out[1:] = (laplacian_array(sigma, grid)[1:] - drift * d_rho(sigma, grid.h_rho)[1:]
               - v_3[1:] * d_z(sigma, grid.h_z)[1:])
    return out


def swirl_residual(sigma: Field, v_rho: Field, v_3: Field, dsigma_dt=None) -> np.ndarray:
    """Pointwise residual of the swirl equation on interior off-axis nodes (NaN elsewhere)."""
    g = sigma.grid
    res = -swirl_rhs(g, sigma.values, v_rho.values, v_3.values)
    if dsigma_dt is not None:
        res = res + dsigma_dt
    out = np.full(g.shape, np.nan)
    out[1:-1, 1:-1] = res[1:-1, 1:-1]
    return out


# ---------------------------------------------------------------------------
# steppers


def _check_dt(dt, limit, what):
    if dt > limit * (1 + 1e-12):
        raise StepSizeError(f"{what}: dt={dt:.4e} exceeds stability limit {limit:.4e}", dt, limit)


def step_nse(state: FlowState, cfg: SolverConfig, boundary: Optional[Boundary] = None,
             dt: Optional[float] = None) -> tuple[FlowState, StepStats]:
    """Advance velocity and pressure by one SSP-RK2 step with per-stage projection."""
    g = state.grid
    dt = cfg.dt if dt is None else dt
    boundary = boundary or Boundary(g)
    _check_dt(dt, stable_dt(g, state.v_rho, state.v_3, cfg.cfl_safety), "step_nse")
    proj = projector_for(g)
    t1 = state.time + dt

    def stage(vr, vp, w, q):
        fr, fp, fw = momentum_rhs(g, vr, vp, w, q)
        return vr + dt * fr, vp + dt * fp, w + dt * fw

    vr1, vp1, w1 = stage(state.v_rho, state.v_phi, state.v_3, state.q)
    boundary.apply_velocity(vr1, vp1, w1, t1)
    phi1, _, it1 = proj.project(vr1, w1, dt, cfg.pressure_tol, cfg.max_pressure_iters)
    vr2, vp2, w2 = stage(vr1, vp1, w1, state.q)
    vr = 0.5 * (state.v_rho + vr2)
    vp = 0.5 * (state.v_phi + vp2)
    w = 0.5 * (state.v_3 + w2)
    boundary.apply_velocity(vr, vp, w, t1)
    phi2, res, it2 = proj.project(vr, w, 0.5 * dt, cfg.pressure_tol, cfg.max_pressure_iters)
    q = state.q.copy()
    q[: proj.ni, 1:-1] += 0.5 * (phi1 + phi2)
    boundary.apply_pressure(q, t1)
    div_node = divergence_array(vr, w, g)[:-1, 1:-1]
    stats = StepStats(res, float(np.abs(div_node).max()), it1 + it2,
                      float(np.sqrt(vr**2 + vp**2 + w**2).max()))
    return FlowState(g, t1, vr, vp, w, q), stats


def step_swirl(sigma: Field, v_rho: Field, v_3: Field, cfg: SolverConfig,
               boundary: Optional[Boundary] = None, v_next: Optional[tuple] = None,
               dt: Optional[float] = None) -> Field:
    """Advance the swirl by one SSP-RK2 step.

    ``v_next`` optionally gives ``(v_rho, v_3)`` arrays at the end of the
    step for the second stage; by default the velocity is frozen.
    """
    if sigma.kind != "swirl":
        raise ContractError("step_swirl expects a swirl field")
    g = sigma.grid
    dt = cfg.dt if dt is None else dt
    vr, w = v_rho.values, v_3.values
    vr_n, w_n = (vr, w) if v_next is None else v_next
    limit = min(stable_dt(g, vr, w, cfg.cfl_safety, swirl_drift=True),
                stable_dt(g, vr_n, w_n, cfg.cfl_safety, swirl_drift=True))
    _check_dt(dt, limit, "step_swirl")
    boundary = boundary or Boundary(g)
    t1 = sigma.time + dt
    s0 = sigma.values
    s1 = s0 + dt * swirl_rhs(g, s0, vr, w)
    s1[0] = 0.0
    boundary.apply_swirl(s1, t1)
    s2 = 0.5 * (s0 + s1 + dt * swirl_rhs(g, s1, vr_n, w_n))
    s2[0] = 0.0
    boundary.apply_swirl(s2, t1)
    return Field(g, "swirl", s2, t1)


def swirl_from_vphi(v_phi: Field) -> Field:
    """``sigma = rho * v_phi`` nodewise."""
    if v_phi.kind != "v_phi":
        raise ContractError("expected a v_phi field")
    return Field(v_phi.grid, "swirl", v_phi.grid.rho[:, None] * v_phi.values, v_phi.time)


def vphi_from_swirl(sigma: Field) -> Field:
    """Inverse of :func:`swirl_from_vphi`; ``v_phi = 0`` on the axis."""
    if sigma.kind != "swirl":
        raise ContractError("expected a swirl field")
    out = np.zeros(sigma.grid.shape)
    out[1:] = sigma.values[1:] / sigma.grid.rho[1:, None]
    return Field(sigma.grid, "v_phi", out, sigma.time)


def swirl_consistency(v_phi: Field) -> tuple[Field, Field]:
    """Return ``(sigma, v_phi recovered from sigma)``."""
    sigma = swirl_from_vphi(v_phi)
    return sigma, vphi_from_swirl(sigma)


def kinetic_energy(grid: CylGrid, v_rho, v_phi, v_3) -> float:
    """``1/2 int |v|^2 dx`` over the whole grid domain."""
    w = spatial_weights(grid, grid.rho_max, 0.5 * (grid.z_min + grid.z_max),
                        half_height=0.5 * (grid.z_max - grid.z_min))
    return 0.5 * float(np.sum(w * (v_rho**2 + v_phi**2 + v_3**2)))


# ---------------------------------------------------------------------------
# driver


@dataclass
class RunResult:
    series: SnapshotSeries
    records: list[dict] = field(default_factory=list)
    out_dir: Optional[Path] = None

    def column(self, key: str) -> np.ndarray:
        return np.array([r[key] for r in self.records])


def run_scenario(scenario: Scenario, grid: CylGrid, cfg: SolverConfig, snapshot_stride: int = 1,
                 out_dir=None, evolve_swirl: bool = True, flow: bool = True) -> RunResult:
    """Integrate ``scenario`` to ``cfg.t_end`` and collect snapshots every ``snapshot_stride`` steps.

    The step count is ``ceil(t_end / dt)`` with the step shortened so the run
    ends exactly at ``t_end``.  ``flow=False`` freezes the velocity at its
    initial value and only evolves the swirl (valid for steady or pure-swirl
    exact scenarios).  Step errors are re-raised with their step index set.
    """
    if snapshot_stride < 1:
        raise DomainError("snapshot_stride must be >= 1")
    n_steps = max(0, math.ceil(cfg.t_end / cfg.dt - 1e-9))
    dt = cfg.t_end / n_steps if n_steps else cfg.dt
    init = scenario.initial_fields(grid)
    state = FlowState(grid, 0.0, init["v_rho"], init["v_phi"], init["v_3"], init["pressure"])
    boundary = Boundary(grid, scenario)
    sigma = Field(grid, "swirl", init["swirl"], 0.0)
    kinds = ["v_rho", "v_phi", "v_3", "pressure"] + (["swirl"] if evolve_swirl else [])
    frames = {k: [] for k in kinds}
    times = []

    def snap(st, sg):
        times.append(st.time)
        frames["v_rho"].append(st.v_rho.copy())
        frames["v_phi"].append(st.v_phi.copy())
        frames["v_3"].append(st.v_3.copy())
        frames["pressure"].append(st.q.copy())
        if evolve_swirl:
            frames["swirl"].append(sg.values.copy())

    def record(step, st, sg, stats):
        rec = {"step": step, "time": st.time,
               "kinetic_energy": kinetic_energy(grid, st.v_rho, st.v_phi, st.v_3),
               "div_face": stats.div_face if stats else 0.0,
               "div_node": stats.div_node if stats else 0.0,
               "pressure_iters": stats.pressure_iters if stats else 0,
               "max_speed": float(np.sqrt(st.v_rho**2 + st.v_phi**2 + st.v_3**2).max())}
        if evolve_swirl:
            rec["sup_abs_swirl"] = float(np.abs(sg.values).max())
        return rec

    records = [record(0, state, sigma, None)]
    snap(state, sigma)
    v_rho_f = Field(grid, "v_rho", state.v_rho)
    v_3_f = Field(grid, "v_3", state.v_3)
    for step in range(1, n_steps + 1):
        try:
            if flow:
                new_state, stats = step_nse(state, cfg, boundary, dt=dt)
            else:
                new_state = state.copy()
                new_state.time = state.time + dt
                if scenario.exact is not None:
                    ex = scenario.exact_fields(grid, new_state.time)
                    new_state.v_rho, new_state.v_phi = ex["v_rho"], ex["v_phi"]
                    new_state.v_3, new_state.q = ex["v_3"], ex["pressure"]
                stats = StepStats(0.0, 0.0, 0, float(np.sqrt(state.v_rho**2 + state.v_phi**2
                                                             + state.v_3**2).max()))
            if evolve_swirl:
                sigma = step_swirl(sigma, v_rho_f, v_3_f, cfg, boundary,
                                   v_next=(new_state.v_rho, new_state.v_3), dt=dt)
        except (SolverError, StepSizeError) as err:
            err.step = step
            raise
        state = new_state
        v_rho_f = Field(grid, "v_rho", state.v_rho)
        v_3_f = Field(grid, "v_3", state.v_3)
        records.append(record(step, state, sigma, stats))
        if step % snapshot_stride == 0 or step == n_steps:
            if times[-1] != state.time:
                snap(state, sigma)
    meta = {"scenario": scenario.name, "params": dict(scenario.params), "n_steps": n_steps,
            "dt": dt, "stride": snapshot_stride, "flow": flow}
    series = SnapshotSeries(grid, np.array(times), {k: np.stack(v) for k, v in frames.items()},
                            meta)
    out = None
    if out_dir is not None:
        out = series.save(out_dir, {"records": records})
    log.info("ran %s: %d steps, %d snapshots", scenario.name, n_steps, len(series))
    return RunResult(series, records, out)
