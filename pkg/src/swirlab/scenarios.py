"""Initial data and exact solutions for the axisymmetric flow solver.

Each scenario supplies velocity, pressure and swirl at ``t = 0`` and, when
one exists, a closed-form evaluator used both as oracle and as Dirichlet
data on the outer boundary.  Viscosity is 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import exp1

from .geometry import CylGrid

KINDS = ("v_rho", "v_phi", "v_3", "pressure", "swirl")
Evaluator = Callable[[np.ndarray, np.ndarray, float], dict]


@dataclass(frozen=True)
class Scenario:
    """Named initial-value problem, optionally with an exact evaluator.

    ``initial(rho, z)`` and ``exact(rho, z, t)`` return dicts keyed by
    ``v_rho, v_phi, v_3, pressure, swirl``.
    """

    name: str
    initial: Callable[[np.ndarray, np.ndarray], dict]
    exact: Optional[Evaluator] = None
    params: dict = field(default_factory=dict)
    bounded_swirl: bool = True

    def initial_fields(self, grid: CylGrid) -> dict[str, np.ndarray]:
        R, Z = grid.mesh()
        out = self.initial(R, Z)
        return {k: np.broadcast_to(np.asarray(out[k], float), grid.shape).copy() for k in KINDS}

    def exact_fields(self, grid: CylGrid, t: float) -> dict[str, np.ndarray]:
        if self.exact is None:
            raise ValueError(f"scenario {self.name!r} has no exact solution")
        R, Z = grid.mesh()
        out = self.exact(R, Z, t)
        return {k: np.broadcast_to(np.asarray(out[k], float), grid.shape).copy() for k in KINDS}


def _zeros(rho, z, t=0.0):
    zero = np.zeros(np.broadcast(rho, z).shape)
    return {k: zero for k in KINDS}


def zero() -> Scenario:
    return Scenario("zero", lambda r, z: _zeros(r, z), _zeros)


def rigid_rotation(omega: float = 1.0) -> Scenario:
    """Solid-body rotation ``v_phi = omega*rho`` with ``q = omega^2 rho^2 / 2`` (steady)."""

    def exact(rho, z, t=0.0):
        zero = np.zeros(np.broadcast(rho, z).shape)
        rho = rho + zero
        return {"v_rho": zero, "v_phi": omega * rho, "v_3": zero,
                "pressure": 0.5 * omega**2 * rho**2, "swirl": omega * rho**2}

    return Scenario("rigid_rotation", lambda r, z: exact(r, z, 0.0), exact,
                    {"omega": omega})


def lamb_oseen_swirl(rho, t, gamma=2 * math.pi, t_shift=1.0):
    """``sigma = Gamma/(2 pi) * (1 - exp(-rho^2 / (4 (t + t_shift))))``."""
    return gamma / (2 * math.pi) * -np.expm1(-np.asarray(rho, float) ** 2 / (4 * (t + t_shift)))


def lamb_oseen_pressure(rho, t, gamma=2 * math.pi, t_shift=1.0):
    """Pressure with ``dq/drho = v_phi^2 / rho`` and ``q -> 0`` as ``rho -> inf``.

    With ``a = 4 (t + t_shift)`` and ``u = rho^2 / a``,
    ``q = -(A^2 / 2a) [(1 - e^-u)^2 / u + 2 (E1(u) - E1(2u))]``, ``A = Gamma / 2 pi``.
    """
    A = gamma / (2 * math.pi)
    a = 4 * (t + t_shift)
    u = np.asarray(rho, float) ** 2 / a
    small = u < 1e-8
    us = np.where(small, 1.0, u)
    bracket = np.where(small, u + 2 * (math.log(2.0) - u),
                       np.expm1(-us) ** 2 / us + 2 * (exp1(us) - exp1(2 * us)))
    return -(A * A / (2 * a)) * bracket


def lamb_oseen(gamma: float = 2 * math.pi, t_shift: float = 1.0) -> Scenario:
    """Diffusing line vortex; time is shifted by ``t_shift`` to keep the data smooth."""

    def exact(rho, z, t=0.0):
        zero = np.zeros(np.broadcast(rho, z).shape)
        rho = rho + zero
        sigma = lamb_oseen_swirl(rho, t, gamma, t_shift)
        a = 4 * (t + t_shift)
        # sigma / rho, written to stay regular on the axis
        s = rho**2 / a
        ratio = np.where(s > 1e-12, -np.expm1(-s) / np.where(s > 1e-12, s, 1.0), 1.0 - s / 2)
        v_phi = gamma / (2 * math.pi) * rho / a * ratio
        return {"v_rho": zero, "v_phi": v_phi, "v_3": zero,
                "pressure": lamb_oseen_pressure(rho, t, gamma, t_shift), "swirl": sigma}

    return Scenario("lamb_oseen", lambda r, z: exact(r, z, 0.0), exact,
                    {"gamma": gamma, "t_shift": t_shift})


def confined_swirl(amplitude: float = 1.0, rho_max: float = 1.0, half_height: float = 1.0,
                   z0: float = 0.0) -> Scenario:
    """A swirl bump at rest in a closed no-slip can; drives a meridional circulation.

    No exact solution: the solver applies no-slip walls.
    """

    def initial(rho, z):
        zero = np.zeros(np.broadcast(rho, z).shape)
        rho = rho + zero
        bump = (1 - (rho / rho_max) ** 2) ** 2 * (1 - ((z - z0) / half_height) ** 2) ** 2
        bump = np.clip(bump, 0.0, None)
        v_phi = amplitude * rho * bump
        return {"v_rho": zero, "v_phi": v_phi, "v_3": zero, "pressure": zero,
                "swirl": rho * v_phi}

    return Scenario("confined_swirl", initial, None,
                    {"amplitude": amplitude, "rho_max": rho_max,
                     "half_height": half_height, "z0": z0})


SCENARIOS = {
    "zero": zero,
    "rigid_rotation": rigid_rotation,
    "lamb_oseen": lamb_oseen,
    "confined_swirl": confined_swirl,
}


def make_scenario(name: str, **params) -> Scenario:
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return factory(**params)
