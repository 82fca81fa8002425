"""Axisymmetric Navier-Stokes laboratory: swirl solver, scale-invariant criteria,
oscillation decay and the constants of the level-set growth lemmas."""

__version__ = "0.1.0"

from .errors import (ContractError, DomainError, PreconditionError, SolverError,
                     StepSizeError, SwirlabError)
from .geometry import (AnnularCylinder, CylGrid, Field, ParabolicCylinder, cyl_gradient,
                       cyl_laplacian, cyl_volume, divergence, integrate_lp)
from .snapshots import SnapshotSeries
from .scenarios import Scenario, make_scenario
from .dynamics import (FlowState, SolverConfig, run_scenario, step_nse, step_swirl,
                       swirl_consistency)
from .criterion import (Bump, CriterionReport, GaugeParams, energy_inequality_residual,
                        eval_f, eval_g, eval_M, eval_sigma0, scan_condition)
from .oscillation import (DecayFit, OscRecord, dyadic_scan, fit_decay, iterate_osc_bound,
                          max_principle_monitor, measure_osc)
