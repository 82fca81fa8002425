"""Oscillation of the Lamb-Oseen swirl on shrinking cylinders around the axis."""

from __future__ import annotations

import math

from swirlab.dynamics import SolverConfig, run_scenario
from swirlab.geometry import CylGrid
from swirlab.oscillation import dyadic_scan, envelope_holds, fit_decay, iterate_osc_bound
from swirlab.scenarios import lamb_oseen


def main():
    g = CylGrid(0.5, -5 / 16, 5 / 16, 64, 80)
    per = 72  # steps per 1/1024 so that every window start -r^2 is a snapshot
    cfg = SolverConfig(1 / (1024 * per), 0.125)
    s = run_scenario(lamb_oseen(), g, cfg, snapshot_stride=per, flow=False).series
    R = 1 / 8
    recs = dyadic_scan(s, 0.0, float(s.times[-1]), 4 * g.h, 2 * R)
    for r in recs:
        print(f"r={r.r:.5f}  M_r={r.sup:.6e}  m_r={r.inf:.3e}  osc={r.osc:.6e}")
    fit = fit_decay(recs, R)
    print(f"C2 = {fit.C2:.4f} +- {fit.C2_ci95:.3f}   C1 = {fit.C1:.4f}   "
          f"envelope with C2 - 0.1: {all(envelope_holds(recs, R, fit.C2 - 0.1))}")

    # the log-slowed contraction beta(r) = c / ln(1/r) only gives a power of ln
    for k in (3, 30, 300):
        it = iterate_osc_bound(lambda r: 1 / math.log(1 / r), 1 / 6, k, c=1.0)
        print(f"k={k:4d}  ln eta_k = {it.log_eta:9.4f}  integral bound {it.log_bound_integral:9.4f}"
              f"  geometric form {it.log_bound_geometric:9.4f}")


if __name__ == "__main__":
    main()
