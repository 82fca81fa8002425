"""Lemma ledger on a solved Lamb-Oseen swirl, with pi built from the swirl oscillation."""

from __future__ import annotations

from swirlab.dynamics import SolverConfig, run_scenario, stable_dt
from swirlab.geometry import CylGrid
from swirlab.moser import level_sets, pi_from_swirl, verify_growth_lemmas
from swirlab.scenarios import lamb_oseen


def main():
    g = CylGrid(1.0, -0.5, 0.5, 64, 64)
    cfg = SolverConfig(stable_dt(g, cfl_safety=0.9, swirl_drift=True), 0.08)
    s = run_scenario(lamb_oseen(), g, cfg, snapshot_stride=2).series
    R = 1 / 8
    pi, k_R, side = pi_from_swirl(s, R)
    print(f"k_R = {k_R:.6e} ({side} side)")
    ls = level_sets(pi, R, 0.5, k_R)
    print(f"|e(t_bar)|/|C(R)| = {ls.t_bar_measure / ls.volume:.4f}, mean value property: {ls.mean_value_holds}")
    led = verify_growth_lemmas(pi, k_R, R)
    for r in led.results:
        print(f"{r.lemma:>22}: {r.status:8s} hyp={r.hypothesis_holds} concl={r.conclusion_holds}")
    print(f"failures: {len(led.failures)}")


if __name__ == "__main__":
    main()
