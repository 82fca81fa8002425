"""Swirl-only Lamb-Oseen runs on three grids: error at t = 0.1 and observed order."""

from __future__ import annotations

import numpy as np

from swirlab.dynamics import SolverConfig, run_scenario, stable_dt
from swirlab.geometry import CylGrid
from swirlab.scenarios import lamb_oseen


def main():
    sc = lamb_oseen()
    errs, hs = [], []
    for n in (32, 64, 128):
        g = CylGrid(4.0, -0.5, 0.5, n, n // 4)
        cfg = SolverConfig(stable_dt(g, cfl_safety=0.9, swirl_drift=True), 0.1)
        s = run_scenario(sc, g, cfg, snapshot_stride=10**6, flow=False).series
        err = np.abs(s.data["swirl"][-1] - sc.exact_fields(g, 0.1)["swirl"]).max()
        errs.append(err)
        hs.append(g.h)
        print(f"n_rho={n:4d}  h={g.h:.4f}  max|sigma - exact| = {err:.3e}  err/h^2 = {err / g.h**2:.4f}")
    p = np.log(np.array(errs[:-1]) / errs[1:]) / np.log(np.array(hs[:-1]) / hs[1:])
    print("observed orders:", ", ".join(f"{x:.3f}" for x in p))


if __name__ == "__main__":
    main()
