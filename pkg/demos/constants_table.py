"""Radius thresholds and the constants ledger at the default parameters."""

from __future__ import annotations

import numpy as np

from swirlab.criterion import GaugeParams
from swirlab.moser import MoserInputs, const_beta0_log, const_beta2_log2, const_thresholds, moser_constants


def main():
    gauge = GaugeParams()
    th = const_thresholds(gauge)
    for name, t in th.items():
        print(f"{name}: exists={t.exists}  ln ln(1/R*)={t.lnln:.6g}  R*={t.radius:.4g}  {t.note}")

    m = moser_constants(MoserInputs())
    for k, v in m.to_dict().items():
        if k not in ("inputs", "thresholds"):
            print(f"{k:>12}: {v}")

    b = const_beta0_log(None, None, 1.0, gauge, lnln=th["R*2"].lnln, tbar_ratio=-1.0, thresholds=th)
    print(f"at R*2: N={b.N}  ln beta0={b.ln_beta0:.6g} >= -(1/2) lnln = {b.ln_target:.6g}: {b.holds}")

    for g2 in np.linspace(1.0, 1.2, 5):
        print(f"g(2R)={g2:.2f}  log2 beta2 = {const_beta2_log2(0.5, g2).log2:.6e}")


if __name__ == "__main__":
    main()
