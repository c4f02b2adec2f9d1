"""Empirical m(z)/m(S^{-1}z) on growing shells for the three weight families."""

from __future__ import annotations

import numpy as np

from metaplectic.symplectic import jmat, up, vq
from metaplectic.weights import WeightSpec, equivalence_under, estimate_Rm_Tm


def main():
    radii = 2.0 ** np.arange(0, 11)
    cases = [
        ("m_{1,1}", WeightSpec.radial_log(1, 1, 1)),
        ("p_1", WeightSpec.spatial(1, 1)),
        ("q_1", WeightSpec.frequency(1, 1)),
    ]
    mats = [("J", jmat(1)), ("U_1", up([[1.0]])), ("V_1", vq([[1.0]]))]
    print(f"{'weight':8s} {'S':4s} {'analytic':15s} {'R_hat':>10s} {'T_hat':>10s} {'R_slope':>8s} {'T_slope':>8s}")
    for wname, w in cases:
        for sname, S in mats:
            est = estimate_Rm_Tm(w, S, radii=radii)
            print(
                f"{wname:8s} {sname:4s} {equivalence_under(w, S).value:15s} "
                f"{est.R_hat:10.3g} {est.T_hat:10.3g} {est.R_slope:8.3f} {est.T_slope:8.3f}"
            )


if __name__ == "__main__":
    main()
