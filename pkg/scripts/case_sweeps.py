"""Growth exponents of the Gaussian witness ratio for representative matrices.

Writes one CSV + JSON report per run into --out and prints a summary table.

    python3 scripts/case_sweeps.py --out runs/
"""

from __future__ import annotations

import argparse
import math
from pathlib import Path

import numpy as np

from metaplectic.harness import SweepConfig, run_sweep
from metaplectic.symplectic import dl, jmat, pi_product, up, vq

INF = math.inf

RUNS = [
    # name, matrix, (p, q), grid kwargs
    ("swap_d1", jmat(1), (1, INF), dict(eps_min=1.1, eps_max=100.0)),
    ("partial_swap_d2", pi_product([2], 2), (2, 4), dict(eps_min=1.1, eps_max=100.0)),
    ("swap_d2_reverse", jmat(2), (INF, 1), dict(eps_min_offset=1e-10, eps_max=2.0)),
    ("chirp_d1", vq([[1.0]]), (1, 2), dict(eps_min_offset=1e-10, eps_max=1.01)),
    ("chirp_d1_reverse", vq([[1.0]]), (2, 1), dict(eps_min_offset=1e-10, eps_max=1.01)),
    ("swap_then_chirp_d2", pi_product([2], 2) @ vq(np.diag([1.0, 0.5])), (1, 2),
     dict(eps_min_offset=1e-12, eps_max=1e8, fit_window=0.25)),
    ("upper_d2", up([[1.0, 0.3], [0.3, -0.5]]) @ dl([[2.0, 1.0], [0.0, 1.0]]), (1, INF), dict()),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--count", type=int, default=64)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"{'run':22s} {'(p,q)':10s} {'case':7s} {'regime':6s} {'fitted':>9s} {'predicted':>9s}  agree  verdict")
    for name, S, (p, q), grid in RUNS:
        cfg = SweepConfig(
            matrix=S, p=p, q=q, eps_count=args.count,
            csv_path=str(out / f"{name}.csv"), report_path=str(out / f"{name}.json"), **grid,
        )
        r = run_sweep(cfg)
        pq = f"({p},{q})".replace("inf", "∞")
        print(
            f"{name:22s} {pq:10s} {r.case:7s} {r.regime:6s} {r.fitted_exponent:9.4f} "
            f"{r.predicted_exponent:9.4f}  {str(r.agreement):5s}  {r.verdict.status.value}"
        )


if __name__ == "__main__":
    main()
