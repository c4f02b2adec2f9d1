"""End-to-end check: verdict vs fitted exponent over a random witness corpus.

Every matrix is upper block triangular, a Case-1 form R prod Pi_i R', or a
Case-2 form prod Pi_i V_Q with diagonal Q; each is swept for several (p, q).
"""

from __future__ import annotations

import argparse
import collections
import math

from metaplectic.harness import SweepConfig, run_sweep, witness_corpus

INF = math.inf
PAIRS = [(1, 2), (2, 1), (1, INF), (INF, 1), (2, 4)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    tally = collections.Counter()
    failures = []
    for name, S in witness_corpus(args.count, args.seed):
        for p, q in PAIRS:
            r = run_sweep(SweepConfig(matrix=S, p=p, q=q, eps_min_offset=1e-12, eps_max=1e8, eps_count=60, fit_window=0.25))
            tally[r.case, r.agreement] += 1
            if not r.agreement:
                failures.append((name, p, q, r.case, r.fitted_exponent, r.predicted_exponent))
    for (case, ok), n in sorted(tally.items()):
        print(f"{case:8s} agreement={ok!s:5s} {n:4d}")
    for f in failures:
        print("MISMATCH", *f)
    print(f"{sum(tally.values())} runs, {len(failures)} mismatches")


if __name__ == "__main__":
    main()
