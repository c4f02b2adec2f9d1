"""Grid refinement of the symplectic covariance deviation, d = 1.

For each generator kind, prints max |A(Sf, Sg) - A(f, g) o S^{-1}| for
n = 128 .. 1024 at fixed T and the ratio between successive grids.
"""

from __future__ import annotations

import argparse

from metaplectic.symplectic import factorize, make_generator
from metaplectic.tfa import check_symplectic_covariance, gaussian_signal

KINDS = [("UP", [[0.6]]), ("VQ", [[0.8]]), ("DL", [[2.0]]), ("Pi", 1), ("J", None)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, default=16.0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    args = ap.parse_args(argv)
    rows = {}
    for n in args.sizes:
        g = gaussian_signal(1, n, args.T)
        f = gaussian_signal(1, n, args.T, scale=1.3, center=[0.4], freq=[0.3])
        for kind, param in KINDS:
            rows.setdefault(kind, []).append(check_symplectic_covariance(f, g, factorize(make_generator(kind, 1, param))))
    print("kind  " + "  ".join(f"n={n:<8d}" for n in args.sizes) + "  successive ratios")
    for kind, devs in rows.items():
        ratios = [b / a if a > 0 else float("nan") for a, b in zip(devs, devs[1:])]
        print(f"{kind:5s} " + "  ".join(f"{v:10.2e}" for v in devs) + "  " + " ".join(f"{r:.3f}" for r in ratios))


if __name__ == "__main__":
    main()
