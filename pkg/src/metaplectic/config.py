"""Default numerical tolerances.

Each default can be overridden through an environment variable, read once at
import time. Every public function also accepts an explicit ``tol`` argument.
"""

from __future__ import annotations

import os


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {raw!r}")
    return value


#: symplectic validation and block-zero tests, relative to the matrix norm
SYMPLECTIC_TOL = _env_float("METAPLECTIC_TOL", 1e-9)

#: allowed |fitted - predicted| growth exponent in sweeps
FIT_TOL = _env_float("METAPLECTIC_FIT_TOL", 0.02)

#: relative singular-value threshold below which a pivot block counts as singular
RANK_TOL = _env_float("METAPLECTIC_RANK_TOL", 1e-12)
