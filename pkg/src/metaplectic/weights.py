"""Polynomial weights on phase space and their behaviour under symplectic maps.

Three families are supported analytically:

* ``radial_log``: ``m(z) = (1 + |z|)^s * log(e + |z|)^t``
* ``spatial``:    ``m(x, w) = (1 + |x|)^s``, ``s != 0``
* ``frequency``:  ``m(x, w) = (1 + |w|)^t``, ``t != 0``
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm as _normal, qmc

from . import config
from .errors import DomainError, ParameterError
from .symplectic import SymplecticMatrix, invert_symplectic

RADIAL_LOG = "radial_log"
SPATIAL = "spatial"
FREQUENCY = "frequency"
FAMILIES = (RADIAL_LOG, SPATIAL, FREQUENCY)


class Equivalence(str, enum.Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not_equivalent"


@dataclass(frozen=True)
class WeightSpec:
    family: str
    d: int
    s: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown weight family {self.family!r}")
        if self.d < 1:
            raise ParameterError("d must be positive")
        if self.family == SPATIAL and self.s == 0:
            raise ParameterError("spatial weight needs s != 0")
        if self.family == FREQUENCY and self.t == 0:
            raise ParameterError("frequency weight needs t != 0")

    @classmethod
    def radial_log(cls, s: float, t: float, d: int) -> "WeightSpec":
        return cls(RADIAL_LOG, d, s=s, t=t)

    @classmethod
    def spatial(cls, s: float, d: int) -> "WeightSpec":
        return cls(SPATIAL, d, s=s)

    @classmethod
    def frequency(cls, t: float, d: int) -> "WeightSpec":
        return cls(FREQUENCY, d, t=t)

    def __call__(self, z) -> np.ndarray:
        return eval_weight(self, z)

    def to_dict(self) -> dict:
        return {"family": self.family, "s": self.s, "t": self.t, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "WeightSpec":
        return cls(
            str(data["family"]),
            int(data["d"]),
            s=float(data.get("s", 0.0)),
            t=float(data.get("t", 0.0)),
        )


def load_weight(path) -> WeightSpec:
    with open(path) as fh:
        return WeightSpec.from_dict(json.load(fh))


def eval_weight(w: WeightSpec, z) -> np.ndarray:
    """Evaluate ``w`` at points ``z`` of shape ``(..., 2d)``."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != 2 * w.d:
        raise ParameterError(f"points must have last axis {2 * w.d}, got {z.shape}")
    if w.family == RADIAL_LOG:
        r = np.linalg.norm(z, axis=-1)
        return (1.0 + r) ** w.s * np.log(np.e + r) ** w.t
    if w.family == SPATIAL:
        return (1.0 + np.linalg.norm(z[..., : w.d], axis=-1)) ** w.s
    return (1.0 + np.linalg.norm(z[..., w.d :], axis=-1)) ** w.t


def polynomial_bound(w: WeightSpec) -> tuple[float, float]:
    """Constants ``(C, N)`` with ``w(z) <= C (1 + |z|)^N``."""
    if w.family == RADIAL_LOG:
        # log(e + r) <= 1 + r
        return 1.0, max(w.s, 0.0) + max(w.t, 0.0)
    if w.family == SPATIAL:
        return 1.0, max(w.s, 0.0)
    return 1.0, max(w.t, 0.0)


def _block_is_zero(block: np.ndarray, S: SymplecticMatrix) -> bool:
    return bool(np.max(np.abs(block)) <= config.SYMPLECTIC_TOL * max(1.0, S.norm()))


def ratio_bounds(w: WeightSpec, S: SymplecticMatrix) -> tuple[bool, bool]:
    """Analytic ``(R_m < inf, T_m > 0)`` for ``m / m o S^{-1}``.

    For ``spatial`` weights both hold iff ``B = 0``; for ``frequency`` weights
    iff ``C = 0``. When the block is nonzero, both fail: the ratio is unbounded
    along one direction and tends to zero along another.
    """
    if w.family == RADIAL_LOG:
        return True, True
    block = S.B if w.family == SPATIAL else S.C
    ok = _block_is_zero(block, S)
    return ok, ok


def equivalence_under(w: WeightSpec, S: SymplecticMatrix) -> Equivalence:
    if w.d != S.d:
        raise ParameterError("weight and matrix dimensions differ")
    r_finite, t_positive = ratio_bounds(w, S)
    if r_finite and t_positive:
        return Equivalence.EQUIVALENT
    return Equivalence.NOT_EQUIVALENT


@dataclass(frozen=True)
class WeightRatioEstimate:
    """Empirical sup/inf of ``m(z) / m(S^{-1} z)`` over sampled spheres.

    ``R_slope`` and ``T_slope`` are least-squares slopes of the per-shell
    log max/min against ``log(1 + radius)``; a clearly nonzero slope flags
    divergence. Estimates never certify ``R_m`` or ``T_m``.
    """

    R_hat: float
    T_hat: float
    samples: int
    max_radius: float
    radii: tuple
    shell_max: tuple
    shell_min: tuple
    R_slope: float
    T_slope: float

    @property
    def R_infinite(self) -> bool:
        return not math.isfinite(self.R_hat)


def _sphere_directions(dim: int, count: int, seed) -> np.ndarray:
    m = max(1, math.ceil(math.log2(count)))
    u = qmc.Sobol(dim, scramble=True, seed=seed).random_base2(m)[:count]
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = _normal.ppf(u)
    g = g / np.linalg.norm(g, axis=1, keepdims=True)
    # the coordinate axes are where the spatial/frequency ratios peak
    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    return np.concatenate([axes, g])


def _slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def estimate_Rm_Tm(
    w: WeightSpec,
    S: SymplecticMatrix,
    radii=None,
    samples_per_shell: int = 256,
    seed=0,
) -> WeightRatioEstimate:
    """Sample ``m(z)/m(S^{-1}z)`` on spheres of the given radii.

    Default radii are ``2**j`` for ``j = 0..20``. Directions are the ``±``
    coordinate axes plus ``samples_per_shell`` points of a scrambled Sobol
    sequence (seeded), shared across shells.
    """
    if radii is None:
        radii = 2.0 ** np.arange(21)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ParameterError("radii must be a nonempty 1-d sequence")
    if np.any(np.diff(radii) <= 0) or radii[0] < 0:
        raise ParameterError("radii must be nonnegative and strictly increasing")
    if samples_per_shell < 1:
        raise ParameterError("samples_per_shell must be >= 1")
    dirs = _sphere_directions(2 * w.d, samples_per_shell, seed)
    Sinv = invert_symplectic(S).entries
    smax, smin = [], []
    for r in radii:
        z = r * dirs
        ratio = eval_weight(w, z) / eval_weight(w, z @ Sinv.T)
        smax.append(float(np.max(ratio)))
        smin.append(float(np.min(ratio)))
    lr = np.log1p(radii)
    return WeightRatioEstimate(
        R_hat=max(smax),
        T_hat=min(smin),
        samples=int(dirs.shape[0] * radii.size),
        max_radius=float(radii[-1]),
        radii=tuple(radii.tolist()),
        shell_max=tuple(smax),
        shell_min=tuple(smin),
        R_slope=_slope(lr, np.log(smax)),
        T_slope=_slope(lr, np.log(smin)),
    )


def _top_direction(block: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(block)
    return vt[0]


def divergence_path(w: WeightSpec, S: SymplecticMatrix, scales) -> np.ndarray:
    """Values of ``m(z)/m(S^{-1}z)`` along a path on which they blow up.

    For a spatial weight with ``s > 0`` the path is ``z = S (e_1, n v)`` with
    ``v`` the top right-singular vector of ``B``, so the ratio is
    ``((1 + |A e_1 + n B v|) / 2)^s``. Negative exponents use ``S^{-1}`` in
    place of ``S``; frequency weights swap the roles of ``x`` and ``w``.
    """
    if equivalence_under(w, S) is Equivalence.EQUIVALENT or w.family == RADIAL_LOG:
        raise DomainError("weight is equivalent under S; no divergent direction")
    d = w.d
    Sinv = invert_symplectic(S)
    expo = w.s if w.family == SPATIAL else w.t
    G = S if expo > 0 else Sinv
    e1 = np.zeros(d)
    e1[0] = 1.0
    out = []
    for n in np.asarray(scales, dtype=float):
        if w.family == SPATIAL:
            zp = np.concatenate([e1, n * _top_direction(G.B)])
        else:
            zp = np.concatenate([n * _top_direction(G.C), e1])
        z = S.entries @ zp if expo > 0 else zp
        out.append(float(eval_weight(w, z) / eval_weight(w, Sinv.entries @ z)))
    return np.asarray(out)
