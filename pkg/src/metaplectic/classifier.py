"""Boundedness verdicts for metaplectic operators on mixed-norm spaces.

Unweighted rule: the operator is a bounded automorphism of ``M^{p,q}`` iff
``p == q`` or ``S`` is upper block triangular; otherwise it is unbounded.

Weighted rule, for the three analytic weight families:

* ``m ~ m o S^{-1}``: same verdict as the unweighted case;
* unweighted bounded and ``R_m < inf``: bounded;
* unweighted unbounded and ``T_m > 0``: unbounded;
* anything else is left open (``inconclusive``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import CapabilityError, DomainError, ParameterError
from .exponents import ExponentPair
from .symplectic import SymplecticMatrix, is_upper_block_triangular, reduce_special
from .weights import FAMILIES, Equivalence, WeightSpec, equivalence_under, ratio_bounds

__all__ = [
    "ExponentPair",
    "Reason",
    "Status",
    "Verdict",
    "blowup_exponent",
    "classify_unweighted",
    "classify_weighted",
]


class Status(str, enum.Enum):
    BOUNDED_AUTOMORPHISM = "bounded_automorphism"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"


class Reason(str, enum.Enum):
    P_EQUALS_Q = "p_equals_q"
    UPPER_BLOCK_TRIANGULAR = "upper_block_triangular"
    NOT_UPPER_TRIANGULAR = "not_upper_triangular"
    WEIGHT_TRANSFER_RM = "weight_transfer_rm"
    WEIGHT_TRANSFER_TM = "weight_transfer_tm"
    WEIGHT_EQUIVALENCE = "weight_equivalence"
    OPEN_CASE = "open_case"


@dataclass(frozen=True, eq=False)
class Verdict:
    """Classification result.

    ``k`` and ``Qprime`` are the reduction data of the special form (only
    filled for ``p != q``); ``exponent`` is the Case-1 growth exponent
    ``(d - k)(1/2p - 1/2q)`` when it applies.
    """

    status: Status
    reason: Reason
    details: str = ""
    k: int | None = None
    Qprime: np.ndarray | None = field(default=None, repr=False)
    exponent: float | None = None

    @property
    def bounded(self) -> bool:
        return self.status is Status.BOUNDED_AUTOMORPHISM

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "reason": self.reason.value,
            "details": self.details,
            "k": self.k,
            "Qprime": None if self.Qprime is None else np.asarray(self.Qprime).tolist(),
            "exponent": self.exponent,
        }


def blowup_exponent(d: int, k: int, e: ExponentPair) -> float:
    """``(d - k)(1/(2p) - 1/(2q))`` with ``1/inf = 0``."""
    if not 0 <= k <= d:
        raise ParameterError(f"need 0 <= k <= d, got k={k}, d={d}")
    if e.equal:
        raise DomainError("blow-up exponent is degenerate for p == q")
    return (d - k) * e.gap


def _block_tol(S: SymplecticMatrix, tol) -> float:
    tol = config.SYMPLECTIC_TOL if tol is None else tol
    return tol * max(1.0, S.norm())


def classify_unweighted(S: SymplecticMatrix, e: ExponentPair, tol=None) -> Verdict:
    if e.equal:
        return Verdict(
            Status.BOUNDED_AUTOMORPHISM,
            Reason.P_EQUALS_Q,
            f"p = q = {e.p}: M^p is invariant under every metaplectic operator",
        )
    sf = reduce_special(S)
    expo = blowup_exponent(S.d, sf.k, e)
    if is_upper_block_triangular(S, _block_tol(S, tol)):
        return Verdict(
            Status.BOUNDED_AUTOMORPHISM,
            Reason.UPPER_BLOCK_TRIANGULAR,
            "C block vanishes",
            k=sf.k,
            Qprime=sf.Qprime,
            exponent=expo,
        )
    return Verdict(
        Status.UNBOUNDED,
        Reason.NOT_UPPER_TRIANGULAR,
        f"C block is nonzero (k={sf.k}); Gaussian witnesses blow up",
        k=sf.k,
        Qprime=sf.Qprime,
        exponent=expo,
    )


def _with(v: Verdict, status: Status, reason: Reason, details: str) -> Verdict:
    return Verdict(status, reason, details, k=v.k, Qprime=v.Qprime, exponent=v.exponent)


def classify_weighted(S: SymplecticMatrix, e: ExponentPair, w: WeightSpec, tol=None) -> Verdict:
    if not isinstance(w, WeightSpec) or w.family not in FAMILIES:
        raise CapabilityError("analytic verdicts exist only for radial_log, spatial and frequency weights")
    if w.d != S.d:
        raise ParameterError("weight and matrix dimensions differ")
    base = classify_unweighted(S, e, tol)
    if equivalence_under(w, S) is Equivalence.EQUIVALENT:
        return _with(base, base.status, Reason.WEIGHT_EQUIVALENCE, f"m ~ m o S^-1 ({w.family}); " + base.details)
    r_finite, t_positive = ratio_bounds(w, S)
    if base.bounded and r_finite:
        return _with(base, Status.BOUNDED_AUTOMORPHISM, Reason.WEIGHT_TRANSFER_RM, "unweighted bounded and R_m < inf")
    if not base.bounded and t_positive:
        return _with(base, Status.UNBOUNDED, Reason.WEIGHT_TRANSFER_TM, "unweighted unbounded and T_m > 0")
    return _with(
        base,
        Status.INCONCLUSIVE,
        Reason.OPEN_CASE,
        f"{w.family} weight with R_m = inf and T_m = 0; unweighted verdict {base.status.value}",
    )
