from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

_INF_TOKENS = {"inf", "infinity", "+inf", "oo", "∞"}


def parse_exponent(value) -> float:
    """Parse ``1.5``, ``"2"``, ``"inf"``, ``"∞"`` or ``math.inf`` into a float in [1, inf]."""
    if isinstance(value, str):
        token = value.strip().lower()
        p = math.inf if token in _INF_TOKENS else float(token)
    elif value is None:
        raise ParameterError("exponent is missing")
    else:
        p = float(value)
    if math.isnan(p) or p < 1:
        raise ParameterError(f"exponent must lie in [1, inf], got {value!r}")
    return p


def format_exponent(p: float):
    return "inf" if math.isinf(p) else p


@dataclass(frozen=True)
class ExponentPair:
    """Mixed-norm exponents ``(p, q)``; ``math.inf`` encodes infinity.

    Reciprocals follow ``1/inf = 0``, which is the ``a^{1/inf} = 1`` convention.
    """

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        object.__setattr__(self, "q", parse_exponent(self.q))

    @property
    def inv_p(self) -> float:
        return 0.0 if math.isinf(self.p) else 1.0 / self.p

    @property
    def inv_q(self) -> float:
        return 0.0 if math.isinf(self.q) else 1.0 / self.q

    @property
    def equal(self) -> bool:
        return self.p == self.q

    @property
    def gap(self) -> float:
        """``1/(2p) - 1/(2q)``."""
        return 0.5 * (self.inv_p - self.inv_q)

    def to_dict(self) -> dict:
        return {"p": format_exponent(self.p), "q": format_exponent(self.q)}

    def __str__(self) -> str:
        return f"({format_exponent(self.p)}, {format_exponent(self.q)})"
