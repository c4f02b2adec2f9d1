"""Closed forms for the dilated-Gaussian witness family.

Notation: ``g(t) = exp(-pi |t|^2)``, ``eps > 1``, ``E = eps I``,
``Delta^2 = (1 - eps^-2) I`` so that ``Delta^2 + E^-2 = I``. The witness
profile on phase space is

    f(x, w) = exp(-pi x.Delta^2 x) exp(-pi w.E^-2 w),

the modulus of ``|det E| * A(g o (eps^2-1)^{1/2} I, g)``. Every function here
that can overflow returns a ``(value, log_value)`` pair.

Closeness to 1 matters for ``eps``: callers that sweep ``eps -> 1`` should
pass ``eps_minus_one`` so that ``eps^2 - 1`` is formed without cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConditioningError, DivergenceError, DomainError, ParameterError
from .exponents import ExponentPair
from .symplectic import PI_THEN_VQ, SpecialForm, SymplecticMatrix, invert_symplectic


class NormValue(NamedTuple):
    value: float
    log_value: float


def _check_symmetric(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise ParameterError(f"A must be square, got {A.shape}")
    if not np.allclose(A, A.T, rtol=1e-12, atol=1e-14):
        raise ParameterError("A must be symmetric")
    return 0.5 * (A + A.T)


def log_gaussian_integral(A, beta) -> float:
    """Log of ``int exp(-pi x.Ax + 2 pi beta.x) dx``."""
    A = _check_symmetric(A)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.shape != (A.shape[0],):
        raise ParameterError("beta has the wrong length")
    lam = np.linalg.eigvalsh(A)
    if lam[0] <= 0:
        raise DivergenceError("integral diverges: A is not strictly positive definite")
    quad = float(beta @ np.linalg.solve(A, beta))
    return -0.5 * float(np.sum(np.log(lam))) + math.pi * quad


def gaussian_integral(A, beta) -> float:
    """``|det A|^{-1/2} exp(pi beta.A^{-1} beta)`` for strictly positive definite ``A``."""
    return math.exp(log_gaussian_integral(A, beta))


def _resolve_eps(eps, eps_minus_one=None) -> tuple[float, float]:
    """Return ``(eps, eps^2 - 1)`` computed without cancellation."""
    if eps_minus_one is not None:
        delta = float(eps_minus_one)
        if not delta > 0:
            raise DomainError("eps must be > 1")
        return 1.0 + delta, delta * (2.0 + delta)
    eps = float(eps)
    if not eps > 1:
        raise DomainError(f"eps must be > 1, got {eps}")
    return eps, (eps - 1.0) * (eps + 1.0)


def ambiguity_gaussian(eps, d: int, x, omega) -> np.ndarray:
    """``A(g o (eps^2-1)^{1/2} I, g)(x, w)`` in closed form.

    ``x`` and ``omega`` have shape ``(..., d)`` (or scalars when ``d == 1``).
    """
    eps, u = _resolve_eps(eps)
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if d == 1 and x.ndim == 0:
        x = x[..., None]
    if d == 1 and omega.ndim == 0:
        omega = omega[..., None]
    if x.shape[-1] != d or omega.shape[-1] != d:
        raise ParameterError("last axis of x and omega must have length d")
    e2 = 1.0 / (eps * eps)
    delta2 = u * e2
    xw = np.sum(x * omega, axis=-1)
    xx = np.sum(x * x, axis=-1)
    ww = np.sum(omega * omega, axis=-1)
    phase = np.exp(1j * math.pi * xw - 2j * math.pi * e2 * xw)
    return eps ** (-d) * phase * np.exp(-math.pi * delta2 * xx - math.pi * e2 * ww)


def dilated_gaussian(eps, t) -> np.ndarray:
    """``g((eps^2 - 1)^{1/2} t)`` for ``t`` of shape ``(..., d)``."""
    _, u = _resolve_eps(eps)
    t = np.asarray(t, dtype=float)
    return np.exp(-math.pi * u * np.sum(t * t, axis=-1))


@dataclass(frozen=True)
class GaussianWitness:
    """``(eps, d, blocks of S^{-1})`` with the derived diagonal scalings."""

    epsilon: float
    Sinv: SymplecticMatrix
    eps_sq_minus_one: float

    @classmethod
    def from_matrix(cls, S: SymplecticMatrix, eps, eps_minus_one=None) -> "GaussianWitness":
        eps, u = _resolve_eps(eps, eps_minus_one)
        return cls(eps, invert_symplectic(S), u)

    @property
    def d(self) -> int:
        return self.Sinv.d

    @property
    def einv2(self) -> float:
        return 1.0 / (self.epsilon * self.epsilon)

    @property
    def delta2(self) -> float:
        return self.eps_sq_minus_one * self.einv2

    @property
    def log_delta2(self) -> float:
        return math.log(self.eps_sq_minus_one) - math.log1p(self.eps_sq_minus_one)

    @property
    def log_einv2(self) -> float:
        return -math.log1p(self.eps_sq_minus_one)

    def profile(self, x, omega) -> np.ndarray:
        """``(f o S^{-1})(x, w)``, vectorized over leading axes."""
        x = np.asarray(x, dtype=float)
        omega = np.asarray(omega, dtype=float)
        S = self.Sinv
        u = x @ S.A.T + omega @ S.B.T
        v = x @ S.C.T + omega @ S.D.T
        return np.exp(
            -math.pi * self.delta2 * np.sum(u * u, axis=-1)
            - math.pi * self.einv2 * np.sum(v * v, axis=-1)
        )


@dataclass(frozen=True, eq=False)
class QuadraticFormTriple:
    Sigma: np.ndarray
    beta: np.ndarray
    Omega: np.ndarray
    logdet_Sigma: float
    logdet_Omega: float


def sigma_beta_omega(witness: GaussianWitness) -> QuadraticFormTriple:
    """Group ``(f o S^{-1})`` as ``x.Sigma x + 2 w.beta x + w.(Omega + beta Sigma^-1 beta^T) w``.

    ``log det Omega`` uses ``det Sigma * det Omega = det(Delta^2) det(E^-2)``
    (``det S = 1``), which stays accurate when ``Delta^2`` is tiny.
    """
    S = witness.Sinv
    A, B, C, D = S.A, S.B, S.C, S.D
    dl2, e2 = witness.delta2, witness.einv2
    Sigma = dl2 * A.T @ A + e2 * C.T @ C
    Sigma = 0.5 * (Sigma + Sigma.T)
    beta = dl2 * B.T @ A + e2 * D.T @ C
    try:
        chol = np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError("Sigma is numerically singular") from exc
    logdet_sigma = 2.0 * float(np.sum(np.log(np.diag(chol))))
    Omega = dl2 * B.T @ B + e2 * D.T @ D - beta @ np.linalg.solve(Sigma, beta.T)
    Omega = 0.5 * (Omega + Omega.T)
    d = witness.d
    logdet_omega = d * (witness.log_delta2 + witness.log_einv2) - logdet_sigma
    return QuadraticFormTriple(Sigma, beta, Omega, logdet_sigma, logdet_omega)


@dataclass(frozen=True, eq=False)
class MixedNorm:
    value: float
    log_value: float
    sigma: np.ndarray
    omega: np.ndarray

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "sigma": self.sigma.tolist(),
            "omega": self.omega.tolist(),
        }


def mixed_norm_dilated(S: SymplecticMatrix, eps, e: ExponentPair, eps_minus_one=None) -> MixedNorm:
    """Exact ``L^{p,q}`` norm of ``f o S^{-1}``.

    ``|det(p Sigma)|^{-1/(2p)} |det(q Omega)|^{-1/(2q)}``, where an infinite
    exponent drops its factor (the inner sup is attained at
    ``x = -Sigma^{-1} beta^T w`` and the outer sup at ``w = 0``).
    """
    wit = GaussianWitness.from_matrix(S, eps, eps_minus_one)
    tri = sigma_beta_omega(wit)
    d = wit.d
    log_value = 0.0
    if not math.isinf(e.p):
        log_value -= (d * math.log(e.p) + tri.logdet_Sigma) / (2.0 * e.p)
    if not math.isinf(e.q):
        log_value -= (d * math.log(e.q) + tri.logdet_Omega) / (2.0 * e.q)
    return MixedNorm(_safe_exp(log_value), log_value, tri.Sigma, tri.Omega)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def qprime_eigenvalues(Qprime) -> np.ndarray:
    """Eigenvalues of ``Q'`` sorted by decreasing absolute value."""
    lam = np.linalg.eigvalsh(np.asarray(Qprime, dtype=float))
    return lam[np.argsort(-np.abs(lam), kind="stable")]


def _is_zero(Q) -> bool:
    Q = np.asarray(Q, dtype=float)
    return Q.size == 0 or float(np.max(np.abs(Q))) <= 1e-12


def case_ratio(special: SpecialForm, eps, e: ExponentPair, eps_minus_one=None) -> NormValue:
    """Closed-form growth ratio of the witness family for a reduced matrix.

    ``Q' = 0``: ``(eps^2-1)^{(d-k)(1/2p - 1/2q)}``. Otherwise, with ``Lambda``
    the eigenvalues of ``Q'`` and ``a = |1/2p - 1/2q|``,
    ``prod_{i<=k} (Lambda_i^2/(eps^2-1) + 1)^a * prod_{i>k} (Lambda_i^2 + eps^2 - 1)^a``.
    Only the count ``k`` matters for the split, so eigenvalues are assigned in
    sorted order.
    """
    if e.equal:
        raise DomainError("case ratio is degenerate for p == q")
    _, u = _resolve_eps(eps, eps_minus_one)
    d, k = special.d, special.k
    if _is_zero(special.Qprime):
        log_value = (d - k) * e.gap * math.log(u)
    else:
        lam2 = qprime_eigenvalues(special.Qprime) ** 2
        a = abs(e.gap)
        log_value = a * (
            float(np.sum(np.log1p(lam2[:k] / u))) + float(np.sum(np.log(lam2[k:] + u)))
        )
    return NormValue(_safe_exp(log_value), log_value)


def witness_matrix(special: SpecialForm) -> SymplecticMatrix:
    """Matrix ``W`` such that ``f o W`` is the blow-up witness for the reduced source.

    ``Q' = 0``: the plain profile composed with the trailing factor. For
    ``pi_then_vq`` with ``Q' != 0`` the witness is ``f o V_{Q'}`` (so the
    dilation lands on the pure permutation profile); for ``vq_then_pi`` it is
    ``f o prod Pi_i`` (so the dilation lands on ``f o V_{-Q'}``).
    """
    from .symplectic import pi_product, vq

    if _is_zero(special.Qprime):
        core = SymplecticMatrix.identity(special.d)
    elif special.variant == PI_THEN_VQ:
        core = vq(special.Qprime)
    else:
        core = pi_product(special.pi_indices, special.d)
    return core @ special.trailing
