"""Symplectic matrices: construction, validation, factorization, reduction.

Conventions
-----------
Phase-space vectors are ordered ``(x_1..x_d, w_1..w_d)``. The standard
symplectic matrix is ``J = [[0, I], [-I, 0]]`` and ``S`` is symplectic iff
``S.T @ J @ S == J``. Quasi-permutation indices are 1-based and run over
``1..2d``; ``Pi(i + d)`` is the transpose (inverse) of ``Pi(i)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import DimensionError, FactorizationError, ParameterError, ValidationError

# below this d every admissible index set is enumerated; above it a greedy pivot is used
_ENUMERATE_MAX_D = 10
# a pivot block is acceptable if its condition number is within this factor of the best one
_COND_SLACK = 10.0
_COND_FLOOR = 1e3


def standard_j(d: int) -> np.ndarray:
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


def _as_square_even(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2 or M.shape[0] == 0:
        raise DimensionError(f"symplectic matrices have even side, got {M.shape[0]}")
    return M


def is_symplectic(M, tol: float = config.SYMPLECTIC_TOL) -> bool:
    """Return True iff ``max|M^T J M - J| <= tol``."""
    if tol <= 0:
        raise ParameterError("tol must be positive")
    M = _as_square_even(M)
    J = standard_j(M.shape[0] // 2)
    return bool(np.max(np.abs(M.T @ J @ M - J)) <= tol)


def _scaled_tol(M: np.ndarray, tol: float) -> float:
    # M^T J M is quadratic in M, so the residual scales with ||M||^2
    return tol * max(1.0, np.linalg.norm(M, 2)) ** 2


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A validated real ``2d x 2d`` symplectic matrix.

    The constructor checks ``S^T J S = J`` with tolerance ``tol`` relative to
    ``||S||^2``. The stored array is a read-only copy.
    """

    entries: np.ndarray
    tol: float = field(default=config.SYMPLECTIC_TOL, repr=False)

    def __post_init__(self):
        M = _as_square_even(self.entries).copy()
        if not np.all(np.isfinite(M)):
            raise ValidationError("matrix has non-finite entries")
        if not is_symplectic(M, _scaled_tol(M, self.tol)):
            J = standard_j(M.shape[0] // 2)
            resid = np.max(np.abs(M.T @ J @ M - J))
            raise ValidationError(f"matrix is not symplectic (max |S^T J S - J| = {resid:.3e})")
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    @classmethod
    def _trusted(cls, M) -> "SymplecticMatrix":
        # internal products of generators; skips validation
        obj = object.__new__(cls)
        M = np.array(M, dtype=float)
        M.setflags(write=False)
        object.__setattr__(obj, "entries", M)
        object.__setattr__(obj, "tol", config.SYMPLECTIC_TOL)
        return obj

    @property
    def d(self) -> int:
        return self.entries.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        return self.entries[: self.d, : self.d]

    @property
    def B(self) -> np.ndarray:
        return self.entries[: self.d, self.d :]

    @property
    def C(self) -> np.ndarray:
        return self.entries[self.d :, : self.d]

    @property
    def D(self) -> np.ndarray:
        return self.entries[self.d :, self.d :]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __matmul__(self, other):
        if isinstance(other, SymplecticMatrix):
            return SymplecticMatrix._trusted(self.entries @ other.entries)
        return self.entries @ np.asarray(other)

    def inverse(self) -> "SymplecticMatrix":
        return invert_symplectic(self)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def allclose(self, other, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.entries, np.asarray(other, dtype=float), rtol=0, atol=atol))

    def to_dict(self) -> dict:
        return {"d": self.d, "rows": self.entries.tolist()}

    @classmethod
    def from_dict(cls, data: dict, tol: float = config.SYMPLECTIC_TOL) -> "SymplecticMatrix":
        rows = np.asarray(data["rows"], dtype=float)
        d = int(data.get("d", rows.shape[0] // 2))
        if rows.shape != (2 * d, 2 * d):
            raise DimensionError(f"'rows' has shape {rows.shape}, expected {(2 * d, 2 * d)}")
        return cls(rows, tol=tol)

    @classmethod
    def identity(cls, d: int) -> "SymplecticMatrix":
        return cls._trusted(np.eye(2 * d))


def load_matrix(path, tol: float = config.SYMPLECTIC_TOL) -> SymplecticMatrix:
    with open(path) as fh:
        return SymplecticMatrix.from_dict(json.load(fh), tol=tol)


def save_matrix(S: SymplecticMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(S.to_dict(), fh)


# ---------------------------------------------------------------- generators


def _square(M, d: int | None, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if d is not None and M.shape[0] != d:
        raise DimensionError(f"{name} must be {d}x{d}, got {M.shape}")
    return M


def _symmetric(M, d, name) -> np.ndarray:
    M = _square(M, d, name)
    if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(M)))):
        raise ParameterError(f"{name} must be symmetric")
    return 0.5 * (M + M.T)


def up(P, d: int | None = None) -> SymplecticMatrix:
    """``U_P = [[I, P], [0, I]]`` for symmetric ``P``."""
    P = _symmetric(P, d, "P")
    n = P.shape[0]
    return SymplecticMatrix._trusted(np.block([[np.eye(n), P], [np.zeros((n, n)), np.eye(n)]]))


def vq(Q, d: int | None = None) -> SymplecticMatrix:
    """``V_Q = [[I, 0], [Q, I]]`` for symmetric ``Q``."""
    Q = _symmetric(Q, d, "Q")
    n = Q.shape[0]
    return SymplecticMatrix._trusted(np.block([[np.eye(n), np.zeros((n, n))], [Q, np.eye(n)]]))


def dl(L, d: int | None = None) -> SymplecticMatrix:
    """``D_L = diag(L, L^{-T})`` for invertible ``L``."""
    L = _square(L, d, "L")
    n = L.shape[0]
    s = np.linalg.svd(L, compute_uv=False)
    if s[-1] <= config.RANK_TOL * max(1.0, s[0]):
        raise ParameterError("L must be invertible")
    Z = np.zeros((n, n))
    return SymplecticMatrix._trusted(np.block([[L, Z], [Z, np.linalg.inv(L).T]]))


def pi_matrix(i: int, d: int) -> SymplecticMatrix:
    """Elementary quasi-permutation ``Pi_i``, ``1 <= i <= 2d``.

    For ``i <= d``: ``e_i -> -e_{i+d}``, ``e_{i+d} -> e_i``. Indices above ``d``
    give the transposes.
    """
    if d < 1:
        raise DimensionError("d must be positive")
    if not 1 <= i <= 2 * d:
        raise ParameterError(f"quasi-permutation index must lie in 1..{2 * d}, got {i}")
    j = (i - 1) % d
    M = np.eye(2 * d)
    M[j, j] = M[j + d, j + d] = 0.0
    if i <= d:
        M[j + d, j] = -1.0  # column j is -e_{j+d}
        M[j, j + d] = 1.0  # column j+d is e_j
    else:
        M[j + d, j] = 1.0
        M[j, j + d] = -1.0
    return SymplecticMatrix._trusted(M)


def pi_product(indices: Iterable[int], d: int) -> SymplecticMatrix:
    """Product of ``Pi_i`` over ``indices`` (all Pi_i commute, order is irrelevant)."""
    M = np.eye(2 * d)
    for i in indices:
        M = M @ pi_matrix(i, d).entries
    return SymplecticMatrix._trusted(M)


def jmat(d: int) -> SymplecticMatrix:
    return SymplecticMatrix._trusted(standard_j(d))


def make_generator(kind: str, d: int, param=None) -> SymplecticMatrix:
    """Build a generator by name.

    ``kind`` is one of ``"UP"``, ``"VQ"``, ``"DL"`` (``param`` is the d x d
    block), ``"Pi"`` (``param`` is the 1-based index) or ``"J"``.
    """
    key = kind.upper()
    if key == "UP":
        return up(param, d)
    if key == "VQ":
        return vq(param, d)
    if key == "DL":
        return dl(param, d)
    if key == "PI":
        return pi_matrix(int(param), d)
    if key in ("J", "JMAT"):
        return jmat(d)
    raise ParameterError(f"unknown generator kind {kind!r}")


def invert_symplectic(S: SymplecticMatrix) -> SymplecticMatrix:
    """``S^{-1} = J^{-1} S^T J``; exact block form for upper block triangular input."""
    J = standard_j(S.d)
    return SymplecticMatrix._trusted(-J @ S.entries.T @ J)


def is_upper_block_triangular(S: SymplecticMatrix, tol: float | None = None) -> bool:
    if tol is None:
        tol = config.SYMPLECTIC_TOL * max(1.0, S.norm())
    return bool(np.max(np.abs(S.C)) <= tol)


def is_lower_block_triangular(S: SymplecticMatrix, tol: float | None = None) -> bool:
    if tol is None:
        tol = config.SYMPLECTIC_TOL * max(1.0, S.norm())
    return bool(np.max(np.abs(S.B)) <= tol)


# ------------------------------------------------------------- factorization


@dataclass(frozen=True, eq=False)
class Factorization:
    """``S = prod_{i in index_set} Pi_i @ V_Q @ D_L @ U_P``."""

    d: int
    index_set: tuple[int, ...]
    Q: np.ndarray
    L: np.ndarray
    P: np.ndarray

    def factors(self) -> list[tuple[str, SymplecticMatrix]]:
        """Generators in left-to-right product order."""
        out = [(f"Pi{i}", pi_matrix(i, self.d)) for i in self.index_set]
        out += [("VQ", vq(self.Q)), ("DL", dl(self.L)), ("UP", up(self.P))]
        return out

    def matrix(self) -> SymplecticMatrix:
        M = np.eye(2 * self.d)
        for _, G in self.factors():
            M = M @ G.entries
        return SymplecticMatrix._trusted(M)

    def reconstruction_error(self, S: SymplecticMatrix) -> float:
        """Relative error ``||prod - S|| / ||S||`` (spectral norm)."""
        return float(np.linalg.norm(self.matrix().entries - S.entries, 2) / S.norm())

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "index_set": list(self.index_set),
            "Q": self.Q.tolist(),
            "L": self.L.tolist(),
            "P": self.P.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Factorization":
        d = int(data["d"])
        Q = _symmetric(data["Q"], d, "Q")
        P = _symmetric(data["P"], d, "P")
        L = _square(data["L"], d, "L")
        dl(L)  # invertibility check
        idx = tuple(int(i) for i in data["index_set"])
        for i in idx:
            if not 1 <= i <= 2 * d:
                raise ParameterError(f"index {i} out of range 1..{2 * d}")
        return cls(d, idx, Q, L, P)

    @classmethod
    def identity(cls, d: int) -> "Factorization":
        Z = np.zeros((d, d))
        return cls(d, (), Z, np.eye(d), Z.copy())


def _index_sets(d: int) -> list[tuple[int, ...]]:
    subsets = itertools.chain.from_iterable(
        itertools.combinations(range(1, d + 1), r) for r in range(d + 1)
    )
    return sorted(subsets)


def _pivot_block(S: np.ndarray, d: int, idx: Sequence[int]) -> np.ndarray:
    # top-left block of (prod Pi_i)^{-1} S; rows in idx are replaced by -C rows
    top = S[:d, :d].copy()
    for i in idx:
        top[i - 1] = -S[d + i - 1, :d]
    return top


def _cond(M: np.ndarray) -> float:
    s = np.linalg.svd(M, compute_uv=False)
    return np.inf if s[-1] == 0 else float(s[0] / s[-1])


def _greedy_index_set(S: np.ndarray, d: int) -> tuple[int, ...]:
    # column-pivot style: for each coordinate keep the A-row or the C-row,
    # whichever has the larger component orthogonal to the rows kept so far
    basis = np.zeros((0, d))
    chosen = []
    for i in range(d):
        cands = [S[i, :d], -S[d + i, :d]]
        resid = []
        for c in cands:
            r = c - basis.T @ (basis @ c) if basis.size else c
            resid.append(r)
        norms = [np.linalg.norm(r) for r in resid]
        pick = 1 if norms[1] > norms[0] else 0
        if pick:
            chosen.append(i + 1)
        r = resid[pick]
        nr = np.linalg.norm(r)
        if nr > 0:
            basis = np.vstack([basis, r / nr])
    return tuple(chosen)


def select_index_set(S: SymplecticMatrix) -> tuple[int, ...]:
    """Deterministic choice of the quasi-permutation index set.

    Among subsets of ``{1..d}`` whose pivot block is well conditioned (within
    a fixed factor of the best achievable), the lexicographically smallest
    is returned.
    """
    d = S.d
    M = S.entries
    if d > _ENUMERATE_MAX_D:
        return _greedy_index_set(M, d)
    sets = _index_sets(d)
    conds = [_cond(_pivot_block(M, d, idx)) for idx in sets]
    best = min(conds)
    if not np.isfinite(best) or best > 1.0 / config.RANK_TOL:
        raise FactorizationError("no invertible pivot block within rank tolerance")
    limit = max(_COND_SLACK * best, _COND_FLOOR)
    for idx, c in zip(sets, conds):
        if c <= limit:
            return idx
    raise AssertionError("unreachable")


def factorize(S: SymplecticMatrix, tol: float = config.SYMPLECTIC_TOL) -> Factorization:
    """Write ``S = prod_{i in J} Pi_i V_Q D_L U_P``.

    Raises
    ------
    ValidationError
        ``S`` is not symplectic within ``tol``.
    FactorizationError
        No invertible pivot block, or the reconstruction misses ``tol * ||S||``.
    """
    if not isinstance(S, SymplecticMatrix):
        S = SymplecticMatrix(S, tol=tol)
    elif not is_symplectic(S.entries, _scaled_tol(S.entries, tol)):
        raise ValidationError("matrix is not symplectic")
    d = S.d
    idx = select_index_set(S)
    X = pi_product(idx, d).entries.T @ S.entries  # Pi's are orthogonal
    L = X[:d, :d]
    s = np.linalg.svd(L, compute_uv=False)
    if s[-1] <= config.RANK_TOL * max(1.0, S.norm()):
        raise FactorizationError("pivot block is numerically singular")
    P = np.linalg.solve(L, X[:d, d:])
    Q = np.linalg.solve(L.T, X[d:, :d].T).T
    P = 0.5 * (P + P.T)
    Q = 0.5 * (Q + Q.T)
    fact = Factorization(d, idx, Q, L.copy(), P)
    err = fact.reconstruction_error(S)
    if err > max(tol, 1e-9):
        raise FactorizationError(f"reconstruction error {err:.3e} exceeds tolerance")
    return fact


# ----------------------------------------------------------- special forms

PI_THEN_VQ = "pi_then_vq"
VQ_THEN_PI = "vq_then_pi"


@dataclass(frozen=True, eq=False)
class SpecialForm:
    """Reduced form ``S = residual @ encoded @ trailing``.

    ``encoded`` is ``prod_{i=k+1}^d Pi_i @ V_{Q'}`` (variant ``pi_then_vq``) or
    ``V_{Q'} @ prod_{i=k+1}^d Pi_i`` (variant ``vq_then_pi``). Both
    ``residual`` and ``trailing`` are upper block triangular, so they act as
    bounded automorphisms on every mixed-norm space.
    """

    variant: str
    k: int
    Qprime: np.ndarray
    residual: SymplecticMatrix
    trailing: SymplecticMatrix

    @property
    def d(self) -> int:
        return self.Qprime.shape[0]

    @property
    def pi_indices(self) -> tuple[int, ...]:
        return tuple(range(self.k + 1, self.d + 1))

    @property
    def encoded(self) -> SymplecticMatrix:
        pis = pi_product(self.pi_indices, self.d)
        V = vq(self.Qprime)
        return pis @ V if self.variant == PI_THEN_VQ else V @ pis

    @property
    def reduced_source(self) -> SymplecticMatrix:
        """The source matrix with the trailing bounded factor removed."""
        return self.residual @ self.encoded

    def reconstruct(self) -> SymplecticMatrix:
        return self.residual @ self.encoded @ self.trailing

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "k": self.k,
            "Qprime": self.Qprime.tolist(),
            "residual": self.residual.to_dict(),
            "trailing": self.trailing.to_dict(),
        }


def _normalize_indices(idx: Iterable[int], d: int):
    """Split an index set into (active coordinates, sign vector).

    Uses ``Pi_i Pi_{i+d} = I`` and ``Pi_{i+d} = diag(K, K) Pi_i`` where ``K``
    flips the sign of coordinate ``i``.
    """
    count = np.zeros(d, dtype=int)
    for i in idx:
        count[(i - 1) % d] += 1 if i <= d else -1
    signs = np.ones(d)
    active = []
    for j in range(d):
        c = count[j] % 4
        # Pi_j has order 4: Pi^2 = diag(-e_j), Pi^3 = Pi^T
        if c == 1:
            active.append(j)
        elif c == 2:
            signs[j] = -1.0
        elif c == 3:
            active.append(j)
            signs[j] = -1.0
    return active, signs


def _pi_then_vq(S: SymplecticMatrix, fact: Factorization) -> SpecialForm:
    d = S.d
    active, signs = _normalize_indices(fact.index_set, d)
    k = d - len(active)
    inactive = [j for j in range(d) if j not in active]
    # permutation R with R e_{target} = e_{source}; targets k..d-1 receive the active coordinates
    order = inactive + active
    R = np.zeros((d, d))
    for target, source in enumerate(order):
        R[source, target] = 1.0
    K = np.diag(signs)
    left = dl(K @ R)  # diag(K R, K R), R orthogonal so (KR)^{-T} = KR
    Qp = R.T @ fact.Q @ R
    Qp = 0.5 * (Qp + Qp.T)
    trailing = dl(R.T @ fact.L) @ up(fact.P)
    return SpecialForm(PI_THEN_VQ, k, Qp, left, trailing)


def reduce_special(
    S: SymplecticMatrix, variant: str = PI_THEN_VQ, tol: float = config.SYMPLECTIC_TOL
) -> SpecialForm:
    """Reduce ``S`` to ``residual @ (prod Pi_i V_{Q'} or V_{Q'} prod Pi_i) @ trailing``.

    ``k`` counts the coordinates untouched by quasi-permutations. For the
    ``vq_then_pi`` variant the reduction is applied to ``S^{-1}`` and the
    result inverted.
    """
    if variant == PI_THEN_VQ:
        return _pi_then_vq(S, factorize(S, tol))
    if variant != VQ_THEN_PI:
        raise ParameterError(f"unknown variant {variant!r}")
    d = S.d
    Sinv = invert_symplectic(S)
    inner = _pi_then_vq(Sinv, factorize(Sinv, tol))
    # S = trailing^{-1} V_{-Q} prod Pi^T residual^{-1}, and
    # prod_{i>k} Pi_i^T = prod_{i>k} Pi_i diag(I_k, -I_{d-k}, I_k, -I_{d-k})
    sgn = np.ones(d)
    sgn[inner.k :] = -1.0
    trailing = dl(np.diag(sgn)) @ invert_symplectic(inner.residual)
    return SpecialForm(
        VQ_THEN_PI,
        inner.k,
        -inner.Qprime,
        invert_symplectic(inner.trailing),
        trailing,
    )


def random_generator(rng: np.random.Generator, d: int, kinds=("UP", "VQ", "DL", "Pi")) -> SymplecticMatrix:
    """One random generator; parameters are O(1) so products stay well conditioned."""
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind in ("UP", "VQ"):
        M = rng.normal(size=(d, d))
        return make_generator(kind, d, 0.5 * (M + M.T))
    if kind == "DL":
        L = np.eye(d) + 0.5 * rng.normal(size=(d, d))
        while abs(np.linalg.det(L)) < 0.2:
            L = np.eye(d) + 0.5 * rng.normal(size=(d, d))
        return dl(L)
    return pi_matrix(int(rng.integers(1, 2 * d + 1)), d)


def random_symplectic(rng: np.random.Generator, d: int, length: int = 6) -> SymplecticMatrix:
    """Product of ``length`` random generators."""
    M = np.eye(2 * d)
    for _ in range(length):
        M = M @ random_generator(rng, d).entries
    return SymplecticMatrix._trusted(M)
