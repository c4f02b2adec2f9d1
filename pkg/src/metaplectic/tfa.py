"""Discrete time-frequency analysis on uniform grids.

Signals live on ``t_j = -T/2 + j h``, ``h = T/n``, in every axis; phase-space
fields use the same ``n`` and ``h`` for the ``x`` and ``w`` axes, ordered
``(x_1..x_d, w_1..w_d)``. All integrals are Riemann sums, which are
spectrally accurate for Schwartz-class inputs that are negligible at the
grid edge.

Metaplectic operators are realized only up to a unimodular constant. Every
comparison below uses ``A(Sf, Sg)``, where such constants cancel.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import GridError, ParameterError, TruncationWarning
from .exponents import ExponentPair
from .symplectic import Factorization, SymplecticMatrix, invert_symplectic
from .weights import WeightSpec, eval_weight


def _check_grid(n: int, T: float):
    if n < 2 or n & (n - 1):
        raise GridError(f"n must be a power of two >= 2, got {n}")
    if not T > 0:
        raise GridError("T must be positive")


def grid_axis(n: int, T: float) -> np.ndarray:
    return -T / 2 + (T / n) * np.arange(n)


@dataclass(frozen=True, eq=False)
class SampledSignal:
    d: int
    n: int
    T: float
    values: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        _check_grid(self.n, self.T)
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.n,) * self.d:
            raise GridError(f"values must have shape {(self.n,) * self.d}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise GridError("values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def spacing(self) -> float:
        return self.T / self.n

    @property
    def axis(self) -> np.ndarray:
        return grid_axis(self.n, self.T)

    def points(self) -> np.ndarray:
        """Grid coordinates, shape ``(n,)*d + (d,)``."""
        return np.stack(np.meshgrid(*([self.axis] * self.d), indexing="ij"), axis=-1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spacing**self.d))

    def inner(self, other: "SampledSignal") -> complex:
        _same_grid(self, other)
        return complex(np.sum(self.values * np.conj(other.values)) * self.spacing**self.d)

    def replace(self, values, truncated: bool | None = None) -> "SampledSignal":
        return SampledSignal(
            self.d, self.n, self.T, values, self.truncated if truncated is None else truncated
        )

    @classmethod
    def from_function(cls, func, d: int, n: int, T: float) -> "SampledSignal":
        """Sample ``func`` (called on points of shape ``(..., d)``)."""
        _check_grid(n, T)
        ax = grid_axis(n, T)
        pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)
        return cls(d, n, T, func(pts))


def gaussian_signal(d: int, n: int, T: float, scale: float = 1.0, center=None, freq=None) -> SampledSignal:
    """``exp(-pi scale^2 |t - c|^2 + 2 pi i freq.t)``."""
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    nu = np.zeros(d) if freq is None else np.asarray(freq, dtype=float)

    def f(t):
        r = t - c
        return np.exp(-math.pi * scale**2 * np.sum(r * r, axis=-1) + 2j * math.pi * (t @ nu))

    return SampledSignal.from_function(f, d, n, T)


@dataclass(frozen=True, eq=False)
class SampledField:
    d: int
    n: int
    T: float
    values: np.ndarray

    def __post_init__(self):
        _check_grid(self.n, self.T)
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.n,) * (2 * self.d):
            raise GridError(f"values must have shape {(self.n,) * (2 * self.d)}, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def spacing(self) -> float:
        return self.T / self.n

    @property
    def spacings(self) -> tuple[float, ...]:
        return (self.spacing,) * (2 * self.d)

    @property
    def cell_volume(self) -> float:
        return self.spacing ** (2 * self.d)

    @property
    def axis(self) -> np.ndarray:
        return grid_axis(self.n, self.T)

    def points(self) -> np.ndarray:
        """Phase-space coordinates, shape ``(n,)*2d + (2d,)``."""
        return np.stack(np.meshgrid(*([self.axis] * (2 * self.d)), indexing="ij"), axis=-1)

    def replace(self, values) -> "SampledField":
        return SampledField(self.d, self.n, self.T, values)

    @classmethod
    def from_function(cls, func, d: int, n: int, T: float) -> "SampledField":
        """Sample ``func(x, w)`` with ``x, w`` of shape ``(..., d)``."""
        _check_grid(n, T)
        ax = grid_axis(n, T)
        pts = np.stack(np.meshgrid(*([ax] * (2 * d)), indexing="ij"), axis=-1)
        return cls(d, n, T, func(pts[..., :d], pts[..., d:]))

    @classmethod
    def delta(cls, d: int, n: int, T: float) -> "SampledField":
        """Unit-mass discrete delta at the origin."""
        v = np.zeros((n,) * (2 * d), dtype=complex)
        v[(n // 2,) * (2 * d)] = 1.0 / (T / n) ** (2 * d)
        return cls(d, n, T, v)


def _same_grid(a, b):
    if (a.d, a.n, a.T) != (b.d, b.n, b.T):
        raise GridError(f"grid mismatch: (d,n,T)={(a.d, a.n, a.T)} vs {(b.d, b.n, b.T)}")


# ------------------------------------------------------------------ helpers


def _fourier_matrix(n: int, T: float, sign: int = -1) -> np.ndarray:
    """``h exp(sign 2 pi i xi_k t_j)``: Riemann-sum Fourier transform on the grid."""
    ax = grid_axis(n, T)
    return (T / n) * np.exp(sign * 2j * math.pi * np.outer(ax, ax))


def _apply_along(M: np.ndarray, v: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(M, v, axes=([1], [axis])), 0, axis)


def _shift_multipliers(m: int, h: float, shifts: np.ndarray) -> np.ndarray:
    """FFT multipliers realizing ``f(t) -> f(t + s)`` on a length-``m`` grid.

    The Nyquist bin gets ``cos`` so that real signals stay real.
    """
    nu = np.fft.fftfreq(m, d=h)
    ramp = np.exp(2j * math.pi * np.outer(shifts, nu))
    if m % 2 == 0:
        ramp[:, m // 2] = np.cos(2 * math.pi * shifts * nu[m // 2])
    return ramp


def _shifted_1d(v: np.ndarray, h: float, shifts: np.ndarray, axis: int) -> np.ndarray:
    """Band-limited shifts of ``v`` along ``axis``; new axis 0 indexes ``shifts``.

    The signal is zero-padded to twice its length first, so shifts up to a
    quarter of the window do not wrap around.
    """
    n = v.shape[axis]
    pad = [(0, 0)] * v.ndim
    pad[axis] = (n // 2, n // 2)
    vp = np.pad(v, pad)
    spec = np.fft.fft(vp, axis=axis)
    ramp = _shift_multipliers(2 * n, h, shifts)
    shape = [1] * v.ndim
    shape[axis] = 2 * n
    out = np.fft.ifft(spec[None, ...] * ramp.reshape((len(shifts),) + tuple(shape)), axis=axis + 1)
    sl = [slice(None)] * (v.ndim + 1)
    sl[axis + 1] = slice(n // 2, n // 2 + n)
    return out[tuple(sl)]


# ------------------------------------------------------------- ambiguity


def discrete_ambiguity(f: SampledSignal, g: SampledSignal) -> SampledField:
    """``A(f, g)(x, w) = int f(t + x/2) conj(g(t - x/2)) e^{-2 pi i w.t} dt`` on the grid.

    Half-sample shifts are applied as frequency-domain phase ramps; the
    ``t -> w`` sum is a dense Riemann-sum Fourier transform per axis.

    The frequency axis reaches ``T/2`` while the samples repeat with period
    ``1/h = n/T`` in frequency, so grids with ``T^2 >= 2n`` alias the
    zero-frequency content onto the grid and are rejected.
    """
    _same_grid(f, g)
    d, n, T, h = f.d, f.n, f.T, f.spacing
    if T * T >= 2 * n:
        raise GridError(f"grid n={n}, T={T} aliases in frequency (need T^2 < 2n)")
    ax = f.axis
    F = _fourier_matrix(n, T, -1)

    def level(fv, gv, k):
        # shift axis k for every x_k; recurse so that peak memory stays O(n^{d+1})
        fs = _shifted_1d(fv, h, ax / 2, axis=k)
        gs = _shifted_1d(gv, h, -ax / 2, axis=k)
        if k == d - 1:
            prod = fs * np.conj(gs)
            for j in range(d):
                prod = _apply_along(F, prod, j + 1)
            return prod
        return np.stack([level(fs[i], gs[i], k + 1) for i in range(n)])

    vals = level(np.asarray(f.values), np.asarray(g.values), 0)
    return SampledField(d, n, T, vals)


# ------------------------------------------------------ metaplectic actions


def _partial_ft(v: np.ndarray, n: int, T: float, axis: int, inverse: bool) -> np.ndarray:
    return _apply_along(_fourier_matrix(n, T, +1 if inverse else -1), v, axis)


def _chirp(f: SampledSignal, Q: np.ndarray) -> np.ndarray:
    t = f.points()
    return np.exp(1j * math.pi * np.einsum("...i,ij,...j->...", t, Q, t))


def _trig_interpolate(v: np.ndarray, n: int, T: float, pts: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of grid values ``v`` at ``pts`` (shape ``(m, d)``)."""
    d = v.ndim
    h = T / n
    coef = np.fft.fftn(v) / n**d
    freqs = np.fft.fftfreq(n) * n  # integer frequencies, Nyquist at -n/2
    out = np.empty(pts.shape[0], dtype=complex)
    chunk = max(1, 2**22 // n**d)
    for start in range(0, pts.shape[0], chunk):
        p = pts[start : start + chunk]
        # position in samples relative to t_0
        u = (p + T / 2) / h
        E = [np.exp(2j * math.pi * np.outer(u[:, k], freqs) / n) for k in range(d)]
        for k in range(d):
            E[k][:, n // 2] = np.cos(2 * math.pi * u[:, k] * freqs[n // 2] / n)
        R = E[0] @ coef.reshape(n, -1)
        for k in range(1, d):
            R = np.einsum("pab,pa->pb", R.reshape(len(p), n, -1), E[k])
        out[start : start + chunk] = R.reshape(len(p))
    return out


def resample(f: SampledSignal, M: np.ndarray, scale: float = 1.0) -> SampledSignal:
    """``scale * f(M t)`` on the grid of ``f``.

    Points of ``M t`` that land on grid nodes are gathered exactly; otherwise
    band-limited interpolation is used. Points outside the grid support are
    set to 0 and the result is flagged ``truncated``; a
    :class:`TruncationWarning` is issued when the signal is not negligible at
    the grid edge (so the zero fill actually loses mass).
    """
    d, n, T, h = f.d, f.n, f.T, f.spacing
    pts = f.points().reshape(-1, d) @ np.asarray(M, dtype=float).T
    idx = (pts + T / 2) / h
    inside = np.all((idx > -1e-9) & (idx < n - 1 + 1e-9), axis=1)
    out = np.zeros(pts.shape[0], dtype=complex)
    rounded = np.rint(idx)
    if np.all(np.abs(idx - rounded)[inside] <= 1e-9):
        ii = rounded[inside].astype(int)
        out[inside] = f.values[tuple(ii.T)]
    else:
        out[inside] = _trig_interpolate(np.asarray(f.values), n, T, pts[inside])
    truncated = bool(not np.all(inside))
    if truncated and _edge_mass(f) > 1e-10:
        warnings.warn("resampling left the grid support; values set to zero", TruncationWarning, stacklevel=2)
    return f.replace(scale * out.reshape((n,) * d), truncated=f.truncated or truncated)


def _edge_mass(f: SampledSignal) -> float:
    v = np.abs(f.values)
    peak = float(np.max(v)) or 1.0
    edge = 0.0
    for k in range(f.d):
        edge = max(edge, float(np.max(np.take(v, [0, -1], axis=k))))
    return edge / peak


def apply_pi(f: SampledSignal, i: int) -> SampledSignal:
    """``Pi_i`` acts as the forward partial Fourier transform in axis ``i``; ``Pi_{i+d}`` as its inverse."""
    d = f.d
    if not 1 <= i <= 2 * d:
        raise ParameterError(f"quasi-permutation index must lie in 1..{2 * d}")
    axis = (i - 1) % d
    return f.replace(_partial_ft(np.asarray(f.values), f.n, f.T, axis, inverse=i > d))


def apply_vq(f: SampledSignal, Q) -> SampledSignal:
    """Chirp multiplication ``e^{pi i t.Qt} f``."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if not np.any(Q):
        return f
    return f.replace(f.values * _chirp(f, Q))


def apply_dl(f: SampledSignal, L) -> SampledSignal:
    """Unitary dilation ``|det L|^{-1/2} f(L^{-1} t)``."""
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if np.allclose(L, np.eye(f.d), rtol=0, atol=1e-15):
        return f
    return resample(f, np.linalg.inv(L), abs(np.linalg.det(L)) ** -0.5)


def apply_up(f: SampledSignal, P) -> SampledSignal:
    """``U_P = F V_{-P} F^{-1}``: multiplication by ``e^{-pi i xi.P xi}`` on the Fourier side."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if not np.any(P):
        return f
    v = np.asarray(f.values)
    for k in range(f.d):
        v = _partial_ft(v, f.n, f.T, k, inverse=True)
    v = v * _chirp(f, -P)
    for k in range(f.d):
        v = _partial_ft(v, f.n, f.T, k, inverse=False)
    return f.replace(v)


def apply_metaplectic(fact: Factorization, f: SampledSignal) -> SampledSignal:
    """Apply ``prod Pi_i V_Q D_L U_P`` to ``f``, right to left.

    The result is determined up to a unimodular constant (the double-cover
    sign and the normalization of the partial Fourier transforms).
    """
    if fact.d != f.d:
        raise GridError("factorization and signal dimensions differ")
    out = apply_up(f, fact.P)
    out = apply_dl(out, fact.L)
    out = apply_vq(out, fact.Q)
    for i in reversed(fact.index_set):
        out = apply_pi(out, i)
    return out


# ------------------------------------------------------------------ norms


def mixed_grid_norm(F: SampledField, e: ExponentPair, w: WeightSpec | None = None) -> float:
    """Riemann-sum ``L^{p,q}_m`` norm: ``l^p`` over the ``x`` axes, then ``l^q`` over ``w``."""
    d, h = F.d, F.spacing
    a = np.abs(np.asarray(F.values))
    if w is not None:
        if w.d != d:
            raise ParameterError("weight and field dimensions differ")
        a = a * eval_weight(w, F.points())
    xa = tuple(range(d))
    inner = np.max(a, axis=xa) if math.isinf(e.p) else (np.sum(a**e.p, axis=xa) * h**d) ** (1 / e.p)
    if math.isinf(e.q):
        return float(np.max(inner))
    return float((np.sum(inner**e.q) * h**d) ** (1 / e.q))


# ----------------------------------------------- twisted convolution et al.


def twisted_convolution(F: SampledField, G: SampledField) -> SampledField:
    """``(F # G)(l) = sum_g F(g) G(l - g) e^{pi i [g, l]} h^{2d}``, ``[g, l] = l_x.g_w - g_x.l_w``.

    ``G(l - g)`` is taken as 0 when ``l - g`` leaves the grid. Each output
    ``x``-slice is one FFT convolution over the frequency axes, batched over
    the summation ``x``-index.
    """
    _same_grid(F, G)
    d, n, h = F.d, F.n, F.spacing
    ax = F.axis
    Fv = np.asarray(F.values).reshape((n**d,) + (n,) * d)
    Gv = np.asarray(G.values)
    xs = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    ws = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)  # (n,)*d + (d,)
    xidx = np.stack(np.meshgrid(*([np.arange(n)] * d), indexing="ij"), axis=-1).reshape(-1, d)
    fft_shape = (2 * n,) * d
    waxes = tuple(range(1, d + 1))
    out = np.zeros((n**d,) + (n,) * d, dtype=complex)
    centre = tuple(slice(n // 2, n // 2 + n) for _ in range(d))
    for li in range(n**d):
        lx = xs[li]
        diff = xidx[li][None, :] - xidx + n // 2  # index of l_x - g_x
        valid = np.all((diff >= 0) & (diff < n), axis=1)
        if not np.any(valid):
            continue
        Gsel = Gv[tuple(diff[valid].T)]  # (m, n..)
        Fmod = Fv[valid] * np.exp(1j * math.pi * (ws @ lx))[None, ...]
        conv = np.fft.ifftn(
            np.fft.fftn(Fmod, s=fft_shape, axes=waxes) * np.fft.fftn(Gsel, s=fft_shape, axes=waxes),
            axes=waxes,
        )[(slice(None),) + centre]
        phase = np.exp(-1j * math.pi * np.einsum("md,...d->m...", xs[valid], ws))
        out[li] = np.sum(conv * phase, axis=0)
    return F.replace(out.reshape((n,) * (2 * d)) * h ** (2 * d))


def toeplitz_apply(a: SampledField, g: SampledSignal, f: SampledSignal) -> SampledSignal:
    """Localization operator ``Tp_g(a) f = int a A(f, g)(x, w) pi(x, w) g dx dw``.

    ``pi(x, w) g(t) = e^{2 pi i w.(t - x/2)} g(t - x)`` is the symmetric
    time-frequency shift for which ``A(f, g)(x, w) = <f, pi(x, w) g>``, so
    ``a = 1`` gives ``||g||^2 f``.
    """
    _same_grid(f, g)
    if (a.d, a.n, a.T) != (f.d, f.n, f.T):
        raise GridError("symbol grid does not match the signal grid")
    if g.norm() ** 2 <= 1e-300:
        raise ParameterError("degenerate window: <g, g> is zero")
    d, n, T, h = f.d, f.n, f.T, f.spacing
    ax = f.axis
    coeff = np.asarray(a.values) * np.asarray(discrete_ambiguity(f, g).values)
    # e^{-pi i w.x}: separable over axes
    for k in range(d):
        shape = [1] * (2 * d)
        shape[k] = n
        shape[d + k] = n
        coeff = coeff * np.exp(-1j * math.pi * np.outer(ax, ax)).reshape(shape)
    # sum over w of coeff e^{2 pi i w.t} -> indexed (x, t)
    E = np.exp(2j * math.pi * np.outer(ax, ax))  # [w, t]
    for k in range(d):
        coeff = _apply_along(E.T, coeff, d + k)
    coeff = coeff.reshape((n**d,) + (n,) * d)
    gv = np.asarray(g.values)
    tidx = np.stack(np.meshgrid(*([np.arange(n)] * d), indexing="ij"), axis=-1).reshape(-1, d)
    out = np.zeros((n,) * d, dtype=complex)
    for xi in range(n**d):
        xidx = tidx[xi]
        # g(t - x): index j_t - j_x + n/2
        sl_src, sl_dst = [], []
        for k in range(d):
            off = n // 2 - xidx[k]
            lo, hi = max(0, -off), min(n, n - off)
            if lo >= hi:
                break
            sl_dst.append(slice(lo, hi))
            sl_src.append(slice(lo + off, hi + off))
        else:
            block = np.zeros((n,) * d, dtype=complex)
            block[tuple(sl_dst)] = gv[tuple(sl_src)]
            out += coeff[xi] * block
    return f.replace(out * h ** (2 * d))


# ---------------------------------------------------------- covariance


def compose_field(F: SampledField, M: np.ndarray, order: int = 3) -> SampledField:
    """``F(M l)`` on the grid, by cubic spline interpolation (exact gather on grid nodes).

    Points outside the grid evaluate to 0.
    """
    d, n, T, h = F.d, F.n, F.T, F.spacing
    pts = F.points().reshape(-1, 2 * d) @ np.asarray(M, dtype=float).T
    idx = (pts + T / 2) / h
    rounded = np.rint(idx)
    v = np.asarray(F.values)
    if np.all(np.abs(idx - rounded) <= 1e-9):
        ii = rounded.astype(int)
        inside = np.all((ii >= 0) & (ii < n), axis=1)
        out = np.zeros(len(ii), dtype=complex)
        out[inside] = v[tuple(ii[inside].T)]
    else:
        coords = idx.T
        out = ndimage.map_coordinates(v.real, coords, order=order, mode="constant", cval=0.0) + 1j * (
            ndimage.map_coordinates(v.imag, coords, order=order, mode="constant", cval=0.0)
        )
    return F.replace(out.reshape((n,) * (2 * d)))


def check_symplectic_covariance(f: SampledSignal, g: SampledSignal, fact: Factorization) -> float:
    """``max_l |A(S f, S g)(l) - A(f, g)(S^{-1} l)|`` over the phase-space grid."""
    S = fact.matrix()
    lhs = discrete_ambiguity(apply_metaplectic(fact, f), apply_metaplectic(fact, g))
    rhs = compose_field(discrete_ambiguity(f, g), invert_symplectic(S).entries)
    return float(np.max(np.abs(np.asarray(lhs.values) - np.asarray(rhs.values))))


# -------------------------------------------------------------- storage


def save_array(obj, path) -> None:
    """Write ``path`` (little-endian interleaved complex128) and ``path.json`` ({d, n, T})."""
    path = Path(path)
    np.asarray(obj.values, dtype="<c16").tofile(path)
    meta = {"d": obj.d, "n": obj.n, "T": obj.T}
    if isinstance(obj, SampledField):
        meta["kind"] = "field"
    else:
        meta["kind"] = "signal"
    path.with_name(path.name + ".json").write_text(json.dumps(meta))


def load_array(path):
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    d, n, T = int(meta["d"]), int(meta["n"]), float(meta["T"])
    kind = meta.get("kind", "signal")
    rank = 2 * d if kind == "field" else d
    raw = np.fromfile(path, dtype="<c16")
    if raw.size != n**rank:
        raise GridError(f"expected {n ** rank} samples, found {raw.size}")
    values = raw.reshape((n,) * rank)
    if kind == "field":
        return SampledField(d, n, T, values)
    return SampledSignal(d, n, T, values)
