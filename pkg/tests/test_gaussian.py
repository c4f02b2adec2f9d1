from __future__ import annotations

import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from conftest import symplectic_matrices
from metaplectic.errors import DivergenceError, DomainError
from metaplectic.exponents import ExponentPair
from metaplectic.gaussian import (
    GaussianWitness,
    ambiguity_gaussian,
    case_ratio,
    gaussian_integral,
    log_gaussian_integral,
    mixed_norm_dilated,
    sigma_beta_omega,
    witness_matrix,
)
from metaplectic.symplectic import (
    PI_THEN_VQ,
    VQ_THEN_PI,
    SymplecticMatrix,
    dl,
    invert_symplectic,
    jmat,
    pi_product,
    random_symplectic,
    reduce_special,
    up,
    vq,
)

INF = math.inf
I1 = SymplecticMatrix.identity(1)


def quad_gaussian(A, beta):
    """Adaptive quadrature of exp(-pi x.Ax + 2 pi beta.x) (n = 1 or 2)."""
    A = np.asarray(A, float)
    beta = np.asarray(beta, float)
    # integrate around the peak to keep the adaptive rule on the mass
    c = np.linalg.solve(A, beta)
    if len(beta) == 1:
        f = lambda x: math.exp(-math.pi * A[0, 0] * x * x + 2 * math.pi * beta[0] * x)
        w = 12 / math.sqrt(A[0, 0])
        return integrate.quad(f, c[0] - w, c[0] + w, epsabs=0, epsrel=1e-12, limit=200)[0]
    f = lambda y, x: math.exp(
        -math.pi * (A[0, 0] * x * x + 2 * A[0, 1] * x * y + A[1, 1] * y * y) + 2 * math.pi * (beta[0] * x + beta[1] * y)
    )
    wx, wy = 12 / math.sqrt(min(np.linalg.eigvalsh(A))), 12 / math.sqrt(min(np.linalg.eigvalsh(A)))
    return integrate.dblquad(f, c[0] - wx, c[0] + wx, c[1] - wy, c[1] + wy, epsabs=0, epsrel=1e-11)[0]


class TestGaussianIntegral:
    def test_trivial(self):
        assert gaussian_integral([[1.0]], [0.0]) == pytest.approx(1.0)
        assert gaussian_integral([[2.0]], [0.0]) == pytest.approx(0.70710678, rel=1e-8)

    def test_shift(self):
        assert gaussian_integral([[1.0]], [1.0]) == pytest.approx(math.exp(math.pi), rel=1e-12)
        assert gaussian_integral([[1.0]], [1.0]) == pytest.approx(quad_gaussian([[1.0]], [1.0]), rel=1e-8)

    def test_divergent(self):
        with pytest.raises(DivergenceError):
            gaussian_integral([[0.0]], [0.0])
        with pytest.raises(DivergenceError):
            gaussian_integral([[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0])

    def test_quadrature_oracle(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for i in range(40):
            n = 1 + i % 2
            M = rng.normal(size=(n, n))
            A = M @ M.T + 0.3 * np.eye(n)
            beta = 0.5 * rng.normal(size=n)
            ref = quad_gaussian(A, beta)
            worst = max(worst, abs(gaussian_integral(A, beta) / ref - 1))
        assert worst <= 1e-8

    def test_log_form(self):
        A = np.diag([1e-3, 1e3])
        assert log_gaussian_integral(A, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


class TestAmbiguity:
    def test_origin(self):
        assert ambiguity_gaussian(2.0, 1, 0.0, 0.0) == pytest.approx(0.5)
        assert ambiguity_gaussian(math.sqrt(2), 1, 0.0, 0.0) == pytest.approx(2**-0.5)
        for d in (1, 2, 3):
            assert ambiguity_gaussian(1.7, d, np.zeros(d), np.zeros(d)) == 1.7**-d

    def test_quadrature(self):
        # A(f, g)(x, w) = int f(t + x/2) g(t - x/2) e^{-2 pi i w t} dt, f = g((eps^2-1)^{1/2} .)
        eps = 1.5
        u = eps**2 - 1
        for x, w in [(0.3, -0.2), (1.1, 0.7), (-0.5, 1.4)]:
            re = integrate.quad(
                lambda t: math.exp(-math.pi * u * (t + x / 2) ** 2 - math.pi * (t - x / 2) ** 2) * math.cos(2 * math.pi * w * t),
                -20, 20, epsabs=1e-14,
            )[0]
            im = integrate.quad(
                lambda t: -math.exp(-math.pi * u * (t + x / 2) ** 2 - math.pi * (t - x / 2) ** 2) * math.sin(2 * math.pi * w * t),
                -20, 20, epsabs=1e-14,
            )[0]
            assert abs(ambiguity_gaussian(eps, 1, x, w) - complex(re, im)) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            ambiguity_gaussian(1.0, 1, 0.0, 0.0)


class TestSigmaBetaOmega:
    def test_identity(self):
        w = GaussianWitness.from_matrix(SymplecticMatrix.identity(2), 1.5)
        tri = sigma_beta_omega(w)
        np.testing.assert_allclose(tri.Sigma, w.delta2 * np.eye(2))
        np.testing.assert_allclose(tri.beta, 0)
        np.testing.assert_allclose(tri.Omega, w.einv2 * np.eye(2))
        assert w.delta2 + w.einv2 == pytest.approx(1.0)

    def test_partial_swap(self):
        d, k = 3, 1
        Sinv = pi_product(range(k + 1, d + 1), d)
        w = GaussianWitness.from_matrix(invert_symplectic(Sinv), 2.0)
        tri = sigma_beta_omega(w)
        Ik = np.diag([1.0] * k + [0.0] * (d - k))
        np.testing.assert_allclose(tri.Sigma, w.delta2 * Ik + w.einv2 * (np.eye(d) - Ik), atol=1e-15)
        np.testing.assert_allclose(tri.beta, 0, atol=1e-15)
        np.testing.assert_allclose(tri.Omega, w.delta2 * (np.eye(d) - Ik) + w.einv2 * Ik, atol=1e-15)

    def test_chirp_k_eq_d(self):
        lam = np.array([0.7, -1.3])
        Sinv = vq(-np.diag(lam))
        w = GaussianWitness.from_matrix(invert_symplectic(Sinv), 1.8)
        tri = sigma_beta_omega(w)
        np.testing.assert_allclose(tri.Sigma, np.diag(1 - 1.8**-2 + lam**2 * 1.8**-2))

    @pytest.mark.parametrize("eps", [1.01, 1.5, 10.0])
    def test_positive_definite(self, eps):
        rng = np.random.default_rng(int(eps * 100))
        for i in range(500):
            S = random_symplectic(rng, 1 + i % 2)
            tri = sigma_beta_omega(GaussianWitness.from_matrix(S, eps))
            np.linalg.cholesky(tri.Sigma)
            np.linalg.cholesky(tri.Omega)
            assert tri.logdet_Omega == pytest.approx(np.linalg.slogdet(tri.Omega)[1], abs=1e-6)


def quad_mixed_norm(S, eps, p, q):
    """Iterated quadrature of ||f o S^{-1}||_{p,q}, d = 1."""
    w = GaussianWitness.from_matrix(S, eps)
    a, b, c, dd = (float(v) for v in w.Sinv.entries.ravel())
    dl2, e2 = w.delta2, w.einv2
    prof = lambda x, o: math.exp(-math.pi * dl2 * (a * x + b * o) ** 2 - math.pi * e2 * (c * x + dd * o) ** 2)
    tri = sigma_beta_omega(w)

    def inner(o):
        if p == INF:
            return prof(float(-tri.beta[0, 0] / tri.Sigma[0, 0] * o), o)
        c = -tri.beta[0, 0] / tri.Sigma[0, 0] * o
        return integrate.quad(lambda x: prof(x, o) ** p, c - 40, c + 40, epsabs=0, epsrel=1e-10, limit=100)[0] ** (1 / p)

    if q == INF:
        return inner(0.0)
    return integrate.quad(lambda o: inner(o) ** q, -40, 40, epsabs=0, epsrel=1e-9, limit=100)[0] ** (1 / q)


class TestMixedNorm:
    def test_identity_l2(self):
        assert mixed_norm_dilated(I1, math.sqrt(2), ExponentPair(2, 2)).value == pytest.approx(1.0)

    @pytest.mark.parametrize("eps", [1.2, 2.0, 7.0])
    def test_orthogonality_relation(self, eps):
        # |det E|^{-1} value = ||f||_2 ||g||_2 with f = g((eps^2-1)^{1/2} .)
        u = eps**2 - 1
        nf = math.sqrt(integrate.quad(lambda t: math.exp(-2 * math.pi * u * t * t), -30, 30)[0])
        ng = math.sqrt(integrate.quad(lambda t: math.exp(-2 * math.pi * t * t), -30, 30)[0])
        assert mixed_norm_dilated(I1, eps, ExponentPair(2, 2)).value / eps == pytest.approx(nf * ng, rel=1e-10)

    @pytest.mark.parametrize("pq", [(1, 2), (2, 1), (1, INF), (INF, 1), (3, 1.5)])
    def test_quadrature_oracle(self, pq):
        rng = np.random.default_rng(5)
        for _ in range(2):
            S = random_symplectic(rng, 1, 4)
            for eps in (1.3, 3.0):
                exact = mixed_norm_dilated(S, eps, ExponentPair(*pq)).value
                assert exact == pytest.approx(quad_mixed_norm(S, eps, *pq), rel=1e-7)

    def test_swap_growth(self):
        e = ExponentPair(1, INF)
        for eps in (1.1, 2.0, 30.0):
            r = mixed_norm_dilated(jmat(1), eps, e).value / mixed_norm_dilated(I1, eps, e).value
            assert r == pytest.approx(math.sqrt(eps**2 - 1), rel=1e-12)

    @given(symplectic_matrices(d=2), st.sampled_from([1.0, 2.0, 3.5, INF]))
    def test_p_equals_q_invariance(self, S, p):
        e = ExponentPair(p, p)
        for eps in (1.05, 2.0, 20.0):
            a = mixed_norm_dilated(S, eps, e).log_value
            b = mixed_norm_dilated(SymplecticMatrix.identity(2), eps, e).log_value
            assert a == pytest.approx(b, abs=1e-8)

    @given(st.integers(0, 2**31), st.sampled_from([(1, 2), (2, 1), (1, INF), (INF, 2)]))
    def test_upper_triangular_flat(self, seed, pq):
        rng = np.random.default_rng(seed)
        P = rng.normal(size=(2, 2))
        S = up(P + P.T) @ dl(rng.normal(size=(2, 2)) + 3 * np.eye(2))
        e = ExponentPair(*pq)
        I2 = SymplecticMatrix.identity(2)
        vals = [mixed_norm_dilated(S, eps, e).log_value - mixed_norm_dilated(I2, eps, e).log_value for eps in (1.01, 1.5, 10, 1e3)]
        assert np.ptp(vals) < 1e-8

    def test_extreme_eps_stays_finite(self):
        e = ExponentPair(1, 2)
        r = mixed_norm_dilated(jmat(2), None, e, eps_minus_one=1e-14)
        assert math.isfinite(r.log_value)
        r = mixed_norm_dilated(jmat(2), 1e150, e)
        assert math.isfinite(r.log_value)

    def test_domain(self):
        with pytest.raises(DomainError):
            mixed_norm_dilated(I1, 0.9, ExponentPair(1, 2))


class TestCaseRatio:
    def test_trivial(self):
        sf = reduce_special(up([[2.0]]))
        for eps in (1.01, 2, 50):
            assert case_ratio(sf, eps, ExponentPair(1, 2)).value == pytest.approx(1.0)
        assert case_ratio(reduce_special(jmat(1)), math.sqrt(2), ExponentPair(1, INF)).value == pytest.approx(1.0)

    def test_chirp_diverges(self):
        sf = reduce_special(vq([[1.0]]))
        e = ExponentPair(1, 2)
        lr = [case_ratio(sf, None, e, eps_minus_one=t).log_value for t in (1e-4, 1e-6, 1e-8)]
        assert lr[0] < lr[1] < lr[2]
        u = np.array([t * (2 + t) for t in (1e-4, 1e-6, 1e-8)])
        assert np.polyfit(np.log(u), lr, 1)[0] == pytest.approx(-0.25, abs=1e-3)

    def test_p_equals_q(self):
        with pytest.raises(DomainError):
            case_ratio(reduce_special(jmat(1)), 2.0, ExponentPair(2, 2))

    @pytest.mark.parametrize("pq", [(1, 2), (1, INF), (2, 4), (2, 1), (INF, 1)])
    def test_matches_witness_pair(self, pq):
        # ratio of ratios must be flat in eps for Case-1 and diagonal Case-2 forms
        e = ExponentPair(*pq)
        variant = PI_THEN_VQ if e.p < e.q else VQ_THEN_PI
        rng = np.random.default_rng(21)
        mats = [jmat(2), pi_product([2], 2), vq(np.diag([0.8, -1.5])), pi_product([2], 2) @ vq(np.diag([1.2, 0.6]))]
        for _ in range(4):
            P = rng.normal(size=(2, 2))
            R = up(P + P.T) @ dl(np.eye(2) + 0.3 * rng.normal(size=(2, 2)))
            mats.append(R @ pi_product([1], 2) @ vq(np.diag(rng.uniform(0.5, 2, 2))))
        grid = np.geomspace(1e-6, 1e4, 25)
        for S in mats:
            sf = reduce_special(S, variant)
            W = witness_matrix(sf)
            Winv = invert_symplectic(W)
            rr = []
            for t in grid:
                num = mixed_norm_dilated(S @ Winv, None, e, eps_minus_one=t).log_value
                den = mixed_norm_dilated(Winv, None, e, eps_minus_one=t).log_value
                rr.append(num - den - case_ratio(sf, None, e, eps_minus_one=t).log_value)
            assert np.ptp(np.exp(rr)) / np.exp(np.max(rr)) <= 0.02
