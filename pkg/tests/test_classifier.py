from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import symplectic_matrices
from metaplectic.classifier import Reason, Status, blowup_exponent, classify_unweighted, classify_weighted
from metaplectic.errors import CapabilityError, DomainError
from metaplectic.exponents import ExponentPair, parse_exponent
from metaplectic.symplectic import dl, invert_symplectic, is_upper_block_triangular, jmat, reduce_special, up, vq
from metaplectic.weights import WeightSpec

INF = math.inf
pairs = st.sampled_from([(1, 2), (2, 1), (1, INF), (INF, 1), (2, 4), (3, 3), (INF, INF)])


def test_parse_exponent():
    assert parse_exponent("inf") == INF
    assert parse_exponent("∞") == INF
    assert parse_exponent("2.5") == 2.5
    with pytest.raises(ValueError):
        parse_exponent(0.5)
    with pytest.raises(ValueError):
        parse_exponent("nan")


def test_gap_uses_inverse_infinity_zero():
    assert ExponentPair(1, "inf").gap == 0.5
    assert ExponentPair("inf", "inf").gap == 0.0
    assert str(ExponentPair(1, INF)) == "(1.0, inf)"


def test_p_equals_q():
    v = classify_unweighted(jmat(2), ExponentPair(3, 3))
    assert (v.status, v.reason) == (Status.BOUNDED_AUTOMORPHISM, Reason.P_EQUALS_Q)


def test_swap_unbounded():
    v = classify_unweighted(jmat(1), ExponentPair(1, INF))
    assert (v.status, v.reason) == (Status.UNBOUNDED, Reason.NOT_UPPER_TRIANGULAR)
    assert v.k == 0
    assert v.exponent == pytest.approx(0.5)


def test_up_bounded():
    v = classify_unweighted(up([[1.0]]), ExponentPair(1, 2))
    assert (v.status, v.reason) == (Status.BOUNDED_AUTOMORPHISM, Reason.UPPER_BLOCK_TRIANGULAR)


@given(symplectic_matrices(), pairs)
def test_rule(S, pq):
    v = classify_unweighted(S, ExponentPair(*pq))
    bounded = pq[0] == pq[1] or is_upper_block_triangular(S)
    assert v.bounded == bounded
    assert v.status is not Status.INCONCLUSIVE


@given(symplectic_matrices(), pairs)
def test_inverse_invariance(S, pq):
    e = ExponentPair(*pq)
    assert classify_unweighted(S, e).status == classify_unweighted(invert_symplectic(S), e).status


@given(symplectic_matrices(), pairs)
def test_reduction_invariance(S, pq):
    e = ExponentPair(*pq)
    assert classify_unweighted(S, e).status == classify_unweighted(reduce_special(S).encoded, e).status


def test_p_equals_q_column():
    rng = np.random.default_rng(3)
    from metaplectic.symplectic import random_symplectic

    for _ in range(200):
        S = random_symplectic(rng, int(rng.integers(1, 4)))
        for p in (1, 2, 7.5, INF):
            assert classify_unweighted(S, ExponentPair(p, p)).status is Status.BOUNDED_AUTOMORPHISM


class TestBlowupExponent:
    def test_values(self):
        assert blowup_exponent(1, 0, ExponentPair(1, INF)) == pytest.approx(0.5)
        assert blowup_exponent(3, 3, ExponentPair(1, 2)) == 0
        assert blowup_exponent(2, 1, ExponentPair(2, 4)) == pytest.approx(0.125)

    def test_sign(self):
        assert blowup_exponent(1, 0, ExponentPair(2, 1)) == pytest.approx(-0.25)

    def test_degenerate(self):
        with pytest.raises(DomainError):
            blowup_exponent(2, 0, ExponentPair(2, 2))


class TestWeighted:
    def test_radial_matches_unweighted(self):
        v = classify_weighted(jmat(1), ExponentPair(1, 2), WeightSpec.radial_log(2, 1, 1))
        assert (v.status, v.reason) == (Status.UNBOUNDED, Reason.WEIGHT_EQUIVALENCE)

    def test_block_diagonal_spatial(self):
        # B = 0 and C = 0: equivalent weight and bounded
        S = dl([[2.0]])
        v = classify_weighted(S, ExponentPair(1, 2), WeightSpec.spatial(1, 1))
        assert (v.status, v.reason) == (Status.BOUNDED_AUTOMORPHISM, Reason.WEIGHT_EQUIVALENCE)

    def test_lower_triangular_spatial_follows_unweighted(self):
        v = classify_weighted(vq([[1.0]]), ExponentPair(1, 2), WeightSpec.spatial(1, 1))
        assert (v.status, v.reason) == (Status.UNBOUNDED, Reason.WEIGHT_EQUIVALENCE)

    def test_open_case(self):
        v = classify_weighted(jmat(1), ExponentPair(1, 2), WeightSpec.spatial(1, 1))
        assert (v.status, v.reason) == (Status.INCONCLUSIVE, Reason.OPEN_CASE)

    def test_frequency_with_upper_triangular(self):
        v = classify_weighted(up([[1.0]]), ExponentPair(1, 2), WeightSpec.frequency(2, 1))
        assert (v.status, v.reason) == (Status.BOUNDED_AUTOMORPHISM, Reason.WEIGHT_EQUIVALENCE)

    def test_unsupported(self):
        with pytest.raises(CapabilityError):
            classify_weighted(jmat(1), ExponentPair(1, 2), lambda z: 1.0)

    @given(symplectic_matrices(), pairs, st.floats(-3, 3), st.floats(-3, 3))
    def test_radial_always_transfers(self, S, pq, s, t):
        e = ExponentPair(*pq)
        w = WeightSpec.radial_log(s, t, S.d)
        assert classify_weighted(S, e, w).status == classify_unweighted(S, e).status

    @given(symplectic_matrices(), pairs, st.sampled_from([-2.0, 1.0]))
    def test_inconclusive_only_when_open(self, S, pq, s):
        e = ExponentPair(*pq)
        for w, block in ((WeightSpec.spatial(s, S.d), S.B), (WeightSpec.frequency(s, S.d), S.C)):
            v = classify_weighted(S, e, w)
            open_case = np.max(np.abs(block)) > 1e-9 * max(1.0, S.norm())
            assert (v.status is Status.INCONCLUSIVE) == open_case


def test_verdict_dict():
    d = classify_unweighted(jmat(2), ExponentPair(1, 2)).to_dict()
    assert d["status"] == "unbounded" and d["reason"] == "not_upper_triangular" and d["k"] == 0
