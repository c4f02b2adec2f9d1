from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from metaplectic.classifier import Status
from metaplectic.errors import DomainError, ParameterError
from metaplectic.harness import (
    CSV_HEADER,
    SweepConfig,
    build_matrix,
    fit_exponent,
    plan_witness,
    run_sweep,
    witness_corpus,
)
from metaplectic.exponents import ExponentPair
from metaplectic.symplectic import dl, jmat, up, vq

INF = math.inf
PAIRS = [(1, 2), (2, 1), (1, INF), (INF, 1), (2, 4)]


def test_swap_exponent():
    r = run_sweep(SweepConfig(matrix={"generator": "J", "d": 1}, p=1, q="inf", eps_min=1.1, eps_max=100))
    assert r.fitted_exponent == pytest.approx(0.5, abs=0.02)
    assert r.predicted_exponent == 0.5
    assert r.agreement and r.verdict.status is Status.UNBOUNDED


def test_upper_triangular_flat():
    S = up([[0.7]]) @ dl([[1.8]])
    r = run_sweep(SweepConfig(matrix=S, p=1, q=2))
    assert abs(r.fitted_exponent) <= 0.02
    assert r.agreement and r.verdict.bounded


def test_chirp_diverges_at_one():
    cfg = SweepConfig(matrix={"generator": "VQ", "d": 1, "param": [[1.0]]}, p=1, q=2, eps_min_offset=1e-10, eps_max=1.01)
    r = run_sweep(cfg)
    assert r.regime == "lower"
    lr = [row.log_ratio for row in r.rows]
    assert lr[0] > lr[-1] + 3  # grows without bound as eps -> 1
    assert r.fitted_exponent == pytest.approx(-0.25, abs=0.02)


def test_plain_witness_for_swap_matches():
    cfg = SweepConfig(matrix={"generator": "J", "d": 1}, p=1, q="inf", witness="plain")
    assert run_sweep(cfg).fitted_exponent == pytest.approx(0.5, abs=1e-9)


def test_p_equals_q_predicts_zero():
    r = run_sweep(SweepConfig(matrix={"generator": "J", "d": 2}, p=2, q=2))
    assert r.predicted_exponent == 0 and abs(r.fitted_exponent) < 1e-9


def test_plan_witness_cases():
    assert plan_witness(up([[1.0]]), ExponentPair(1, 2)).case == "bounded"
    assert plan_witness(jmat(2), ExponentPair(1, 2)).case == "case1"
    plan = plan_witness(vq([[2.0]]), ExponentPair(1, 2))
    assert (plan.case, plan.regime, plan.predicted) == ("case2", "lower", -0.25)
    plan = plan_witness(vq([[2.0]]), ExponentPair(2, 1))
    assert (plan.case, plan.regime, plan.predicted) == ("case3", "lower", -0.25)


def test_corpus_agreement():
    corpus = witness_corpus(60, seed=1)
    assert len(corpus) >= 50
    for _, S in corpus:
        for pq in PAIRS:
            cfg = SweepConfig(matrix=S, p=pq[0], q=pq[1], eps_min_offset=1e-12, eps_max=1e8, eps_count=60, fit_window=0.25)
            r = run_sweep(cfg)
            assert r.agreement, (pq, r.case, r.fitted_exponent, r.predicted_exponent)
            if r.verdict.status is Status.UNBOUNDED:
                assert abs(r.fitted_exponent) > 0.05
            else:
                assert abs(r.fitted_exponent) <= 0.02


def test_csv_and_report(tmp_path):
    cfg = SweepConfig(
        matrix={"generator": "J", "d": 1}, p=1, q="inf", eps_count=10,
        csv_path=str(tmp_path / "a.csv"), report_path=str(tmp_path / "a.json"),
    )
    run_sweep(cfg)
    rows = list(csv.reader(open(tmp_path / "a.csv")))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 11
    eps = [float(r[0]) for r in rows[1:]]
    assert all(e > 1 for e in eps) and eps == sorted(eps)
    report = json.loads((tmp_path / "a.json").read_text())
    assert report["schema"] == 1
    assert report["verdict"]["status"] == "unbounded"


def test_deterministic_csv(tmp_path):
    S = witness_corpus(6, seed=3)[4][1]
    texts = []
    for i in range(2):
        cfg = SweepConfig(matrix=S, p=2, q=1, csv_path=str(tmp_path / f"{i}.csv"))
        run_sweep(cfg)
        texts.append((tmp_path / f"{i}.csv").read_bytes())
    assert texts[0] == texts[1]


def test_config_file(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps(jmat(1).to_dict()))
    (tmp_path / "cfg.json").write_text(json.dumps({"matrix": "m.json", "p": 1, "q": "inf", "eps_count": 8}))
    r = run_sweep(SweepConfig.load(tmp_path / "cfg.json"))
    assert r.agreement


def test_weighted_sweep_uses_weighted_verdict():
    r = run_sweep(SweepConfig(matrix={"generator": "J", "d": 1}, p=1, q=2, weight={"family": "spatial", "s": 1, "d": 1}))
    assert r.verdict.status is Status.INCONCLUSIVE


def test_bad_configs():
    with pytest.raises(DomainError):
        SweepConfig(matrix={"generator": "J", "d": 1}, eps_min=0.5)
    with pytest.raises(ParameterError):
        SweepConfig(matrix={"generator": "J", "d": 1}, fit_window=0)
    with pytest.raises(ParameterError):
        SweepConfig.from_dict({"matrix": {"generator": "J", "d": 1}, "colour": 3})
    with pytest.raises(ParameterError):
        build_matrix({"nope": 1})


def test_fit_exponent_windows():
    x = np.linspace(-10, 10, 41)
    y = np.where(x > 0, 2 * x, -x)
    assert fit_exponent(x, y, 0.5, "upper")[0] == pytest.approx(2)
    assert fit_exponent(x, y, 0.5, "lower")[0] == pytest.approx(-1)


def test_product_recipe():
    S = build_matrix({"product": [{"generator": "UP", "d": 1, "param": [[1]]}, {"generator": "J", "d": 1}]})
    np.testing.assert_allclose(S.entries, (up([[1.0]]) @ jmat(1)).entries)


def test_partial_swap_exponent_matches_closed_form():
    # d = 2, k = 1, (p, q) = (2, 4): (d - k)(1/2p - 1/2q) = 1/4 - 1/8 = 0.125
    from metaplectic.classifier import blowup_exponent
    from metaplectic.symplectic import pi_product

    r = run_sweep(SweepConfig(matrix=pi_product([2], 2), p=2, q=4, eps_min=1.1, eps_max=100.0))
    assert r.fitted_exponent == pytest.approx(0.125, abs=0.01)
    assert r.predicted_exponent == pytest.approx(blowup_exponent(2, 1, ExponentPair(2, 4)))
    assert r.agreement
