"""Epsilon sweeps of the Gaussian witness family and growth-exponent fits.

A sweep evaluates, for each ``eps`` on a geometric grid in ``eps - 1``,

    norm_base    = ||phi||_{p,q}            phi = f o W
    norm_dilated = ||phi o S^{-1}||_{p,q}

where ``f`` is the dilated-Gaussian profile and ``W`` a witness matrix
chosen from the reduced form of ``S`` (``witness="plain"`` uses ``W = I``).
The slope of ``log(norm_dilated / norm_base)`` against ``log(eps^2 - 1)``
over the upper (``eps -> inf``) or lower (``eps -> 1``) part of the grid is
compared with the predicted exponent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .classifier import Status, Verdict, blowup_exponent, classify_unweighted, classify_weighted
from .errors import DomainError, ParameterError
from .exponents import ExponentPair, format_exponent
from .gaussian import _is_zero, mixed_norm_dilated, witness_matrix
from .symplectic import (
    PI_THEN_VQ,
    VQ_THEN_PI,
    SymplecticMatrix,
    dl,
    invert_symplectic,
    is_upper_block_triangular,
    load_matrix,
    make_generator,
    pi_product,
    reduce_special,
    up,
    vq,
)
from .weights import WeightSpec, load_weight

SCHEMA_VERSION = 1
CSV_HEADER = ("eps", "norm_base", "norm_dilated", "ratio", "log_ratio")
UPPER, LOWER = "upper", "lower"


# ----------------------------------------------------------------- config


def build_matrix(source, base_dir=None) -> SymplecticMatrix:
    """Resolve a matrix source.

    Accepted forms: a JSON path; ``{"d", "rows"}``; a generator recipe
    ``{"generator": kind, "d": d, "param": ...}``; or
    ``{"product": [recipe, ...]}`` multiplied left to right.
    """
    if isinstance(source, SymplecticMatrix):
        return source
    if isinstance(source, (str, Path)):
        path = Path(source)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_matrix(path)
    if not isinstance(source, dict):
        raise ParameterError(f"cannot build a matrix from {type(source).__name__}")
    if "rows" in source:
        return SymplecticMatrix.from_dict(source)
    if "product" in source:
        factors = [build_matrix(item, base_dir) for item in source["product"]]
        if not factors:
            raise ParameterError("empty product")
        out = factors[0]
        for F in factors[1:]:
            out = out @ F
        return out
    if "generator" in source:
        return make_generator(str(source["generator"]), int(source["d"]), source.get("param"))
    raise ParameterError(f"unrecognized matrix recipe keys {sorted(source)}")


@dataclass
class SweepConfig:
    """Sweep parameters.

    The eps grid is ``1 + geomspace(eps_min - 1, eps_max - 1, eps_count)``;
    ``eps_min_offset`` (if set) overrides ``eps_min - 1`` so grids can reach
    ``eps - 1 = 1e-12`` without rounding.
    """

    matrix: object
    p: object = 1.0
    q: object = 2.0
    weight: object = None
    eps_min: float = 1.1
    eps_max: float = 100.0
    eps_count: int = 64
    eps_min_offset: float | None = None
    fit_window: float = 0.5
    regime: str = "auto"
    witness: str = "auto"
    fit_tol: float = field(default_factory=lambda: config.FIT_TOL)
    csv_path: str | None = None
    report_path: str | None = None

    def __post_init__(self):
        self.exponents = ExponentPair(self.p, self.q)
        if not 0 < self.fit_window <= 1:
            raise ParameterError("fit_window must lie in (0, 1]")
        if self.regime not in ("auto", UPPER, LOWER):
            raise ParameterError(f"regime must be auto, upper or lower, got {self.regime!r}")
        if self.witness not in ("auto", "plain"):
            raise ParameterError(f"witness must be auto or plain, got {self.witness!r}")
        if self.eps_count < 2:
            raise ParameterError("eps_count must be >= 2")
        lo, hi = self.offsets()
        if not (0 < lo < hi):
            raise DomainError("eps grid must satisfy 1 < eps_min < eps_max")

    def offsets(self) -> tuple[float, float]:
        lo = self.eps_min_offset if self.eps_min_offset is not None else self.eps_min - 1.0
        return float(lo), float(self.eps_max) - 1.0

    def eps_offsets(self) -> np.ndarray:
        lo, hi = self.offsets()
        return np.geomspace(lo, hi, int(self.eps_count))

    def to_dict(self) -> dict:
        out = {
            k: v
            for k, v in asdict(self).items()
            if k not in ("matrix", "weight", "p", "q")
        }
        m = self.matrix
        out["matrix"] = m.to_dict() if isinstance(m, SymplecticMatrix) else m
        w = self.weight
        out["weight"] = w.to_dict() if isinstance(w, WeightSpec) else w
        out.update(self.exponents.to_dict())
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ParameterError(f"unknown config keys {sorted(extra)}")
        if "matrix" not in data:
            raise ParameterError("config needs a 'matrix' entry")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        path = Path(path)
        with open(path) as fh:
            data = json.load(fh)
        cfg = cls.from_dict(data)
        cfg._base_dir = path.parent
        return cfg


def _resolve_weight(w, base_dir=None):
    if w is None or isinstance(w, WeightSpec):
        return w
    if isinstance(w, dict):
        return WeightSpec.from_dict(w)
    path = Path(w)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    return load_weight(path)


# --------------------------------------------------------------- witness


@dataclass(frozen=True, eq=False)
class WitnessPlan:
    """Witness matrix and the exponent/regime it predicts."""

    W: SymplecticMatrix
    case: str
    predicted: float
    regime: str
    k: int | None = None
    Qprime: np.ndarray | None = None
    variant: str | None = None


def plan_witness(S: SymplecticMatrix, e: ExponentPair, mode: str = "auto") -> WitnessPlan:
    """Pick the witness for ``S`` and the exponent its ratio should show.

    * bounded (``p == q`` or ``C = 0``): predicted 0, ``W = I``;
    * ``Q' = 0`` (Case 1): the signed exponent ``(d-k)(1/2p - 1/2q)``;
    * ``Q' != 0`` with ``k < d``: ``(d-k)|1/2p - 1/2q|`` as ``eps -> inf``;
    * ``Q' != 0`` with ``k = d``: ``-|1/2p - 1/2q| rank(Q')`` as ``eps -> 1``.

    ``p < q`` uses the ``pi_then_vq`` form and ``p > q`` the ``vq_then_pi``
    form.
    """
    d = S.d
    identity = SymplecticMatrix.identity(d)
    if e.equal or is_upper_block_triangular(S):
        return WitnessPlan(identity, "bounded", 0.0, UPPER)
    variant = PI_THEN_VQ if e.p < e.q else VQ_THEN_PI
    sf = reduce_special(S, variant)
    W = witness_matrix(sf) if mode == "auto" else identity
    a = abs(e.gap)
    if _is_zero(sf.Qprime):
        expo = blowup_exponent(d, sf.k, e)
        return WitnessPlan(W, "case1", expo, UPPER if expo > 0 else LOWER, sf.k, sf.Qprime, variant)
    case = "case2" if variant == PI_THEN_VQ else "case3"
    if sf.k < d:
        return WitnessPlan(W, case, (d - sf.k) * a, UPPER, sf.k, sf.Qprime, variant)
    rank = int(np.linalg.matrix_rank(sf.Qprime, tol=1e-10))
    return WitnessPlan(W, case, -a * rank, LOWER, sf.k, sf.Qprime, variant)


# ------------------------------------------------------------------ sweep


@dataclass
class SweepRow:
    eps: float
    norm_base: float
    norm_dilated: float
    ratio: float
    log_ratio: float
    eps_minus_one: float = 0.0


@dataclass
class SweepReport:
    rows: list
    fitted_exponent: float
    intercept: float
    predicted_exponent: float
    regime: str
    verdict: Verdict
    agreement: bool
    case: str = ""
    fit_tol: float = config.FIT_TOL
    config: dict = field(default_factory=dict)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([repr(float(x)) for x in (r.eps, r.norm_base, r.norm_dilated, r.ratio, r.log_ratio)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "fitted_exponent": self.fitted_exponent,
            "intercept": self.intercept,
            "predicted_exponent": self.predicted_exponent,
            "regime": self.regime,
            "case": self.case,
            "agreement": self.agreement,
            "fit_tol": self.fit_tol,
            "verdict": self.verdict.to_dict(),
            "n_points": len(self.rows),
            "config": self.config,
        }

    def write(self, csv_path=None, report_path=None) -> None:
        if csv_path:
            Path(csv_path).write_text(self.csv_text())
        if report_path:
            Path(report_path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def fit_exponent(log_u, log_ratio, window: float, regime: str) -> tuple[float, float]:
    """Least-squares slope and intercept over the upper or lower ``window`` fraction of ``log_u``."""
    x = np.asarray(log_u, dtype=float)
    y = np.asarray(log_ratio, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    if regime == UPPER:
        mask = x >= hi - window * (hi - lo) - 1e-12
    else:
        mask = x <= lo + window * (hi - lo) + 1e-12
    if mask.sum() < 2:
        raise ParameterError("fit window holds fewer than two grid points")
    slope, intercept = np.polyfit(x[mask], y[mask], 1)
    return float(slope), float(intercept)


def run_sweep(cfg: SweepConfig) -> SweepReport:
    base_dir = getattr(cfg, "_base_dir", None)
    S = build_matrix(cfg.matrix, base_dir)
    e = cfg.exponents
    weight = _resolve_weight(cfg.weight, base_dir)
    verdict = classify_weighted(S, e, weight) if weight is not None else classify_unweighted(S, e)
    plan = plan_witness(S, e, cfg.witness)
    Winv = invert_symplectic(plan.W)
    SW = S @ Winv
    rows, log_u = [], []
    for delta in cfg.eps_offsets():
        base = mixed_norm_dilated(Winv, None, e, eps_minus_one=delta)
        dil = mixed_norm_dilated(SW, None, e, eps_minus_one=delta)
        lr = dil.log_value - base.log_value
        rows.append(SweepRow(1.0 + delta, base.value, dil.value, math.exp(lr) if lr < 700 else math.inf, lr, delta))
        log_u.append(math.log(delta) + math.log(2.0 + delta))
    regime = plan.regime if cfg.regime == "auto" else cfg.regime
    slope, intercept = fit_exponent(log_u, [r.log_ratio for r in rows], cfg.fit_window, regime)
    predicted = plan.predicted if verdict.status is not Status.BOUNDED_AUTOMORPHISM else 0.0
    report = SweepReport(
        rows=rows,
        fitted_exponent=slope,
        intercept=intercept,
        predicted_exponent=predicted,
        regime=regime,
        verdict=verdict,
        agreement=abs(slope - predicted) <= cfg.fit_tol,
        case=plan.case,
        fit_tol=cfg.fit_tol,
        config=cfg.to_dict(),
    )
    report.write(cfg.csv_path, cfg.report_path)
    return report


# ----------------------------------------------------------------- corpus


def _random_upper(rng, d: int) -> SymplecticMatrix:
    P = rng.normal(size=(d, d))
    L = rng.normal(size=(d, d)) + 2.0 * np.eye(d)
    return up(0.5 * (P + P.T)) @ dl(L)


def witness_corpus(count: int = 60, seed: int = 0, dims=(1, 2)) -> list[tuple[str, SymplecticMatrix]]:
    """Random matrices whose reduced forms are known by construction.

    Cycles through upper block triangular ``U_P D_L``, Case-1 forms
    ``R prod Pi_i R'`` and Case-2 forms ``prod Pi_i V_Q`` with diagonal ``Q``
    (``|Q_ii|`` in ``[0.5, 2]``), for each dimension in ``dims``.
    """
    rng = np.random.default_rng(seed)
    kinds = ("upper", "case1", "case2")
    out = []
    for i in range(count):
        kind = kinds[i % 3]
        d = dims[(i // 3) % len(dims)]
        if kind == "upper":
            S = _random_upper(rng, d)
        else:
            k = int(rng.integers(0, d + 1)) if kind == "case2" else int(rng.integers(0, d))
            pis = pi_product(range(k + 1, d + 1), d)
            if kind == "case1":
                S = _random_upper(rng, d) @ pis @ _random_upper(rng, d)
            else:
                lam = rng.uniform(0.5, 2.0, size=d) * rng.choice([-1.0, 1.0], size=d)
                S = pis @ vq(np.diag(lam))
                if k == d and np.allclose(lam, 0):
                    continue
        out.append((f"{kind}-d{d}-{i}", S))
    return out
