"""Closed-form logical-failure predictors and the random-walk oracle.

Every predictor evaluates a leading-order perturbative formula of the form

    P(n) = A * n + B * (n**2 - n)

with coefficients built from the code's malignant-set counts (a_d, b_d) and
the noise distribution's moments.  Counts are taken as inputs rather than
assuming repetition-code closed forms, so surface-code predictions use
enumerated values.  Predictions are clipped to [0, 1] and carry a validity
horizon: the perturbative truncation degrades once n * sqrt(A) exceeds ~0.1.

``walk_oracle`` Monte-Carlo simulates the passive-correction picture: the
coherent logical amplitude performs a run-reversing random walk whose run
lengths are geometric with mean 1/p.  With the default independent run
directions its expectation equals the closed-form passive rate
n * (E[|a|^2] + ((2-2p)/p) * E[|a|]**2) exactly; the strictly alternating
convention is also available and yields the smaller (1-p)/p cross-run
coefficient (the two differ by the squared run mean).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .engine import AlphaDistribution
from .noise import AngleDistribution, distribution_moment


def double_factorial(m: int) -> int:
    """m!! = m (m-2) (m-4) ... 1, with (-1)!! = 0!! = 1."""
    if m < -1:
        raise ValueError("double factorial defined for m >= -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


@dataclass(frozen=True)
class PredictionInput:
    """Scalar inputs shared by the predictors; unused fields may stay None."""

    d: int
    a_d: int
    b_d: int
    n_cycles: int
    mu: Optional[float] = None
    sigma: Optional[float] = None
    dist: Optional[AngleDistribution] = None
    p: Optional[float] = None

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError("distance must be odd and >= 3")
        if self.n_cycles < 0:
            raise ValueError("cycle count must be nonnegative")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError("probability must lie in [0, 1]")

    def moments(self) -> tuple[float, float]:
        if self.mu is None or self.sigma is None:
            raise ValueError("this predictor needs mu and sigma")
        return self.mu, self.sigma

    def distribution(self) -> AngleDistribution:
        if self.dist is not None:
            return self.dist
        mu, sigma = self.moments()
        if sigma == 0.0:
            return AngleDistribution("constant", mu, 0.0)
        return AngleDistribution("normal", mu, sigma)


@dataclass(frozen=True)
class PredictedCurve:
    """P(n) = A n + B (n^2 - n) on n = 1..n_cycles, clipped to [0, 1]."""

    cycles: np.ndarray
    values: np.ndarray
    A: float
    B: float
    validity_n: Optional[int]  # horizon where n*sqrt(A) reaches 0.1; None if A == 0
    clipped: bool

    def value_at(self, n: int) -> float:
        return min(max(self.A * n + self.B * (n * n - n), 0.0), 1.0)


def _curve(A: float, B: float, n_cycles: int) -> PredictedCurve:
    n = np.arange(1, n_cycles + 1, dtype=np.float64)
    raw = A * n + B * (n * n - n)
    values = np.clip(raw, 0.0, 1.0)
    validity = int(0.1 / np.sqrt(A)) if A > 0 else None
    return PredictedCurve(
        cycles=n.astype(np.int64),
        values=values,
        A=A,
        B=B,
        validity_n=validity,
        clipped=bool(np.any(raw != values)),
    )


def _require_p(inp: PredictionInput) -> float:
    if inp.p is None or inp.p <= 0.0:
        raise ValueError(
            "passive predictors need the orthogonal flip probability p > 0 "
            "(with p = 0 the walk never reverses; use the active predictor)"
        )
    return inp.p


def predict_active_ln(inp: PredictionInput) -> PredictedCurve:
    """Active correction, i.i.d. per-qubit rotations with mean mu and std sigma."""
    mu, sigma = inp.moments()
    A = inp.a_d * (mu**2 + sigma**2) ** ((inp.d + 1) / 2)
    B = inp.b_d * mu ** (2 * inp.d)
    return _curve(A, B, inp.n_cycles)


def predict_active_gn(inp: PredictionInput) -> PredictedCurve:
    """Active correction, one shared rotation angle per cycle."""
    dist = inp.distribution()
    A = inp.a_d * distribution_moment(dist, inp.d + 1)
    B = inp.b_d * distribution_moment(dist, inp.d) ** 2
    return _curve(A, B, inp.n_cycles)


def predict_discrete(inp: PredictionInput) -> PredictedCurve:
    """Independent per-qubit flips with probability p; purely linear."""
    p = inp.p
    if p is None:
        raise ValueError("discrete predictor needs p")
    A = inp.a_d * p ** ((inp.d + 1) / 2)
    return _curve(A, 0.0, inp.n_cycles)


def predict_passive_ln(inp: PredictionInput) -> PredictedCurve:
    """Passive correction of local rotations with orthogonal flips at rate p."""
    mu, sigma = inp.moments()
    p = _require_p(inp)
    A = inp.a_d * (mu**2 + sigma**2) ** ((inp.d + 1) / 2) + (
        (2.0 - 2.0 * p) / p
    ) * inp.b_d * mu ** (2 * inp.d)
    return _curve(A, 0.0, inp.n_cycles)


def predict_passive_gn(inp: PredictionInput) -> PredictedCurve:
    """Passive correction of a shared rotation with orthogonal flips at rate p."""
    dist = inp.distribution()
    p = _require_p(inp)
    A = inp.a_d * distribution_moment(dist, inp.d + 1) + (
        (2.0 - 2.0 * p) / p
    ) * inp.b_d * distribution_moment(dist, inp.d) ** 2
    return _curve(A, 0.0, inp.n_cycles)


def predict_tc_ln(inp: PredictionInput) -> PredictedCurve:
    """Perfect time correlation, spatially independent angles, active correction."""
    mu, sigma = inp.moments()
    s2 = mu**2 + sigma**2
    A = inp.a_d * s2 ** ((inp.d + 1) / 2)
    B = inp.b_d * s2**inp.d
    return _curve(A, B, inp.n_cycles)


def predict_passive_tc_ln(inp: PredictionInput) -> PredictedCurve:
    mu, sigma = inp.moments()
    p = _require_p(inp)
    s2 = mu**2 + sigma**2
    A = inp.a_d * s2 ** ((inp.d + 1) / 2) + ((2.0 - 2.0 * p) / p) * inp.b_d * s2**inp.d
    return _curve(A, 0.0, inp.n_cycles)


def predict_tc_gn(inp: PredictionInput) -> PredictedCurve:
    """Perfect correlation in both space and time, active correction."""
    dist = inp.distribution()
    A = inp.a_d * distribution_moment(dist, inp.d + 1)
    B = inp.b_d * distribution_moment(dist, 2 * inp.d)
    return _curve(A, B, inp.n_cycles)


def predict_passive_tc_gn(inp: PredictionInput) -> PredictedCurve:
    dist = inp.distribution()
    p = _require_p(inp)
    A = inp.a_d * distribution_moment(dist, inp.d + 1) + (
        (2.0 - 2.0 * p) / p
    ) * inp.b_d * distribution_moment(dist, 2 * inp.d)
    return _curve(A, 0.0, inp.n_cycles)


PREDICTORS = {
    "active-ln": predict_active_ln,
    "active-gn": predict_active_gn,
    "discrete": predict_discrete,
    "passive-ln": predict_passive_ln,
    "passive-gn": predict_passive_gn,
    "tc-ln": predict_tc_ln,
    "passive-tc-ln": predict_passive_tc_ln,
    "tc-gn": predict_tc_gn,
    "passive-tc-gn": predict_passive_tc_gn,
}

AlphaSpec = Union[float, complex, AlphaDistribution, Sequence[tuple[float, complex]]]


def _alpha_sampler(alpha: AlphaSpec):
    """Return (is_constant, value-or-(probs, alphas)) for the step distribution."""
    if isinstance(alpha, AlphaDistribution):
        pairs = [(e.probability, e.alpha) for e in alpha.entries if e.alpha is not None]
    elif isinstance(alpha, (int, float, complex)):
        return True, complex(alpha)
    else:
        pairs = list(alpha)
    probs = np.array([p for p, _ in pairs], dtype=np.float64)
    probs = probs / probs.sum()
    alphas = np.array([a for _, a in pairs], dtype=np.complex128)
    return False, (probs, alphas)


def walk_oracle(
    alpha: AlphaSpec,
    p: float,
    n_cycles: int,
    trials: int,
    rng,
    sign_mode: str = "independent",
) -> float:
    """Mean squared displacement of the run-reversing coherent walk.

    The walk accumulates one alpha step per cycle; direction reversals arrive
    as a Bernoulli(p) process, so run lengths between reversals are geometric
    with mean 1/p and variance (1-p)/p**2.  sign_mode "independent" gives each
    run an i.i.d. +-1 direction (the expectation then equals the closed-form
    passive rate times n); "alternating" strictly flips the direction at every
    reversal, which halves the cross-run term to (1-p)/p at small p.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError("reversal probability must lie in (0, 1]")
    if sign_mode not in ("independent", "alternating"):
        raise ValueError(f"unknown sign mode {sign_mode!r}")
    is_const, spec = _alpha_sampler(alpha)
    total = 0.0
    done = 0
    chunk = max(1, min(trials, int(2**21 // max(n_cycles, 1))))
    while done < trials:
        b = min(chunk, trials - done)
        # segment id of each cycle = number of reversals strictly before it
        rev = rng.random((b, n_cycles)) < p
        seg = np.zeros((b, n_cycles), dtype=np.int64)
        seg[:, 1:] = np.cumsum(rev[:, :-1], axis=1)
        if sign_mode == "independent":
            fresh = rng.integers(0, 2, size=(b, n_cycles + 1)) * 2.0 - 1.0
            signs = np.take_along_axis(fresh, seg, axis=1)
        else:
            signs = 1.0 - 2.0 * (seg % 2)
        if is_const:
            disp = signs.sum(axis=1) * spec
        else:
            probs, alphas = spec
            steps = alphas[rng.choice(len(alphas), size=(b, n_cycles), p=probs)]
            disp = (signs * steps).sum(axis=1)
        total += float(np.sum(np.abs(disp) ** 2))
        done += b
    return total / trials


def passive_walk_rate(e_abs2: float, e_abs: float, p: float) -> float:
    """Closed-form per-cycle failure rate of the passive walk."""
    return e_abs2 + ((2.0 - 2.0 * p) / p) * e_abs**2
