"""Moment and maximum-likelihood estimation of (m, k) from an observed sample.

Both estimators give ``m_hat = x̄`` on the H1 scale; data with origin 0 are
shifted up by one first.  The likelihood equation in ``K = 1/k`` is solved by
scanning a log-spaced bracket for sign changes and bisecting the single root.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy import special

from .errors import (
    AllAtOrigin,
    DegenerateSample,
    DomainError,
    MeanAtBoundary,
    MultipleRoots,
    NoRootInBracket,
)
from .numerics import Tolerance

__all__ = [
    "Sample",
    "FitResult",
    "SolverInfo",
    "Method",
    "ScoreForm",
    "infer_lattice",
    "fit_moments",
    "mle_score",
    "harmonic_score",
    "fit_mle",
    "fit",
]


class Method(enum.Enum):
    MOMENTS = "moments"
    MLE = "mle"


class ScoreForm(enum.Enum):
    """Which likelihood equation :func:`mle_score` evaluates.

    ``NB`` is the negative binomial profile score
    ``sum(ψ(K x_i) - ψ(K)) + n ln(1/x̄)``.  ``PRINTED`` adds the further term
    ``n (x̄ - 1) ln(1 - 1/x̄)`` that appears in some published statements of
    the equation.  That term biases k_hat upward badly (about 5.7 for true
    k = 2, m = 2, n = 500), so fits use ``NB`` unless told otherwise.
    """

    NB = "nb"
    PRINTED = "printed"


def infer_lattice(values, origin: int = 1) -> int:
    """Largest step ``k`` such that every ``value - origin`` is a multiple of ``k``."""
    offsets = [int(v) - origin for v in values if int(v) > origin]
    if not offsets:
        raise AllAtOrigin(f"no value exceeds the origin {origin}")
    return reduce(math.gcd, offsets)


@dataclass(frozen=True)
class Sample:
    """Observed atoms, sorted on construction so fits are order-independent."""

    values: tuple[int, ...]
    origin: int = 1

    def __post_init__(self):
        if self.origin not in (0, 1):
            raise DomainError(f"origin must be 0 or 1, got {self.origin!r}")
        vals = []
        for v in self.values:
            iv = int(v)
            if iv != v:
                raise DomainError(f"sample values must be integers, got {v!r}")
            if iv < self.origin:
                raise DomainError(f"value {iv} lies below the origin {self.origin}")
            vals.append(iv)
        object.__setattr__(self, "values", tuple(sorted(vals)))

    @classmethod
    def of(cls, values, origin: int = 1) -> "Sample":
        return cls(tuple(np.asarray(values).tolist()), origin)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def h1_values(self) -> tuple[int, ...]:
        shift = 1 - self.origin
        return tuple(v + shift for v in self.values)

    @property
    def inferred_k(self) -> int:
        return infer_lattice(self.values, self.origin)

    def mean(self) -> float:
        """Mean on the H1 scale."""
        return float(Fraction(sum(self.h1_values), self.n))

    def variance(self) -> float:
        """Sample variance with denominator ``n - 1``, from exact integer sums."""
        n = self.n
        s1 = sum(self.h1_values)
        s2 = sum(v * v for v in self.h1_values)
        return float(Fraction(n * s2 - s1 * s1, n * (n - 1)))


@dataclass(frozen=True)
class SolverInfo:
    iterations: int
    bracket: tuple[float, float]
    residual: float


@dataclass(frozen=True)
class FitResult:
    m_hat: float
    k_hat: float
    k_hat_int: int
    method: Method
    lattice: int | None = None
    solver: SolverInfo | None = None

    def as_dict(self) -> dict:
        out = {
            "method": self.method.value,
            "m_hat": self.m_hat,
            "k_hat": self.k_hat,
            "k_hat_int": self.k_hat_int,
            "lattice": self.lattice,
        }
        if self.solver is not None:
            out["solver"] = {
                "iterations": self.solver.iterations,
                "bracket": list(self.solver.bracket),
                "residual": self.solver.residual,
            }
        return out


def _lattice_or_none(sample):
    try:
        return sample.inferred_k
    except AllAtOrigin:
        return None


def _round_k(k_hat):
    return max(1, int(math.floor(k_hat + 0.5)))


def _screen(sample: Sample):
    if sample.n < 2:
        raise DegenerateSample(f"need at least two observations, got {sample.n}")
    if sample.values[0] == sample.values[-1]:
        raise DegenerateSample(f"all {sample.n} observations equal {sample.values[0]}")
    xbar = sample.mean()
    if xbar <= 1.0:
        raise MeanAtBoundary(f"sample mean {xbar!r} must exceed 1 on the H1 scale")
    return xbar


def fit_moments(sample: Sample) -> FitResult:
    """``m_hat = x̄`` and ``k_hat = s² / (x̄ (x̄ - 1))``."""
    xbar = _screen(sample)
    k_hat = sample.variance() / (xbar * (xbar - 1.0))
    return FitResult(
        m_hat=xbar,
        k_hat=k_hat,
        k_hat_int=_round_k(k_hat),
        method=Method.MOMENTS,
        lattice=_lattice_or_none(sample),
    )


def _score_terms(sample):
    vals, counts = np.unique(np.asarray(sample.h1_values, dtype=float), return_counts=True)
    return vals, counts.astype(float)


def _score(vals, counts, n, xbar, K, form):
    s = math.fsum(counts * (special.digamma(K * vals) - special.digamma(K)))
    s -= n * math.log(xbar)
    if form is ScoreForm.PRINTED and xbar > 1.0:
        s += n * (xbar - 1.0) * math.log1p(-1.0 / xbar)
    return s


def mle_score(sample: Sample, K: float, form: ScoreForm | str = ScoreForm.NB) -> float:
    """Likelihood equation in ``K = 1/k`` after substituting ``p_hat = 1/x̄``.

    The digamma difference ``ψ(K x) - ψ(K)`` is the continuous form of the
    harmonic sum ``1/K + 1/(K+1) + ... + 1/(K x - 1)``; see :func:`harmonic_score`.
    """
    if not K > 0:
        raise DomainError(f"K must be positive, got {K!r}")
    form = ScoreForm(form)
    vals, counts = _score_terms(sample)
    return _score(vals, counts, sample.n, sample.mean(), K, form)


def harmonic_score(sample: Sample, K: float, form: ScoreForm | str = ScoreForm.NB) -> float:
    """The score written with finite harmonic sums.

    Only defined when every ``K (x_i - 1)`` is a nonnegative integer.
    """
    form = ScoreForm(form)
    n, xbar = sample.n, sample.mean()
    total = []
    for x in sample.h1_values:
        count = K * (x - 1)
        if abs(count - round(count)) > 1e-9:
            raise DomainError(f"K (x - 1) = {count!r} is not an integer")
        total.extend(1.0 / (K + j) for j in range(int(round(count))))
    s = math.fsum(total) - n * math.log(xbar)
    if form is ScoreForm.PRINTED and xbar > 1.0:
        s += n * (xbar - 1.0) * math.log1p(-1.0 / xbar)
    return s


_SCAN_LO, _SCAN_HI = 1e-6, 1e6
_SCAN_POINTS_PER_DECADE = 20
_MAX_EXPANSIONS = 4


def _scan_brackets(f, lo, hi):
    decades = math.log10(hi / lo)
    grid = np.logspace(math.log10(lo), math.log10(hi), int(decades * _SCAN_POINTS_PER_DECADE) + 1)
    vals = [f(K) for K in grid]
    brackets = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            brackets.append((grid[i], grid[i], vals[i], vals[i]))
        elif vals[i] * vals[i + 1] < 0:
            brackets.append((grid[i], grid[i + 1], vals[i], vals[i + 1]))
    return brackets, (grid[0], grid[-1], vals[0], vals[-1])


def fit_mle(
    sample: Sample,
    tol: Tolerance = Tolerance(),
    form: ScoreForm | str = ScoreForm.NB,
) -> FitResult:
    """Maximum likelihood fit.  ``m_hat = x̄`` exactly; ``k_hat = 1/K_hat``."""
    xbar = _screen(sample)
    form = ScoreForm(form)
    vals, counts = _score_terms(sample)
    n = sample.n

    def f(K):
        return _score(vals, counts, n, xbar, K, form)

    lo, hi = _SCAN_LO, _SCAN_HI
    for _ in range(_MAX_EXPANSIONS + 1):
        brackets, ends = _scan_brackets(f, lo, hi)
        if brackets:
            break
        lo, hi = lo * 1e-3, hi * 1e3
    else:
        raise NoRootInBracket(
            f"score keeps one sign on [{ends[0]:.3g}, {ends[1]:.3g}]: "
            f"score({ends[0]:.3g})={ends[2]:.6g}, score({ends[1]:.3g})={ends[3]:.6g}",
            *ends,
        )
    if len(brackets) > 1:
        spans = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b, _, _ in brackets)
        raise MultipleRoots(f"score changes sign {len(brackets)} times: {spans}", brackets)

    a, b, fa, _ = brackets[0]
    bracket = (float(a), float(b))
    iterations = 0
    mid, fmid = a, fa
    while a != b and iterations < tol.max_iter:
        iterations += 1
        mid = 0.5 * (a + b)
        fmid = f(mid)
        if abs(fmid) < tol.abs_tol or (b - a) < tol.rel_tol * mid:
            break
        if (fmid < 0) == (fa < 0):
            a, fa = mid, fmid
        else:
            b = mid
    K_hat = mid
    k_hat = 1.0 / K_hat
    return FitResult(
        m_hat=xbar,
        k_hat=k_hat,
        k_hat_int=_round_k(k_hat),
        method=Method.MLE,
        lattice=_lattice_or_none(sample),
        solver=SolverInfo(iterations=iterations, bracket=bracket, residual=abs(fmid)),
    )


def fit(sample: Sample, method: Method | str = Method.MLE, **kwargs) -> FitResult:
    method = Method(method)
    if method is Method.MOMENTS:
        return fit_moments(sample)
    return fit_mle(sample, **kwargs)
