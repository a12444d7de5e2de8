"""The Harris family H1(m, k, 1/k) and its origin-shifted twin H0(m, k, 1/k).

H1 lives on the lattice ``1, 1 + k, 1 + 2k, ...`` and has PGF
``s * (m - (m - 1) s**k) ** (-1/k)``; H0 is the same law moved to
``0, k, 2k, ...``.  The lattice index ``r = (x - origin) / k`` of either is
negative binomial with success probability ``1/m`` and shape ``1/k``, so every
quantity below is computed on the index and mapped back through the origin.

A general integer shift ``theta`` (PGF ``s**theta * (...)**(-1/k)``) is not a
third variant: it is the same index law with origin ``theta``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DivergenceError, DomainError, InvalidParameter, StepTooLarge
from .numerics import gen_binom, log_gen_binom, reg_inc_beta

__all__ = [
    "Variant",
    "HarrisParams",
    "SupportPoint",
    "NBParams",
    "make_params",
    "pmf",
    "log_pmf",
    "pmf_at",
    "pmf_table",
    "cdf",
    "survival",
    "quantile",
    "inverse_transform",
    "pgf",
    "mgf",
    "cgf",
    "nb_transform",
    "nb_inverse",
    "nb_pmf",
    "conditional_pmf",
    "characterization_residual",
]


class Variant(enum.Enum):
    H1 = "h1"
    H0 = "h0"

    @property
    def origin(self) -> int:
        return 1 if self is Variant.H1 else 0

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameter(f"unknown variant {value!r}; expected h0 or h1") from None


@dataclass(frozen=True)
class HarrisParams:
    """Validated parameter triple; build it with :func:`make_params`."""

    m: float
    k: int
    variant: Variant = Variant.H1

    @property
    def p(self) -> float:
        return 1.0 / self.m

    @property
    def q(self) -> float:
        return 1.0 - 1.0 / self.m

    @property
    def shape(self) -> float:
        return 1.0 / self.k

    @property
    def origin(self) -> int:
        return self.variant.origin

    @property
    def log_p(self) -> float:
        return -math.log(self.m)

    @property
    def log_q(self) -> float:
        return math.log1p(-1.0 / self.m)

    def with_m(self, m: float) -> "HarrisParams":
        return make_params(m, self.k, self.variant)

    def support_point(self, r: int) -> "SupportPoint":
        return SupportPoint(self.origin + r * self.k, r)

    def __str__(self):
        return f"{self.variant.name}({self.m:g}, {self.k}, 1/{self.k})"


class SupportPoint(NamedTuple):
    """Atom ``x = origin + r * k`` together with its lattice index ``r``."""

    x: int
    r: int


class NBParams(NamedTuple):
    """Negative binomial law: success probability ``p`` and real shape."""

    p: float
    shape: float


def make_params(m, k, variant=Variant.H1) -> HarrisParams:
    """Validate and build :class:`HarrisParams` (``m > 1``, integer ``k >= 1``)."""
    try:
        m = float(m)
    except (TypeError, ValueError):
        raise InvalidParameter(f"m must be a real number, got {m!r}") from None
    if not math.isfinite(m) or m <= 1.0:
        raise InvalidParameter(f"m must be finite and > 1, got {m!r}")
    if isinstance(k, bool):
        raise InvalidParameter(f"k must be a positive integer, got {k!r}")
    try:
        k_int = int(k)
    except (TypeError, ValueError):
        raise InvalidParameter(f"k must be a positive integer, got {k!r}") from None
    if k_int != k or k_int < 1:
        raise InvalidParameter(f"k must be a positive integer, got {k!r}")
    return HarrisParams(m, k_int, Variant.parse(variant))


def _check_index(r):
    if int(r) != r or r < 0:
        raise DomainError(f"lattice index must be a nonnegative integer, got {r!r}")
    return int(r)


def log_pmf(params: HarrisParams, r):
    """Log mass at lattice index ``r`` (vectorized)."""
    return log_gen_binom(params.shape, r) + params.shape * params.log_p + np.asarray(r) * params.log_q


def pmf(params: HarrisParams, r: int) -> float:
    """``P(X = origin + r k) = C(1/k + r - 1, r) p**(1/k) q**r``."""
    r = _check_index(r)
    if r == 0:
        return params.p**params.shape
    return math.exp(log_pmf(params, r))


def pmf_at(params: HarrisParams, x) -> float:
    """Mass at an arbitrary integer ``x``; zero off the lattice."""
    offset = x - params.origin
    if offset < 0 or offset % params.k:
        return 0.0
    return pmf(params, offset // params.k)


def pmf_table(params: HarrisParams, r_max: int) -> list[tuple[SupportPoint, float]]:
    """Masses for ``r = 0 .. r_max`` built by the ratio recurrence

    ``P(r + 1) = P(r) * (1 + r k) / (1 + r) * q / k``.
    """
    r_max = _check_index(r_max)
    k, q = params.k, params.q
    prob = params.p**params.shape
    rows = []
    for r in range(r_max + 1):
        rows.append((params.support_point(r), prob))
        prob *= (1 + r * k) / (1 + r) * q / k
    return rows


def _index_below(params, x):
    """Largest lattice index whose atom is <= x, or -1 below the origin."""
    if x < params.origin:
        return -1
    return int(math.floor((x - params.origin) / params.k))


def cdf(params: HarrisParams, x) -> float:
    """``F(x) = I_{1/m}(1/k, r + 1)`` with ``r`` the last lattice index at or below ``x``."""
    if isinstance(x, SupportPoint):
        x = x.x
    r = _index_below(params, x)
    if r < 0:
        return 0.0
    return reg_inc_beta(params.p, params.shape, r + 1.0)


def survival(params: HarrisParams, x) -> float:
    """``P(X > x) = I_{1 - 1/m}(r + 1, 1/k)``, the complement of :func:`cdf`."""
    if isinstance(x, SupportPoint):
        x = x.x
    r = _index_below(params, x)
    if r < 0:
        return 1.0
    return reg_inc_beta(params.q, r + 1.0, params.shape)


def _cumulative_indices(params, u):
    """Smallest index with cumulative mass >= u, by a recurrence-driven scan."""
    u = np.asarray(u, dtype=float)
    if u.size == 0:
        return np.zeros(0, dtype=np.int64)
    target = float(u.max())
    k, q = params.k, params.q
    probs = [params.p**params.shape]
    total = probs[0]
    r = 0
    while total < target:
        nxt = probs[-1] * (1 + r * k) / (1 + r) * q / k
        # mass exhausted at double precision: the remaining u land on the last atom
        if total + nxt == total:
            break
        probs.append(nxt)
        total += nxt
        r += 1
    cum = np.cumsum(probs)
    idx = np.searchsorted(cum, u, side="left")
    return np.minimum(idx, len(cum) - 1).astype(np.int64)


def quantile(params: HarrisParams, u: float) -> SupportPoint:
    """Smallest support point ``x`` with ``cdf(x) >= u``, for ``0 < u < 1``."""
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie in (0, 1), got {u!r}")
    r = int(_cumulative_indices(params, [u])[0])
    # settle rounding ties against the incomplete-beta DF so quantile(cdf(x)) == x
    while r > 0 and cdf(params, params.support_point(r - 1).x) >= u:
        r -= 1
    while cdf(params, params.support_point(r).x) < u and pmf(params, r + 1) > 0:
        r += 1
    return params.support_point(r)


def inverse_transform(params: HarrisParams, u) -> np.ndarray:
    """Vectorized quantile map applied to an array of uniforms; returns atoms."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise DomainError("uniforms must lie in (0, 1)")
    return params.origin + params.k * _cumulative_indices(params, u)


def pgf(params: HarrisParams, s):
    """Probability generating function on ``[0, 1]``."""
    sarr = np.asarray(s, dtype=float)
    if np.any((sarr < 0) | (sarr > 1)):
        raise DomainError(f"s must lie in [0, 1], got {s!r}")
    out = (params.m - (params.m - 1.0) * sarr**params.k) ** (-params.shape)
    if params.variant is Variant.H1:
        out = sarr * out
    return float(out) if np.ndim(s) == 0 else out


def _mgf_boundary(params):
    return math.log(params.m / (params.m - 1.0)) / params.k


def cgf(params: HarrisParams, t: float) -> float:
    """Cumulant generating function ``ln E[e^{tX}]``, finite for ``t < ln(m/(m-1))/k``."""
    if not t < _mgf_boundary(params):
        raise DivergenceError(
            f"t={t!r} is at or beyond the convergence boundary {_mgf_boundary(params):.6g}"
        )
    inner = -params.shape * math.log(params.m) - params.shape * math.log1p(
        -params.q * math.exp(t * params.k)
    )
    return params.origin * t + inner


def mgf(params: HarrisParams, t: float) -> float:
    return math.exp(cgf(params, t))


def nb_transform(params: HarrisParams) -> NBParams:
    """Law of the lattice index ``(X - origin) / k``: NB(1/m, 1/k)."""
    return NBParams(params.p, params.shape)


def nb_inverse(nb: NBParams, k, variant=Variant.H1) -> HarrisParams:
    """Rebuild Harris parameters from the index law and the lattice step."""
    nb = NBParams(*nb)
    k = make_params(2.0, k).k
    if not math.isclose(nb.shape * k, 1.0, rel_tol=1e-12):
        raise InvalidParameter(f"NB shape {nb.shape!r} is not 1/k for k={k}")
    if not 0.0 < nb.p < 1.0:
        raise InvalidParameter(f"NB success probability must lie in (0, 1), got {nb.p!r}")
    return make_params(1.0 / nb.p, k, variant)


def nb_pmf(nb: NBParams, r: int) -> float:
    """Negative binomial mass ``C(shape + r - 1, r) p**shape (1 - p)**r``."""
    r = _check_index(r)
    return gen_binom(nb.shape, r) * nb.p**nb.shape * (1.0 - nb.p) ** r


def conditional_pmf(params: HarrisParams, t: int) -> list[float]:
    """Law of the index of X given ``X + Y = 2 + t k`` for iid H1 variables X, Y.

    Free of ``m``; uniform on ``0..t`` when ``k = 1``.
    """
    t = _check_index(t)
    if params.variant is not Variant.H1:
        raise InvalidParameter("conditional_pmf is defined for the H1 variant")
    a = params.shape
    r = np.arange(t + 1)
    logs = log_gen_binom(a, r) + log_gen_binom(a, t - r) - log_gen_binom(2 * a, t)
    return [float(v) for v in np.exp(logs)]


def characterization_residual(params: HarrisParams, n: int, h: float | None = None) -> float:
    """Finite-difference check of ``dP(X > nk+1)/dμ = (nk+1)/(μk) P(X = nk+1)``.

    The mean ``μ`` of H1 equals ``m``; the survival function is differentiated
    by a central difference in ``m`` with ``k`` held fixed.
    """
    n = _check_index(n)
    if params.variant is not Variant.H1:
        raise InvalidParameter("the characterization applies to the H1 variant")
    m, k = params.m, params.k
    if h is None:
        h = 1e-5 * m
    if not h > 0:
        raise DomainError(f"step must be positive, got {h!r}")
    if m - h <= 1.0:
        raise StepTooLarge(f"m - h = {m - h!r} leaves the parameter space (needs > 1)")
    x = n * k + 1
    upper = survival(params.with_m(m + h), x)
    lower = survival(params.with_m(m - h), x)
    lhs = (upper - lower) / (2.0 * h)
    rhs = (n * k + 1) / (m * k) * pmf(params, n)
    return abs(lhs - rhs)
