"""Divisibility and random-sum stability checks.

Infinite divisibility and self-decomposability are probed with truncated
formal power series of the PGF: an n-th root or a decomposition factor whose
coefficients stay nonnegative up to the truncation order is evidence (not
proof) of the property.  The gamma random-sum identities are checked exactly
on a grid, and the limit theorems by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .distribution import HarrisParams, Variant, make_params, pgf, pmf_table
from .errors import DomainError, ZeroConstantTerm
from .numerics import reg_inc_gamma
from .sampling import RngStream, sample_gamma_poisson

__all__ = [
    "PowerSeries",
    "CheckResult",
    "pgf_series",
    "series_mul",
    "series_log",
    "series_exp",
    "series_pow",
    "series_divide",
    "thinned_pgf_series",
    "id_check",
    "id_check_series",
    "sd_check",
    "gamma_harris_identity",
    "self_decomposition_residual",
    "LimitLawReport",
    "limit_law_check",
    "StoppedSumReport",
    "stopped_sum_demo",
    "NONNEG_FLOOR",
]

#: coefficients above this count as nonnegative
NONNEG_FLOOR = -1e-9


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients of ``s**0 .. s**R`` of a truncated power series."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c:
            raise DomainError("a power series needs at least one coefficient")
        if not all(math.isfinite(v) for v in c):
            raise DomainError("power series coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def of(cls, values) -> "PowerSeries":
        return cls(tuple(np.asarray(values, dtype=float).tolist()))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def min_coefficient(self) -> float:
        return min(self.coeffs)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str
    detail: str = ""


def pgf_series(params: HarrisParams, order: int) -> PowerSeries:
    """PGF coefficients up to ``s**order``; zero off the lattice."""
    if int(order) != order or order < 0:
        raise DomainError(f"order must be a nonnegative integer, got {order!r}")
    coeffs = np.zeros(order + 1)
    if order >= params.origin:
        r_max = (order - params.origin) // params.k
        for point, prob in pmf_table(params, r_max):
            coeffs[point.x] = prob
    return PowerSeries.of(coeffs)


def _same_order(a, b):
    if a.order != b.order:
        raise DomainError(f"series orders differ: {a.order} vs {b.order}")


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    _same_order(a, b)
    return PowerSeries.of(np.convolve(a.array, b.array)[: a.order + 1])


def _need_positive_constant(ps):
    if not ps[0] > 0:
        raise ZeroConstantTerm(f"constant term must be positive, got {ps[0]!r}")


def series_log(ps: PowerSeries) -> PowerSeries:
    """``log f`` via ``n g_n f_0 = n f_n - sum_{j<n} j g_j f_{n-j}``."""
    _need_positive_constant(ps)
    f = ps.array
    g = np.zeros_like(f)
    g[0] = math.log(f[0])
    for n in range(1, len(f)):
        j = np.arange(1, n)
        acc = n * f[n] - float(np.dot(j * g[1:n], f[n - j]))
        g[n] = acc / (n * f[0])
    return PowerSeries.of(g)


def series_exp(ps: PowerSeries) -> PowerSeries:
    """``exp g`` via ``n e_n = sum_{j=1..n} j g_j e_{n-j}``."""
    g = ps.array
    e = np.zeros_like(g)
    e[0] = math.exp(g[0])
    for n in range(1, len(g)):
        j = np.arange(1, n + 1)
        e[n] = float(np.dot(j * g[1 : n + 1], e[n - j])) / n
    return PowerSeries.of(e)


def series_pow(ps: PowerSeries, alpha: float) -> PowerSeries:
    """``f ** alpha`` by the J. C. P. Miller recurrence."""
    _need_positive_constant(ps)
    f = ps.array
    c = np.zeros_like(f)
    c[0] = f[0] ** alpha
    for n in range(1, len(f)):
        j = np.arange(1, n + 1)
        c[n] = float(np.dot((alpha * j - (n - j)) * f[1 : n + 1], c[n - j])) / (n * f[0])
    return PowerSeries.of(c)


def series_divide(num: PowerSeries, den: PowerSeries) -> PowerSeries:
    """``num / den`` computed as ``num * exp(-log den)``."""
    neg_log = PowerSeries.of(-series_log(den).array)
    return series_mul(num, series_exp(neg_log))


def _h0(params):
    return make_params(params.m, params.k, Variant.H0)


def id_check_series(ps: PowerSeries, n: int, name: str = "id") -> CheckResult:
    """Does the n-th root of ``ps`` keep nonnegative coefficients?"""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    root = series_pow(ps, 1.0 / n)
    low = root.min_coefficient()
    return CheckResult(
        name=name,
        passed=low >= NONNEG_FLOOR,
        witness=f"min_coeff={low:.3e}",
        detail=f"n={n} R={ps.order}",
    )


def id_check(params: HarrisParams, n: int, order: int = 60) -> CheckResult:
    """Infinite divisibility probe at root order ``n``.

    H1 has no constant term, so its root is taken as ``s**(1/n)`` times the
    root of the H0 series.  The decision therefore rests on H0.
    """
    res = id_check_series(pgf_series(_h0(params), order), n, name=f"id {params}")
    if params.variant is Variant.H1:
        return CheckResult(res.name, res.passed, res.witness, res.detail + " (via H0 shift)")
    return res


def thinned_pgf_series(params: HarrisParams, c: float, order: int, lattice: bool = True) -> PowerSeries:
    """Series of the H0 PGF evaluated at the thinned argument.

    With ``lattice=True`` thinning acts on the lattice index, giving
    ``(m - (m - 1)(1 - c + c s**k)) ** (-1/k)``.  With ``lattice=False`` it is
    ordinary binomial thinning ``P(1 - c + c s)``.
    """
    m, k = params.m, params.k
    R = order
    if lattice:
        inner = np.zeros(R + 1)
        inner[0] = m - (m - 1.0) * (1.0 - c)
        if k <= R:
            inner[k] = -(m - 1.0) * c
    else:
        # (1 - c + c s)**k expanded exactly
        u = np.zeros(R + 1)
        for j in range(min(k, R) + 1):
            u[j] = math.comb(k, j) * (1.0 - c) ** (k - j) * c**j
        inner = -(m - 1.0) * u
        inner[0] += m
    return series_pow(PowerSeries.of(inner), -1.0 / k)


def sd_check(params: HarrisParams, c: float, order: int = 40, lattice: bool = True) -> CheckResult:
    """Self-decomposability probe ``Q_c = P(s) / P(thinned s)`` at one ``c``.

    H1 fails outright: a self-decomposable lattice law must charge zero.
    """
    if not 0.0 < c < 1.0:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    name = f"sd {params} c={c:g}"
    if params.variant is Variant.H1:
        return CheckResult(name, False, "P(X=0)=0", "no mass at zero (fail by necessity)")
    factor = series_divide(pgf_series(params, order), thinned_pgf_series(params, c, order, lattice))
    low = factor.min_coefficient()
    mode = "lattice" if lattice else "unit"
    return CheckResult(name, low >= NONNEG_FLOOR, f"min_coeff={low:.3e}", f"R={order} thinning={mode}")


def gamma_harris_identity(a: float, c: float, k: int, t_grid) -> float:
    """Max over ``t`` of ``|P_{H1(a,k)}((1 + c t)**(-1/k)) - (1 + a c t)**(-1/k)|``.

    An H1(a, k)-sum of gamma(scale c, shape 1/k) variables is gamma(scale a c, shape 1/k).
    """
    if not a > 1:
        raise DomainError(f"a must exceed 1, got {a!r}")
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    params = make_params(a, k)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0):
        raise DomainError("t grid must be nonnegative")
    lhs = pgf(params, (1.0 + c * t) ** (-1.0 / k))
    rhs = (1.0 + a * c * t) ** (-1.0 / k)
    return float(np.max(np.abs(lhs - rhs))) if t.size else 0.0


def self_decomposition_residual(c: float, k: int, t_grid) -> float:
    """Residual of ``(1 + t)**(-1/k) = φ_c(t) P_{H0(1/c, k)}(φ_c(t))`` for ``0 < c < 1``."""
    if not 0.0 < c < 1.0:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    t = np.asarray(t_grid, dtype=float)
    phi = (1.0 + c * t) ** (-1.0 / k)
    rhs = phi * pgf(make_params(1.0 / c, k, Variant.H0), phi)
    return float(np.max(np.abs((1.0 + t) ** (-1.0 / k) - rhs))) if t.size else 0.0


_S_GRID = tuple(np.round(np.arange(1, 10) / 10, 1))
_T_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass
class LimitLawReport:
    k: int
    a_grid: list[float]
    pgf_values: dict[float, list[float]] = field(default_factory=dict)
    exact_lt_distance: list[float] = field(default_factory=list)
    empirical_lt_distance: list[float] = field(default_factory=list)
    mean: list[float] = field(default_factory=list)
    variance: list[float] = field(default_factory=list)
    ks_exponential: float | None = None
    n: int = 0

    @property
    def pgf_decreasing(self) -> bool:
        return all(
            all(b < a for a, b in zip(vals, vals[1:])) for vals in self.pgf_values.values()
        )

    @property
    def lt_shrinking(self) -> bool:
        d = self.exact_lt_distance
        return all(b < a for a, b in zip(d, d[1:]))

    def moments_ok(self, mean_tol: float = 0.02, var_tol: float = 0.15) -> bool:
        if not self.mean:
            return True
        return abs(self.mean[-1] - 1.0) <= mean_tol and abs(self.variance[-1] - self.k) <= var_tol

    @property
    def passed(self) -> bool:
        ok = self.pgf_decreasing and self.lt_shrinking and self.moments_ok()
        if self.ks_exponential is not None:
            ok = ok and self.ks_exponential <= 0.01
        return ok


def limit_law_check(
    a_grid,
    k: int,
    n: int,
    rng: RngStream,
    s_grid=_S_GRID,
    t_grid=_T_GRID,
) -> LimitLawReport:
    """Behaviour of ``N_a ~ H1(a, k)`` as ``a`` grows.

    Records the PGF at fixed ``s`` (should fall toward 0), the distance
    between the Laplace transform of ``N_a / a`` and ``(1 + k t)**(-1/k)``
    (exact, via the PGF at ``e**(-t/a)``, and empirical from ``n`` draws),
    and the empirical mean and variance of ``N_a / a``.  For ``k = 1`` the
    Kolmogorov distance to the unit exponential at the largest ``a`` is added.
    """
    a_grid = [float(a) for a in a_grid]
    if any(b <= a for a, b in zip(a_grid, a_grid[1:])):
        raise DomainError("a_grid must be strictly increasing")
    t = np.asarray(t_grid, dtype=float)
    limit_lt = (1.0 + k * t) ** (-1.0 / k)
    report = LimitLawReport(k=k, a_grid=a_grid, n=int(n))
    report.pgf_values = {float(s): [] for s in s_grid}
    w = None
    for i, a in enumerate(a_grid):
        params = make_params(a, k)
        for s in s_grid:
            report.pgf_values[float(s)].append(pgf(params, float(s)))
        exact = pgf(params, np.exp(-t / a))
        report.exact_lt_distance.append(float(np.max(np.abs(exact - limit_lt))))
        if n > 0:
            w = sample_gamma_poisson(params, rng.spawn(i), n) / a
            emp = np.exp(-np.outer(t, w)).mean(axis=1)
            report.empirical_lt_distance.append(float(np.max(np.abs(emp - limit_lt))))
            report.mean.append(float(w.mean()))
            report.variance.append(float(w.var(ddof=1)))
    if k == 1 and w is not None:
        report.ks_exponential = float(stats.kstest(w, stats.expon.cdf).statistic)
    return report


@dataclass
class StoppedSumReport:
    a: float
    c: float
    k: int
    n: int
    ks_distance: float | None = None
    pvalue: float | None = None
    mean: float | None = None
    target_mean: float | None = None
    tolerance: float = 0.02

    @property
    def passed(self) -> bool:
        return self.ks_distance is None or self.ks_distance <= self.tolerance


def stopped_sum_demo(a: float, c: float, k: int, n: int, rng: RngStream) -> StoppedSumReport:
    """Sum ``N ~ H1(a, k)`` gamma(scale c, shape 1/k) variables; compare with gamma(scale a c, shape 1/k).

    Given ``N`` the sum is exactly gamma with shape ``N/k``, which is how it is drawn.
    """
    params = make_params(a, k)
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    report = StoppedSumReport(a=a, c=c, k=params.k, n=int(n))
    if n <= 0:
        return report
    counts = sample_gamma_poisson(params, rng, n)
    sums = rng.generator.gamma(counts / params.k, c)
    shape, scale = 1.0 / params.k, a * c

    def target_cdf(x):
        return reg_inc_gamma(shape, np.asarray(x) / scale)

    res = stats.kstest(sums, target_cdf)
    report.ks_distance = float(res.statistic)
    report.pvalue = float(res.pvalue)
    report.mean = float(sums.mean())
    report.target_mean = shape * scale
    return report
