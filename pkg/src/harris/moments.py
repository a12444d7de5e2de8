"""Moments, cumulants and shape statistics of the Harris family.

Closed forms are written for H1.  H0 is the same law shifted down by one:
central moments and cumulants of order >= 2 are unchanged, while raw and
factorial moments are re-expanded about the new origin.

:func:`brute_force_moment` sums the mass function directly and is the
independent check on every closed form here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import HarrisParams, Variant, log_pmf
from .errors import DomainError, InvalidParameter, StepTooLarge

__all__ = ["MomentSet", "moments", "brute_force_moment", "brute_force_moments", "recurrence_check"]

# Stirling numbers of the first kind s(n, j): falling factorial -> powers
_STIRLING1 = {
    1: (0, 1),
    2: (0, -1, 1),
    3: (0, 2, -3, 1),
    4: (0, -6, 11, -6, 1),
}


@dataclass(frozen=True)
class MomentSet:
    """First four factorial, raw and central moments, cumulants and shape statistics.

    Each list is indexed from order 1, so ``raw[0]`` is the mean and
    ``central[0]`` is identically zero.
    """

    factorial: tuple[float, float, float, float]
    raw: tuple[float, float, float, float]
    central: tuple[float, float, float, float]
    cumulants: tuple[float, float, float, float]
    beta1: float
    gamma1: float
    beta2: float
    gamma2: float
    cv: float

    @property
    def mean(self) -> float:
        return self.raw[0]

    @property
    def variance(self) -> float:
        return self.central[1]

    def as_dict(self) -> dict[str, float]:
        out = {}
        for name in ("factorial", "raw", "central", "cumulants"):
            for i, v in enumerate(getattr(self, name), start=1):
                out[f"{name}_{i}"] = v
        for name in ("beta1", "gamma1", "beta2", "gamma2", "cv"):
            out[name] = getattr(self, name)
        return out


def _h1_raw(m, k):
    d = m * (m - 1) * k
    return (
        m,
        m**2 + d,
        m**3 + d * (2 * m * k + 3 * m - k),
        m**4 + d * (6 * m**2 * k**2 + 11 * m**2 * k + 6 * m**2 - 6 * m * k**2 - 7 * m * k + k**2),
    )


def _h1_factorial(m, k):
    d = m * (m - 1) * (k + 1)
    return (
        m,
        d,
        d * (k - m + 2 * (k + 1) * (m - 1)),
        d
        * (
            6 * m**2 * k**2 + 5 * m**2 * k + m**2
            - 6 * m * k**2 - 13 * m * k - 5 * m
            + k**2 + 5 * k + 6
        ),
    )


def _shift_raw(raw, shift):
    """Raw moments of ``X + shift`` from those of ``X``."""
    full = (1.0,) + tuple(raw)
    return tuple(
        sum(math.comb(n, j) * full[j] * shift ** (n - j) for j in range(n + 1))
        for n in range(1, 5)
    )


def _factorial_from_raw(raw):
    full = (1.0,) + tuple(raw)
    return tuple(sum(c * full[j] for j, c in enumerate(_STIRLING1[n])) for n in range(1, 5))


def moments(params: HarrisParams) -> MomentSet:
    m, k = params.m, float(params.k)
    mm1 = m * (m - 1)
    mu2 = mm1 * k
    mu3 = mm1 * (2 * m - 1) * k**2
    k4 = mm1 * (6 * m**2 - 6 * m + 1) * k**3
    mu4 = mm1 * (k * (6 * m**2 - 6 * m + 1) + 3 * mm1) * k**2

    raw = _h1_raw(m, k)
    factorial = _h1_factorial(m, k)
    mean = m
    if params.variant is Variant.H0:
        raw = _shift_raw(raw, -1.0)
        factorial = _factorial_from_raw(raw)
        mean = m - 1.0

    excess = 6 * k + k / mm1
    return MomentSet(
        factorial=factorial,
        raw=raw,
        central=(0.0, mu2, mu3, mu4),
        cumulants=(mean, mu2, mu3, k4),
        beta1=(2 * m - 1) ** 2 * k / mm1,
        gamma1=(2 * m - 1) * math.sqrt(k / mm1),
        beta2=3 + excess,
        gamma2=excess,
        cv=math.sqrt(mu2) / mean,
    )


_KINDS = ("raw", "central", "factorial")
_CHUNK = 4096
_TAIL_REL = 1e-12


def brute_force_moment(params: HarrisParams, order: int, kind: str = "raw") -> float:
    """Moment of the given ``kind`` summed term by term over the support.

    Summation stops once a geometric envelope on the remaining tail falls
    below ``1e-12`` of the accumulated absolute sum.  Beyond index ``R`` each
    mass ratio is at most ``q`` and the polynomial weight grows by at most
    ``((|x_R - c| + k) / |x_R - c|) ** order`` per step, so the tail is bounded
    by ``t_R * rho / (1 - rho)`` once that product ``rho`` drops below one.
    """
    if order not in (1, 2, 3, 4):
        raise DomainError(f"order must be 1..4, got {order!r}")
    if kind not in _KINDS:
        raise DomainError(f"kind must be one of {_KINDS}, got {kind!r}")
    center = _brute_mean(params) if kind == "central" else 0.0
    k, q = params.k, params.q

    terms = []
    abs_total = 0.0
    start = 0
    while True:
        r = np.arange(start, start + _CHUNK)
        x = params.origin + k * r.astype(float)
        mass = np.exp(log_pmf(params, r))
        if kind == "factorial":
            weight = np.ones_like(x)
            for j in range(order):
                weight *= x - j
        else:
            weight = (x - center) ** order
        chunk = weight * mass
        terms.append(chunk)
        abs_total += float(np.abs(chunk).sum())

        last_x = abs(x[-1] - center) + (order if kind == "factorial" else 0)
        if last_x > 0:
            rho = ((last_x + k) / last_x) ** order * q
            if rho < 1.0:
                tail = abs(chunk[-1]) * rho / (1.0 - rho)
                if tail <= _TAIL_REL * abs_total or mass[-1] == 0.0:
                    break
        start += _CHUNK
    return math.fsum(np.concatenate(terms))


def _brute_mean(params):
    return brute_force_moment(params, 1, "raw")


def brute_force_moments(params: HarrisParams) -> MomentSet:
    """A full :class:`MomentSet` assembled only from series summation."""
    raw = tuple(brute_force_moment(params, n, "raw") for n in range(1, 5))
    factorial = tuple(brute_force_moment(params, n, "factorial") for n in range(1, 5))
    central = (0.0,) + tuple(brute_force_moment(params, n, "central") for n in range(2, 5))
    mu2, mu3, mu4 = central[1:]
    cumulants = (raw[0], mu2, mu3, mu4 - 3 * mu2**2)
    beta1 = mu3**2 / mu2**3
    beta2 = mu4 / mu2**2
    return MomentSet(
        factorial=factorial,
        raw=raw,
        central=central,
        cumulants=cumulants,
        beta1=beta1,
        gamma1=mu3 / mu2**1.5,
        beta2=beta2,
        gamma2=beta2 - 3,
        cv=math.sqrt(mu2) / raw[0],
    )


def _derivative(f, m, h):
    return (f(m + h) - f(m - h)) / (2.0 * h)


def recurrence_check(params: HarrisParams, r: int, kind: str, h: float | None = None) -> float:
    """Absolute residual of one of the moment recurrences in ``m``.

    ``raw``:      mu'_{r+1} = m ((m - 1) k dmu'_r/dm + mu'_r)
    ``central``:  mu_{r+1}  = m (m - 1) k (dmu_r/dm + r mu_{r-1})
    ``cumulant``: k_{r+1}   = m (m - 1) k dk_r/dm

    Derivatives are central differences with step ``h`` (default ``1e-5 m``).
    """
    if params.variant is not Variant.H1:
        raise InvalidParameter("the moment recurrences are stated for H1")
    if r not in (1, 2, 3):
        raise DomainError(f"r must be 1..3, got {r!r}")
    m, k = params.m, params.k
    if h is None:
        h = 1e-5 * m
    if m - h <= 1.0:
        raise StepTooLarge(f"m - h = {m - h!r} leaves the parameter space (needs > 1)")

    def field(name, order):
        def f(mu):
            return getattr(moments(params.with_m(mu)), name)[order - 1]
        return f

    here = moments(params)
    if kind == "raw":
        lhs = here.raw[r]
        rhs = m * ((m - 1) * k * _derivative(field("raw", r), m, h) + here.raw[r - 1])
    elif kind == "central":
        prev = 1.0 if r == 1 else here.central[r - 2]
        lhs = here.central[r]
        rhs = m * (m - 1) * k * (_derivative(field("central", r), m, h) + r * prev)
    elif kind == "cumulant":
        lhs = here.cumulants[r]
        rhs = m * (m - 1) * k * _derivative(field("cumulants", r), m, h)
    else:
        raise DomainError(f"kind must be raw, central or cumulant, got {kind!r}")
    return abs(lhs - rhs)
