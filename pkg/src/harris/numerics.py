"""Special-function kernels: log-gamma, digamma, incomplete beta/gamma and
the generalized binomial coefficient.

The transcendental kernels delegate to :mod:`scipy.special`; this module adds
the domain checks and the log-space binomial the rest of the package relies
on.  Everything here is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "Tolerance",
    "log_gamma",
    "digamma",
    "reg_inc_beta",
    "reg_inc_gamma",
    "gen_binom",
    "log_gen_binom",
]

# products longer than this switch to log-gamma differences
_DIRECT_PRODUCT_MAX = 30


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule for iterative solvers."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")


def _check_positive(name, x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be finite and > 0, got {x!r}")
    return arr


def _unwrap(value, like):
    return float(value) if np.ndim(like) == 0 else value


def log_gamma(x):
    """Return ``ln Γ(x)`` for ``x > 0`` (scalar or array)."""
    arr = _check_positive("x", x)
    return _unwrap(special.gammaln(arr), x)


def digamma(x):
    """Return ``ψ(x) = d/dx ln Γ(x)`` for ``x > 0``."""
    arr = _check_positive("x", x)
    return _unwrap(special.digamma(arr), x)


def reg_inc_beta(p, a, b):
    """Regularized incomplete beta ratio ``I_p(a, b) = B_p(a, b) / B(a, b)``."""
    _check_positive("a", a)
    _check_positive("b", b)
    parr = np.asarray(p, dtype=float)
    if not np.all((parr >= 0) & (parr <= 1)):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    out = special.betainc(a, b, parr)
    scalar = np.ndim(p) == 0 and np.ndim(a) == 0 and np.ndim(b) == 0
    return float(out) if scalar else out


def reg_inc_gamma(shape, x):
    """Regularized lower incomplete gamma ``P(shape, x)``; zero for ``x <= 0``."""
    _check_positive("shape", shape)
    xarr = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.gammainc(shape, xarr)
    scalar = np.ndim(shape) == 0 and np.ndim(x) == 0
    return float(out) if scalar else out


def log_gen_binom(alpha, r):
    """``ln C(alpha + r - 1, r)``; vectorized over ``r``."""
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be finite and > 0, got {alpha!r}")
    rarr = np.asarray(r)
    if np.any(rarr < 0):
        raise DomainError("r must be nonnegative")
    rf = rarr.astype(float)
    out = special.gammaln(alpha + rf) - special.gammaln(alpha) - special.gammaln(rf + 1.0)
    # gammaln differences cancel badly for r == 0
    out = np.where(rarr == 0, 0.0, out)
    return float(out) if np.ndim(r) == 0 else out


def gen_binom(alpha: float, r: int) -> float:
    """Generalized binomial ``C(alpha + r - 1, r) = prod_{j<r} (alpha + j) / r!``.

    Small ``r`` uses the exact running product; larger ``r`` is evaluated in
    log space so that e.g. ``alpha = 1/50`` with ``r`` in the thousands does
    not overflow the intermediate factorials.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be finite and > 0, got {alpha!r}")
    if int(r) != r or r < 0:
        raise DomainError(f"r must be a nonnegative integer, got {r!r}")
    r = int(r)
    if r <= _DIRECT_PRODUCT_MAX:
        out = 1.0
        for j in range(r):
            out *= (alpha + j) / (j + 1)
        return out
    return math.exp(log_gen_binom(alpha, r))
