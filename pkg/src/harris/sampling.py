"""Random variate generation for the Harris family.

Three constructions of the same law, kept deliberately independent so that
they can check one another:

* :func:`sample_nb` draws the lattice index from numpy's negative binomial
  generator and maps it onto the lattice, ``x = origin + k Y``.
* :func:`sample_gamma_poisson` mixes a Poisson over a gamma intensity with
  shape ``1/k`` and scale ``m - 1``.  The gamma draw uses the shape-boost
  transform ``G(1/k + 1) * U ** k``.
* :func:`sample_inverse` pushes uniforms through the quantile function.

Each sampler takes an :class:`RngStream` keyed by ``(seed, stream_id)``.
Repetition ``i`` of an experiment uses ``stream_id = i``.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from .distribution import HarrisParams, inverse_transform, pmf_table

__all__ = [
    "RngStream",
    "sample_nb",
    "sample_gamma_poisson",
    "sample_inverse",
    "SAMPLERS",
    "chisquare_gof",
    "chisquare_two_sample",
]

_U64 = 1 << 64


class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``.

    Holds mutable generator state.  Don't share one instance between threads:
    give each task its own ``stream_id`` instead.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if int(v) != v or not 0 <= v < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, stream_id: int) -> "RngStream":
        """A fresh stream under the same master seed."""
        return RngStream(self.seed, stream_id)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _check_n(n):
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return int(n)


def sample_nb(params: HarrisParams, rng: RngStream, n: int) -> np.ndarray:
    """Atoms ``origin + k Y`` with ``Y ~ NB(1/m, 1/k)``."""
    n = _check_n(n)
    y = rng.generator.negative_binomial(params.shape, params.p, size=n)
    return params.origin + params.k * y.astype(np.int64)


def _gamma_small_shape(gen, shape, scale, n):
    # boost to shape + 1 so the base generator never sees shape < 1
    g = gen.standard_gamma(shape + 1.0, size=n)
    u = gen.random(size=n)
    return scale * g * u ** (1.0 / shape)


def sample_gamma_poisson(params: HarrisParams, rng: RngStream, n: int) -> np.ndarray:
    """Two-stage mixture: ``λ ~ gamma(shape 1/k, scale m - 1)``, ``Y | λ ~ Poisson(λ)``."""
    n = _check_n(n)
    gen = rng.generator
    lam = _gamma_small_shape(gen, params.shape, params.m - 1.0, n)
    y = gen.poisson(lam)
    return params.origin + params.k * y.astype(np.int64)


def sample_inverse(params: HarrisParams, rng: RngStream, n: int) -> np.ndarray:
    """Inverse-DF sampler: atoms ``quantile(U)`` for ``U`` uniform on (0, 1)."""
    n = _check_n(n)
    u = rng.generator.random(size=n)
    # Generator.random is on [0, 1); map the measure-zero 0 to the first atom
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    return inverse_transform(params, u)


SAMPLERS = {
    "nb": sample_nb,
    "gamma-poisson": sample_gamma_poisson,
    "inverse": sample_inverse,
}


def _pooled_edges(expected, min_expected):
    """Group consecutive lattice cells so that each group's expectation is large enough."""
    edges, acc = [0], 0.0
    for i, e in enumerate(expected):
        acc += e
        if acc >= min_expected:
            edges.append(i + 1)
            acc = 0.0
    if edges[-1] != len(expected):
        if len(edges) > 1:
            edges[-1] = len(expected)
        else:
            edges.append(len(expected))
    return edges


def chisquare_gof(x, params: HarrisParams, min_expected: float = 5.0):
    """Pearson goodness of fit of atoms ``x`` to ``params``; the last cell holds the tail.

    Returns ``(statistic, pvalue)``.
    """
    x = np.asarray(x)
    n = x.size
    r = (x - params.origin) // params.k
    r_max = int(r.max())
    probs = np.array([p for _, p in pmf_table(params, r_max)])
    # tail mass beyond r_max goes into the last cell
    probs[-1] = max(1.0 - probs[:-1].sum(), probs[-1])
    counts = np.bincount(r, minlength=r_max + 1)
    edges = _pooled_edges(probs * n, min_expected)
    obs = np.add.reduceat(counts, edges[:-1])
    exp = np.add.reduceat(probs, edges[:-1]) * n
    exp *= obs.sum() / exp.sum()
    if obs.size < 2:
        return 0.0, 1.0
    res = stats.chisquare(obs, exp)
    return float(res.statistic), float(res.pvalue)


def chisquare_two_sample(a, b, min_expected: float = 5.0):
    """Two-sample chi-square homogeneity test on integer samples.

    Values are pooled into consecutive bins whose combined count supports an
    expected frequency of at least ``min_expected`` in each sample.
    Returns ``(statistic, pvalue)``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo = int(min(a.min(), b.min()))
    hi = int(max(a.max(), b.max()))
    ca = np.bincount(a - lo, minlength=hi - lo + 1)
    cb = np.bincount(b - lo, minlength=hi - lo + 1)
    total = ca + cb
    keep = total > 0
    ca, cb, total = ca[keep], cb[keep], total[keep]
    frac = min(a.size, b.size) / (a.size + b.size)
    edges = _pooled_edges(total * frac, min_expected)
    table = np.vstack([np.add.reduceat(ca, edges[:-1]), np.add.reduceat(cb, edges[:-1])])
    if table.shape[1] < 2:
        return 0.0, 1.0
    res = stats.chi2_contingency(table, correction=False)
    return float(res.statistic), float(res.pvalue)
