"""Repeated-sampling studies of the estimators.

Repetition ``i`` draws its sample from ``RngStream(seed, i)``, so a report
depends only on its ExperimentSpec and never on how many worker threads ran it.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .distribution import Variant, make_params
from .errors import EstimationError
from .estimation import FitResult, Method, Sample, fit
from .sampling import RngStream, sample_gamma_poisson

__all__ = [
    "ExperimentSpec",
    "ExperimentReport",
    "run_experiment",
    "run_grid",
    "TABLES",
    "table_specs",
    "published_table",
    "REPORT_FIELDS",
]


@dataclass(frozen=True)
class ExperimentSpec:
    m: float
    k: int
    n: int
    reps: int = 50
    method: Method = Method.MLE
    seed: int = 0
    variant: Variant = Variant.H1

    def __post_init__(self):
        params = make_params(self.m, self.k, self.variant)
        object.__setattr__(self, "m", params.m)
        object.__setattr__(self, "k", params.k)
        object.__setattr__(self, "variant", params.variant)
        object.__setattr__(self, "method", Method(self.method))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if int(self.reps) != self.reps or self.reps < 1:
            raise ValueError(f"reps must be a positive integer, got {self.reps!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 1 << 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def params(self):
        return make_params(self.m, self.k, self.variant)


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    fits: tuple[FitResult | None, ...]

    @property
    def successes(self) -> list[FitResult]:
        return [f for f in self.fits if f is not None]

    @property
    def breakdowns(self) -> int:
        return sum(f is None for f in self.fits)

    def _stat(self, attr):
        vals = np.array([getattr(f, attr) for f in self.successes], dtype=float)
        if vals.size == 0:
            return math.nan, math.nan
        mean = float(vals.mean())
        if vals.size < 2:
            return mean, math.nan
        return mean, float(vals.std(ddof=1) / math.sqrt(vals.size))

    @property
    def m_hat(self) -> tuple[float, float]:
        """Mean estimate of m and its standard error across repetitions."""
        return self._stat("m_hat")

    @property
    def k_hat(self) -> tuple[float, float]:
        return self._stat("k_hat")

    def row(self) -> dict[str, str]:
        s = self.spec
        m_mean, m_se = self.m_hat
        k_mean, k_se = self.k_hat
        return {
            "m": f"{s.m:g}",
            "k": str(s.k),
            "variant": s.variant.value,
            "n": str(s.n),
            "reps": str(s.reps),
            "method": s.method.value,
            "seed": str(s.seed),
            "m_hat": _fmt(m_mean),
            "m_hat_se": _fmt(m_se),
            "k_hat": _fmt(k_mean),
            "k_hat_se": _fmt(k_se),
            "breakdowns": str(self.breakdowns),
        }


REPORT_FIELDS = [
    "m", "k", "variant", "n", "reps", "method", "seed",
    "m_hat", "m_hat_se", "k_hat", "k_hat_se", "breakdowns",
]


def _fmt(v):
    return "NA" if not math.isfinite(v) else f"{v:.5f}"


def _one_rep(spec: ExperimentSpec, i: int) -> FitResult | None:
    params = spec.params
    x = sample_gamma_poisson(params, RngStream(spec.seed, i), spec.n)
    try:
        return fit(Sample.of(x, params.origin), spec.method)
    except EstimationError:
        return None


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> ExperimentReport:
    if threads <= 1:
        fits = [_one_rep(spec, i) for i in range(spec.reps)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fits = list(pool.map(lambda i: _one_rep(spec, i), range(spec.reps)))
    return ExperimentReport(spec, tuple(fits))


def run_grid(specs, threads: int = 1) -> list[ExperimentReport]:
    return [run_experiment(s, threads) for s in specs]


# Published simulation designs: (method, m values, k values, n values, reps)
_MOM_M = (1.25, 1.5, 2.0, 10.0, 50.0)
_MOM_K = (2, 4, 10, 20, 30, 50)
_MLE_N = (100, 200, 300, 400, 500)
TABLES = {
    1: (Method.MLE, (10.0,), (2,), _MLE_N, 1),
    2: (Method.MLE, (2.0,), (2,), _MLE_N, 1),
    3: (Method.MLE, (2.0,), (4,), _MLE_N, 1),
    4: (Method.MOMENTS, _MOM_M, _MOM_K, (200,), 50),
    5: (Method.MOMENTS, _MOM_M, _MOM_K, (100,), 50),
    6: (Method.MOMENTS, _MOM_M, _MOM_K, (50,), 100),
    7: (Method.MOMENTS, _MOM_M, _MOM_K, (500,), 50),
}


def table_specs(table: int, seed: int = 0, reps: int | None = None) -> list[ExperimentSpec]:
    """Specs reproducing one published table, one per (m, k, n) cell."""
    method, ms, ks, ns, default_reps = TABLES[table]
    return [
        ExperimentSpec(m=m, k=k, n=n, reps=reps or default_reps, method=method, seed=seed)
        for m in ms
        for k in ks
        for n in ns
    ]


def published_table(table: int) -> dict[tuple[float, int, int], dict[str, float | None]]:
    """Published values keyed by ``(m, k, n)``; blank cells come back as ``None``."""
    text = resources.files("harris.data").joinpath(f"table{table}.csv").read_text()
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        key = (float(row["m"]), int(row["k"]), int(row["n"]))
        out[key] = {
            name: (float(row[name]) if row[name] else None)
            for name in ("m_hat", "m_hat_se", "k_hat", "k_hat_se")
        }
    return out
