import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harris import (
    SupportPoint,
    Variant,
    cdf,
    cgf,
    characterization_residual,
    conditional_pmf,
    make_params,
    mgf,
    nb_inverse,
    nb_transform,
    pgf,
    pmf,
    pmf_table,
    quantile,
    survival,
)
from harris.distribution import inverse_transform, nb_pmf, pmf_at
from harris.errors import DivergenceError, DomainError, InvalidParameter, StepTooLarge
from harris.numerics import gen_binom

from .conftest import GRID


class TestParams:
    def test_valid(self):
        p = make_params(2, 2, "h1")
        assert (p.m, p.k, p.variant) == (2.0, 2, Variant.H1)
        assert p.p + p.q == 1.0
        assert p.origin == 1
        assert make_params(3, 1, "H0").origin == 0

    @pytest.mark.parametrize("m,k", [(1.0, 2), (0.5, 2), (2, 0), (2, -1), (2, 1.5), (math.inf, 1), ("x", 1)])
    def test_invalid(self, m, k):
        with pytest.raises(InvalidParameter):
            make_params(m, k)

    def test_bad_variant(self):
        with pytest.raises(InvalidParameter):
            make_params(2, 2, "h2")

    def test_immutable(self, h22):
        with pytest.raises(AttributeError):
            h22.m = 3


class TestPmf:
    def test_published_values(self, h22):
        assert pmf(h22, 0) == pytest.approx(0.707107, abs=5e-7)
        assert pmf(h22, 1) == pytest.approx(0.176777, abs=5e-7)
        assert pmf(make_params(50, 5), 0) == pytest.approx(0.457305, abs=5e-7)

    def test_table_recurrence(self, h22):
        rows = pmf_table(h22, 2)
        assert [pt for pt, _ in rows] == [SupportPoint(1, 0), SupportPoint(3, 1), SupportPoint(5, 2)]
        assert [round(p, 6) for _, p in rows] == [0.707107, 0.176777, 0.066291]
        assert [round(p, 6) for _, p in pmf_table(make_params(4, 5), 1)] == [0.757858, 0.113679]
        base = make_params(7.5, 3)
        assert pmf_table(base, 0) == [(SupportPoint(1, 0), (1 / 7.5) ** (1 / 3))]

    @pytest.mark.parametrize("m,k", GRID)
    def test_table_matches_closed_form(self, m, k):
        params = make_params(m, k)
        for r, (_, prob) in enumerate(pmf_table(params, 200)):
            assert prob == pytest.approx(pmf(params, r), rel=1e-12, abs=1e-300)

    def test_against_mpmath(self):
        mp.mp.dps = 30
        for m, k, r in [(50, 5, 2), (4, 5, 3), (1.25, 2, 40)]:
            exact = mp.binomial(mp.mpf(1) / k + r - 1, r) * mp.mpf(m) ** (-mp.mpf(1) / k) * (1 - 1 / mp.mpf(m)) ** r
            assert pmf(make_params(m, k), r) == pytest.approx(float(exact), rel=1e-13)

    def test_h0_is_shift(self):
        h1, h0 = make_params(3, 4, "h1"), make_params(3, 4, "h0")
        assert pmf(h1, 5) == pmf(h0, 5)
        assert pmf_at(h1, 1 + 5 * 4) == pmf_at(h0, 5 * 4)
        assert pmf_at(h1, 2) == 0.0
        assert pmf_at(h0, -4) == 0.0

    @pytest.mark.parametrize("m,k", GRID)
    def test_normalization_and_single_mode(self, m, k):
        params = make_params(m, k)
        probs = [p for _, p in pmf_table(params, 4000)]
        # ratio test: the tail past R is at most pmf(R) q / (1 - q)
        tail = probs[-1] * params.q / (1 - params.q)
        assert tail < 1e-12
        assert math.fsum(probs) == pytest.approx(1.0, abs=1e-10)
        positive = [p for p in probs if p > 0]
        assert all(a > b for a, b in zip(positive, positive[1:]))

    def test_geometric_reductions(self):
        # k = 1: geometric on {1, 2, ...} and on {0, 1, ...}
        for variant in ("h1", "h0"):
            params = make_params(3, 1, variant)
            p, q = 1 / 3, 2 / 3
            for r in range(30):
                assert pmf(params, r) == pytest.approx(p * q**r, rel=1e-13)


class TestDistributionFunction:
    def test_values(self, h22):
        assert cdf(h22, 1) == pytest.approx(0.707107, abs=5e-7)
        assert cdf(h22, 3) == pytest.approx(0.707107 + 0.176777, abs=1e-6)
        assert cdf(h22, 3) == pytest.approx(0.883883476483184398, abs=1e-12)
        assert cdf(h22, 0.5) == 0.0
        assert cdf(h22, SupportPoint(3, 1)) == cdf(h22, 3)

    def test_step_function(self, h22):
        assert cdf(h22, 2.999) == cdf(h22, 1)
        assert cdf(h22, 4) == cdf(h22, 3)
        assert survival(h22, 3) == pytest.approx(1 - cdf(h22, 3), abs=1e-15)
        assert survival(h22, 0) == 1.0

    @pytest.mark.parametrize("m,k", GRID)
    @pytest.mark.parametrize("variant", ["h1", "h0"])
    def test_incomplete_beta_equals_cumulative_sum(self, m, k, variant):
        params = make_params(m, k, variant)
        running = 0.0
        for pt, prob in pmf_table(params, 200):
            running += prob
            assert cdf(params, pt.x) == pytest.approx(running, abs=1e-10)


class TestQuantile:
    def test_values(self, h22):
        assert quantile(h22, 0.5) == SupportPoint(1, 0)
        assert quantile(h22, 0.88) == SupportPoint(3, 1)
        assert quantile(h22, 1e-300).x == 1

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.2, 1.5])
    def test_domain(self, h22, u):
        with pytest.raises(DomainError):
            quantile(h22, u)

    @pytest.mark.parametrize("m,k", GRID)
    def test_inverts_cdf(self, m, k):
        params = make_params(m, k)
        previous = 0.0
        for pt, prob in pmf_table(params, 60):
            u = cdf(params, pt.x)
            # atoms whose mass is below double resolution share a DF value
            if prob > 0 and previous < u < 1.0:
                assert quantile(params, u) == pt
            previous = u

    def test_vectorized_map(self, h22):
        assert inverse_transform(h22, [0.1, 0.5, 0.88]).tolist() == [1, 1, 3]
        x = inverse_transform(h22, [1 - 1e-16])
        assert (x[0] - 1) % 2 == 0


class TestGeneratingFunctions:
    def test_pgf_values(self, h22):
        assert pgf(h22, 1.0) == 1.0
        s = 0.707107
        assert pgf(h22, s) == pytest.approx(s / math.sqrt(2 - s * s), rel=1e-14)
        assert pgf(h22, math.sqrt(0.5)) == pytest.approx(1 / math.sqrt(3), rel=1e-14)
        assert pgf(make_params(2, 2, "h0"), 1.0) == 1.0

    def test_pgf_domain(self, h22):
        with pytest.raises(DomainError):
            pgf(h22, 1.5)

    @pytest.mark.parametrize("m,k", GRID)
    def test_kth_root_of_geometric(self, m, k):
        params = make_params(m, k)
        s = np.arange(1, 10) / 10
        geom = params.p * s**k / (1 - params.q * s**k)
        np.testing.assert_allclose(pgf(params, s) ** k, geom, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("m,k", GRID)
    def test_laplace_transform_link(self, m, k):
        # index law of H0 is NB(1/m, 1/k): PGF (1 + θ (1 - z))**(-1/k) with θ = q/p
        params = make_params(m, k, "h0")
        theta = params.q / params.p
        z = np.arange(0, 11) / 10
        np.testing.assert_allclose(pgf(params, z ** (1 / k)), (1 + theta * (1 - z)) ** (-1 / k), rtol=1e-12, atol=1e-12)

    def test_pgf_against_series(self):
        params = make_params(4, 3)
        s = 0.8
        series = math.fsum(p * s**pt.x for pt, p in pmf_table(params, 400))
        assert pgf(params, s) == pytest.approx(series, rel=1e-12)

    def test_mgf_and_cgf(self, h22):
        t = 0.1
        assert mgf(h22, t) == pytest.approx(math.exp(t) / (2 - math.exp(2 * t)) ** 0.5, rel=1e-13)
        assert cgf(h22, t) == pytest.approx(math.log(mgf(h22, t)), rel=1e-13)
        h0 = make_params(2, 2, "h0")
        assert mgf(h0, t) == pytest.approx(pgf(h0, math.exp(-0.0)) * (2 - math.exp(2 * t)) ** -0.5, rel=1e-13)
        assert cgf(h22, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_cgf_derivatives_are_cumulants(self):
        params = make_params(3, 2)
        h = 1e-4
        first = (cgf(params, h) - cgf(params, -h)) / (2 * h)
        second = (cgf(params, h) - 2 * cgf(params, 0) + cgf(params, -h)) / h**2
        assert first == pytest.approx(3.0, rel=1e-7)
        assert second == pytest.approx(3 * 2 * 2, rel=1e-5)

    def test_divergence(self, h22):
        boundary = math.log(2) / 2
        with pytest.raises(DivergenceError):
            mgf(h22, boundary)
        with pytest.raises(DivergenceError):
            cgf(h22, 1.0)


class TestNegativeBinomial:
    def test_transform(self, h22):
        assert nb_transform(h22) == (0.5, 0.5)

    @pytest.mark.parametrize("m,k", GRID)
    @pytest.mark.parametrize("variant", list(Variant))
    def test_round_trip(self, m, k, variant):
        params = make_params(m, k, variant)
        assert nb_inverse(nb_transform(params), k, variant) == params

    def test_inverse_rejects_mismatched_shape(self):
        with pytest.raises(InvalidParameter):
            nb_inverse((0.5, 0.3), 2)

    def test_masses_agree(self):
        params = make_params(4, 5)
        nb = nb_transform(params)
        for r in range(6):
            oracle = gen_binom(0.2, r) * 0.25**0.2 * 0.75**r
            assert pmf(params, r) == pytest.approx(oracle, rel=1e-13)
            assert nb_pmf(nb, r) == pytest.approx(oracle, rel=1e-13)


class TestConditional:
    def test_uniform_for_k1(self):
        assert conditional_pmf(make_params(7, 1), 3) == pytest.approx([0.25] * 4, abs=1e-14)

    def test_k2(self):
        assert conditional_pmf(make_params(2, 2), 2) == pytest.approx([0.375, 0.25, 0.375], abs=1e-14)
        assert conditional_pmf(make_params(9, 4), 0) == [1.0]

    def test_against_joint_masses(self):
        # the ratio of products of masses, normalized over r, is the oracle
        params = make_params(3.3, 3)
        t = 6
        joint = [pmf(params, r) * pmf(params, t - r) for r in range(t + 1)]
        total = math.fsum(joint)
        assert conditional_pmf(params, t) == pytest.approx([j / total for j in joint], rel=1e-12)

    def test_free_of_m(self):
        assert conditional_pmf(make_params(1.5, 3), 5) == pytest.approx(conditional_pmf(make_params(40, 3), 5), rel=1e-14)

    def test_requires_h1(self):
        with pytest.raises(InvalidParameter):
            conditional_pmf(make_params(2, 2, "h0"), 2)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 80))
    def test_sums_to_one_and_symmetric(self, k, t):
        probs = conditional_pmf(make_params(2, k), t)
        assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)
        assert probs == pytest.approx(probs[::-1], rel=1e-12)


class TestCharacterization:
    @pytest.mark.parametrize("m,k,n", [(2, 1, 0), (10, 2, 3), (10, 5, 5), (2, 2, 1)])
    def test_small_residual(self, m, k, n):
        assert characterization_residual(make_params(m, k), n) <= 1e-6

    def test_second_order_decay(self):
        params = make_params(2, 1)
        coarse = characterization_residual(params, 0, h=0.05)
        fine = characterization_residual(params, 0, h=0.0125)
        assert coarse / fine == pytest.approx(16, rel=0.05)

    def test_sign_matters(self):
        # the identity fails if the right side is negated: residual is then twice the derivative
        params = make_params(3, 2)
        deriv = (2 * 1 + 1) / (3 * 2) * pmf(params, 2)
        assert deriv > 1e-3
        assert characterization_residual(params, 2) < 1e-6 * deriv

    def test_step_too_large(self):
        with pytest.raises(StepTooLarge):
            characterization_residual(make_params(1.2, 2), 0, h=0.3)

    def test_requires_h1(self):
        with pytest.raises(InvalidParameter):
            characterization_residual(make_params(2, 2, "h0"), 1)
