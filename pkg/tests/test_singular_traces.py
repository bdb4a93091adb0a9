import math
import time
from fractions import Fraction

import numpy as np
import pytest

from ktrace.dimension_group import (element_series, make_element, power_series, projection_p,
                                    zeta_series)
from ktrace.errors import NotInScale
from ktrace.limits import UNBOUNDED
from ktrace.sampling import random_scale_element
from ktrace.singular_traces import (cesaro_error_estimate, constant_pattern, element_terms,
                                    g_pattern, lsc_gap_witness, mu_function_trace,
                                    series_terms, singular_tau, singular_tau_on_projection,
                                    truncated_pattern)
from oracles import running_means_exact, zeta_weighted_exact

ZETA = 0.5 + math.pi ** 2 / 6


@pytest.fixture(scope="module")
def zeta_full():
    return singular_tau(zeta_series(), 2, 100_000, 60)


def test_zeta_value(zeta_full):
    assert zeta_full.converged
    assert zeta_full.value == pytest.approx(ZETA, abs=1e-3)


def test_series_terms_match_exact_sum():
    terms, _ = series_terms(zeta_series(), 40, 2)
    for k in range(1, 41):
        # the exact head up to j = 200 leaves less than 2^-200 per index
        assert terms[k - 1] == pytest.approx(float(zeta_weighted_exact(k, 2, 200)), rel=1e-12)


def test_partial_sum_is_exact():
    for M in (1, 5, 10, 20):
        r = singular_tau(zeta_series(M), 2, 20_000)
        exact = sum(Fraction(1, j * j) for j in range(1, M + 1))
        assert r.converged and r.exact == exact
        assert r.value == pytest.approx(float(exact), abs=1e-9)


def test_running_means_against_rationals():
    terms = element_terms(projection_p(3), 30, 2)
    exact = running_means_exact([Fraction(k * k) * projection_p(3)[k] for k in range(1, 31)])
    assert np.allclose(np.cumsum(terms) / np.arange(1, 31), [float(e) for e in exact])


def test_tau_eps_series():
    r = singular_tau(power_series(Fraction(3, 2)), Fraction(3, 2), 100_000)
    assert r.converged and r.value == pytest.approx(0.5, abs=1e-2)


def test_on_projection():
    assert singular_tau_on_projection(projection_p(5), 2) == 1
    assert singular_tau_on_projection(projection_p(5), Fraction(3, 2)) == 0
    for j in range(1, 21):
        assert singular_tau_on_projection(projection_p(j), Fraction(3, 2)) == 0
        numeric = singular_tau(projection_p(j), Fraction(3, 2), 100_000).value
        assert abs(numeric) <= 1e-2


@pytest.mark.parametrize("q", [Fraction(3, 7), Fraction(2, 3)])
def test_on_projection_cross_check(q):
    g = make_element([Fraction(1, 3)], q, 2)
    assert singular_tau_on_projection(g, 2) == q
    assert singular_tau(g, 2, 100_000).value == pytest.approx(float(q), abs=1e-6)


def test_random_scale_elements(rng):
    for _ in range(100):
        g = random_scale_element(rng)
        exact = singular_tau_on_projection(g, 2)
        assert exact == g.tail_q
        assert singular_tau(g, 2, 20_000).value == pytest.approx(float(exact), abs=1e-6)


def test_not_in_scale():
    with pytest.raises(NotInScale):
        singular_tau_on_projection(make_element([Fraction(1, 2)], 5, 2))


def test_bad_exponent():
    with pytest.raises(ValueError):
        singular_tau(projection_p(1), 3)
    with pytest.raises(ValueError):
        singular_tau(projection_p(1), 1)
    with pytest.raises(TypeError):
        singular_tau(1.0)


def test_extra_terms():
    s = element_series([(2, projection_p(3)), (Fraction(1, 2), projection_p(1))])
    r = singular_tau(s, 2, 20_000)
    assert r.exact == Fraction(5, 2)


class TestGap:
    @pytest.mark.parametrize("M", [1, 5, 10, 20])
    def test_certified(self, M, zeta_full):
        w = lsc_gap_witness(M, full=zeta_full)
        assert w.gap_lower_bound >= 0.5 - 2e-3
        assert w.partial.exact == sum(Fraction(1, j * j) for j in range(1, M + 1))
        assert w.certifies()

    def test_single_term(self, zeta_full):
        w = lsc_gap_witness(1, full=zeta_full)
        assert w.partial.value == pytest.approx(1.0)
        assert w.full.value - w.partial.value == pytest.approx(ZETA - 1, abs=1e-3)

    def test_gap_tends_to_half(self, zeta_full):
        w = lsc_gap_witness(50, full=zeta_full)
        assert w.partial.value == pytest.approx(math.pi ** 2 / 6, abs=0.03)
        assert w.full.value - w.partial.value == pytest.approx(0.5, abs=0.03)

    def test_bad_M(self):
        with pytest.raises(ValueError):
            lsc_gap_witness(0)


class TestMu:
    def test_g_pattern(self):
        r = mu_function_trace(g_pattern(1.0))
        assert r.converged and r.value == pytest.approx(1.0, abs=1e-3)
        assert mu_function_trace(g_pattern(2.5)).value == pytest.approx(2.5, abs=1e-3)

    def test_truncation(self):
        for L in (1, 10, 50):
            r = mu_function_trace(truncated_pattern(L))
            assert r.converged and r.value == 0

    def test_constant_is_unbounded(self):
        r = mu_function_trace(constant_pattern(1.0))
        assert r.status == UNBOUNDED and r.value == math.inf

    def test_weight_validation(self):
        bad = g_pattern(1.0, weights=lambda n: -np.ones(n))
        with pytest.raises(ValueError):
            mu_function_trace(bad, 100)


def test_cesaro_error_order():
    for n in (100, 10_000):
        assert cesaro_error_estimate(n) == pytest.approx((math.log(n) + 1) / n)
    r = singular_tau(make_element([Fraction(1, 2)], 1, 2), 2, 10_000)
    assert abs(r.value - 1) <= cesaro_error_estimate(10_000)


def test_zeta_runtime():
    start = time.perf_counter()
    singular_tau(zeta_series(), 2, 100_000, 60)
    assert time.perf_counter() - start < 5.0
