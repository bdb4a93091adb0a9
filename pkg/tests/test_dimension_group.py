from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ktrace.dimension_group import (ZERO, DimensionGroupElement, element_series,
                                    k0_pairing_exact, make_element, power_series,
                                    projection_p, series_tau_k, tail_pairing, tau_k,
                                    zeta_series)
from ktrace.errors import NotInScale
from ktrace.sampling import random_group_element, random_scale_element
from oracles import catalog_coordinate

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)


@st.composite
def elements(draw):
    prefix = draw(st.lists(fractions, max_size=5))
    return make_element(prefix, draw(fractions))


class TestElements:
    def test_sequence(self):
        g = make_element(["1/2"], 1)
        assert g.coordinates(4) == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 9), Fraction(1, 16)]
        # (1/2) is not the tail value 1/1, so the prefix is kept
        assert g.tail_start == 2

    def test_canonical_form(self):
        g = make_element([1, Fraction(1, 4)], 1)
        assert g.tail_start == 1 and g.prefix == ()
        assert make_element([], 0).is_zero()

    def test_group_law(self):
        g = make_element(["1/2"], 1)
        assert (g + (-g)).is_zero()
        assert (g - g) == ZERO

    def test_order(self):
        g = make_element(["1/2"], 1)
        assert ZERO <= g and g >= ZERO
        assert not make_element(["-1"], 1).is_positive()
        # eventually q/i^2 with q < 0 is never positive
        assert not make_element([1, 1], -1).is_positive()

    def test_scale(self):
        assert projection_p(4).in_scale()
        assert not make_element([Fraction(1, 2)], 5, 2).in_scale()
        assert make_element([Fraction(1, 2)], 3, 2).in_scale()

    def test_json(self, rng):
        for _ in range(20):
            g = random_group_element(rng)
            assert DimensionGroupElement.from_json(g.to_json()) == g

    def test_scalar_multiple(self):
        g = projection_p(2)
        assert (3 * g).coordinates(5) == [3 * a for a in g.coordinates(5)]


class TestCatalog:
    def test_coordinates(self):
        p3 = projection_p(3)
        assert tau_k(p3, 3) == Fraction(1, 2)
        assert tau_k(p3, 5) == Fraction(1, 25)
        assert tau_k(p3, 1) == Fraction(1, 8)

    def test_against_definition(self):
        for j in range(1, 31):
            pj = projection_p(j)
            for k in range(1, 31):
                assert tau_k(pj, k) == catalog_coordinate(j, k)

    def test_first(self):
        p1 = projection_p(1)
        assert p1.prefix == (Fraction(1, 2),) and p1.tail_q == 1 and p1.tail_start == 2

    def test_bad_index(self):
        with pytest.raises(ValueError):
            projection_p(0)
        with pytest.raises(ValueError):
            tau_k(projection_p(1), 0)


class TestPairing:
    def test_examples(self):
        for j in (1, 2, 7, 40):
            assert k0_pairing_exact(projection_p(j)) == 1
        assert k0_pairing_exact(make_element([Fraction(1, 2)], Fraction(3, 7), 2)) == Fraction(3, 7)
        assert k0_pairing_exact(ZERO) == 0

    def test_cesaro_cross_check(self):
        g = make_element([Fraction(1, 2)], Fraction(3, 7), 2)
        k = np.arange(1, 100_001)
        seq = np.array([float(g[int(i)]) for i in k[:5]] + [3 / 7 / i ** 2 for i in k[5:]]) * k ** 2.0
        assert np.mean(seq) == pytest.approx(3 / 7, abs=1e-5)

    def test_not_in_scale(self):
        with pytest.raises(NotInScale):
            k0_pairing_exact(make_element([Fraction(1, 2)], 5, 2))
        assert k0_pairing_exact(make_element([Fraction(1, 2)], 5, 2), require_scale=False) == 5

    def test_homomorphism(self, rng):
        for _ in range(50):
            g, h = random_group_element(rng), random_group_element(rng)
            assert tail_pairing(g + h) == tail_pairing(g) + tail_pairing(h)

    def test_scale_sampler(self, rng):
        for _ in range(50):
            assert random_scale_element(rng).in_scale()


class TestSeries:
    def test_zeta_head(self):
        head, bound = series_tau_k(zeta_series(), 1, 40)
        expected = Fraction(1, 2) + sum(Fraction(1, 2 ** j * j * j) for j in range(2, 41))
        assert head == expected
        assert bound == Fraction(1, 40)
        assert 0 <= sum(1 / (2.0 ** j * j * j) for j in range(41, 200)) <= float(bound)

    def test_exact_head_matches_oracle(self):
        for k in range(1, 31):
            head, _ = series_tau_k(zeta_series(), k, 30)
            assert head == sum(Fraction(1, j * j) * catalog_coordinate(j, k) for j in range(1, 31))

    def test_single_term(self):
        s = element_series([(1, projection_p(2))])
        for k in (1, 2, 9):
            assert series_tau_k(s, k, 5) == (tau_k(projection_p(2), k), 0)

    def test_finite_series(self):
        s = zeta_series(10)
        head, bound = series_tau_k(s, 4, 20)
        assert bound == 0
        assert head == tau_k(s.as_element(), 4)

    def test_power_series(self):
        s = power_series(Fraction(3, 2))
        head, bound = series_tau_k(s, 3, 16)
        assert isinstance(head, float) and bound == Fraction(1, 2)
        with pytest.raises(ValueError):
            power_series(1)

    def test_sum_and_scale(self):
        s = zeta_series(5) + zeta_series(3).scaled(2)
        assert s.coeff(2) == Fraction(3, 4) and s.coeff(4) == Fraction(1, 16)
        assert np.allclose(s.float_coefficients(6), [3, 3 / 4, 3 / 9, 1 / 16, 1 / 25, 0])

    def test_bad_J(self):
        with pytest.raises(ValueError):
            series_tau_k(zeta_series(), 1, 0)


@given(elements(), elements(), elements())
def test_group_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + ZERO == a
    assert (a - b) + b == a


@given(elements(), elements())
def test_cone(a, b):
    if a.is_positive() and b.is_positive():
        assert (a + b).is_positive()
    if a.is_positive() and (-a).is_positive():
        assert a.is_zero()


@given(elements(), st.integers(1, 40))
def test_coordinates_are_linear(a, k):
    assert tau_k(a + a, k) == 2 * tau_k(a, k)
