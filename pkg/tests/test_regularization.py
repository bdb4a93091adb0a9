import math

import numpy as np
import pytest

from ktrace import properties
from ktrace.errors import EmptyInput, NotPositive, NotStrictlyPositive
from ktrace.regularization import (approximate_unit, domination_check, dyadic_generator,
                                   harmonic_generator, make_strictly_positive,
                                   regularization_series, regularize_trace, series_json)
from ktrace.sampling import random_matrix, random_positive, random_positive_contraction
from ktrace.weights import (FiniteRankTrace, InfiniteRankDiagonal, ScaledWeight,
                            ZeroOnFiniteRank)

TR = FiniteRankTrace()
ZERO = ZeroOnFiniteRank()


@pytest.fixture
def harmonic():
    return approximate_unit(harmonic_generator)


class TestStrictlyPositive:
    def test_identity(self):
        assert np.allclose(make_strictly_positive([np.eye(3)]), np.eye(3) / 2)

    def test_basis_projections(self):
        ps = [np.diag(np.eye(4)[k]) for k in range(4)]
        assert np.allclose(np.diag(make_strictly_positive(ps)), [2.0 ** -(k + 1) for k in range(4)])

    def test_random_list(self, rng):
        for _ in range(20):
            xs = [random_positive_contraction(4, rng) for _ in range(5)]
            a = make_strictly_positive(xs)
            assert np.linalg.eigvalsh(a)[0] > 0
            # every vector state sees at least one summand
            v = random_matrix(4, rng)[:, 0]
            v /= np.linalg.norm(v)
            val = (v.conj() @ a @ v).real
            assert val >= max(2.0 ** -(n + 1) * (v.conj() @ x @ v).real
                              for n, x in enumerate(xs)) - 1e-12

    def test_errors(self):
        with pytest.raises(EmptyInput):
            make_strictly_positive([])
        with pytest.raises(NotPositive):
            make_strictly_positive([np.diag([2.0, 0.0])])


class TestApproximateUnit:
    def test_identity_generator(self):
        unit = approximate_unit(np.eye(3))
        for n in (1, 2, 7):
            assert np.allclose(unit.d(n), np.eye(3))

    def test_dyadic_entries(self):
        unit = approximate_unit(dyadic_generator)
        d3 = np.diag(unit.d(3, 10)).real
        assert d3[0] == 1.0 and np.all(d3[1:] == 0.0)
        assert unit.support(3) == 1

    def test_dyadic_ladder(self):
        unit = approximate_unit(dyadic_generator)
        assert unit.ladder_residual(2, 40) <= 1e-12
        assert unit.ladder_residual(2) <= 1e-12

    def test_harmonic(self, harmonic):
        assert np.allclose(np.diag(harmonic.d(4, 6)).real, [1, 1, 1, 1, 0, 0])
        assert harmonic.support(4) == 4

    def test_ladder_on_random_generators(self, rng):
        for _ in range(100):
            assert properties.ladder_instance(rng) <= 1e-12

    def test_unit_convergence(self, harmonic, rng):
        a = random_matrix(6, rng)
        res = [harmonic.residual(n, a) for n in range(1, 9)]
        assert all(x >= y - 1e-12 for x, y in zip(res, res[1:]))
        assert res[-1] <= 1e-12

    def test_matrix_generator_range(self, rng):
        unit = approximate_unit(random_positive(5, rng) + 0.05 * np.eye(5))
        for n in (1, 3, 10):
            ev = np.linalg.eigvalsh(unit.d(n))
            assert ev[0] >= -1e-12 and ev[-1] <= 1 + 1e-12

    def test_rejects(self):
        with pytest.raises(NotStrictlyPositive):
            approximate_unit(np.diag([1.0, 0.0]))
        with pytest.raises(NotStrictlyPositive):
            approximate_unit(lambda k: np.where(k > 3, 0.0, 1.0 / k))
        with pytest.raises(ValueError):
            approximate_unit(lambda k: np.asarray(k, dtype=float))


class TestRegularize:
    def test_trace_is_reproduced(self, harmonic, rng):
        for _ in range(100):
            a = random_positive(int(rng.integers(1, 9)), rng)
            r = regularize_trace(TR, harmonic, a)
            assert r.converged and r.value == pytest.approx(np.trace(a).real, abs=1e-12)

    def test_cli_example(self, harmonic):
        assert regularize_trace(TR, harmonic, np.diag([1.0, 1.0, 0.0])).value == 2

    def test_zero_trace(self, harmonic, rng):
        for _ in range(100):
            a = random_positive(int(rng.integers(1, 9)), rng)
            assert regularize_trace(ZERO, harmonic, a).value == 0

    def test_formal_elements(self, harmonic):
        # d_n a d_n has finite rank for any formal diagonal a
        slow = InfiniteRankDiagonal(lambda k: 1.0 / k, summable=False)
        assert ZERO(slow) == math.inf
        values, stable = regularization_series(ZERO, harmonic, slow, n_max=8)
        assert stable and max(values) == 0
        r = regularize_trace(TR, harmonic, slow, n_max=20)
        assert r.status == "bracketed" and r.bracket[1] == math.inf
        fast = InfiniteRankDiagonal(lambda k: 2.0 ** -k, summable=True)
        r = regularize_trace(TR, approximate_unit(dyadic_generator), fast, n_max=200)
        assert r.value <= 1.0 + 1e-12

    def test_monotone(self, rng):
        units = [approximate_unit(harmonic_generator), approximate_unit(dyadic_generator),
                 approximate_unit(random_positive(6, rng) + 0.1 * np.eye(6))]
        for _ in range(100):
            a = random_positive(6, rng)
            for unit in units:
                values, _ = regularization_series(TR, unit, a, n_max=12)
                assert all(x <= y + 1e-10 for x, y in zip(values, values[1:]))

    def test_bounded_by_tau(self, rng):
        unit = approximate_unit(random_positive(5, rng) + 0.1 * np.eye(5))
        for _ in range(30):
            a = random_positive(5, rng)
            assert regularize_trace(TR, unit, a, n_max=16).value <= TR(a) + 1e-10

    def test_trace_property(self, harmonic, rng):
        for _ in range(30):
            x = random_matrix(5, rng)
            lhs = regularize_trace(TR, harmonic, x @ x.conj().T).value
            rhs = regularize_trace(TR, harmonic, x.conj().T @ x).value
            assert lhs == pytest.approx(rhs, abs=1e-8)

    def test_no_gap_along_increasing_sequence(self, harmonic):
        # a_M = diag(1/k^2, k <= M) increases to a; the regularized values follow
        full = InfiniteRankDiagonal(lambda k: 1.0 / np.asarray(k, float) ** 2, summable=True)
        target = regularize_trace(TR, harmonic, full, n_max=300).value
        assert target <= math.pi ** 2 / 6
        prev = 0.0
        for M in (1, 5, 10, 20, 200):
            a_m = np.diag(1.0 / np.arange(1, M + 1) ** 2)
            v = regularize_trace(TR, harmonic, a_m, n_max=M + 1).value
            assert prev <= v <= target + 1e-12
            prev = v
        assert target - prev <= 1e-2

    def test_not_positive(self, harmonic):
        with pytest.raises(NotPositive):
            regularize_trace(TR, harmonic, np.diag([1.0, -1.0]))

    def test_series_json(self):
        assert series_json([0.5, 1.0]) == {"1": 0.5, "2": 1.0}


class TestDomination:
    def test_zero(self, harmonic, rng):
        samples = [random_positive(4, rng) for _ in range(10)]
        assert domination_check(ZERO, TR, harmonic, samples)

    def test_half_trace(self, harmonic, rng):
        samples = [random_positive(4, rng) for _ in range(10)]
        assert domination_check(ScaledWeight(TR, 0.5), TR, harmonic, samples)

    def test_regularization_itself(self, harmonic, rng):
        samples = [random_positive(4, rng) for _ in range(10)]
        for a in samples:
            # phi = tau~: equality, so domination holds with zero slack
            assert regularize_trace(TR, harmonic, a).value == pytest.approx(TR(a), abs=1e-12)
        assert domination_check(TR, TR, harmonic, samples)

    def test_precondition(self, harmonic):
        with pytest.raises(ValueError):
            domination_check(ScaledWeight(TR, 2.0), TR, harmonic, [np.eye(2)])
