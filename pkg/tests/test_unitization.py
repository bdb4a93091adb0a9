import numpy as np
import pytest

from ktrace.errors import NotInvertible
from ktrace.matrix_core import operator_norm
from ktrace.sampling import random_matrix
from ktrace.unitization import UnitizedElement


def rand_elem(rng, level=2, inner=3):
    return UnitizedElement(random_matrix(level * inner, rng), random_matrix(level, rng))


def test_product_rule(rng):
    x, y = rand_elem(rng), rand_elem(rng)
    lift = lambda lam: np.kron(lam, np.eye(3))
    prod = x @ y
    assert np.allclose(prod.a, x.a @ y.a + lift(x.lam) @ y.a + x.a @ lift(y.lam))
    assert np.allclose(prod.lam, x.lam @ y.lam)


def test_representation_is_multiplicative(rng):
    x, y = rand_elem(rng), rand_elem(rng)
    assert operator_norm((x @ y).to_matrix() - x.to_matrix() @ y.to_matrix()) <= 1e-10
    assert operator_norm(x.H.to_matrix() - x.to_matrix().conj().T) <= 1e-12


def test_round_trips(rng):
    x = rand_elem(rng)
    back = UnitizedElement.from_matrix(x.to_matrix(), x.level, x.inner)
    assert np.allclose(back.a, x.a) and np.allclose(back.lam, x.lam)
    again = UnitizedElement.from_json(x.to_json())
    assert np.array_equal(again.a, x.a)


def test_identity_and_inverse(rng):
    one = UnitizedElement.identity(2, 3)
    x = rand_elem(rng)
    assert np.allclose((one @ x).a, x.a)
    x = UnitizedElement(0.1 * random_matrix(6, rng), np.eye(2) * 2)
    prod = x @ x.inverse()
    assert np.allclose(prod.a, 0, atol=1e-12) and np.allclose(prod.lam, np.eye(2))
    with pytest.raises(NotInvertible):
        UnitizedElement(np.zeros((3, 3)), np.zeros((1, 1))).inverse()


def test_projection_and_scalar_rank():
    e = UnitizedElement(np.diag([-1.0, 0.0]), np.eye(1))
    assert e.is_projection() and e.scalar_rank() == 1
    assert UnitizedElement.from_model(np.diag([1.0, 0.0]), 1).scalar_rank() == 0


def test_shape_validation():
    with pytest.raises(ValueError):
        UnitizedElement(np.zeros((3, 3)), np.zeros((2, 2)))
