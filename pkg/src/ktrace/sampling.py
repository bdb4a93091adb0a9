"""Random instances for property checks.  Every function takes an explicit Generator."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .matrix_core import BlockStructure, adjoint


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (z + adjoint(z)) / 2


def random_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_positive(n: int, rng: np.random.Generator) -> np.ndarray:
    z = random_matrix(n, rng)
    return z @ adjoint(z) / n


def random_positive_contraction(n: int, rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(n, rng)
    return (u * rng.uniform(0, 1, n)) @ adjoint(u)


def random_projection(n: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(n, rng)[:, :rank]
    return u @ adjoint(u)


def nearby_unitary(n: int, rng: np.random.Generator, size: float) -> np.ndarray:
    """``exp(iH)`` with ``||H|| = size``."""
    h = random_hermitian(n, rng)
    h *= size / np.linalg.norm(h, 2)
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ adjoint(vecs)


def random_block_projection(blocks: Sequence[int], level: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Random projection in ``M_level(M_{n_1} ⊕ ...)``."""
    structure = BlockStructure(tuple(blocks))
    parts = []
    for size in structure.sizes:
        n = level * size
        parts.append(random_projection(n, int(rng.integers(0, n + 1)), rng))
    return structure.assemble(parts, level)


def random_block_positive(blocks: Sequence[int], level: int,
                          rng: np.random.Generator) -> np.ndarray:
    structure = BlockStructure(tuple(blocks))
    return structure.assemble([random_positive(level * s, rng) for s in structure.sizes], level)


def random_model_positive(psi, rng: np.random.Generator, size: int = 3) -> np.ndarray:
    """Positive model element suited to ``psi``'s algebra."""
    if psi.model.kind == "finite_blocks":
        return random_block_positive(psi.model.blocks, 1, rng)
    return random_positive(size, rng)


def random_model_projection(psi, level: int, rng: np.random.Generator,
                            corner: int = 4) -> np.ndarray:
    if psi.model.kind == "finite_blocks":
        return random_block_projection(psi.model.blocks, level, rng)
    n = level * corner
    return random_projection(n, int(rng.integers(0, n + 1)), rng)


def random_fraction(rng: np.random.Generator, lo: Fraction, hi: Fraction,
                    denominator: int = 97) -> Fraction:
    """Rational strictly inside ``(lo, hi)``."""
    t = Fraction(int(rng.integers(1, denominator)), denominator)
    return lo + (hi - lo) * t


def random_scale_element(rng: np.random.Generator, max_start: int = 6):
    """Random member of the scale: positive, every coordinate below 1."""
    from .dimension_group import make_element

    n = int(rng.integers(1, max_start + 1))
    prefix = [random_fraction(rng, Fraction(0), Fraction(1)) for _ in range(n - 1)]
    q = random_fraction(rng, Fraction(0), Fraction(min(n * n, 4)))
    return make_element(prefix, q, n)


def random_group_element(rng: np.random.Generator, max_start: int = 6):
    """Random element of the group (any signs)."""
    from .dimension_group import make_element

    n = int(rng.integers(1, max_start + 1))
    prefix = [random_fraction(rng, Fraction(-2), Fraction(2)) for _ in range(n - 1)]
    q = random_fraction(rng, Fraction(-3), Fraction(3))
    return make_element(prefix, q, n)
