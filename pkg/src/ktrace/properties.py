"""Randomized property instances shared by the verification suite and the tests.

Each ``*_instance`` function draws one instance from ``rng`` and returns the
measured residual (or defect) that the caller compares with a tolerance.
"""

from __future__ import annotations

import numpy as np

from .matrix_core import adjoint, classify, operator_norm, projection_rank
from .pairing import (KClass, conjugation_probe, k0_pairing, stabilization_probe,
                      underline_psi)
from .projections import (mvn_equivalent, polar_partial_isometry, polarization_check,
                          round_to_projection, similarity, similarity_defect)
from .regularization import approximate_unit, dyadic_generator, harmonic_generator
from .sampling import (nearby_unitary, random_block_projection, random_matrix,
                       random_positive, random_projection, random_unitary)
from .unitization import UnitizedElement
from .weights import BlockTrace, DiagonalH, HSequence


def round_instance(rng: np.random.Generator, n: int = 6, delta: float = 0.1) -> dict:
    """Near-projection ``a`` with spectrum in ``[0, δ) ∪ (1-δ, 1]``.

    Returns the three defects: distance of ``f(a)`` from a projection,
    ``||f(a) - e|| - 2δ`` and ``Tr f(a) - bound Tr a`` (all ``<= 0`` up to rounding).
    """
    rank = int(rng.integers(0, n + 1))
    u = random_unitary(n, rng)
    eps = rng.uniform(0, 0.9 * delta, n)
    diag = np.where(np.arange(n) < rank, 1.0 - eps, eps)
    e = (u[:, :rank]) @ adjoint(u[:, :rank])
    a = (u * diag) @ adjoint(u)
    f, bound = round_to_projection(a, e, delta)
    return {
        "projection": operator_norm(f @ f - f) + operator_norm(f - adjoint(f)),
        "distance": operator_norm(f - e) - 2 * delta,
        "trace_bound": float(np.trace(f).real - bound * np.trace(a).real),
        "rank_kept": float(projection_rank(f) != rank),
    }


def similarity_instance(rng: np.random.Generator, n: int = 5) -> dict:
    e = random_projection(n, int(rng.integers(0, n + 1)), rng)
    w = nearby_unitary(n, rng, float(rng.uniform(0.0, 0.45)))
    e_prime = w @ e @ adjoint(w)
    wit = similarity(e, e_prime)
    half, dist = similarity_defect(wit)
    return {"norm_bound": half - dist, "conjugation": wit.conjugation_residual()}


def polar_instance(rng: np.random.Generator, n: int = 6) -> dict:
    """``y = e' u v f'`` and ``x = f' v* u^-1 e'`` with ``xy = f'``, ``yx = e'``.

    ``e'`` is a nearby copy of ``e`` (``u`` the similarity between them) and
    ``v`` a partial isometry from ``f'`` onto ``e``.
    """
    rank = int(rng.integers(1, n + 1))
    e = random_projection(n, rank, rng)
    w = nearby_unitary(n, rng, float(rng.uniform(0.0, 0.4)))
    e_prime = w @ e @ adjoint(w)
    f_prime = random_projection(n, rank, rng)
    v = mvn_equivalent(e, f_prime).v
    u = similarity(e, e_prime).u
    u_inv = np.linalg.inv(u)
    y = e_prime @ u @ v @ f_prime
    x = f_prime @ adjoint(v) @ u_inv @ e_prime
    wit = polar_partial_isometry(y, e_prime, f_prime)
    left, right = wit.residuals()
    return {"w_identities": max(left, right),
            "xy_yx": max(operator_norm(x @ y - f_prime), operator_norm(y @ x - e_prime))}


def polarization_instance(rng: np.random.Generator, n: int = 5) -> float:
    a, b = random_matrix(n, rng), random_matrix(n, rng)
    scale = max(1.0, operator_norm(a) * operator_norm(b))
    return max(polarization_check(a, b)) / scale


def ladder_instance(rng: np.random.Generator) -> float:
    n = int(rng.integers(1, 40))
    choice = int(rng.integers(0, 3))
    if choice == 0:
        a0 = random_positive(4, rng) + 0.05 * np.eye(4)
        unit = approximate_unit(a0 / operator_norm(a0))
        return unit.ladder_residual(n)
    gen = harmonic_generator if choice == 1 else dyadic_generator
    return approximate_unit(gen).ladder_residual(n, size=64)


def attained_h(rng: np.random.Generator) -> DiagonalH:
    """``h`` with a random prefix and a constant tail, so the infimum is attained."""
    prefix = tuple(float(v) for v in rng.uniform(0, 3, int(rng.integers(0, 6))))
    return DiagonalH(HSequence(prefix, tail=float(rng.uniform(0.1, 2))))


def additivity_instance(rng: np.random.Generator, corner: int = 512, size: int = 12) -> float:
    """``|u(e+f) - u(e) - u(f)|`` for orthogonal ``e``, ``f``."""
    psi = attained_h(rng)
    r1, r2 = (int(r) for r in rng.integers(0, size // 2 + 1, 2))
    u = random_unitary(size, rng)
    e = u[:, :r1] @ adjoint(u[:, :r1])
    f = u[:, r1:r1 + r2] @ adjoint(u[:, r1:r1 + r2])
    vals = [underline_psi(psi, p, corner=corner).value for p in (e + f, e, f)]
    return abs(vals[0] - vals[1] - vals[2])


def random_unitized_projection(blocks, level: int, rng: np.random.Generator) -> UnitizedElement:
    """Projection ``(P - λ⊗1, λ)`` over the unitization of a block algebra."""
    inner = sum(blocks)
    p = random_block_projection(blocks, level, rng)
    lam = np.diag(rng.integers(0, 2, level).astype(np.float64))
    return UnitizedElement(p - np.kron(lam, np.eye(inner)), lam)


def random_block_trace(rng: np.random.Generator) -> BlockTrace:
    blocks = [int(b) for b in rng.integers(1, 4, int(rng.integers(1, 4)))]
    weights = [int(w) for w in rng.integers(0, 6, len(blocks))]
    return BlockTrace(blocks, weights)


def k0_invariance_instance(rng: np.random.Generator) -> float:
    tau = random_block_trace(rng)
    blocks = tau.model.blocks
    level = int(rng.integers(1, 3))
    e = random_unitized_projection(blocks, level, rng)
    f = random_unitized_projection(blocks, level, rng)
    r = random_unitized_projection(blocks, int(rng.integers(1, 3)), rng)
    drift = max(conjugation_probe(tau, e, rng), conjugation_probe(tau, f, rng))
    return max(drift, stabilization_probe(tau, KClass(e, f), r))


def positivity_instance(rng: np.random.Generator) -> float:
    """``τ_*([e])`` for a random projection ``e`` over ``A``; must be ``>= 0``."""
    tau = random_block_trace(rng)
    level = int(rng.integers(1, 4))
    p = random_block_projection(tau.model.blocks, level, rng)
    zero = UnitizedElement.from_model(np.zeros_like(p), level)
    return k0_pairing(tau, KClass(UnitizedElement.from_model(p, level), zero))


def is_projection(x) -> bool:
    return classify(x) == "projection"
