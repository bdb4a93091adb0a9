"""Manipulating projections: rounding, similarity, polar parts, equivalence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (CornerNotInvertible, NotInvertible, NotNearProjection,
                     NotProjection, SpectralGapViolation, TooFarApart)
from .matrix_core import (BlockStructure, adjoint, as_matrix, classify, delta_ramp,
                          functional_calculus, hermitian_spectrum, operator_norm,
                          range_basis)

TOL_PROJ = 1e-8
TOL_INV = 1e-10


@dataclass(frozen=True)
class EquivalenceWitness:
    """Partial isometry ``v`` with ``v v* = left`` and ``v* v = right``."""

    v: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def residuals(self) -> tuple[float, float]:
        v = self.v
        return (operator_norm(v @ adjoint(v) - self.left),
                operator_norm(adjoint(v) @ v - self.right))

    def is_valid(self, tol: float = TOL_PROJ) -> bool:
        return max(self.residuals()) <= tol

    def inverse(self) -> "EquivalenceWitness":
        return EquivalenceWitness(adjoint(self.v), self.right, self.left)

    def compose(self, other: "EquivalenceWitness") -> "EquivalenceWitness":
        """Chain ``left ~ right = other.left ~ other.right``."""
        return EquivalenceWitness(self.v @ other.v, self.left, other.right)


@dataclass(frozen=True)
class SimilarityWitness:
    u: np.ndarray
    u_inv: np.ndarray
    from_proj: np.ndarray
    to_proj: np.ndarray

    def conjugation_residual(self) -> float:
        return operator_norm(self.u @ self.from_proj @ self.u_inv - self.to_proj)

    def inverse_residual(self) -> float:
        return operator_norm(self.u @ self.u_inv - np.eye(self.u.shape[0]))


def _require_projection(e, name: str = "e", tol: float = TOL_PROJ) -> np.ndarray:
    e = as_matrix(e)
    if classify(e, tol) != "projection":
        raise NotProjection(f"{name} is not a projection")
    return e


def round_to_projection(a, e, delta: float) -> tuple[np.ndarray, float]:
    """Replace a near-projection ``a`` by the projection ``f(a)``.

    ``f`` is the delta ramp.  Returns ``(f(a), 1/(1-delta))``; the second
    value bounds ``psi(f(a)) / psi(a)`` for any weight ``psi`` because
    ``f(t) <= t/(1-delta)`` on the spectrum of ``a``.
    """
    a = as_matrix(a)
    e = _require_projection(e)
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    gap = operator_norm(a - e)
    if gap > delta + 1e-12:
        raise NotNearProjection(f"||a - e|| = {gap:.3g} exceeds delta = {delta}")
    vals = hermitian_spectrum(a).eigenvalues
    tol = 1e-12
    if vals.size and (vals[0] < -tol or vals[-1] > 1 + tol):
        raise SpectralGapViolation("spectrum of a leaves [0, 1]")
    inside = (vals > delta + tol) & (vals < 1 - delta - tol)
    if np.any(inside):
        raise SpectralGapViolation(
            f"spectrum meets ({delta}, {1 - delta}) at {vals[inside][0]:.3g}")
    return functional_calculus(delta_ramp(delta), a), 1.0 / (1.0 - delta)


def similarity(e, e_prime) -> SimilarityWitness:
    e = _require_projection(e)
    ep = _require_projection(e_prime, "e_prime")
    if e.shape != ep.shape:
        raise ValueError("projections differ in size")
    dist = operator_norm(e - ep)
    if dist >= 1.0:
        raise TooFarApart(f"||e - e'|| = {dist:.3g} >= 1")
    one = np.eye(e.shape[0])
    u = (2 * ep - one) @ (2 * e - one) + one
    return SimilarityWitness(u, np.linalg.inv(u), e, ep)


def similarity_defect(w: SimilarityWitness) -> tuple[float, float]:
    """``(||1 - u/2||, ||e' - e||)``; the first never exceeds the second."""
    one = np.eye(w.u.shape[0])
    return operator_norm(one - w.u / 2), operator_norm(w.to_proj - w.from_proj)


def polar_partial_isometry(y, e_prime, f_prime) -> EquivalenceWitness:
    """``w = y (y* y)^{-1/2}`` with the inverse root taken in the corner of ``f'``.

    Needs ``e' y = y = y f'``.  Eigenvalues of the compressed ``y* y`` below
    ``TOL_INV`` are rejected instead of regularized.
    """
    y = as_matrix(y)
    ep = _require_projection(e_prime, "e_prime")
    fp = _require_projection(f_prime, "f_prime")
    scale = max(1.0, operator_norm(y))
    if operator_norm(ep @ y - y) > TOL_PROJ * scale or operator_norm(y @ fp - y) > TOL_PROJ * scale:
        raise ValueError("y must satisfy e' y = y = y f'")
    basis = range_basis(fp)
    corner = adjoint(basis) @ adjoint(y) @ y @ basis
    spec = hermitian_spectrum(corner)
    if spec.eigenvalues.size and spec.eigenvalues[0] < TOL_INV:
        raise CornerNotInvertible(
            f"y*y has corner eigenvalue {spec.eigenvalues[0]:.3g} < {TOL_INV}")
    inv_root = (spec.frame / np.sqrt(spec.eigenvalues)) @ adjoint(spec.frame)
    w = y @ basis @ inv_root @ adjoint(basis)
    return EquivalenceWitness(w, ep, fp)


def orthogonalize(p, q) -> tuple[np.ndarray, np.ndarray]:
    """Move ``p`` into the lower block of ``M_2k`` so it is orthogonal to ``q``.

    ``q`` is regarded as sitting in the upper-left block.  Returns the
    rotated projection and the block-swap unitary ``S``.
    """
    p = _require_projection(p, "p")
    q = _require_projection(q, "q")
    if p.shape != q.shape:
        raise ValueError("p and q must have the same size")
    k = p.shape[0]
    eye, zero = np.eye(k), np.zeros((k, k))
    s = np.block([[zero, eye], [eye, zero]]).astype(np.complex128)
    big_p = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    big_p[:k, :k] = p
    return s @ big_p @ adjoint(s), s


def orthogonalize_witness(p, s) -> EquivalenceWitness:
    """Witness that the rotated copy of ``p`` is equivalent to ``p ⊕ 0``."""
    p = as_matrix(p)
    k = p.shape[0]
    big_p = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    big_p[:k, :k] = p
    return EquivalenceWitness(s @ big_p, s @ big_p @ adjoint(s), big_p)


def _scalar_witness(e: np.ndarray, f: np.ndarray) -> Optional[np.ndarray]:
    ue, uf = range_basis(e), range_basis(f)
    if ue.shape[1] != uf.shape[1]:
        return None
    return ue @ adjoint(uf)


def mvn_equivalent(e, f, blocks: Optional[Sequence[int]] = None,
                   level: int = 1) -> Optional[EquivalenceWitness]:
    """Murray-von Neumann equivalence over scalars or a block algebra.

    With ``blocks`` the projections live in ``M_level(M_{n_1} ⊕ ...)`` and the
    test is per block: equal ranks in every summand.
    """
    e = _require_projection(e)
    f = _require_projection(f, "f")
    if e.shape != f.shape:
        raise ValueError("projections differ in size")
    if blocks is None:
        v = _scalar_witness(e, f)
        return None if v is None else EquivalenceWitness(v, e, f)
    structure = BlockStructure(tuple(blocks))
    parts = []
    for eb, fb in zip(structure.blocks_of(e, level), structure.blocks_of(f, level)):
        v = _scalar_witness(eb, fb)
        if v is None:
            return None
        parts.append(v)
    return EquivalenceWitness(structure.assemble(parts, level), e, f)


def polarization_check(a, b) -> tuple[float, float]:
    """Residuals of the two polarization identities for ``ab`` and ``ba``."""
    a, b = as_matrix(a), as_matrix(b)
    lhs = np.zeros_like(a)
    rhs = np.zeros_like(a)
    for k in range(1, 5):
        ik = 1j ** k
        z = b + ik * adjoint(a)
        lhs += ik * adjoint(z) @ z
        rhs += ik * z @ adjoint(z)
    return operator_norm(a @ b - lhs / 4), operator_norm(b @ a - rhs / 4)


def inverse_in_ideal_check(x, ideal_member: Callable[[np.ndarray], bool],
                           tol: float = 1e-9) -> bool:
    """Invert ``x = (a, k)`` and confirm the non-scalar part stays in the ideal.

    Checks ``b = (k^{-1} ⊗ 1)(-a (m ⊗ 1) - a b)`` for the inverse ``(b, m)``
    and that ``ideal_member(b)`` holds.
    """
    from .unitization import UnitizedElement  # local: avoids an import cycle

    if not isinstance(x, UnitizedElement):
        raise TypeError("x must be a UnitizedElement")
    if not ideal_member(x.a):
        raise ValueError("non-scalar part of x is not in the ideal")
    if abs(np.linalg.det(x.lam)) < 1e-14:
        raise NotInvertible("scalar part is singular")
    inv = x.inverse()
    k_inv = np.linalg.inv(x.lam)
    one = np.eye(x.inner)
    m_big = np.kron(inv.lam, one)
    predicted = np.kron(k_inv, one) @ (-x.a @ m_big - x.a @ inv.a)
    scale = max(1.0, operator_norm(inv.a))
    ok = (operator_norm(inv.lam - k_inv) <= tol * max(1.0, operator_norm(k_inv))
          and operator_norm(predicted - inv.a) <= tol * scale)
    return bool(ok and ideal_member(inv.a))
