"""Matrices over the unitization ``A† = A ⊕ C`` of a matrix model ``A ⊆ M_D``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInvertible
from .matrix_core import adjoint, as_matrix, classify, direct_sum, matrix_from_json, matrix_to_json


@dataclass(frozen=True)
class UnitizedElement:
    """Element ``(a, lam)`` of ``M_n(A†)``.

    ``a`` is the ``nD x nD`` non-scalar part and ``lam`` the ``n x n`` scalar
    matrix.  Multiplication follows ``(a,λ)(b,μ) = (ab + λb + aμ, λμ)`` with
    scalar matrices acting as ``λ ⊗ 1_D``.
    """

    a: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        a, lam = as_matrix(self.a), as_matrix(self.lam)
        if lam.shape[0] == 0 or a.shape[0] % lam.shape[0]:
            raise ValueError("non-scalar part size must be a multiple of the level")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "lam", lam)

    @property
    def level(self) -> int:
        return self.lam.shape[0]

    @property
    def inner(self) -> int:
        return self.a.shape[0] // self.lam.shape[0]

    def _lift(self, lam: np.ndarray) -> np.ndarray:
        return np.kron(lam, np.eye(self.inner))

    def __matmul__(self, other: "UnitizedElement") -> "UnitizedElement":
        a = self.a @ other.a + self._lift(self.lam) @ other.a + self.a @ self._lift(other.lam)
        return UnitizedElement(a, self.lam @ other.lam)

    def __add__(self, other: "UnitizedElement") -> "UnitizedElement":
        return UnitizedElement(self.a + other.a, self.lam + other.lam)

    def __sub__(self, other: "UnitizedElement") -> "UnitizedElement":
        return UnitizedElement(self.a - other.a, self.lam - other.lam)

    def __mul__(self, t: complex) -> "UnitizedElement":
        return UnitizedElement(t * self.a, t * self.lam)

    __rmul__ = __mul__

    @property
    def H(self) -> "UnitizedElement":
        return UnitizedElement(adjoint(self.a), adjoint(self.lam))

    @classmethod
    def identity(cls, level: int, inner: int) -> "UnitizedElement":
        return cls(np.zeros((level * inner, level * inner)), np.eye(level))

    @classmethod
    def from_model(cls, a, level: int) -> "UnitizedElement":
        """View ``a ∈ M_level(A)`` inside ``M_level(A†)`` (zero scalar part)."""
        return cls(a, np.zeros((level, level)))

    def to_matrix(self) -> np.ndarray:
        """Faithful representation ``(a + λ⊗1) ⊕ λ``."""
        return direct_sum(self.a + self._lift(self.lam), self.lam)

    @classmethod
    def from_matrix(cls, r: np.ndarray, level: int, inner: int) -> "UnitizedElement":
        n = level * inner
        lam = r[n:, n:]
        return cls(r[:n, :n] - np.kron(lam, np.eye(inner)), lam)

    def inverse(self) -> "UnitizedElement":
        r = self.to_matrix()
        if np.linalg.cond(r) > 1e12:
            raise NotInvertible("element is not invertible in the unitization")
        return UnitizedElement.from_matrix(np.linalg.inv(r), self.level, self.inner)

    def is_projection(self, tol: float = 1e-8) -> bool:
        return classify(self.to_matrix(), tol) == "projection"

    def scalar_rank(self) -> int:
        """Rank of the scalar part; exact integer for projections."""
        return int(np.sum(np.linalg.eigvalsh((self.lam + adjoint(self.lam)) / 2) > 0.5))

    def direct_sum(self, other: "UnitizedElement") -> "UnitizedElement":
        if self.inner != other.inner:
            raise ValueError("inner dimensions differ")
        return UnitizedElement(direct_sum(self.a, other.a), direct_sum(self.lam, other.lam))

    def to_json(self) -> dict:
        return {"a": matrix_to_json(self.a), "lambda": matrix_to_json(self.lam)}

    @classmethod
    def from_json(cls, obj: dict) -> "UnitizedElement":
        return cls(matrix_from_json(obj["a"]), matrix_from_json(obj["lambda"]))
