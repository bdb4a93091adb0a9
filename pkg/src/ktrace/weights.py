"""Weights and traces on the two model algebras.

Two models are supported.  ``finite_blocks``: ``A = M_{n_1} ⊕ ... ⊕ M_{n_r}``
realized as block-diagonal ``D x D`` matrices.  ``compact_model``: the compact
operators on ``l^2``, where every element is a finite corner matrix; the
single infinite-rank object is :class:`InfiniteRankDiagonal`, a formal
diagonal operator used to exercise the ``∞`` branches.

Values live in ``[0, ∞]`` and are returned as floats (``math.inf`` for ∞).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import NotPositive
from .matrix_core import (BlockStructure, adjoint, as_matrix, classify, hermitian_spectrum,
                          projection_rank)

WEIGHT_TOL = 1e-8


@dataclass(frozen=True)
class AlgebraModel:
    kind: str
    blocks: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("finite_blocks", "compact_model"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "finite_blocks":
            BlockStructure(tuple(self.blocks))

    @classmethod
    def finite_blocks(cls, blocks: Sequence[int]) -> "AlgebraModel":
        return cls("finite_blocks", tuple(int(b) for b in blocks))

    @classmethod
    def compact(cls) -> "AlgebraModel":
        return cls("compact_model")

    @property
    def structure(self) -> BlockStructure:
        return BlockStructure(self.blocks)


@dataclass(frozen=True)
class InfiniteRankDiagonal:
    """Formal positive diagonal operator ``diag(d_1, d_2, ...)`` of infinite rank.

    ``entries`` maps an integer array of 1-based indices to the diagonal.
    ``summable`` records whether ``sum d_k`` converges and
    ``square_summable`` whether ``sum |d_k|^2`` does (defaults to
    ``summable``); both are metadata the caller vouches for.
    """

    entries: Callable[[np.ndarray], np.ndarray]
    summable: bool
    name: str = "diag"
    square_summable: Optional[bool] = None

    def __post_init__(self):
        if self.square_summable is None:
            object.__setattr__(self, "square_summable", self.summable)

    def corner(self, m: int) -> np.ndarray:
        return np.diag(self.entries(np.arange(1, m + 1)).astype(np.complex128))

    def truncation_error(self, m: int, probe: int = 10_000) -> float:
        """Sup of the discarded diagonal, sampled on ``m+1 .. m+probe``."""
        return float(np.max(np.abs(self.entries(np.arange(m + 1, m + probe + 1)))))

    def scaled(self, t: float) -> "InfiniteRankDiagonal":
        return InfiniteRankDiagonal(lambda k, f=self.entries: t * f(k), self.summable,
                                    f"{t}*{self.name}", self.square_summable)


Element = Union[np.ndarray, InfiniteRankDiagonal]


@dataclass(frozen=True)
class HSequence:
    """Bounded nonnegative diagonal ``h``: explicit prefix then a constant or a family."""

    values: tuple[float, ...] = ()
    tail: Optional[float] = None
    family: Optional[str] = None

    FAMILIES = {"one_plus_inverse": lambda n: 1.0 + 1.0 / n}

    def __post_init__(self):
        if (self.tail is None) == (self.family is None):
            raise ValueError("give exactly one of tail or family")
        if self.family is not None and self.family not in self.FAMILIES:
            raise ValueError(f"unknown h family {self.family!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if any(v < 0 for v in self.values) or (self.tail is not None and self.tail < 0):
            raise ValueError("h must be nonnegative")

    def __call__(self, m: int) -> np.ndarray:
        """``h_1 .. h_m``."""
        out = np.empty(m, dtype=np.float64)
        p = min(m, len(self.values))
        out[:p] = self.values[:p]
        if m > p:
            idx = np.arange(p + 1, m + 1, dtype=np.float64)
            if self.family is not None:
                out[p:] = self.FAMILIES[self.family](idx)
            else:
                out[p:] = self.tail
        return out

    @property
    def eventual_value(self) -> float:
        return float(self.tail) if self.tail is not None else 1.0

    def to_json(self) -> dict:
        out: dict = {"values": list(self.values)}
        if self.family is not None:
            out["family"] = self.family
        else:
            out["tail"] = self.tail
        return out


class Weight:
    """A weight ``A^+ -> [0, ∞]`` on one of the model algebras."""

    kind: str = ""
    is_trace: bool = False
    model: AlgebraModel

    def __call__(self, a: Element) -> float:
        raise NotImplementedError

    def linear(self, a: np.ndarray) -> complex:
        """Linear extension to the span of the finite part (the ideal ``M``)."""
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class BlockTrace(Weight):
    """``sum_b w_b Tr(a_b)`` on ``M_{n_1} ⊕ ... ⊕ M_{n_r}``."""

    kind = "block_trace"
    is_trace = True

    def __init__(self, blocks: Sequence[int], weights: Sequence):
        self.model = AlgebraModel.finite_blocks(blocks)
        self.weights = tuple(Fraction(w) for w in weights)
        if len(self.weights) != len(self.model.blocks) or any(w < 0 for w in self.weights):
            raise ValueError("need one nonnegative weight per block")

    def linear(self, a) -> complex:
        if isinstance(a, InfiniteRankDiagonal):
            raise TypeError("finite block algebra has no infinite-rank elements")
        a = as_matrix(a)
        parts = self.model.structure.blocks_of(a)
        return complex(sum(float(w) * np.trace(p) for w, p in zip(self.weights, parts)))

    def __call__(self, a) -> float:
        return max(0.0, self.linear(a).real)

    def rank_value(self, e: np.ndarray, level: int = 1) -> Fraction:
        """Exact ``sum_b w_b rank_b(e)`` for a projection ``e`` in ``M_level(A)``."""
        ranks = [projection_rank(p) for p in self.model.structure.blocks_of(e, level)]
        return sum((w * r for w, r in zip(self.weights, ranks)), Fraction(0))

    def params(self) -> dict:
        return {"blocks": list(self.model.blocks), "weights": [str(w) for w in self.weights]}


class DiagonalH(Weight):
    """``a -> Tr(h a)`` on the compact operators, ``h`` a bounded positive diagonal."""

    kind = "diagonal_h"
    is_trace = False

    def __init__(self, h: HSequence):
        self.model = AlgebraModel.compact()
        self.h = h

    def linear(self, a) -> complex:
        a = as_matrix(a)
        return complex(np.sum(self.h(a.shape[0]) * np.diag(a)))

    def __call__(self, a) -> float:
        if isinstance(a, InfiniteRankDiagonal):
            if not a.summable and self.h.eventual_value > 0:
                return math.inf
            idx = np.arange(1, 100_001)
            return float(np.sum(self.h(idx.size) * a.entries(idx)))
        return max(0.0, self.linear(a).real)

    def params(self) -> dict:
        return self.h.to_json()


class FiniteRankTrace(Weight):
    """``Tr(a)`` on finite-rank elements, ``∞`` otherwise."""

    kind = "finite_rank_tr_else_inf"
    is_trace = True

    def __init__(self):
        self.model = AlgebraModel.compact()

    def linear(self, a) -> complex:
        return complex(np.trace(as_matrix(a)))

    def __call__(self, a) -> float:
        if isinstance(a, InfiniteRankDiagonal):
            return math.inf
        return max(0.0, self.linear(a).real)


class ZeroOnFiniteRank(Weight):
    """``0`` on finite-rank elements, ``∞`` otherwise.

    Stands in for a Dixmier trace: it is densely defined and vanishes on
    finite rank, the only two properties used here.
    """

    kind = "zero_on_finite_rank_else_inf"
    is_trace = True

    def __init__(self):
        self.model = AlgebraModel.compact()

    def linear(self, a) -> complex:
        as_matrix(a)
        return 0j

    def __call__(self, a) -> float:
        if isinstance(a, InfiniteRankDiagonal):
            return math.inf
        return 0.0


class ScaledWeight(Weight):
    """``t * psi``; used for dominated weights such as ``Tr / 2``."""

    def __init__(self, base: Weight, t: float):
        self.base, self.t = base, float(t)
        self.kind = f"scaled_{base.kind}"
        self.is_trace = base.is_trace
        self.model = base.model

    def linear(self, a) -> complex:
        return self.t * self.base.linear(a)

    def __call__(self, a) -> float:
        v = self.base(a)
        return 0.0 if self.t == 0 else self.t * v

    def params(self) -> dict:
        return {"base": self.base.to_json(), "factor": self.t}


def weight_from_json(obj: dict) -> Weight:
    try:
        kind = obj["kind"]
        params = obj.get("params", {}) or {}
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed weight: {exc}") from exc
    if kind == "block_trace":
        return BlockTrace(params["blocks"], params["weights"])
    if kind == "diagonal_h":
        return DiagonalH(HSequence(tuple(params.get("values", ())), params.get("tail"),
                                   params.get("family")))
    if kind in ("finite_rank_tr_else_inf", "finite_rank_tr"):
        return FiniteRankTrace()
    if kind in ("zero_on_finite_rank_else_inf", "zero_on_finite_rank"):
        return ZeroOnFiniteRank()
    raise ValueError(f"unknown weight kind {kind!r}")


def evaluate_weight(psi: Weight, a: Element, tol: float = WEIGHT_TOL) -> float:
    if not isinstance(a, InfiniteRankDiagonal):
        if classify(a, tol) not in ("projection", "positive"):
            raise NotPositive("weights are evaluated on positive elements only")
    return psi(a)


@dataclass
class AmplifiedWeight:
    """``psi_k(x) = sum_i psi(x_ii)`` on ``M_k`` over the model."""

    psi: Weight
    k: int

    def diagonal_entries(self, x: np.ndarray) -> list[np.ndarray]:
        x = as_matrix(x)
        if x.shape[0] % self.k:
            raise ValueError(f"size {x.shape[0]} is not a multiple of k = {self.k}")
        d = x.shape[0] // self.k
        return [x[i * d:(i + 1) * d, i * d:(i + 1) * d] for i in range(self.k)]

    def __call__(self, x) -> float:
        return float(sum(self.psi(xii) for xii in self.diagonal_entries(x)))

    def linear(self, x) -> complex:
        return complex(sum(self.psi.linear(xii) for xii in self.diagonal_entries(x)))


def amplify_weight(psi: Weight, k: int) -> AmplifiedWeight:
    if k < 1:
        raise ValueError("k must be >= 1")
    return AmplifiedWeight(psi, int(k))


def embed_corner(x: np.ndarray, k: int) -> np.ndarray:
    """``M_k(A) ⊂ M_{k+1}(A)``: add a zero row and column of entries."""
    x = as_matrix(x)
    d = x.shape[0] // k
    out = np.zeros(((k + 1) * d, (k + 1) * d), dtype=np.complex128)
    out[: k * d, : k * d] = x
    return out


def positive_decomposition(a: np.ndarray) -> list[tuple[complex, np.ndarray]]:
    """``a = sum c_i p_i`` with four positive ``p_i`` (real/imaginary, +/- parts)."""
    a = as_matrix(a)
    out = []
    for coef, h in ((1.0, (a + adjoint(a)) / 2), (1j, (a - adjoint(a)) / 2j)):
        spec = hermitian_spectrum(h)
        pos = (spec.frame * np.clip(spec.eigenvalues, 0, None)) @ adjoint(spec.frame)
        neg = (spec.frame * np.clip(-spec.eigenvalues, 0, None)) @ adjoint(spec.frame)
        out += [(coef, pos), (-coef, neg)]
    return out


def ideal_membership(psi: Weight, a: Element) -> str:
    """Strongest of ``in_M_plus``, ``in_M``, ``in_N``, ``outside``."""
    if isinstance(a, InfiniteRankDiagonal):
        # a* a is again diagonal of infinite rank
        if math.isfinite(psi(a)):
            return "in_M_plus"
        square = InfiniteRankDiagonal(lambda k, f=a.entries: np.abs(f(k)) ** 2,
                                      bool(a.square_summable), f"|{a.name}|^2")
        return "in_N" if math.isfinite(psi(square)) else "outside"
    a = as_matrix(a)
    label = classify(a)
    if label in ("projection", "positive") and math.isfinite(psi(a)):
        return "in_M_plus"
    if all(math.isfinite(psi(p)) for _, p in positive_decomposition(a)):
        return "in_M"
    if math.isfinite(psi(adjoint(a) @ a)):
        return "in_N"
    return "outside"


def tensor_identity_check(psi: Weight, k: int, samples: int,
                          rng: np.random.Generator, size: int = 3) -> float:
    """Max ``|psi_2k(x) - (psi ⊗ Tr_2k)(x)|`` over random sums of simple tensors.

    A simple tensor ``a ⊗ s`` is the matrix ``kron(s, a)`` in the
    ``(matrix index, model index)`` layout; the right side is evaluated as
    ``sum psi(a_i) Tr(s_i)``.
    """
    from .sampling import random_model_positive, random_positive

    amp = amplify_weight(psi, 2 * k)
    worst = 0.0
    for _ in range(samples):
        terms = int(rng.integers(1, 4))
        x = 0
        rhs = 0.0
        for _ in range(terms):
            a = random_model_positive(psi, rng, size)
            s = random_positive(2 * k, rng)
            x = x + np.kron(s, a)
            rhs += psi(a) * float(np.trace(s).real)
        worst = max(worst, abs(amp(x) - rhs))
    return worst
