"""Exact model of the scaled dimension group of eventually ``q/i^2`` sequences.

An element is a rational sequence ``a_1, a_2, ...`` with ``a_i = q / i^2``
for ``i >= N``.  It is stored canonically as ``(prefix, q, N)`` with the
smallest possible ``N``.  The positive cone holds the zero sequence and the
strictly positive sequences; the scale holds the positive sequences with
every coordinate below 1.  Coordinate ``k`` is the value of the bounded
trace ``tau_k`` on the corresponding K_0 class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import NotInScale

Rational = Union[int, Fraction, str]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class DimensionGroupElement:
    prefix: tuple[Fraction, ...]
    tail_q: Fraction
    tail_start: int

    def __post_init__(self):
        prefix = [_frac(a) for a in self.prefix]
        q = _frac(self.tail_q)
        n = int(self.tail_start)
        if n < 1 or len(prefix) != n - 1:
            raise ValueError("prefix must list a_1 .. a_{N-1}")
        while n > 1 and prefix[-1] == q / (n - 1) ** 2:
            prefix.pop()
            n -= 1
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail_q", q)
        object.__setattr__(self, "tail_start", n)

    def __getitem__(self, k: int) -> Fraction:
        """Coordinate ``a_k`` (1-based)."""
        if k < 1:
            raise IndexError("coordinates start at 1")
        if k < self.tail_start:
            return self.prefix[k - 1]
        return self.tail_q / (k * k)

    def coordinates(self, upto: int) -> list[Fraction]:
        return [self[k] for k in range(1, upto + 1)]

    def _combine(self, other: "DimensionGroupElement", op) -> "DimensionGroupElement":
        n = max(self.tail_start, other.tail_start)
        prefix = [op(self[k], other[k]) for k in range(1, n)]
        return DimensionGroupElement(tuple(prefix), op(self.tail_q, other.tail_q), n)

    def __add__(self, other: "DimensionGroupElement") -> "DimensionGroupElement":
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other: "DimensionGroupElement") -> "DimensionGroupElement":
        return self._combine(other, lambda x, y: x - y)

    def __neg__(self) -> "DimensionGroupElement":
        return DimensionGroupElement(tuple(-a for a in self.prefix), -self.tail_q, self.tail_start)

    def __mul__(self, t) -> "DimensionGroupElement":
        t = _frac(t)
        return DimensionGroupElement(tuple(t * a for a in self.prefix), t * self.tail_q,
                                     self.tail_start)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.tail_q == 0 and not self.prefix

    def is_positive(self) -> bool:
        """Membership in the positive cone."""
        if self.is_zero():
            return True
        return self.tail_q > 0 and all(a > 0 for a in self.prefix)

    def __le__(self, other: "DimensionGroupElement") -> bool:
        return (other - self).is_positive()

    def __ge__(self, other: "DimensionGroupElement") -> bool:
        return (self - other).is_positive()

    def in_scale(self) -> bool:
        # q / i^2 < 1 for all i >= N  iff  q < N^2
        return (self.is_positive() and all(a < 1 for a in self.prefix)
                and self.tail_q < self.tail_start ** 2)

    def to_json(self) -> dict:
        return {"prefix": [str(a) for a in self.prefix], "q": str(self.tail_q),
                "N": self.tail_start}

    @classmethod
    def from_json(cls, obj: dict) -> "DimensionGroupElement":
        return make_element([Fraction(a) for a in obj.get("prefix", [])],
                            Fraction(obj.get("q", 0)), obj.get("N"))


def make_element(prefix: Sequence[Rational] = (), q: Rational = 0,
                 N: Optional[int] = None) -> DimensionGroupElement:
    prefix = tuple(_frac(a) for a in prefix)
    n = len(prefix) + 1 if N is None else int(N)
    return DimensionGroupElement(prefix, _frac(q), n)


ZERO = make_element()


def tau_k(g: DimensionGroupElement, k: int) -> Fraction:
    if k < 1:
        raise ValueError("k must be >= 1")
    return g[k]


def projection_p(j: int) -> DimensionGroupElement:
    """Class with coordinates ``2^-j`` before ``j``, ``1/2`` at ``j``, ``1/k^2`` after."""
    if j < 1:
        raise ValueError("j must be >= 1")
    prefix = [Fraction(1, 2 ** j)] * (j - 1) + [Fraction(1, 2)]
    return DimensionGroupElement(tuple(prefix), Fraction(1), j + 1)


def tail_pairing(g: DimensionGroupElement) -> Fraction:
    """Tail coefficient ``q``; a group homomorphism on all of G."""
    return g.tail_q


def k0_pairing_exact(g: DimensionGroupElement, require_scale: bool = True) -> Fraction:
    if require_scale and not g.in_scale():
        raise NotInScale("element is not in the scale")
    return g.tail_q


# --------------------------------------------------------------------------
# formal positive series  sum_j c_j p_j  (+ finitely many extra terms)
# --------------------------------------------------------------------------

Coefficient = Union[Fraction, float]


@dataclass(frozen=True)
class FormalPositiveSeries:
    """``sum_j c_j p_j`` over the projection catalog plus finitely many extra terms.

    ``coeff(j)`` gives ``c_j`` exactly (Fraction) when rational, else as a
    float; ``coeff_array`` is its vectorized float form.  ``length`` is
    ``None`` for an infinite series.  ``tail_majorant(J)`` bounds
    ``sum_{j>J} c_j``.
    """

    coeff: Optional[Callable[[int], Coefficient]] = None
    coeff_array: Optional[Callable[[np.ndarray], np.ndarray]] = None
    length: Optional[int] = 0
    tail_majorant: Optional[Callable[[int], Coefficient]] = None
    extra: tuple[tuple[Fraction, DimensionGroupElement], ...] = ()
    name: str = "series"

    def __post_init__(self):
        for c, g in self.extra:
            if c < 0 or not g.in_scale():
                raise ValueError("extra terms need c >= 0 and an element of the scale")

    @property
    def has_catalog(self) -> bool:
        return self.coeff is not None and self.length != 0

    @property
    def is_finite(self) -> bool:
        return self.length is not None

    def catalog_terms(self, upto: int) -> list[tuple[Coefficient, DimensionGroupElement]]:
        if not self.has_catalog:
            return []
        stop = upto if self.length is None else min(upto, self.length)
        return [(self.coeff(j), projection_p(j)) for j in range(1, stop + 1)]

    def tail_bound(self, J: int) -> Coefficient:
        if not self.has_catalog or (self.length is not None and self.length <= J):
            return Fraction(0)
        if self.tail_majorant is None:
            raise ValueError("infinite series without a tail majorant")
        return self.tail_majorant(J)

    def float_coefficients(self, size: int) -> np.ndarray:
        out = np.zeros(size, dtype=np.float64)
        if self.has_catalog:
            stop = size if self.length is None else min(size, self.length)
            out[:stop] = self.coeff_array(np.arange(1, stop + 1, dtype=np.float64))
        return out

    def as_element(self) -> DimensionGroupElement:
        """Finite rational series collapse to a single group element."""
        if not self.is_finite:
            raise ValueError("infinite series is not an element of the group")
        total = ZERO
        for c, g in self.catalog_terms(self.length or 0) + list(self.extra):
            if not isinstance(c, Fraction):
                raise ValueError("irrational coefficient")
            total = total + c * g
        return total

    def __add__(self, other: "FormalPositiveSeries") -> "FormalPositiveSeries":
        def pick(s, j):
            if not s.has_catalog or (s.length is not None and j > s.length):
                return Fraction(0)
            return s.coeff(j)

        def pick_array(s, j):
            if not s.has_catalog:
                return np.zeros_like(j)
            v = s.coeff_array(j)
            return v if s.length is None else np.where(j <= s.length, v, 0.0)

        def majorant(J):
            return self.tail_bound(J) + other.tail_bound(J)

        lengths = [s.length for s in (self, other) if s.has_catalog]
        length = None if None in lengths else max(lengths, default=0)
        return FormalPositiveSeries(
            lambda j: pick(self, j) + pick(other, j),
            lambda j: pick_array(self, j) + pick_array(other, j),
            length, majorant, self.extra + other.extra, f"({self.name})+({other.name})")

    def scaled(self, t: Rational) -> "FormalPositiveSeries":
        t = _frac(t)
        if t < 0:
            raise ValueError("scaling must be nonnegative")
        if not self.has_catalog:
            return FormalPositiveSeries(extra=tuple((t * c, g) for c, g in self.extra),
                                        name=f"{t}*{self.name}")
        return FormalPositiveSeries(
            lambda j: t * self.coeff(j), lambda j: float(t) * self.coeff_array(j),
            self.length, lambda J: t * self.tail_bound(J),
            tuple((t * c, g) for c, g in self.extra), f"{t}*{self.name}")


def zeta_series(length: Optional[int] = None) -> FormalPositiveSeries:
    """``sum_j p_j / j^2``, infinite or truncated after ``length`` terms."""
    return FormalPositiveSeries(
        lambda j: Fraction(1, j * j), lambda j: 1.0 / (j * j), length,
        lambda J: Fraction(1, J), (), "zeta2" if length is None else f"zeta2[:{length}]")


def power_series(exponent: Rational, length: Optional[int] = None) -> FormalPositiveSeries:
    """``sum_j j^-s p_j`` for ``s > 1``."""
    s = _frac(exponent)
    if s <= 1:
        raise ValueError("exponent must exceed 1")

    def coeff(j: int) -> Coefficient:
        if s.denominator == 1:
            return Fraction(1, j ** s.numerator)
        return float(j) ** -float(s)

    def majorant(J: int) -> Coefficient:
        # sum_{j>J} j^-s <= J^(1-s)/(s-1); rational upper bound when s = 3/2
        if s == Fraction(3, 2):
            return Fraction(2, isqrt(J))
        return float(J) ** (1 - float(s)) / float(s - 1)

    return FormalPositiveSeries(coeff, lambda j: j ** -float(s), length, majorant, (),
                                f"power{s}" if length is None else f"power{s}[:{length}]")


def element_series(terms: Iterable[tuple[Rational, DimensionGroupElement]]) -> FormalPositiveSeries:
    return FormalPositiveSeries(extra=tuple((_frac(c), g) for c, g in terms), name="finite")


def series_tau_k(s: FormalPositiveSeries, k: int, J: int) -> tuple[Coefficient, Coefficient]:
    """``(head, bound)``: ``head = sum_{j<=J} c_j tau_k(p_j)`` plus extra terms.

    Every scale element has ``tau_k < 1``, so the discarded part is at most
    ``sum_{j>J} c_j``.  The head is exact when the coefficients are rational.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    head: Coefficient = Fraction(0)
    for c, g in s.catalog_terms(J) + list(s.extra):
        head = head + c * tau_k(g, k)
    return head, s.tail_bound(J)
