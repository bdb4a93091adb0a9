"""Dense complex matrices: spectra, ramp functional calculus, predicates.

Matrices are plain ``numpy`` arrays.  Block structure, when it matters, is a
tuple of block sizes passed alongside (see :class:`BlockStructure`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainExceeded, NotSelfAdjoint, NumericalFailure

PROJECTION_TOL = 1e-8


def as_matrix(a) -> np.ndarray:
    """Validate ``a`` as a finite square matrix and return it as complex128."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


@dataclass(frozen=True)
class BlockStructure:
    """Partition of the index range ``0..dim-1`` into consecutive blocks."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or any(int(s) < 1 for s in self.sizes):
            raise ValueError("block sizes must be positive")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    def offsets(self) -> list[int]:
        return list(np.cumsum((0,) + self.sizes[:-1]))

    def indices(self, level: int = 1) -> list[np.ndarray]:
        """Row indices of each block inside ``M_level`` over the block algebra."""
        out = []
        for off, size in zip(self.offsets(), self.sizes):
            idx = [i * self.dim + off + t for i in range(level) for t in range(size)]
            out.append(np.array(idx, dtype=np.int64))
        return out

    def blocks_of(self, x: np.ndarray, level: int = 1) -> list[np.ndarray]:
        """Split an element of ``M_level(A)`` into its ``M_{level*n_b}`` summands."""
        return [x[np.ix_(idx, idx)] for idx in self.indices(level)]

    def assemble(self, parts: Sequence[np.ndarray], level: int = 1) -> np.ndarray:
        n = level * self.dim
        out = np.zeros((n, n), dtype=np.complex128)
        for idx, part in zip(self.indices(level), parts):
            out[np.ix_(idx, idx)] = part
        return out


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray
    frame: np.ndarray
    source_dim: int

    def reconstruct(self) -> np.ndarray:
        return (self.frame * self.eigenvalues) @ adjoint(self.frame)

    def to_json(self) -> dict:
        return {"eigenvalues": [float(v) for v in self.eigenvalues]}


def hermitian_spectrum(a) -> HermitianSpectrum:
    a = as_matrix(a)
    n = a.shape[0]
    if n == 0:
        return HermitianSpectrum(np.zeros(0), np.zeros((0, 0), complex), 0)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - adjoint(a))) > 1e-10 * n * scale:
        raise NotSelfAdjoint("matrix is not self-adjoint")
    try:
        vals, vecs = np.linalg.eigh((a + adjoint(a)) / 2)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalFailure(str(exc)) from exc
    return HermitianSpectrum(vals, vecs, n)


@dataclass(frozen=True)
class PiecewiseLinearRamp:
    """Continuous piecewise-linear map, constant past the last breakpoint.

    Breakpoints are ``(t, value)`` pairs with nondecreasing ``t``.  Segments
    are left-closed, so a breakpoint evaluates to its own value exactly.
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.breakpoints)
        if not pts:
            raise ValueError("ramp needs at least one breakpoint")
        ts = [t for t, _ in pts]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("breakpoints must be nondecreasing in t")
        if any(not 0.0 <= v <= 1.0 for _, v in pts):
            raise ValueError("ramp values must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", pts)

    @property
    def start(self) -> float:
        return self.breakpoints[0][0]

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.full(t.shape, self.breakpoints[-1][1])
        out[t <= self.start] = self.breakpoints[0][1]
        for (t0, v0), (t1, v1) in zip(self.breakpoints, self.breakpoints[1:]):
            if t1 == t0:
                continue
            seg = (t >= t0) & (t < t1)
            out[seg] = v0 + (v1 - v0) * (t[seg] - t0) / (t1 - t0)
        for t0, v0 in self.breakpoints:
            out[t == t0] = v0
        return out


def delta_ramp(delta: float) -> PiecewiseLinearRamp:
    """0 on [0, delta], linear on [delta, 1-delta], 1 on [1-delta, 1]."""
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    return PiecewiseLinearRamp(((0.0, 0.0), (delta, 0.0), (1.0 - delta, 1.0), (1.0, 1.0)))


def identity_ramp() -> PiecewiseLinearRamp:
    return PiecewiseLinearRamp(((0.0, 0.0), (1.0, 1.0)))


def unit_ramp(n: int) -> PiecewiseLinearRamp:
    """0 on [0, 1/(n+1)], linear up to 1/n, then 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return PiecewiseLinearRamp(((0.0, 0.0), (1.0 / (n + 1), 0.0), (1.0 / n, 1.0)))


def functional_calculus(f: PiecewiseLinearRamp, a, tol: float = 1e-10) -> np.ndarray:
    spec = hermitian_spectrum(a)
    if spec.eigenvalues.size and spec.eigenvalues[0] < f.start - tol:
        raise DomainExceeded(
            f"eigenvalue {spec.eigenvalues[0]:.3g} below ramp domain start {f.start}")
    vals = f(np.clip(spec.eigenvalues, f.start, None))
    out = (spec.frame * vals) @ adjoint(spec.frame)
    return (out + adjoint(out)) / 2


def operator_norm(a) -> float:
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def classify(a, tol: float = PROJECTION_TOL) -> str:
    """Strongest label among projection, positive, self-adjoint, general."""
    a = as_matrix(a)
    if a.size == 0 or operator_norm(a - adjoint(a)) > tol:
        return "general" if a.size else "projection"
    h = (a + adjoint(a)) / 2
    if operator_norm(h @ h - h) <= tol:
        return "projection"
    if np.linalg.eigvalsh(h)[0] >= -tol:
        return "positive"
    return "self-adjoint"


def standard_trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def projection_rank(e, threshold: float = 0.5) -> int:
    """Number of eigenvalues above ``threshold`` (1/2 for projections)."""
    e = as_matrix(e)
    if e.size == 0:
        return 0
    return int(np.sum(np.linalg.eigvalsh((e + adjoint(e)) / 2) > threshold))


def range_basis(e, threshold: float = 0.5) -> np.ndarray:
    """Orthonormal columns spanning the range of a projection."""
    spec = hermitian_spectrum(e)
    return spec.frame[:, spec.eigenvalues > threshold]


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    """``{"dim", "re", "im"}`` literal, or a plain nested list of real entries."""
    if isinstance(obj, list):
        obj = {"re": obj}
    try:
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=np.float64)
        dim = int(obj.get("dim", re.shape[0] if re.ndim else 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix literal: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(f"matrix literal does not match dim {dim}")
    return as_matrix(re + 1j * im)


def direct_sum(*mats) -> np.ndarray:
    mats = [as_matrix(m) for m in mats]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=np.complex128)
    pos = 0
    for m in mats:
        k = m.shape[0]
        out[pos:pos + k, pos:pos + k] = m
        pos += k
    return out


def pad(a, size: int) -> np.ndarray:
    """Embed ``a`` in the top-left corner of a ``size x size`` zero matrix."""
    a = as_matrix(a)
    if a.shape[0] >= size:
        return a
    out = np.zeros((size, size), dtype=np.complex128)
    out[: a.shape[0], : a.shape[0]] = a
    return out
