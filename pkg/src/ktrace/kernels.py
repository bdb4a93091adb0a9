"""Hot numeric loops, in a numba flavour and a pure-numpy flavour.

The public names (``running_means``, ``catalog_terms``, ``smallest_sums``)
are bound at import time to one backend.  Numba is used when it imports
and ``KTRACE_NUMBA`` is not set to ``0``; both flavours stay importable
under their suffixed names so tests and the benchmark can compare them.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    njit = None

_FLAG = os.environ.get("KTRACE_NUMBA", "1").strip().lower()
HAS_NUMBA = njit is not None
USE_NUMBA = HAS_NUMBA and _FLAG not in ("0", "false", "no", "off")


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy flavour
# --------------------------------------------------------------------------

def running_means_numpy(s: np.ndarray) -> np.ndarray:
    """Cesaro means ``A_N = (1/N) sum_{k<=N} s_k`` for every prefix."""
    s = np.asarray(s, dtype=np.float64)
    return np.cumsum(s) / np.arange(1, s.size + 1, dtype=np.float64)


def catalog_terms_numpy(coef: np.ndarray, n: int, exponent: float,
                        length: int) -> np.ndarray:
    """Weighted coordinates ``k**exponent * tau_k(sum_j c_j p_j)``, k = 1..n.

    ``coef[j-1]`` is the coefficient of ``p_j``; coefficients past ``length``
    are treated as zero.  ``coef`` must cover at least ``n + 1`` indices.
    Uses ``tau_k(p_j) = 1/k**2 (j < k), 1/2 (j = k), 2**-j (j > k)``.
    """
    c = np.array(coef, dtype=np.float64, copy=True)
    c[length:] = 0.0
    j = np.arange(1, c.size + 1, dtype=np.float64)
    below = np.concatenate(([0.0], np.cumsum(c)[: n - 1]))
    geo = c * np.exp2(-j)
    above = np.cumsum(geo[::-1])[::-1]           # above[i] = sum_{j >= i+1} geo
    above = np.concatenate((above, [0.0]))[1: n + 1]
    k = np.arange(1, n + 1, dtype=np.float64)
    return below * k ** (exponent - 2.0) + k ** exponent * (0.5 * c[:n] + above)


def smallest_sums_numpy(h: np.ndarray, r: int, sizes: np.ndarray) -> np.ndarray:
    """Sum of the ``r`` smallest entries of ``h[:m]`` for each ``m`` in ``sizes``."""
    h = np.asarray(h, dtype=np.float64)
    out = np.empty(len(sizes), dtype=np.float64)
    for i, m in enumerate(sizes):
        part = np.sort(np.partition(h[:m], r - 1)[:r])
        total = 0.0
        for v in part:
            total += v
        out[i] = total
    return out


# --------------------------------------------------------------------------
# numba flavour
# --------------------------------------------------------------------------

def _running_means_loop(s):
    n = s.size
    out = np.empty(n, dtype=np.float64)
    total = 0.0
    comp = 0.0
    for i in range(n):
        y = s[i] - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total / (i + 1)
    return out


def _catalog_terms_loop(coef, n, exponent, length):
    size = coef.size
    stop = min(length, size)
    above = np.zeros(size + 2, dtype=np.float64)
    for i in range(stop - 1, -1, -1):
        above[i] = above[i + 1] + coef[i] * 2.0 ** (-(i + 1))
    out = np.empty(n, dtype=np.float64)
    below = 0.0
    for i in range(n):
        k = i + 1.0
        ck = coef[i] if i < stop else 0.0
        out[i] = below * k ** (exponent - 2.0) + k ** exponent * (0.5 * ck + above[i + 1])
        below += ck
    return out


def _smallest_sums_loop(h, r, sizes):
    # keep the r smallest values seen so far in ascending order
    best = np.empty(r, dtype=np.float64)
    filled = 0
    out = np.empty(sizes.size, dtype=np.float64)
    pos = 0
    for idx in range(sizes.size):
        m = sizes[idx]
        while pos < m:
            v = h[pos]
            pos += 1
            if filled < r:
                j = filled
                filled += 1
            elif v < best[r - 1]:
                j = r - 1
            else:
                continue
            while j > 0 and best[j - 1] > v:
                best[j] = best[j - 1]
                j -= 1
            best[j] = v
        total = 0.0
        for j in range(r):
            total += best[j]
        out[idx] = total
    return out


if HAS_NUMBA:
    _running_means_jit = njit(cache=True)(_running_means_loop)
    _catalog_terms_jit = njit(cache=True)(_catalog_terms_loop)
    _smallest_sums_jit = njit(cache=True)(_smallest_sums_loop)
else:  # pragma: no cover
    _running_means_jit = _running_means_loop
    _catalog_terms_jit = _catalog_terms_loop
    _smallest_sums_jit = _smallest_sums_loop


def running_means_numba(s: np.ndarray) -> np.ndarray:
    return _running_means_jit(np.ascontiguousarray(s, dtype=np.float64))


def catalog_terms_numba(coef: np.ndarray, n: int, exponent: float,
                        length: int) -> np.ndarray:
    return _catalog_terms_jit(np.ascontiguousarray(coef, dtype=np.float64),
                              int(n), float(exponent), int(length))


def smallest_sums_numba(h: np.ndarray, r: int, sizes: np.ndarray) -> np.ndarray:
    return _smallest_sums_jit(np.ascontiguousarray(h, dtype=np.float64), int(r),
                              np.ascontiguousarray(sizes, dtype=np.int64))


if USE_NUMBA:
    running_means = running_means_numba
    catalog_terms = catalog_terms_numba
    smallest_sums = smallest_sums_numba
else:
    running_means = running_means_numpy
    catalog_terms = catalog_terms_numpy
    smallest_sums = smallest_sums_numpy
