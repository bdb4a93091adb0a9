import math
from fractions import Fraction

import numpy as np
import pytest

from ktrace.limits import (BRACKETED, CONVERGED, UNBOUNDED, LimitReport, cesaro_limit, combine,
                           materialize, running_mean_table)
from oracles import running_means_exact


def test_constant():
    r = cesaro_limit(np.full(1000, 0.25))
    assert r.status == CONVERGED and r.value == 0.25


def test_alternating_has_cesaro_limit():
    s = np.array([1.0, 0.0] * 5000)
    r = cesaro_limit(s)
    assert r.status == CONVERGED and r.value == pytest.approx(0.5, abs=1e-3)


def test_rate_for_decaying_perturbation():
    # s_k = 1 + 1/k: means are 1 + H_N/N, so the error is about log(N)/N
    for n in (1000, 10_000, 100_000):
        r = cesaro_limit(lambda m: 1 + 1 / np.arange(1, m + 1), n_max=n)
        assert r.converged
        assert abs(r.value - 1) <= 2 * math.log(n) / n + 1 / n


def test_unbounded():
    r = cesaro_limit(lambda m: np.arange(1, m + 1, dtype=float), n_max=10_000)
    assert r.status == UNBOUNDED and r.value == math.inf
    assert r.to_json()["value"] == "inf"


def test_bracketed_for_oscillating_means():
    # blocks of doubling length alternate 0 and 1, so the means keep swinging
    n = 1 << 16
    k = np.arange(1, n + 1)
    s = (np.floor(np.log2(k)) % 2).astype(float)
    r = cesaro_limit(s, tol=1e-3)
    assert r.status == BRACKETED
    lo, hi = r.bracket
    assert lo < 0.4 and hi > 0.6


def test_running_means_match_exact():
    terms = [Fraction(1, k) for k in range(1, 60)]
    table = running_mean_table(np.array([float(t) for t in terms]), 59)
    exact = running_means_exact(terms)
    for (n, v), e in zip(table, exact):
        assert v == pytest.approx(float(e), abs=1e-14)


def test_mean_table_stride():
    table = running_mean_table(np.ones(10), 10, stride=4)
    assert [n for n, _ in table] == [4, 8, 10]


def test_materialize():
    assert materialize(iter([1.0, 2.0, 3.0]), 2).tolist() == [1.0, 2.0]
    with pytest.raises(ValueError):
        materialize([], 3)
    with pytest.raises(ValueError):
        materialize([1.0, math.nan], 2)


def test_combine():
    a = LimitReport.exact_value(Fraction(1, 2))
    b = LimitReport(BRACKETED, 1.0, (0.9, 1.1), 0.2, 10)
    s = a + b
    assert s.status == BRACKETED and s.bracket == pytest.approx((1.4, 1.6))
    d = a - b
    assert d.bracket == pytest.approx((-0.6, -0.4))
    assert (a + a).exact == 1 and (a + a).converged
    u = LimitReport(UNBOUNDED, math.inf, (1.0, math.inf), math.inf, 5)
    assert combine(a, u, 1).status == UNBOUNDED


def test_json_and_extra_error():
    r = LimitReport.exact_value(3).with_extra_error(0.5)
    assert r.to_json() == {"status": CONVERGED, "value": 3.0, "bracket": [2.5, 3.5],
                           "error_bound": 0.5, "n_used": 0, "exact": "3"}
    assert LimitReport.exact_value(2.5).exact is None
