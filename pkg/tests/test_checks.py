import math
from fractions import Fraction

import numpy as np
import pytest

from sumset_lab.checks import (DEFAULT_KAPPA, REPORT_FORMAT, adjacency_prob_bound,
                               close_pair_bound, delta_diagnostics, f_of_x, gap_triple_count,
                               hypothesis_report, twin_count, wirsing_bounds)
from sumset_lab.errors import DomainError
from sumset_lab.generators import DeltaSequence, default_delta, sieve_primes, sieve_two_squares


@pytest.fixture(scope="module")
def primes():
    return sieve_primes(300_000)


@pytest.fixture(scope="module")
def squares():
    return sieve_two_squares(300_000)


def test_f_of_x_is_exact(primes):
    assert f_of_x(primes, 100) == 4
    assert f_of_x(primes, 2) == 2
    assert f_of_x(sieve_primes(10**6), 10**6) == Fraction(10**6, 78498)
    with pytest.raises(DomainError):
        f_of_x(primes, 1)


def test_gap_triple_count_examples(primes, squares):
    assert gap_triple_count(primes, 20, 6) == 7
    assert gap_triple_count(primes, 1000, 0) == 0
    t = squares.terms.tolist()
    want = sum(1 for k in range(len(t) - 2) if t[k] <= 50 and t[k + 2] - t[k] <= 2)
    assert gap_triple_count(squares, 50, 2) == want


def test_gap_triple_count_is_monotone(primes):
    vals = [[gap_triple_count(primes, x, h) for h in range(0, 14, 2)]
            for x in (100, 1000, 10_000)]
    arr = np.array(vals)
    assert np.all(np.diff(arr, axis=0) >= 0) and np.all(np.diff(arr, axis=1) >= 0)


def test_gap_triple_count_needs_terms():
    with pytest.raises(DomainError):
        gap_triple_count(sieve_primes(100), 97, 6)


def test_twin_count_examples(primes):
    assert twin_count(primes, 100, 2) == 8
    assert twin_count(primes, 100, 1) == 1
    assert twin_count(sieve_primes(20), 3, 6) == 0
    with pytest.raises(DomainError):
        twin_count(primes, 299_999, 2)
    with pytest.raises(DomainError):
        twin_count(primes, 10, 0)


@pytest.mark.parametrize("m", [1, 2, 4, 6, 30])
def test_twin_count_methods_agree(m):
    P = sieve_primes(10**6 + 100)
    assert twin_count(P, 10**6, m, "scan") == twin_count(P, 10**6, m, "mask")


def test_delta_diagnostics_constant_algebra(primes):
    x = 10_000
    d2 = delta_diagnostics(primes, DeltaSequence.constant(2.0, len(primes) - 1), x, 2)
    assert d2.d2_sum == pytest.approx(primes.S(x) / 4, rel=1e-12)
    exact = delta_diagnostics(primes, DeltaSequence.constant(2.0, len(primes) - 1), x, 2,
                              exact=True)
    assert exact.d2_sum == Fraction(primes.S(x), 4)
    d1 = delta_diagnostics(primes, DeltaSequence.constant(1.0, len(primes) - 1), x, 2)
    assert d1.d1_defect == x and d1.d3_ok


def test_default_delta_d2_trend():
    primes = sieve_primes(1_500_000)
    d = default_delta(primes, 0.5)
    ratios = []
    for x in (10**3, 10**4, 10**5):
        diag = delta_diagnostics(primes, d, x, 4)
        assert diag.d3_ok
        ratios.append(diag.d2_sum * math.log(float(f_of_x(primes, x))) / primes.S(x))
    assert ratios[0] > ratios[1] > ratios[2]


def test_delta_diagnostics_requires_materialization(primes):
    short = DeltaSequence.constant(2.0, 50)
    with pytest.raises(DomainError):
        delta_diagnostics(primes, short, 1000, 2)
    with pytest.raises(DomainError):
        delta_diagnostics(primes, short, 10, 0)


def test_wirsing_bounds_constant_delta():
    P = sieve_primes(10**6 + 100)
    d = DeltaSequence.constant(2.0, len(P) - 1)
    wb = wirsing_bounds(P, d, 10**6)
    f = 10**6 / 78498
    assert wb.threshold == math.floor(math.log(2) / 2 * 10**6 / (f * math.log(f)))
    assert 10_000 < wb.threshold < 11_500
    m = int(np.count_nonzero(P.terms[1:] < 10**6))
    assert wb.pointwise_log == pytest.approx(-m * math.log(2), rel=1e-12)
    assert wb.dec1_log == pytest.approx(wb.count_bound_log + wb.pointwise_log)


def test_wirsing_bounds_stays_finite_at_large_x():
    P = sieve_primes(10**7 + 200)
    wb = wirsing_bounds(P, DeltaSequence.constant(2.0, len(P) - 1), 10**7)
    assert all(math.isfinite(v) for v in (wb.count_bound_log, wb.pointwise_log, wb.dec1_log))


def test_wirsing_bounds_rejects_small_f(primes):
    with pytest.raises(DomainError):
        wirsing_bounds(primes, DeltaSequence.constant(2.0, len(primes) - 1), 10)


def test_probability_bounds():
    d = DeltaSequence(np.array([10.0, 10.0, 2.0, 5.0]))
    assert adjacency_prob_bound(d, 1, 1) == Fraction(1, 100)
    assert adjacency_prob_bound(d, 3, 3) == Fraction(9, 10)
    assert close_pair_bound(d, 1, 2) == Fraction(8, 100)
    with pytest.raises(DomainError):
        adjacency_prob_bound(d, 4, 1)
    with pytest.raises(DomainError):
        close_pair_bound(d, 1, 0)


def test_hypothesis_report_shape(primes):
    r = hypothesis_report(primes, default_delta(primes, 0.5), [10**3, 10**4, 10**5])
    d = r.to_dict()
    assert d["format"] == REPORT_FORMAT
    xs = [row["x"] for row in d["checkpoints"]]
    assert xs == sorted(set(xs))
    for row in d["checkpoints"]:
        for v in row["s2_ratio"].values():
            assert math.isfinite(v) and v >= 0
        assert row["thresholds"]["dec3_kappa"] == DEFAULT_KAPPA
    assert r.verdicts["D3"] == "pass" and r.verdicts["E2_uniform"] == "pass"
    assert r.verdicts["S1"] == "heuristic-pass"
    assert set(r.verdicts["S2"]) == {"2", "6", "12"}
