import math

import numpy as np
import pytest

from sumset_lab.errors import DomainError
from sumset_lab.generators import (DeltaSequence, EpsilonDistribution, PerturbationModel,
                                   _gap_arrays, bernoulli_set, d3_upper, default_delta,
                                   ground_from_set, make_ground, perturbed_set,
                                   perturbed_terms, sample_epsilon, sample_epsilons,
                                   sieve_primes, sieve_two_squares, support_size,
                                   symmetric_bernoulli_set, tight_delta)
from sumset_lab.intset import FiniteIntegerSet, write_set
from sumset_lab.seeding import SeedStream


def trial_division_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def brute_two_squares(n):
    return sorted({a * a + b * b for a in range(n) for b in range(n)
                   if 0 < a * a + b * b <= n})


def test_prime_sieve_against_trial_division():
    assert sieve_primes(2000).terms.tolist() == trial_division_primes(2000)
    assert len(sieve_primes(100)) == 25
    assert len(sieve_primes(10**6)) == 78498


@pytest.mark.parametrize("method", ["valuation", "pairs"])
def test_two_squares_against_brute_force(method):
    assert sieve_two_squares(3000, method).terms.tolist() == brute_two_squares(3000)
    assert sieve_two_squares(10, method).terms.tolist() == [1, 2, 4, 5, 8, 9, 10]


def test_two_squares_methods_agree_at_scale():
    a = sieve_two_squares(300_000, "valuation").terms
    b = sieve_two_squares(300_000, "pairs").terms
    assert np.array_equal(a, b)


def test_ground_counting_and_errors():
    P = sieve_primes(100)
    assert P.s(0) == 0 and P.s(1) == 2 and P.S(100) == 25
    with pytest.raises(DomainError):
        P.S(101)
    with pytest.raises(DomainError):
        P.s(26)
    with pytest.raises(DomainError):
        sieve_primes(1)
    with pytest.raises(DomainError):
        make_ground("squares", 10)


def test_file_ground(tmp_path):
    p = tmp_path / "g.txt"
    write_set(FiniteIntegerSet([0, 3, 8, 10], (0, 12)), p)
    g = make_ground(f"file:{p}", 12)
    assert g.terms.tolist() == [3, 8, 10] and g.limit == 12
    assert ground_from_set(FiniteIntegerSet([1, 2])).terms.tolist() == [1, 2]


def test_bernoulli_sets_are_seeded():
    a = bernoulli_set(0, 500, SeedStream(3))
    assert a == bernoulli_set(0, 500, SeedStream(3))
    assert a != bernoulli_set(0, 500, SeedStream(4))
    assert 150 < len(a) < 350
    D = symmetric_bernoulli_set(300, SeedStream(5))
    assert D.tolist() == [-x for x in reversed(D.tolist())]
    assert [x for x in D.tolist() if x >= 0] == bernoulli_set(0, 300, SeedStream(5)).tolist()


def test_support_size_counts_integers_in_half_open_interval():
    for gm in range(1, 12):
        for gp in range(1, 12):
            count = sum(1 for k in range(-20, 21) if -gm / 2 < k <= gp / 2)
            assert support_size(gm, gp) == count
            lo, hi = EpsilonDistribution().bounds(np.array([gm]), np.array([gp]))
            assert hi[0] - lo[0] + 1 == count


def test_uniform_support_can_fall_below_half_span():
    # gaps (2, 1): only k = 0 lies in (-1, 1/2], yet (s_{n+1} - s_{n-1}) / 2 = 3/2
    assert support_size(2, 1) == 1
    assert (2 + 1) / 2 > support_size(2, 1)


def test_default_delta_respects_d3_and_e2():
    for g in (sieve_primes(200_000), sieve_two_squares(200_000)):
        d = default_delta(g, 0.5)
        gm, gp = _gap_arrays(g, len(d))
        assert np.all(d.values >= 1)
        assert np.all(d.values <= d3_upper(g, len(d)))
        assert np.all(support_size(gm, gp) >= d.values)
        assert d.iota == 0.5 and d.raw is not None


def test_default_delta_profile_and_validation():
    g = sieve_primes(10**6)
    d = default_delta(g, 1.0, scale=1.0)
    n = 50_000
    assert d.delta(n) <= math.log(math.log(n)) + 1e-12
    with pytest.raises(DomainError):
        default_delta(g, 0.0)
    with pytest.raises(DomainError):
        default_delta(g, 0.5, scale=-1)
    with pytest.raises(DomainError):
        d.delta(0)


def test_tight_delta_is_the_cap():
    g = sieve_primes(10_000)
    t = tight_delta(g)
    gm, gp = _gap_arrays(g, len(t))
    assert np.array_equal(t.values, np.maximum(np.minimum((gm + gp) / 2, support_size(gm, gp)), 1))


def test_perturbation_is_increasing_and_in_support():
    g = sieve_two_squares(50_000)
    model = PerturbationModel(g, default_delta(g, 0.5))
    count = len(g) - 1
    for s in range(5):
        eps = sample_epsilons(model, count, SeedStream(s))
        gm, gp = model.gaps(count)
        assert np.all(-gm / 2 < eps) and np.all(eps <= gp / 2)
        c = perturbed_terms(model, count, SeedStream(s))
        assert np.all(np.diff(c) > 0)


def test_scalar_and_vector_epsilon_agree():
    g = sieve_primes(5000)
    model = PerturbationModel(g, default_delta(g, 0.5))
    seed = SeedStream(11)
    vec = sample_epsilons(model, 200, seed)
    assert [sample_epsilon(model, n, seed) for n in range(1, 201)] == vec.tolist()
    assert model.support(1) == (0, 0)  # s_0 = 0, s_1 = 2, s_2 = 3


def test_zero_law_reproduces_ground():
    g = sieve_primes(1000)
    model = PerturbationModel(g, default_delta(g, 0.5), EpsilonDistribution("zero"))
    assert perturbed_terms(model, 100, SeedStream(0)).tolist() == g.terms[:100].tolist()
    with pytest.raises(DomainError):
        EpsilonDistribution("gaussian")


def test_perturbed_set_window_is_exact():
    g = sieve_primes(10_000)
    model = PerturbationModel(g, default_delta(g, 0.5))
    C = perturbed_set(model, 500, SeedStream(2))
    later = g.terms[500] + model.support(501)[0]
    assert C.window_hi < later
    assert len(C) == 500
    with pytest.raises(DomainError):
        perturbed_terms(model, len(g), SeedStream(0))


def test_delta_sequence_constant():
    d = DeltaSequence.constant(2.0, 10)
    assert len(d) == 10 and d.eta(3) == 0.5
