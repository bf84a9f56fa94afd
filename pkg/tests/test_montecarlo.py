import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sumset_lab.errors import DomainError
from sumset_lab.intset import FiniteIntegerSet, sumset
from sumset_lab.montecarlo import (CHUNK, PATTERN_LIBRARY, ExperimentSpec, ModelConfig,
                                   estimate_adjacency_prob, estimate_close_pair_prob,
                                   pattern_translate_count, run_experiment, sample_indices)
from sumset_lab.seeding import SeedStream

SMALL = ModelConfig(limit=50_000)


def spec(stat, trials=2000, seed=1, model=SMALL):
    return ExperimentSpec(model, stat, trials, seed)


def test_spec_round_trip_and_validation():
    s = spec({"kind": "adjacency", "k": 100, "h": 2})
    assert ExperimentSpec.from_dict(json.loads(json.dumps(s.to_dict()))) == s
    with pytest.raises(DomainError):
        spec({"kind": "adjacency", "k": 3})
    with pytest.raises(DomainError):
        spec({"kind": "nope"})
    with pytest.raises(DomainError):
        ExperimentSpec.from_dict({"statistic": {"kind": "gap_profile", "K": 5}})
    with pytest.raises(DomainError):
        ModelConfig(delta="huge")
    with pytest.raises(DomainError):
        ExperimentSpec.from_dict({**s.to_dict(), "format": "other/9"})


def test_zero_law_is_deterministic_indicator():
    zero = ModelConfig(limit=50_000, epsilon="zero")
    g = zero.build().ground
    k = 40
    gap = int(g.terms[k] - g.terms[k - 1])
    hit = estimate_adjacency_prob(spec({"kind": "adjacency", "k": k, "h": gap}, model=zero))
    miss = estimate_adjacency_prob(spec({"kind": "adjacency", "k": k, "h": gap + 1},
                                        model=zero))
    assert hit.mean == 1.0 and miss.mean == 0.0
    close = estimate_close_pair_prob(spec({"kind": "close_pair", "k": k, "H": gap},
                                          model=zero))
    assert close.mean == 1.0


def test_h_zero_never_happens():
    r = estimate_adjacency_prob(spec({"kind": "adjacency", "k": 500, "h": 0}))
    assert r.mean == 0.0 and r.bound == 0.0


def test_adjacency_exact_probability():
    # c_{k+1} - c_k = h has a closed form for the uniform law; compare counts
    model = SMALL.build()
    k, h = 300, 2
    r = estimate_adjacency_prob(spec({"kind": "adjacency", "k": k, "h": h}, trials=40_000))
    lo1, hi1 = model.support(k)
    lo2, hi2 = model.support(k + 1)
    gap = int(model.ground.terms[k] - model.ground.terms[k - 1])
    pairs = sum(1 for e1 in range(lo1, hi1 + 1) for e2 in range(lo2, hi2 + 1)
                if gap + e2 - e1 == h)
    p = pairs / ((hi1 - lo1 + 1) * (hi2 - lo2 + 1))
    assert abs(r.mean - p) < 5 * np.sqrt(p * (1 - p) / 40_000) + 1e-12
    assert r.passed in (True, None)


def test_vacuous_bounds_are_flagged():
    r = estimate_close_pair_prob(spec({"kind": "close_pair", "k": 10, "H": 50}))
    assert r.vacuous and r.passed is None


def test_thread_count_does_not_change_reports():
    s = spec({"kind": "close_pair", "k": 2000, "H": 3}, trials=3 * CHUNK + 17)
    a = json.dumps(run_experiment(s, threads=1).to_dict())
    b = json.dumps(run_experiment(s, threads=3).to_dict())
    assert a == b


def test_single_trial_matches_direct_sampling():
    from sumset_lab.generators import perturbed_terms

    model = SMALL.build()
    k = 77
    r = run_experiment(spec({"kind": "close_pair", "k": k, "H": 1000}, trials=1, seed=5))
    c = perturbed_terms(model, k + 1, SeedStream(5).child(0))
    assert r.values.tolist() == [int(c[k] - c[k - 1] <= 1000)]


def test_pattern_count_examples():
    C = [2, 3, 5, 7, 11, 13]
    assert pattern_translate_count(C, [0, 2], 13) == 3
    assert pattern_translate_count(C, [0], 13) == 6
    W = FiniteIntegerSet([1, 4, 6], (0, 10))
    with pytest.raises(DomainError):
        pattern_translate_count(W, [0, 2], 9)


def test_pattern_count_planted_lower_bound():
    A = FiniteIntegerSet([0, 3, 7, 20, 33])
    B = FiniteIntegerSet([0, 2, 6])
    C = sumset(A, B)
    x = C.window_hi - 6
    assert pattern_translate_count(C, B, x) >= len(A.restrict(0, x))


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(0, 150), min_size=1), st.sets(st.integers(0, 20), min_size=1),
       st.integers(0, 130))
def test_pattern_count_methods_agree(C, P, x):
    C = FiniteIntegerSet(sorted(C), (0, 170))
    P = sorted(P)
    a = pattern_translate_count(C, P, x, "intersect")
    b = pattern_translate_count(C, P, x, "scan")
    assert a == b == sum(all(n + p in C for p in P) for n in range(x + 1))


def test_pattern_experiment_report():
    m = ModelConfig(limit=110_000)
    s = spec({"kind": "pattern_count", "pattern": list(PATTERN_LIBRARY[0]),
              "checkpoints": [10_000, 100_000]}, trials=3, model=m)
    r = run_experiment(s)
    rows = r.extra["checkpoints"]
    assert [row["x"] for row in rows] == [10_000, 100_000]
    assert all(row["ratio"] >= 0 for row in rows)
    assert 0 <= r.extra["consecutive_hits"] <= r.extra["hits"]
    with pytest.raises(DomainError):
        run_experiment(spec({"kind": "pattern_count", "pattern": [0, 2],
                             "checkpoints": [10**6]}, model=m))


def test_gap_profile_experiment():
    r = run_experiment(spec({"kind": "gap_profile", "K": 2000}, trials=4))
    marks = r.extra["running_max"]
    assert [m["K"] for m in marks] == [10, 100, 1000, 2000]
    vals = [m["mean_running_max"] for m in marks]
    assert vals == sorted(vals)


def test_sample_indices_are_non_vacuous():
    model = ModelConfig(limit=200_000).build()
    ks = sample_indices(model, 20)
    assert len(ks) == 20 and ks == sorted(ks)
    for k in ks:
        assert model.delta.delta(k) * model.delta.delta(k + 1) > 27
