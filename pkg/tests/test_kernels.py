import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sumset_lab import kernels
from sumset_lab.kernels import _pykernels
from sumset_lab.intset import mask_to_words, words_to_mask
from sumset_lab.seeding import mix2 as mix2_int

offsets = st.lists(st.integers(0, 300), min_size=1, max_size=40, unique=True)


def test_backend_name_is_known():
    assert kernels.BACKEND in ("cython", "python")
    assert _pykernels in kernels.available_backends()


def test_mix2_matches_python_ints(backend):
    keys = np.array([0, 1, 2**63, 2**64 - 1, 12345], dtype=np.uint64)
    idx = np.array([0, -1, 7, 2**40, 3], dtype=np.int64)
    got = backend.mix2(keys, idx).tolist()
    assert got == [mix2_int(int(k), int(i)) for k, i in zip(keys, idx)]


def test_uniform_below_range_and_validation(backend):
    words = np.array([0, 2**64 - 1, 2**63], dtype=np.uint64)
    m = np.array([5, 5, 4], dtype=np.int64)
    assert backend.uniform_below(words, m).tolist() == [0, 4, 2]
    with pytest.raises(ValueError):
        backend.uniform_below(words[:1], np.array([0]))


@settings(max_examples=60, deadline=None)
@given(offsets, offsets)
def test_shift_or_against_pairs(a, b):
    a = np.array(sorted(a))
    b_mask = sum(1 << x for x in b)
    nbits = int(max(a) + max(b) + 1)
    want = sorted({x + y for x in a for y in b})
    for mod in kernels.available_backends():
        words = mod.sumset_shift_or(a, mask_to_words(b_mask, max(b) + 1), nbits)
        got = [i for i in range(nbits) if words_to_mask(words) >> i & 1]
        assert got == want


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=30),
       st.lists(st.integers(-50, 50), min_size=1, max_size=30))
def test_naive_sumset(a, b):
    want = sorted({x + y for x in a for y in b})
    for mod in kernels.available_backends():
        assert mod.sumset_naive(np.array(a), np.array(b)).tolist() == want


def test_translate_hits_scan(backend):
    rng = np.random.default_rng(0)
    dense = (rng.random(400) < 0.6).astype(np.uint8)
    offs = np.array([0, 2, 5])
    got = backend.translate_hits(dense, offs, 10, 300).tolist()
    want = [p for p in range(10, min(300, 400 - 5)) if all(dense[p + o] for o in offs)]
    assert got == want
    assert backend.translate_hits(dense, offs, 398, 500).size == 0


def test_cover_counts_is_truncated_convolution(backend):
    rng = np.random.default_rng(1)
    a = (rng.random(70) < 0.5).astype(np.uint8)
    b = (rng.random(50) < 0.5).astype(np.uint8)
    want = np.convolve(a.astype(int), b.astype(int))[:90]
    assert backend.cover_counts(a, b, 90).tolist() == want.tolist()


def test_backends_agree_on_random_inputs():
    mods = kernels.available_backends()
    rng = np.random.default_rng(2)
    keys = rng.integers(0, 2**63, 100, dtype=np.uint64)
    idx = rng.integers(-2**40, 2**40, 100)
    outs = [m.mix2(keys, idx).tolist() for m in mods]
    assert all(o == outs[0] for o in outs)
