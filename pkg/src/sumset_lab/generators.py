"""Ground sequences, random sets and the perturbed-sequence model.

Indexing follows the mathematical convention: terms are s_1 < s_2 < ...,
and s_0 = 0 is used wherever a formula needs the left neighbour of s_1.
Arrays are stored 0-based, so ``terms[n - 1] == s_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .intset import FiniteIntegerSet, SymmetricSet
from .seeding import SeedStream
from . import kernels


@dataclass(frozen=True, eq=False)
class GroundSequence:
    """Strictly increasing positive integers, complete up to ``limit``."""

    name: str
    terms: np.ndarray
    limit: int

    def __post_init__(self):
        t = np.ascontiguousarray(self.terms, dtype=np.int64)
        if t.size and (t[0] < 1 or np.any(np.diff(t) <= 0)):
            raise DomainError("ground terms must be positive and strictly increasing")
        if t.size and t[-1] > self.limit:
            raise DomainError("terms exceed the declared limit")
        t.setflags(write=False)
        object.__setattr__(self, "terms", t)

    def __len__(self) -> int:
        return int(self.terms.size)

    def s(self, n: int) -> int:
        if n == 0:
            return 0
        if not 1 <= n <= len(self):
            raise DomainError(f"s_{n} is not materialized (have {len(self)} terms)")
        return int(self.terms[n - 1])

    def padded(self) -> np.ndarray:
        """[s_0, s_1, ..., s_len] with s_0 = 0."""
        return np.concatenate([[0], self.terms])

    def S(self, x: int) -> int:
        """Counting function |S ∩ [1, x]|."""
        if x > self.limit:
            raise DomainError(f"S({x}) needs the ground materialized beyond {self.limit}")
        return int(np.searchsorted(self.terms, x, side="right"))

    def as_set(self) -> FiniteIntegerSet:
        return FiniteIntegerSet(self.terms, (0, self.limit), assume_sorted=True)


def sieve_primes(limit: int) -> GroundSequence:
    """All primes <= limit (sieve of Eratosthenes)."""
    if limit < 2:
        raise DomainError("sieve_primes needs limit >= 2")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return GroundSequence("primes", np.nonzero(flags)[0], limit)


def _two_squares_pairs(limit: int) -> np.ndarray:
    ok = np.zeros(limit + 1, dtype=bool)
    for a in range(math.isqrt(limit) + 1):
        b = np.arange(a, math.isqrt(limit - a * a) + 1, dtype=np.int64)
        ok[a * a + b * b] = True
    ok[0] = False
    return np.nonzero(ok)[0]


def _two_squares_valuation(limit: int) -> np.ndarray:
    # n = a^2 + b^2 iff v_p(n) is even for every prime p = 3 mod 4
    bad = np.zeros(limit + 1, dtype=bool)
    if limit >= 3:
        primes = sieve_primes(limit).terms
        p3 = primes[primes % 4 == 3]
        root = math.isqrt(limit)
        for p in p3[p3 <= root].tolist():
            odd = np.zeros(limit // p + 1, dtype=bool)  # odd[k]: v_p(p*k) is odd
            q = 1
            while q * p <= limit:
                odd[q::q] ^= True
                q *= p
            bad[p::p] |= odd[1:]
        big = p3[p3 > root]
        # for p > sqrt(limit), v_p(n) <= 1, so p | n alone is disqualifying
        for k in range(1, limit // (root + 1) + 1):
            sel = big[:np.searchsorted(big, limit // k, side="right")]
            if sel.size == 0:
                break
            bad[sel * k] = True
    ok = ~bad
    ok[0] = False
    return np.nonzero(ok)[0]


def sieve_two_squares(limit: int, method: str = "valuation") -> GroundSequence:
    """All n in [1, limit] of the form a^2 + b^2."""
    if limit < 1:
        raise DomainError("sieve_two_squares needs limit >= 1")
    if method == "valuation":
        terms = _two_squares_valuation(limit)
    elif method == "pairs":
        terms = _two_squares_pairs(limit)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GroundSequence("two_squares", terms, limit)


def ground_from_set(A: FiniteIntegerSet, name: str = "file") -> GroundSequence:
    pos = A.elements[A.elements >= 1]
    return GroundSequence(name, pos, A.window_hi)


def make_ground(kind: str, limit: int) -> GroundSequence:
    if kind == "primes":
        return sieve_primes(limit)
    if kind == "two_squares":
        return sieve_two_squares(limit)
    if kind.startswith("file:"):
        from .intset import read_set

        return ground_from_set(read_set(kind[5:]), kind)
    raise DomainError(f"unknown ground {kind!r}")


# random sets ---------------------------------------------------------------

def bernoulli_set(lo: int, hi: int, seed: SeedStream) -> FiniteIntegerSet:
    """Each integer of [lo, hi] kept iff the top bit of its word is set."""
    if lo > hi:
        raise DomainError("bernoulli_set needs lo <= hi")
    idx = np.arange(lo, hi + 1, dtype=np.int64)
    keep = (seed.words(idx) >> np.uint64(63)).astype(bool)
    return FiniteIntegerSet(idx[keep], (lo, hi), assume_sorted=True)


def symmetric_bernoulli_set(N: int, seed: SeedStream) -> SymmetricSet:
    """D = {n in [-N, N] : xi_|n| = 1} with xi_m the bit of word m."""
    if N < 1:
        raise DomainError("symmetric_bernoulli_set needs N >= 1")
    half = bernoulli_set(0, N, seed).elements
    pos = half[half > 0]
    both = np.concatenate([-pos[::-1], half[half == 0], pos])
    return SymmetricSet(both, N)


# delta sequences and epsilon laws ------------------------------------------

def _gap_arrays(ground: GroundSequence, count: int):
    """g_minus[n-1] = s_n - s_{n-1}, g_plus[n-1] = s_{n+1} - s_n for n = 1..count."""
    if count + 1 > len(ground):
        raise DomainError(f"need s_{count + 1}, have {len(ground)} terms")
    sp = ground.padded()
    g_minus = sp[1:count + 1] - sp[0:count]
    g_plus = sp[2:count + 2] - sp[1:count + 1]
    return g_minus, g_plus


def support_size(g_minus, g_plus):
    """floor(g+/2) + ceil(g-/2): the number of integers k, -g-/2 < k <= g+/2."""
    g_minus = np.asarray(g_minus, dtype=np.int64)
    g_plus = np.asarray(g_plus, dtype=np.int64)
    return g_plus // 2 + (g_minus + 1) // 2


@dataclass(frozen=True, eq=False)
class DeltaSequence:
    """delta_n for n = 1..len(values); eta_n = 1 / delta_n."""

    values: np.ndarray
    iota: Optional[float] = None
    scale: Optional[float] = None
    raw: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.values.size)

    def delta(self, n: int) -> float:
        if not 1 <= n <= len(self):
            raise DomainError(f"delta_{n} is outside 1..{len(self)}")
        return float(self.values[n - 1])

    def eta(self, n: int) -> float:
        return 1.0 / self.delta(n)

    @classmethod
    def constant(cls, value: float, length: int) -> "DeltaSequence":
        return cls(np.full(length, float(value)))


def d3_upper(ground: GroundSequence, count: int) -> np.ndarray:
    """(s_{n+1} - s_{n-1}) / 2 for n = 1..count."""
    g_minus, g_plus = _gap_arrays(ground, count)
    return (g_minus + g_plus) / 2.0


def default_delta(ground: GroundSequence, iota: float, scale: float = 1.0,
                  count: Optional[int] = None) -> DeltaSequence:
    """delta_n = clamp(scale * max(1, log log max(n, 3))**iota, 1, cap_n).

    ``cap_n = min((s_{n+1} - s_{n-1}) / 2, m_n)`` where ``m_n`` is the size
    of the uniform epsilon support at n. The first term is the D3 ceiling;
    the second only bites when s_n - s_{n-1} is even and s_{n+1} - s_n odd,
    where m_n = (g- + g+ - 1) / 2 falls half a unit below it and a real
    delta_n in between would break E2 for the uniform law.
    """
    if iota <= 0:
        raise DomainError("iota must be positive")
    if scale <= 0:
        raise DomainError("scale must be positive")
    if count is None:
        count = len(ground) - 1
    g_minus, g_plus = _gap_arrays(ground, count)
    n = np.arange(1, count + 1, dtype=np.float64)
    raw = scale * np.maximum(1.0, np.log(np.log(np.maximum(n, 3.0)))) ** iota
    cap = np.minimum((g_minus + g_plus) / 2.0, support_size(g_minus, g_plus))
    values = np.clip(raw, 1.0, np.maximum(cap, 1.0))
    return DeltaSequence(values, iota=iota, scale=scale, raw=raw)


def tight_delta(ground: GroundSequence, count: Optional[int] = None) -> DeltaSequence:
    """The largest delta compatible with D3 and uniform-law E2: delta_n = cap_n."""
    if count is None:
        count = len(ground) - 1
    g_minus, g_plus = _gap_arrays(ground, count)
    cap = np.minimum((g_minus + g_plus) / 2.0, support_size(g_minus, g_plus))
    return DeltaSequence(np.maximum(cap, 1.0))


@dataclass(frozen=True)
class EpsilonDistribution:
    """Per-index law of epsilon_n; ``uniform`` over the E1 interval or ``zero``."""

    kind: str = "uniform"

    def __post_init__(self):
        if self.kind not in ("uniform", "zero"):
            raise DomainError(f"unknown epsilon law {self.kind!r}")

    def bounds(self, g_minus, g_plus):
        """Inclusive integer support [lo, hi] per index."""
        g_minus = np.asarray(g_minus, dtype=np.int64)
        g_plus = np.asarray(g_plus, dtype=np.int64)
        if self.kind == "zero":
            z = np.zeros_like(g_minus)
            return z, z.copy()
        # smallest k with k > -g/2 is floor(-g/2) + 1
        return (-g_minus) // 2 + 1, g_plus // 2

    def atom_probability(self, g_minus, g_plus):
        if self.kind == "zero":
            return np.ones(np.shape(g_minus))
        return 1.0 / support_size(g_minus, g_plus)

    def sample(self, words, g_minus, g_plus):
        lo, hi = self.bounds(g_minus, g_plus)
        if self.kind == "zero":
            return lo
        return lo + kernels.uniform_below(words, hi - lo + 1)


@dataclass(frozen=True, eq=False)
class PerturbationModel:
    ground: GroundSequence
    delta: DeltaSequence
    epsilon: EpsilonDistribution = EpsilonDistribution()

    def gaps(self, count: int):
        return _gap_arrays(self.ground, count)

    def support(self, n: int) -> tuple[int, int]:
        g_minus, g_plus = _gap_arrays(self.ground, n)
        lo, hi = self.epsilon.bounds(g_minus[n - 1:n], g_plus[n - 1:n])
        return int(lo[0]), int(hi[0])


def sample_epsilon(model: PerturbationModel, n: int, seed: SeedStream) -> int:
    """epsilon_n drawn from the word of index n in ``seed``."""
    if n < 1 or n + 1 > len(model.ground):
        raise DomainError(f"epsilon_{n} needs s_{n - 1}, s_{n}, s_{n + 1}")
    g_minus, g_plus = _gap_arrays(model.ground, n)
    w = np.array([seed.word(n)], dtype=np.uint64)
    return int(model.epsilon.sample(w, g_minus[n - 1:n], g_plus[n - 1:n])[0])


def sample_epsilons(model: PerturbationModel, count: int, seed: SeedStream) -> np.ndarray:
    """epsilon_1..epsilon_count as an int64 array."""
    g_minus, g_plus = _gap_arrays(model.ground, count)
    words = seed.words(np.arange(1, count + 1, dtype=np.int64))
    return model.epsilon.sample(words, g_minus, g_plus)


def perturbed_terms(model: PerturbationModel, count: int, seed: SeedStream) -> np.ndarray:
    """c_1..c_count with c_n = s_n + epsilon_n."""
    if count < 1:
        raise DomainError("count must be positive")
    if count + 1 > len(model.ground):
        raise DomainError(f"perturbing {count} terms needs {count + 1} ground terms, "
                          f"have {len(model.ground)}")
    return model.ground.terms[:count] + sample_epsilons(model, count, seed)


def perturbed_window_top(model: PerturbationModel, count: int) -> int:
    """Largest integer below which C is fully determined by c_1..c_count."""
    g_minus, g_plus = _gap_arrays(model.ground, count)
    return int(model.ground.terms[count - 1] + g_plus[-1] // 2)


def perturbed_set(model: PerturbationModel, count: int, seed: SeedStream) -> FiniteIntegerSet:
    """{c_1, ..., c_count} over the window [0, s_count + floor(g+/2)].

    No later c_n can land in that window, so membership there is exact.
    """
    c = perturbed_terms(model, count, seed)
    return FiniteIntegerSet(c, (0, perturbed_window_top(model, count)), assume_sorted=True)
