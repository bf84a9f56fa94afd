"""Deciding whether a finite set is a sumset A + B with |A|, |B| >= 2.

The search works on bit masks (Python ints, bit i = integer i) after the
target is translated to start at 0. Any decomposition of such a target can
be shifted so that 0 lies in both summands, so only those are searched.

Engine outline
--------------
The state is a pair of bounds per summand, ``lo <= X <= up``. Propagation
runs to a fixpoint:

* ``B_up &= compat(A_lo)`` and ``A_up &= compat(B_lo)``, where
  ``compat(X) = {y : X + y inside the allowed mask}``;
* closure, ``A_lo |= compat(B_up) & dom_A`` and symmetrically. Adding an
  element compatible with every possible partner never breaks a solution,
  so the search only visits pairs where each summand is maximal given the
  other;
* coverage: every required element u needs some a + b = u with a, b in the
  upper bounds. A u with exactly one option forces both sides.

Branching takes the uncovered u with fewest options and tries each (a, b)
with a + b = u. After a refuted option whose partner was already forced,
that option's free side is excluded for the remaining siblings.

For the exact problem the search is first split on the span of the summand
with the shorter span. Fixing it pins both ends of both summands, which
makes targets with one small summand easy.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError
from .intset import FiniteIntegerSet, as_set, sumset
from .seeding import SeedStream

BRUTE_FORCE_MAX_WIDTH = 22


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


EXIT_CODES = {Status.SAT: 0, Status.UNSAT: 1, Status.BUDGET_EXHAUSTED: 2}


@dataclass(frozen=True)
class SearchConfig:
    node_budget: int = 1_000_000
    time_budget: float = 60.0
    enumerate_all: bool = False

    def __post_init__(self):
        if self.node_budget <= 0 or self.time_budget <= 0:
            raise DomainError("search budgets must be positive")


@dataclass(frozen=True)
class DecompositionWitness:
    A: FiniteIntegerSet
    B: FiniteIntegerSet
    mode: str = "exact"
    M: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("exact", "windowed"):
            raise DomainError(f"unknown witness mode {self.mode!r}")
        if (self.mode == "windowed") != (self.M is not None):
            raise DomainError("windowed witnesses carry M, exact ones do not")

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist(), "mode": self.mode, "M": self.M}


@dataclass
class SearchResult:
    status: Status
    witness: Optional[DecompositionWitness] = None
    nodes: int = 0
    elapsed: float = 0.0
    witnesses: list = field(default_factory=list)

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    def to_dict(self) -> dict:
        return {"status": self.status.value,
                "witness": self.witness.to_dict() if self.witness else None,
                "witnesses": [w.to_dict() for w in self.witnesses],
                "nodes": self.nodes, "elapsed": self.elapsed}


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


# bit helpers -----------------------------------------------------------------

def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _dense(x: int, n: int) -> np.ndarray:
    """Bits 0..n-1 of x as a uint8 array."""
    raw = np.frombuffer(x.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


def _mask_of(elements) -> int:
    m = 0
    for e in elements:
        m |= 1 << int(e)
    return m


def _mask_sumset(x: int, y: int) -> int:
    if x.bit_count() > y.bit_count():
        x, y = y, x
    out = 0
    for a in _bits(x):
        out |= y << a
    return out


class _Budget(Exception):
    pass


class _Engine:
    """One bounded search over masks. See the module docstring."""

    def __init__(self, allowed: int, required: int, dom_a: int, dom_b: int,
                 node_budget: int, deadline: float, enumerate_all: bool):
        self.allowed = allowed
        self.required = required
        self.dom_a = dom_a
        self.dom_b = dom_b
        self.top = allowed.bit_length()
        self.full = (1 << self.top) - 1
        self.node_budget = node_budget
        self.deadline = deadline
        self.enumerate_all = enumerate_all
        self.nodes = 0
        self.found: list[tuple[int, int]] = []
        self._seen: set[tuple[int, int]] = set()

    def compat(self, x: int) -> int:
        r = self.full
        for e in _bits(x):
            r &= self.allowed >> e
            if not r:
                break
        return r

    def propagate(self, alo, aup, blo, bup):
        """Fixpoint of the bound rules; None on contradiction.

        Returns ``(state, u)`` where u is the branching element, or None
        once everything required is covered by the lower bounds.
        """
        n = self.top
        while True:
            while True:
                bup2 = bup & self.compat(alo)
                aup2 = aup & self.compat(blo)
                alo2 = alo | (self.compat(bup2) & aup2)
                blo2 = blo | (self.compat(aup2) & bup2)
                if alo2 & ~aup2 or blo2 & ~bup2:
                    return None
                if (alo2, aup2, blo2, bup2) == (alo, aup, blo, bup):
                    break
                alo, aup, blo, bup = alo2, aup2, blo2, bup2
            if aup.bit_count() < 2 or bup.bit_count() < 2:
                return None
            unc = self.required & ~_mask_sumset(alo, blo) if alo and blo else self.required
            if not unc:
                return (alo, aup, blo, bup), None
            a_d = _dense(aup, n)
            b_d = _dense(bup, n)
            cnt = kernels.cover_counts(a_d, b_d, n)
            unc_d = _dense(unc, n).astype(bool)
            c = np.where(unc_d, cnt, np.iinfo(np.int64).max)
            if c.min() == 0:
                return None
            units = np.nonzero(c == 1)[0]
            if units.size == 0:
                return (alo, aup, blo, bup), int(np.argmin(c))
            a_idx = np.nonzero(a_d)[0]
            for u in units.tolist():
                a_s = a_idx[a_idx <= u]
                a = int(a_s[b_d[u - a_s].astype(bool)][0])
                alo |= 1 << a
                blo |= 1 << (u - a)

    def options(self, state, u):
        alo, aup, blo, bup = state
        a_s = np.array([a for a in _bits(aup) if a <= u], dtype=np.int64)
        b_d = _dense(bup, self.top).astype(bool)
        a_s = a_s[b_d[u - a_s]][::-1]
        opts = [(int(a), u - int(a)) for a in a_s]
        # options with a side already forced are cheap to refute: try them first
        opts.sort(key=lambda ab: not ((alo >> ab[0]) & 1 or (blo >> ab[1]) & 1))
        return opts

    def tick(self):
        self.nodes += 1
        if self.nodes > self.node_budget or (self.nodes & 63 == 0
                                              and time.monotonic() > self.deadline):
            raise _Budget()

    def leaf(self, state) -> bool:
        """All required elements covered; record a witness if one fits here."""
        alo, aup, blo, bup = state
        if self.enumerate_all or alo.bit_count() < 2 or blo.bit_count() < 2:
            if alo == aup and blo == bup:
                if alo.bit_count() < 2 or blo.bit_count() < 2:
                    return False
                return self.record(alo, blo)
            # split on a free element of the side with more freedom
            if (aup & ~alo) and ((aup & ~alo).bit_count() >= (bup & ~blo).bit_count()
                                 or not (bup & ~blo)):
                free, side = aup & ~alo, 0
            else:
                free, side = bup & ~blo, 1
            x = free & -free
            hit = False
            for sub in ((alo | x, aup, blo, bup) if side == 0 else (alo, aup, blo | x, bup),
                        (alo, aup & ~x, blo, bup) if side == 0 else (alo, aup, blo, bup & ~x)):
                r = self.propagate(*sub)
                if r is not None and self.dfs(r):
                    hit = True
                    if not self.enumerate_all:
                        return True
            return hit
        return self.record(alo, blo)

    def record(self, a: int, b: int) -> bool:
        if self.enumerate_all:
            # report the closed pair (c(c(a)), c(a)); it still sums to the target
            b = self.compat(a) & self.dom_b
            a = self.compat(b) & self.dom_a
        if (a, b) not in self._seen:
            self._seen.add((a, b))
            self.found.append((a, b))
        return True

    def dfs(self, res) -> bool:
        self.tick()
        state, u = res
        if u is None:
            return self.leaf(state)
        alo, aup, blo, bup = state
        hit = False
        for a, b in self.options(state, u):
            r = self.propagate(alo | (1 << a), aup, blo | (1 << b), bup)
            if r is not None and self.dfs(r):
                hit = True
                if not self.enumerate_all:
                    return True
            if (blo >> b) & 1:
                aup &= ~(1 << a)
            elif (alo >> a) & 1:
                bup &= ~(1 << b)
            else:
                continue
            r = self.propagate(alo, aup, blo, bup)
            if r is None:
                return hit
            (alo, aup, blo, bup), _ = r
        return hit

    def run(self, alo: int, blo: int) -> Optional[Status]:
        """SAT/UNSAT, or None when the budget ran out."""
        try:
            start = self.propagate(alo, self.dom_a, blo, self.dom_b)
            if start is not None:
                self.dfs(start)
        except _Budget:
            if self.found and not self.enumerate_all:
                return Status.SAT
            return None
        return Status.SAT if self.found else Status.UNSAT


# exact problem ---------------------------------------------------------------

def _normalized_mask(T: FiniteIntegerSet) -> tuple[int, int]:
    lo = T.min()
    return T.mask >> (lo - T.window_lo), lo


def _span_choices(tm: int, enumerate_all: bool) -> list[int]:
    """Candidate values w = max B; then max A = max T - w must lie in T too."""
    top = tm.bit_length() - 1
    ws = [w for w in _bits(tm) if w >= 1 and (tm >> (top - w)) & 1]
    if not enumerate_all:
        # the summand with the shorter span is called B
        ws = [w for w in ws if 2 * w <= top]
    return ws


def _span_engine(tm: int, w: int, budget: int, deadline: float, enumerate_all: bool):
    top = tm.bit_length() - 1
    dom_a = tm & ((1 << (top - w + 1)) - 1)
    dom_b = tm & ((1 << (w + 1)) - 1)
    eng = _Engine(tm, tm, dom_a, dom_b, budget, deadline, enumerate_all)
    status = eng.run(1 | (1 << (top - w)), 1 | (1 << w))
    return status, eng


def exact_decompose(T, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Decide T = A + B with |A|, |B| >= 2.

    The search is split by the span w = max B - min B of the summand with
    the shorter span. Every open subproblem gets a node allowance that
    doubles each round, so a shallow solution for any w is found early
    while refutations stay complete.

    The witness has ``min A = min T`` and ``min B = 0``. With
    ``config.enumerate_all`` every normalized pair in which each summand
    is maximal given the other (``A = max_compatible(B)`` and vice versa) is
    listed in ``witnesses``, in both orders.
    """
    T = as_set(T)
    t0 = time.monotonic()
    if len(T) == 0:
        raise DomainError("exact_decompose needs a nonempty target")
    if len(T) <= 2:
        return SearchResult(Status.UNSAT, elapsed=time.monotonic() - t0)
    tm, shift = _normalized_mask(T)
    deadline = t0 + config.time_budget
    open_ws = _span_choices(tm, config.enumerate_all)
    pairs: list = []
    seen: set = set()
    nodes = 0
    allowance = 16
    exhausted = False
    while open_ws:
        still_open = []
        for w in open_ws:
            left = config.node_budget - nodes
            if left <= 0 or time.monotonic() > deadline:
                exhausted = True
                break
            status, eng = _span_engine(tm, w, min(allowance, left), deadline,
                                       config.enumerate_all)
            nodes += eng.nodes
            if status is None:
                still_open.append(w)
                continue
            for pr in eng.found:
                if pr not in seen:
                    seen.add(pr)
                    pairs.append(pr)
            if pairs and not config.enumerate_all:
                open_ws = []
                break
        if exhausted:
            break
        if open_ws:
            open_ws = still_open
        allowance *= 2
    elapsed = time.monotonic() - t0
    if exhausted and not (pairs and not config.enumerate_all):
        return SearchResult(Status.BUDGET_EXHAUSTED, nodes=nodes, elapsed=elapsed)
    status = Status.SAT if pairs else Status.UNSAT
    wits = [_witness_from_masks(a, b, shift) for a, b in pairs]
    return SearchResult(status, wits[0] if wits else None, nodes, elapsed, wits)


def _witness_from_masks(a: int, b: int, shift: int, mode="exact", M=None):
    A = FiniteIntegerSet(np.array(_bits(a), dtype=np.int64) + shift)
    B = FiniteIntegerSet(np.array(_bits(b), dtype=np.int64))
    return DecompositionWitness(A, B, mode, M)


def brute_force_decompose(T) -> SearchResult:
    """Exhaustive oracle for windows of width at most 22.

    Every A inside the normalized target with 0 in A is tried against its
    maximal partner ``max_compatible(A, T)``; any witness (A, B) can be
    enlarged to that partner without changing A + B.
    """
    T = as_set(T)
    t0 = time.monotonic()
    if len(T) == 0:
        raise DomainError("brute_force_decompose needs a nonempty target")
    width = T.max() - T.min()
    if width > BRUTE_FORCE_MAX_WIDTH:
        raise DomainError(f"window width {width} exceeds the oracle limit "
                          f"{BRUTE_FORCE_MAX_WIDTH}")
    tm, shift = _normalized_mask(T)
    rest = _bits(tm)[1:]
    tried = 0
    for sub in range(1, 1 << len(rest)):
        tried += 1
        a = 1
        for i, e in enumerate(rest):
            if sub >> i & 1:
                a |= 1 << e
        b = tm
        for e in _bits(a):
            b &= tm >> e
        if b.bit_count() >= 2 and _mask_sumset(a, b) == tm:
            return SearchResult(Status.SAT, _witness_from_masks(a, b, shift), tried,
                                time.monotonic() - t0)
    return SearchResult(Status.UNSAT, nodes=tried, elapsed=time.monotonic() - t0)


def max_compatible(A_partial, T) -> FiniteIntegerSet:
    """The largest B of nonnegative integers with A_partial + B inside T."""
    A, T = as_set(A_partial), as_set(T)
    if len(A) == 0:
        raise DomainError("max_compatible needs a nonempty A")
    hi = T.max() - A.min() if len(T) else -1
    if hi < 0:
        return FiniteIntegerSet([], (0, 0))
    ok = np.ones(hi + 1, dtype=bool)
    td = T.dense().astype(bool)
    for a in A.elements.tolist():
        # positions a + b for b = 0..hi, relative to the window of T
        idx = np.arange(hi + 1) + (a - T.window_lo)
        inside = (idx >= 0) & (idx < td.size)
        ok &= inside
        ok[inside] &= td[idx[inside]]
    return FiniteIntegerSet(np.nonzero(ok)[0], (0, hi))


def verify_witness(T, w: DecompositionWitness) -> Verdict:
    """Check a witness against its target; the reason names the first defect."""
    T = as_set(T)
    if len(w.A) < 2:
        return Verdict(False, "A has fewer than two elements")
    if len(w.B) < 2:
        return Verdict(False, "B has fewer than two elements")
    S = sumset(w.A, w.B)
    if w.mode == "exact":
        if S != T:
            return Verdict(False, "A + B differs from the target")
        return Verdict(True)
    M = w.M
    N = T.window_hi
    L = N - M
    if w.A.min() < 0 or w.A.max() > L:
        return Verdict(False, f"A leaves [0, {L}]")
    if w.B.min() < 0 or w.B.max() > M:
        return Verdict(False, f"B leaves [0, {M}]")
    if S.restrict(0, L) != T.restrict(0, L):
        return Verdict(False, f"A + B and the target differ on [0, {L}]")
    return Verdict(True)


# windowed problem ------------------------------------------------------------

def window_decompose(C, M: int, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Find A in [0, N-M], B in [0, M], sizes >= 2, with A + B = C on [0, N-M].

    N is the top of C's window, which must start at 0. Sums above N - M are
    unconstrained.
    """
    C = as_set(C)
    t0 = time.monotonic()
    if C.window_lo != 0:
        raise DomainError("window_decompose needs a window starting at 0")
    N = C.window_hi
    if not (2 <= M and 4 * M <= N):
        raise DomainError(f"window_decompose needs 2 <= M <= N/4 (M={M}, N={N})")
    L = N - M
    required = C.restrict(0, L).mask
    free = ((1 << M) - 1) << (L + 1)
    allowed = required | free
    # no normalization here, so a summand may hold points outside C
    dom_a = (1 << (L + 1)) - 1
    dom_b = (1 << (M + 1)) - 1
    eng = _Engine(allowed, required, dom_a, dom_b, config.node_budget,
                  t0 + config.time_budget, config.enumerate_all)
    status = eng.run(0, 0)
    elapsed = time.monotonic() - t0
    if status is None:
        return SearchResult(Status.BUDGET_EXHAUSTED, nodes=eng.nodes, elapsed=elapsed)
    wits = [_witness_from_masks(a, b, 0, "windowed", M) for a, b in eng.found]
    return SearchResult(status, wits[0] if wits else None, eng.nodes, elapsed, wits)


def window_brute_force(C, M: int) -> SearchResult:
    """Exhaustive oracle for the windowed problem at tiny scale.

    Tries every B inside [0, M] (masked by what can appear); for each, the
    largest usable A is forced, so the check is exact.
    """
    C = as_set(C)
    N = C.window_hi
    L = N - M
    if L > BRUTE_FORCE_MAX_WIDTH + M:
        raise DomainError("window too wide for the oracle")
    req = C.restrict(0, L).mask
    allowed = req | (((1 << M) - 1) << (L + 1))
    for b in range(1, 1 << (M + 1)):
        if b.bit_count() < 2:
            continue
        a = (1 << (L + 1)) - 1
        for e in _bits(b):
            a &= allowed >> e
        if a.bit_count() < 2:
            continue
        if _mask_sumset(a, b) & ((1 << (L + 1)) - 1) == req:
            return SearchResult(Status.SAT, _witness_from_masks(a, b, 0, "windowed", M))
    return SearchResult(Status.UNSAT)


# structure statistic and instances -------------------------------------------

def min_adjacent_gap_profile(D, K: int) -> list[int]:
    """m_k = min(d_{k+1} - d_k, d_k - d_{k-1}) for k = 2..K+1 (1-based)."""
    D = as_set(D)
    if K < 1:
        raise DomainError("K must be at least 1")
    if len(D) < K + 2:
        raise DomainError(f"need at least {K + 2} elements, have {len(D)}")
    g = np.diff(D.elements[:K + 2])
    return np.minimum(g[1:], g[:-1]).tolist()


def planted_instance(seed: SeedStream, max_window: int = 300):
    """A random target A + B with A, B containing 0, together with (A, B).

    The total window is drawn from [4, max_window], split between the two
    summands, and each interior point joins its summand with a random
    density. Returns ``(T, A, B)``.
    """
    if max_window < 4:
        raise DomainError("max_window must be at least 4")
    rng = np.random.default_rng(seed.key)
    W = int(rng.integers(4, max_window + 1))
    wa = int(rng.integers(1, W))
    wb = int(rng.integers(1, W - wa + 1))
    da, db = rng.random(2)
    A = np.concatenate([[0, wa], np.nonzero(rng.random(wa) < da)[0]])
    B = np.concatenate([[0, wb], np.nonzero(rng.random(wb) < db)[0]])
    A, B = FiniteIntegerSet(A), FiniteIntegerSet(B)
    return sumset(A, B), A, B
