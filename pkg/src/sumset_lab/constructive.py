"""Greedy constructions of sumsets and difference sets inside a given set.

Both builders follow a least-candidate policy, so they are deterministic
functions of their input. Finite windows eventually run out of room; the
builders then stop and return the verified partial state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError, InvariantError
from .intset import FiniteIntegerSet, SymmetricSet, as_set, difference_set, sumset

_CHUNK = 4096


def _hits(dense: np.ndarray, lo: int, hi: int, H: np.ndarray, start: int,
          exclude: frozenset) -> Optional[int]:
    """Least n >= start with n + H inside the set given by ``dense`` on [lo, hi]."""
    hmin, hmax = int(H.min()), int(H.max())
    start = max(start, lo - hmin)
    last = hi - hmax
    offsets = (H - hmin).astype(np.int64)
    chunk = _CHUNK
    while start <= last:
        stop = min(start + chunk, last + 1)
        # dense index of n + hmin is n + hmin - lo
        p0 = start + hmin - lo
        found = kernels.translate_hits(dense, offsets, p0, stop + hmin - lo)
        for p in found.tolist():
            n = p - hmin + lo
            if n not in exclude:
                return n
        start = stop
        chunk *= 2
    return None


def find_translate(D, H, start: int = 0, exclude=()) -> Optional[int]:
    """Least n >= start with n + H inside D and n not in ``exclude``.

    Returns None once n + max H would pass the end of D's window.

    >>> D = FiniteIntegerSet(range(0, 101, 2), (0, 100))
    >>> find_translate(D, [0, 2])
    0
    >>> find_translate(D, [0, 1]) is None
    True
    """
    D = as_set(D)
    H = np.unique(np.asarray(list(as_set(H)) if not isinstance(H, np.ndarray) else H,
                             dtype=np.int64))
    if H.size == 0:
        raise DomainError("find_translate needs a nonempty H")
    return _hits(D.dense().view(np.uint8), D.window_lo, D.window_hi, H, start,
                 frozenset(int(e) for e in exclude))


def independent_translate_indices(H, count: int) -> list[int]:
    """n_j = j (diam H + 1) for j = 1..count; the translates n_j + H are disjoint."""
    H = as_set(H)
    if len(H) == 0:
        raise DomainError("H must be nonempty")
    step = H.max() - H.min() + 1
    return [j * step for j in range(1, count + 1)]


@dataclass
class BuilderState:
    """Summand lists in construction order plus a per-step trace.

    ``k`` counts completed steps. For the difference builder ``d`` holds
    the targets consumed so far and ``a[i] - b[i] == d[i]``.
    """

    a: list[int] = field(default_factory=list)
    b: list[int] = field(default_factory=list)
    k: int = 0
    k_target: int = 0
    stopped: Optional[str] = None
    d: list[int] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)

    @property
    def A(self) -> FiniteIntegerSet:
        return FiniteIntegerSet(self.a) if self.a else FiniteIntegerSet([], (0, 0))

    @property
    def B(self) -> FiniteIntegerSet:
        return FiniteIntegerSet(self.b) if self.b else FiniteIntegerSet([], (0, 0))

    @property
    def nonnegative(self) -> bool:
        """Both summands inside the naturals (0 included)."""
        return all(v >= 0 for v in self.a + self.b)

    def to_dict(self) -> dict:
        return {"A": sorted(self.a), "B": sorted(self.b), "k": self.k,
                "k_target": self.k_target, "stopped": self.stopped, "d": list(self.d),
                "nonnegative": self.nonnegative, "steps": self.trace}


def _inside(values: np.ndarray, D: FiniteIntegerSet) -> bool:
    e = D.elements
    if e.size == 0:
        return values.size == 0
    pos = np.minimum(np.searchsorted(e, values), e.size - 1)
    return bool(np.all(e[pos] == values))


def _check_sumset(state: BuilderState, D: FiniteIntegerSet) -> None:
    if state.a and state.b and not _inside(sumset(state.A, state.B).elements, D):
        raise InvariantError(f"A + B left D at step {state.k}")


def _check_difference(state: BuilderState, D: FiniteIntegerSet) -> None:
    for i, (x, y, t) in enumerate(zip(state.a, state.b, state.d)):
        if x - y != t:
            raise InvariantError(f"a_{i + 1} - b_{i + 1} != d_{i + 1}")
    if state.a and not _inside(difference_set(state.A, state.B).elements, D):
        raise InvariantError(f"A - B left D at step {state.k}")


def build_sumset_inside(D, k_target: int) -> BuilderState:
    """Grow A = {a_1, ...} and B = {b_1, ...} of nonnegative integers with A + B inside D.

    Starts from a_1 = 0 and b_1 = the least nonnegative element of D, then
    alternates: a_{k+1} is the least new x >= 0 with x + B_k inside D, and
    b_{k+1} the least new y >= 0 with A_{k+1} + y inside D. A step whose
    second half fails is undone, so ``k`` always counts complete pairs.
    """
    D = as_set(D)
    if len(D) == 0:
        raise DomainError("build_sumset_inside needs a nonempty D")
    state = BuilderState(k_target=k_target)
    if k_target <= 0:
        return state
    dense = D.dense().view(np.uint8)
    lo, hi = D.window_lo, D.window_hi
    nonneg = D.elements[D.elements >= 0]
    if nonneg.size == 0:
        state.stopped = "D has no nonnegative element"
        return state
    state.a.append(0)
    state.b.append(int(nonneg[0]))
    state.k = 1
    state.trace.append({"k": 1, "a": 0, "b": state.b[0]})
    _check_sumset(state, D)
    while state.k < k_target:
        x = _hits(dense, lo, hi, np.array(state.b, dtype=np.int64), 0, frozenset(state.a))
        if x is None:
            state.stopped = f"no a_{state.k + 1} inside the window"
            break
        A_next = np.array(state.a + [x], dtype=np.int64)
        y = _hits(dense, lo, hi, A_next, 0, frozenset(state.b))
        if y is None:
            state.stopped = f"no b_{state.k + 1} inside the window"
            break
        state.a.append(x)
        state.b.append(y)
        state.k += 1
        state.trace.append({"k": state.k, "a": x, "b": y})
        _check_sumset(state, D)
    return state


def difference_order(D: FiniteIntegerSet):
    """Elements of D in the order 0, 1, -1, 2, -2, ..."""
    e = D.elements
    order = np.lexsort((-e, np.abs(e)))
    # lexsort puts +t before -t for equal |t| because of the -e key
    return e[order].tolist()


def build_difference_representation(D: SymmetricSet, k_target: int) -> BuilderState:
    """Represent d_1, d_2, ... (``difference_order``) as a_i - b_i with A - B inside D.

    Step k+1 takes the least positive x outside A_k and d_{k+1} + B_k with
    x - B_k and x - d_{k+1} - A_k inside D, and sets a_{k+1} = x,
    b_{k+1} = x - d_{k+1}. b may be negative; ``nonnegative`` reports it.
    """
    if not isinstance(D, SymmetricSet):
        D = SymmetricSet(as_set(D).elements, as_set(D).window_hi)
    if len(D) == 0:
        raise DomainError("build_difference_representation needs a nonempty D")
    state = BuilderState(k_target=k_target)
    dense = D.dense().view(np.uint8)
    lo, hi = D.window_lo, D.window_hi
    targets = difference_order(D)
    for d in targets[:max(k_target, 0)]:
        if not state.a:
            x = 1
        else:
            H = np.concatenate([-np.array(state.b, dtype=np.int64),
                                -d - np.array(state.a, dtype=np.int64)])
            excl = frozenset(state.a) | frozenset(d + v for v in state.b)
            x = _hits(dense, lo, hi, H, 1, excl)
            if x is None:
                state.stopped = f"no a_{state.k + 1} inside the window"
                break
        state.a.append(x)
        state.b.append(x - d)
        state.d.append(d)
        state.k += 1
        state.trace.append({"k": state.k, "d": d, "a": x, "b": x - d})
        _check_difference(state, D)
    else:
        if state.k < k_target:
            state.stopped = "D has no further elements"
    return state
