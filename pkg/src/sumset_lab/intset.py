"""Finite integer sets over explicit windows and their sumset algebra.

A :class:`FiniteIntegerSet` carries both a sorted element array and a dense
bit mask (a Python ``int`` whose bit ``i`` stands for ``window_lo + i``).
Both views are built at construction and never mutated afterwards.

Equality and hashing look at the elements only; the window records where
membership is actually known.
"""
from __future__ import annotations

import io
import os
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError
from . import kernels

SET_FORMAT = "sumset-lab-set 1"


def _mask_from_offsets(offsets: np.ndarray, nbits: int) -> int:
    dense = np.zeros(nbits, dtype=bool)
    dense[offsets] = True
    return int.from_bytes(np.packbits(dense, bitorder="little").tobytes(), "little")


def _offsets_from_mask(mask: int, nbits: int) -> np.ndarray:
    nbytes = (nbits + 7) // 8
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.nonzero(np.unpackbits(raw, bitorder="little")[:nbits])[0].astype(np.int64)


def mask_to_words(mask: int, nbits: int) -> np.ndarray:
    nwords = (nbits + 63) // 64
    return np.frombuffer(mask.to_bytes(nwords * 8, "little"), dtype="<u8").copy()


def words_to_mask(words: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")


class FiniteIntegerSet:
    """Immutable set of integers known on the window [window_lo, window_hi].

    Parameters
    ----------
    elements : iterable of int
        Members; duplicates are rejected unless ``assume_sorted`` is false,
        in which case the input is sorted and deduplicated.
    window : (lo, hi), optional
        Defaults to ``(min, max)`` of the elements. Required for empty sets.
    """

    __slots__ = ("_lo", "_hi", "_elements", "_mask")

    def __init__(self, elements: Iterable[int] = (), window: tuple[int, int] | None = None,
                 *, assume_sorted: bool = False):
        arr = np.asarray(list(elements) if not isinstance(elements, np.ndarray) else elements,
                         dtype=np.int64).ravel()
        if not assume_sorted:
            arr = np.unique(arr)
        elif arr.size > 1 and np.any(np.diff(arr) <= 0):
            raise DomainError("elements must be strictly increasing")
        if window is None:
            if arr.size == 0:
                raise DomainError("an empty set needs an explicit window")
            lo, hi = int(arr[0]), int(arr[-1])
        else:
            lo, hi = int(window[0]), int(window[1])
        if lo > hi:
            raise DomainError(f"window_lo {lo} exceeds window_hi {hi}")
        if arr.size and (arr[0] < lo or arr[-1] > hi):
            raise DomainError(f"elements leave the window [{lo}, {hi}]")
        arr.setflags(write=False)
        self._lo, self._hi, self._elements = lo, hi, arr
        self._mask = _mask_from_offsets(arr - lo, hi - lo + 1)

    @classmethod
    def from_mask(cls, mask: int, lo: int, hi: int) -> "FiniteIntegerSet":
        if lo > hi:
            raise DomainError(f"window_lo {lo} exceeds window_hi {hi}")
        nbits = hi - lo + 1
        if mask < 0 or mask >> nbits:
            raise DomainError("mask has bits outside the window")
        obj = cls.__new__(cls)
        arr = _offsets_from_mask(mask, nbits) + lo
        arr.setflags(write=False)
        obj._lo, obj._hi, obj._elements, obj._mask = lo, hi, arr, mask
        return obj

    @classmethod
    def from_dense(cls, dense: np.ndarray, lo: int) -> "FiniteIntegerSet":
        dense = np.asarray(dense, dtype=bool)
        return cls(np.nonzero(dense)[0].astype(np.int64) + lo, (lo, lo + dense.size - 1),
                   assume_sorted=True)

    @classmethod
    def interval(cls, lo: int, hi: int) -> "FiniteIntegerSet":
        return cls(np.arange(lo, hi + 1, dtype=np.int64), (lo, hi), assume_sorted=True)

    # views ---------------------------------------------------------------
    @property
    def window_lo(self) -> int:
        return self._lo

    @property
    def window_hi(self) -> int:
        return self._hi

    @property
    def window(self) -> tuple[int, int]:
        return self._lo, self._hi

    @property
    def width(self) -> int:
        return self._hi - self._lo + 1

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    @property
    def mask(self) -> int:
        return self._mask

    def dense(self) -> np.ndarray:
        out = np.zeros(self.width, dtype=bool)
        out[self._elements - self._lo] = True
        return out

    def tolist(self) -> list[int]:
        return self._elements.tolist()

    def min(self) -> int:
        self._require_nonempty()
        return int(self._elements[0])

    def max(self) -> int:
        self._require_nonempty()
        return int(self._elements[-1])

    def _require_nonempty(self) -> None:
        if self._elements.size == 0:
            raise DomainError("operation needs a nonempty set")

    def __len__(self) -> int:
        return int(self._elements.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self._elements.tolist())

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, (int, np.integer)):
            return False
        x = int(x)
        return self._lo <= x <= self._hi and bool((self._mask >> (x - self._lo)) & 1)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FiniteIntegerSet):
            return np.array_equal(self._elements, other._elements)
        if isinstance(other, (set, frozenset)):
            return set(self.tolist()) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._elements.tobytes())

    def __repr__(self) -> str:
        body = self.tolist()
        if len(body) > 12:
            body = f"{body[:6]}...{body[-3:]} ({len(self)} elements)"
        return f"FiniteIntegerSet({body}, window=[{self._lo}, {self._hi}])"

    def issubset(self, other: "FiniteIntegerSet") -> bool:
        if not len(self):
            return True
        if self.min() < other._lo or self.max() > other._hi:
            return False
        shifted = self._mask << (self._lo - other._lo)
        return shifted & ~other._mask == 0

    # window transforms ---------------------------------------------------
    def translate(self, t: int) -> "FiniteIntegerSet":
        obj = FiniteIntegerSet.__new__(FiniteIntegerSet)
        arr = self._elements + t
        arr.setflags(write=False)
        obj._lo, obj._hi, obj._elements, obj._mask = self._lo + t, self._hi + t, arr, self._mask
        return obj

    def reflect(self) -> "FiniteIntegerSet":
        return FiniteIntegerSet(-self._elements[::-1], (-self._hi, -self._lo), assume_sorted=True)

    def restrict(self, lo: int, hi: int) -> "FiniteIntegerSet":
        if lo > hi:
            raise DomainError("restrict needs lo <= hi")
        new_lo, new_hi = max(lo, self._lo), min(hi, self._hi)
        if new_lo > new_hi:
            new_lo, new_hi = lo, hi
        e = self._elements
        keep = e[(e >= lo) & (e <= hi)]
        return FiniteIntegerSet(keep, (new_lo, new_hi), assume_sorted=True)


class SymmetricSet(FiniteIntegerSet):
    """A set D over [-N, N] with n in D iff -n in D."""

    __slots__ = ()

    def __init__(self, elements: Iterable[int], N: int):
        super().__init__(elements, (-N, N))
        self._check()

    def _check(self) -> None:
        if self._lo != -self._hi:
            raise DomainError("a symmetric set needs a window [-N, N]")
        if not np.array_equal(self._elements, -self._elements[::-1]):
            raise DomainError("set is not closed under n -> -n")

    @classmethod
    def from_base(cls, base: FiniteIntegerSet) -> "SymmetricSet":
        obj = cls.__new__(cls)
        obj._lo, obj._hi, obj._elements, obj._mask = base._lo, base._hi, base._elements, base._mask
        obj._check()
        return obj

    @property
    def N(self) -> int:
        return self._hi

    @property
    def base(self) -> FiniteIntegerSet:
        obj = FiniteIntegerSet.__new__(FiniteIntegerSet)
        obj._lo, obj._hi, obj._elements, obj._mask = self._lo, self._hi, self._elements, self._mask
        return obj


def as_set(x) -> FiniteIntegerSet:
    return x if isinstance(x, FiniteIntegerSet) else FiniteIntegerSet(x)


# sumset algebra ----------------------------------------------------------

def sumset_shift_or(A: FiniteIntegerSet, B: FiniteIntegerSet) -> FiniteIntegerSet:
    """A + B as the OR of B's mask shifted by every a in A."""
    A, B = as_set(A), as_set(B)
    if not len(A) or not len(B):
        raise DomainError("sumset of an empty set")
    if len(A) > len(B):
        A, B = B, A
    lo = A.min() + B.min()
    hi = A.max() + B.max()
    b_mask = B.mask >> (B.min() - B.window_lo)
    b_bits = B.max() - B.min() + 1
    words = kernels.sumset_shift_or(A.elements - A.min(), mask_to_words(b_mask, b_bits),
                                    hi - lo + 1)
    return FiniteIntegerSet.from_mask(words_to_mask(words), lo, hi)


def sumset_naive(A: FiniteIntegerSet, B: FiniteIntegerSet) -> FiniteIntegerSet:
    """A + B by enumerating every pair."""
    A, B = as_set(A), as_set(B)
    if not len(A) or not len(B):
        raise DomainError("sumset of an empty set")
    out = kernels.sumset_naive(A.elements, B.elements)
    return FiniteIntegerSet(out, (A.min() + B.min(), A.max() + B.max()), assume_sorted=True)


def sumset(A, B, method: str = "shift_or") -> FiniteIntegerSet:
    """{a + b : a in A, b in B}, windowed on [min A + min B, max A + max B]."""
    if method == "shift_or":
        return sumset_shift_or(A, B)
    if method == "naive":
        return sumset_naive(A, B)
    raise ValueError(f"unknown sumset method {method!r}")


def difference_set(A, B, method: str = "shift_or") -> FiniteIntegerSet:
    """{a - b : a in A, b in B}."""
    A, B = as_set(A), as_set(B)
    if not len(A) or not len(B):
        raise DomainError("difference set of an empty set")
    return sumset(A, B.reflect(), method)


def counting_function(A: FiniteIntegerSet, x: int) -> int:
    """|A ∩ [1, x]|. Zero and negatives never count."""
    if x > A.window_hi:
        raise DomainError(f"x = {x} lies beyond the window end {A.window_hi}")
    if x < 1:
        return 0
    e = A.elements
    return int(np.searchsorted(e, x, side="right") - np.searchsorted(e, 1, side="left"))


def symmetrize(C: FiniteIntegerSet) -> SymmetricSet:
    """C ∪ (-C) over [-N, N], where N is the top of C's window."""
    C = as_set(C)
    if len(C) and C.min() < 0:
        raise DomainError("symmetrize needs a set of nonnegative integers")
    N = max(C.window_hi, 0)
    e = C.elements
    pos = e[e > 0]
    both = np.concatenate([-pos[::-1], e[e == 0], pos])
    return SymmetricSet(both, N)


def translate(A: FiniteIntegerSet, t: int) -> FiniteIntegerSet:
    return as_set(A).translate(t)


def reflect(A: FiniteIntegerSet) -> FiniteIntegerSet:
    return as_set(A).reflect()


def restrict(A: FiniteIntegerSet, lo: int, hi: int) -> FiniteIntegerSet:
    return as_set(A).restrict(lo, hi)


def window_transform(A: FiniteIntegerSet, action: str, *args: int) -> FiniteIntegerSet:
    """Apply ``translate t``, ``reflect`` or ``restrict lo hi`` by name."""
    if action == "translate":
        return translate(A, *args)
    if action == "reflect":
        return reflect(A, *args)
    if action == "restrict":
        return restrict(A, *args)
    raise ValueError(f"unknown window action {action!r}")


# set files ---------------------------------------------------------------

def format_set(A: FiniteIntegerSet) -> str:
    lines = [f"# format {SET_FORMAT}", f"# window {A.window_lo} {A.window_hi}"]
    lines.extend(str(x) for x in A.tolist())
    return "\n".join(lines) + "\n"


def parse_set(text: str) -> FiniteIntegerSet:
    """Parse the newline-integer set format; raises DomainError on bad input."""
    window = None
    values = []
    for lineno, raw in enumerate(io.StringIO(text), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "window":
                if len(parts) != 3:
                    raise DomainError(f"line {lineno}: window header needs LO HI")
                try:
                    window = (int(parts[1]), int(parts[2]))
                except ValueError:
                    raise DomainError(f"line {lineno}: bad window header") from None
            continue
        try:
            v = int(line)
        except ValueError:
            raise DomainError(f"line {lineno}: not an integer: {line!r}") from None
        if values and v <= values[-1]:
            raise DomainError(f"line {lineno}: values must be strictly ascending")
        values.append(v)
    return FiniteIntegerSet(values, window, assume_sorted=True)


def read_set(path: str | os.PathLike) -> FiniteIntegerSet:
    with open(path, encoding="utf-8") as fh:
        return parse_set(fh.read())


def write_set(A: FiniteIntegerSet, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_set(A))
