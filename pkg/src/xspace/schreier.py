"""Schreier families S_k (k >= 0) and S_omega.

Sets are plain tuples of strictly increasing positive integers.  Membership
is decided by a nested greedy automaton: a set lies in S_k iff splitting it
greedily into maximal initial S_{k-1} pieces uses at most ``min F`` pieces,
and the greedy split of ``F + (m,)`` extends the greedy split of ``F``.  The
automaton state is a stack of remaining-capacity counters, one per level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "SchreierIndex",
    "Budget",
    "EMPTY",
    "FREE",
    "as_set",
    "is_schreier",
    "is_maximal_schreier",
    "is_admissible",
    "decompose_maximal",
    "max_weight_subset",
    "in_convolution",
]

FiniteSet = tuple


@dataclass(frozen=True, order=True)
class SchreierIndex:
    """Either ``Finite(k)`` (``k`` an int >= 0) or ``Omega`` (``k is None``)."""

    k: int | None

    def __post_init__(self):
        if self.k is not None and self.k < 0:
            raise ValueError(f"Schreier index must be >= 0, got {self.k}")

    @classmethod
    def finite(cls, k: int) -> "SchreierIndex":
        return cls(int(k))

    @classmethod
    def omega(cls) -> "SchreierIndex":
        return cls(None)

    @property
    def is_omega(self) -> bool:
        return self.k is None

    def lower(self) -> "SchreierIndex":
        """S_{k-1}; only meaningful for finite k >= 1."""
        if self.k is None or self.k == 0:
            raise ValueError(f"{self} has no predecessor")
        return SchreierIndex(self.k - 1)

    def to_json(self):
        return "omega" if self.k is None else self.k

    @classmethod
    def from_json(cls, value) -> "SchreierIndex":
        if value == "omega":
            return cls.omega()
        return cls.finite(int(value))

    def __str__(self):
        return "S_omega" if self.k is None else f"S_{self.k}"


def as_set(elements: Iterable[int]) -> FiniteSet:
    """Normalize to a sorted tuple, rejecting duplicates and non-positive entries."""
    out = tuple(sorted(int(e) for e in elements))
    if any(e < 1 for e in out):
        raise ValueError(f"set elements must be positive integers: {out}")
    if any(a == b for a, b in zip(out, out[1:])):
        raise ValueError(f"duplicate elements in {out}")
    return out


EMPTY = "EMPTY"
FREE = "FREE"


class Budget:
    """Incremental admissibility automaton for one Schreier index.

    States are ``EMPTY``, ``FREE`` (every further element is accepted) or a
    tuple of counters ordered outermost level first.  ``push`` returns the
    successor state or ``None`` on rejection.  Counters are clipped at
    ``cap``, the largest number of elements that will ever be pushed; this
    keeps the state space small without changing the accepted language.
    """

    def __init__(self, index: SchreierIndex, cap: int):
        self.index = index
        self.cap = max(int(cap), 1)

    def start(self):
        return EMPTY

    def push(self, state, m: int):
        if state is None:
            return None
        if state == FREE:
            return FREE
        if state == EMPTY:
            k = m if self.index.k is None else self.index.k
            if k >= 1 and m - 1 >= self.cap:
                # the innermost counter alone absorbs every later element
                return FREE
            fill = min(m - 1, self.cap)
            return (fill,) * k
        counters = list(state)
        for level in range(len(counters) - 1, -1, -1):
            if counters[level] >= 1:
                counters[level] -= 1
                fill = min(m - 1, self.cap)
                for below in range(level + 1, len(counters)):
                    counters[below] = fill
                return tuple(counters)
        return None

    def run(self, elements: Sequence[int]):
        state = EMPTY
        for m in elements:
            state = self.push(state, m)
            if state is None:
                return None
        return state


def is_schreier(F: Iterable[int], index: SchreierIndex) -> bool:
    """True iff ``F`` belongs to the Schreier family ``index``.  The empty set belongs to every family."""
    F = as_set(F)
    if not F:
        return True
    return Budget(index, len(F) + 1).run(F) is not None


def is_admissible(mins: Iterable[int], index: SchreierIndex) -> bool:
    """Admissibility of a successive sequence, judged on its set of minima."""
    mins = tuple(mins)
    if any(a >= b for a, b in zip(mins, mins[1:])):
        raise ValueError(f"minima must be strictly increasing: {mins}")
    return is_schreier(mins, index)


def is_maximal_schreier(F: Iterable[int], index: SchreierIndex) -> bool:
    """F in the family and no right extension stays in it.

    Only ``max F + 1`` is tried: by spreading, if ``F + (m,)`` is in the
    family for some ``m > max F`` then so is ``F + (max F + 1,)``.
    """
    F = as_set(F)
    if not F:
        raise ValueError("maximality is undefined for the empty set")
    return is_schreier(F, index) and not is_schreier(F + (F[-1] + 1,), index)


def _greedy_pieces(F: FiniteSet, index: SchreierIndex) -> list[FiniteSet]:
    """Greedy left-to-right split of F into maximal initial pieces from ``index``."""
    budget = Budget(index, len(F) + 1)
    pieces: list[list[int]] = []
    state = None
    for m in F:
        nxt = budget.push(state, m) if pieces else None
        if nxt is None:
            pieces.append([m])
            state = budget.push(EMPTY, m)
        else:
            pieces[-1].append(m)
            state = nxt
    return [tuple(p) for p in pieces]


def decompose_maximal(F: Iterable[int], k: int) -> list[FiniteSet]:
    """Split a maximal S_k set into its ``min F`` successive maximal S_{k-1} pieces."""
    F = as_set(F)
    if k < 1:
        raise ValueError("decompose_maximal needs k >= 1")
    index = SchreierIndex(k)
    if not F or not is_maximal_schreier(F, index):
        raise ValueError(f"{F} is not a maximal {index} set")
    pieces = _greedy_pieces(F, index.lower())
    assert len(pieces) == F[0], (F, pieces)
    assert all(is_maximal_schreier(p, index.lower()) for p in pieces), pieces
    return pieces


def max_weight_subset(
    c: Mapping[int, Fraction], F: Iterable[int], index: SchreierIndex
) -> tuple[Fraction, FiniteSet]:
    """Largest total weight of a subset G of F with G in ``index``, plus one maximizing G.

    Dynamic programming over automaton states: two subsets reaching the same
    state have identical futures, so only the heavier one is kept.  Ties
    keep the first subset found, scanning "skip" before "take".
    """
    F = as_set(F)
    budget = Budget(index, len(F) + 1)
    best: dict = {EMPTY: (Fraction(0), ())}
    for m in F:
        w = Fraction(c.get(m, 0))
        if w < 0:
            raise ValueError("weights must be nonnegative")
        nxt = dict(best)
        for state, (total, chosen) in best.items():
            s2 = budget.push(state, m)
            if s2 is None:
                continue
            cand = (total + w, chosen + (m,))
            if s2 not in nxt or cand[0] > nxt[s2][0]:
                nxt[s2] = cand
        best = nxt
    value, chosen = max(best.values(), key=lambda t: t[0])
    return value, chosen


def in_convolution(F: Iterable[int], outer: SchreierIndex, inner: SchreierIndex) -> bool:
    """F splits into successive ``inner`` sets whose minima form an ``outer`` set.

    Exhaustive over the 2^(#F-1) ways of cutting F into consecutive blocks.
    """
    F = as_set(F)
    if not F:
        return True
    n = len(F)
    for mask in range(1 << (n - 1)):
        blocks, start = [], 0
        for pos in range(n - 1):
            if mask >> pos & 1:
                blocks.append(F[start : pos + 1])
                start = pos + 1
        blocks.append(F[start:])
        if all(is_schreier(b, inner) for b in blocks) and is_schreier(
            [b[0] for b in blocks], outer
        ):
            return True
    return False
