"""Finitely supported rational vectors, special convex combinations, repeated averages."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .schreier import (
    SchreierIndex,
    as_set,
    decompose_maximal,
    is_maximal_schreier,
    is_schreier,
    max_weight_subset,
    Budget,
    EMPTY,
)

_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(value) -> Fraction:
    """Parse an int, Fraction, or ``"p/q"`` string.  Decimal strings and floats are refused."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        q = Fraction(value.replace(" ", ""))
        return q
    raise ValueError(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


class FinVec(Mapping[int, Fraction]):
    """Immutable vector of c_00 with exact rational coordinates.

    Zero coordinates are never stored, so ``len`` is the support size.
    """

    __slots__ = ("_data", "_support", "_hash")

    def __init__(self, entries: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[int, Fraction] = {}
        for i, v in items:
            i = int(i)
            if i < 1:
                raise ValueError(f"indices are positive integers, got {i}")
            q = parse_rational(v)
            if q:
                data[i] = data.get(i, Fraction(0)) + q
                if not data[i]:
                    del data[i]
        self._data = data
        self._support = tuple(sorted(data))
        self._hash = None

    @classmethod
    def basis(cls, i: int, coef=1) -> "FinVec":
        return cls({i: coef})

    @classmethod
    def ones(cls, indices: Iterable[int], coef=1) -> "FinVec":
        return cls({i: coef for i in indices})

    def __getitem__(self, i: int) -> Fraction:
        return self._data[i]

    def get(self, i, default=Fraction(0)):
        return self._data.get(i, default)

    def __iter__(self) -> Iterator[int]:
        return iter(self._support)

    def __len__(self) -> int:
        return len(self._support)

    def __eq__(self, other):
        if isinstance(other, FinVec):
            return self._data == other._data
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((i, self._data[i]) for i in self._support))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{i}: {self._data[i]}" for i in self._support)
        return f"FinVec({{{body}}})"

    def support(self) -> tuple[int, ...]:
        return self._support

    def range(self) -> tuple[int, int]:
        if not self._support:
            raise ValueError("the zero vector has no range")
        return self._support[0], self._support[-1]

    @property
    def min_supp(self) -> int:
        return self.range()[0]

    @property
    def max_supp(self) -> int:
        return self.range()[1]

    def is_zero(self) -> bool:
        return not self._support

    def __add__(self, other: "FinVec") -> "FinVec":
        out = dict(self._data)
        for i, v in other._data.items():
            out[i] = out.get(i, Fraction(0)) + v
        return FinVec(out)

    def __sub__(self, other: "FinVec") -> "FinVec":
        return self + other * -1

    def __neg__(self):
        return self * -1

    def __mul__(self, scalar) -> "FinVec":
        s = Fraction(scalar)
        return FinVec({i: v * s for i, v in self._data.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "FinVec":
        return self * (1 / Fraction(scalar))

    def abs(self) -> "FinVec":
        return FinVec({i: abs(v) for i, v in self._data.items()})

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self._data.values()), Fraction(0))

    def sup(self) -> Fraction:
        return max((abs(v) for v in self._data.values()), default=Fraction(0))

    def total(self) -> Fraction:
        return sum(self._data.values(), Fraction(0))

    def restrict(self, lo: int | None = None, hi: int | None = None) -> "FinVec":
        """Coordinates with ``lo <= i <= hi`` (either bound may be open)."""
        return FinVec(
            {
                i: v
                for i, v in self._data.items()
                if (lo is None or i >= lo) and (hi is None or i <= hi)
            }
        )

    def restrict_to(self, indices: Iterable[int]) -> "FinVec":
        keep = set(indices)
        return FinVec({i: v for i, v in self._data.items() if i in keep})

    def to_json(self) -> dict[str, str]:
        return {str(i): format_rational(self._data[i]) for i in self._support}

    @classmethod
    def from_json(cls, obj: Mapping[str, object]) -> "FinVec":
        if not isinstance(obj, Mapping):
            raise ValueError("a vector is a JSON object {index: \"p/q\"}")
        return cls({int(k): parse_rational(v) for k, v in obj.items()})


def vsum(vectors: Iterable[FinVec]) -> FinVec:
    out: dict[int, Fraction] = {}
    for v in vectors:
        for i in v:
            out[i] = out.get(i, Fraction(0)) + v[i]
    return FinVec(out)


def combine(coeffs: Sequence, vectors: Sequence[FinVec]) -> FinVec:
    if len(coeffs) != len(vectors):
        raise ValueError("coefficients and vectors differ in length")
    return vsum(v * Fraction(c) for c, v in zip(coeffs, vectors))


@dataclass(frozen=True)
class BlockSequence:
    """Nonzero vectors with strictly successive supports."""

    vectors: tuple[FinVec, ...]

    def __init__(self, vectors: Iterable[FinVec]):
        vectors = tuple(vectors)
        for pos, v in enumerate(vectors):
            if v.is_zero():
                raise ValueError(f"block {pos + 1} is zero")
        for a, b in zip(vectors, vectors[1:]):
            if a.max_supp >= b.min_supp:
                raise ValueError(f"blocks are not successive: {a.range()} vs {b.range()}")
        object.__setattr__(self, "vectors", vectors)

    @classmethod
    def basis(cls, indices: Iterable[int]) -> "BlockSequence":
        return cls(FinVec.basis(i) for i in indices)

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, pos):
        return self.vectors[pos]

    def __iter__(self):
        return iter(self.vectors)

    def mins(self) -> tuple[int, ...]:
        return tuple(v.min_supp for v in self.vectors)

    def to_json(self):
        return [v.to_json() for v in self.vectors]

    @classmethod
    def from_json(cls, obj) -> "BlockSequence":
        return cls(FinVec.from_json(v) for v in obj)


@dataclass(frozen=True)
class SccCertificate:
    k: int
    eps: Fraction
    F: tuple[int, ...]
    worst_subset: tuple[int, ...]
    worst_weight: Fraction
    valid: bool
    failure: str | None = None

    def __bool__(self):
        return self.valid

    def to_json(self):
        return {
            "k": self.k,
            "eps": format_rational(self.eps),
            "F": list(self.F),
            "worst_subset": list(self.worst_subset),
            "worst_weight": format_rational(self.worst_weight),
            "valid": self.valid,
            "failure": self.failure,
        }


def is_basic_scc(x: FinVec, k: int, eps) -> SccCertificate:
    """Check that x is a (k, eps) basic special convex combination.

    The certificate always carries the heaviest S_{k-1} subset of the
    support; ``failure`` names the first broken condition.
    """
    eps = parse_rational(eps)
    if k < 1:
        raise ValueError("basic s.c.c. needs k >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    F = x.support()
    weight, worst = max_weight_subset(
        {i: abs(x[i]) for i in F}, F, SchreierIndex(k - 1)
    )

    def cert(failure=None):
        return SccCertificate(k, eps, F, worst, weight, failure is None, failure)

    if not F:
        return cert("empty support")
    if not is_schreier(F, SchreierIndex(k)):
        return cert(f"support not in S_{k}")
    if any(x[i] < 0 for i in F):
        return cert("negative coefficient")
    if x.total() != 1:
        return cert(f"coefficients sum to {x.total()}, not 1")
    if not weight < eps:
        return cert(f"S_{k - 1} subset {worst} has weight {weight} >= {eps}")
    return cert()


def compress(blocks: Sequence[FinVec], coeffs: Sequence) -> FinVec:
    """The vector sum_k c_k e_{min supp x_k}."""
    if len(blocks) != len(coeffs):
        raise ValueError("coefficients must align with blocks")
    BlockSequence(blocks)
    return FinVec({b.min_supp: c for b, c in zip(blocks, coeffs)})


def make_scc(blocks: Sequence[FinVec], coeffs: Sequence, n: int, eps) -> SccCertificate:
    """Validate sum c_k x_k as an (n, eps) special convex combination."""
    coeffs = [parse_rational(c) for c in coeffs]
    if any(c == 0 for c in coeffs):
        return SccCertificate(n, parse_rational(eps), (), (), Fraction(0), False, "zero coefficient")
    return is_basic_scc(compress(blocks, coeffs), n, eps)


def repeated_average(k: int, F: Iterable[int]) -> FinVec:
    """The repeated average of a maximal S_k set (k >= 1)."""
    F = as_set(F)
    if k < 1:
        raise ValueError("repeated averages need k >= 1")
    if not F or not is_maximal_schreier(F, SchreierIndex(k)):
        raise ValueError(f"{F} is not a maximal S_{k} set")
    if k == 1:
        return FinVec.ones(F, Fraction(1, len(F)))
    pieces = decompose_maximal(F, k)
    d = len(pieces)
    return vsum(repeated_average(k - 1, p) for p in pieces) / d


def min_maximal_set(k: int, start: int) -> tuple[int, ...]:
    """The interval-shaped maximal S_k set beginning at ``start``."""
    if start < 1 or k < 0:
        raise ValueError("need start >= 1 and k >= 0")
    if k == 0:
        return (start,)
    out: list[int] = []
    nxt = start
    for _ in range(start):
        piece = min_maximal_set(k - 1, nxt)
        out.extend(piece)
        nxt = piece[-1] + 1
    return tuple(out)


def greedy_maximal_prefix(mins: Sequence[int], k: int) -> int:
    """Length of the shortest prefix of ``mins`` forming a maximal S_k set, or 0 if none.

    Elements are pushed while the set stays in S_k; the first rejection
    certifies maximality by spreading.
    """
    budget = Budget(SchreierIndex(k), len(mins) + 1)
    state = EMPTY
    for count, m in enumerate(mins):
        nxt = budget.push(state, m)
        if nxt is None:
            return count
        state = nxt
    return 0
