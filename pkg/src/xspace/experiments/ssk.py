"""Finite search for a vector v in span{x_i : i in F}, F in S_k, with ||Tv|| < eps ||v||.

A candidate counts as found only when the comparison is certified:
an upper bound for ||Tv|| (exact norm on small supports, else the l1
norm) is below eps times a lower bound for ||v|| (exact norm on small
supports, else the value of an explicit, validated functional).  When Tv
is a scalar multiple of v the exact ratio is used instead.  Running out
of candidates proves nothing and is reported as ``exhausted``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from ..engine import engine_for
from ..norming import Average, Basis, Functional, Schreier, evaluate, to_json, validate
from ..schreier import SchreierIndex, is_schreier
from ..vectors import BlockSequence, FinVec, combine, min_maximal_set, repeated_average
from .operators import OperatorSpec, operator_apply

EXACT_SUPPORT = 12


@dataclass
class SskResult:
    found: bool
    tried: int
    budget: int
    positions: tuple[int, ...] | None = None
    coefficients: list[Fraction] | None = None
    pattern: str | None = None
    image_upper: Fraction | None = None
    vector_lower: Fraction | None = None
    witness: Functional | None = None

    @property
    def status(self) -> str:
        return "found" if self.found else "exhausted"

    def to_json(self):
        out = {"status": self.status, "tried": self.tried, "budget": self.budget}
        if self.found:
            out.update(
                {
                    "positions": list(self.positions),
                    "coefficients": [str(c) for c in self.coefficients],
                    "pattern": self.pattern,
                    "image_upper": str(self.image_upper),
                    "vector_lower": str(self.vector_lower),
                    "witness": None if self.witness is None else to_json(self.witness),
                }
            )
        return out


def _scalar_ratio(tv: FinVec, v: FinVec) -> Fraction | None:
    """|c| if tv == c * v, else None."""
    if tv.is_zero():
        return Fraction(0)
    if tv.support() != v.support():
        return None
    i = v.support()[0]
    c = tv[i] / v[i]
    return abs(c) if tv == v * c else None


def block_witness(blocks: Sequence[FinVec], coeffs: Sequence[Fraction], family: SchreierIndex) -> Functional | None:
    """A very fast growing Schreier sum of one flat average per block, skipping blocks that
    would break admissibility.  Valid in W by construction and re-validated."""
    avgs: list[Average] = []
    least = 2
    for x, c in zip(blocks, coeffs):
        if c == 0:
            continue
        supp = x.support()
        mins = [a.support[0] for a in avgs] + [supp[0]]
        if not is_schreier(mins, family):
            continue
        size = max(len(supp), least)
        sign = 1 if c > 0 else -1
        avgs.append(Average(size, tuple(Basis(sign if x[i] > 0 else -sign, i) for i in supp)))
        least = max(size, supp[-1]) + 1
    if not avgs:
        return None
    f = avgs[0] if len(avgs) == 1 else Schreier(tuple(avgs))
    check = validate(f, family)
    if not check:
        raise AssertionError(f"block witness invalid: {check.reason}")
    return f


def _lower(v: FinVec, blocks, coeffs, family) -> tuple[Fraction, Functional | None]:
    eng = engine_for(family)
    if len(v) <= EXACT_SUPPORT:
        cert = eng.norm(v)
        return cert.value, cert.witness
    best, wit = v.abs().sup(), None
    f = block_witness(blocks, coeffs, family)
    if f is not None:
        val = evaluate(f, v)
        if val > best:
            best, wit = val, f
    return best, wit


def _upper(tv: FinVec, family) -> Fraction:
    if len(tv) <= EXACT_SUPPORT:
        return engine_for(family).norm(tv).value
    return tv.l1()


def candidate_sets(length: int, k: int) -> list[tuple[int, ...]]:
    """Maximal S_k sets of consecutive 1-based positions inside [1, length], by start."""
    out = []
    for m in range(1, length + 1):
        F = min_maximal_set(k, m) if m > 1 or k == 0 else (1,)
        if F[-1] > length:
            break
        out.append(F)
    return out


def _patterns(F: tuple[int, ...], k: int, rng: random.Random, samples: int):
    r = len(F)
    yield "uniform", [Fraction(1)] * r
    ra = repeated_average(k, F)
    yield "repeated-average", [ra[i] for i in F]
    yield "alternating", [Fraction((-1) ** t) for t in range(r)]
    for s in range(samples):
        w = [rng.randint(1, 12) for _ in range(r)]
        tot = sum(w)
        yield f"simplex{s}", [Fraction(a, tot) for a in w]


def ssk_probe(
    operator: OperatorSpec | Callable[[FinVec], FinVec],
    seq: BlockSequence,
    k: int,
    eps: Fraction,
    budget: int,
    seed: int,
    family: SchreierIndex,
    samples: int = 2,
) -> SskResult:
    apply = (lambda v: operator_apply(operator, v)) if isinstance(operator, OperatorSpec) else operator
    rng = random.Random(seed)
    tried = 0
    for F in candidate_sets(len(seq), k):
        blocks = [seq[i - 1] for i in F]
        for name, lam in _patterns(F, k, rng, samples):
            if tried >= budget:
                return SskResult(False, tried, budget)
            tried += 1
            v = combine(lam, blocks)
            if v.is_zero():
                continue
            tv = apply(v)
            c = _scalar_ratio(tv, v)
            if c is not None:
                if c < eps:
                    low, wit = _lower(v, blocks, lam, family)
                    return SskResult(True, tried, budget, F, lam, name, c * low, low, wit)
                continue
            up = _upper(tv, family)
            low, wit = _lower(v, blocks, lam, family)
            if up < eps * low:
                return SskResult(True, tried, budget, F, lam, name, up, low, wit)
    return SskResult(False, tried, budget)
