"""Hypothesis strategies for random vectors, block sequences and valid functionals."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from xspace.norming import Average, Basis, Schreier
from xspace.schreier import SchreierIndex, is_schreier
from xspace.vectors import FinVec


def _cuts(draw, lo, hi, max_pieces):
    """Split [lo, hi] into consecutive nonempty intervals."""
    n = hi - lo + 1
    count = draw(st.integers(1, min(max_pieces, n)))
    inner = sorted(draw(st.lists(st.integers(lo + 1, hi), min_size=count - 1, max_size=count - 1, unique=True))) if count > 1 else []
    bounds = [lo] + inner + [hi + 1]
    return [(a, b - 1) for a, b in zip(bounds, bounds[1:])]


@st.composite
def functionals(draw, lo=1, hi=12, depth=3, family=SchreierIndex(1), signs=True, kinds=("basis", "avg", "schreier")):
    """A valid functional with support inside [lo, hi]."""
    choices = [k for k in kinds if depth > 0 or k == "basis"]
    kind = draw(st.sampled_from(choices))
    sign = draw(st.sampled_from((1, -1))) if signs else 1
    if kind == "basis":
        return Basis(sign, draw(st.integers(lo, hi)))
    if kind == "avg":
        return draw(averages(lo, hi, depth, family, signs))
    pieces = _cuts(draw, lo, hi, 4)
    kids = []
    prev_size, prev_max = 1, 0
    for a, b in pieces:
        if not draw(st.booleans()) and kids:
            continue
        avg = draw(averages(a, b, depth - 1, family, signs, min_size=max(prev_size + 1, prev_max + 1 if kids else 2)))
        trial = kids + [avg]
        if not is_schreier([k.support[0] for k in trial], family):
            break
        kids = trial
        prev_size, prev_max = avg.size, avg.support[-1]
    return Schreier(tuple(kids))


@st.composite
def averages(draw, lo, hi, depth, family=SchreierIndex(1), signs=True, min_size=2):
    if depth <= 0:
        i = draw(st.integers(lo, hi))
        s = draw(st.sampled_from((1, -1))) if signs else 1
        return Average(draw(st.integers(min_size, min_size + 3)), (Basis(s, i),))
    pieces = _cuts(draw, lo, hi, 5)
    keep = [p for p in pieces if draw(st.booleans())] or [pieces[0]]
    kids = tuple(draw(functionals(a, b, depth - 1, family, signs)) for a, b in keep)
    size = draw(st.integers(max(min_size, len(kids), 2), max(min_size, len(kids), 2) + 3))
    return Average(size, kids)


def rationals(max_num=4, max_den=3, allow_zero=True):
    lo = 0 if allow_zero else 1
    return st.builds(
        lambda p, q, s: Fraction(s * p, q),
        st.integers(lo, max_num),
        st.integers(1, max_den),
        st.sampled_from((1, -1)),
    )


@st.composite
def vectors(draw, lo=1, hi=12, max_support=8, nonneg=False):
    idx = draw(st.lists(st.integers(lo, hi), min_size=1, max_size=max_support, unique=True))
    vals = [draw(rationals(allow_zero=False)) for _ in idx]
    if nonneg:
        vals = [abs(v) for v in vals]
    return FinVec(dict(zip(idx, vals)))


@st.composite
def interval_blocks(draw, lo=1, count=4, max_len=3, gap=2):
    """Block sequence whose supports are full intervals (so ranges equal supports)."""
    out, start = [], lo
    for _ in range(count):
        start += draw(st.integers(0, gap))
        length = draw(st.integers(1, max_len))
        coeffs = [abs(draw(rationals(allow_zero=False))) for _ in range(length)]
        out.append(FinVec({start + t: c for t, c in enumerate(coeffs)}))
        start += length
    return out
