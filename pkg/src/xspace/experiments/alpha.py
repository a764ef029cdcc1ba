"""Finite probes of how very fast growing average families act on a block sequence.

``alpha_probe`` measures the largest ``sum_q |alpha_q(x_i)|`` over very fast
growing, S_k-admissible families with every size at least ``j0``, for the
vectors from position ``i0`` on.  The sup is computed exactly by the norm
engine (no size or depth window is needed), since only functionals inside
supp x_i matter.

The two ``*_bound`` helpers evaluate the averaging inequalities used to
show that such families are small on special convex combinations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..engine import engine_for
from ..norming import Average, Functional, Schreier, evaluate, kind, to_json, validate
from ..schreier import SchreierIndex
from ..vectors import BlockSequence, FinVec, combine, make_scc


@dataclass
class AlphaProbeResult:
    k: int
    j0: int
    i0: int
    sup_value: Fraction
    position: int | None
    family: Functional | None

    def to_json(self):
        return {
            "k": self.k,
            "j0": self.j0,
            "i0": self.i0,
            "sup_value": str(self.sup_value),
            "position": self.position,
            "family": None if self.family is None else to_json(self.family),
        }


def alpha_probe(seq: BlockSequence, k: int, j0: int, i0: int, family: SchreierIndex) -> AlphaProbeResult:
    """Exact sup of sum_q |alpha_q(x_i)| for i >= i0 (1-based) and sizes >= j0."""
    eng = engine_for(family)
    best, pos, wit = Fraction(0), None, None
    for i in range(max(i0, 1), len(seq) + 1):
        val, f = eng.schreier_sup(seq[i - 1], SchreierIndex(k), j0)
        if f is not None and val > best:
            best, pos, wit = val, i, f
    return AlphaProbeResult(k, j0, i0, best, pos, wit)


def _averages(f: Functional) -> tuple:
    return f.children if isinstance(f, Schreier) else (f,)


def extract_c0k_functionals(
    seq: BlockSequence, k: int, family: SchreierIndex, eps: Fraction, j0: int = 2
) -> list[Functional]:
    """One functional per vector, each a very fast growing S_k-admissible family of averages
    with value > eps on its vector, chained so that the sizes keep growing very fast.

    Any admissible selection of the returned functionals therefore
    concatenates into a valid Schreier functional.
    """
    eng = engine_for(family)
    adm = SchreierIndex(k)
    out: list[Functional] = []
    least = j0
    for i, x in enumerate(seq, start=1):
        val, f = eng.schreier_sup(x, adm, least)
        if f is None or not val > eps:
            raise ValueError(f"vector {i}: best family value {val} does not exceed {eps}")
        out.append(f)
        last = _averages(f)[-1]
        least = max(last.size + 1, f.support[-1] + 1, j0)
    return out


def concatenate(functionals: Sequence[Functional]) -> Functional:
    """Join the average families of successive functionals into one Schreier node."""
    avgs = tuple(a for f in functionals for a in _averages(f))
    return avgs[0] if len(avgs) == 1 else Schreier(avgs)


# averaging inequalities ------------------------------------------------------


def _touches(f: Functional, x: FinVec) -> bool:
    lo, hi = x.range()
    a, b = f.support[0], f.support[-1]
    return not (b < lo or a > hi)


def average_bound(alpha: Average, blocks: Sequence[FinVec], coeffs: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """(|alpha(sum c_k x_k)|, sum_{G} c_i / s(alpha) + 2 max_{G} c_i) with G the blocks whose range meets ran alpha.

    The first value should be strictly below the second whenever G is
    nonempty and the blocks are normalized.
    """
    if kind(alpha) != "avg":
        raise ValueError("expected an average")
    G = [i for i, x in enumerate(blocks) if _touches(alpha, x)]
    lhs = abs(evaluate(alpha, combine(coeffs, blocks)))
    if not G:
        return lhs, Fraction(0)
    rhs = sum((coeffs[i] for i in G), Fraction(0)) / alpha.size + 2 * max(coeffs[i] for i in G)
    return lhs, rhs


def scc_family_bound(
    blocks: Sequence[FinVec],
    coeffs: Sequence[Fraction],
    k: int,
    eps: Fraction,
    family: SchreierIndex,
    first: int,
) -> tuple[Fraction, Fraction, Functional | None]:
    """Largest sum_q |alpha_q(x)| over very fast growing S_{k-1}-admissible families whose
    first average has size exactly ``first``, against 1/first + 6 eps.

    ``x = sum c_i x_i`` must be a (k, eps) s.c.c. of blocks with norm <= 1.
    """
    cert = make_scc(blocks, coeffs, k, eps)
    if not cert.valid:
        raise ValueError(f"not a ({k}, {eps}) s.c.c.: {cert.failure}")
    x = combine(coeffs, blocks)
    val, wit = engine_for(family).schreier_sup(x, SchreierIndex(k - 1), first, exact_first=True)
    if wit is not None:
        check = validate(wit if isinstance(wit, Schreier) else Schreier((wit,)), family, SchreierIndex(k - 1))
        if not check or evaluate(wit, x) != val:
            raise AssertionError(f"witness family failed its own check: {check.reason}")
    return val, Fraction(1, first) + 6 * eps, wit
