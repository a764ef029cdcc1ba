"""Exact norm of finitely supported vectors, with a witness functional.

The engine works on |x| (the basis is 1-unconditional) and only ever uses
functionals supported inside supp x: restricting a norming functional to a
set keeps it in the norming set, raises the minima of averages and lowers
their maxima, so nothing is lost.  Every quantity is therefore a function of
a *window*, a run of consecutive support points of x, stored as a tuple of
``(index, value)`` pairs.

* ``node(w)``: the norm of the window vector.  It is the larger of the sup
  norm and the best Schreier sum on the window.
* ``part(w, p)``: the best sum of node values over a split of ``w`` into
  exactly ``p`` consecutive pieces.  Splitting never hurts (the norm is
  subadditive over disjoint pieces), so an average of size ``l`` on ``w``
  is worth ``part(w, min(l, #w)) / l``.  For ``#w >= 2`` this uses at least
  two pieces, so recursion always reaches strictly smaller windows.
* ``schreier(w, adm, first)``: the best sum of averages sitting on disjoint
  sub-windows whose minima are admissible, with sizes growing very fast and
  the first size at least ``first``.  Searched by DP over (position,
  admissibility automaton state, least allowed next size).

Sizes above the piece count of a window only add to the divisor, so for
least allowed size ``L`` the candidates are ``L .. max(L, #w)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .norming import Average, Basis, Functional, Schreier, evaluate, resign, validate
from .schreier import Budget, EMPTY, SchreierIndex
from .vectors import FinVec

Window = tuple  # tuple[(index, Fraction), ...]

ZERO = Fraction(0)


@dataclass
class EngineStats:
    nodes: int = 0
    memo_hits: int = 0

    def to_json(self):
        return {"nodes_explored": self.nodes, "memo_hits": self.memo_hits}


@dataclass(frozen=True)
class NormCertificate:
    value: Fraction
    witness: Functional | None
    family: SchreierIndex
    stats: dict = field(default_factory=dict, compare=False)


class NormEngine:
    """Memoized evaluator for one admissibility family.  Reusable across vectors."""

    def __init__(self, family: SchreierIndex):
        self.family = family
        self.stats = EngineStats()
        self._node: dict = {}
        self._part: dict = {}
        self._schreier: dict = {}

    # -- building blocks ---------------------------------------------------

    def node(self, w: Window) -> tuple[Fraction, Functional]:
        hit = self._node.get(w)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        self.stats.nodes += 1
        if len(w) == 1:
            res = (w[0][1], Basis(1, w[0][0]))
        else:
            i, v = max(w, key=lambda t: t[1])
            res = (v, Basis(1, i))
            val, wit = self.schreier(w, self.family, 2)
            if val > res[0]:
                res = (val, wit)
        self._node[w] = res
        return res

    def part(self, w: Window, p: int) -> tuple[Fraction, tuple]:
        """Best split of ``w`` into exactly ``p`` consecutive pieces (1 <= p <= #w)."""
        key = (w, p)
        hit = self._part.get(key)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        n = len(w)
        if p == 1:
            val, wit = self.node(w)
            res = (val, (wit,))
        elif p == n:
            res = (sum((v for _, v in w), ZERO), tuple(Basis(1, i) for i, _ in w))
        else:
            res = None
            # last piece is w[c:], the rest is split into p - 1 pieces
            for c in range(p - 1, n):
                head_val, head = self.part(w[:c], p - 1)
                tail_val, tail = self.node(w[c:])
                total = head_val + tail_val
                if res is None or total > res[0]:
                    res = (total, head + (tail,))
        self._part[key] = res
        return res

    def average(self, w: Window, size: int) -> tuple[Fraction, Average]:
        n = len(w)
        if n == 1:
            return w[0][1] / size, Average(size, (Basis(1, w[0][0]),))
        val, kids = self.part(w, min(size, n))
        return val / size, Average(size, kids)

    def schreier(
        self, w: Window, adm: SchreierIndex, first: int, exact: bool = False
    ) -> tuple[Fraction, Functional | None]:
        """Best very fast growing, ``adm``-admissible sum of averages inside ``w``.

        With ``exact`` the first average has size exactly ``first``.
        A single average is returned as an Average node rather than a
        one-child Schreier node; both are in the norming set with equal value.
        """
        key = (w, adm, first, exact)
        hit = self._schreier.get(key)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        n = len(w)
        budget = Budget(adm, n)
        memo: dict = {}

        def best(p: int, state, least: int, fixed: bool):
            # value and averages chosen from position p on
            if p >= n:
                return ZERO, ()
            k = (p, state, least, fixed)
            if k in memo:
                self.stats.memo_hits += 1
                return memo[k]
            res = best(p + 1, state, least, fixed)
            nxt_state = budget.push(state, w[p][0])
            if nxt_state is not None:
                for b in range(p, n):
                    sub = w[p : b + 1]
                    top = least if fixed else max(least, b - p + 1)
                    for size in range(least, top + 1):
                        val, avg = self.average(sub, size)
                        rest_val, rest = best(b + 1, nxt_state, max(size, w[b][0]) + 1, False)
                        total = val + rest_val
                        if total > res[0]:
                            res = (total, (avg,) + rest)
            memo[k] = res
            return res

        val, avgs = best(0, EMPTY, max(first, 2), exact)
        if not avgs:
            res = (ZERO, None)
        elif len(avgs) == 1:
            res = (val, avgs[0])
        else:
            res = (val, Schreier(avgs))
        self._schreier[key] = res
        return res

    # -- public entry points -----------------------------------------------

    def norm(self, x: FinVec) -> NormCertificate:
        before = (self.stats.nodes, self.stats.memo_hits)
        w = _window(x)
        if not w:
            value, wit = ZERO, None
        else:
            value, wit = self.node(w)
            wit = resign(wit, _signs(x))
        stats = {
            "nodes_explored": self.stats.nodes - before[0],
            "memo_hits": self.stats.memo_hits - before[1],
        }
        return NormCertificate(value, wit, self.family, stats)

    def norm_j(self, x: FinVec, j: int) -> Fraction:
        if j < 2:
            raise ValueError("j must be at least 2")
        w = _window(x)
        if not w:
            return ZERO
        val, _ = self.part(w, min(j, len(w)))
        return val / j

    def schreier_sup(self, x: FinVec, adm: SchreierIndex, min_size: int = 2, exact_first: bool = False):
        """Largest sum of |alpha_q(x)| over very fast growing ``adm``-admissible averages of size >= min_size.

        With ``exact_first`` the first average has size exactly ``min_size``.
        """
        w = _window(x)
        if not w:
            return ZERO, None
        val, wit = self.schreier(w, adm, max(min_size, 2), exact_first)
        if wit is not None:
            wit = resign(wit, _signs(x))
        return val, wit

    def clear(self):
        self._node.clear()
        self._part.clear()
        self._schreier.clear()


def _window(x: FinVec) -> Window:
    return tuple((i, abs(x[i])) for i in x.support())


def _signs(x: FinVec) -> dict[int, int]:
    return {i: (1 if x[i] > 0 else -1) for i in x.support()}


_ENGINES: dict[SchreierIndex, NormEngine] = {}


def engine_for(family: SchreierIndex) -> NormEngine:
    eng = _ENGINES.get(family)
    if eng is None:
        eng = _ENGINES[family] = NormEngine(family)
    return eng


def norm(x: FinVec, family: SchreierIndex) -> NormCertificate:
    return engine_for(family).norm(x)


def norm_value(x: FinVec, family: SchreierIndex) -> Fraction:
    return engine_for(family).norm(x).value


def norm_j(x: FinVec, j: int, family: SchreierIndex) -> Fraction:
    return engine_for(family).norm_j(x, j)


def schreier_sup(
    x: FinVec, norm_family: SchreierIndex, adm: SchreierIndex, min_size: int = 2, exact_first: bool = False
):
    return engine_for(norm_family).schreier_sup(x, adm, min_size, exact_first)


def certify(cert: NormCertificate, x: FinVec) -> bool:
    """Independent re-check: witness valid, attains the value, value dominates the sup norm."""
    if x.is_zero():
        return cert.value == 0
    if cert.witness is None:
        return False
    if not validate(cert.witness, cert.family):
        return False
    if evaluate(cert.witness, x) != cert.value:
        return False
    return cert.value >= x.sup()


def certificate_json(cert: NormCertificate) -> dict:
    from .norming import to_json

    return {
        "value": str(cert.value),
        "family": cert.family.to_json(),
        "witness": None if cert.witness is None else to_json(cert.witness),
        "stats": dict(cert.stats),
    }
