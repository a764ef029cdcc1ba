"""Brute-force construction of the norming set, level by level, on a bounded support.

Used only to cross-check the norm engine.

* ``enumerate_W`` lists every valid tree, signed, each distinct tree once.
  Exponential; for tiny parameters only.
* ``oracle_norm`` computes max f(|x|) over the same truncated set without
  listing it.  For a fixed vector, the best functional with a given
  signature (kind, min supp, max supp, size) is assembled from the best
  children with given signatures, because all rules that couple siblings
  only look at those signatures.  Levels are built exactly as the norming
  set is: averages of level-m functionals and Schreier sums of level-m
  averages form level m + 1.  Functionals may use any coordinate in
  [1, support_bound], including ones where x vanishes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .norming import Average, Basis, Functional, Schreier, validate
from .schreier import Budget, EMPTY, SchreierIndex
from .vectors import FinVec


def _min(f):
    return f.support[0]


def _max(f):
    return f.support[-1]


def _chains(pool: list, start_after: int) -> Iterator[tuple]:
    """All nonempty successive chains drawn from ``pool`` (sorted by min supp)."""
    for pos, f in enumerate(pool):
        if _min(f) <= start_after:
            continue
        yield (f,)
        for rest in _chains(pool[pos + 1 :], _max(f)):
            yield (f,) + rest


def enumerate_W(
    support_bound: int,
    family: SchreierIndex,
    depth: int,
    size_cap: int,
    signs: bool = True,
) -> list[Functional]:
    """Functionals with support in [1, support_bound], depth <= ``depth``, average sizes <= size_cap."""
    level: list[Functional] = []
    seen: set = set()
    for i in range(1, support_bound + 1):
        for s in ((1, -1) if signs else (1,)):
            level.append(Basis(s, i))
    seen.update(level)
    for _ in range(depth):
        pool = sorted(level, key=lambda f: (_min(f), _max(f)))
        averages = [f for f in pool if isinstance(f, Average)]
        new: list[Functional] = []
        for chain in _chains(pool, 0):
            for size in range(max(2, len(chain)), size_cap + 1):
                new.append(Average(size, chain))
        for chain in _chains(averages, 0):
            if _vfg(chain) and Budget(family, len(chain) + 1).run([_min(a) for a in chain]) is not None:
                new.append(Schreier(chain))
        for f in new:
            if f not in seen:
                seen.add(f)
                level.append(f)
    return level


def _vfg(chain) -> bool:
    for a, b in zip(chain, chain[1:]):
        if b.size <= a.size or b.size <= _max(a):
            return False
    return True


def in_truncated_W(f: Functional, support_bound: int, family: SchreierIndex, depth: int, size_cap: int) -> bool:
    """Membership in the set listed by ``enumerate_W`` without listing it."""
    if not validate(f, family) or _depth(f) > depth:
        return False
    if f.support[-1] > support_bound:
        return False
    return all(n.size <= size_cap for n in _nodes(f) if isinstance(n, Average))


def _nodes(f):
    yield f
    for c in getattr(f, "children", ()):
        yield from _nodes(c)


def _depth(f) -> int:
    kids = getattr(f, "children", ())
    return 0 if not kids else 1 + max(_depth(c) for c in kids)


def oracle_norm(
    x: FinVec,
    family: SchreierIndex,
    support_bound: int,
    depth: int,
    size_cap: int,
) -> tuple[Fraction, Functional | None]:
    """max f(|x|) over functionals of depth <= ``depth`` on [1, support_bound] with sizes <= size_cap."""
    if x.is_zero():
        return Fraction(0), None
    n = support_bound
    if x.max_supp > n:
        raise ValueError("vector exceeds the support bound")
    val = [Fraction(0)] + [abs(x.get(i)) for i in range(1, n + 1)]
    # best[(lo, hi)] over all kinds; avg[(lo, hi, size)] over averages only
    best = {(i, i): (val[i], Basis(1, i)) for i in range(1, n + 1)}
    avg: dict = {}
    for _ in range(depth):
        new_best = dict(best)
        new_avg = dict(avg)
        chains = _best_chains(best, n)
        for (lo, hi, d), (v, kids) in chains.items():
            for size in range(max(2, d), size_cap + 1):
                cand = (v / size, Average(size, kids))
                _keep(new_avg, (lo, hi, size), cand)
                _keep(new_best, (lo, hi), cand)
        for (lo, hi), cand in _best_schreier(avg, family, n).items():
            _keep(new_best, (lo, hi), cand)
        if _values(new_best) == _values(best) and _values(new_avg) == _values(avg):
            break
        best, avg = new_best, new_avg
    value, wit = max(best.values(), key=lambda t: t[0])
    return value, wit


def _values(table):
    return {k: v[0] for k, v in table.items()}


def _keep(table, key, cand):
    old = table.get(key)
    if old is None or cand[0] > old[0]:
        table[key] = cand


def _best_chains(best, n):
    """Best sums over successive chains of signatures, keyed by (lo, hi, count)."""
    out: dict = {}
    for (lo, hi), (v, f) in best.items():
        out[(lo, hi, 1)] = (v, (f,))
    for d in range(1, n):
        layer = [(k, t) for k, t in out.items() if k[2] == d]
        for (lo, hi, _d), (v, kids) in layer:
            for (lo2, hi2), (v2, f2) in best.items():
                if lo2 > hi:
                    _keep(out, (lo, hi2, d + 1), (v + v2, kids + (f2,)))
    return out


def _best_schreier(avg, family, n):
    """Best very fast growing admissible sums of averages, keyed by (lo, hi)."""
    budget = Budget(family, n + 1)
    states: dict = {}
    for (lo, hi, size), (v, a) in avg.items():
        _keep(states, (lo, hi, size, budget.push(EMPTY, lo)), (v, (a,)))
    frontier = list(states.items())
    while frontier:
        grown: dict = {}
        for (lo, hi, size, st), (v, kids) in frontier:
            for (lo2, hi2, size2), (v2, a2) in avg.items():
                if lo2 <= hi or size2 <= size or size2 <= hi:
                    continue
                st2 = budget.push(st, lo2)
                if st2 is None:
                    continue
                key = (lo, hi2, size2, st2)
                cand = (v + v2, kids + (a2,))
                old = states.get(key)
                if old is None or cand[0] > old[0]:
                    states[key] = cand
                    grown[key] = cand
        frontier = list(grown.items())
    out: dict = {}
    for (lo, hi, _s, _st), (v, kids) in states.items():
        _keep(out, (lo, hi), (v, Schreier(kids)))
    return out
