"""Functionals of the norming set: representation, validation, evaluation, tree analysis.

A functional is a tree.  Leaves are signed coordinate functionals, internal
nodes are averages ``(1/size) * sum(children)`` or Schreier sums of averages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Union

from .schreier import SchreierIndex, is_schreier
from .vectors import FinVec


@dataclass(frozen=True)
class Basis:
    sign: int
    index: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.index < 1:
            raise ValueError("index must be positive")

    @cached_property
    def support(self) -> tuple[int, ...]:
        return (self.index,)

    @property
    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Average:
    size: int
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @cached_property
    def support(self) -> tuple[int, ...]:
        return _merged_support(self.children)


@dataclass(frozen=True)
class Schreier:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @cached_property
    def support(self) -> tuple[int, ...]:
        return _merged_support(self.children)


Functional = Union[Basis, Average, Schreier]


def _merged_support(children) -> tuple[int, ...]:
    return tuple(sorted({i for c in children for i in c.support}))


def fmin(f: Functional) -> int:
    return f.support[0]


def fmax(f: Functional) -> int:
    return f.support[-1]


def kind(f: Functional) -> str:
    if isinstance(f, Basis):
        return "basis"
    if isinstance(f, Average):
        return "avg"
    if isinstance(f, Schreier):
        return "schreier"
    raise TypeError(f"not a functional: {f!r}")


def evaluate(f: Functional, x: FinVec) -> Fraction:
    if isinstance(f, Basis):
        return f.sign * x.get(f.index, Fraction(0))
    total = sum((evaluate(c, x) for c in f.children), Fraction(0))
    if isinstance(f, Average):
        return total / f.size
    return total


def coefficients(f: Functional) -> FinVec:
    """The functional as a vector of c_00."""
    if isinstance(f, Basis):
        return FinVec({f.index: f.sign})
    out: dict[int, Fraction] = {}
    for c in f.children:
        for i, v in coefficients(c).items():
            out[i] = out.get(i, Fraction(0)) + v
    scale = Fraction(1, f.size) if isinstance(f, Average) else Fraction(1)
    return FinVec({i: v * scale for i, v in out.items()})


def depth(f: Functional) -> int:
    """Height of the tree; leaves have depth 0 (membership level in W)."""
    if isinstance(f, Basis):
        return 0
    return 1 + max(depth(c) for c in f.children)


@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: str | None = None
    path: tuple[int, ...] = ()

    def __bool__(self):
        return self.ok


def validate(f: Functional, index: SchreierIndex, root_index: SchreierIndex | None = None) -> Validation:
    """Check every structural rule for membership in W; report the first violation.

    ``root_index``, when given, replaces ``index`` for the admissibility of
    the root Schreier node only (used for average families of a lower order).
    """
    return _validate(f, index, (), root_index)


def _validate(f, index, path, root_index=None) -> Validation:
    if isinstance(f, Basis):
        return Validation(True)
    if not isinstance(f, (Average, Schreier)):
        return Validation(False, f"unknown node {type(f).__name__}", path)
    kids = f.children
    if not kids:
        return Validation(False, "node without children", path)
    for q, (a, b) in enumerate(zip(kids, kids[1:])):
        if fmax(a) >= fmin(b):
            return Validation(False, f"children {q + 1} and {q + 2} are not successive", path)
    if isinstance(f, Average):
        if f.size < 2:
            return Validation(False, f"average size {f.size} < 2", path)
        if len(kids) > f.size:
            return Validation(False, f"{len(kids)} children exceed size {f.size}", path)
    else:
        for q, c in enumerate(kids):
            if not isinstance(c, Average):
                return Validation(False, f"Schreier child {q + 1} is not an average", path)
        for q in range(1, len(kids)):
            prev, cur = kids[q - 1], kids[q]
            if cur.size <= prev.size:
                return Validation(
                    False, f"sizes not increasing: {prev.size} then {cur.size}", path
                )
            if cur.size <= fmax(prev):
                return Validation(
                    False,
                    f"size {cur.size} of child {q + 1} not above max supp {fmax(prev)} of child {q}",
                    path,
                )
        mins = [fmin(c) for c in kids]
        adm = index if root_index is None else root_index
        if not is_schreier(mins, adm):
            return Validation(False, f"minima {mins} not in {adm}", path)
    for q, c in enumerate(kids):
        sub = _validate(c, index, path + (q,))
        if not sub:
            return sub
    return Validation(True)


# JSON -----------------------------------------------------------------------


def to_json(f: Functional):
    if isinstance(f, Basis):
        return {"type": "basis", "sign": f.sign, "index": f.index}
    if isinstance(f, Average):
        return {"type": "avg", "size": f.size, "children": [to_json(c) for c in f.children]}
    return {"type": "schreier", "children": [to_json(c) for c in f.children]}


def from_json(obj) -> Functional:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("functional nodes are objects with a 'type' tag")
    t = obj["type"]
    if t == "basis":
        return Basis(int(obj["sign"]), int(obj["index"]))
    if t == "avg":
        return Average(int(obj["size"]), tuple(from_json(c) for c in obj["children"]))
    if t == "schreier":
        return Schreier(tuple(from_json(c) for c in obj["children"]))
    raise ValueError(f"unknown node type {t!r}")


def resign(f: Functional, signs: dict[int, int]) -> Functional:
    """Flip leaf signs so the functional matches the sign pattern of a vector."""
    if isinstance(f, Basis):
        return Basis(f.sign * signs.get(f.index, 1), f.index)
    rebuilt = tuple(resign(c, signs) for c in f.children)
    return Average(f.size, rebuilt) if isinstance(f, Average) else Schreier(rebuilt)


def average_of(indices, size: int | None = None, sign: int = 1) -> Average:
    """Convenience: ``(1/size) * sum e_i*`` over the given indices."""
    indices = tuple(indices)
    return Average(size if size is not None else len(indices), tuple(Basis(sign, i) for i in indices))


# Tree analysis ----------------------------------------------------------------


@dataclass(frozen=True)
class TreeNode:
    path: tuple[int, ...]
    functional: Functional
    support: tuple[int, ...]
    range: tuple[int, int]
    depth: int
    kind: str


class TreeAnalysis:
    """Nodes keyed by their path from the root; ``a <= b`` in the tree order iff a's path is a prefix of b's."""

    def __init__(self, f: Functional):
        self.root = f
        self.nodes: dict[tuple[int, ...], TreeNode] = {}
        self._build(f, ())

    def _build(self, f, path):
        supp = f.support
        self.nodes[path] = TreeNode(path, f, supp, (supp[0], supp[-1]), len(path), kind(f))
        for q, c in enumerate(f.children):
            self._build(c, path + (q,))

    def __iter__(self) -> Iterator[TreeNode]:
        return iter(self.nodes.values())

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, path) -> TreeNode:
        return self.nodes[tuple(path)]

    def successors(self, path) -> list[TreeNode]:
        f = self.nodes[tuple(path)].functional
        return [self.nodes[tuple(path) + (q,)] for q in range(len(f.children))]

    @staticmethod
    def precedes(a: tuple, b: tuple) -> bool:
        return len(a) <= len(b) and b[: len(a)] == a

    def comparable(self, a: tuple, b: tuple) -> bool:
        return self.precedes(a, b) or self.precedes(b, a)

    def covering_node(self, x: FinVec) -> tuple[int, ...] | None:
        """Deepest node whose support meets supp x exactly as the root does; None if disjoint."""
        target = set(self.root.support) & set(x.support())
        if not target:
            return None
        path = ()
        while True:
            nxt = None
            for node in self.successors(path):
                if target <= set(node.support):
                    nxt = node.path
                    break
            if nxt is None:
                return path
            path = nxt

    def internal(self) -> list[TreeNode]:
        return [n for n in self if n.kind != "basis"]

    def leaves(self) -> list[TreeNode]:
        return [n for n in self if n.kind == "basis"]


def tree_analysis(f: Functional, index: SchreierIndex | None = None) -> TreeAnalysis:
    if index is not None:
        check = validate(f, index)
        if not check:
            raise ValueError(f"invalid functional: {check.reason}")
    return TreeAnalysis(f)


@dataclass(frozen=True)
class CoverDecomposition:
    node: tuple[int, ...]
    initial: FinVec
    middle: FinVec
    final: FinVec


def cover_decompose(f: Functional, x: FinVec, analysis: TreeAnalysis | None = None) -> CoverDecomposition:
    """Split x into initial, middle and final parts relative to the first covering node.

    When the common support is a single point the covering node is a leaf
    and the whole vector is returned as the initial part.
    """
    tree = analysis or TreeAnalysis(f)
    lam = tree.covering_node(x)
    if lam is None:
        raise ValueError("supports of f and x are disjoint")
    zero = FinVec()
    kids = tree.successors(lam)
    if not kids:
        return CoverDecomposition(lam, x, zero, zero)
    lo, hi = x.range()
    meeting = [n for n in kids if n.range[0] <= hi and lo <= n.range[1]]
    first, last = meeting[0], meeting[-1]
    x1 = x.restrict(None, first.range[1])
    x3 = x.restrict(last.range[0], None)
    x2 = x - x1 - x3
    return CoverDecomposition(lam, x1, x2, x3)
