"""Sampled comparison of ||sum r_m w_m|| and ||sum r_m z_m|| for two block sequences."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..engine import engine_for
from ..schreier import SchreierIndex
from ..vectors import BlockSequence, FinVec, combine, make_scc
from .spreading import ell1k_constant, scc_blocking


@dataclass
class EquivalenceReport:
    theta: Fraction
    low: Fraction
    high: Fraction
    trials: int
    min_ratio: Fraction | None = None
    max_ratio: Fraction | None = None
    violations: list[dict] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "theta": str(self.theta),
            "lower_bound": str(self.low),
            "upper_bound": str(self.high),
            "trials": self.trials,
            "min_ratio": None if self.min_ratio is None else str(self.min_ratio),
            "max_ratio": None if self.max_ratio is None else str(self.max_ratio),
            "violations": self.violations,
            "ok": self.ok,
        }


def _coefficients(rng: random.Random, m: int) -> list[Fraction]:
    while True:
        r = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(m)]
        if any(r):
            return r


def equivalence_probe(
    z: BlockSequence, w: BlockSequence, theta: Fraction, trials: int, seed: int, family: SchreierIndex
) -> EquivalenceReport:
    """Ratios ||sum r w|| / ||sum r z|| on seeded random coefficients, checked against [theta^2/3, 3/theta^2]."""
    if len(z) != len(w):
        raise ValueError("sequences differ in length")
    eng = engine_for(family)
    low, high = theta * theta / 3, 3 / (theta * theta)
    rep = EquivalenceReport(theta, low, high, trials)
    rng = random.Random(seed)
    for t in range(trials):
        r = _coefficients(rng, len(z))
        nz = eng.norm(combine(r, list(z))).value
        nw = eng.norm(combine(r, list(w))).value
        ratio = nw / nz
        row = {"trial": t, "coefficients": [str(c) for c in r], "z_norm": str(nz), "w_norm": str(nw), "ratio": str(ratio)}
        rep.rows.append(row)
        rep.min_ratio = ratio if rep.min_ratio is None else min(rep.min_ratio, ratio)
        rep.max_ratio = ratio if rep.max_ratio is None else max(rep.max_ratio, ratio)
        if not low <= ratio <= high:
            rep.violations.append(row)
    return rep


@dataclass
class InterlacedPair:
    z: BlockSequence
    w: BlockSequence
    theta: Fraction


def interlaced_pair(k: int, count: int, family: SchreierIndex, start: int = 2, t: int = 2) -> InterlacedPair:
    """z and w from the interlaced basis sequences e_start, e_start+2, ... and e_start+1, e_start+3, ...

    z is the s.c.c. blocking of the first sequence; w applies the same
    positions and coefficients to the second, and every w_m is re-certified
    as an s.c.c. with the same epsilon.  theta is the smaller measured
    uniform l_1^k constant of the two input prefixes at scale t.
    """
    need = 1
    while True:
        xs = BlockSequence.basis(range(start, start + 2 * need, 2))
        try:
            blocked = scc_blocking(xs, k, count)
            break
        except ValueError:
            need *= 2
            if need > 4096:
                raise
    last = blocked.positions[-1][-1]
    xs = BlockSequence(list(xs)[:last])
    ys = BlockSequence.basis(range(start + 1, start + 1 + 2 * last, 2))
    w_blocks: list[FinVec] = []
    for pos, cs, cert in zip(blocked.positions, blocked.coefficients, blocked.certificates):
        chosen = [ys[p - 1] for p in pos]
        check = make_scc(chosen, cs, k, cert.eps)
        if not check.valid:
            raise ValueError(f"partner block at positions {pos} is not an s.c.c.: {check.failure}")
        w_blocks.append(combine(cs, chosen))
    theta = min(
        ell1k_constant(xs, k, t, family).uniform,
        ell1k_constant(ys, k, t, family).uniform,
    )
    return InterlacedPair(blocked.blocks, BlockSequence(w_blocks), theta)
