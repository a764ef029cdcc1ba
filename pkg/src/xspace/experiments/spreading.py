"""Spreading-model probes: c_0 and l_1^k constants, fast-growing blocking, s.c.c. blocking.

Subsets of a block sequence are judged for Schreier membership on the
minimum supports of the chosen blocks (``F`` below is a set of 0-based
positions; ``mins[F]`` must lie in the family).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from ..engine import engine_for, norm_value
from ..schreier import SchreierIndex, is_schreier
from ..vectors import (
    BlockSequence,
    FinVec,
    SccCertificate,
    combine,
    greedy_maximal_prefix,
    is_basic_scc,
    make_scc,
    repeated_average,
    vsum,
)


def basis_sequence(indices: Iterable[int]) -> BlockSequence:
    return BlockSequence.basis(indices)


def admissible_subsets(seq: BlockSequence, index: SchreierIndex, t: int):
    """Nonempty position sets of size <= t whose block minima lie in ``index``."""
    mins = seq.mins()
    for r in range(1, min(t, len(seq)) + 1):
        for F in combinations(range(len(seq)), r):
            if is_schreier([mins[p] for p in F], index):
                yield F


def c0_constant(seq: BlockSequence, t: int, family: SchreierIndex) -> tuple[Fraction, tuple[int, ...]]:
    """max ||sum_{i in F} x_i|| over S_1-admissible F with #F <= t; returns the value and a maximizing F."""
    best, arg = Fraction(0), ()
    for F in admissible_subsets(seq, SchreierIndex(1), t):
        v = norm_value(vsum(seq[p] for p in F), family)
        if v > best:
            best, arg = v, F
    return best, arg


@dataclass
class Ell1Estimate:
    uniform: Fraction
    uniform_at: tuple
    sampled: Fraction | None
    sampled_at: tuple | None
    samples: int

    @property
    def value(self) -> Fraction:
        if self.sampled is None:
            return self.uniform
        return min(self.uniform, self.sampled)

    def to_json(self):
        return {
            "uniform": str(self.uniform),
            "uniform_at": list(self.uniform_at),
            "sampled": None if self.sampled is None else str(self.sampled),
            "sampled_at": None if self.sampled_at is None else [list(self.sampled_at[0]), [str(c) for c in self.sampled_at[1]]],
            "samples": self.samples,
            "value": str(self.value),
        }


def _simplex_point(rng: random.Random, r: int) -> list[Fraction]:
    weights = [rng.randint(1, 12) for _ in range(r)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def ell1k_constant(
    seq: BlockSequence,
    k: int,
    t: int,
    family: SchreierIndex,
    seed: int | None = None,
    samples: int = 4,
) -> Ell1Estimate:
    """Upper estimate of the lower l_1^k constant on the prefix.

    Uniform coefficients are always probed.  With a seed, ``samples``
    random simplex points per set are probed as well; they are reported
    separately.  Every probe yields an upper bound for the true constant.
    """
    rng = random.Random(seed) if seed is not None else None
    uni, uni_at = None, ()
    smp, smp_at = None, None
    count = 0
    for F in admissible_subsets(seq, SchreierIndex(k), t):
        blocks = [seq[p] for p in F]
        v = norm_value(vsum(blocks), family) / len(F)
        if uni is None or v < uni:
            uni, uni_at = v, F
        if rng is None or len(F) == 1:
            continue
        for _ in range(samples):
            lam = _simplex_point(rng, len(F))
            count += 1
            v = norm_value(combine(lam, blocks), family)
            if smp is None or v < smp:
                smp, smp_at = v, (F, lam)
    if uni is None:
        raise ValueError("no admissible subset in the prefix")
    return Ell1Estimate(uni, uni_at, smp, smp_at, count)


def block_fast_growing(seq: BlockSequence, sizes: Sequence[int], start: int = 2) -> BlockSequence:
    """y_j = sum of ``sizes[j]`` consecutive vectors, beginning at 1-based position ``start``.

    Each block must satisfy #F_j <= min F_j (positions) and, after the
    first, #F_j > max(max supp y_{j-1}, #F_{j-1}).
    """
    out: list[FinVec] = []
    pos = start
    prev = None
    for j, size in enumerate(sizes):
        if size < 1:
            raise ValueError("block sizes must be positive")
        if size > pos:
            raise ValueError(f"block {j + 1}: #F = {size} > min F = {pos}")
        if prev is not None:
            need = max(prev[0].max_supp, prev[1])
            if size <= need:
                raise ValueError(f"block {j + 1}: #F = {size} does not exceed {need}")
        if pos - 1 + size > len(seq):
            raise ValueError(f"block {j + 1} runs past the sequence")
        y = vsum(seq[p - 1] for p in range(pos, pos + size))
        out.append(y)
        prev = (y, size)
        pos += size
    return BlockSequence(out)


@dataclass
class SccBlocks:
    blocks: BlockSequence
    positions: list[tuple[int, ...]]
    coefficients: list[list[Fraction]]
    certificates: list[SccCertificate]

    def to_json(self):
        return {
            "blocks": self.blocks.to_json(),
            "positions": [list(p) for p in self.positions],
            "coefficients": [[str(c) for c in cs] for cs in self.coefficients],
            "certificates": [c.to_json() for c in self.certificates],
        }


def scc_blocking(seq: BlockSequence, k: int, count: int, start: int = 1) -> SccBlocks:
    """Successive (k, 3/min) s.c.c. blocks with repeated-average coefficients.

    Each block takes the shortest run of consecutive vectors (from 1-based
    position ``start`` on) whose minima form a maximal S_k set.
    """
    mins = seq.mins()
    pos = start - 1
    blocks, positions, coeffs, certs = [], [], [], []
    for j in range(count):
        length = greedy_maximal_prefix(mins[pos:], k)
        if length == 0:
            raise ValueError(f"sequence too short for s.c.c. block {j + 1}")
        F = mins[pos : pos + length]
        ra = repeated_average(k, F)
        cs = [ra[m] for m in F]
        chosen = [seq[p] for p in range(pos, pos + length)]
        cert = make_scc(chosen, cs, k, Fraction(3, F[0]))
        if not cert.valid:
            raise ValueError(f"block {j + 1} is not an s.c.c.: {cert.failure}")
        blocks.append(combine(cs, chosen))
        positions.append(tuple(range(pos + 1, pos + length + 1)))
        coeffs.append(cs)
        certs.append(cert)
        pos += length
    return SccBlocks(BlockSequence(blocks), positions, coeffs, certs)


# c_0 subsequence selection ------------------------------------------------------


def geometric_eps(i: int, ratio: int = 5) -> Fraction:
    """eps_i = ratio^-i; for ratio >= 5 this satisfies eps_i > 3 * sum_{j>i} eps_j."""
    return Fraction(1, ratio**i)


@dataclass
class C0Selection:
    vectors: list[FinVec]
    eps: list[Fraction]
    checks: list[dict] = field(default_factory=list)

    def tail(self, t: int) -> BlockSequence:
        """The vectors from 1-based position t on: every S_1 choice of #F <= t among them
        is covered by the selection guarantee."""
        return BlockSequence(self.vectors[t - 1 :])

    def to_json(self):
        return {
            "vectors": [v.to_json() for v in self.vectors],
            "eps": [str(e) for e in self.eps],
            "checks": self.checks,
        }


def uniform_scc_block(start: int, length: int, family: SchreierIndex) -> FinVec:
    """Normalized uniform block on [start, start + length); a (1, eps) s.c.c. for eps > 1/length."""
    x = FinVec.ones(range(start, start + length), Fraction(1, length))
    cert = is_basic_scc(x, 1, Fraction(1, length) + Fraction(1, 10**6))
    if not cert.valid:
        raise ValueError(f"uniform block at {start} is not an s.c.c.: {cert.failure}")
    return x / norm_value(x, family)


def c0_selection(count: int, family: SchreierIndex, n: int = 1, length: int = 3, ratio: int = 5) -> C0Selection:
    """Pick successive normalized s.c.c. blocks satisfying the selection inequality.

    For every i0 >= 2 and i >= i0, every very fast growing S_{n-1}-admissible
    family of averages with sizes >= min supp x_{i0} must satisfy
    sum |alpha_q(x_i)| < eps_{i0} / (i0 * max supp x_{i0 - 1}).  The sup is
    computed exactly; candidate positions double until the bound holds.
    """
    adm = SchreierIndex(n - 1)
    eng = engine_for(family)
    eps = [geometric_eps(i, ratio) for i in range(1, count + 1)]
    vectors = [uniform_scc_block(length, length, family)]
    checks = []
    for i in range(2, count + 1):
        start = vectors[-1].max_supp + 1
        while True:
            x = uniform_scc_block(start, length, family)
            trial = vectors + [x]
            rows = []
            ok = True
            for i0 in range(2, i + 1):
                bound = eps[i0 - 1] / (i0 * trial[i0 - 2].max_supp)
                sup, _ = eng.schreier_sup(x, adm, trial[i0 - 1].min_supp)
                rows.append({"i": i, "i0": i0, "sup": str(sup), "bound": str(bound)})
                if not sup < bound:
                    ok = False
                    break
            if ok:
                vectors.append(x)
                checks.extend(rows)
                break
            start *= 2
    # earlier vectors must also pass against later minima
    for i in range(2, count + 1):
        for j in range(i, count + 1):
            bound = eps[i - 1] / (i * vectors[i - 2].max_supp)
            sup, _ = eng.schreier_sup(vectors[j - 1], adm, vectors[i - 1].min_supp)
            if not sup < bound:
                raise AssertionError(f"selection inequality fails at i0={i}, i={j}")
    return C0Selection(vectors, eps, checks)


def c0_probe_bounds(sel: C0Selection, t: int, family: SchreierIndex, n: int = 1) -> list[dict]:
    """For each position set F (1-based) with #F <= min F and #F <= t, the best single
    average and best Schreier sum on sum_{j in F} x_j, against 1 + 2 eps_{min F} and 1 + 3 eps_{min F}."""
    eng = engine_for(family)
    rows = []
    for r in range(1, t + 1):
        for F in combinations(range(1, len(sel.vectors) + 1), r):
            if len(F) > F[0]:
                continue
            y = vsum(sel.vectors[p - 1] for p in F)
            e = sel.eps[F[0] - 1]
            avg, _ = eng.schreier_sup(y, SchreierIndex(0), 2)
            sch, _ = eng.schreier_sup(y, SchreierIndex(n), 2)
            rows.append(
                {
                    "F": list(F),
                    "norm": str(eng.norm(y).value),
                    "average_sup": str(avg),
                    "average_bound": str(1 + 2 * e),
                    "schreier_sup": str(sch),
                    "schreier_bound": str(1 + 3 * e),
                    "ok": avg < 1 + 2 * e and sch < 1 + 3 * e,
                }
            )
    return rows


@dataclass
class SmvReport:
    """c_0 and l_1^k constants of one sequence at several scales."""

    descriptor: str
    c0: dict[int, tuple[Fraction, tuple[int, ...]]]
    ell1: dict[tuple[int, int], Ell1Estimate]
    seed: int | None = None
    samples: int = 0

    def rows(self) -> list[dict]:
        out = []
        for t, (v, F) in sorted(self.c0.items()):
            out.append({"kind": "c0", "k": 1, "t": t, "value": str(v), "at": list(F), "source": "max"})
        for (k, t), est in sorted(self.ell1.items()):
            out.append({"kind": "ell1", "k": k, "t": t, "value": str(est.uniform), "at": list(est.uniform_at), "source": "uniform"})
            if est.sampled is not None:
                out.append({"kind": "ell1", "k": k, "t": t, "value": str(est.sampled), "at": list(est.sampled_at[0]), "source": "sampled"})
        return out

    def to_json(self):
        return {
            "sequence": self.descriptor,
            "c0_constants": {str(t): str(v) for t, (v, _) in sorted(self.c0.items())},
            "ell1_constants": {f"{k},{t}": e.to_json() for (k, t), e in sorted(self.ell1.items())},
            "seed": self.seed,
            "samples": self.samples,
        }


def smv_report(
    seq: BlockSequence,
    descriptor: str,
    scales: Sequence[int],
    orders: Sequence[int],
    family: SchreierIndex,
    seed: int | None = None,
    samples: int = 0,
) -> SmvReport:
    c0 = {t: c0_constant(seq, t, family) for t in scales}
    ell1 = {
        (k, t): ell1k_constant(seq, k, t, family, seed=seed if samples else None, samples=samples)
        for k in orders
        for t in scales
    }
    return SmvReport(descriptor, c0, ell1, seed, samples)
