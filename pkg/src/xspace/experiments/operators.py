"""Finite truncations of operators T v = sum_j x*_{i_j}(v) x_j and chains of them.

An ``OperatorSpec`` stores only the scheduled dual functionals; every other
dual plays no role in T.  Vectors outside [1, truncation] are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..engine import engine_for
from ..norming import Average, Basis, Functional, coefficients, evaluate, to_json, validate
from ..schreier import SchreierIndex
from ..vectors import BlockSequence, FinVec, combine, min_maximal_set, repeated_average, vsum


@dataclass
class OperatorSpec:
    """T v = sum_j duals[schedule[j]](v) * vectors[j]."""

    duals: dict[int, Functional]
    vectors: list[FinVec]
    schedule: list[int]
    truncation: int
    label: str = ""

    def __post_init__(self):
        if len(self.schedule) != len(self.vectors):
            raise ValueError("schedule and vectors differ in length")
        if any(a >= b for a, b in zip(self.schedule, self.schedule[1:])):
            raise ValueError("schedule must be strictly increasing")
        missing = [i for i in self.schedule if i not in self.duals]
        if missing:
            raise ValueError(f"no dual functional for scheduled indices {missing}")
        for v in self.vectors:
            if not v.is_zero() and v.max_supp > self.truncation:
                raise ValueError("image vector beyond the truncation")

    def terms(self):
        return [(self.duals[i], x) for i, x in zip(self.schedule, self.vectors)]

    def to_json(self):
        return {
            "label": self.label,
            "schedule": list(self.schedule),
            "truncation": self.truncation,
            "duals": {str(i): to_json(self.duals[i]) for i in self.schedule},
            "vectors": [v.to_json() for v in self.vectors],
        }


def dyadic_schedule(count: int) -> list[int]:
    """i_j = 2^(j+3) + 1 for j = 1..count."""
    return [2 ** (j + 3) + 1 for j in range(1, count + 1)]


def _check_support(spec: OperatorSpec, v: FinVec):
    if not v.is_zero() and (v.min_supp < 1 or v.max_supp > spec.truncation):
        raise ValueError(f"vector support {v.range()} overflows the truncation {spec.truncation}")


def operator_apply(spec: OperatorSpec, v: FinVec) -> FinVec:
    _check_support(spec, v)
    return combine([evaluate(f, v) for f, _ in spec.terms()], [x for _, x in spec.terms()])


def compose(outer: OperatorSpec, inner: OperatorSpec):
    """v -> outer(inner(v)) as a plain function."""

    def apply(v: FinVec) -> FinVec:
        return operator_apply(outer, operator_apply(inner, v))

    return apply


def dyadic_average(j: int) -> Average:
    """The uniform average of size 2^j on the singletons of [2^j, 2^(j+1) - 1]."""
    lo = 2**j
    return Average(lo, tuple(Basis(1, i) for i in range(lo, 2 * lo)))


def dyadic_schedule_spec(count: int = 3) -> OperatorSpec:
    """Operator with the schedule i_j = 2^(j+3)+1, dual x*_{i_j} the dyadic average on
    [2^j, 2^(j+1) - 1], and image x_j = e_{2^(count+1) + j - 1}.

    The duals form a very fast growing family with disjoint ranges; the
    images sit after all dual supports.
    """
    sched = dyadic_schedule(count)
    duals = {i: dyadic_average(j) for j, i in enumerate(sched, start=1)}
    base = 2 ** (count + 1)
    vectors = [FinVec.basis(base + j) for j in range(count)]
    return OperatorSpec(duals, vectors, sched, base + count - 1, "dyadic-schedule")


def biorthogonal_probes(spec: OperatorSpec) -> list[FinVec]:
    """v_k with x*_{i_j}(v_k) = [j = k]: a multiple of e_m at the least support point m of
    x*_{i_k} outside every other scheduled dual, scaled so the value is one."""
    duals = [spec.duals[i] for i in spec.schedule]
    out = []
    for k, f in enumerate(duals):
        others = set()
        for j, g in enumerate(duals):
            if j != k:
                others |= set(g.support)
        coef = coefficients(f)
        for m in f.support:
            if m not in others and coef[m] != 0:
                out.append(FinVec({m: 1 / coef[m]}))
                break
        else:
            raise ValueError(f"dual {k + 1} has no private support point")
    for k, v in enumerate(out):
        for j, f in enumerate(duals):
            if evaluate(f, v) != (1 if j == k else 0):
                raise AssertionError("probes are not biorthogonal")
    return out


def standard_probes(spec: OperatorSpec) -> list[tuple[str, FinVec]]:
    """Basis vectors, dual coefficient vectors, uniform runs and their sums, repeated averages
    (which are s.c.c.'s) and the biorthogonal vectors, all inside the truncation."""
    probes = [(f"e{i}", FinVec.basis(i)) for i in range(1, spec.truncation + 1)]
    duals = [spec.duals[i] for i in spec.schedule]
    for j, f in enumerate(duals, start=1):
        c = coefficients(f)
        probes.append((f"coef{j}", c))
        probes.append((f"ones{j}", FinVec.ones(f.support)))
    for r in range(2, len(duals) + 1):
        for sel in combinations(range(len(duals)), r):
            name = "ones" + "+".join(str(j + 1) for j in sel)
            probes.append((name, vsum(FinVec.ones(duals[j].support) for j in sel)))
    for k in (1, 2):
        m = 2
        while (F := min_maximal_set(k, m))[-1] <= spec.truncation:
            probes.append((f"repavg{k}@{m}", repeated_average(k, F)))
            m += 1
    for k, v in enumerate(biorthogonal_probes(spec), start=1):
        probes.append((f"bio{k}", v))
    return probes


@dataclass
class NormProbe:
    bound: Fraction
    value: Fraction
    rows: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.rows)

    def to_json(self):
        return {"bound": str(self.bound), "lower_bound": str(self.value), "ok": self.ok, "rows": self.rows}


def operator_norm_probe(
    spec: OperatorSpec, probes: Sequence[tuple[str, FinVec]], family: SchreierIndex, bound: Fraction = Fraction(8)
) -> NormProbe:
    """max ||Tv|| / ||v|| over the probes; a lower bound for the norm of the truncation."""
    eng = engine_for(family)
    best = Fraction(0)
    rows = []
    for name, v in probes:
        if v.is_zero():
            continue
        tv = operator_apply(spec, v)
        ratio = eng.norm(tv).value / eng.norm(v).value
        best = max(best, ratio)
        rows.append({"probe": name, "ratio": str(ratio), "ok": ratio <= bound})
    return NormProbe(bound, best, rows)


def noncompactness_rows(spec: OperatorSpec, family: SchreierIndex) -> list[dict]:
    """||T(v_k - v_m)|| against ||x_k - x_m|| for every pair of biorthogonal probes."""
    eng = engine_for(family)
    probes = biorthogonal_probes(spec)
    rows = []
    for k, m in combinations(range(len(probes)), 2):
        lhs = eng.norm(operator_apply(spec, probes[k] - probes[m])).value
        rhs = eng.norm(spec.vectors[k] - spec.vectors[m]).value
        rows.append({"k": k + 1, "m": m + 1, "image": str(lhs), "target": str(rhs), "equal": lhs == rhs})
    return rows


# chains --------------------------------------------------------------------


def chain_block(i: int) -> tuple[int, int]:
    """D_i = [2^i - 1, 2^(i+1) - 2], a run of 2^i integers."""
    return 2**i - 1, 2 ** (i + 1) - 2


@dataclass
class OperatorChain:
    specs: list[OperatorSpec]
    coefficients: list[list[Fraction]]
    eps: list[Fraction]
    checks: list[dict]

    def to_json(self):
        return {
            "specs": [s.to_json() for s in self.specs],
            "coefficients": [[str(c) for c in row] for row in self.coefficients],
            "eps": [str(e) for e in self.eps],
            "checks": self.checks,
        }


def operator_chain(n: int, truncation: int, count: int | None = None, family: SchreierIndex | None = None) -> OperatorChain:
    """Specs S_1..S_n with S_k v = sum_i x*_{k,i}(v) x_{k,i} on the blocks D_i.

    Stage one maps onto x_{1,i} = e_{min D_i}; later stages use the flat
    block u_i = 1 on D_i.  Every dual x*_{k,i} is the uniform average on
    D_i (a member of W with range D_i).  The duals of stage k+1 are
    biorthogonal to the vectors of stage k, and the composed action
    S_1 ... S_n v = sum_i c_i x*_{n,i}(v) x_{1,i} has c_i = prod_k x*_{k,i}(x_{k+1,i}).
    """
    if n < 1:
        raise ValueError("n must be positive")
    family = family or SchreierIndex(n)
    if count is None:
        count = 0
        while chain_block(count + 1)[1] <= truncation:
            count += 1
    if count < 1 or chain_block(count)[1] > truncation:
        raise ValueError(f"truncation {truncation} cannot host stage 1")
    if n >= 2 and count < 2:
        raise ValueError(f"truncation {truncation} cannot host stage 2: need at least two blocks, got {count}")
    blocks = [chain_block(i) for i in range(1, count + 1)]
    duals = [Average(b - a + 1, tuple(Basis(1, m) for m in range(a, b + 1))) for a, b in blocks]
    firsts = [FinVec.basis(a) for a, _ in blocks]
    flats = [FinVec.ones(range(a, b + 1)) for a, b in blocks]
    schedule = list(range(1, count + 1))
    specs = []
    for k in range(1, n + 1):
        vecs = firsts if k == 1 else flats
        specs.append(OperatorSpec(dict(zip(schedule, duals)), vecs, schedule, truncation, f"S{k}"))
    checks = []
    for s in specs:
        for f in s.duals.values():
            ok = validate(f, family)
            if not ok:
                raise AssertionError(f"dual not in W: {ok.reason}")
    eps = []
    coeffs = [[Fraction(1)] * count]
    for k in range(1, n):
        # x*_{k,i}(x_{k+1,i}) and the off-diagonal zeros
        row = []
        for i in range(count):
            for j in range(count):
                val = evaluate(specs[k - 1].duals[schedule[i]], specs[k].vectors[j])
                if i != j and val != 0:
                    raise AssertionError(f"stage {k}: dual {i + 1} sees vector {j + 1}")
                if i == j:
                    row.append(val)
            checks.append({"stage": k, "i": i + 1, "diagonal": str(row[-1])})
        eps.append(min(row) / 2)
        coeffs.append([a * b for a, b in zip(coeffs[-1], row)])
    return OperatorChain(specs, coeffs, eps, checks)


def chain_compose(chain: OperatorChain, start: int = 0):
    """v -> S_{start+1} ... S_n v."""
    specs = chain.specs[start:]

    def apply(v: FinVec) -> FinVec:
        for s in reversed(specs):
            v = operator_apply(s, v)
        return v

    return apply


def chain_sequence(chain: OperatorChain, stage: int) -> BlockSequence:
    """The image vectors x_{stage,i} as a block sequence."""
    return BlockSequence(chain.specs[stage - 1].vectors)
