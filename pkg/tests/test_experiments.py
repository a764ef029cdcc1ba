from fractions import Fraction as Q

import pytest

from xspace.engine import norm_value
from xspace.experiments.alpha import (
    alpha_probe,
    average_bound,
    concatenate,
    extract_c0k_functionals,
    scc_family_bound,
)
from xspace.experiments.equivalence import equivalence_probe, interlaced_pair
from xspace.experiments.operators import (
    OperatorSpec,
    biorthogonal_probes,
    chain_compose,
    chain_sequence,
    noncompactness_rows,
    operator_apply,
    operator_chain,
    operator_norm_probe,
    dyadic_schedule,
    dyadic_schedule_spec,
    standard_probes,
)
from xspace.experiments.spreading import (
    basis_sequence,
    block_fast_growing,
    c0_constant,
    c0_probe_bounds,
    c0_selection,
    ell1k_constant,
    scc_blocking,
    smv_report,
)
from xspace.experiments.ssk import block_witness, candidate_sets, ssk_probe
from xspace.norming import Basis, average_of, evaluate, validate
from xspace.schreier import SchreierIndex
from xspace.vectors import BlockSequence, FinVec

S0, S1, S2 = SchreierIndex(0), SchreierIndex(1), SchreierIndex(2)
BASIS = basis_sequence(range(1, 40))
Y = block_fast_growing(BASIS, [2, 4])


# spreading -----------------------------------------------------------------


def test_fast_growing_examples():
    assert list(Y) == [FinVec.ones((2, 3)), FinVec.ones(range(4, 8))]
    assert list(block_fast_growing(BASIS, [1])) == [FinVec.basis(2)]
    with pytest.raises(ValueError, match="#F = 3 > min F = 2"):
        block_fast_growing(BASIS, [3])
    with pytest.raises(ValueError, match="does not exceed"):
        block_fast_growing(BASIS, [2, 3])


def test_c0_constant_examples():
    assert c0_constant(basis_sequence((2, 4, 8)), 2, S1)[0] == 1
    assert c0_constant(Y, 2, S1)[0] == 2
    assert c0_constant(Y, 1, S1)[0] == max(norm_value(y, S1) for y in Y)


def test_ell1_examples():
    assert ell1k_constant(Y, 1, 2, S1).uniform == 1
    assert ell1k_constant(basis_sequence(range(2, 8)), 1, 2, S1).value == Q(1, 2)
    single = BlockSequence([FinVec.ones((3, 4))])
    assert ell1k_constant(single, 2, 1, S1).value == norm_value(single[0], S1)


def test_ell1_sampling_is_seeded():
    a = ell1k_constant(Y, 1, 2, S1, seed=11, samples=3)
    b = ell1k_constant(Y, 1, 2, S1, seed=11, samples=3)
    assert a.to_json() == b.to_json() and a.samples == 3
    # every probe is an upper estimate, so sampling can only lower the value
    assert a.value <= a.uniform


def test_scc_blocking_examples():
    one = scc_blocking(basis_sequence(range(2, 10)), 1, 1)
    assert one.blocks[0] == FinVec({2: Q(1, 2), 3: Q(1, 2)}) and one.certificates[0].valid
    two = scc_blocking(basis_sequence(range(2, 10)), 2, 1)
    assert two.coefficients[0] == [Q(1, 4), Q(1, 4)] + [Q(1, 8)] * 4
    assert len(scc_blocking(basis_sequence(range(2, 10)), 1, 0).blocks) == 0


def test_c0_selection_tail_is_c0_like():
    sel = c0_selection(5, S1)
    assert all(r["ok"] for r in c0_probe_bounds(sel, 3, S1))
    value, _ = c0_constant(sel.tail(3), 3, S1)
    assert 1 <= value < 1 + 3 * sel.eps[2]


def test_smv_report_rows():
    rep = smv_report(Y, "fast", [1, 2], [1], S1)
    assert rep.to_json()["c0_constants"] == {"1": "4/3", "2": "2"}
    assert [r["kind"] for r in rep.rows()] == ["c0", "c0", "ell1", "ell1"]


# alpha probe -----------------------------------------------------------------


def test_alpha_probe_examples():
    tail = basis_sequence(range(4, 12))
    assert alpha_probe(tail, 0, 4, 1, S1).sup_value == Q(1, 4)
    assert alpha_probe(tail, 0, 4, 99, S1).sup_value == 0
    res = alpha_probe(Y, 0, 2, 1, S1)
    assert res.sup_value >= 1 and res.position == 2


def test_extract_functionals():
    fs = extract_c0k_functionals(Y, 0, S1, Q(3, 4))
    assert [evaluate(f, y) for f, y in zip(fs, Y)] == [1, 1]
    for f, y in zip(fs, Y):
        lo, hi = y.range()
        assert lo <= f.support[0] and f.support[-1] <= hi
    joined = concatenate(fs)
    assert validate(joined, S1) and evaluate(joined, Y[0] + Y[1]) == 2
    assert len(extract_c0k_functionals(BlockSequence([Y[0]]), 0, S1, Q(1, 2))) == 1
    with pytest.raises(ValueError):
        extract_c0k_functionals(basis_sequence(range(4, 9)), 0, S1, Q(3, 4), j0=4)


def test_average_bound_example():
    blocks = [FinVec.basis(2), FinVec.basis(3)]
    lhs, rhs = average_bound(average_of((2, 3)), blocks, [Q(1, 2), Q(1, 2)])
    assert lhs == Q(1, 2) and rhs == Q(1, 2) + 1
    with pytest.raises(ValueError):
        average_bound(Basis(1, 2), blocks, [1, 0])


def test_scc_family_bound_example():
    blocks = [FinVec.basis(i) for i in (3, 4, 5)]
    val, bound, wit = scc_family_bound(blocks, [Q(1, 3)] * 3, 1, Q(1, 3) + Q(1, 100), S1, 3)
    assert val == Q(1, 3) and val < bound and wit.size == 3
    with pytest.raises(ValueError):
        scc_family_bound(blocks, [Q(1, 3)] * 3, 1, Q(1, 3), S1, 3)


# operators -----------------------------------------------------------------


SPEC = dyadic_schedule_spec()


def test_dyadic_schedule():
    assert dyadic_schedule(3) == [17, 33, 65]
    assert SPEC.schedule == [17, 33, 65] and SPEC.truncation == 18


def test_operator_apply_examples():
    assert operator_apply(SPEC, FinVec.basis(1)).is_zero()
    v = biorthogonal_probes(SPEC)[0]
    assert operator_apply(SPEC, v) == SPEC.vectors[0]
    w = FinVec({2: 1, 5: 3, 9: -2})
    assert operator_apply(SPEC, w * Q(-7, 3)) == operator_apply(SPEC, w) * Q(-7, 3)
    assert operator_apply(SPEC, w + v) == operator_apply(SPEC, w) + operator_apply(SPEC, v)
    with pytest.raises(ValueError, match="overflows"):
        operator_apply(SPEC, FinVec.basis(19))


def test_operator_spec_checks():
    with pytest.raises(ValueError):
        OperatorSpec({1: average_of((2, 3))}, [FinVec.basis(5)], [1, 2], 10)
    with pytest.raises(ValueError):
        OperatorSpec({}, [FinVec.basis(5)], [1], 10)


def test_zero_operator_probe():
    zero = OperatorSpec({}, [], [], 8)
    assert operator_norm_probe(zero, [("e1", FinVec.basis(1))], S1).value == 0


def test_norm_probe_bound_and_noncompactness():
    probe = operator_norm_probe(SPEC, standard_probes(SPEC), S1)
    assert probe.ok and probe.value <= 8
    assert all(r["equal"] for r in noncompactness_rows(SPEC, S1))


def test_chain_single_stage():
    chain = operator_chain(1, 30)
    assert len(chain.specs) == 1 and chain.coefficients == [[1] * 4]


def test_chain_two_stages():
    chain = operator_chain(2, 62)
    assert chain.coefficients[1] == [1] * 5
    assert all(Q(r["diagonal"]) > chain.eps[0] for r in chain.checks)
    v = FinVec.ones(range(3, 7))
    assert chain_compose(chain)(v) == FinVec.basis(3)
    with pytest.raises(ValueError, match="cannot host stage 2"):
        operator_chain(2, 2)


# ssk probe -------------------------------------------------------------------


def test_candidate_sets():
    assert candidate_sets(9, 1) == [(1,), (2, 3), (3, 4, 5), (4, 5, 6, 7), (5, 6, 7, 8, 9)]
    assert candidate_sets(3, 0) == [(1,), (2,), (3,)]


def test_block_witness_is_valid():
    blocks = [FinVec.ones((2, 3)), FinVec.ones(range(4, 8))]
    f = block_witness(blocks, [1, 1], S1)
    assert validate(f, S1) and evaluate(f, blocks[0] + blocks[1]) == 2


def test_ssk_trivial_cases():
    zero = OperatorSpec({}, [], [], 30)
    assert ssk_probe(zero, basis_sequence(range(1, 5)), 1, Q(1), 10, 1, S2).found
    seq = basis_sequence(range(2, 8))
    identity = lambda v: v
    res = ssk_probe(identity, seq, 1, Q(1, 2), 50, 1, S2)
    assert not res.found and res.status == "exhausted"


def test_ssk_chain_separation():
    chain = operator_chain(2, 1022)
    seq = chain_sequence(chain, 2)
    found = ssk_probe(chain_compose(chain), seq, 1, Q(1, 4), 60, 7, S2)
    assert found.found and found.positions == (5, 6, 7, 8, 9)
    assert found.image_upper < Q(1, 4) * found.vector_lower
    alone = ssk_probe(chain.specs[1], seq, 1, Q(1, 4), 60, 7, S2)
    assert not alone.found


# equivalence -----------------------------------------------------------------


def test_equivalence_trivial_cases():
    pair = interlaced_pair(1, 2, S1)
    same = equivalence_probe(pair.z, pair.z, pair.theta, 4, 1, S1)
    assert same.min_ratio == same.max_ratio == 1
    double = BlockSequence([2 * v for v in pair.z])
    rep = equivalence_probe(pair.z, double, pair.theta, 4, 1, S1)
    assert rep.min_ratio == rep.max_ratio == 2


def test_equivalence_interlaced():
    pair = interlaced_pair(1, 2, S1)
    assert pair.theta == Q(1, 2)
    rep = equivalence_probe(pair.z, pair.w, pair.theta, 12, 3, S1)
    assert rep.ok and rep.low <= rep.min_ratio <= rep.max_ratio <= rep.high
