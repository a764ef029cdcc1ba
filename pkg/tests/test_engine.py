from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from strategies import vectors
from xspace.engine import (
    NormCertificate,
    certificate_json,
    certify,
    engine_for,
    norm,
    norm_j,
    norm_value,
    schreier_sup,
)
from xspace.norming import Average, Basis, Schreier, average_of, evaluate, validate
from xspace.oracle import oracle_norm
from xspace.schreier import SchreierIndex
from xspace.vectors import FinVec

S0, S1, S2 = SchreierIndex(0), SchreierIndex(1), SchreierIndex(2)
OMEGA = SchreierIndex.omega()
ONES = FinVec.ones(range(2, 8))


def test_basis_vector():
    cert = norm(FinVec.basis(5), S1)
    assert cert.value == 1 and cert.witness == Basis(1, 5)
    assert certify(cert, FinVec.basis(5))


def test_zero_vector():
    cert = norm(FinVec(), S1)
    assert cert.value == 0 and cert.witness is None


def test_two_average_witness():
    cert = norm(ONES, S1)
    assert cert.value == 2
    assert cert.witness == Schreier((average_of((2, 3)), average_of((4, 5, 6, 7))))
    assert certify(cert, ONES)


@pytest.mark.parametrize(
    "x, value",
    [
        (FinVec.ones((1, 2)), 1),
        (FinVec({2: Q(1, 2), 3: Q(1, 2)}), Q(1, 2)),
        (FinVec.ones((2, 3)), 1),
        (FinVec({3: -2, 4: 1}), 2),
    ],
)
def test_norm_examples(x, value):
    assert norm_value(x, S1) == value


def test_negative_signs_in_witness():
    x = FinVec({2: -1, 3: 1, 4: -1, 5: 1, 6: -1, 7: 1})
    cert = norm(x, S1)
    assert cert.value == 2 and certify(cert, x)
    assert evaluate(cert.witness, x) == 2


def test_norm_j_examples():
    assert norm_j(FinVec.ones((1, 2)), 2, S1) == 1
    assert norm_j(FinVec.basis(5), 3, S1) == Q(1, 3)
    assert norm_j(ONES, 6, S1) == 1
    with pytest.raises(ValueError):
        norm_j(ONES, 1, S1)


def test_certify_rejects_tampering():
    x = FinVec.basis(5)
    cert = norm(x, S1)
    bad = NormCertificate(cert.value + Q(1, 100), cert.witness, cert.family, cert.stats)
    assert not certify(bad, x)
    invalid = NormCertificate(Q(1, 2), Average(1, (Basis(1, 5),)), S1, {})
    assert not certify(invalid, x)


def test_certificate_json_fields():
    obj = certificate_json(norm(ONES, S1))
    assert obj["value"] == "2" and obj["family"] == 1
    assert obj["witness"]["type"] == "schreier"


def test_s0_space_has_no_schreier_gain():
    # with only single averages the norm of the flat vector is its sup-norm
    assert norm_value(ONES, S0) == 1


@settings(max_examples=40, deadline=None)
@given(vectors(lo=1, hi=7, max_support=6), st.sampled_from([S1, S2, OMEGA]))
def test_engine_matches_oracle(x, family):
    assert norm_value(x, family) == oracle_norm(x, family, 7, 6, 8)[0]


@settings(max_examples=60, deadline=None)
@given(vectors(hi=10, max_support=7), st.sampled_from([S1, S2]))
def test_certificate_always_verifies(x, family):
    cert = norm(x, family)
    assert validate(cert.witness, family)
    assert certify(cert, x)


@settings(max_examples=40, deadline=None)
@given(vectors(hi=9, max_support=6), st.fractions(Q(-3), Q(3), max_denominator=4))
def test_homogeneous(x, a):
    assert norm_value(x * a, S1) == abs(a) * norm_value(x, S1)


@settings(max_examples=40, deadline=None)
@given(vectors(hi=8, max_support=5), vectors(hi=8, max_support=5))
def test_triangle_inequality(x, y):
    assert norm_value(x + y, S1) <= norm_value(x, S1) + norm_value(y, S1)


@settings(max_examples=40, deadline=None)
@given(vectors(hi=10, max_support=7))
def test_dominates_sup_and_below_l1(x):
    v = norm_value(x, S2)
    assert x.abs().sup() <= v <= x.l1()


@settings(max_examples=30, deadline=None)
@given(vectors(hi=10, max_support=7, nonneg=True))
def test_monotone_in_family(x):
    assert norm_value(x, S0) <= norm_value(x, S1) <= norm_value(x, S2)


@settings(max_examples=30, deadline=None)
@given(vectors(hi=10, max_support=7), st.data())
def test_unconditional(x, data):
    idx = x.support()
    flips = data.draw(st.lists(st.sampled_from((1, -1)), min_size=len(idx), max_size=len(idx)))
    flipped = FinVec({i: s * x[i] for i, s in zip(idx, flips)})
    assert norm_value(flipped, S1) == norm_value(x, S1)
    drop = data.draw(st.sampled_from(idx))
    assert norm_value(FinVec({i: x[i] for i in idx if i != drop}), S1) <= norm_value(x, S1)


@settings(max_examples=30, deadline=None)
@given(vectors(hi=9, max_support=6, nonneg=True), st.integers(2, 6))
def test_exact_first_size_splits_the_min_size_sup(x, j):
    eng = engine_for(S2)
    top = max(j, len(x)) + 1
    exact = [eng.schreier_sup(x, S1, s, exact_first=True)[0] for s in range(j, top + 1)]
    assert eng.schreier_sup(x, S1, j)[0] == max(exact)


def test_schreier_sup_witness_is_admissible_family():
    val, wit = schreier_sup(ONES, S1, S0, 2)
    assert isinstance(wit, Average) and evaluate(wit, ONES) == val
    val, wit = schreier_sup(ONES, S1, S1, 2)
    assert val == 2 and validate(wit, S1)


def test_memo_reuse_is_reported():
    eng = engine_for(S1)
    eng.clear()
    first = eng.norm(ONES).stats
    second = eng.norm(ONES).stats
    assert first["nodes_explored"] > 0
    assert second["nodes_explored"] == 0 and second["memo_hits"] >= 1
