"""The literal norming-set enumeration, its signature DP, and the coefficient bound."""

import itertools
from fractions import Fraction as Q

import pytest

from xspace.norming import Average, Basis, Schreier, average_of, coefficients, validate
from xspace.oracle import enumerate_W, in_truncated_W, oracle_norm
from xspace.schreier import SchreierIndex
from xspace.vectors import FinVec

S1, S2 = SchreierIndex(1), SchreierIndex(2)


@pytest.fixture(scope="module")
def small_W():
    return {fam.k: enumerate_W(3, fam, 2, 4) for fam in (S1, S2)}


def test_level_zero():
    assert set(enumerate_W(1, S1, 0, 2)) == {Basis(1, 1), Basis(-1, 1)}


def test_level_one_contains_pair_average():
    assert Average(2, (Basis(1, 1), Basis(1, 2))) in enumerate_W(2, S1, 1, 3)


def test_value_two_witness_is_in_truncation():
    wit = Schreier((average_of((2, 3)), average_of((4, 5, 6, 7))))
    assert in_truncated_W(wit, 7, S1, 2, 8)
    assert not in_truncated_W(wit, 7, S1, 1, 8)
    assert not in_truncated_W(wit, 6, S1, 2, 8)
    assert not in_truncated_W(wit, 7, S1, 2, 3)


def test_enumeration_is_valid_and_duplicate_free(small_W):
    for k, fs in small_W.items():
        assert len(fs) == len(set(fs))
        assert all(validate(f, SchreierIndex(k)) for f in fs)
        assert all(in_truncated_W(f, 3, SchreierIndex(k), 2, 4) for f in fs)


def test_coefficients_bounded_by_one(small_W):
    for fs in small_W.values():
        for f in fs:
            assert coefficients(f).abs().sup() <= 1


@pytest.mark.parametrize("family", [S1, S2])
def test_signature_dp_equals_literal_max(small_W, family):
    fs = small_W[family.k]
    coefs = [dict(coefficients(f).items()) for f in fs]
    for cs in itertools.product([0, Q(1, 2), 1, -1], repeat=3):
        x = FinVec({i + 1: c for i, c in enumerate(cs)})
        literal = max(sum((c.get(i, 0) * v for i, v in x.items()), Q(0)) for c in coefs)
        assert oracle_norm(x, family, 3, 2, 4)[0] == literal, cs


def test_signature_dp_equals_literal_max_support_four():
    fs = enumerate_W(4, S1, 2, 5)
    coefs = [dict(coefficients(f).items()) for f in fs]
    for cs in [(1, 1, 1, 1), (0, 1, 1, 1), (1, Q(1, 2), 0, 1), (Q(1, 2), 1, 1, Q(1, 2))]:
        x = FinVec({i + 1: c for i, c in enumerate(cs)})
        literal = max(sum((c.get(i, 0) * v for i, v in x.items()), Q(0)) for c in coefs)
        assert oracle_norm(x, S1, 4, 2, 5)[0] == literal, cs


def test_oracle_witness_is_valid():
    x = FinVec.ones(range(2, 8))
    val, wit = oracle_norm(x, S1, 7, 6, 8)
    assert val == 2 and validate(wit, S1)


def test_oracle_rejects_support_overflow():
    with pytest.raises(ValueError):
        oracle_norm(FinVec.basis(9), S1, 7, 2, 8)
