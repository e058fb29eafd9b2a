import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from fano_stability.cohomology import (
    RULES,
    BottQuery,
    IndexedFano,
    Vanishing,
    bott_dimension,
    check_b2_one_stability,
    euler_characteristic,
    hoppe_threshold,
    kodaira_nakano_vanishes,
)
from fano_stability.lattice import LatticeError


@st.composite
def queries(draw):
    n = draw(st.integers(1, 6))
    return BottQuery(n, draw(st.integers(0, n)), draw(st.integers(0, n)), draw(st.integers(-15, 15)))


def test_bott_examples():
    assert bott_dimension(n=3, p=1, q=0, k=2) == 6 == oracles.h0_omega1_euler(3, 2)
    for n in range(1, 5):
        for p in range(n + 1):
            assert bott_dimension(n=n, p=p, q=p, k=0) == 1
    assert bott_dimension(n=3, p=1, q=0, k=1) == 0
    assert bott_dimension(BottQuery(2, 0, 0, 3)) == 10


def test_bott_query_validation():
    with pytest.raises(LatticeError):
        BottQuery(0, 0, 0, 0)
    with pytest.raises(LatticeError):
        BottQuery(3, 4, 0, 0)
    with pytest.raises(LatticeError):
        BottQuery(3, 0, -1, 0)


@given(queries())
def test_serre_duality(q):
    assert bott_dimension(q) == bott_dimension(BottQuery(q.n, q.n - q.p, q.n - q.q, -q.k))


@given(queries())
def test_euler_characteristic_matches_euler_sequence(q):
    assert euler_characteristic(q.n, q.p, q.k) == oracles.chi_forms(q.n, q.p, q.k)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_line_bundles_and_euler_sequence_h0(n):
    for k in range(-10, 11):
        assert bott_dimension(n=n, p=0, q=0, k=k) == oracles.h0_line_bundle(n, k)
    for k in range(1, 11):
        assert bott_dimension(n=n, p=1, q=0, k=k) == oracles.h0_omega1_euler(n, k)


def test_hoppe_thresholds():
    p3 = IndexedFano.of_index(4)
    q3 = IndexedFano.of_index(3)
    assert hoppe_threshold(p3, 1) == -1
    assert hoppe_threshold(q3, 2) == -2
    assert hoppe_threshold(p3, 0) == hoppe_threshold(q3, 0, "B") == 0
    assert hoppe_threshold(p3, 1, "B") == 2
    with pytest.raises(LatticeError):
        hoppe_threshold(p3, 4)
    with pytest.raises(LatticeError):
        hoppe_threshold(p3, 1, "C")


def test_indexed_fano_validation():
    assert IndexedFano.of_index(4).is_projective_space
    assert IndexedFano.of_index(3).is_quadric
    with pytest.raises(LatticeError):
        IndexedFano(3, 5)
    with pytest.raises(LatticeError):
        IndexedFano(3, 4, 2)
    with pytest.raises(LatticeError):
        IndexedFano(3, 3, 1)


def test_kodaira_nakano():
    assert kodaira_nakano_vanishes(1, -1) is Vanishing.VANISHES
    assert kodaira_nakano_vanishes(2, 0) is Vanishing.VANISHES
    assert kodaira_nakano_vanishes(0, 0) is Vanishing.NONZERO
    assert kodaira_nakano_vanishes(1, 1) is Vanishing.INCONCLUSIVE


@pytest.mark.parametrize("r, rules", [(4, ["R4", "R4"]), (3, ["R2", "R3"]), (2, ["R2", "R3"]), (1, ["R1", "R1"])])
def test_b2_one_rule_traces(r, rules):
    v = check_b2_one_stability(IndexedFano.of_index(r))
    assert v.status == "stable"
    assert [f.rule for f in v.trace] == rules
    for f in v.trace:
        assert f.rule in RULES
        assert f.hypothesis and f.citation == RULES[f.rule][1]
    d = v.to_dict()
    assert d["status"] == "stable" and d["missing"] == []


def test_b2_one_inconclusive_is_never_upgraded():
    # index 2 in dimension 4: A_1 by R2, A_3 by R3, A_2 has no rule
    v = check_b2_one_stability(IndexedFano.of_index(2, 4))
    assert v.status == "inconclusive"
    assert v.missing == (2,)
    # projective space in every dimension is settled by the Bott sweep
    for n in range(1, 7):
        assert check_b2_one_stability(IndexedFano.of_index(n + 1, n)).status == "stable"
