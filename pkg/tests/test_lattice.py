import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fano_stability import constructions
from fano_stability.lattice import (
    DivisorClass,
    LatticeError,
    TrilinearForm,
    degree_form,
    format_rational,
    integer_inverse,
    parse_class,
    parse_rational,
    rebase,
    transition_product,
    triple_product,
    verify_relation,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _classes(rng, rank, count=3):
    return [DivisorClass(tuple(rng.randint(-5, 5) for _ in range(rank))) for _ in range(count)]


def test_rational_serialization():
    assert format_rational(Fraction(-46, 3)) == "-46/3"
    assert format_rational(Fraction(12, 4)) == "3"
    assert format_rational(0) == "0"
    assert parse_rational("-92/6") == Fraction(-46, 3)
    assert parse_rational(" 7 ") == 7
    for bad in ("1.5", "x", "1/0", True, None):
        with pytest.raises(LatticeError):
            parse_rational(bad)


def test_divisor_arithmetic():
    a, b = DivisorClass((1, 2, 3)), DivisorClass((0, -1, 4))
    assert a + b == DivisorClass((1, 1, 7))
    assert a - b == DivisorClass((1, 3, -1))
    assert -a == DivisorClass((-1, -2, -3))
    assert a * 2 == 2 * a == DivisorClass((2, 4, 6))
    with pytest.raises(LatticeError):
        a + DivisorClass((1, 2))
    with pytest.raises(LatticeError):
        DivisorClass((1.0, 2))


def test_form_symmetric_lookup_and_sparsity():
    T = TrilinearForm(3, {(0, 1, 2): 5, (0, 0, 0): 0})
    for p in itertools.permutations((0, 1, 2)):
        assert T[p] == 5
    assert T[(1, 1, 1)] == 0
    assert T.triples() == [(0, 1, 2, 5)]
    assert TrilinearForm(2, {(1, 0, 0): 4}) == TrilinearForm(2, {(0, 0, 1): 4})
    with pytest.raises(LatticeError, match="conflicting"):
        TrilinearForm(2, {(1, 0, 0): 1, (0, 1, 0): 2})
    with pytest.raises(LatticeError):
        TrilinearForm(2, {(0, 0, 2): 1})


def test_triple_product_examples():
    p3 = constructions.preset("p3")
    h = p3.basis_class("H")
    assert triple_product(p3.form, h, h, h) == 1
    X = constructions.example2_variety()
    assert triple_product(X.form, X.anticanonical, X.anticanonical, X.anticanonical) == 32
    V = constructions.preset("v7_blowup")
    H, E = V.basis_class("H"), V.basis_class("E")
    assert V.anticanonical == H * 4 - E * 2
    # (4H - 2E)^3 = 64 H^3 - 8 E^3 with H.E = 0
    assert 64 * 1 - 8 * 1 == triple_product(V.form, V.anticanonical, V.anticanonical, V.anticanonical) == 56
    with pytest.raises(LatticeError):
        triple_product(p3.form, h, h, DivisorClass((1, 0)))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_triple_product_matches_dense_expansion(seed):
    rng = random.Random(seed)
    X = oracles.random_variety(rng)
    d1, d2, d3 = _classes(rng, X.rank)
    assert triple_product(X.form, d1, d2, d3) == oracles.dense_product(X.form, d1, d2, d3)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_triple_product_symmetric(seed):
    rng = random.Random(seed)
    X = oracles.random_variety(rng)
    ds = _classes(rng, X.rank)
    values = {triple_product(X.form, *p) for p in itertools.permutations(ds)}
    assert len(values) == 1


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(-7, 7), st.integers(-7, 7))
def test_triple_product_multilinear(seed, a, b):
    rng = random.Random(seed)
    X = oracles.random_variety(rng)
    d, d2, e, f = _classes(rng, X.rank, 4)
    lhs = triple_product(X.form, d * a + d2 * b, e, f)
    assert lhs == a * triple_product(X.form, d, e, f) + b * triple_product(X.form, d2, e, f)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_degree_form_contract(seed):
    rng = random.Random(seed)
    X = oracles.random_variety(rng)
    (d,) = _classes(rng, X.rank, 1)
    assert d.dot(degree_form(X)) == triple_product(X.form, d, X.anticanonical, X.anticanonical)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_rebase_preserves_products(seed):
    rng = random.Random(seed)
    X = oracles.random_variety(rng, curves=1)
    M = oracles.random_unimodular(rng, X.rank)
    rows = [DivisorClass(tuple(r)) for r in M]
    Y = rebase(X, rows, [f"N{i}" for i in range(X.rank)])
    ds = _classes(rng, X.rank)
    assert triple_product(Y.form, *ds) == transition_product(X, *ds, rows)
    assert Y.anticanonical_degree() == X.anticanonical_degree()
    # the curve pairing with the canonical class is basis independent
    assert Y.canonical.dot(Y.curves[0].meets) == X.canonical.dot(X.curves[0].meets)
    # old basis labels become named classes that map back to the unit vectors
    for i, lab in enumerate(X.basis):
        old = Y.named_class(lab)
        back = DivisorClass(tuple(sum(old.coeffs[r] * M[r][j] for r in range(X.rank)) for j in range(X.rank)))
        assert back == DivisorClass.unit(X.rank, i)


def test_rebase_identity_is_identity():
    X = constructions.example2_variety()
    Y = rebase(X, [X.basis_class(b) for b in X.basis], list(X.basis))
    assert Y.form == X.form
    assert Y.canonical == X.canonical
    assert Y.curves == X.curves
    assert Y.fibrations == X.fibrations
    assert dict(Y.named) == dict(X.named)


def test_rebase_rejects_bad_transition():
    X = constructions.example2_variety()
    with pytest.raises(LatticeError, match="unimodular|determinant"):
        rebase(X, ["2H1", "H2", "H3"], ["a", "b", "c"])
    with pytest.raises(LatticeError, match="singular"):
        rebase(X, ["H1", "H1", "H3"], ["a", "b", "c"])
    with pytest.raises(LatticeError):
        rebase(X, ["H1", "H2"], ["a", "b"])


def test_integer_inverse():
    M = [[1, 2], [3, 7]]
    assert integer_inverse(M) == [[7, -2], [-3, 1]]
    with pytest.raises(LatticeError):
        integer_inverse([[2, 0], [0, 1]])


def test_example2_rebase_from_blow_up_basis():
    X = constructions.example2_variety()
    assert degree_form(X) == (9, 13, 19)
    assert verify_relation(X, X.anticanonical, "H2 + H3")
    assert "rebase:H1,H2,H3" in X.provenance


def test_verify_relation_examples():
    X2 = constructions.example2_variety()
    assert verify_relation(X2, "Df2", "3H1 - Df1")
    X1 = constructions.example1_variety()
    assert verify_relation(X1, "H3", "H1 - D11")
    p3 = constructions.preset("p3")
    assert not verify_relation(p3, "H", "2H")


def test_parse_class():
    X = constructions.example1_variety()
    assert parse_class(X, "2H1 + 2H2 - D11 - D1") == DivisorClass((2, 2, -1, -1))
    assert parse_class(X, "-K") == X.anticanonical
    assert parse_class(X, "3*H3") == DivisorClass((3, 0, -3, 0))
    for bad in ("", "2", "H1 +", "Q"):
        with pytest.raises(LatticeError):
            parse_class(X, bad)


def test_presets_have_positive_degree():
    for name in constructions.threefold_presets():
        assert constructions.preset(name).anticanonical_degree() > 0
