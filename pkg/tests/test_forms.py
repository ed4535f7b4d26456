import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from oracle import simplex_integral
from rigsyn.forms import (DegreeMismatch, DimensionMismatch, PolyForm, codegeneracy_pullback,
                          coface_pullback, exterior_d, format_form, integrate, parse_form,
                          wedge)


def random_form(rng, n, q, D=2, terms=3):
    subsets = list(combinations(range(1, n + 1), q))
    data = {}
    for _ in range(terms):
        e = [0] * n
        for _ in range(rng.randint(0, D)):
            if n:
                e[rng.randrange(n)] += 1
        key = (tuple(e), rng.choice(subsets))
        data[key] = data.get(key, 0) + Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return PolyForm(n, q, data)


def monomial_generators(n, q, D):
    for e in product(range(D + 1), repeat=n):
        if sum(e) > D:
            continue
        for s in combinations(range(1, n + 1), q):
            yield PolyForm(n, q, {(e, s): 1})


@st.composite
def forms(draw, n=None, q=None):
    n = draw(st.integers(1, 3)) if n is None else n
    q = draw(st.integers(0, n)) if q is None else q
    seed = draw(st.integers(0, 10 ** 6))
    return random_form(random.Random(seed), n, q)


# wedge ------------------------------------------------------------------

def test_wedge_unit_and_alternating():
    b = parse_form("2 * T1 dT2 + T2^2 dT1", 2)
    assert wedge(PolyForm.constant(2), b) == b
    assert wedge(PolyForm.dT(2, 1), PolyForm.dT(2, 1)).is_zero()
    assert wedge(PolyForm.dT(2, 1), PolyForm.dT(2, 2)) == -wedge(PolyForm.dT(2, 2), PolyForm.dT(2, 1))


def test_wedge_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        wedge(PolyForm.dT(1, 1), PolyForm.dT(2, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(forms(n=n), forms(n=n))))
def test_wedge_graded_commutative(pair):
    a, b = pair
    assert wedge(a, b) == wedge(b, a).scale((-1) ** (a.q * b.q))


# exterior d -------------------------------------------------------------

def test_d_examples():
    assert exterior_d(PolyForm.constant(2, 5)).is_zero()
    assert exterior_d(PolyForm.coordinate(2, 1)) == PolyForm.dT(2, 1)
    t1t2 = PolyForm(2, 0, {((1, 1), ()): 1})
    assert exterior_d(t1t2) == parse_form("T2 dT1 + T1 dT2", 2)


@settings(max_examples=60, deadline=None)
@given(forms())
def test_d_squared_zero(a):
    assert exterior_d(exterior_d(a)).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(forms(n=n), forms(n=n))))
def test_d_leibniz(pair):
    a, b = pair
    lhs = exterior_d(wedge(a, b))
    rhs = wedge(exterior_d(a), b) + wedge(a, exterior_d(b)).scale((-1) ** a.q)
    assert lhs == rhs


# simplicial structure ---------------------------------------------------

def test_coface_examples():
    assert coface_pullback(PolyForm.constant(2, 3), 1) == PolyForm.constant(1, 3)
    t1 = PolyForm.coordinate(1, 1)
    assert coface_pullback(t1, 0) == PolyForm.constant(0)
    assert coface_pullback(PolyForm.dT(1, 1), 0).is_zero()
    assert codegeneracy_pullback(PolyForm.constant(1, 2), 0) == PolyForm.constant(2, 2)


@pytest.mark.parametrize("n", [2, 3])
def test_coface_identities(n):
    # delta^i delta^j = delta^{j-1} delta^i on forms of the n-simplex, i < j
    for q in range(n + 1):
        for a in monomial_generators(n, q, 3):
            for j in range(n + 1):
                for i in range(j):
                    lhs = coface_pullback(coface_pullback(a, j), i)
                    rhs = coface_pullback(coface_pullback(a, i), j - 1)
                    assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2, 3])
def test_codegeneracy_identities(n):
    # forms on the (n-1)-simplex pulled to n and back
    for q in range(n):
        for a in monomial_generators(n - 1, q, 3):
            for i in range(n):
                up = codegeneracy_pullback(a, i)
                assert coface_pullback(up, i) == a
                assert coface_pullback(up, i + 1) == a
                if n < 2:
                    continue
                for j in range(n + 1):
                    if j < i:
                        down = codegeneracy_pullback(coface_pullback(a, j), i - 1)
                    elif j > i + 1:
                        down = codegeneracy_pullback(coface_pullback(a, j - 1), i)
                    else:
                        continue
                    assert coface_pullback(up, j) == down


@pytest.mark.parametrize("n", [2, 3])
def test_codegeneracy_composition(n):
    # sigma^j sigma^i = sigma^i sigma^{j+1} for i <= j, as pullbacks
    for a in monomial_generators(n - 2, 0, 2):
        for i in range(n - 1):
            for j in range(i, n - 1):
                lhs = codegeneracy_pullback(codegeneracy_pullback(a, i), j + 1)
                rhs = codegeneracy_pullback(codegeneracy_pullback(a, j), i)
                assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(forms())
def test_pullbacks_commute_with_d(a):
    for i in range(a.n + 1):
        assert coface_pullback(exterior_d(a), i) == exterior_d(coface_pullback(a, i))
    for i in range(a.n + 1):
        assert codegeneracy_pullback(exterior_d(a), i) == exterior_d(codegeneracy_pullback(a, i))


# integration ------------------------------------------------------------

def test_integral_examples():
    assert integrate(PolyForm.volume(1)) == 1
    assert integrate(PolyForm.volume(2)) == Fraction(1, 2)
    assert integrate(parse_form("T1 dT1^dT2", 2)) == Fraction(1, 6)
    assert simplex_integral({(1, 0): 1}, 2) == Fraction(1, 6)


def test_integral_orientation_sign():
    assert integrate(parse_form("dT2^dT1", 2)) == Fraction(-1, 2)


def test_integral_degree_mismatch():
    assert integrate(PolyForm.zero(2, 1)) == 0
    with pytest.raises(DegreeMismatch):
        integrate(PolyForm.dT(2, 1))


def test_integral_matches_iterated_oracle():
    for n in (1, 2, 3):
        for e in product(range(4), repeat=n):
            a = PolyForm(n, n, {(e, tuple(range(1, n + 1))): 1})
            assert integrate(a) == simplex_integral({e: 1}, n)


def test_stokes_sampled():
    rng = random.Random(11)
    checked = 0
    for n in (1, 2, 3):
        for _ in range(20):
            a = random_form(rng, n, n - 1, D=3, terms=4)
            lhs = integrate(exterior_d(a))
            rhs = sum((-1) ** i * integrate(coface_pullback(a, i)) for i in range(n + 1))
            assert lhs == rhs
            checked += 1
    assert checked >= 50


# text syntax --------------------------------------------------------------

def test_format_example():
    a = parse_form("1/6 * T1^2 T2 dT1^dT2", 2)
    assert a.terms == {((2, 1), (1, 2)): Fraction(1, 6)}
    assert format_form(a) == "1/6 * T1^2 T2 dT1^dT2"


@settings(max_examples=80, deadline=None)
@given(forms())
def test_format_parse_round_trip(a):
    assert parse_form(format_form(a), a.n) == a


def test_parse_errors():
    with pytest.raises(DimensionMismatch):
        parse_form("T3 dT1", 2)
    with pytest.raises(DegreeMismatch):
        parse_form("dT1 + T1", 2)
