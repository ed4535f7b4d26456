import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracle import naive_rank
from rigsyn.cochain import ChainMap, Complex, betti
from rigsyn.fisoc import (FrobComplex, abs_rigid, charpoly, direct_sum_frob, eigenvalues,
                          hom_drig, minimal_model, random_frob_complex, rational_roots,
                          ses_check, twist, xi)
from rigsyn.linalg import Matrix

P = 5


def gm(prime=P):
    return FrobComplex.from_cohomology({0: [[1]], 1: [[prime]]}, prime)


def random_minimal(rng, prime=P):
    """Zero differential, random invertible phi with eigenvalues among powers of p."""
    blocks = {}
    for n in range(rng.randint(0, 1), 3):
        k = rng.randint(0, 3)
        if not k:
            continue
        rows = [[Fraction(0)] * k for _ in range(k)]
        for r in range(k):
            rows[r][r] = Fraction(prime) ** rng.randint(-1, 2)
            for c in range(r + 1, k):
                rows[r][c] = Fraction(rng.randint(-2, 2))
        blocks[n] = rows
    if not blocks:
        blocks[0] = [[Fraction(1)]]
    return FrobComplex.from_cohomology(blocks, prime), blocks


def oracle_abs(blocks, prime, i, n):
    """dim ker(1 - phi/p^i) on H^n plus dim coker on H^{n-1} (zero differential)."""
    def g_rank(k):
        rows = blocks.get(k)
        if not rows:
            return 0, 0
        m = [[Fraction(int(r == c)) - Fraction(v) / prime ** i for c, v in enumerate(row)]
             for r, row in enumerate(rows)]
        return len(rows), naive_rank(m)
    hn, rn = g_rank(n)
    hm, rm = g_rank(n - 1)
    return (hn - rn) + (hm - rm)


# twist ----------------------------------------------------------------

def test_twist_examples():
    one = FrobComplex.unit(P)
    assert twist(one, 0) is one
    assert twist(one, 1).phi.at(0) == Matrix.scalar(1, Fraction(1, P))
    m = gm()
    for a in (-2, 0, 1, 3):
        for b in (-1, 0, 2):
            assert twist(twist(m, a), b).phi.at(1) == twist(m, a + b).phi.at(1)


def test_not_quasi_iso_rejected():
    c = Complex({0: 1})
    with pytest.raises(ValueError):
        FrobComplex(c, ChainMap(c, c, {0: Matrix.zeros(1, 1)}), P)


# xi and Hom -----------------------------------------------------------

def test_xi_examples():
    one = FrobComplex.unit(P)
    assert xi(one, one).at(0).is_zero()
    assert xi(one, twist(one, 1)).at(0) == Matrix.scalar(1, 1 - Fraction(1, P))


def test_hom_unit():
    one = FrobComplex.unit(P)
    assert hom_drig(one, one, 0) == 1
    assert hom_drig(one, one, 1) == 1
    for i in range(-2, 4):
        assert hom_drig(one, twist(one, 1), i) == 0


def test_xi_chain_map_random():
    rng = random.Random(31)
    for _ in range(25):
        a = random_frob_complex(rng, P, max_dim=3, max_width=3)
        b = random_frob_complex(rng, P, max_dim=3, max_width=3)
        xi(a, b).check()


# absolute rigid cohomology --------------------------------------------

def test_abs_rigid_examples():
    one = FrobComplex.unit(P)
    assert [abs_rigid(one, 0, n) for n in (0, 1, 2)] == [1, 1, 0]
    assert all(abs_rigid(one, 1, n) == 0 for n in range(-1, 3))
    assert [abs_rigid(gm(), 1, n) for n in (0, 1, 2, 3)] == [0, 1, 1, 0]


def test_abs_rigid_matches_oracle():
    rng = random.Random(32)
    for _ in range(40):
        m, blocks = random_minimal(rng)
        for i in range(-1, 3):
            for n in range(-1, 5):
                assert abs_rigid(m, i, n) == oracle_abs(blocks, P, i, n)


def test_two_routes_agree():
    rng = random.Random(33)
    one = FrobComplex.unit(P)
    for _ in range(30):
        m = random_frob_complex(rng, P)
        lo, hi = m.complex.support
        for i in range(0, 3):
            for n in range(lo, hi + 3):
                assert hom_drig(one, twist(m, i), n) == abs_rigid(m, i, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(-2, 3))
def test_twist_compatibility(seed, i):
    m = random_frob_complex(random.Random(seed), P)
    lo, hi = m.complex.support
    scaled = m.scaled(P)
    for n in range(lo, hi + 3):
        assert abs_rigid(scaled, i + 1, n) == abs_rigid(m, i, n)


def test_minimal_model_invariant():
    rng = random.Random(34)
    for _ in range(20):
        m = random_frob_complex(rng, P)
        mm = minimal_model(m)
        lo, hi = m.complex.support
        for n in range(lo, hi + 1):
            assert betti(mm.complex, n) == betti(m.complex, n)
            for i in range(3):
                assert abs_rigid(mm, i, n) == abs_rigid(m, i, n)


# SES ------------------------------------------------------------------

def test_ses_examples():
    one = FrobComplex.unit(P)
    r = ses_check(one, 0, 0)
    assert r.exact and (r.left, r.middle, r.right) == (0, 1, 1)
    r = ses_check(one, 1, 1)
    assert r.exact and (r.left, r.middle, r.right) == (0, 0, 0)


def test_ses_random_sweep():
    rng = random.Random(35)
    for _ in range(40):
        m = random_frob_complex(rng, P, max_dim=6)
        lo, hi = m.complex.support
        for i in range(-1, 3):
            for n in range(lo, hi + 2):
                r = ses_check(m, i, n)
                assert r.exact, r.to_json()
                assert r.middle == r.left + r.right


# eigenvalues ----------------------------------------------------------

def test_charpoly_and_roots():
    a = Matrix.from_rows([[2, 1], [0, 3]])
    assert charpoly(a) == [6, -5, 1]
    assert rational_roots([Fraction(6), Fraction(-5), Fraction(1)]) == {2: 1, 3: 1}
    assert rational_roots([Fraction(1, 25), Fraction(-2, 5), Fraction(1)]) == {Fraction(1, 5): 2}


def test_eigenvalues_and_irrational():
    m = direct_sum_frob(gm(), FrobComplex.from_cohomology({1: [[Fraction(1, 5)]]}, P))
    assert eigenvalues(m, 1) == [Fraction(1, 5), 5]
    rot = FrobComplex.from_cohomology({0: [[0, 2], [1, 0]]}, P)
    with pytest.raises(ValueError):
        eigenvalues(rot, 0)


def test_json_round_trip():
    m = random_frob_complex(random.Random(36), P)
    again = FrobComplex.from_json(m.to_json())
    assert again.complex == m.complex and again.prime == P
    assert all(again.phi.at(n) == m.phi.at(n) for n in m.complex.dims)
