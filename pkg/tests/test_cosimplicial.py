import random
from fractions import Fraction

import pytest

from rigsyn.algebra import GradedAlgebra
from rigsyn.cochain import betti, induced_map
from rigsyn.cosimplicial import (CosimplicialDGA, CosimplicialModule, TruncationExceeded,
                                 alexander_whitney, aw_product_total, normalization,
                                 simple_complex, simple_complex_dga, tot_unit, validate,
                                 validate_dga)
from rigsyn.godement import FiniteSite, PosetSheaf, bar
from rigsyn.linalg import image_basis, kernel_basis, rank


def _godement_dga(points=2, L=4):
    site = FiniteSite.chain(points)
    return bar(PosetSheaf.constant(site, GradedAlgebra.exterior(1)), L)


def _rand_vec(rng, n):
    return [Fraction(rng.randint(-3, 3)) for _ in range(n)]


def _is_coboundary(c, n, v):
    if not any(v):
        return True
    d = c.diff(n - 1)
    if d.shape[1] == 0:
        return False
    return image_basis(d).contains(v)


def _cocycles(c, n):
    return kernel_basis(c.diff(n)).vectors()


def test_constant_module_valid():
    for L in range(5):
        assert validate(CosimplicialModule.constant(2, L)).valid


def test_swapped_cofaces_reported():
    m = CosimplicialModule.constant(1, 3)
    b = bar(PosetSheaf.skyscraper(FiniteSite.chain(2), "1"), 3).module(0)
    assert validate(b).valid
    delta = dict(b.delta)
    delta[(0, 1)], delta[(1, 1)] = delta[(1, 1)], delta[(0, 1)]
    broken = CosimplicialModule(b.dims, delta, b.sigma)
    rep = validate(broken)
    assert not rep.valid
    assert rep.violations and all("identity" in v for v in rep.to_json()["violations"])
    assert validate(m).valid


def test_godement_bar_valid():
    b = _godement_dga(3, 4)
    assert validate_dga(b.dga()).valid


def test_constant_simple_complex():
    for L in range(1, 6):
        c = simple_complex(CosimplicialModule.constant(1, L))
        assert betti(c, 0) == 1
        for n in range(1, L):
            assert betti(c, n) == 0


def test_level_zero_concentrated():
    c = simple_complex(CosimplicialModule.constant(3, 0))
    assert c.support == (0, 0) and c.dim(0) == 3


def test_simple_differential_squares_to_zero():
    b = _godement_dga(3, 5)
    c = simple_complex_dga(b)
    for n in range(c.support[0], c.support[1]):
        assert (c.diff(n + 1) @ c.diff(n)).is_zero()


def test_normalization_constant():
    N, inc = normalization(CosimplicialModule.constant(2, 4))
    assert N.dim(0) == 2
    assert all(N.dim(q) == 0 for q in range(1, 5))


@pytest.mark.parametrize("points", [1, 2, 3])
def test_normalization_quasi_iso(points):
    L = 4
    b = bar(PosetSheaf.skyscraper(FiniteSite.chain(points), "0"), L)
    m = b.module(0)
    N, inc = normalization(m)
    for q in range(L + 1):
        assert N.dim(q) <= m.dims[q]
    for q in range(L - 1):
        f = induced_map(inc, q)
        assert f.shape[0] == f.shape[1] == rank(f)


def test_aw_unit_laws():
    m = _godement_dga(2, 4).dga()
    c = simple_complex_dga(m)
    one = tot_unit(m)
    rng = random.Random(1)
    for n in range(3):
        x = _rand_vec(rng, c.dim(n))
        assert aw_product_total(m, 0, one, n, x) == x
        assert aw_product_total(m, n, x, 0, one) == x


def test_aw_leibniz():
    m = _godement_dga(2, 5).dga()
    c = simple_complex_dga(m)
    rng = random.Random(2)
    for n1, n2 in [(0, 0), (0, 1), (1, 1), (1, 2), (2, 1), (0, 3)]:
        x, y = _rand_vec(rng, c.dim(n1)), _rand_vec(rng, c.dim(n2))
        lhs = c.diff(n1 + n2).apply(aw_product_total(m, n1, x, n2, y))
        a = aw_product_total(m, n1 + 1, c.diff(n1).apply(x), n2, y)
        b = aw_product_total(m, n1, x, n2 + 1, c.diff(n2).apply(y))
        sign = (-1) ** n1
        assert lhs == [u + sign * v for u, v in zip(a, b)]


def test_aw_truncation():
    m = CosimplicialDGA.constant_field(2)
    with pytest.raises(TruncationExceeded):
        alexander_whitney(m, 2, 0, [Fraction(1)], 1, 0, [Fraction(1)])


def test_aw_associative():
    m = _godement_dga(2, 5).dga()
    c = simple_complex_dga(m)
    rng = random.Random(3)
    for n1, n2, n3 in [(0, 1, 1), (1, 1, 1), (1, 0, 2), (2, 1, 0)]:
        x, y, z = (_rand_vec(rng, c.dim(n)) for n in (n1, n2, n3))
        left = aw_product_total(m, n1 + n2, aw_product_total(m, n1, x, n2, y), n3, z)
        right = aw_product_total(m, n1, x, n2 + n3, aw_product_total(m, n2, y, n3, z))
        assert left == right


def test_aw_commutative_on_cohomology():
    m = _godement_dga(2, 5).dga()
    c = simple_complex_dga(m)
    for n1 in range(2):
        for n2 in range(2):
            for x in _cocycles(c, n1):
                for y in _cocycles(c, n2):
                    xy = aw_product_total(m, n1, x, n2, y)
                    yx = aw_product_total(m, n2, y, n1, x)
                    s = (-1) ** (n1 * n2)
                    diff = [u - s * v for u, v in zip(xy, yx)]
                    assert _is_coboundary(c, n1 + n2, diff)


def test_module_json_round_trip():
    m = _godement_dga(2, 3).module(0)
    again = CosimplicialModule.from_json(m.to_json())
    assert again.dims == m.dims
    assert validate(again).valid
    assert simple_complex(again) == simple_complex(m)
