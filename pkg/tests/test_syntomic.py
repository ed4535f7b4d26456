import json
import random

import pytest

from oracle import naive_rank
from rigsyn.cochain import betti
from rigsyn.fisoc import abs_rigid, eigenvalues
from rigsyn.syntomic import (BlockUnknown, HypercoverData, MissingFiltration, MissingNodes,
                             SimplicialIdentityViolation, SyntomicPackage, UnknownExample,
                             builtin_example, elliptic_mult, exceptional_fiber, fatten_package,
                             gm, hypercover_assemble, localization, nodal_cubic,
                             nodal_cubic_hypercover, p1, random_package, resolve_node,
                             syntomic_cone, syntomic_holim, syntomic_les, syntomic_via_absolute,
                             trivial_package)

P = 5
DEGS = range(0, 4)


# builtin examples -------------------------------------------------------

def test_builtin_frob_examples():
    g = builtin_example("gm")
    assert g.complex.dims == {0: 1, 1: 1}
    assert eigenvalues(g, 0) == [1] and eigenvalues(g, 1) == [P]
    q = builtin_example("p1", 7)
    assert eigenvalues(q, 2) == [7] and betti(q.complex, 1) == 0


def test_unknown_example():
    with pytest.raises(UnknownExample):
        builtin_example("bogus")


def test_elliptic_cone_dims():
    dims = syntomic_cone(elliptic_mult(), 1, DEGS)
    assert dims[0] == 0
    assert dims[1] == 2 and dims[2] == 2


def test_elliptic_holim_dims():
    pkg = elliptic_mult()
    holim = syntomic_holim(pkg, 1, DEGS)
    assert holim == syntomic_cone(pkg, 1, DEGS)
    # top degree: F^1H^2_dR maps onto nothing in rigK, so it is absorbed
    assert [holim[n] for n in DEGS] == [0, 2, 2, 0]


def test_elliptic_les_around_degree_one():
    pkg = elliptic_mult()
    rep = syntomic_les(pkg, 1, "absolute", range(-1, 3))
    assert rep.exact
    assert rep.dims("syn")[1] == 2
    cone_rep = syntomic_les(pkg, 1, "cone", range(-1, 3))
    assert cone_rep.exact
    # b(x, y) = (0, y - x) on the degree-one column has a one-dimensional kernel
    k = next(k for k, s in enumerate(cone_rep.slots) if s.label == "rig+fdr" and s.degree == 1)
    assert cone_rep.positions[k]["dim"] == 2
    assert cone_rep.positions[k]["dim_ker"] == 1


def test_elliptic_localization():
    rep = localization(elliptic_mult(), 1, DEGS)
    assert rep.exact
    assert rep.special[1] == 1 and rep.special[2] == 1
    assert all(v == 0 for v in rep.delta_rank.values())
    # H_{syn,s}^n agrees with H^{n-1}_rig of the special fiber for n = 1, 2
    g = gm()
    assert [rep.special[n] for n in (1, 2)] == [betti(g.complex, n - 1) for n in (1, 2)]


def test_trivial_package():
    pkg = trivial_package()
    assert all(v == 0 for v in syntomic_cone(pkg, 1, range(-2, 4)).values())
    assert all(v == 0 for v in syntomic_holim(pkg, 1, range(-2, 4)).values())
    rep = syntomic_les(pkg, 1)
    assert rep.exact and all(p["dim"] == 0 for p in rep.positions)
    loc = localization(pkg, 1)
    assert loc.exact and not any(loc.special.values())


def test_missing_filtration():
    with pytest.raises(MissingFiltration):
        syntomic_cone(elliptic_mult(), 2)


def test_missing_nodes():
    pkg = elliptic_mult()
    pkg.zigzag = None
    with pytest.raises(MissingNodes):
        syntomic_holim(pkg, 1)


# randomized agreement ----------------------------------------------------

def test_routes_agree_on_random_packages():
    rng = random.Random(41)
    for _ in range(20):
        pkg = random_package(rng, P)
        lo, hi = pkg.window()
        degs = range(lo - 1, hi + 2)
        for i in range(0, 3):
            cone = syntomic_cone(pkg, i, degs)
            assert syntomic_holim(pkg, i, degs) == cone
            assert syntomic_via_absolute(pkg, i, degs) == cone
            assert syntomic_cone(pkg, i, degs, besser=True) == cone
            assert syntomic_les(pkg, i).exact
            assert syntomic_les(pkg, i, "cone").exact
            assert localization(pkg, i).exact


@pytest.mark.parametrize("node", ["a", "b", "c", "d"])
def test_resolving_a_node_keeps_dims(node):
    rng = random.Random(42)
    pkg = elliptic_mult()
    base = syntomic_holim(pkg, 1, DEGS)
    for _ in range(3):
        assert syntomic_holim(resolve_node(pkg, node, rng), 1, DEGS) == base


def test_fattened_builtin_agrees():
    rng = random.Random(43)
    pkg = elliptic_mult()
    base = syntomic_cone(pkg, 1, DEGS)
    for _ in range(5):
        fat = fatten_package(pkg, rng)
        assert syntomic_cone(fat, 1, DEGS) == base
        assert syntomic_holim(fat, 1, DEGS) == base


def test_les_determines_localization_ranks():
    pkg = elliptic_mult()
    rep = localization(pkg, 1, DEGS)
    les = syntomic_les(pkg, 1, "absolute", range(-1, 4))
    syn = les.dims("syn")
    for n in DEGS:
        assert rep.syn[n] == syn.get(n, 0)


# package JSON -----------------------------------------------------------

def test_package_json_round_trip():
    rng = random.Random(44)
    for pkg in (elliptic_mult(), random_package(rng, P)):
        text = json.dumps(pkg.to_json(), sort_keys=True)
        again = SyntomicPackage.from_json(json.loads(text))
        assert json.dumps(again.to_json(), sort_keys=True) == text
        assert syntomic_cone(again, 1) == syntomic_cone(pkg, 1)


# hypercovers ------------------------------------------------------------

def test_nodal_cubic_matches_cech_oracle():
    x = nodal_cubic()
    dims = {n: betti(x.complex, n) for n in range(4)}
    # by hand: C^0 = H(pt) + H(P1), C^1 = H(pt) + H(pt); d^0 has rows (1, -1)
    d0 = [[1, -1], [1, -1]]
    r = naive_rank(d0)
    assert dims == {0: 2 - r, 1: 2 - r, 2: 1, 3: 0}
    assert [eigenvalues(x, n) for n in range(3)] == [[1], [1], [P]]


def test_nodal_cubic_exceptional_fiber():
    x = nodal_cubic()
    e = exceptional_fiber(x, 1)
    # H^{n-1}_rig is one-dimensional for n = 1, 2; H^2_rig adds n = 3
    assert [betti(e, n) for n in range(5)] == [0, 1, 1, 1, 0]


def test_degenerate_hypercover_is_identity():
    h = HypercoverData([["P1"], ["P1"]], {(1, 0): [0], (1, 1): [0]}, degenerate={(1, 0)})
    x = hypercover_assemble(h)
    assert {n: betti(x.complex, n) for n in range(3)} == {0: 1, 1: 0, 2: 1}
    assert [abs_rigid(x, 1, n) for n in range(4)] == [abs_rigid(p1(), 1, n) for n in range(4)]


def test_two_points():
    x = hypercover_assemble(HypercoverData([["point", "point"]], {}))
    assert betti(x.complex, 0) == 2


def test_hypercover_errors():
    with pytest.raises(BlockUnknown):
        hypercover_assemble(HypercoverData([["torus"]], {}))
    with pytest.raises(SimplicialIdentityViolation):
        hypercover_assemble(HypercoverData([["point"], ["point"]], {(1, 0): [3], (1, 1): [0]}))
    with pytest.raises(SimplicialIdentityViolation):
        hypercover_assemble(HypercoverData([["point"], ["point"]], {(1, 0): [0]}))
    bad = HypercoverData([["point", "point"], ["point"], ["point"]],
                         {(1, 0): [0], (1, 1): [1], (2, 0): [0], (2, 1): [0], (2, 2): [0]})
    with pytest.raises(SimplicialIdentityViolation):
        hypercover_assemble(bad)


def test_hypercover_json_round_trip():
    h = nodal_cubic_hypercover()
    again = HypercoverData.from_json(json.loads(json.dumps(h.to_json())))
    assert again == h
