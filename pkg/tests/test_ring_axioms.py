import copy
import json

import pytest

from rigsyn.cochain import ChainMap, Complex, cohomology
from rigsyn.linalg import Matrix, rank
from rigsyn.ring_axioms import (PERTURBATIONS, GradedMonoidData, MissingStructure, TestSite,
                                check_all, check_monoid, check_orientation, check_stability,
                                check_witnesses, constant_model, derham_toy, perturb)


def failures(result):
    out = set()
    for key in ("monoid", "orientation", "witnesses"):
        for f in result[key].get("failures", []):
            out.add((key, f["diagram"], f["object"], tuple(f["indices"])))
    for x, r in result["stability"].items():
        for f in r["failures"]:
            out.add(("stability", f["diagram"], f["object"], tuple(f["indices"])))
    return out


def failing_checks(data):
    r = check_all(data)
    names = set()
    if not r["monoid"]["passed"]:
        names.add("monoid")
    if not all(s["passed"] for s in r["stability"].values()):
        names.add("stability")
    if not r["orientation"]["passed"]:
        names.add("orientation")
    return names


def test_constant_model_passes():
    assert check_monoid(constant_model()).passed


def test_derham_toy_passes_everything():
    data = derham_toy()
    assert not data.site.check()
    r = check_all(data)
    assert r["passed"], r
    assert r["monoid"]["checked"] > 0


def test_stability_details_split():
    data = derham_toy()
    for x in ("S", "Gm", "Y"):
        rep = check_stability(data, x)
        assert rep.passed
        xg = data.site.pairings[x]
        for d in rep.details:
            n, i = d["n"], d["i"]
            hx = cohomology(data.complex(i, x), n)
            hxg = cohomology(data.complex(i, xg), n)
            p = data.pullback(f"p:{x}", i)
            pstar = hxg.classes @ p.at(n) @ hx.representatives
            # 0 -> H^n(X) -> H^n(X x Gm) -> reduced -> 0 with dims adding up
            coker = hxg.dim - rank(pstar)
            assert rank(pstar) == hx.dim
            assert hxg.dim == hx.dim + coker
            assert d["source"] == d["rank"] == d["reduced"]


def test_stability_fails_with_zero_c():
    data = copy.copy(derham_toy())
    data.c = [0]
    rep = check_stability(data, "Y")
    assert not rep.passed
    failed = {tuple(f["indices"]) for f in rep.failures if f["diagram"] == "stability"}
    for d in rep.details:
        assert d["rank"] == 0
        assert ((d["n"], d["i"]) in failed) == (d["source"] != 0 or d["reduced"] != 0)


@pytest.mark.parametrize("kind", PERTURBATIONS)
def test_each_perturbation_is_isolated(kind):
    expected = {"unit": "monoid", "mu": "monoid", "orientation": "orientation"}[kind]
    assert failing_checks(perturb(derham_toy(), kind)) == {expected}


def test_mu_perturbation_breaks_associativity_or_commutativity():
    rep = check_monoid(perturb(derham_toy(), "mu"))
    diagrams = {f["diagram"] for f in rep.failures}
    assert diagrams & {"associativity", "commutativity"}
    assert all(f["object"] == "Y" for f in rep.failures)


def test_unknown_perturbation():
    with pytest.raises(ValueError):
        perturb(derham_toy(), "bogus")


def test_orientation_cases():
    data = derham_toy()
    assert check_orientation(data).passed
    zero = copy.copy(data)
    zero.c = [0]
    assert check_orientation(zero).passed
    zero_flip = perturb(zero, "orientation")
    assert check_orientation(zero_flip).passed
    assert not check_orientation(perturb(data, "orientation")).passed


def test_missing_structure():
    data = derham_toy(with_y=False)
    with pytest.raises(MissingStructure):
        check_stability(data, "Y")
    bare = copy.copy(data)
    bare.site = TestSite(list(data.site.objects), {"Gm": "Gm×Gm"})
    with pytest.raises(MissingStructure):
        check_orientation(bare)
    r = check_all(bare)
    assert not r["passed"] and "missing" in r["orientation"]


def test_site_check_reports_undeclared_objects():
    site = TestSite(["S"], {"S": "Gm"})
    msgs = site.check()
    assert any("Gm" in m for m in msgs)


def _double_eta_s(data):
    out = copy.copy(data)
    out.eta = dict(data.eta)
    out.eta["S"] = [2 * v for v in data.eta["S"]]
    return out


@pytest.mark.parametrize("modify", [lambda d: d, _double_eta_s,
                                    lambda d: perturb(d, "orientation")])
def test_verdict_is_monotone_in_objects(modify):
    small = failures(check_all(modify(derham_toy(with_y=False))))
    big = failures(check_all(modify(derham_toy(with_y=True))))
    assert small <= big


def test_witnesses_recorded():
    data = copy.copy(derham_toy())
    c = Complex({0: 1})
    data.witnesses = {"homotopy": ChainMap.identity(c),
                      "excision": ChainMap(c, c, {0: Matrix.zeros(1, 1)})}
    rep = check_witnesses(data)
    assert rep.checked == 2
    assert [f["object"] for f in rep.failures] == ["excision"]
    assert not check_all(data)["passed"]


def test_json_round_trip():
    data = derham_toy()
    text = json.dumps(data.to_json(), sort_keys=True)
    again = GradedMonoidData.from_json(json.loads(text))
    assert json.dumps(again.to_json(), sort_keys=True) == text
    assert check_all(again) == check_all(data)
