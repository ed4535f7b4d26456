"""Seeded property suites shared by the command line and the test-suite.

Every suite returns a SuiteResult listing its properties with the number
of cases checked, the number of failures and the smallest failing case.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .cochain import (ChainMap, Complex, FenceArrow, FenceDiagram, betti, cohomology_dims,
                      cone, holim_fence, les_of_cone)
from .cosimplicial import CosimplicialDGA
from .fisoc import (FrobComplex, abs_rigid, frobenius_cone, hom_complex, hom_drig,
                    random_frob_complex, ses_check, twist)
from .godement import (FiniteSite, PosetSheaf, augmentation_report, bar, random_sheaf,
                       random_site, stalkwise_homotopy_check)
from .linalg import Matrix, kernel_basis
from .ring_axioms import MODELS, check_all, perturb
from .syntomic import (fatten, random_package, resolve_node, syntomic_cone, syntomic_holim)
from .thom_sullivan import stabilization_scan, ts_verify

SCHEMA_VERSION = 1
SUITES = ("cone-les", "ts-quasi-iso", "godement", "ses", "ring-axioms", "holim-invariance")


@dataclass
class PropertyResult:
    name: str
    cases: int = 0
    failures: int = 0
    counterexample: dict | None = None
    _size: int | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, size: int = 0, dump: Callable[[], dict] | None = None) -> None:
        """Count a case; keep the smallest failing one."""
        self.cases += 1
        if ok:
            return
        self.failures += 1
        if self._size is None or size < self._size:
            self._size = size
            self.counterexample = dump() if dump else {}

    def to_json(self) -> dict:
        out = {"property": self.name, "cases": self.cases, "failures": self.failures,
               "passed": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteResult:
    suite: str
    params: dict
    properties: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def prop(self, name: str) -> PropertyResult:
        p = PropertyResult(name)
        self.properties.append(p)
        return p

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "suite": self.suite, "params": self.params,
                "properties": [p.to_json() for p in self.properties], "passed": self.passed}


def _size(*cs: Complex) -> int:
    return sum(sum(c.dims.values()) for c in cs)


# ---------------------------------------------------------------------------
# random chain maps

def random_chain_map(rng: random.Random, source: Complex, target: Complex) -> ChainMap:
    """A random degree-0 cocycle of Hom(source, target)."""
    h = hom_complex(source, target)
    f = {}
    lst = h.blocks.get(0)
    if lst:
        z = kernel_basis(h.complex.diff(0)).basis
        vec = z.apply([rng.randint(-2, 2) for _ in range(z.cols)])
        for j, off, r, c in lst:
            f[j] = Matrix.from_rows([vec[off + a * c: off + (a + 1) * c] for a in range(r)], c)
    return ChainMap(source, target, f)


def _random_complex(rng: random.Random) -> Complex:
    return random_frob_complex(rng, max_dim=4, max_width=3).complex


# ---------------------------------------------------------------------------
# suites

def suite_cone_les(seed: int = 0, cases: int = 200) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("cone-les", {"seed": seed, "cases": cases})
    les = res.prop("long exact sequence of a cone is exact")
    bes = res.prop("cone of phi - p^i has the dims of the cone of id - phi/p^i")
    for k in range(cases):
        a, b = _random_complex(rng), _random_complex(rng)
        f = random_chain_map(rng, a, b)
        les.record(les_of_cone(f).exact, _size(a, b),
                   lambda: {"case": k, "map": f.to_json()})
        m = random_frob_complex(rng)
        lo, hi = m.complex.support
        for i in range(-3, 4):
            c0 = cone(frobenius_cone(m, i))[0]
            c1 = cone(frobenius_cone(m, i, besser=True))[0]
            ok = all(betti(c0, n) == betti(c1, n) for n in range(lo - 2, hi + 2))
            bes.record(ok, _size(m.complex), lambda: {"case": k, "twist": i,
                                                      "frob": m.to_json()})
    return res


def suite_ses(seed: int = 0, cases: int = 200, hom: bool = True, ses: bool = True) -> SuiteResult:
    """Both properties run on the same seeded sweep; either can be switched off."""
    rng = random.Random(seed)
    res = SuiteResult("ses", {"seed": seed, "cases": cases})
    seq = None
    if ses:
        seq = res.prop("0 -> H^{n-1}/Im(1 - phi/p^i) -> H^n_phi -> (H^n)^{phi=p^i} -> 0 exact")
    two = res.prop("hom_drig(1, M(i), n) = abs_rigid(M, i, n)") if hom else None
    unit = FrobComplex.unit()
    for k in range(cases):
        m = random_frob_complex(rng, max_dim=4, max_width=4)
        lo, hi = m.complex.support
        for i in range(-3, 4):
            for n in range(lo, hi + 2):
                if seq is not None:
                    r = ses_check(m, i, n)
                    seq.record(r.exact, _size(m.complex),
                               lambda: {"case": k, "twist": i, "degree": n, "frob": m.to_json(),
                                        "report": r.to_json()})
                if two is not None:
                    a, b = hom_drig(unit, twist(m, i), n), abs_rigid(m, i, n)
                    two.record(a == b, _size(m.complex),
                               lambda: {"case": k, "twist": i, "degree": n,
                                        "hom": a, "abs": b, "frob": m.to_json()})
    return res


def _random_fence(rng: random.Random) -> FenceDiagram:
    """A zigzag B0 -> T0 <- B1 -> T1 <- ... with random nodes and maps."""
    nt = rng.randint(1, 3)
    bottoms = [_random_complex(rng) for _ in range(nt + 1)]
    tops = [_random_complex(rng) for _ in range(nt)]
    arrows = []
    for t in range(nt):
        arrows.append(FenceArrow(t, t, random_chain_map(rng, bottoms[t], tops[t]), "right"))
        arrows.append(FenceArrow(t + 1, t, random_chain_map(rng, bottoms[t + 1], tops[t]), "left"))
    return FenceDiagram(bottoms, tops, arrows)


def _replace_node(rng: random.Random, fence: FenceDiagram) -> FenceDiagram:
    """Swap one node for a fattened quasi-isomorphic complex."""
    side = rng.choice(["bottom", "top"])
    nodes = fence.bottom_nodes if side == "bottom" else fence.top_nodes
    k = rng.randrange(len(nodes))
    new, inc, pr = fatten(nodes[k], rng, pairs=rng.randint(1, 2))
    bottoms, tops = list(fence.bottom_nodes), list(fence.top_nodes)
    arrows = []
    for a in fence.arrows:
        f = a.map
        if side == "bottom" and a.bottom == k:
            f = f @ pr
        if side == "top" and a.top == k:
            f = inc @ f
        arrows.append(FenceArrow(a.bottom, a.top, f, a.direction))
    (bottoms if side == "bottom" else tops)[k] = new
    return FenceDiagram(bottoms, tops, arrows)


def suite_holim_invariance(seed: int = 0, cases: int = 50) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("holim-invariance", {"seed": seed, "cases": cases})
    fence_inv = res.prop("holim of a fence is invariant under node replacement")
    syn_inv = res.prop("syntomic holim is invariant under node replacement")
    syn_eq = res.prop("syntomic holim equals the cone model")
    for k in range(cases):
        fence = _random_fence(rng)
        h0 = holim_fence(fence)
        h1 = holim_fence(_replace_node(rng, fence))
        lo = min(h0.support[0], h1.support[0])
        hi = max(h0.support[1], h1.support[1])
        fence_inv.record(cohomology_dims(h0, range(lo, hi + 1)) ==
                         cohomology_dims(h1, range(lo, hi + 1)),
                         _size(*fence.bottom_nodes, *fence.top_nodes), lambda: {"case": k})
        pkg = random_package(rng)
        i = rng.randint(0, 2)
        base = syntomic_holim(pkg, i)
        cone_dims = syntomic_cone(pkg, i)
        syn_eq.record(base == cone_dims, _size(pkg.rig.complex),
                      lambda: {"case": k, "twist": i, "package": pkg.to_json()})
        node = rng.choice("abcd")
        other = syntomic_holim(resolve_node(pkg, node, rng), i)
        syn_inv.record(other == base, _size(pkg.rig.complex),
                       lambda: {"case": k, "twist": i, "node": node, "package": pkg.to_json()})
    return res


def ts_examples(L: int = 5) -> dict:
    """The cosimplicial DGAs used for the integration check."""
    return {
        "constant": CosimplicialDGA.constant_field(L),
        "godement-chain-2": bar(PosetSheaf.constant(FiniteSite.chain(2)), L).dga(),
        "godement-chain-3": bar(PosetSheaf.constant(FiniteSite.chain(3)), L).dga(),
    }


def suite_ts_quasi_iso(L: int = 5, D: int | None = None, D_range=(1, 2)) -> SuiteResult:
    res = SuiteResult("ts-quasi-iso", {"L": L, "D": D, "D_range": list(D_range)})
    scan_p = res.prop("cohomology of the truncated complex stabilizes and matches sM")
    chain = res.prop("integration is a chain map")
    iso = res.prop("H^q(integration) is an isomorphism for q < L - 1")
    comm = res.prop("products are graded commutative compatible families")
    mult = res.prop("H(integration) is multiplicative up to coboundary")
    for name, m in ts_examples(L).items():
        d = D
        if d is None:
            scan = stabilization_scan(m, list(D_range))
            scan_p.record(scan.agrees_with_simple, 0, lambda: {"example": name,
                                                               "scan": scan.to_json()})
            d = scan.stable_D or max(D_range)
        v = ts_verify(m, d)
        dump = lambda: {"example": name, "report": v.to_json()}
        chain.record(v.chain_map, 0, dump)
        iso.record(all(v.iso_by_degree.values()), 0, dump)
        comm.record(v.commutative and v.compatible, 0, dump)
        mult.record(v.multiplicative, 0, dump)
    return res


def suite_godement(seed: int = 0, cases: int = 20, n_max: int = 5) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("godement", {"seed": seed, "cases": cases, "n_max": n_max})
    aug = res.prop("augmentation is a stalkwise quasi-isomorphism below n_max - 1")
    hom = res.prop("id = dh + hd on the augmented stalk complex")
    sheaves = []
    for n in (1, 2, 3, 4):
        site = FiniteSite.chain(n)
        sheaves.append(("constant", site, PosetSheaf.constant(site)))
        for x in site.points:
            sheaves.append(("skyscraper", site, PosetSheaf.skyscraper(site, x)))
    for k in range(cases):
        site = random_site(rng, 4)
        sheaves.append(("random", site, random_sheaf(site, rng)))
    for kind, site, F in sheaves:
        dump = lambda: {"kind": kind, "site": site.to_json(), "sheaf": F.to_json()}
        size = len(site.points)
        aug.record(augmentation_report(F, n_max).ok, size, dump)
        hom.record(stalkwise_homotopy_check(F, n_max).ok, size, dump)
    return res


def suite_ring_axioms(model: str = "derham-toy", perturbation: str | None = None) -> SuiteResult:
    if model not in MODELS:
        raise KeyError(model)
    data = MODELS[model]()
    if perturbation:
        data = perturb(data, perturbation)
    res = SuiteResult("ring-axioms", {"model": model, "perturb": perturbation})
    rep = check_all(data)
    for key in ("monoid", "orientation", "witnesses"):
        p = res.prop(key)
        r = rep[key]
        p.record(r["passed"], 0, lambda: {"failures": r.get("failures", []),
                                          "missing": r.get("missing")})
    for x, r in rep["stability"].items():
        p = res.prop(f"stability on {x}")
        p.record(r["passed"], 0, lambda: {"failures": r["failures"]})
    p = res.prop("site")
    p.record(not rep["site"], 0, lambda: {"problems": rep["site"]})
    return res


def run_suite(name: str, seed: int = 0, cases: int | None = None, L: int = 5,
              D: int | None = None, model: str = "derham-toy",
              perturbation: str | None = None) -> SuiteResult:
    if name == "cone-les":
        return suite_cone_les(seed, cases or 200)
    if name == "ses":
        return suite_ses(seed, cases or 200)
    if name == "holim-invariance":
        return suite_holim_invariance(seed, cases or 50)
    if name == "ts-quasi-iso":
        return suite_ts_quasi_iso(L, D)
    if name == "godement":
        return suite_godement(seed, cases or 20)
    if name == "ring-axioms":
        return suite_ring_axioms(model, perturbation)
    raise KeyError(name)
