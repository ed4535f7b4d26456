"""Finite checks of the hypotheses that make a sequence of complexes into a
ring spectrum: graded monoid diagrams, the stability isomorphism given by
multiplication with the class c, and the orientation u^* c = -c.

Structure maps of the test site are referred to by name:
``p:X`` and ``q:X`` are the projections X x Gm -> X and X x Gm -> Gm,
``u`` is the inverse of Gm and ``s1`` its unit section.  Pullbacks along
them are stored per twist as chain maps.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import GradedAlgebra, tensor_algebra, tensor_inclusions
from .cochain import ChainMap, Complex, cohomology, is_quasi_isomorphism
from .linalg import Matrix, Subspace, image_basis, kron, quotient_data, rank

SCHEMA_VERSION = 1


class MissingStructure(KeyError):
    pass


@dataclass
class TestSite:
    """Named test objects; ``pairings[X]`` is the name of X x Gm."""
    __test__ = False
    objects: list
    pairings: dict = field(default_factory=dict)

    def check(self) -> list[str]:
        out = []
        for name in ("S", "Gm"):
            if name not in self.objects:
                out.append(f"missing object {name}")
        for x, xg in self.pairings.items():
            if x not in self.objects or xg not in self.objects:
                out.append(f"pairing {x} x Gm = {xg} uses an undeclared object")
        return out


@dataclass
class GradedMonoidData:
    site: TestSite
    i_max: int
    E: dict                   # (i, X) -> Complex
    eta: dict                 # X -> unit vector in E_0(X)^0
    mu: dict                  # (i, j, X) -> {(a, b): Matrix}
    c: list                   # cocycle in E_1(Gm)^1
    pull: dict                # (map name, i) -> ChainMap
    witnesses: dict = field(default_factory=dict)

    def complex(self, i: int, x: str) -> Complex:
        try:
            return self.E[(i, x)]
        except KeyError:
            raise MissingStructure(f"E_{i}({x})") from None

    def mu_block(self, i: int, j: int, x: str, a: int, b: int) -> Matrix:
        if (i, j, x) not in self.mu:
            raise MissingStructure(f"mu_{i},{j} on {x}")
        m = self.mu[(i, j, x)].get((a, b))
        if m is None:
            e = self.complex
            return Matrix.zeros(e(i + j, x).dim(a + b), e(i, x).dim(a) * e(j, x).dim(b))
        return m

    def pullback(self, name: str, i: int) -> ChainMap:
        try:
            return self.pull[(name, i)]
        except KeyError:
            raise MissingStructure(f"pullback along {name} on E_{i}") from None

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "objects": list(self.site.objects), "pairings": dict(self.site.pairings),
            "i_max": self.i_max,
            "E": [[i, x, c.to_json()] for (i, x), c in sorted(self.E.items())],
            "eta": {x: [str(v) for v in vec] for x, vec in sorted(self.eta.items())},
            "mu": [[i, j, x, [[a, b, m.to_json()] for (a, b), m in sorted(blocks.items())]]
                   for (i, j, x), blocks in sorted(self.mu.items())],
            "c": [str(v) for v in self.c],
            "pull": [[name, i, f.to_json()] for (name, i), f in sorted(self.pull.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GradedMonoidData":
        E = {(i, x): Complex.from_json(c) for i, x, c in obj["E"]}
        return cls(TestSite(list(obj["objects"]), dict(obj.get("pairings", {}))),
                   obj["i_max"], E,
                   {x: [Fraction(v) for v in vec] for x, vec in obj["eta"].items()},
                   {(i, j, x): {(a, b): Matrix.from_json(m) for a, b, m in blocks}
                    for i, j, x, blocks in obj["mu"]},
                   [Fraction(v) for v in obj["c"]],
                   {(name, i): ChainMap.from_json(f) for name, i, f in obj["pull"]})


@dataclass
class Report:
    check: str
    failures: list = field(default_factory=list)
    checked: int = 0
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, diagram: str, obj: str, indices: Sequence[int]) -> None:
        self.failures.append({"diagram": diagram, "object": obj, "indices": list(indices)})

    def to_json(self) -> dict:
        return {"check": self.check, "passed": self.passed, "checked": self.checked,
                "failures": self.failures, "details": self.details}


def _swap(m: int, n: int) -> Matrix:
    """The permutation x (x) y -> y (x) x on K^m (x) K^n."""
    return Matrix(m * n, m * n, [((j * m + i, i * n + j), 1) for i in range(m) for j in range(n)])


def _degrees(*cs: Complex) -> list[int]:
    degs = set()
    for c in cs:
        degs |= set(c.dims)
    return sorted(degs)


# ---------------------------------------------------------------------------
# the three checks

def check_monoid(data: GradedMonoidData) -> Report:
    """Unit, associativity, graded commutativity, and the chain-map property
    of every mu_ij, on every object."""
    rep = Report("monoid")
    top = data.i_max
    for x in data.site.objects:
        eta = Matrix.column_vector(list(data.eta[x]))
        for i in range(top + 1):
            e = data.complex(i, x)
            for a in e.dims:
                rep.checked += 1
                ia = Matrix.identity(e.dim(a))
                if data.mu_block(0, i, x, 0, a) @ kron(eta, ia) != ia or \
                        data.mu_block(i, 0, x, a, 0) @ kron(ia, eta) != ia:
                    rep.fail("unit", x, [i, a])
        for i in range(top + 1):
            for j in range(top + 1 - i):
                ei, ej, eij = data.complex(i, x), data.complex(j, x), data.complex(i + j, x)
                for a in ei.dims:
                    for b in ej.dims:
                        rep.checked += 1
                        m = data.mu_block(i, j, x, a, b)
                        other = data.mu_block(j, i, x, b, a) @ _swap(ei.dim(a), ej.dim(b))
                        if m != (other if (a * b) % 2 == 0 else -other):
                            rep.fail("commutativity", x, [i, j, a, b])
                        lhs = eij.diff(a + b) @ m
                        t = data.mu_block(i, j, x, a, b + 1) @ kron(
                            Matrix.identity(ei.dim(a)), ej.diff(b))
                        rhs = data.mu_block(i, j, x, a + 1, b) @ kron(
                            ei.diff(a), Matrix.identity(ej.dim(b))) + (t if a % 2 == 0 else -t)
                        if lhs != rhs:
                            rep.fail("chain map", x, [i, j, a, b])
                for k in range(top + 1 - i - j):
                    ek = data.complex(k, x)
                    for a in ei.dims:
                        for b in ej.dims:
                            for g in ek.dims:
                                rep.checked += 1
                                ia, ig = Matrix.identity(ei.dim(a)), Matrix.identity(ek.dim(g))
                                lhs = data.mu_block(i + j, k, x, a + b, g) @ kron(
                                    data.mu_block(i, j, x, a, b), ig)
                                rhs = data.mu_block(i, j + k, x, a, b + g) @ kron(
                                    ia, data.mu_block(j, k, x, b, g))
                                if lhs != rhs:
                                    rep.fail("associativity", x, [i, j, k, a, b, g])
    return rep


def _cokernel_projection(pstar: Matrix) -> tuple[int, Matrix]:
    """Quotient of K^rows by the image of pstar, in chosen coordinates."""
    return quotient_data(image_basis(pstar), Subspace.full(pstar.rows))


def _induced(f: ChainMap, hs, ht) -> Matrix:
    return ht.classes @ f.at(hs.degree) @ hs.representatives


def check_stability(data: GradedMonoidData, x: str) -> Report:
    """x -> pi_X(x * c) from H^n(X, E_i) to the reduced group of
    H^{n+1}(X x Gm, E_{i+1}) is bijective for every n and i < i_max."""
    rep = Report("stability")
    if x not in data.site.pairings:
        raise MissingStructure(f"no pairing {x} x Gm")
    xg = data.site.pairings[x]
    cvec = Matrix.column_vector(list(data.c))
    for i in range(data.i_max):
        ex, ex1, exg, exg1 = (data.complex(i, x), data.complex(i + 1, x),
                              data.complex(i, xg), data.complex(i + 1, xg))
        p_i, p_i1 = data.pullback(f"p:{x}", i), data.pullback(f"p:{x}", i + 1)
        q1 = data.pullback(f"q:{x}", 1)
        qc = q1.at(1) @ cvec
        for n in _degrees(ex, ex1, exg, exg1):
            rep.checked += 1
            hx = cohomology(ex, n)
            hx1, hxg1 = cohomology(ex1, n + 1), cohomology(exg1, n + 1)
            pstar = _induced(p_i1, hx1, hxg1)
            red, proj = _cokernel_projection(pstar)
            # x * c computed on the product: p^*(x) . q^*(c)
            reps = p_i.at(n) @ hx.representatives
            prod = data.mu_block(i, 1, xg, n, 1) @ kron(reps, qc)
            m = proj @ hxg1.classes @ prod if hx.dim else Matrix.zeros(red, 0)
            r = rank(m)
            # split sequence 0 -> H^n(X) -> H^n(X x Gm) -> reduced -> 0
            hxg = cohomology(exg, n)
            inj = rank(_induced(p_i, hx, hxg)) == hx.dim
            rep.details.append({"object": x, "n": n, "i": i, "source": hx.dim,
                                "reduced": red, "rank": r, "split_injective": inj})
            if not (r == hx.dim == red):
                rep.fail("stability", x, [n, i])
            if not inj:
                rep.fail("split sequence", x, [n, i])
    return rep


def check_orientation(data: GradedMonoidData) -> Report:
    """u^* of the reduced class of c equals minus that class."""
    rep = Report("orientation")
    if "S" not in data.site.pairings:
        raise MissingStructure("pairing S x Gm")
    e1 = data.complex(1, "Gm")
    es = data.complex(1, "S")
    h1, hs = cohomology(e1, 1), cohomology(es, 1)
    pstar = _induced(data.pullback("p:S", 1), hs, h1)
    red, proj = _cokernel_projection(pstar)
    U = _induced(data.pullback("u", 1), h1, h1)
    rep.checked += 1
    if red and not (proj @ U @ pstar).is_zero():
        rep.fail("u preserves the constant part", "Gm", [1, 1])
    cls = h1.classes @ Matrix.column_vector(list(data.c))
    cbar = proj @ cls
    ucbar = proj @ U @ cls
    rep.details.append({"reduced_dim": red, "cbar": [str(v) for v in cbar.column(0)],
                        "u_cbar": [str(v) for v in ucbar.column(0)]})
    if ucbar != -cbar:
        rep.fail("orientation", "Gm", [1, 1])
    return rep


def check_witnesses(data: GradedMonoidData) -> Report:
    """Record the supplied excision and homotopy witnesses and whether each
    one is a quasi-isomorphism; the other checks are scoped to these."""
    rep = Report("witnesses")
    for name in sorted(data.witnesses):
        rep.checked += 1
        ok = is_quasi_isomorphism(data.witnesses[name])
        rep.details.append({"witness": name, "quasi_isomorphism": ok})
        if not ok:
            rep.fail("witness", name, [])
    return rep


def check_all(data: GradedMonoidData) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "site": data.site.check()}
    out["monoid"] = check_monoid(data).to_json()
    out["stability"] = {x: check_stability(data, x).to_json()
                        for x in sorted(data.site.pairings)}
    try:
        out["orientation"] = check_orientation(data).to_json()
    except MissingStructure as exc:
        out["orientation"] = {"check": "orientation", "passed": False,
                              "missing": str(exc).strip("'")}
    out["witnesses"] = check_witnesses(data).to_json()
    out["passed"] = (not out["site"] and out["monoid"]["passed"]
                     and all(r["passed"] for r in out["stability"].values())
                     and out["orientation"]["passed"] and out["witnesses"]["passed"])
    return out


# ---------------------------------------------------------------------------
# models

def _from_algebras(algs: dict, pairings: dict, pulls: dict, c: Sequence, i_max: int,
                   twist_independent: bool = True) -> GradedMonoidData:
    """E_i(X) = algs[X] for every i, mu_ij = the algebra product."""
    E, mu, pull = {}, {}, {}
    for x, A in algs.items():
        for i in range(i_max + 1):
            E[(i, x)] = A.complex
        for i in range(i_max + 1):
            for j in range(i_max + 1 - i):
                mu[(i, j, x)] = dict(A.products)
    for name, f in pulls.items():
        for i in range(i_max + 1):
            pull[(name, i)] = f
    eta = {x: list(A.unit) for x, A in algs.items()}
    return GradedMonoidData(TestSite(list(algs), dict(pairings)), i_max, E, eta, mu,
                            [Fraction(v) for v in c], pull)


def constant_model(i_max: int = 2) -> GradedMonoidData:
    """E_i = K on the point, mu = identity, eta = identity."""
    k = GradedAlgebra.field()
    return _from_algebras({"S": k}, {}, {}, [], i_max)


def cubic_algebra() -> GradedAlgebra:
    """K[t]/(t^3 - t) in the basis 1, t, t^2: functions on three points."""
    return GradedAlgebra.from_table(3, {(0, 0): [1, 0, 0], (0, 1): [0, 1, 0], (0, 2): [0, 0, 1],
                                        (1, 1): [0, 0, 1], (1, 2): [0, 1, 0], (2, 2): [0, 0, 1]},
                                    [1, 0, 0])


def derham_toy(i_max: int = 2, with_y: bool = True) -> GradedMonoidData:
    """Log de Rham algebras on S, Gm, Gm x Gm and three points Y.

    E(Gm) is the exterior algebra on c = dlog T, the inverse sends dlog T
    to -dlog T, and products are the usual wedge products."""
    k = GradedAlgebra.field()
    g = GradedAlgebra.exterior(1)
    algs = {"S": k, "Gm": g}
    pairings = {"S": "Gm", "Gm": "Gm×Gm"}
    gg = tensor_algebra(g, g)
    algs["Gm×Gm"] = gg
    pg, qg = tensor_inclusions(g, g, gg)
    unit_gm = ChainMap(k.complex, g.complex, {0: Matrix.identity(1)})
    pulls = {"p:S": unit_gm, "q:S": ChainMap.identity(g.complex),
             "p:Gm": pg, "q:Gm": qg,
             "u": ChainMap(g.complex, g.complex, {0: Matrix.identity(1), 1: Matrix.scalar(1, -1)}),
             "s1": ChainMap(g.complex, k.complex, {0: Matrix.identity(1), 1: Matrix.zeros(0, 1)})}
    if with_y:
        y = cubic_algebra()
        yg = tensor_algebra(y, g)
        algs["Y"], algs["Y×Gm"] = y, yg
        pairings["Y"] = "Y×Gm"
        py, qy = tensor_inclusions(y, g, yg)
        pulls["p:Y"], pulls["q:Y"] = py, qy
    return _from_algebras(algs, pairings, pulls, [1], i_max)


PERTURBATIONS = ("unit", "mu", "orientation")


def perturb(data: GradedMonoidData, kind: str) -> GradedMonoidData:
    """Single-diagram negative controls.

    unit: eta doubled on Y.  mu: t^2 . t^2 = -t^2 on Y (twists 1, 1).
    orientation: u^* = identity on E_1(Gm)."""
    out = copy.copy(data)
    if kind == "unit":
        out.eta = dict(data.eta)
        x = "Y" if "Y" in data.eta else "S"
        out.eta[x] = [2 * v for v in data.eta[x]]
    elif kind == "mu":
        if "Y" not in data.site.objects:
            raise MissingStructure("object Y")
        out.mu = dict(data.mu)
        blocks = dict(data.mu[(1, 1, "Y")])
        m = blocks[(0, 0)]
        # column of t^2 (x) t^2 is 2 * 3 + 2
        entries = [((r, c), (-v if c == 8 else v)) for (r, c), v in m.items()]
        blocks[(0, 0)] = Matrix(m.rows, m.cols, entries)
        out.mu[(1, 1, "Y")] = blocks
    elif kind == "orientation":
        out.pull = dict(data.pull)
        out.pull[("u", 1)] = ChainMap.identity(data.complex(1, "Gm"))
    else:
        raise ValueError(f"unknown perturbation {kind!r}; expected one of {PERTURBATIONS}")
    return out


MODELS = {"derham-toy": derham_toy, "constant": constant_model}
