"""Syntomic cohomology from data packages.

A package bundles the rigid complex of the special fiber with its
Frobenius, the rigid complex with K-coefficients, the Hodge filtration of
the de Rham complex of the generic fiber and the specialization map.  From
it we compute the two-term cone model, the zigzag homotopy limit, the long
exact sequence with absolute rigid cohomology and the localization
sequence.  Curated packages and a small hypercover assembler for curves
with nodes live at the bottom of the file.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cochain import (ChainMap, Complex, ExactSequenceReport, FenceArrow,
                      FenceDiagram, SequenceSlot, betti, block_map,
                      direct_sum_complex, fiber, holim_fence, induced_map,
                      is_quasi_isomorphism, les_of_cone)
from .fisoc import (DEFAULT_PRIME, FrobComplex, _random_invertible, frobenius_cone,
                    minimal_model, random_frob_complex)
from .linalg import Matrix, block, inverse, kernel_basis, rank

SCHEMA_VERSION = 1


class PackageError(ValueError):
    pass


class MissingFiltration(PackageError):
    pass


class MissingNodes(PackageError):
    pass


class BlockUnknown(PackageError):
    pass


class SimplicialIdentityViolation(PackageError):
    pass


class UnknownExample(KeyError):
    pass


# ---------------------------------------------------------------------------
# packages

@dataclass
class Zigzag:
    """Intermediate nodes of the syntomic zigzag.

    a: rigid complex of the special fiber relative to a lift, with
    comparisons a -> rigK and a -> b; b: de Rham complex of the tube;
    c: de Rham dga of the generic fiber with sp-type map c -> b and a
    comparison c -> d; d: the second de Rham model, receiving every
    filtration step through ``fdr_d[i]``."""
    a: Complex
    b: Complex
    c: Complex
    d: Complex
    a_rigK: ChainMap
    a_b: ChainMap
    c_b: ChainMap
    c_d: ChainMap
    fdr_d: dict

    COMPARISONS = ("a_rigK", "a_b", "c_d")

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "c": self.c.to_json(),
                "d": self.d.to_json(),
                **{k: getattr(self, k).to_json() for k in ("a_rigK", "a_b", "c_b", "c_d")},
                "fdr_d": {str(i): m.to_json() for i, m in sorted(self.fdr_d.items())}}

    @classmethod
    def from_json(cls, obj: dict, rigK: Complex, fdr: dict) -> "Zigzag":
        a, b, c, d = (Complex.from_json(obj[k]) for k in "abcd")
        return cls(a, b, c, d,
                   ChainMap.from_json(obj["a_rigK"], a, rigK),
                   ChainMap.from_json(obj["a_b"], a, b),
                   ChainMap.from_json(obj["c_b"], c, b),
                   ChainMap.from_json(obj["c_d"], c, d),
                   {int(i): ChainMap.from_json(m, fdr[int(i)], d)
                    for i, m in obj["fdr_d"].items()})


class SyntomicPackage:
    """Input data for syntomic cohomology.

    ``fdr[i]`` is F^i of the de Rham complex (``fdr[0]`` is the whole
    complex), ``trans[i]`` the map F^{i+1} -> F^i."""

    def __init__(self, rig: FrobComplex, rigK: Complex, bc: ChainMap, fdr: dict,
                 trans: dict, sp: ChainMap, zigzag: Zigzag | None = None,
                 name: str = "", check: bool = True):
        self.rig = rig
        self.rigK = rigK
        self.bc = bc
        self.fdr = dict(fdr)
        self.trans = dict(trans)
        self.sp = sp
        self.zigzag = zigzag
        self.name = name
        if check:
            self.check()

    @property
    def prime(self) -> int:
        return self.rig.prime

    @property
    def dR(self) -> Complex:
        return self.fdr[0]

    def filtration(self, i: int) -> Complex:
        if i <= 0:
            return self.dR
        if i not in self.fdr:
            raise MissingFiltration(f"F^{i} is not part of the package")
        return self.fdr[i]

    def incl(self, i: int) -> ChainMap:
        """F^i -> F^0 as the composite of the transition maps."""
        f = ChainMap.identity(self.filtration(i))
        for k in range(i - 1, -1, -1):
            f = self.trans[k] @ f
        return f

    def window(self) -> tuple[int, int]:
        """Degrees where syntomic cohomology can be nonzero."""
        cs = [self.rig.complex, self.rigK] + list(self.fdr.values())
        sup = [c.support for c in cs if c.dims]
        if not sup:
            return (0, 0)
        return (min(s[0] for s in sup), max(s[1] for s in sup) + 1)

    def check(self) -> None:
        if 0 not in self.fdr:
            raise MissingFiltration("F^0 (the de Rham complex) is required")
        if self.bc.source != self.rig.complex or self.bc.target != self.rigK:
            raise PackageError("bc must map rig to rigK")
        if self.sp.source != self.dR or self.sp.target != self.rigK:
            raise PackageError("sp must map dR to rigK")
        for m in (self.bc, self.sp):
            m.check()
        for i in sorted(self.fdr):
            if i == 0:
                continue
            t = self.trans.get(i - 1)
            if t is None or t.source != self.fdr[i] or t.target != self.fdr[i - 1]:
                raise PackageError(f"missing or mismatched transition F^{i} -> F^{i - 1}")
            t.check()
            for n in self.fdr[i].degrees():
                h = induced_map(t, n)
                if rank(h) != h.cols:
                    raise PackageError(f"F^{i} -> F^{i - 1} not injective on H^{n}")
        z = self.zigzag
        if z is not None:
            for k in ("a_rigK", "a_b", "c_b", "c_d"):
                getattr(z, k).check()
            if z.a_rigK.target != self.rigK:
                raise PackageError("zigzag: a -> rigK has the wrong target")
            for k in Zigzag.COMPARISONS:
                if not is_quasi_isomorphism(getattr(z, k)):
                    raise PackageError(f"zigzag comparison {k} is not a quasi-isomorphism")
            for i, m in z.fdr_d.items():
                if m.source != self.filtration(i) or m.target != z.d:
                    raise PackageError(f"zigzag: F^{i} -> d mismatched")
                m.check()

    def __repr__(self) -> str:
        return f"SyntomicPackage({self.name or 'unnamed'}, p={self.prime})"

    def to_json(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION, "name": self.name, "prime": self.prime,
               "rig": self.rig.to_json(), "rigK": self.rigK.to_json(),
               "bc": self.bc.to_json(),
               "fdr": {str(i): c.to_json() for i, c in sorted(self.fdr.items())},
               "trans": {str(i): m.to_json() for i, m in sorted(self.trans.items())},
               "sp": self.sp.to_json()}
        if self.zigzag is not None:
            out["zigzag"] = self.zigzag.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SyntomicPackage":
        version = obj.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise PackageError(f"unsupported schema_version {version}")
        rig = FrobComplex.from_json(obj["rig"])
        rig.prime = obj.get("prime", rig.prime)
        rigK = Complex.from_json(obj["rigK"])
        fdr = {int(i): Complex.from_json(c) for i, c in obj["fdr"].items()}
        trans = {int(i): ChainMap.from_json(m, fdr[int(i) + 1], fdr[int(i)])
                 for i, m in obj.get("trans", {}).items()}
        bc = ChainMap.from_json(obj["bc"], rig.complex, rigK)
        sp = ChainMap.from_json(obj["sp"], fdr[0], rigK)
        zz = obj.get("zigzag")
        zigzag = Zigzag.from_json(zz, rigK, fdr) if zz else None
        return cls(rig, rigK, bc, fdr, trans, sp, zigzag, obj.get("name", ""))


def identity_zigzag(pkg: SyntomicPackage) -> Zigzag:
    """Intermediate nodes equal to rigK and dR with identity comparisons."""
    rigK, dR = pkg.rigK, pkg.dR
    return Zigzag(rigK, rigK, dR, dR, ChainMap.identity(rigK), ChainMap.identity(rigK),
                  pkg.sp, ChainMap.identity(dR), {i: pkg.incl(i) for i in pkg.fdr})


# ---------------------------------------------------------------------------
# the cone model

def syntomic_map(pkg: SyntomicPackage, i: int, besser: bool = False) -> ChainMap:
    """f(x, y) = (x - phi(x)/p^i, sp(y) - bc(x)) on rig + F^i -> rig + rigK.

    With ``besser`` the first entry is phi(x) - p^i x instead."""
    r = pkg.rig.complex
    fi = pkg.filtration(i)
    g = frobenius_cone(pkg.rig, i, besser)
    return block_map([r, fi], [r, pkg.rigK],
                     [[g, None], [pkg.bc.scale(-1), pkg.sp @ pkg.incl(i)]])


def syntomic_complex(pkg: SyntomicPackage, i: int, besser: bool = False) -> Complex:
    """The fiber of the syntomic map; H^n of it is H^{n-1}(Cone f)."""
    return fiber(syntomic_map(pkg, i, besser))


def _degrees(pkg: SyntomicPackage, degrees) -> list[int]:
    if degrees is None:
        lo, hi = pkg.window()
        return list(range(lo, hi + 1))
    return list(degrees)


def syntomic_cone(pkg: SyntomicPackage, i: int, degrees: Sequence[int] | None = None,
                  besser: bool = False) -> dict[int, int]:
    """dim H^n_syn(i) for n in ``degrees`` (default: the package window)."""
    c = syntomic_complex(pkg, i, besser)
    return {n: betti(c, n) for n in _degrees(pkg, degrees)}


# ---------------------------------------------------------------------------
# the zigzag

def syntomic_fence(pkg: SyntomicPackage, i: int) -> FenceDiagram:
    """The zigzag as a fence.

    Bottom: rig, a, c, F^i.  Top: rig, rigK, b, d.  The two copies of rig
    joined by an equality in the usual picture are one node here, carrying
    both id and phi/p^i into the first top node."""
    z = pkg.zigzag
    if z is None:
        raise MissingNodes("package has no zigzag nodes")
    if i not in z.fdr_d and max(i, 0) not in z.fdr_d:
        raise MissingNodes(f"no map F^{i} -> d in the zigzag")
    r = pkg.rig.complex
    fi = pkg.filtration(i)
    p_i = Fraction(pkg.prime) ** i
    arrows = [
        FenceArrow(0, 0, ChainMap.identity(r), "right"),
        FenceArrow(0, 0, pkg.rig.phi.scale(1 / p_i), "left"),
        FenceArrow(0, 1, pkg.bc, "right"),
        FenceArrow(1, 1, z.a_rigK, "left"),
        FenceArrow(1, 2, z.a_b, "right"),
        FenceArrow(2, 2, z.c_b, "left"),
        FenceArrow(2, 3, z.c_d, "right"),
        FenceArrow(3, 3, z.fdr_d[max(i, 0)], "left"),
    ]
    return FenceDiagram([r, z.a, z.c, fi], [r, pkg.rigK, z.b, z.d], arrows)


def syntomic_holim(pkg: SyntomicPackage, i: int,
                   degrees: Sequence[int] | None = None) -> dict[int, int]:
    """Cohomology of the homotopy limit of the zigzag, indexed like H^n_syn."""
    c = holim_fence(syntomic_fence(pkg, i))
    return {n: betti(c, n) for n in _degrees(pkg, degrees)}


# ---------------------------------------------------------------------------
# long exact sequences

def phi_fiber(pkg: SyntomicPackage, i: int) -> Complex:
    """Fib(id - phi/p^i) on rig: the absolute rigid complex."""
    return fiber(frobenius_cone(pkg.rig, i))


def _phi_to_rigK(pkg: SyntomicPackage, i: int) -> ChainMap:
    """a_0: Fib(id - phi/p^i) -> rigK, (x, u) -> bc(x)."""
    phi = phi_fiber(pkg, i)
    r = pkg.rig.complex
    f = {n: block([[pkg.bc.at(n), None]], [pkg.rigK.dim(n)], [r.dim(n), r.dim(n - 1)])
         for n in set(phi.dims) | set(pkg.rigK.dims)}
    return ChainMap(phi, pkg.rigK, f)


def absolute_difference(pkg: SyntomicPackage, i: int) -> ChainMap:
    """a - b: Fib(id - phi/p^i) + F^i -> rigK, ((x, u), y) -> bc(x) - sp(y)."""
    a0 = _phi_to_rigK(pkg, i)
    fi = pkg.filtration(i)
    b = pkg.sp @ pkg.incl(i)
    return block_map([a0.source, fi], [pkg.rigK], [[a0, b.scale(-1)]])


def _relabel_cone(rep: ExactSequenceReport, label: str) -> ExactSequenceReport:
    """Cone slots in degree n hold H^{n+1} of the fiber; rename them."""
    slots = [SequenceSlot(label, s.degree + 1, s.dim) if k % 3 == 2 else s
             for k, s in enumerate(rep.slots)]
    return ExactSequenceReport(slots, rep.maps)


def syntomic_les(pkg: SyntomicPackage, i: int, form: str = "absolute",
                 degrees: Sequence[int] | None = None) -> ExactSequenceReport:
    """The long exact sequence of syntomic cohomology.

    ``absolute``: H_syn^n -> H_phi^n + F^iH^n_dR -> H^n_rig,K -> H_syn^{n+1}.
    ``cone``: H^n(rig + F^i) -> H^n(rig + rigK) -> H_syn^{n+1} -> ..."""
    if degrees is None:
        lo, hi = pkg.window()
        degrees = range(lo - 1, hi + 1)
    if form == "absolute":
        f = absolute_difference(pkg, i)
        rep = les_of_cone(f, degrees, ("phi+fdr", "rigK", "syn"))
    elif form == "cone":
        f = syntomic_map(pkg, i)
        rep = les_of_cone(f, degrees, ("rig+fdr", "rig+rigK", "syn"))
    else:
        raise ValueError(f"unknown sequence form {form!r}")
    return _relabel_cone(rep, "syn")


def syntomic_via_absolute(pkg: SyntomicPackage, i: int,
                          degrees: Sequence[int] | None = None) -> dict[int, int]:
    """H^n of Fib(a - b); agrees with syntomic_cone."""
    c = fiber(absolute_difference(pkg, i))
    return {n: betti(c, n) for n in _degrees(pkg, degrees)}


# ---------------------------------------------------------------------------
# localization

def exceptional_fiber(rig: FrobComplex, i: int, rigK: Complex | None = None,
                      bc: ChainMap | None = None) -> Complex:
    """Fib(a_0: Fib(id - phi/p^i) -> rigK), the special-fiber term."""
    rigK = rig.complex if rigK is None else rigK
    bc = ChainMap.identity(rig.complex) if bc is None else bc
    pkg = SyntomicPackage(rig, rigK, bc, {0: Complex.zero()}, {},
                          ChainMap.zero(Complex.zero(), rigK), check=False)
    return fiber(_phi_to_rigK(pkg, i))


def _iota(pkg: SyntomicPackage, i: int, e: Complex, syn: Complex) -> ChainMap:
    """(x, u, w) -> ((x, 0), (u, -w)) from the special-fiber term into Syn."""
    r, rk, fi = pkg.rig.complex, pkg.rigK, pkg.filtration(i)
    f = {}
    for n in set(e.dims) | set(syn.dims):
        a, bb, c = r.dim(n), r.dim(n - 1), rk.dim(n - 1)
        grid = [[Matrix.identity(a), None, None],
                [None, None, None],
                [None, Matrix.identity(bb), None],
                [None, None, Matrix.scalar(c, -1)]]
        f[n] = block(grid, [a, fi.dim(n), bb, c], [a, bb, c])
    return ChainMap(e, syn, f)


def _alpha(pkg: SyntomicPackage, i: int, syn: Complex) -> ChainMap:
    """Syn -> F^i, ((x, y), t) -> y."""
    r, rk, fi = pkg.rig.complex, pkg.rigK, pkg.filtration(i)
    f = {}
    for n in set(syn.dims) | set(fi.dims):
        f[n] = block([[None, Matrix.identity(fi.dim(n)), None, None]], [fi.dim(n)],
                     [r.dim(n), fi.dim(n), r.dim(n - 1), rk.dim(n - 1)])
    return ChainMap(syn, fi, f)


@dataclass
class LocalizationReport:
    twist: int
    special: dict             # n -> dim H^n_{syn,s}
    syn: dict                 # n -> dim H^n_syn
    fdr: dict                 # n -> dim F^iH^n_dR
    delta_rank: dict          # n -> rank of F^iH^n_dR -> H^{n+1}_{syn,s}
    iota_quasi_iso: bool
    sequence: ExactSequenceReport

    @property
    def exact(self) -> bool:
        return self.sequence.exact and self.iota_quasi_iso

    def to_json(self) -> dict:
        return {"twist": self.twist,
                "syn_s": {str(k): v for k, v in sorted(self.special.items())},
                "syn": {str(k): v for k, v in sorted(self.syn.items())},
                "fdr": {str(k): v for k, v in sorted(self.fdr.items())},
                "delta_rank": {str(k): v for k, v in sorted(self.delta_rank.items())},
                "iota_quasi_iso": self.iota_quasi_iso, "exact": self.exact}


def localization(pkg: SyntomicPackage, i: int,
                 degrees: Sequence[int] | None = None) -> LocalizationReport:
    """The special-fiber term, its map to Syn and the sequence
    H_{syn,s}^n -> H_syn^n -> F^iH^n_dR -> H_{syn,s}^{n+1}."""
    degs = _degrees(pkg, degrees)
    e = fiber(_phi_to_rigK(pkg, i))
    syn = syntomic_complex(pkg, i)
    iota = _iota(pkg, i, e, syn)
    alpha = _alpha(pkg, i, syn)
    # iota lands in ker(alpha) and is a quasi-isomorphism onto Fib(alpha)
    fib_alpha = fiber(alpha)
    into_fib = ChainMap(e, fib_alpha, {
        n: block([[iota.at(n)], [None]], [syn.dim(n), pkg.filtration(i).dim(n - 1)],
                 [e.dim(n)]) for n in set(e.dims) | set(fib_alpha.dims)})
    seq = les_of_cone(alpha, range(degs[0] - 1, degs[-1] + 1), ("syn", "fdr", "syn_s"))
    seq = _relabel_cone(seq, "syn_s")
    delta = {}
    for k, s in enumerate(seq.slots):
        if s.label == "fdr" and k < len(seq.maps):
            delta[s.degree] = rank(seq.maps[k])
    fi = pkg.filtration(i)
    return LocalizationReport(
        i, {n: betti(e, n) for n in degs}, {n: betti(syn, n) for n in degs},
        {n: betti(fi, n) for n in degs}, {n: delta.get(n, 0) for n in degs},
        is_quasi_isomorphism(into_fib), seq)


# ---------------------------------------------------------------------------
# randomized packages and resolutions

def fatten(c: Complex, rng: random.Random, pairs: int = 1) -> tuple[Complex, ChainMap, ChainMap]:
    """A quasi-isomorphic complex c' = P(c + acyclic)P^-1 with maps
    inc: c -> c' and pr: c' -> c, pr inc = id."""
    lo, hi = c.support if c.dims else (0, 0)
    extra: dict[int, int] = {}
    starts = [rng.randint(lo - 1, hi) for _ in range(pairs)]
    for s in starts:
        extra[s] = extra.get(s, 0) + 1
        extra[s + 1] = extra.get(s + 1, 0) + 1
    degs = set(c.dims) | set(extra)
    # acyclic part in degree n: [sources of pairs starting at n | targets from n-1]
    src = {n: starts.count(n) for n in degs | {n - 1 for n in degs}}
    acyc_dims = {n: src.get(n, 0) + src.get(n - 1, 0) for n in degs}
    acyc_d = {}
    for n in degs:
        a_n, a_m = acyc_dims.get(n, 0), acyc_dims.get(n + 1, 0)
        entries = [((src.get(n + 1, 0) + k, k), 1) for k in range(src.get(n, 0))]
        acyc_d[n] = Matrix(a_m, a_n, entries)
    acyc = Complex(acyc_dims, acyc_d)
    big = direct_sum_complex(c, acyc)
    P = {n: _random_invertible(rng, big.dim(n)) for n in big.dims}
    Pinv = {n: inverse(m) for n, m in P.items()}
    d = {n: P.get(n + 1, Matrix.identity(big.dim(n + 1))) @ big.diff(n) @ Pinv[n]
         for n in big.dims}
    out = Complex(big.dims, d)
    inc = ChainMap(c, out, {n: P[n] @ block([[Matrix.identity(c.dim(n))], [None]],
                                           [c.dim(n), acyc.dim(n)], [c.dim(n)])
                            for n in big.dims})
    pr = ChainMap(out, c, {n: block([[Matrix.identity(c.dim(n)), None]], [c.dim(n)],
                                    [c.dim(n), acyc.dim(n)]) @ Pinv[n]
                           for n in big.dims})
    return out, inc, pr


def fatten_package(pkg: SyntomicPackage, rng: random.Random) -> SyntomicPackage:
    """Replace every complex by a fattened resolution and transport the maps."""
    r2, ri, rp = fatten(pkg.rig.complex, rng)
    k2, ki, kp = fatten(pkg.rigK, rng)
    fat = {i: fatten(c, rng) for i, c in pkg.fdr.items()}
    rig = FrobComplex(r2, ri @ pkg.rig.phi @ rp, pkg.prime)
    fdr = {i: f[0] for i, f in fat.items()}
    trans = {i: fat[i][1] @ t @ fat[i + 1][2] for i, t in pkg.trans.items()}
    out = SyntomicPackage(rig, k2, ki @ pkg.bc @ rp, fdr, trans, ki @ pkg.sp @ fat[0][2],
                          None, pkg.name, check=False)
    if pkg.zigzag is not None:
        out.zigzag = identity_zigzag(out)
    out.check()
    return out


def resolve_node(pkg: SyntomicPackage, node: str, rng: random.Random) -> SyntomicPackage:
    """Replace one zigzag node by a fattened quasi-isomorphic complex."""
    z = pkg.zigzag
    if z is None:
        raise MissingNodes("package has no zigzag nodes")
    if node not in "abcd" or len(node) != 1:
        raise ValueError(f"unknown zigzag node {node!r}")
    new, inc, pr = fatten(getattr(z, node), rng)
    kw = dict(a=z.a, b=z.b, c=z.c, d=z.d, a_rigK=z.a_rigK, a_b=z.a_b, c_b=z.c_b,
              c_d=z.c_d, fdr_d=dict(z.fdr_d))
    kw[node] = new
    if node == "a":
        kw["a_rigK"], kw["a_b"] = z.a_rigK @ pr, z.a_b @ pr
    elif node == "b":
        kw["a_b"], kw["c_b"] = inc @ z.a_b, inc @ z.c_b
    elif node == "c":
        kw["c_b"], kw["c_d"] = z.c_b @ pr, z.c_d @ pr
    else:
        kw["c_d"] = inc @ z.c_d
        kw["fdr_d"] = {i: inc @ m for i, m in z.fdr_d.items()}
    return SyntomicPackage(pkg.rig, pkg.rigK, pkg.bc, pkg.fdr, pkg.trans, pkg.sp,
                           Zigzag(**kw), pkg.name)


def _random_cycles(rng: random.Random, c: Complex, n: int, count: int) -> Matrix:
    """``count`` random cocycles of c in degree n as columns."""
    z = kernel_basis(c.diff(n)).basis
    cols = []
    for _ in range(count):
        coeff = [rng.randint(-2, 2) for _ in range(z.cols)]
        cols.append(z.apply(coeff) if z.cols else [Fraction(0)] * c.dim(n))
    return Matrix.from_columns(cols, c.dim(n))


def random_package(rng: random.Random, prime: int = DEFAULT_PRIME, max_dim: int = 4,
                   filtration: int = 2, fattened: bool = True) -> SyntomicPackage:
    """A random valid package with dims at most ``max_dim`` per degree."""
    rig = random_frob_complex(rng, prime, max_dim=max_dim, max_width=3)
    rigK = rig.complex
    lo, hi = rigK.support if rigK.dims else (0, 0)
    dr_dims = {n: rng.randint(0, max_dim - 1) for n in range(lo, hi + 1)}
    dR = Complex(dr_dims)
    sp = ChainMap(dR, rigK, {n: _random_cycles(rng, rigK, n, dR.dim(n)) for n in dR.dims})
    fdr, trans = {0: dR}, {}
    cur = dict(dr_dims)
    for i in range(1, filtration + 1):
        cur = {n: rng.randint(0, k) for n, k in cur.items()}
        fdr[i] = Complex(cur)
        trans[i - 1] = ChainMap(fdr[i], fdr[i - 1], {
            n: Matrix(fdr[i - 1].dim(n), k, [((j, j), 1) for j in range(k)])
            for n, k in cur.items()})
    pkg = SyntomicPackage(rig, rigK, ChainMap.identity(rigK), fdr, trans, sp, name="random")
    pkg.zigzag = identity_zigzag(pkg)
    return fatten_package(pkg, rng) if fattened else pkg


# ---------------------------------------------------------------------------
# hypercovers

BLOCKS = {
    "point": {0: 1},
    "P1": {0: 1, 2: 1},
}


def block_complex(name: str, prime: int = DEFAULT_PRIME) -> FrobComplex:
    """Rigid cohomology of a building block: phi = p^(q/2) on H^q."""
    if name not in BLOCKS:
        raise BlockUnknown(f"unknown building block {name!r}")
    return FrobComplex.from_cohomology(
        {q: [[Fraction(prime) ** (q // 2)]] for q in BLOCKS[name]}, prime)


def _pullback(target: str, source: str, q: int) -> Matrix:
    """H^q(target) -> H^q(source) along a map source -> target."""
    rows, cols = BLOCKS[source].get(q, 0), BLOCKS[target].get(q, 0)
    if rows and cols and (q == 0 or source == target):
        return Matrix.identity(rows)
    return Matrix.zeros(rows, cols)


@dataclass
class HypercoverData:
    """Levels Y_0, Y_1, ... as lists of block names and face maps
    ``faces[(p, j)]`` sending block k of Y_p to block faces[(p, j)][k] of
    Y_{p-1}.  Blocks listed in ``degenerate`` are dropped from the
    normalized Cech complex."""
    levels: list
    faces: dict
    degenerate: set = field(default_factory=set)
    prime: int = DEFAULT_PRIME

    def check(self) -> None:
        for p, lvl in enumerate(self.levels):
            for name in lvl:
                if name not in BLOCKS:
                    raise BlockUnknown(f"unknown building block {name!r}")
        for p in range(1, len(self.levels)):
            for j in range(p + 1):
                f = self.faces.get((p, j))
                if f is None or len(f) != len(self.levels[p]):
                    raise SimplicialIdentityViolation(f"face d_{j} on Y_{p} missing")
                for k, t in enumerate(f):
                    if not 0 <= t < len(self.levels[p - 1]):
                        raise SimplicialIdentityViolation(f"d_{j} on Y_{p}: bad target {t}")
                    src, tgt = self.levels[p][k], self.levels[p - 1][t]
                    if src == "P1" and tgt == "point":
                        continue
                    if src != tgt and src != "point":
                        raise SimplicialIdentityViolation(
                            f"d_{j} on Y_{p}: no map {src} -> {tgt}")
        # d_i d_j = d_{j-1} d_i for i < j
        for p in range(2, len(self.levels)):
            for j in range(p + 1):
                for i in range(j):
                    for k in range(len(self.levels[p])):
                        lhs = self.faces[(p - 1, i)][self.faces[(p, j)][k]]
                        rhs = self.faces[(p - 1, j - 1)][self.faces[(p, i)][k]]
                        if lhs != rhs:
                            raise SimplicialIdentityViolation(
                                f"d_{i} d_{j} != d_{j - 1} d_{i} on block {k} of Y_{p}")

    def to_json(self) -> dict:
        return {"levels": self.levels,
                "faces": [[p, j, f] for (p, j), f in sorted(self.faces.items())],
                "degenerate": sorted([list(x) for x in self.degenerate]),
                "prime": self.prime}

    @classmethod
    def from_json(cls, obj: dict) -> "HypercoverData":
        return cls([list(l) for l in obj["levels"]],
                   {(p, j): list(f) for p, j, f in obj["faces"]},
                   {tuple(x) for x in obj.get("degenerate", [])},
                   obj.get("prime", DEFAULT_PRIME))


def hypercover_assemble(h: HypercoverData) -> FrobComplex:
    """Totalize E_1^{p,q} = H^q(Y_p) with Cech differentials sum (-1)^j d_j^*
    and return the minimal model with the induced Frobenius."""
    h.check()
    keep = {p: [k for k in range(len(lvl)) if (p, k) not in h.degenerate]
            for p, lvl in enumerate(h.levels)}
    qs = sorted({q for lvl in h.levels for name in lvl for q in BLOCKS[name]})
    # coordinates of E^{p,q}: kept blocks of Y_p having H^q
    coords = {(p, q): [k for k in keep[p] if q in BLOCKS[h.levels[p][k]]]
              for p in keep for q in qs}
    tot_dims: dict[int, int] = {}
    offset: dict[tuple[int, int], int] = {}
    for (p, q), ks in sorted(coords.items(), key=lambda t: (sum(t[0]), t[0])):
        n = p + q
        offset[(p, q)] = tot_dims.get(n, 0)
        tot_dims[n] = tot_dims.get(n, 0) + len(ks)
    d: dict[int, dict] = {}
    phi: dict[int, list] = {n: [] for n in tot_dims}
    for (p, q), ks in coords.items():
        n = p + q
        for a, k in enumerate(ks):
            phi[n].append(((offset[(p, q)] + a, offset[(p, q)] + a),
                           Fraction(h.prime) ** (q // 2)))
        if (p + 1, q) not in coords:
            continue
        tgt = coords[(p + 1, q)]
        for b, kk in enumerate(tgt):
            for j in range(p + 2):
                src_block = h.faces[(p + 1, j)][kk]
                if src_block not in ks:
                    continue
                a = ks.index(src_block)
                v = _pullback(h.levels[p][src_block], h.levels[p + 1][kk], q)
                if not v.is_zero():
                    key = (offset[(p + 1, q)] + b, offset[(p, q)] + a)
                    row = d.setdefault(n, {})
                    row[key] = row.get(key, 0) + (-1) ** j
    diffs = {n: Matrix(tot_dims.get(n + 1, 0), tot_dims[n], list(d.get(n, {}).items()))
             for n in tot_dims}
    c = Complex(tot_dims, diffs)
    phis = {n: Matrix(tot_dims[n], tot_dims[n], e) for n, e in phi.items()}
    return minimal_model(FrobComplex(c, ChainMap(c, c, phis), h.prime))


def nodal_cubic_hypercover(prime: int = DEFAULT_PRIME) -> HypercoverData:
    """Y_0 = x0 + P1, Y_1 = the two preimages of the node; d_0 goes to x0
    and d_1 to the normalization."""
    return HypercoverData([["point", "P1"], ["point", "point"]],
                          {(1, 0): [0, 0], (1, 1): [1, 1]}, prime=prime)


# ---------------------------------------------------------------------------
# builtin examples

def gm(prime: int = DEFAULT_PRIME) -> FrobComplex:
    return FrobComplex.from_cohomology({0: [[1]], 1: [[prime]]}, prime)


def p1(prime: int = DEFAULT_PRIME) -> FrobComplex:
    return block_complex("P1", prime)


def elliptic_mult(prime: int = DEFAULT_PRIME) -> SyntomicPackage:
    """Elliptic curve with split multiplicative reduction: special fiber G_m,
    de Rham of the generic fiber with F^1H^1 = K and F^1H^2 = K = H^2."""
    rig = gm(prime)
    rigK = rig.complex
    dR = Complex({0: 1, 1: 2, 2: 1})
    f1 = Complex({1: 1, 2: 1})
    trans = ChainMap(f1, dR, {1: Matrix.from_rows([[1], [0]]), 2: Matrix.identity(1)})
    sp = ChainMap(dR, rigK, {0: Matrix.identity(1), 1: Matrix.from_rows([[1, 0]]),
                             2: Matrix.zeros(0, 1)})
    pkg = SyntomicPackage(rig, rigK, ChainMap.identity(rigK), {0: dR, 1: f1}, {0: trans},
                          sp, name="elliptic-mult")
    pkg.zigzag = identity_zigzag(pkg)
    return pkg


def trivial_package(prime: int = DEFAULT_PRIME) -> SyntomicPackage:
    z = Complex.zero()
    rig = FrobComplex(z, ChainMap.identity(z), prime)
    pkg = SyntomicPackage(rig, z, ChainMap.identity(z), {0: z, 1: z},
                          {0: ChainMap.identity(z)}, ChainMap.identity(z), name="trivial")
    pkg.zigzag = identity_zigzag(pkg)
    return pkg


def nodal_cubic(prime: int = DEFAULT_PRIME) -> FrobComplex:
    return hypercover_assemble(nodal_cubic_hypercover(prime))


EXAMPLES = {
    "gm": ("rigid cohomology of the multiplicative group", gm),
    "p1": ("rigid cohomology of the projective line", p1),
    "elliptic-mult": ("syntomic package of an elliptic curve with split "
                      "multiplicative reduction", elliptic_mult),
    "nodal-cubic": ("rigid cohomology of a nodal cubic from its hypercover "
                    "(singular case, see README)", nodal_cubic),
}


def builtin_example(name: str, prime: int = DEFAULT_PRIME):
    if name not in EXAMPLES:
        raise UnknownExample(name)
    return EXAMPLES[name][1](prime)
