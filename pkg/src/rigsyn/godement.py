"""Godement bar resolutions for sheaves on finite posets.

A finite poset P is a topological space whose opens are the up-sets.  We
write x <= y when x lies in the closure of y, so the smallest open containing
x is the up-set of x and the stalk of F at x is F(up(x)).  A sheaf is a
functor on P: a stalk F_x per point and restrictions rho(x, y): F_x -> F_y
for x <= y.

With u the map from the discrete set of points, sections of (u_* u^*)^k F
over an open U are indexed by multichains y_1 <= ... <= y_k with y_1 in U,
each carrying a vector of F_{y_k}.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .algebra import GradedAlgebra, algebra_violations
from .cochain import ChainMap, Complex, direct_sum_complex, induced_map
from .cosimplicial import (CosimplicialDGA, CosimplicialModule, simple_complex_dga,
                           simple_differential, validate)
from .linalg import Matrix, inverse, kernel_basis, rank


class FiniteSite:
    def __init__(self, points: Sequence, relations: Iterable = ()):
        self.points = list(points)
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate points")
        idx = {p: k for k, p in enumerate(self.points)}
        n = len(self.points)
        le = [[i == j for j in range(n)] for i in range(n)]
        for x, y in relations:
            le[idx[x]][idx[y]] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    for j in range(n):
                        if le[k][j]:
                            le[i][j] = True
        for i in range(n):
            for j in range(i + 1, n):
                if le[i][j] and le[j][i]:
                    raise ValueError(f"order is not antisymmetric at {self.points[i]}, {self.points[j]}")
        self._idx = idx
        self._le = le

    def leq(self, x, y) -> bool:
        return self._le[self._idx[x]][self._idx[y]]

    def up(self, x) -> list:
        return [y for y in self.points if self.leq(x, y)]

    def strict_pairs(self) -> list[tuple]:
        return [(x, y) for x in self.points for y in self.points if x != y and self.leq(x, y)]

    def is_open(self, U: Iterable) -> bool:
        U = set(U)
        return all(y in U for x in U for y in self.up(x))

    def opens(self) -> list[list]:
        out = []
        for r in range(len(self.points) + 1):
            for sub in combinations(self.points, r):
                if self.is_open(sub):
                    out.append(list(sub))
        return out

    def chains(self, length: int, U: Iterable | None = None) -> list[tuple]:
        """Multichains y_1 <= ... <= y_length with y_1 in U (default: all points)."""
        start = self.points if U is None else [p for p in self.points if p in set(U)]
        out = [(p,) for p in start]
        for _ in range(length - 1):
            out = [c + (y,) for c in out for y in self.points if self.leq(c[-1], y)]
        return out

    def to_json(self) -> dict:
        return {"points": [str(p) for p in self.points],
                "order": [[str(x), str(y)] for x, y in self.strict_pairs()]}

    @classmethod
    def chain(cls, n: int) -> "FiniteSite":
        """Points 0 < 1 < ... < n-1 (point 0 is closed, n-1 generic)."""
        return cls([str(k) for k in range(n)], [(str(k), str(k + 1)) for k in range(n - 1)])


class PosetSheaf:
    """Stalks are Complexes; ``restrictions[(x, y)]`` for x < y are ChainMaps.

    ``algebras`` optionally equips each stalk with a DGA structure for which
    the restrictions are algebra maps."""

    def __init__(self, site: FiniteSite, stalks: Mapping, restrictions: Mapping,
                 algebras: Mapping | None = None):
        self.site = site
        self.stalks = {p: stalks[p] for p in site.points}
        self.restrictions = dict(restrictions)
        self.algebras = dict(algebras) if algebras else None
        for x, y in site.strict_pairs():
            if (x, y) not in self.restrictions:
                raise ValueError(f"missing restriction {x} -> {y}")

    def rho(self, x, y) -> ChainMap:
        if x == y:
            return ChainMap.identity(self.stalks[x])
        return self.restrictions[(x, y)]

    def violations(self) -> list[str]:
        out = []
        for (x, y), f in self.restrictions.items():
            if f.source != self.stalks[x] or f.target != self.stalks[y]:
                out.append(f"restriction {x}->{y} has wrong endpoints")
        pts = self.site.points
        for x in pts:
            for y in pts:
                for z in pts:
                    if x != y and y != z and self.site.leq(x, y) and self.site.leq(y, z):
                        comp = self.rho(y, z) @ self.rho(x, y)
                        if any(comp.at(n) != self.rho(x, z).at(n) for n in self.stalks[x].dims):
                            out.append(f"restrictions not functorial on {x}<={y}<={z}")
        if self.algebras:
            for p, alg in self.algebras.items():
                out += [f"stalk {p}: {v}" for v in algebra_violations(alg)]
        return out

    def internal_degrees(self) -> list[int]:
        degs = set()
        for c in self.stalks.values():
            degs |= set(c.dims)
        return sorted(degs)

    def sections(self, U: Iterable) -> Matrix:
        """Basis (columns) of the degree-0 sections over U inside the sum of stalks."""
        U = [p for p in self.site.points if p in set(U)]
        offs, off = {}, 0
        for p in U:
            offs[p] = off
            off += self.stalks[p].dim(0)
        rows = []
        for x in U:
            for y in U:
                if x != y and self.site.leq(x, y):
                    r = self.rho(x, y).at(0)
                    for i in range(r.rows):
                        row = {offs[x] + c: v for c, v in r.row(i).items()}
                        row[offs[y] + i] = row.get(offs[y] + i, 0) - 1
                        rows.append(row)
        mat = Matrix(len(rows), off, [((k, c), v) for k, row in enumerate(rows)
                                       for c, v in row.items()])
        return kernel_basis(mat).basis

    def to_json(self) -> dict:
        return {"site": self.site.to_json(),
                "stalks": {str(p): self.stalks[p].to_json() for p in self.site.points},
                "restrictions": [{"from": str(x), "to": str(y),
                                  "f": {str(n): self.restrictions[(x, y)].f[n].to_json()
                                        for n in sorted(self.restrictions[(x, y)].f)}}
                                 for x, y in self.site.strict_pairs()]}

    # constructors --------------------------------------------------------
    @classmethod
    def constant(cls, site: FiniteSite, algebra: GradedAlgebra | None = None) -> "PosetSheaf":
        alg = algebra or GradedAlgebra.field()
        c = alg.complex
        ident = ChainMap.identity(c)
        return cls(site, {p: c for p in site.points},
                   {pair: ident for pair in site.strict_pairs()},
                   {p: alg for p in site.points})

    @classmethod
    def skyscraper(cls, site: FiniteSite, point) -> "PosetSheaf":
        """K at the points of the closure of ``point``; zero elsewhere."""
        return cls.from_dims(site, {p: (1 if site.leq(p, point) else 0) for p in site.points},
                             lambda x, y: Matrix.identity(1) if site.leq(y, point) else None)

    @classmethod
    def from_dims(cls, site: FiniteSite, dims: Mapping, rho) -> "PosetSheaf":
        """Sheaf of vector spaces (degree 0) with rho(x, y) a Matrix or None for zero."""
        stalks = {p: Complex({0: dims[p]}) for p in site.points}
        res = {}
        for x, y in site.strict_pairs():
            m = rho(x, y)
            if m is None:
                m = Matrix.zeros(dims[y], dims[x])
            res[(x, y)] = ChainMap(stalks[x], stalks[y], {0: m})
        return cls(site, stalks, res)


def random_site(rng: random.Random, max_points: int = 4) -> FiniteSite:
    n = rng.randint(1, max_points)
    pts = [str(k) for k in range(n)]
    rel = [(pts[i], pts[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    return FiniteSite(pts, rel)


def _random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        m = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], n)
        try:
            inverse(m)
            return m
        except ZeroDivisionError:
            continue


def random_sheaf(site: FiniteSite, rng: random.Random, max_summands: int = 3) -> PosetSheaf:
    """Direct sum of up-set and down-set indicator sheaves, with a random
    change of basis in every stalk."""
    summands = []
    for _ in range(rng.randint(1, max_summands)):
        x = rng.choice(site.points)
        if rng.random() < 0.5:
            summands.append(lambda z, x=x: site.leq(x, z))        # representable
        else:
            summands.append(lambda z, x=x: site.leq(z, x))        # corepresentable
    dims = {p: sum(1 for s in summands if s(p)) for p in site.points}
    change = {p: _random_invertible(rng, dims[p]) for p in site.points}

    def rho(x, y):
        entries, rx, ry = [], 0, 0
        for s in summands:
            if s(x) and s(y):
                entries.append(((ry, rx), 1))
            rx += 1 if s(x) else 0
            ry += 1 if s(y) else 0
        base = Matrix(dims[y], dims[x], entries)
        return change[y] @ base @ inverse(change[x])
    return PosetSheaf.from_dims(site, dims, rho)


# ---------------------------------------------------------------------------
# the bar construction

class BarCosimplicial:
    """Levels B^n(F)(U) for n = 0..n_max, as complexes with structure maps.

    Level n is indexed by multichains of length n+1 starting in U."""

    def __init__(self, F: PosetSheaf, n_max: int, U: Iterable | None = None):
        self.F = F
        self.L = n_max
        site = F.site
        self.U = site.points if U is None else [p for p in site.points if p in set(U)]
        self.chains = [site.chains(n + 1, self.U) for n in range(n_max + 1)]
        self.levels = [direct_sum_complex(*(F.stalks[c[-1]] for c in ch)) if ch else Complex.zero()
                       for ch in self.chains]
        self._offsets = []
        for ch in self.chains:
            offs = {}
            for a in F.internal_degrees():
                o, table = 0, {}
                for c in ch:
                    table[c] = o
                    o += F.stalks[c[-1]].dim(a)
                offs[a] = table
            self._offsets.append(offs)
        self.delta = {}
        self.sigma = {}
        for n in range(1, n_max + 1):
            for i in range(n + 1):
                self.delta[(i, n)] = self._coface(i, n)
            for i in range(n):
                self.sigma[(i, n)] = self._codegeneracy(i, n)

    def _block_map(self, src_level: int, tgt_level: int, pieces) -> ChainMap:
        """pieces: list of (target chain, source chain, ChainMap stalk->stalk)."""
        f = {}
        for a in self.F.internal_degrees():
            so, to = self._offsets[src_level][a], self._offsets[tgt_level][a]
            entries = []
            for tc, sc, g in pieces:
                for (r, c), v in g.at(a).items():
                    entries.append(((to[tc] + r, so[sc] + c), v))
            f[a] = Matrix(self.levels[tgt_level].dim(a), self.levels[src_level].dim(a), entries)
        return ChainMap(self.levels[src_level], self.levels[tgt_level], f, check=False)

    def _coface(self, i: int, n: int) -> ChainMap:
        """delta_i: B^{n-1} -> B^n.  For i < n it forgets y_{i+1}; delta_n
        restricts along y_n <= y_{n+1}."""
        pieces = []
        for c in self.chains[n]:
            if i < n:
                sc = c[:i] + c[i + 1:]
                pieces.append((c, sc, ChainMap.identity(self.F.stalks[c[-1]])))
            else:
                pieces.append((c, c[:n], self.F.rho(c[n - 1], c[n])))
        return self._block_map(n - 1, n, pieces)

    def _codegeneracy(self, i: int, n: int) -> ChainMap:
        """sigma_i: B^n -> B^{n-1}, repeating y_{i+1}."""
        pieces = []
        for c in self.chains[n - 1]:
            sc = c[:i + 1] + c[i:]
            pieces.append((c, sc, ChainMap.identity(self.F.stalks[c[-1]])))
        return self._block_map(n, n - 1, pieces)

    # cosimplicial interface ----------------------------------------------
    def internal_degrees(self) -> list[int]:
        return self.F.internal_degrees()

    def coface(self, i: int, m: int) -> ChainMap:
        return self.delta[(i, m)]

    def codegeneracy(self, i: int, m: int) -> ChainMap:
        return self.sigma[(i, m)]

    def module(self, a: int) -> CosimplicialModule:
        return CosimplicialModule([c.dim(a) for c in self.levels],
                                  {k: f.at(a) for k, f in self.delta.items()},
                                  {k: f.at(a) for k, f in self.sigma.items()})

    def level_dims(self) -> list[int]:
        return [sum(c.dims.values()) for c in self.levels]

    def dga(self) -> CosimplicialDGA:
        """Pointwise products on chains; needs stalk algebras."""
        if not self.F.algebras:
            raise ValueError("sheaf carries no algebra structure")
        products, units = [], []
        degs = self.internal_degrees()
        for n, ch in enumerate(self.chains):
            prods = {}
            offs = self._offsets[n]
            lv = self.levels[n]
            for a in degs:
                for b in degs:
                    if a + b not in offs:
                        continue
                    entries = []
                    for c in ch:
                        alg = self.F.algebras[c[-1]]
                        mu = alg.mu(a, b)
                        db = alg.complex.dim(b)
                        for (r, col), v in mu.items():
                            i, j = divmod(col, db)
                            gi = offs[a][c] + i
                            gj = offs[b][c] + j
                            entries.append(((offs[a + b][c] + r, gi * lv.dim(b) + gj), v))
                    if entries:
                        prods[(a, b)] = Matrix(lv.dim(a + b), lv.dim(a) * lv.dim(b), entries)
            products.append(prods)
            unit = [Fraction(0)] * lv.dim(0)
            for c in ch:
                for r, v in enumerate(self.F.algebras[c[-1]].unit):
                    unit[offs[0][c] + r] = v
            units.append(unit)
        return CosimplicialDGA(self.levels, self.delta, self.sigma, products, units)


def bar(F: PosetSheaf, n_max: int = 5, U: Iterable | None = None) -> BarCosimplicial:
    return BarCosimplicial(F, n_max, U)


def gdm(F: PosetSheaf, n_max: int = 5, U: Iterable | None = None) -> Complex:
    """Sections over U of the Godement resolution: the total simple complex."""
    return simple_complex_dga(bar(F, n_max, U))


def augmentation(F: PosetSheaf, x, n_max: int = 5) -> ChainMap:
    """F_x -> Gdm(F)(up(x)), v -> (rho(x, y) v)_y in cosimplicial degree 0."""
    b = bar(F, n_max, F.site.up(x))
    target = simple_complex_dga(b)
    f = {}
    stalk = F.stalks[x]
    for a in stalk.dims:
        entries = []
        for c in b.chains[0]:
            off = b._offsets[0][a][c]        # block q = 0 comes first in Tot
            for (r, col), v in F.rho(x, c[0]).at(a).items():
                entries.append(((off + r, col), v))
        f[a] = Matrix(target.dim(a), stalk.dim(a), entries)
    return ChainMap(stalk, target, f)


def tgdm(F: PosetSheaf, n_max: int = 5, D: int = 1, U: Iterable | None = None):
    from .thom_sullivan import TSComplex
    return TSComplex(bar(F, n_max, U).dga(), D)


@dataclass
class HomotopyReport:
    ok: bool
    failures: list = field(default_factory=list)
    checked: int = 0

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "failures": self.failures}


def stalk_homotopy(b: BarCosimplicial, x, a: int, q: int) -> Matrix:
    """h^q: B^q -> B^{q-1} at the stalk of x (h^0 lands in F_x):
    h(s)(z_1, ..., z_q) = s(x, z_1, ..., z_q)."""
    stalks = b.F.stalks
    if q == 0:
        entries = []
        c = (x,)
        off = b._offsets[0][a][c]
        for r in range(stalks[x].dim(a)):
            entries.append(((r, off + r), 1))
        return Matrix(stalks[x].dim(a), b.levels[0].dim(a), entries)
    entries = []
    for c in b.chains[q - 1]:
        src = (x,) + c
        so, to = b._offsets[q][a][src], b._offsets[q - 1][a][c]
        for r in range(stalks[c[-1]].dim(a)):
            entries.append(((to + r, so + r), 1))
    return Matrix(b.levels[q - 1].dim(a), b.levels[q].dim(a), entries)


def stalkwise_homotopy_check(F: PosetSheaf, n_max: int = 5, sign: int = 1) -> HomotopyReport:
    """Check id = d h + h d on the augmented complex F_x -> B^0 -> B^1 -> ...
    at every point, in degrees below n_max - 1.  ``sign`` scales h (use -1
    for a negative control)."""
    failures, checked = [], 0
    for x in F.site.points:
        b = bar(F, n_max, F.site.up(x))
        for a in F.internal_degrees():
            mod = b.module(a)
            fx = F.stalks[x].dim(a)
            eta = Matrix(b.levels[0].dim(a), fx,
                         [((b._offsets[0][a][c] + r, col), v) for c in b.chains[0]
                          for (r, col), v in F.rho(x, c[0]).at(a).items()])

            def d(q):
                if q == -1:
                    return eta
                return simple_differential(mod, q)

            def h(q):
                if q == -1:
                    return Matrix.zeros(0, fx)
                return stalk_homotopy(b, x, a, q).scale(sign)
            for q in range(-1, n_max - 1):
                dim_q = fx if q == -1 else mod.dims[q]
                total = h(q + 1) @ d(q)
                if q >= 0:
                    total = total + d(q - 1) @ h(q)
                checked += 1
                if total != Matrix.identity(dim_q):
                    failures.append({"point": str(x), "internal_degree": a, "degree": q})
    return HomotopyReport(not failures, failures, checked)


def bar_validation(F: PosetSheaf, n_max: int = 5) -> dict:
    """Cosimplicial identities of the bar construction over every open."""
    out = {}
    for U in F.site.opens():
        b = bar(F, n_max, U)
        ok = all(validate(b.module(a)).valid for a in F.internal_degrees())
        out[",".join(map(str, U))] = ok
    return out


def augmentation_report(F: PosetSheaf, n_max: int = 5) -> HomotopyReport:
    """F_x -> Gdm(F)(up(x)) induces isomorphisms on H^n for n < n_max - 1
    at every point x."""
    failures, checked = [], 0
    ints = F.internal_degrees()
    lo = min(ints) if ints else 0
    for x in F.site.points:
        f = augmentation(F, x, n_max)
        for n in range(lo, n_max - 1):
            checked += 1
            h = induced_map(f, n)
            if not (h.rows == h.cols and rank(h) == h.rows):
                failures.append({"point": str(x), "degree": n})
    return HomotopyReport(not failures, failures, checked)
