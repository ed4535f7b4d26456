"""Truncated cosimplicial modules and cosimplicial DGAs.

A cosimplicial module truncated at level L has vector spaces M^0..M^L,
cofaces ``delta[(i, m)]: M^{m-1} -> M^m`` (0 <= i <= m) and codegeneracies
``sigma[(i, m)]: M^m -> M^{m-1}`` (0 <= i <= m-1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .cochain import ChainMap, Complex, DoubleComplex, tot
from .linalg import Matrix, kernel_basis, kron, left_inverse


class TruncationExceeded(ValueError):
    """A construction needs a level (or degree) beyond the stored truncation."""


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, identity: str, **indices) -> None:
        self.violations.append({"identity": identity, **indices})

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": self.violations}


def _identity_checks(L, coface, codegen, eq, report):
    """Run every cosimplicial identity through ``eq(lhs, rhs)``.

    ``coface(i, m)`` and ``codegen(i, m)`` return matrices; ``eq`` compares
    two composites (``None`` on the right stands for the identity)."""
    for m in range(2, L + 1):
        # delta_j delta_i = delta_i delta_{j-1}, i < j, maps M^{m-2} -> M^m
        for j in range(m + 1):
            for i in range(j):
                if not eq(coface(j, m) @ coface(i, m - 1), coface(i, m) @ coface(j - 1, m - 1)):
                    report.add("delta_j delta_i = delta_i delta_(j-1)", i=i, j=j, level=m)
    for m in range(2, L + 1):
        # sigma_j sigma_i = sigma_i sigma_{j+1}, i <= j, maps M^m -> M^{m-2}
        for j in range(m - 1):
            for i in range(j + 1):
                if not eq(codegen(j, m - 1) @ codegen(i, m), codegen(i, m - 1) @ codegen(j + 1, m)):
                    report.add("sigma_j sigma_i = sigma_i sigma_(j+1)", i=i, j=j, level=m)
    for m in range(1, L + 1):
        # sigma_j delta_i : M^{m-1} -> M^m -> M^{m-1}
        for j in range(m):
            for i in range(m + 1):
                lhs = codegen(j, m) @ coface(i, m)
                if i < j:
                    rhs = coface(i, m - 1) @ codegen(j - 1, m - 1)
                    name = "sigma_j delta_i = delta_i sigma_(j-1)"
                elif i in (j, j + 1):
                    rhs = None
                    name = "sigma_j delta_i = id"
                else:
                    rhs = coface(i - 1, m - 1) @ codegen(j, m - 1)
                    name = "sigma_j delta_i = delta_(i-1) sigma_j"
                if not eq(lhs, rhs):
                    report.add(name, i=i, j=j, level=m)


class CosimplicialModule:
    def __init__(self, dims: Sequence[int], delta: Mapping, sigma: Mapping):
        self.dims = list(dims)
        self.L = len(self.dims) - 1
        self.delta = dict(delta)
        self.sigma = dict(sigma)
        for (i, m), mat in self.delta.items():
            if mat.shape != (self.dims[m], self.dims[m - 1]):
                raise ValueError(f"coface ({i}, {m}) has wrong shape {mat.shape}")
        for (i, m), mat in self.sigma.items():
            if mat.shape != (self.dims[m - 1], self.dims[m]):
                raise ValueError(f"codegeneracy ({i}, {m}) has wrong shape {mat.shape}")

    def coface(self, i: int, m: int) -> Matrix:
        return self.delta[(i, m)]

    def codegeneracy(self, i: int, m: int) -> Matrix:
        return self.sigma[(i, m)]

    @classmethod
    def constant(cls, dim: int, L: int) -> "CosimplicialModule":
        one = Matrix.identity(dim)
        return cls([dim] * (L + 1),
                   {(i, m): one for m in range(1, L + 1) for i in range(m + 1)},
                   {(i, m): one for m in range(1, L + 1) for i in range(m)})

    def to_json(self) -> dict:
        return {"L": self.L, "dims": self.dims,
                "cofaces": [{"i": i, "m": m, "matrix": self.delta[(i, m)].to_json()}
                            for (i, m) in sorted(self.delta, key=lambda k: (k[1], k[0]))],
                "codegeneracies": [{"i": i, "m": m, "matrix": self.sigma[(i, m)].to_json()}
                                   for (i, m) in sorted(self.sigma, key=lambda k: (k[1], k[0]))]}

    @classmethod
    def from_json(cls, obj: dict) -> "CosimplicialModule":
        return cls(obj["dims"],
                   {(e["i"], e["m"]): Matrix.from_json(e["matrix"]) for e in obj["cofaces"]},
                   {(e["i"], e["m"]): Matrix.from_json(e["matrix"]) for e in obj["codegeneracies"]})


def validate(m: CosimplicialModule) -> ValidationReport:
    report = ValidationReport()
    for k in range(1, m.L + 1):
        for i in range(k + 1):
            if (i, k) not in m.delta:
                report.add("missing coface", i=i, level=k)
        for i in range(k):
            if (i, k) not in m.sigma:
                report.add("missing codegeneracy", i=i, level=k)
    if not report.valid:
        return report

    def eq(lhs, rhs):
        if rhs is None:
            return lhs == Matrix.identity(lhs.rows)
        return lhs == rhs
    _identity_checks(m.L, m.coface, m.codegeneracy, eq, report)
    return report


def simple_differential(m: CosimplicialModule, q: int) -> Matrix:
    """sum_{i=0}^{q+1} (-1)^i delta_i : M^q -> M^{q+1}, zero at the top level."""
    if q >= m.L:
        return Matrix.zeros(0, m.dims[q])
    out = Matrix.zeros(m.dims[q + 1], m.dims[q])
    for i in range(q + 2):
        d = m.coface(i, q + 1)
        out = out + (d if i % 2 == 0 else -d)
    return out


def simple_complex(m: CosimplicialModule) -> Complex:
    dims = {q: k for q, k in enumerate(m.dims)}
    d = {q: simple_differential(m, q) for q in range(m.L)}
    return Complex(dims, d)


def normalization(m: CosimplicialModule) -> tuple[Complex, ChainMap]:
    """N^q = intersection of ker sigma_i, with its inclusion into sM."""
    s = simple_complex(m)
    bases = {}
    for q in range(m.L + 1):
        if q == 0:
            bases[q] = Matrix.identity(m.dims[0])
            continue
        stacked = [m.codegeneracy(i, q) for i in range(q)]
        rows = []
        for mat in stacked:
            rows += mat.to_rows()
        bases[q] = kernel_basis(Matrix.from_rows(rows, m.dims[q])).basis
    dims = {q: b.cols for q, b in bases.items()}
    d = {}
    for q in range(m.L):
        image = s.diff(q) @ bases[q]
        d[q] = left_inverse(bases[q + 1]) @ image if bases[q + 1].cols else \
            Matrix.zeros(0, bases[q].cols)
    n = Complex(dims, d)
    return n, ChainMap(n, s, bases)


# ---------------------------------------------------------------------------
# cosimplicial DGAs

class CosimplicialDGA:
    """Levels are Complexes (internal grading a); structure maps are chain maps.

    ``products[m][(a, b)]`` is the matrix of mu: level_m^a (x) level_m^b ->
    level_m^{a+b} acting on Kronecker-ordered inputs; ``units[m]`` is a list
    of coordinates in internal degree 0.
    """

    def __init__(self, levels: Sequence[Complex], delta: Mapping, sigma: Mapping,
                 products: Sequence[Mapping], units: Sequence[Sequence]):
        self.levels = list(levels)
        self.L = len(self.levels) - 1
        self.delta = dict(delta)
        self.sigma = dict(sigma)
        self.products = [dict(p) for p in products]
        self.units = [[Fraction(x) for x in u] for u in units]

    def internal_degrees(self) -> list[int]:
        degs = set()
        for c in self.levels:
            degs |= set(c.dims)
        return sorted(degs)

    def coface(self, i: int, m: int) -> ChainMap:
        return self.delta[(i, m)]

    def codegeneracy(self, i: int, m: int) -> ChainMap:
        return self.sigma[(i, m)]

    def module(self, a: int) -> CosimplicialModule:
        """The cosimplicial vector space in internal degree a."""
        return CosimplicialModule([c.dim(a) for c in self.levels],
                                  {k: f.at(a) for k, f in self.delta.items()},
                                  {k: f.at(a) for k, f in self.sigma.items()})

    def mu(self, m: int, a: int, b: int) -> Matrix:
        c = self.levels[m]
        mat = self.products[m].get((a, b))
        if mat is None:
            return Matrix.zeros(c.dim(a + b), c.dim(a) * c.dim(b))
        return mat

    def multiply(self, m: int, a: int, x: Sequence, b: int, y: Sequence) -> list[Fraction]:
        """Product of x in level_m^a and y in level_m^b."""
        vec = kron(Matrix.column_vector(list(x)), Matrix.column_vector(list(y)))
        return (self.mu(m, a, b) @ vec).column(0)

    def unit(self, m: int) -> list[Fraction]:
        return list(self.units[m])

    @classmethod
    def constant_field(cls, L: int) -> "CosimplicialDGA":
        """The constant cosimplicial algebra K in every level."""
        k = Complex({0: 1})
        one = ChainMap.identity(k)
        return cls([k] * (L + 1),
                   {(i, m): one for m in range(1, L + 1) for i in range(m + 1)},
                   {(i, m): one for m in range(1, L + 1) for i in range(m)},
                   [{(0, 0): Matrix.identity(1)} for _ in range(L + 1)],
                   [[1] for _ in range(L + 1)])

    def to_json(self) -> dict:
        return {"L": self.L,
                "levels": [c.to_json() for c in self.levels],
                "cofaces": [{"i": i, "m": m, "f": {str(n): f.f[n].to_json() for n in sorted(f.f)}}
                            for (i, m), f in sorted(self.delta.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
                "codegeneracies": [{"i": i, "m": m, "f": {str(n): f.f[n].to_json() for n in sorted(f.f)}}
                                   for (i, m), f in sorted(self.sigma.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
                "products": [[{"a": a, "b": b, "matrix": p[(a, b)].to_json()} for (a, b) in sorted(p)]
                             for p in self.products],
                "units": [[f"{x.numerator}/{x.denominator}" for x in u] for u in self.units]}


def validate_dga(m: CosimplicialDGA) -> ValidationReport:
    report = ValidationReport()
    for a in m.internal_degrees():
        sub = validate(m.module(a))
        for v in sub.violations:
            report.violations.append({**v, "internal_degree": a})
    degs = m.internal_degrees()
    for lv in range(m.L + 1):
        c = m.levels[lv]
        e = Matrix.column_vector(m.unit(lv))
        if e.rows != c.dim(0):
            report.add("unit has wrong size", level=lv)
            continue
        for a in degs:
            ida = Matrix.identity(c.dim(a))
            if m.mu(lv, 0, a) @ kron(e, ida) != ida or m.mu(lv, a, 0) @ kron(ida, e) != ida:
                report.add("unit law", level=lv, degree=a)
        if c.dim(1) and not (c.diff(0) @ e).is_zero():
            report.add("unit is not a cocycle", level=lv)
        for a in degs:
            for b in degs:
                ia, ib = Matrix.identity(c.dim(a)), Matrix.identity(c.dim(b))
                # Leibniz: d mu = mu(d x 1) + (-1)^a mu(1 x d)
                lhs = c.diff(a + b) @ m.mu(lv, a, b)
                rhs = m.mu(lv, a + 1, b) @ kron(c.diff(a), ib)
                t = m.mu(lv, a, b + 1) @ kron(ia, c.diff(b))
                rhs = rhs + (t if a % 2 == 0 else -t)
                if lhs != rhs:
                    report.add("Leibniz", level=lv, degrees=[a, b])
                # graded commutativity via the swap of tensor factors
                swap = Matrix(c.dim(a) * c.dim(b), c.dim(a) * c.dim(b),
                              [((j * c.dim(a) + i, i * c.dim(b) + j), 1)
                               for i in range(c.dim(a)) for j in range(c.dim(b))])
                other = m.mu(lv, b, a) @ swap
                if m.mu(lv, a, b) != (other if (a * b) % 2 == 0 else -other):
                    report.add("graded commutativity", level=lv, degrees=[a, b])
                for g in degs:
                    ig = Matrix.identity(c.dim(g))
                    left = m.mu(lv, a + b, g) @ kron(m.mu(lv, a, b), ig)
                    right = m.mu(lv, a, b + g) @ kron(ia, m.mu(lv, b, g))
                    if left != right:
                        report.add("associativity", level=lv, degrees=[a, b, g])
    maps = [(key, f, key[1] - 1, key[1]) for key, f in m.delta.items()]
    maps += [(key, f, key[1], key[1] - 1) for key, f in m.sigma.items()]
    for key, f, s_lv, t_lv in maps:
        if list(m.unit(t_lv)) != f.at(0).apply(m.unit(s_lv)):
            report.add("structure map does not preserve unit", i=key[0], level=key[1])
        for a in degs:
            for b in degs:
                lhs = f.at(a + b) @ m.mu(s_lv, a, b)
                rhs = m.mu(t_lv, a, b) @ kron(f.at(a), f.at(b))
                if lhs != rhs:
                    report.add("structure map not multiplicative", i=key[0], level=key[1],
                               degrees=[a, b])
    return report


def tot_double_complex(m: CosimplicialDGA) -> DoubleComplex:
    """Bidegree (q, a): cosimplicial degree q, internal degree a.

    Horizontal: alternating coface sum; vertical: (-1)^q d_internal."""
    dims, dh, dv = {}, {}, {}
    for q, c in enumerate(m.levels):
        for a, k in c.dims.items():
            dims[(q, a)] = k
    for a in m.internal_degrees():
        mod = m.module(a)
        for q in range(m.L):
            if (q, a) in dims or (q + 1, a) in dims:
                dh[(q, a)] = simple_differential(mod, q)
    for q, c in enumerate(m.levels):
        for a in c.dims:
            mat = c.diff(a)
            dv[(q, a)] = -mat if q % 2 else mat
    return DoubleComplex(dims, dh, dv)


def simple_complex_dga(m: CosimplicialDGA) -> Complex:
    """Tot(sM) with differential delta + (-1)^q d_internal."""
    return tot(tot_double_complex(m))


def tot_blocks(m: CosimplicialDGA, n: int) -> list[tuple[int, int, int, int]]:
    """(q, a, offset, size) of each block of Tot(sM)^n, in the order used by tot()."""
    out, off = [], 0
    for q, c in enumerate(m.levels):
        a = n - q
        k = c.dim(a)
        if k:
            out.append((q, a, off, k))
            off += k
    return out


def _front_face(m: CosimplicialDGA, q: int, qq: int, a: int, x: list) -> list:
    """delta^-: level q -> level q+qq, image {0..q}: apply delta_{q+1}, ..., delta_{q+qq}."""
    for k in range(1, qq + 1):
        x = m.coface(q + k, q + k).at(a).apply(x)
    return x


def _back_face(m: CosimplicialDGA, q: int, qq: int, a: int, x: list) -> list:
    """delta^+: level qq -> level q+qq, image {q..q+qq}: apply delta_0 q times."""
    for k in range(1, q + 1):
        x = m.coface(0, qq + k).at(a).apply(x)
    return x


def alexander_whitney(m: CosimplicialDGA, q: int, a: int, x: Sequence,
                      qq: int, b: int, y: Sequence) -> list[Fraction]:
    """x in M^q (internal degree a) times y in M^{qq} (internal degree b).

    Returns (-1)^{a qq} mu(delta^- x, delta^+ y) in M^{q+qq}, internal
    degree a+b.  The sign makes the product satisfy the Leibniz rule for the
    total differential delta + (-1)^q d."""
    if q + qq > m.L:
        raise TruncationExceeded(f"level {q + qq} exceeds truncation {m.L}")
    fx = _front_face(m, q, qq, a, [Fraction(v) for v in x])
    by = _back_face(m, q, qq, b, [Fraction(v) for v in y])
    out = m.multiply(q + qq, a, fx, b, by)
    if (a * qq) % 2:
        out = [-v for v in out]
    return out


def aw_product_total(m: CosimplicialDGA, n1: int, x: Sequence, n2: int, y: Sequence) -> list[Fraction]:
    """Alexander-Whitney product on Tot(sM): x in degree n1, y in degree n2."""
    target = tot_blocks(m, n1 + n2)
    size = sum(k for *_, k in target)
    pos = {(q, a): off for q, a, off, _ in target}
    out = [Fraction(0)] * size
    for q, a, o1, k1 in tot_blocks(m, n1):
        xs = list(x[o1:o1 + k1])
        if not any(xs):
            continue
        for qq, b, o2, k2 in tot_blocks(m, n2):
            ys = list(y[o2:o2 + k2])
            if not any(ys):
                continue
            res = alexander_whitney(m, q, a, xs, qq, b, ys)
            if not any(res):
                continue
            off = pos[(q + qq, a + b)]
            for k, v in enumerate(res):
                out[off + k] += v
    return out


def tot_unit(m: CosimplicialDGA) -> list[Fraction]:
    """Unit of Tot(sM)^0: the level-0 unit."""
    blocks = tot_blocks(m, 0)
    size = sum(k for *_, k in blocks)
    out = [Fraction(0)] * size
    for q, a, off, k in blocks:
        if q == 0:
            out[off:off + k] = m.unit(0)
    return out
