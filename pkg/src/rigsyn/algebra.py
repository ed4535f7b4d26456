"""Finite-dimensional graded-commutative DGAs given by structure constants."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .cochain import ChainMap, Complex, tensor
from .linalg import Matrix, kron


@dataclass
class GradedAlgebra:
    """A DGA: underlying complex, ``products[(a, b)]`` acting on Kronecker
    ordered inputs (dim(a+b) x dim(a)*dim(b)), and a unit in degree 0."""
    complex: Complex
    products: dict = field(default_factory=dict)
    unit: list = field(default_factory=list)

    def mu(self, a: int, b: int) -> Matrix:
        c = self.complex
        m = self.products.get((a, b))
        if m is None:
            return Matrix.zeros(c.dim(a + b), c.dim(a) * c.dim(b))
        return m

    def multiply(self, a: int, x: Sequence, b: int, y: Sequence) -> list[Fraction]:
        vec = kron(Matrix.column_vector(list(x)), Matrix.column_vector(list(y)))
        return (self.mu(a, b) @ vec).column(0)

    def degrees(self) -> list[int]:
        return sorted(self.complex.dims)

    @classmethod
    def field(cls) -> "GradedAlgebra":
        return cls(Complex({0: 1}), {(0, 0): Matrix.identity(1)}, [Fraction(1)])

    @classmethod
    def exterior(cls, generators: int) -> "GradedAlgebra":
        """Exterior algebra on degree-1 generators e_1..e_g, zero differential.

        Degree a has basis the a-subsets of {1..g} in lexicographic order."""
        subsets = {a: list(combinations(range(1, generators + 1), a))
                   for a in range(generators + 1)}
        index = {a: {s: k for k, s in enumerate(subs)} for a, subs in subsets.items()}
        products = {}
        for a in subsets:
            for b in subsets:
                if a + b > generators:
                    continue
                entries = []
                nb = len(subsets[b])
                for i, s in enumerate(subsets[a]):
                    for j, t in enumerate(subsets[b]):
                        if set(s) & set(t):
                            continue
                        inv = sum(1 for x in s for y in t if x > y)
                        u = tuple(sorted(s + t))
                        entries.append(((index[a + b][u], i * nb + j), -1 if inv % 2 else 1))
                products[(a, b)] = Matrix(len(subsets[a + b]), len(subsets[a]) * nb, entries)
        dims = {a: len(s) for a, s in subsets.items()}
        return cls(Complex(dims), products, [Fraction(1)])

    @classmethod
    def from_table(cls, dim: int, table: Mapping, unit: Sequence) -> "GradedAlgebra":
        """A commutative algebra concentrated in degree 0 with e_i e_j = table[(i, j)]
        (a coordinate list); missing pairs are looked up symmetrically."""
        entries = []
        for i in range(dim):
            for j in range(dim):
                vec = table.get((i, j), table.get((j, i)))
                if vec is None:
                    continue
                for r, v in enumerate(vec):
                    if v:
                        entries.append(((r, i * dim + j), v))
        return cls(Complex({0: dim}), {(0, 0): Matrix(dim, dim * dim, entries)},
                   [Fraction(u) for u in unit])


def algebra_violations(alg: GradedAlgebra) -> list[str]:
    """Unit, associativity, graded commutativity and Leibniz checks."""
    out = []
    c = alg.complex
    degs = alg.degrees()
    e = Matrix.column_vector(alg.unit)
    for a in degs:
        ia = Matrix.identity(c.dim(a))
        if alg.mu(0, a) @ kron(e, ia) != ia or alg.mu(a, 0) @ kron(ia, e) != ia:
            out.append(f"unit law in degree {a}")
    for a in degs:
        for b in degs:
            ia, ib = Matrix.identity(c.dim(a)), Matrix.identity(c.dim(b))
            swap = Matrix(c.dim(a) * c.dim(b), c.dim(a) * c.dim(b),
                          [((j * c.dim(a) + i, i * c.dim(b) + j), 1)
                           for i in range(c.dim(a)) for j in range(c.dim(b))])
            other = alg.mu(b, a) @ swap
            if alg.mu(a, b) != (other if (a * b) % 2 == 0 else -other):
                out.append(f"graded commutativity in degrees {(a, b)}")
            lhs = c.diff(a + b) @ alg.mu(a, b)
            t = alg.mu(a, b + 1) @ kron(ia, c.diff(b))
            rhs = alg.mu(a + 1, b) @ kron(c.diff(a), ib) + (t if a % 2 == 0 else -t)
            if lhs != rhs:
                out.append(f"Leibniz in degrees {(a, b)}")
            for g in degs:
                ig = Matrix.identity(c.dim(g))
                if alg.mu(a + b, g) @ kron(alg.mu(a, b), ig) != \
                        alg.mu(a, b + g) @ kron(ia, alg.mu(b, g)):
                    out.append(f"associativity in degrees {(a, b, g)}")
    return out


def is_algebra_map(f: ChainMap, src: GradedAlgebra, tgt: GradedAlgebra) -> bool:
    if f.at(0).apply(src.unit) != list(tgt.unit):
        return False
    for a in src.degrees():
        for b in src.degrees():
            if f.at(a + b) @ src.mu(a, b) != tgt.mu(a, b) @ kron(f.at(a), f.at(b)):
                return False
    return True


def _tensor_layout(a: Complex, b: Complex) -> dict[int, list[tuple[int, int, int]]]:
    """Same block order as cochain.tensor: left degree increasing."""
    layout: dict[int, list[tuple[int, int, int]]] = {}
    size: dict[int, int] = {}
    for i in sorted(a.dims):
        for j in sorted(b.dims):
            n = i + j
            off = size.get(n, 0)
            layout.setdefault(n, []).append((i, j, off))
            size[n] = off + a.dim(i) * b.dim(j)
    return layout


def tensor_algebra(A: GradedAlgebra, B: GradedAlgebra) -> GradedAlgebra:
    """A (x) B with (x1 y1)(x2 y2) = (-1)^{|y1||x2|} x1 x2 y1 y2."""
    c = tensor(A.complex, B.complex)
    layout = _tensor_layout(A.complex, B.complex)
    products = {}
    for n1, parts1 in layout.items():
        for n2, parts2 in layout.items():
            tgt = {(i, j): off for i, j, off in layout.get(n1 + n2, [])}
            if not tgt:
                continue
            entries: dict[tuple[int, int], Fraction] = {}
            d2 = c.dim(n2)
            for a1, b1, o1 in parts1:
                for a2, b2, o2 in parts2:
                    key = (a1 + a2, b1 + b2)
                    if key not in tgt:
                        continue
                    ma, mb = A.mu(a1, a2), B.mu(b1, b2)
                    if ma.is_zero() or mb.is_zero():
                        continue
                    sign = -1 if (b1 * a2) % 2 else 1
                    da2, db1, db2 = A.complex.dim(a2), B.complex.dim(b1), B.complex.dim(b2)
                    nb = B.complex.dim(b1 + b2)
                    ca = {}
                    for (r, col), v in ma.items():
                        ca.setdefault(col, []).append((r, v))
                    cb = {}
                    for (r, col), v in mb.items():
                        cb.setdefault(col, []).append((r, v))
                    for x1 in range(A.complex.dim(a1)):
                        for x2 in range(da2):
                            ra = ca.get(x1 * da2 + x2)
                            if not ra:
                                continue
                            for y1 in range(db1):
                                for y2 in range(db2):
                                    rb = cb.get(y1 * db2 + y2)
                                    if not rb:
                                        continue
                                    src = (o1 + x1 * db1 + y1) * d2 + (o2 + x2 * db2 + y2)
                                    for r1, v1 in ra:
                                        for r2, v2 in rb:
                                            row = tgt[key] + r1 * nb + r2
                                            k = (row, src)
                                            entries[k] = entries.get(k, 0) + sign * v1 * v2
            products[(n1, n2)] = Matrix(c.dim(n1 + n2), c.dim(n1) * d2,
                                        [(k, v) for k, v in entries.items() if v])
    unit = kron(Matrix.column_vector(A.unit), Matrix.column_vector(B.unit)).column(0)
    # degree 0 may hold other blocks (a, -a); the unit sits in the (0, 0) block
    off = {(i, j): o for i, j, o in layout.get(0, [])}[(0, 0)]
    full = [Fraction(0)] * c.dim(0)
    full[off:off + len(unit)] = unit
    return GradedAlgebra(c, products, full)


def tensor_inclusions(A: GradedAlgebra, B: GradedAlgebra, AB: GradedAlgebra) -> tuple[ChainMap, ChainMap]:
    """x -> x (x) 1 and y -> 1 (x) y."""
    layout = _tensor_layout(A.complex, B.complex)
    pa, pb = {}, {}
    for n, parts in layout.items():
        off = {(i, j): o for i, j, o in parts}
        if (n, 0) in off:
            m = kron(Matrix.identity(A.complex.dim(n)), Matrix.column_vector(B.unit))
            pa[n] = Matrix(AB.complex.dim(n), m.cols,
                           [((r + off[(n, 0)], col), v) for (r, col), v in m.items()])
        if (0, n) in off:
            m = kron(Matrix.column_vector(A.unit), Matrix.identity(B.complex.dim(n)))
            pb[n] = Matrix(AB.complex.dim(n), m.cols,
                           [((r + off[(0, n)], col), v) for (r, col), v in m.items()])
    return (ChainMap(A.complex, AB.complex, pa), ChainMap(B.complex, AB.complex, pb))
