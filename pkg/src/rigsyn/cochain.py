"""Bounded cochain complexes of finite-dimensional rational vector spaces.

Conventions used throughout the package:

* ``Complex.d[n]`` is a matrix of shape ``dim(n+1) x dim(n)``.
* shift: ``(C[k])^n = C^{n+k}`` with differential ``(-1)^k d``.
* cone of ``f: A -> B``: ``Cone(f)^n = A^{n+1} + B^n`` with
  ``d(a, b) = (-d a, f a + d b)``.
* fiber: ``Fib(f) = Cone(f)[-1]``, so ``Fib^n = A^n + B^{n-1}`` and
  ``d(a, b) = (d a, -f a - d b)``.
* fence homotopy limits: arrows pointing right enter the difference map
  with sign +1, arrows pointing left with -1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .linalg import (Matrix, Subspace, block, direct_sum, image_basis, kernel_basis,
                     kron, left_inverse, quotient_data, rank, right_inverse)


class ComplexError(ValueError):
    pass


class Complex:
    """A bounded cochain complex.  Immutable by convention."""

    def __init__(self, dims: Mapping[int, int], d: Mapping[int, Matrix] | None = None,
                 check: bool = True):
        self.dims = {int(n): int(k) for n, k in dims.items() if k}
        d = d or {}
        self.d = {}
        for n, m in d.items():
            n = int(n)
            if m.shape != (self.dim(n + 1), self.dim(n)):
                raise ComplexError(
                    f"d^{n} has shape {m.shape}, expected {(self.dim(n + 1), self.dim(n))}")
            if not m.is_zero():
                self.d[n] = m
        if check:
            self.check()

    @classmethod
    def zero(cls) -> "Complex":
        return cls({})

    @classmethod
    def concentrated(cls, dim: int, degree: int = 0) -> "Complex":
        return cls({degree: dim})

    @property
    def support(self) -> tuple[int, int]:
        if not self.dims:
            return (0, -1)
        return (min(self.dims), max(self.dims))

    def degrees(self) -> range:
        lo, hi = self.support
        return range(lo, hi + 1)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def diff(self, n: int) -> Matrix:
        m = self.d.get(n)
        if m is None:
            return Matrix.zeros(self.dim(n + 1), self.dim(n))
        return m

    def check(self) -> None:
        for n in self.d:
            if not (self.diff(n + 1) @ self.diff(n)).is_zero():
                raise ComplexError(f"d^{n + 1} d^{n} != 0")

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return self.dims == other.dims and self.d == other.d

    def __repr__(self) -> str:
        return f"Complex(dims={dict(sorted(self.dims.items()))})"

    def to_json(self) -> dict:
        lo, hi = self.support
        return {"support": [lo, hi],
                "dims": {str(n): self.dims[n] for n in sorted(self.dims)},
                "d": {str(n): self.d[n].to_json() for n in sorted(self.d)}}

    @classmethod
    def from_json(cls, obj: dict) -> "Complex":
        dims = {int(n): k for n, k in obj["dims"].items()}
        d = {int(n): Matrix.from_json(m) for n, m in obj.get("d", {}).items()}
        return cls(dims, d)


class ChainMap:
    def __init__(self, source: Complex, target: Complex, f: Mapping[int, Matrix] | None = None,
                 check: bool = True):
        self.source = source
        self.target = target
        self.f = {}
        for n, m in (f or {}).items():
            n = int(n)
            if m.shape != (target.dim(n), source.dim(n)):
                raise ComplexError(f"f^{n} has shape {m.shape}, expected "
                                   f"{(target.dim(n), source.dim(n))}")
            if not m.is_zero():
                self.f[n] = m
        if check:
            self.check()

    def at(self, n: int) -> Matrix:
        m = self.f.get(n)
        if m is None:
            return Matrix.zeros(self.target.dim(n), self.source.dim(n))
        return m

    def degrees(self) -> list[int]:
        lo = min(self.source.support[0], self.target.support[0])
        hi = max(self.source.support[1], self.target.support[1])
        return list(range(lo - 1, hi + 1))

    def check(self) -> None:
        for n in self.degrees():
            lhs = self.target.diff(n) @ self.at(n)
            rhs = self.at(n + 1) @ self.source.diff(n)
            if lhs != rhs:
                raise ComplexError(f"not a chain map in degree {n}")

    @classmethod
    def identity(cls, c: Complex) -> "ChainMap":
        return cls(c, c, {n: Matrix.identity(k) for n, k in c.dims.items()}, check=False)

    @classmethod
    def zero(cls, source: Complex, target: Complex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition self o other."""
        ns = set(self.f) & set(other.f)
        return ChainMap(other.source, self.target,
                        {n: self.f[n] @ other.f[n] for n in ns}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        ns = set(self.f) | set(other.f)
        return ChainMap(self.source, self.target,
                        {n: self.at(n) + other.at(n) for n in ns}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + other.scale(-1)

    def scale(self, s) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: m.scale(s) for n, m in self.f.items()}, check=False)

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "f": {str(n): self.f[n].to_json() for n in sorted(self.f)}}

    @classmethod
    def from_json(cls, obj: dict, source: Complex | None = None,
                  target: Complex | None = None) -> "ChainMap":
        src = source or Complex.from_json(obj["source"])
        tgt = target or Complex.from_json(obj["target"])
        return cls(src, tgt, {int(n): Matrix.from_json(m) for n, m in obj.get("f", {}).items()})


def chain_homotopy_map(source: Complex, target: Complex, h: Mapping[int, Matrix]) -> ChainMap:
    """The null-homotopic map d h + h d built from h^n: source^n -> target^{n-1}."""
    def hh(n):
        m = h.get(n)
        return m if m is not None else Matrix.zeros(target.dim(n - 1), source.dim(n))
    lo = min(source.support[0], target.support[0]) - 1
    hi = max(source.support[1], target.support[1]) + 1
    f = {}
    for n in range(lo, hi + 1):
        f[n] = target.diff(n - 1) @ hh(n) + hh(n + 1) @ source.diff(n)
    return ChainMap(source, target, f)


# ---------------------------------------------------------------------------
# cohomology

@dataclass(frozen=True)
class Cohomology:
    """H^n of a complex in chosen coordinates.

    ``cycles`` spans ker d^n; ``projection`` maps cycle coordinates onto
    H^n coordinates.  ``classes`` sends a cocycle (ambient coordinates) to
    its class; ``representatives`` lifts the H^n basis back to cocycles.
    """
    degree: int
    dim: int
    cycles: Subspace
    projection: Matrix
    classes: Matrix
    representatives: Matrix


def cohomology(c: Complex, n: int) -> Cohomology:
    z = kernel_basis(c.diff(n))
    b = image_basis(c.diff(n - 1))
    dim, proj = quotient_data(b, z)
    classes = proj @ left_inverse(z.basis)
    reps = z.basis @ right_inverse(proj) if dim else Matrix.zeros(c.dim(n), 0)
    return Cohomology(n, dim, z, proj, classes, reps)


def betti(c: Complex, n: int) -> int:
    """dim H^n by rank-nullity only (no coordinates)."""
    return c.dim(n) - rank(c.diff(n)) - rank(c.diff(n - 1))


def cohomology_dims(c: Complex, degrees: Iterable[int] | None = None) -> dict[int, int]:
    degs = c.degrees() if degrees is None else degrees
    return {n: betti(c, n) for n in degs}


def is_acyclic(c: Complex) -> bool:
    return all(betti(c, n) == 0 for n in c.degrees())


def induced_map(f: ChainMap, n: int) -> Matrix:
    hs = cohomology(f.source, n)
    ht = cohomology(f.target, n)
    return ht.classes @ f.at(n) @ hs.representatives


def is_quasi_isomorphism(f: ChainMap) -> bool:
    return is_acyclic(cone(f)[0])


# ---------------------------------------------------------------------------
# constructions

def shift(c: Complex, k: int) -> Complex:
    sign = -1 if k % 2 else 1
    dims = {n - k: m for n, m in c.dims.items()}
    d = {n - k: m.scale(sign) for n, m in c.d.items()}
    return Complex(dims, d, check=False)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.source, k), shift(f.target, k),
                    {n - k: m for n, m in f.f.items()}, check=False)


def direct_sum_complex(*cs: Complex) -> Complex:
    degs = set()
    for c in cs:
        degs |= set(c.dims)
    dims = {n: sum(c.dim(n) for c in cs) for n in degs}
    d = {n: direct_sum(*(c.diff(n) for c in cs)) for n in degs}
    return Complex(dims, d, check=False)


def block_map(source_parts: Sequence[Complex], target_parts: Sequence[Complex],
              grid: Sequence[Sequence[ChainMap | None]], source: Complex | None = None,
              target: Complex | None = None) -> ChainMap:
    """Chain map between direct sums given by a grid of component maps
    (grid[i][j]: source_parts[j] -> target_parts[i])."""
    src = source or direct_sum_complex(*source_parts)
    tgt = target or direct_sum_complex(*target_parts)
    f = {}
    for n in set(src.dims) | set(tgt.dims):
        rows = [t.dim(n) for t in target_parts]
        cols = [s.dim(n) for s in source_parts]
        f[n] = block([[g.at(n) if g is not None else None for g in row] for row in grid],
                     rows, cols)
    return ChainMap(src, tgt, f)


def cone(f: ChainMap) -> tuple[Complex, ChainMap, ChainMap]:
    """Cone(f) with the inclusion of the target and projection onto source[1]."""
    a, b = f.source, f.target
    degs = set(n - 1 for n in a.dims) | set(b.dims)
    dims = {n: a.dim(n + 1) + b.dim(n) for n in degs}
    d = {}
    for n in degs:
        d[n] = block([[a.diff(n + 1).scale(-1), None],
                      [f.at(n + 1), b.diff(n)]],
                     [a.dim(n + 2), b.dim(n + 1)], [a.dim(n + 1), b.dim(n)])
    c = Complex(dims, d, check=False)
    incl = ChainMap(b, c, {n: block([[None], [Matrix.identity(b.dim(n))]],
                                    [a.dim(n + 1), b.dim(n)], [b.dim(n)])
                           for n in b.dims}, check=False)
    a1 = shift(a, 1)
    proj = ChainMap(c, a1, {n: block([[Matrix.identity(a.dim(n + 1)), None]],
                                     [a.dim(n + 1)], [a.dim(n + 1), b.dim(n)])
                            for n in degs}, check=False)
    return c, incl, proj


def fiber(f: ChainMap) -> Complex:
    return shift(cone(f)[0], -1)


def fiber_projection(f: ChainMap) -> ChainMap:
    """Fib(f) -> source, (a, b) -> a."""
    fib = fiber(f)
    a, b = f.source, f.target
    return ChainMap(fib, a, {n: block([[Matrix.identity(a.dim(n)), None]],
                                      [a.dim(n)], [a.dim(n), b.dim(n - 1)])
                             for n in fib.dims}, check=False)


def tensor(a: Complex, b: Complex) -> Complex:
    """Tensor product with the Koszul sign d(x y) = dx y + (-1)^|x| x dy.

    Degree n is ordered by increasing degree i of the left factor, each block
    a^i (x) b^{n-i} in Kronecker order."""
    out_dims: dict[int, int] = {}
    layout: dict[int, list[tuple[int, int, int]]] = {}
    for i in sorted(a.dims):
        for j in sorted(b.dims):
            n = i + j
            off = out_dims.get(n, 0)
            layout.setdefault(n, []).append((i, j, off))
            out_dims[n] = off + a.dim(i) * b.dim(j)
    d = {}
    for n, parts in layout.items():
        entries = []
        tgt_off = {(i, j): off for i, j, off in layout.get(n + 1, [])}
        for i, j, off in parts:
            if (i + 1, j) in tgt_off:
                m = kron(a.diff(i), Matrix.identity(b.dim(j)))
                o = tgt_off[(i + 1, j)]
                entries += [((r + o, c + off), v) for (r, c), v in m.items()]
            if (i, j + 1) in tgt_off:
                m = kron(Matrix.identity(a.dim(i)), b.diff(j))
                if i % 2:
                    m = -m
                o = tgt_off[(i, j + 1)]
                entries += [((r + o, c + off), v) for (r, c), v in m.items()]
        d[n] = Matrix(out_dims.get(n + 1, 0), out_dims[n], entries)
    return Complex(out_dims, d, check=False)


@dataclass
class DoubleComplex:
    """dims[(p, q)]; dh[(p, q)]: (p,q)->(p+1,q); dv[(p, q)]: (p,q)->(p,q+1).

    Differentials anticommute (d_h d_v + d_v d_h = 0)."""
    dims: dict
    dh: dict = field(default_factory=dict)
    dv: dict = field(default_factory=dict)

    def dim(self, p, q) -> int:
        return self.dims.get((p, q), 0)

    def h(self, p, q) -> Matrix:
        return self.dh.get((p, q)) or Matrix.zeros(self.dim(p + 1, q), self.dim(p, q))

    def v(self, p, q) -> Matrix:
        return self.dv.get((p, q)) or Matrix.zeros(self.dim(p, q + 1), self.dim(p, q))

    def check(self) -> None:
        for (p, q) in self.dims:
            if not (self.h(p + 1, q) @ self.h(p, q)).is_zero():
                raise ComplexError(f"d_h^2 != 0 at {(p, q)}")
            if not (self.v(p, q + 1) @ self.v(p, q)).is_zero():
                raise ComplexError(f"d_v^2 != 0 at {(p, q)}")
            if not (self.h(p, q + 1) @ self.v(p, q) + self.v(p + 1, q) @ self.h(p, q)).is_zero():
                raise ComplexError(f"d_h, d_v do not anticommute at {(p, q)}")

    @classmethod
    def from_commuting(cls, dims, dh, dv) -> "DoubleComplex":
        """Apply the sign trick (-1)^p to a commuting vertical differential."""
        return cls(dict(dims), dict(dh),
                   {(p, q): (m.scale(-1) if p % 2 else m) for (p, q), m in dv.items()})


def tot(dc: DoubleComplex) -> Complex:
    """Total complex; degree n lists the (p, q) blocks with p + q = n by increasing p."""
    layout: dict[int, dict[tuple[int, int], int]] = {}
    dims: dict[int, int] = {}
    for (p, q) in sorted(dc.dims):
        n = p + q
        layout.setdefault(n, {})[(p, q)] = dims.get(n, 0)
        dims[n] = dims.get(n, 0) + dc.dims[(p, q)]
    d = {}
    for n, parts in layout.items():
        entries = []
        tgt = layout.get(n + 1, {})
        for (p, q), off in parts.items():
            if (p + 1, q) in tgt:
                o = tgt[(p + 1, q)]
                entries += [((r + o, c + off), v) for (r, c), v in dc.h(p, q).items()]
            if (p, q + 1) in tgt:
                o = tgt[(p, q + 1)]
                entries += [((r + o, c + off), v) for (r, c), v in dc.v(p, q).items()]
        d[n] = Matrix(dims.get(n + 1, 0), dims[n], entries)
    return Complex(dims, d, check=False)


# ---------------------------------------------------------------------------
# fences

@dataclass
class FenceArrow:
    bottom: int
    top: int
    map: ChainMap
    direction: str = "right"   # "right" enters with +1, "left" with -1

    @property
    def sign(self) -> int:
        if self.direction not in ("right", "left"):
            raise ValueError(f"bad arrow direction {self.direction!r}")
        return 1 if self.direction == "right" else -1


@dataclass
class FenceDiagram:
    bottom_nodes: list
    top_nodes: list
    arrows: list

    def check(self) -> None:
        for k, a in enumerate(self.arrows):
            if a.map.source is not self.bottom_nodes[a.bottom] and \
                    a.map.source != self.bottom_nodes[a.bottom]:
                raise ComplexError(f"arrow {k}: source does not match bottom node {a.bottom}")
            if a.map.target is not self.top_nodes[a.top] and \
                    a.map.target != self.top_nodes[a.top]:
                raise ComplexError(f"arrow {k}: target does not match top node {a.top}")

    def difference_map(self) -> ChainMap:
        grid: list[list[ChainMap | None]] = [[None] * len(self.bottom_nodes)
                                             for _ in self.top_nodes]
        for a in self.arrows:
            g = a.map.scale(a.sign)
            cur = grid[a.top][a.bottom]
            grid[a.top][a.bottom] = g if cur is None else cur + g
        return block_map(self.bottom_nodes, self.top_nodes, grid)


def holim_fence(diagram: FenceDiagram) -> Complex:
    """Homotopy limit: the fiber of the signed difference map
    (+) bottom -> (+) top."""
    diagram.check()
    if not diagram.bottom_nodes and not diagram.top_nodes:
        return Complex.zero()
    return fiber(diagram.difference_map())


# ---------------------------------------------------------------------------
# long exact sequences

@dataclass
class SequenceSlot:
    label: str
    degree: int
    dim: int


@dataclass
class ExactSequenceReport:
    """A finite piece of a long exact sequence.

    ``slots[k]`` is a group, ``maps[k]`` the matrix slots[k] -> slots[k+1].
    At each interior slot, exactness means rank(in) = dim - rank(out)."""
    slots: list
    maps: list
    positions: list = field(default_factory=list)

    def __post_init__(self):
        self.positions = []
        for k, s in enumerate(self.slots):
            rin = rank(self.maps[k - 1]) if k > 0 else 0
            rout = rank(self.maps[k]) if k < len(self.maps) else 0
            self.positions.append({"label": s.label, "degree": s.degree, "dim": s.dim,
                                   "rank_in": rin, "rank_out": rout,
                                   "dim_ker": s.dim - rout, "dim_im": rin})

    def exact_at(self, k: int) -> bool:
        p = self.positions[k]
        return p["dim_ker"] == p["dim_im"]

    @property
    def exact(self) -> bool:
        # the two ends are only partial; check interior slots
        return all(self.exact_at(k) for k in range(1, len(self.slots) - 1))

    def dims(self, label: str) -> dict[int, int]:
        return {s.degree: s.dim for s in self.slots if s.label == label}

    def to_json(self) -> dict:
        return {"positions": self.positions, "exact": self.exact}


def les_of_cone(f: ChainMap, degrees: Sequence[int] | None = None,
                labels: tuple[str, str, str] = ("source", "target", "cone")) -> ExactSequenceReport:
    """H^n(A) -> H^n(B) -> H^n(Cone f) -> H^{n+1}(A) -> ... over a degree window."""
    c, incl, proj = cone(f)
    a1 = proj.target
    if degrees is None:
        lo = min(f.source.support[0] - 1, f.target.support[0], c.support[0]) - 1
        hi = max(f.source.support[1], f.target.support[1], c.support[1]) + 1
        degrees = range(lo, hi + 1)
    degrees = list(degrees)
    hA = {n: cohomology(f.source, n) for n in degrees + [degrees[-1] + 1]}
    hB = {n: cohomology(f.target, n) for n in degrees}
    hC = {n: cohomology(c, n) for n in degrees}
    hA1 = {n: cohomology(a1, n) for n in degrees}
    slots, maps = [], []
    for n in degrees:
        slots += [SequenceSlot(labels[0], n, hA[n].dim), SequenceSlot(labels[1], n, hB[n].dim),
                  SequenceSlot(labels[2], n, hC[n].dim)]
        maps.append(hB[n].classes @ f.at(n) @ hA[n].representatives)
        maps.append(hC[n].classes @ incl.at(n) @ hB[n].representatives)
        # H^n(A[1]) and H^{n+1}(A) share cocycles; convert coordinates
        conn = hA1[n].classes @ proj.at(n) @ hC[n].representatives
        to_a = hA[n + 1].classes @ hA1[n].representatives
        maps.append(to_a @ conn)
    maps.pop()
    return ExactSequenceReport(slots, maps)
