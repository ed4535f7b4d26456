"""Thom-Sullivan normalization of a truncated cosimplicial DGA.

An element of total degree N is a family (x_k)_{k <= L} with
x_k in sum_{q + a = N} omega_k^q (x) M^k_a, subject to

    (id (x) delta_i) x_k = (delta^i (x) id) x_{k+1}
    (sigma^i (x) id) x_k = (id (x) sigma_i) x_{k+1}

Forms are truncated at weight D (polynomial degree plus form degree).  The differential is
D(alpha (x) m) = d alpha (x) m + (-1)^q alpha (x) d m for alpha of form degree q.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .cochain import ChainMap, Complex, cohomology, cohomology_dims, induced_map
from .cosimplicial import (CosimplicialDGA, TruncationExceeded, aw_product_total,
                           simple_complex_dga, tot_blocks)
from .forms import (PolyForm, coface_matrix, codegeneracy_matrix, d_matrix, form_basis,
                    integration_row, wedge)
from .linalg import Matrix, kron, rank, rref, solve, _kernel_from_rref


@dataclass
class _Layout:
    """Blocks (k, q, a) of the ambient product space in one total degree."""
    blocks: list          # (k, q, a, offset, n_forms, n_module)
    size: int
    index: dict           # (k, q, a) -> position in blocks


def _layout(m: CosimplicialDGA, N: int, D: int) -> _Layout:
    # top level first: eliminating from the top keeps the system sparse
    blocks, off, index = [], 0, {}
    for k in range(m.L, -1, -1):
        for q in range(k + 1):
            a = N - q
            nm = m.levels[k].dim(a)
            nf = len(form_basis(k, q, D))
            if nm and nf:
                index[(k, q, a)] = len(blocks)
                blocks.append((k, q, a, off, nf, nm))
                off += nf * nm
    return _Layout(blocks, off, index)


def _place(rows: int, cols: int, pieces) -> Matrix:
    """Assemble a matrix from (row offset, col offset, Matrix) pieces."""
    entries = []
    for ro, co, mat in pieces:
        entries += [((r + ro, c + co), v) for (r, c), v in mat.items()]
    return Matrix(rows, cols, entries)


def _constraints(m: CosimplicialDGA, lay: _Layout, D: int) -> Matrix:
    rows_total = 0
    pieces = []
    for k, q, a, off, nf, nm in lay.blocks:
        if k == m.L:
            continue
        nxt = lay.index.get((k + 1, q, a))
        nxt_blk = lay.blocks[nxt] if nxt is not None else None
        nm1 = m.levels[k + 1].dim(a)
        # faces: equations live in omega_k^q (x) M^{k+1}_a
        for i in range(k + 2):
            size = nf * nm1
            if not size:
                continue
            pieces.append((rows_total, off, kron(Matrix.identity(nf),
                                                 m.coface(i, k + 1).at(a))))
            if nxt_blk is not None:
                fm = coface_matrix(k + 1, i, q, D)
                pieces.append((rows_total, nxt_blk[3], -kron(fm, Matrix.identity(nm1))))
            rows_total += size
        # degeneracies: equations live in omega_{k+1}^q (x) M^k_a
        nf1 = len(form_basis(k + 1, q, D))
        for i in range(k + 1):
            size = nf1 * nm
            if not size:
                continue
            pieces.append((rows_total, off, kron(codegeneracy_matrix(k + 1, i, q, D),
                                                 Matrix.identity(nm))))
            if nxt_blk is not None:
                pieces.append((rows_total, nxt_blk[3],
                               -kron(Matrix.identity(nf1), m.codegeneracy(i, k + 1).at(a))))
            rows_total += size
    # blocks at level k+1 with no partner at level k still meet the equations
    for k, q, a, off, nf, nm in lay.blocks:
        if k == 0 or (k - 1, q, a) in lay.index:
            continue
        nfm = len(form_basis(k - 1, q, D))
        nmm = m.levels[k - 1].dim(a)
        for i in range(k + 1):
            size = nfm * nm
            if size:
                pieces.append((rows_total, off, kron(coface_matrix(k, i, q, D), Matrix.identity(nm))))
                rows_total += size
        for i in range(k):
            size = len(form_basis(k, q, D)) * nmm
            if size:
                pieces.append((rows_total, off,
                               kron(Matrix.identity(nf), m.codegeneracy(i, k).at(a))))
                rows_total += size
    return _place(rows_total, lay.size, pieces)


class TSComplex:
    """The truncated Thom-Sullivan complex with explicit bases.

    ``basis[N]`` has independent columns spanning the compatible families in
    the ambient space of degree N; ``free[N]`` lists the ambient coordinates
    at which the basis restricts to the identity, so coordinates of a family
    are read off directly."""

    def __init__(self, source: CosimplicialDGA, D: int, degrees: Sequence[int] | None = None):
        self.source = source
        self.L = source.L
        self.D = D
        ints = source.internal_degrees()
        if degrees is None:
            lo = min(ints) if ints else 0
            hi = (max(ints) if ints else 0) + self.L
            degrees = range(lo, hi + 1)
        self.degrees = list(degrees)
        self.layouts = {}
        self.basis = {}
        self.free = {}
        for N in self.degrees + [self.degrees[-1] + 1]:
            lay = _layout(source, N, D)
            self.layouts[N] = lay
            red = rref(_constraints(source, lay, D))
            self.basis[N] = _kernel_from_rref(red).basis
            self.free[N] = red.free
        d = {}
        for N in self.degrees:
            img = self.ambient_differential(N) @ self.basis[N]
            d[N] = self._coords_matrix(N + 1, img)
        dims = {N: self.basis[N].cols for N in self.degrees}
        self.complex = Complex(dims, {N: d[N] for N in self.degrees if N + 1 in dims})

    # coordinates ------------------------------------------------------
    def _coords_matrix(self, N: int, amb: Matrix) -> Matrix:
        free = self.free[N]
        pos = {f: j for j, f in enumerate(free)}
        return Matrix(len(free), amb.cols,
                      [((pos[r], c), v) for (r, c), v in amb.items() if r in pos])

    def coordinates(self, N: int, vec: Sequence, check: bool = True) -> list[Fraction]:
        """Coordinates of an ambient vector; raises if it is not compatible."""
        coords = [Fraction(vec[f]) for f in self.free[N]]
        if check and self.basis[N].apply(coords) != [Fraction(v) for v in vec]:
            raise ValueError("vector is not a compatible family")
        return coords

    def ambient(self, N: int, coords: Sequence) -> list[Fraction]:
        return self.basis[N].apply(list(coords))

    def is_compatible(self, N: int, vec: Sequence) -> bool:
        try:
            self.coordinates(N, vec)
        except ValueError:
            return False
        return True

    # differential -----------------------------------------------------
    def ambient_differential(self, N: int) -> Matrix:
        src, tgt = self.layouts[N], self.layouts[N + 1]
        pieces = []
        for k, q, a, off, nf, nm in src.blocks:
            j = tgt.index.get((k, q + 1, a))
            if j is not None:
                pieces.append((tgt.blocks[j][3], off,
                               kron(d_matrix(k, q, self.D), Matrix.identity(nm))))
            j = tgt.index.get((k, q, a + 1))
            if j is not None:
                dm = self.source.levels[k].diff(a)
                blk = kron(Matrix.identity(nf), dm)
                pieces.append((tgt.blocks[j][3], off, -blk if q % 2 else blk))
        return _place(tgt.size, src.size, pieces)

    # elements ---------------------------------------------------------
    def unit(self) -> list[Fraction]:
        lay = self.layouts[0]
        out = [Fraction(0)] * lay.size
        for k, q, a, off, nf, nm in lay.blocks:
            if q == 0 and a == 0:
                # constant form 1 is basis index 0 in degree 0
                for r, v in enumerate(self.source.unit(k)):
                    out[off + r] = v
        return out

    def blocks_of(self, N: int, vec: Sequence):
        """Yield (k, q, a, {form index: module vector}) for the nonzero parts of vec."""
        for k, q, a, off, nf, nm in self.layouts[N].blocks:
            parts = {}
            for f in range(nf):
                seg = vec[off + f * nm: off + (f + 1) * nm]
                if any(seg):
                    parts[f] = list(seg)
            if parts:
                yield k, q, a, parts

    def dims(self) -> dict[int, int]:
        return dict(self.complex.dims)

    def cohomology_dims(self) -> dict[int, int]:
        return cohomology_dims(self.complex, self.degrees)


def ts_normalize(m: CosimplicialDGA, D: int, degrees: Sequence[int] | None = None) -> TSComplex:
    return TSComplex(m, D, degrees)


@lru_cache(maxsize=None)
def _wedge_basis(k: int, q1: int, q2: int, D: int, f1: int, f2: int):
    b1 = form_basis(k, q1, D)[f1]
    b2 = form_basis(k, q2, D)[f2]
    return wedge(PolyForm(k, q1, {b1: 1}), PolyForm(k, q2, {b2: 1}))


def ts_product(t: TSComplex, N1: int, x: Sequence, N2: int, y: Sequence,
               target: TSComplex | None = None) -> list[Fraction]:
    """Levelwise (alpha (x) m)(alpha' (x) m') = (-1)^{|m||alpha'|} alpha^alpha' (x) m m'.

    x, y are ambient vectors of ``t``; the result is an ambient vector of
    ``target`` (default ``t``) in degree N1 + N2."""
    tgt = target or t
    m = t.source
    lay = tgt.layouts[N1 + N2]
    out = [Fraction(0)] * lay.size
    index = {}
    for kk, q, a, off, nf, nm in lay.blocks:
        index[(kk, q, a)] = (off, nm, {b: j for j, b in enumerate(form_basis(kk, q, tgt.D))})
    ys = {}
    for k, q2, b, parts in t.blocks_of(N2, y):
        ys.setdefault(k, []).append((q2, b, parts))
    for k, q1, a, xparts in t.blocks_of(N1, x):
        for q2, b, yparts in ys.get(k, []):
            key = (k, q1 + q2, a + b)
            sign = -1 if (a * q2) % 2 else 1
            for f1, mx in xparts.items():
                for f2, my in yparts.items():
                    w = _wedge_basis(k, q1, q2, t.D, f1, f2)
                    if w.is_zero():
                        continue
                    prod = m.multiply(k, a, mx, b, my)
                    if not any(prod):
                        continue
                    if key not in index:
                        raise TruncationExceeded(f"product leaves the stored range at {key}")
                    off, nm, fidx = index[key]
                    for term, c in w.terms.items():
                        j = fidx.get(term)
                        if j is None:
                            raise TruncationExceeded(
                                f"wedge of weight {sum(term[0]) + len(term[1])} exceeds bound {tgt.D}")
                        for r, v in enumerate(prod):
                            if v:
                                out[off + j * nm + r] += sign * c * v
    return out


def embed(t: TSComplex, big: TSComplex, N: int, vec: Sequence) -> list[Fraction]:
    """Map an ambient vector of ``t`` into ``big`` (same source, larger D)."""
    out = [Fraction(0)] * big.layouts[N].size
    bidx = {(k, q, a): (off, nm) for k, q, a, off, nf, nm in big.layouts[N].blocks}
    for k, q, a, parts in t.blocks_of(N, vec):
        off, nm = bidx[(k, q, a)]
        fidx = {b: j for j, b in enumerate(form_basis(k, q, big.D))}
        small = form_basis(k, q, t.D)
        for f, mv in parts.items():
            j = fidx[small[f]]
            for r, v in enumerate(mv):
                out[off + j * nm + r] = v
    return out


def integration_matrix(t: TSComplex, N: int) -> Matrix:
    """Ambient degree-N space -> Tot(sM)^N: integrate the form-degree-k part at level k."""
    blocks = tot_blocks(t.source, N)
    tpos = {(q, a): off for q, a, off, _ in blocks}
    size = sum(k for *_, k in blocks)
    pieces = []
    for k, q, a, off, nf, nm in t.layouts[N].blocks:
        if q != k:
            continue
        pieces.append((tpos[(k, a)], off, kron(integration_row(k, t.D), Matrix.identity(nm))))
    return _place(size, t.layouts[N].size, pieces)


def integration_map(t: TSComplex) -> ChainMap:
    """The integration chain map from the TS complex to Tot(sM)."""
    s = simple_complex_dga(t.source)
    f = {N: integration_matrix(t, N) @ t.basis[N] for N in t.degrees}
    cut = t.complex
    return ChainMap(cut, s, f, check=False)


def integration_is_chain_map(t: TSComplex) -> bool:
    s = simple_complex_dga(t.source)
    for N in t.degrees:
        if N + 1 not in t.layouts:
            continue
        lhs = integration_matrix(t, N + 1) @ t.ambient_differential(N) @ t.basis[N]
        rhs = s.diff(N) @ integration_matrix(t, N) @ t.basis[N]
        if lhs != rhs:
            return False
    return True


@dataclass
class StabilizationReport:
    L: int
    by_degree_bound: dict
    stable_D: int | None
    simple_dims: dict
    agrees_with_simple: bool

    def to_json(self) -> dict:
        return {"L": self.L,
                "dims": {str(D): {str(n): v for n, v in sorted(d.items())}
                         for D, d in sorted(self.by_degree_bound.items())},
                "stable_D": self.stable_D,
                "simple_dims": {str(n): v for n, v in sorted(self.simple_dims.items())},
                "agrees_with_simple": self.agrees_with_simple}


def trusted_degrees(m: CosimplicialDGA) -> list[int]:
    """Total degrees below L - 1 (cohomology claims are made only there)."""
    ints = m.internal_degrees()
    lo = min(ints) if ints else 0
    return [n for n in range(lo, m.L - 1)]


def stabilization_scan(m: CosimplicialDGA, D_range: Sequence[int]) -> StabilizationReport:
    degs = trusted_degrees(m)
    results = {}
    for D in D_range:
        t = TSComplex(m, D)
        hd = t.cohomology_dims()
        results[D] = {n: hd.get(n, 0) for n in degs}
    stable = None
    ordered = list(D_range)
    for j, D in enumerate(ordered):
        if all(results[E] == results[D] for E in ordered[j:]):
            stable = D
            break
    sdims = cohomology_dims(simple_complex_dga(m), degs)
    agrees = stable is not None and results[stable] == sdims
    return StabilizationReport(m.L, results, stable, sdims, agrees)


@dataclass
class TSVerification:
    L: int
    D: int
    chain_map: bool
    iso_by_degree: dict
    commutative: bool
    compatible: bool
    multiplicative: bool
    products_checked: int

    @property
    def passed(self) -> bool:
        return (self.chain_map and all(self.iso_by_degree.values()) and self.commutative
                and self.compatible and self.multiplicative)

    def to_json(self) -> dict:
        return {"L": self.L, "D": self.D, "chain_map": self.chain_map,
                "iso_by_degree": {str(n): v for n, v in sorted(self.iso_by_degree.items())},
                "commutative": self.commutative, "compatible": self.compatible,
                "multiplicative": self.multiplicative,
                "products_checked": self.products_checked, "passed": self.passed}


def ts_verify(m: CosimplicialDGA, D: int, samples: int = 4, seed: int = 0) -> TSVerification:
    """Integration is a chain map and a quasi-isomorphism in the trusted
    degrees; products of cohomology representatives are strictly graded
    commutative compatible families and integrate to the Alexander-Whitney
    product up to a coboundary.  ``samples`` random pairs of families per
    degree pair are also checked for strict graded commutativity."""
    t = TSComplex(m, D)
    big = TSComplex(m, 2 * D)
    s = simple_complex_dga(m)
    f = integration_map(t)
    degs = trusted_degrees(m)
    iso = {}
    for n in degs:
        h = induced_map(f, n)
        iso[n] = h.rows == h.cols and rank(h) == h.rows
    reps = {}
    for n in degs:
        h = cohomology(t.complex, n)
        reps[n] = [t.ambient(n, h.representatives.column(j)) for j in range(h.dim)]
    comm = compat = mult = True
    count = 0
    for n1 in degs:
        for n2 in degs:
            if n1 + n2 not in degs:
                continue
            for x in reps[n1]:
                for y in reps[n2]:
                    count += 1
                    bx, by = embed(t, big, n1, x), embed(t, big, n2, y)
                    xy = ts_product(big, n1, bx, n2, by)
                    yx = ts_product(big, n2, by, n1, bx)
                    sign = -1 if (n1 * n2) % 2 else 1
                    comm &= xy == [sign * v for v in yx]
                    compat &= big.is_compatible(n1 + n2, xy)
                    ix = integration_matrix(t, n1).apply(x)
                    iy = integration_matrix(t, n2).apply(y)
                    lhs = integration_matrix(big, n1 + n2).apply(xy)
                    rhs = aw_product_total(m, n1, ix, n2, iy)
                    diff = Matrix.column_vector([a - b for a, b in zip(lhs, rhs)])
                    mult &= solve(s.diff(n1 + n2 - 1), diff) is not None
    rng = random.Random(seed)
    for n1 in degs:
        for n2 in degs:
            if n1 + n2 not in degs or not t.complex.dim(n1) or not t.complex.dim(n2):
                continue
            for _ in range(samples):
                count += 1
                x = embed(t, big, n1, t.ambient(
                    n1, [rng.randint(-2, 2) for _ in range(t.complex.dim(n1))]))
                y = embed(t, big, n2, t.ambient(
                    n2, [rng.randint(-2, 2) for _ in range(t.complex.dim(n2))]))
                xy = ts_product(big, n1, x, n2, y)
                yx = ts_product(big, n2, y, n1, x)
                sign = -1 if (n1 * n2) % 2 else 1
                comm &= xy == [sign * v for v in yx]
                compat &= big.is_compatible(n1 + n2, xy)
    return TSVerification(m.L, D, integration_is_chain_map(t), iso, comm, compat, mult, count)
