"""Complexes with a Frobenius quasi-isomorphism, Tate twists and
absolute rigid cohomology.

The Frobenius of the base field is taken to be the identity, so phi is an
honest linear chain endomorphism.  Scalars are exact rationals; p is a
configured prime (default 5).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .cochain import ChainMap, Complex, betti, cohomology, cone, direct_sum_complex, induced_map
from .linalg import Matrix, direct_sum, inverse, kron, rank

DEFAULT_PRIME = 5


class FrobComplex:
    def __init__(self, complex: Complex, phi: ChainMap | dict, prime: int = DEFAULT_PRIME,
                 check: bool = True):
        self.complex = complex
        if not isinstance(phi, ChainMap):
            phi = ChainMap(complex, complex, phi)
        self.phi = phi
        self.prime = prime
        if check:
            self.check()

    def check(self) -> None:
        if self.phi.source != self.complex or self.phi.target != self.complex:
            raise ValueError("phi must be an endomorphism of the complex")
        self.phi.check()
        for n in self.complex.degrees():
            h = induced_map(self.phi, n)
            if rank(h) != h.rows:
                raise ValueError(f"phi is not a quasi-isomorphism in degree {n}")

    @classmethod
    def unit(cls, prime: int = DEFAULT_PRIME) -> "FrobComplex":
        c = Complex({0: 1})
        return cls(c, ChainMap.identity(c), prime)

    @classmethod
    def from_cohomology(cls, blocks: dict, prime: int = DEFAULT_PRIME) -> "FrobComplex":
        """Zero-differential complex with phi given per degree (matrix or list of rows)."""
        mats = {n: (m if isinstance(m, Matrix) else Matrix.from_rows(m)) for n, m in blocks.items()}
        c = Complex({n: m.rows for n, m in mats.items()})
        return cls(c, ChainMap(c, c, mats), prime)

    def scaled(self, s) -> "FrobComplex":
        return FrobComplex(self.complex, self.phi.scale(s), self.prime, check=False)

    def __repr__(self) -> str:
        return f"FrobComplex(dims={dict(sorted(self.complex.dims.items()))}, p={self.prime})"

    def to_json(self) -> dict:
        return {"prime": self.prime, "complex": self.complex.to_json(),
                "phi": {str(n): self.phi.f[n].to_json() for n in sorted(self.phi.f)}}

    @classmethod
    def from_json(cls, obj: dict) -> "FrobComplex":
        c = Complex.from_json(obj["complex"])
        phi = {int(n): Matrix.from_json(m) for n, m in obj["phi"].items()}
        return cls(c, ChainMap(c, c, phi), obj.get("prime", DEFAULT_PRIME))


def twist(m: FrobComplex, n: int) -> FrobComplex:
    """The Tate twist m(n): phi multiplied by p^{-n}."""
    if n == 0:
        return m
    return m.scaled(Fraction(1, m.prime ** n) if n > 0 else Fraction(m.prime ** (-n)))


def direct_sum_frob(*ms: FrobComplex) -> FrobComplex:
    c = direct_sum_complex(*(x.complex for x in ms))
    degs = set(c.dims)
    phi = {n: direct_sum(*(x.phi.at(n) for x in ms)) for n in degs}
    return FrobComplex(c, ChainMap(c, c, phi), ms[0].prime)


# ---------------------------------------------------------------------------
# Hom complexes

@dataclass
class HomComplex:
    """Hom^k(M, N) = sum_j Hom(M^j, N^{j+k}); an element is stored as the
    row-major flattening of each block, blocks ordered by j."""
    complex: Complex
    blocks: dict        # k -> list of (j, offset, rows, cols)


def _hom_blocks(M: Complex, N: Complex) -> dict:
    out = {}
    for k in range(N.support[0] - M.support[1], N.support[1] - M.support[0] + 1):
        off, lst = 0, []
        for j in sorted(M.dims):
            r, c = N.dim(j + k), M.dim(j)
            if r and c:
                lst.append((j, off, r, c))
                off += r * c
        if lst:
            out[k] = lst
    return out


def _left_mult(A: Matrix, cols: int) -> Matrix:
    """X -> A X on row-major flattened matrices with ``cols`` columns."""
    return kron(A, Matrix.identity(cols))


def _right_mult(B: Matrix, rows: int) -> Matrix:
    """X -> X B on row-major flattened matrices with ``rows`` rows."""
    return kron(Matrix.identity(rows), B.T)


def _assemble(src_blocks, tgt_blocks, src_size, tgt_size, piece) -> Matrix:
    tpos = {j: (off, r, c) for j, off, r, c in tgt_blocks}
    entries = []
    for j, off, r, c in src_blocks:
        for tj, mat in piece(j, r, c):
            if tj not in tpos or mat is None:
                continue
            toff = tpos[tj][0]
            entries += [((rr + toff, cc + off), v) for (rr, cc), v in mat.items()]
    return Matrix(tgt_size, src_size, entries)


def hom_complex(M: Complex, N: Complex) -> HomComplex:
    """d x = d_N x - (-1)^k x d_M."""
    blocks = _hom_blocks(M, N)
    dims = {k: sum(r * c for _, _, r, c in lst) for k, lst in blocks.items()}
    d = {}
    for k, lst in blocks.items():
        if k + 1 not in blocks:
            continue
        sign = -1 if k % 2 else 1

        def piece(j, r, c, k=k, sign=sign):
            # d_N x lands in Hom(M^j, N^{j+k+1}); x d_M in Hom(M^{j-1}, N^{j+k})
            out = []
            if N.dim(j + k + 1):
                out.append((j, _left_mult(N.diff(j + k), c)))
            if M.dim(j - 1):
                out.append((j - 1, _right_mult(M.diff(j - 1), r).scale(-sign)))
            return out
        d[k] = _assemble(lst, blocks[k + 1], dims[k], dims[k + 1], piece)
    return HomComplex(Complex(dims, d), blocks)


def xi(m: FrobComplex, n: FrobComplex) -> ChainMap:
    """x -> x phi_M - phi_N x on Hom(M, N)."""
    h = hom_complex(m.complex, n.complex)
    f = {}
    for k, lst in h.blocks.items():
        def piece(j, r, c, k=k):
            return [(j, _right_mult(m.phi.at(j), r) - _left_mult(n.phi.at(j + k), c))]
        f[k] = _assemble(lst, lst, h.complex.dim(k), h.complex.dim(k), piece)
    return ChainMap(h.complex, h.complex, f)


def hom_drig(m: FrobComplex, n: FrobComplex, i: int) -> int:
    """dim Hom(M, N[i]) = dim H^{i-1}(Cone xi')."""
    c, _, _ = cone(xi(m, n))
    return betti(c, i - 1)


def frobenius_cone(m: FrobComplex, i: int, besser: bool = False) -> ChainMap:
    """id - phi/p^i on m (or phi - p^i id with ``besser``)."""
    c = m.complex
    p_i = Fraction(m.prime) ** i
    f = {}
    for n in c.dims:
        if besser:
            f[n] = m.phi.at(n) - Matrix.scalar(c.dim(n), p_i)
        else:
            f[n] = Matrix.identity(c.dim(n)) - m.phi.at(n).scale(1 / p_i)
    return ChainMap(c, c, f)


def abs_rigid(m: FrobComplex, i: int, n: int) -> int:
    """dim H^n_phi(m, i) = dim H^{n-1}(Cone(id - phi/p^i))."""
    return betti(cone(frobenius_cone(m, i))[0], n - 1)


def frobenius_on_cohomology(m: FrobComplex, n: int) -> Matrix:
    return induced_map(m.phi, n)


# ---------------------------------------------------------------------------
# eigenvalues

def charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients c_0..c_n of det(t I - a) (Faddeev-LeVerrier)."""
    n = a.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = Matrix.zeros(n, n)
    ident = Matrix.identity(n)
    for k in range(1, n + 1):
        mk = a @ mk + ident.scale(coeffs[n - k + 1])
        am = a @ mk
        tr = sum((am[i, i] for i in range(n)), Fraction(0))
        coeffs[n - k] = -tr / k
    return coeffs


def _divisors(x: int) -> list[int]:
    x = abs(x)
    out = []
    d = 1
    while d * d <= x:
        if x % d == 0:
            out += [d, x // d]
        d += 1
    return sorted(set(out))


def rational_roots(coeffs: Sequence[Fraction]) -> dict[Fraction, int]:
    """Rational roots with multiplicities of sum coeffs[k] t^k."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    roots: dict[Fraction, int] = {}
    while len(c) > 1 and c[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        c = c[1:]
    found = True
    while len(c) > 1 and found:
        found = False
        den = 1
        for x in c:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in c]
        for num in _divisors(ints[0]):
            for dd in _divisors(ints[-1]):
                for s in (1, -1):
                    r = Fraction(s * num, dd)
                    val = Fraction(0)
                    for x in reversed(c):
                        val = val * r + x
                    if val == 0:
                        roots[r] = roots.get(r, 0) + 1
                        # synthetic division
                        q = [Fraction(0)] * (len(c) - 1)
                        acc = Fraction(0)
                        for k in range(len(c) - 1, 0, -1):
                            acc = acc * r + c[k]
                            q[k - 1] = acc
                        c = q
                        found = True
                        break
                if found:
                    break
            if found:
                break
    return roots


def eigenvalues(m: FrobComplex, n: int) -> list[Fraction]:
    """Rational eigenvalues (with multiplicity, sorted) of phi on H^n.
    Raises ValueError if some eigenvalue is not rational."""
    h = frobenius_on_cohomology(m, n)
    roots = rational_roots(charpoly(h))
    if sum(roots.values()) != h.rows:
        raise ValueError(f"phi on H^{n} has irrational eigenvalues")
    out = []
    for r in sorted(roots):
        out += [r] * roots[r]
    return out


def minimal_model(m: FrobComplex) -> FrobComplex:
    """Cohomology with zero differential and the induced Frobenius."""
    blocks = {}
    for n in m.complex.degrees():
        h = frobenius_on_cohomology(m, n)
        if h.rows:
            blocks[n] = h
    return FrobComplex.from_cohomology(blocks, m.prime)


# ---------------------------------------------------------------------------
# the short exact sequence

@dataclass
class SESReport:
    degree: int
    twist: int
    left: int          # dim H^{n-1} / Im(id - phi/p^i)
    middle: int        # dim H^n_phi
    right: int         # dim ker(phi - p^i) on H^n
    exact_left: bool
    exact_middle: bool
    exact_right: bool
    details: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.exact_left and self.exact_middle and self.exact_right

    def to_json(self) -> dict:
        return {"degree": self.degree, "twist": self.twist, "left": self.left,
                "middle": self.middle, "right": self.right, "exact": self.exact,
                "exact_at": [self.exact_left, self.exact_middle, self.exact_right]}


def ses_check(m: FrobComplex, i: int, n: int) -> SESReport:
    """0 -> H^{n-1}/Im(id - phi/p^i) -> H^n_phi -> H^n^{phi = p^i} -> 0."""
    g = frobenius_cone(m, i)
    c, incl, proj = cone(g)
    hm1 = cohomology(m.complex, n - 1)
    hn = cohomology(m.complex, n)
    hc = cohomology(c, n - 1)
    g_prev = induced_map(g, n - 1)
    alpha = hc.classes @ incl.at(n - 1) @ hm1.representatives
    # the connecting map: cocycles of M[1] in degree n-1 are the cocycles of M^n
    beta = hn.classes @ proj.at(n - 1) @ hc.representatives
    p_i = Fraction(m.prime) ** i
    eig = frobenius_on_cohomology(m, n) - Matrix.scalar(hn.dim, p_i)
    left = hm1.dim - rank(g_prev)
    right = hn.dim - rank(eig)
    r_alpha, r_beta = rank(alpha), rank(beta)
    # injective on the cokernel: ker(alpha) = im(g) on H^{n-1}
    exact_left = (alpha @ g_prev).is_zero() and r_alpha == left
    exact_middle = (beta @ alpha).is_zero() and r_alpha == hc.dim - r_beta
    exact_right = (eig @ beta).is_zero() and r_beta == right
    return SESReport(n, i, left, hc.dim, right, exact_left, exact_middle, exact_right,
                     {"rank_alpha": r_alpha, "rank_beta": r_beta})


# ---------------------------------------------------------------------------
# random instances

def _random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        mat = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], n)
        if rank(mat) == n:
            return mat


def random_frob_complex(rng: random.Random, prime: int = DEFAULT_PRIME, max_dim: int = 4,
                        max_width: int = 4) -> FrobComplex:
    """A FrobComplex built as (cohomology) + (acyclic pairs), with a
    triangular Frobenius on cohomology, arbitrary admissible cross terms and
    a random change of basis in every degree.

    Cohomological eigenvalues are drawn from powers of p (so that fixed
    parts appear for small twists) together with a few other units."""
    width = rng.randint(1, max_width)
    lo = rng.randint(-1, 1)
    degs = list(range(lo, lo + width))
    h = {n: rng.randint(0, 2) for n in degs}
    pairs = {n: 0 for n in degs}
    for n in degs[:-1]:
        room = min(max_dim - h[n] - pairs.get(n - 1, 0), max_dim - h[n + 1])
        pairs[n] = rng.randint(0, max(0, room))
    dims = {n: h[n] + pairs[n] + pairs.get(n - 1, 0) for n in degs}
    # basis in degree n: [H^n | A^n (sources) | B^n (targets from n-1)]
    eig_pool = [Fraction(prime) ** k for k in range(-3, 4)] + [Fraction(-1), Fraction(2)]
    d, phi = {}, {}
    A_maps = {n: [[rng.randint(-2, 2) for _ in range(pairs[n])] for _ in range(pairs[n])]
              for n in degs}
    for n in degs:
        hn, an, bn = h[n], pairs[n], pairs.get(n - 1, 0)
        entries = []
        # phi on H: upper triangular with chosen eigenvalues, plus H -> B
        for r in range(hn):
            entries.append(((r, r), rng.choice(eig_pool)))
            for c in range(r + 1, hn):
                if rng.random() < 0.5:
                    entries.append(((r, c), rng.randint(-2, 2)))
        for r in range(bn):
            for c in range(hn):
                entries.append(((hn + an + r, c), rng.randint(-1, 1)))
        # phi on A: A -> A (X), A -> B (Y), A -> H (Z)
        X = A_maps[n]
        for r in range(an):
            for c in range(an):
                entries.append(((hn + r, hn + c), X[r][c]))
            for c in range(an):
                for rr in range(bn):
                    entries.append(((hn + an + rr, hn + c), rng.randint(-1, 1)))
                for rr in range(hn):
                    entries.append(((rr, hn + c), rng.randint(-1, 1)))
        # phi on B^n equals X of A^{n-1} (forced by the chain map condition)
        Xp = A_maps.get(n - 1, [])
        for r in range(bn):
            for c in range(bn):
                entries.append(((hn + an + r, hn + an + c), Xp[r][c]))
        phi[n] = Matrix(dims[n], dims[n], entries)
        if n + 1 in dims:
            d[n] = Matrix(dims[n + 1], dims[n],
                          [((h[n + 1] + pairs[n + 1] + k, hn + k), 1) for k in range(an)])
    change = {n: _random_invertible(rng, dims[n]) for n in degs}
    inv = {n: inverse(change[n]) for n in degs}
    d2 = {n: change[n + 1] @ mat @ inv[n] for n, mat in d.items()}
    phi2 = {n: change[n] @ mat @ inv[n] for n, mat in phi.items()}
    c = Complex(dims, d2)
    return FrobComplex(c, ChainMap(c, c, phi2), prime)
