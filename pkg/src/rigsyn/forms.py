"""Polynomial differential forms on the algebraic n-simplex.

Coordinates T_0..T_n with sum T_i = 1; T_0 is eliminated, so a form on the
n-simplex is a polynomial in T_1..T_n times dT_S for a sorted subset S of
{1..n}.  Terms are keyed by (exponent tuple, S).
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial
from typing import Iterable, Mapping, Sequence

from .linalg import Matrix, to_fraction


class DimensionMismatch(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


def _merge_sign(s: tuple, t: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted union for dT_s ^ dT_t, or None if they overlap."""
    if set(s) & set(t):
        return None
    inversions = sum(1 for a in s for b in t if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(s + t))


class PolyForm:
    __slots__ = ("n", "q", "terms")

    def __init__(self, n: int, q: int, terms: Mapping | Iterable = ()):
        self.n = n
        self.q = q
        data: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (exps, s), c in items:
            exps, s = tuple(exps), tuple(s)
            if len(exps) != n:
                raise DimensionMismatch(f"monomial {exps} is not in {n} variables")
            if len(s) != q:
                raise DegreeMismatch(f"differential {s} does not have degree {q}")
            if any(x < 1 or x > n for x in s):
                raise DimensionMismatch(f"dT index out of range in {s}")
            if list(s) != sorted(set(s)):
                raise ValueError(f"differential indices must be strictly increasing: {s}")
            c = to_fraction(c)
            if c:
                v = data.get((exps, s), 0) + c
                if v:
                    data[(exps, s)] = v
                else:
                    data.pop((exps, s), None)
        self.terms = data

    # constructors ------------------------------------------------------
    @classmethod
    def zero(cls, n: int, q: int = 0) -> "PolyForm":
        return cls(n, q)

    @classmethod
    def constant(cls, n: int, c=1) -> "PolyForm":
        return cls(n, 0, {((0,) * n, ()): c})

    @classmethod
    def coordinate(cls, n: int, j: int) -> "PolyForm":
        """T_j (j = 0 gives 1 - sum T_k)."""
        if j == 0:
            terms = {((0,) * n, ()): 1}
            for k in range(1, n + 1):
                terms[(_unit_exp(n, k), ())] = -1
            return cls(n, 0, terms)
        return cls(n, 0, {(_unit_exp(n, j), ()): 1})

    @classmethod
    def dT(cls, n: int, j: int) -> "PolyForm":
        return cls(n, 1, {((0,) * n, (j,)): 1})

    @classmethod
    def volume(cls, n: int) -> "PolyForm":
        """dT_1 ^ ... ^ dT_n."""
        return cls(n, n, {((0,) * n, tuple(range(1, n + 1))): 1})

    # arithmetic --------------------------------------------------------
    def _check_same(self, other: "PolyForm") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"forms on simplices of dimension {self.n} and {other.n}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check_same(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.q != other.q:
            raise DegreeMismatch("cannot add forms of different degree")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PolyForm(self.n, self.q, out)

    def __neg__(self) -> "PolyForm":
        return self.scale(-1)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        c = to_fraction(c)
        return PolyForm(self.n, self.q, {k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.q == other.q and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.q, frozenset(self.terms.items())))

    def poly_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __repr__(self) -> str:
        return f"PolyForm(n={self.n}, q={self.q}, {format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)


def _unit_exp(n: int, j: int) -> tuple:
    return tuple(1 if k == j - 1 else 0 for k in range(n))


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    a._check_same(b)
    out: dict = {}
    for (ea, sa), ca in a.terms.items():
        for (eb, sb), cb in b.terms.items():
            m = _merge_sign(sa, sb)
            if m is None:
                continue
            sign, s = m
            e = tuple(x + y for x, y in zip(ea, eb))
            out[(e, s)] = out.get((e, s), 0) + sign * ca * cb
    return PolyForm(a.n, a.q + b.q, out)


def exterior_d(a: PolyForm) -> PolyForm:
    out: dict = {}
    for (e, s), c in a.terms.items():
        for j in range(1, a.n + 1):
            k = e[j - 1]
            if k == 0 or j in s:
                continue
            ne = e[:j - 1] + (k - 1,) + e[j:]
            sign, ns = _merge_sign((j,), s)
            out[(ne, ns)] = out.get((ne, ns), 0) + sign * k * c
    return PolyForm(a.n, a.q + 1, out)


# ---------------------------------------------------------------------------
# pullbacks along affine maps

def _poly_mul(p: dict, r: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in r.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def pullback(a: PolyForm, images: Sequence[tuple], m: int) -> PolyForm:
    """Pull a form on the n-simplex back along an affine map from the m-simplex.

    ``images[j-1] = (const, {k: coeff})`` expresses T_j as const + sum coeff T'_k
    in the source coordinates T'_1..T'_m."""
    n = a.n
    if len(images) != n:
        raise DimensionMismatch("need one image per coordinate")
    lin = []
    polys = []
    zero = (0,) * m
    for const, coeffs in images:
        p = {zero: Fraction(const)} if const else {}
        for k, c in coeffs.items():
            e = _unit_exp(m, k)
            p[e] = p.get(e, 0) + Fraction(c)
        polys.append({e: c for e, c in p.items() if c})
        lin.append({k: Fraction(c) for k, c in coeffs.items() if c})
    powers: dict = {}

    def power(j, k):
        key = (j, k)
        if key not in powers:
            powers[key] = {zero: Fraction(1)} if k == 0 else _poly_mul(power(j, k - 1), polys[j])
        return powers[key]

    out: dict = {}
    for (e, s), c in a.terms.items():
        poly = {zero: c}
        for j, k in enumerate(e):
            if k:
                poly = _poly_mul(poly, power(j, k))
                if not poly:
                    break
        if not poly:
            continue
        # expand dT_{s1} ^ ... ^ dT_{sq} into the source differentials
        diffs = {(): Fraction(1)}
        for j in s:
            nxt: dict = {}
            for t, v in diffs.items():
                for k, cc in lin[j - 1].items():
                    mm = _merge_sign(t, (k,))
                    if mm is None:
                        continue
                    sign, u = mm
                    nxt[u] = nxt.get(u, 0) + sign * v * cc
            diffs = {t: v for t, v in nxt.items() if v}
        for t, v in diffs.items():
            for pe, pc in poly.items():
                out[(pe, t)] = out.get((pe, t), 0) + v * pc
    return PolyForm(m, a.q, out)


def coface_images(n: int, i: int) -> list[tuple]:
    """Coordinates of the i-th face inclusion of the (n-1)-simplex into the n-simplex."""
    ims = []
    for j in range(1, n + 1):
        if j < i:
            ims.append((0, {j: 1}))
        elif j == i:
            ims.append((0, {}))
        elif j - 1 >= 1:
            ims.append((0, {j - 1: 1}))
        else:  # i = 0, j = 1: T_1 -> T'_0 = 1 - sum T'_k
            ims.append((1, {k: -1 for k in range(1, n)}))
    return ims


def codegeneracy_images(n: int, i: int) -> list[tuple]:
    """Coordinates of the i-th degeneracy from the n-simplex onto the (n-1)-simplex."""
    ims = []
    for j in range(1, n):
        if j < i:
            ims.append((0, {j: 1}))
        elif j == i:
            ims.append((0, {i: 1, i + 1: 1}))
        else:
            ims.append((0, {j + 1: 1}))
    return ims


def coface_pullback(a: PolyForm, i: int) -> PolyForm:
    """delta^i: forms on the n-simplex -> forms on its i-th face."""
    if not 0 <= i <= a.n or a.n == 0:
        raise ValueError(f"no coface {i} on the {a.n}-simplex")
    return pullback(a, coface_images(a.n, i), a.n - 1)


def codegeneracy_pullback(a: PolyForm, i: int) -> PolyForm:
    """sigma^i: forms on the (n-1)-simplex -> forms on the n-simplex."""
    n = a.n + 1
    if not 0 <= i <= n - 1:
        raise ValueError(f"no codegeneracy {i} onto the {a.n}-simplex")
    return pullback(a, codegeneracy_images(n, i), n)


# ---------------------------------------------------------------------------
# integration

@lru_cache(maxsize=None)
def monomial_integral(exps: tuple) -> Fraction:
    """Integral of T^exps dT_1...dT_n over the simplex (Dirichlet formula)."""
    num = 1
    for k in exps:
        num *= factorial(k)
    return Fraction(num, factorial(len(exps) + sum(exps)))


def integrate(a: PolyForm) -> Fraction:
    """Integral over the standard simplex of a top-degree form (zero is allowed in any degree)."""
    if a.is_zero():
        return Fraction(0)
    if a.q != a.n:
        raise DegreeMismatch(f"cannot integrate a {a.q}-form over the {a.n}-simplex")
    total = Fraction(0)
    for (e, _), c in a.terms.items():
        total += c * monomial_integral(e)
    return total


# ---------------------------------------------------------------------------
# bases and matrices, for degree-bounded linear algebra

@lru_cache(maxsize=None)
def monomials(n: int, D: int) -> tuple:
    """Exponent tuples in n variables of total degree <= D, graded by degree."""
    if n == 0:
        return ((),)
    out = [e for e in product(range(D + 1), repeat=n) if sum(e) <= D]
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return tuple(out)


@lru_cache(maxsize=None)
def form_basis(n: int, q: int, D: int) -> tuple:
    """Basis (exps, S) of q-forms on the n-simplex of weight <= D.

    The weight of T^e dT_S is deg(e) + |S|.  Exterior derivative and the
    structure pullbacks never raise weight, so weight <= D is a subcomplex
    stable under all simplicial operators."""
    if q < 0 or q > n or D < q:
        return ()
    return tuple((e, s) for s in combinations(range(1, n + 1), q) for e in monomials(n, D - q))


@lru_cache(maxsize=None)
def _basis_index(n: int, q: int, D: int) -> dict:
    return {b: k for k, b in enumerate(form_basis(n, q, D))}


def form_to_vector(a: PolyForm, D: int) -> list[Fraction]:
    idx = _basis_index(a.n, a.q, D)
    out = [Fraction(0)] * len(idx)
    for key, c in a.terms.items():
        if key not in idx:
            raise ValueError(f"term {key} exceeds the weight bound {D}")
        out[idx[key]] = c
    return out


def vector_to_form(v: Sequence, n: int, q: int, D: int) -> PolyForm:
    basis = form_basis(n, q, D)
    return PolyForm(n, q, {basis[k]: c for k, c in enumerate(v) if c})


def _operator_matrix(op, n_in: int, q_in: int, n_out: int, q_out: int, D: int) -> Matrix:
    idx = _basis_index(n_out, q_out, D)
    entries = []
    for col, key in enumerate(form_basis(n_in, q_in, D)):
        img = op(PolyForm(n_in, q_in, {key: 1}))
        for k, c in img.terms.items():
            entries.append(((idx[k], col), c))
    return Matrix(len(idx), len(form_basis(n_in, q_in, D)), entries)


def _pullback_matrix(images: Sequence[tuple], n: int, m: int, q: int, D: int) -> Matrix:
    """Matrix of the pullback along an affine map (see ``pullback``) on the
    degree-bounded bases.  Monomial images are built incrementally and shared."""
    zero = (0,) * m
    polys = []
    for const, coeffs in images:
        p = {zero: const} if const else {}
        for k, c in coeffs.items():
            p[_unit_exp(m, k)] = c
        polys.append(p)
    mono: dict = {(0,) * n: {zero: 1}}

    def image(e):
        if e not in mono:
            j = next(j for j, k in enumerate(e) if k)
            prev = e[:j] + (e[j] - 1,) + e[j + 1:]
            mono[e] = _poly_mul(image(prev), polys[j])
        return mono[e]

    diffs: dict = {}
    for s in combinations(range(1, n + 1), q):
        acc = {(): 1}
        for j in s:
            nxt: dict = {}
            for t, v in acc.items():
                for k, c in images[j - 1][1].items():
                    mm = _merge_sign(t, (k,))
                    if mm is not None:
                        nxt[mm[1]] = nxt.get(mm[1], 0) + mm[0] * v * c
            acc = {t: v for t, v in nxt.items() if v}
        diffs[s] = acc
    idx = _basis_index(m, q, D)
    entries = []
    for col, (e, s) in enumerate(form_basis(n, q, D)):
        for t, v in diffs[s].items():
            for pe, pc in image(e).items():
                entries.append(((idx[(pe, t)], col), v * pc))
    return Matrix(len(idx), len(form_basis(n, q, D)), entries)


@lru_cache(maxsize=None)
def coface_matrix(n: int, i: int, q: int, D: int) -> Matrix:
    """delta^i on q-forms of weight <= D: omega_n -> omega_{n-1}."""
    return _pullback_matrix(coface_images(n, i), n, n - 1, q, D)


@lru_cache(maxsize=None)
def codegeneracy_matrix(n: int, i: int, q: int, D: int) -> Matrix:
    """sigma^i on q-forms of weight <= D: omega_{n-1} -> omega_n."""
    return _pullback_matrix(codegeneracy_images(n, i), n - 1, n, q, D)


@lru_cache(maxsize=None)
def d_matrix(n: int, q: int, D: int) -> Matrix:
    return _operator_matrix(exterior_d, n, q, n, q + 1, D)


@lru_cache(maxsize=None)
def integration_row(n: int, D: int) -> Matrix:
    """1 x dim matrix of the integral on top-degree forms of weight <= D."""
    basis = form_basis(n, n, D)
    return Matrix(1, len(basis), [((0, k), monomial_integral(e)) for k, (e, _) in enumerate(basis)])


# ---------------------------------------------------------------------------
# text syntax:  "1/6 * T1^2 T2 dT1^dT2 - 3 * dT2"

def _format_body(e: tuple, s: tuple) -> str:
    parts = []
    for j, k in enumerate(e, start=1):
        if k == 1:
            parts.append(f"T{j}")
        elif k > 1:
            parts.append(f"T{j}^{k}")
    if s:
        parts.append("^".join(f"dT{j}" for j in s))
    return " ".join(parts)


def _term_order(key):
    e, s = key
    return (s, -sum(e), tuple(-x for x in e))


def format_form(a: PolyForm) -> str:
    if a.is_zero():
        return "0"
    out = ""
    for k, key in enumerate(sorted(a.terms, key=_term_order)):
        c = a.terms[key]
        body = _format_body(*key)
        neg = c < 0
        mag = -c if neg else c
        if body:
            piece = body if mag == 1 else f"{str(mag)} * {body}"
        else:
            piece = str(mag)
        if k == 0:
            out = ("-" if neg else "") + piece
        else:
            out += (" - " if neg else " + ") + piece
    return out


_TERM_SPLIT = re.compile(r"\s+([+-])\s+")
_COEFF = re.compile(r"^(\d+(?:/\d+)?)$")


def parse_form(text: str, n: int) -> PolyForm:
    """Parse the text syntax produced by ``format_form``."""
    text = text.strip()
    if text == "0":
        return PolyForm.zero(n)
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:].lstrip()
    pieces = _TERM_SPLIT.split(text)
    signed = [(sign, pieces[0])]
    for k in range(1, len(pieces), 2):
        signed.append((1 if pieces[k] == "+" else -1, pieces[k + 1]))
    terms: dict = {}
    q = None
    for sg, piece in signed:
        coeff = Fraction(1)
        body = piece.strip()
        if "*" in body:
            c, body = body.split("*", 1)
            coeff = Fraction(c.strip())
            body = body.strip()
        elif _COEFF.match(body):
            coeff, body = Fraction(body), ""
        e = [0] * n
        s: tuple = ()
        for tok in body.split():
            if tok.startswith("dT"):
                s = tuple(int(x[2:]) for x in tok.split("^"))
            else:
                m = re.fullmatch(r"T(\d+)(?:\^(\d+))?", tok)
                if not m:
                    raise ValueError(f"cannot parse {tok!r}")
                j = int(m.group(1))
                if not 1 <= j <= n:
                    raise DimensionMismatch(f"T{j} outside the {n}-simplex")
                e[j - 1] += int(m.group(2) or 1)
        if q is None:
            q = len(s)
        elif q != len(s):
            raise DegreeMismatch("mixed form degrees in text")
        sign_s = 1
        if list(s) != sorted(s):
            # reorder the differentials with the permutation sign
            arr = list(s)
            for x in range(len(arr)):
                for y in range(len(arr) - 1 - x):
                    if arr[y] > arr[y + 1]:
                        arr[y], arr[y + 1] = arr[y + 1], arr[y]
                        sign_s = -sign_s
            s = tuple(arr)
        if len(set(s)) != len(s):
            continue
        key = (tuple(e), s)
        terms[key] = terms.get(key, 0) + sg * sign_s * coeff
    return PolyForm(n, q or 0, terms)
