"""Exact linear algebra over the rationals.

Matrices are sparse (row -> col -> Fraction).  Elimination is fraction-free:
rational rows are cleared to integer rows first, small dense problems go
through Bareiss elimination and large sparse ones through integer row
reduction with content removal.  Fractions only reappear when a reduced
echelon form is normalised at the very end.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import heapq
from math import gcd
from typing import Iterable, Sequence

DENSE_LIMIT = 64


class NotContained(ValueError):
    """A vector that was supposed to lie in a subspace does not."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class Matrix:
    """Sparse rational matrix.  Treated as immutable once built."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, Fraction]] = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (r, c), v in items:
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
                v = to_fraction(v)
                if v:
                    row = data.setdefault(r, {})
                    v = row.get(c, 0) + v
                    if v:
                        row[c] = v
                    else:
                        del row[c]
                        if not row:
                            del data[r]
        self._rows = data

    @classmethod
    def _from_rowdict(cls, rows, cols, data):
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._rows = {r: row for r, row in data.items() if row}
        return m

    # construction helpers
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._from_rowdict(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._from_rowdict(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @classmethod
    def scalar(cls, n: int, s) -> "Matrix":
        s = to_fraction(s)
        if not s:
            return cls.zeros(n, n)
        return cls._from_rowdict(n, n, {i: {i: s} for i in range(n)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else (cols or 0)
        if cols is not None:
            ncols = cols
        data = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            d = {j: to_fraction(v) for j, v in enumerate(row) if v}
            if d:
                data[i] = d
        return cls._from_rowdict(nrows, ncols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "Matrix":
        n = len(columns[0]) if columns else (rows or 0)
        if rows is not None:
            n = rows
        data: dict[int, dict[int, Fraction]] = {}
        for j, col in enumerate(columns):
            if len(col) != n:
                raise ValueError("ragged columns")
            for i, v in enumerate(col):
                if v:
                    data.setdefault(i, {})[j] = to_fraction(v)
        return cls._from_rowdict(n, len(columns), data)

    @classmethod
    def column_vector(cls, values: Sequence) -> "Matrix":
        return cls.from_columns([list(values)], rows=len(values))

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, rc) -> Fraction:
        r, c = rc
        return self._rows.get(r, {}).get(c, Fraction(0))

    def row(self, r: int) -> dict[int, Fraction]:
        return self._rows.get(r, {})

    def items(self):
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                yield (r, c), row[c]

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def is_zero(self) -> bool:
        return not self._rows

    def to_rows(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, row in self._rows.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def column(self, j: int) -> list[Fraction]:
        return [self._rows.get(i, {}).get(j, Fraction(0)) for i in range(self.rows)]

    def columns(self) -> list[list[Fraction]]:
        cols = [[Fraction(0)] * self.rows for _ in range(self.cols)]
        for r, row in self._rows.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    # algebra
    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.items())))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 36:
            body = [[str(v) for v in r] for r in self.to_rows()]
            return f"Matrix({self.rows}x{self.cols}, {body})"
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def _combine(self, other: "Matrix", sign: int) -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        data = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            tgt = data.setdefault(r, {})
            for c, v in row.items():
                w = tgt.get(c, 0) + sign * v
                if w:
                    tgt[c] = w
                else:
                    tgt.pop(c, None)
        return Matrix._from_rowdict(self.rows, self.cols, data)

    def __add__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, 1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, -1)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, s) -> "Matrix":
        s = to_fraction(s)
        if not s:
            return Matrix.zeros(self.rows, self.cols)
        return Matrix._from_rowdict(
            self.rows, self.cols,
            {r: {c: v * s for c, v in row.items()} for r, row in self._rows.items()})

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        data = {}
        orows = other._rows
        for r, row in self._rows.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                brow = orows.get(k)
                if not brow:
                    continue
                for c, b in brow.items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                data[r] = acc
        return Matrix._from_rowdict(self.rows, other.cols, data)

    def apply(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [Fraction(0)] * self.rows
        for r, row in self._rows.items():
            s = Fraction(0)
            for c, v in row.items():
                if vec[c]:
                    s += v * vec[c]
            out[r] = s
        return out

    @property
    def T(self) -> "Matrix":
        data: dict[int, dict[int, Fraction]] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return Matrix._from_rowdict(self.cols, self.rows, data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        cmap = {c: j for j, c in enumerate(cols)}
        data = {}
        for i, r in enumerate(rows):
            row = self._rows.get(r)
            if not row:
                continue
            d = {cmap[c]: v for c, v in row.items() if c in cmap}
            if d:
                data[i] = d
        return Matrix._from_rowdict(len(rows), len(cols), data)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[r, c, format_fraction(v)] for (r, c), v in self.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> "Matrix":
        return cls(obj["rows"], obj["cols"],
                   [((r, c), to_fraction(v)) for r, c, v in obj.get("entries", [])])


def hstack(blocks: Sequence[Matrix], rows: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(rows or 0, 0)
    n = blocks[0].rows
    data: dict[int, dict[int, Fraction]] = {}
    off = 0
    for b in blocks:
        if b.rows != n:
            raise ValueError("hstack row mismatch")
        for r, row in b._rows.items():
            tgt = data.setdefault(r, {})
            for c, v in row.items():
                tgt[c + off] = v
        off += b.cols
    return Matrix._from_rowdict(n, off, data)


def vstack(blocks: Sequence[Matrix], cols: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(0, cols or 0)
    n = blocks[0].cols
    data = {}
    off = 0
    for b in blocks:
        if b.cols != n:
            raise ValueError("vstack column mismatch")
        for r, row in b._rows.items():
            data[r + off] = dict(row)
        off += b.rows
    return Matrix._from_rowdict(off, n, data)


def block(grid: Sequence[Sequence[Matrix | None]], row_dims: Sequence[int],
          col_dims: Sequence[int]) -> Matrix:
    """Assemble a block matrix; ``None`` entries are zero blocks."""
    data: dict[int, dict[int, Fraction]] = {}
    roff = 0
    for bi, brow in enumerate(grid):
        coff = 0
        for bj, m in enumerate(brow):
            if m is not None:
                if m.shape != (row_dims[bi], col_dims[bj]):
                    raise ValueError(
                        f"block ({bi},{bj}) has shape {m.shape}, "
                        f"expected {(row_dims[bi], col_dims[bj])}")
                for r, row in m._rows.items():
                    tgt = data.setdefault(r + roff, {})
                    for c, v in row.items():
                        tgt[c + coff] = v
            coff += col_dims[bj]
        roff += row_dims[bi]
    return Matrix._from_rowdict(sum(row_dims), sum(col_dims), data)


def direct_sum(*ms: Matrix) -> Matrix:
    n = len(ms)
    grid = [[ms[i] if i == j else None for j in range(n)] for i in range(n)]
    return block(grid, [m.rows for m in ms], [m.cols for m in ms])


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; index of u (x) v is i * dim(v) + j."""
    data: dict[int, dict[int, Fraction]] = {}
    for ra, rowa in a._rows.items():
        for rb, rowb in b._rows.items():
            tgt = data.setdefault(ra * b.rows + rb, {})
            for ca, va in rowa.items():
                base = ca * b.cols
                for cb, vb in rowb.items():
                    tgt[base + cb] = va * vb
    return Matrix._from_rowdict(a.rows * b.rows, a.cols * b.cols, data)


# ---------------------------------------------------------------------------
# elimination

def _integer_row(row: dict[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in row.values():
        d = v.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    out = {c: int(v * den) for c, v in row.items()}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (0, 1):
        row = {c: v // g for c, v in row.items()}
    return row


def bareiss_echelon(m: Matrix) -> tuple[list[list[int]], list[int]]:
    """Dense Bareiss forward elimination on the integer-cleared rows of m.

    Returns the (integer) echelon rows and the pivot columns.  Every entry
    produced is a minor of the cleared input, so there is no blow-up beyond
    determinant size.
    """
    a = []
    for r in range(m.rows):
        row = m.row(r)
        ir = _integer_row(row) if row else {}
        a.append([ir.get(c, 0) for c in range(m.cols)])
    nrows, ncols = len(a), m.cols
    pivots: list[int] = []
    prev = 1
    k = 0
    for c in range(ncols):
        if k >= nrows:
            break
        piv = next((i for i in range(k, nrows) if a[i][c]), None)
        if piv is None:
            continue
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        p = a[k][c]
        rowk = a[k]
        for i in range(k + 1, nrows):
            ai = a[i]
            f = ai[c]
            for j in range(c + 1, ncols):
                ai[j] = (p * ai[j] - f * rowk[j]) // prev
            ai[c] = 0
        # rows above k are not touched; rows below are exact by Sylvester's identity
        prev = p
        pivots.append(c)
        k += 1
    return a[:k], pivots


def _sparse_echelon(rows: Iterable[dict[int, Fraction]]) -> dict[int, dict[int, int]]:
    """Integer row reduction into semi-echelon form, keyed by pivot column.

    Sparse rows go first, which keeps fill-in low; the pivot set does not
    depend on the order."""
    pivots: dict[int, dict[int, int]] = {}
    for row in sorted((r for r in rows if r), key=len):
        if not row:
            continue
        r = _integer_row(row)
        # columns still to inspect, smallest first; stale entries are skipped
        heap = list(r)
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            b = r.get(c)
            if not b:
                continue
            p = pivots.get(c)
            if p is None:
                pivots[c] = _primitive(r)
                break
            a = p[c]
            g = gcd(a, b)
            a //= g
            b //= g
            if a != 1:
                r = {k: a * v for k, v in r.items()}
            for k, v in p.items():
                w = r.get(k)
                if w is None:
                    r[k] = -b * v
                    heapq.heappush(heap, k)
                else:
                    w -= b * v
                    if w:
                        r[k] = w
                    else:
                        del r[k]
            if not r:
                break
            if a != 1:
                r = _primitive(r)
    return pivots


def _back_substitute(pivots: dict[int, dict[int, int]]) -> dict[int, dict[int, Fraction]]:
    reduced: dict[int, dict[int, int]] = {}
    for c in sorted(pivots, reverse=True):
        r = pivots[c]
        for c2 in sorted(k for k in r if k != c and k in reduced):
            b = r.get(c2)
            if not b:
                continue
            p = reduced[c2]
            a = p[c2]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {k: a * v for k, v in r.items()}
            for k, v in p.items():
                w = new.get(k, 0) - b * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            r = new
        reduced[c] = _primitive(r)
    out = {}
    for c, r in reduced.items():
        lead = r[c]
        out[c] = {k: Fraction(v, lead) for k, v in r.items()}
    return out


@dataclass(frozen=True)
class RREF:
    """Reduced row echelon data: pivot column -> normalised row."""
    cols: int
    rows_by_pivot: dict

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows_by_pivot)

    @property
    def rank(self) -> int:
        return len(self.rows_by_pivot)

    @property
    def free(self) -> list[int]:
        return [c for c in range(self.cols) if c not in self.rows_by_pivot]


def rref(m: Matrix) -> RREF:
    pivots = _sparse_echelon(m.row(r) for r in range(m.rows))
    return RREF(m.cols, _back_substitute(pivots))


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    if m.rows <= DENSE_LIMIT and m.cols <= DENSE_LIMIT:
        return len(bareiss_echelon(m)[1])
    return len(_sparse_echelon(m.row(r) for r in range(m.rows)))


@dataclass(frozen=True)
class Subspace:
    """Column span of ``basis`` inside K^ambient_dim (columns independent)."""
    ambient_dim: int
    basis: Matrix

    @property
    def dim(self) -> int:
        return self.basis.cols

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix.zeros(n, 0))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    def vectors(self) -> list[list[Fraction]]:
        return self.basis.columns()

    def coordinates(self, v: Sequence) -> list[Fraction]:
        x = solve(self.basis, Matrix.column_vector(list(v)))
        if x is None:
            raise NotContained("vector not in subspace")
        return x.column(0)

    def contains(self, v: Sequence) -> bool:
        return solve(self.basis, Matrix.column_vector(list(v))) is not None


def kernel_basis(m: Matrix) -> Subspace:
    """Basis of {x : m x = 0}.  The basis restricted to the free columns of
    the echelon form is the identity, so coordinates of a kernel vector are
    its entries at those columns."""
    red = rref(m)
    return _kernel_from_rref(red)


def _kernel_from_rref(red: RREF) -> Subspace:
    pos = {f: j for j, f in enumerate(red.free)}
    data: dict[int, dict[int, Fraction]] = {f: {j: Fraction(1)} for f, j in pos.items()}
    for p, row in red.rows_by_pivot.items():
        for c, v in row.items():
            if c != p:
                data.setdefault(p, {})[pos[c]] = -v
    return Subspace(red.cols, Matrix._from_rowdict(red.cols, len(pos), data))


def image_basis(m: Matrix) -> Subspace:
    """Basis of the column space: the columns of m at the pivot columns."""
    if m.rows * m.cols and m.rows <= DENSE_LIMIT and m.cols <= DENSE_LIMIT:
        piv = bareiss_echelon(m)[1]
    else:
        piv = sorted(_sparse_echelon(m.row(r) for r in range(m.rows)))
    return Subspace(m.rows, m.submatrix(range(m.rows), piv))


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """A particular solution X of a X = b (free variables zero), or None."""
    if a.rows != b.rows:
        raise ValueError("row mismatch in solve")
    aug = hstack([a, b])
    red = rref(aug)
    if any(p >= a.cols for p in red.rows_by_pivot):
        return None
    data: dict[int, dict[int, Fraction]] = {}
    for p, row in red.rows_by_pivot.items():
        d = {c - a.cols: v for c, v in row.items() if c >= a.cols}
        if d:
            data[p] = d
    return Matrix._from_rowdict(a.cols, b.cols, data)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("inverse of non-square matrix")
    x = solve(m, Matrix.identity(m.rows))
    if x is None or rank(m) != m.rows:
        raise ZeroDivisionError("matrix is singular")
    return x


def left_inverse(b: Matrix) -> Matrix:
    """L with L b = I for b of full column rank."""
    n, k = b.shape
    if k == 0:
        return Matrix.zeros(0, n)
    rows = sorted(_sparse_echelon(b.T.row(r) for r in range(k)))
    if len(rows) != k:
        raise ValueError("matrix does not have full column rank")
    sq = b.submatrix(rows, range(k))
    inv = inverse(sq)
    sel = Matrix(k, n, [((j, r), 1) for j, r in enumerate(rows)])
    return inv @ sel


def right_inverse(p: Matrix) -> Matrix:
    """R with p R = I for p of full row rank."""
    return left_inverse(p.T).T


def quotient_data(sub: Subspace, inside: Subspace) -> tuple[int, Matrix]:
    """Dimension of inside/sub and a projection from inside-coordinates onto
    quotient coordinates (kernel = coordinates of sub)."""
    if sub.ambient_dim != inside.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    k = inside.dim
    if sub.dim == 0:
        return k, Matrix.identity(k)
    x = solve(inside.basis, sub.basis)
    if x is None:
        raise NotContained("sub is not contained in inside")
    if rank(x) != sub.dim:
        raise ValueError("sub basis is not independent")
    left_null = kernel_basis(x.T)
    proj = left_null.basis.T
    return proj.rows, proj


def column_space_contains(m: Matrix, v: Sequence) -> bool:
    return solve(m, Matrix.column_vector(list(v))) is not None
