"""Small independent reference computations used as test oracles.

These are deliberately naive dense routines that share no code with the
package, so agreement is meaningful."""
from fractions import Fraction
from itertools import permutations


def dense(rows):
    return [[Fraction(x) for x in r] for r in rows]


def naive_rank(rows):
    """Textbook row reduction with Fractions on a dense copy."""
    a = dense(rows)
    if not a:
        return 0
    r, ncols = 0, len(a[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def leibniz_det(rows):
    a = dense(rows)
    n = len(a)
    total = Fraction(0)
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= a[i][p[i]]
        total += term
    return total


def betti_numbers(dims, diffs, degrees):
    """dim H^n = dim C^n - rank d^n - rank d^{n-1}, ranks by naive_rank."""
    def rk(n):
        m = diffs.get(n)
        return naive_rank(m) if m else 0
    return {n: dims.get(n, 0) - rk(n) - rk(n - 1) for n in degrees}


def _pmul(p, r):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in r.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def simplex_integral(poly, n):
    """Iterated integral of a polynomial {exponents: coeff} over the simplex
    0 <= t_j, sum t_j <= 1, integrating the last variable first."""
    poly = {tuple(e): Fraction(c) for e, c in poly.items()}
    for m in range(n, 0, -1):
        # upper limit u = 1 - t_1 - ... - t_{m-1}, as a polynomial in n slots
        zero = (0,) * n
        u = {zero: Fraction(1)}
        for j in range(m - 1):
            e = [0] * n
            e[j] = 1
            u[tuple(e)] = Fraction(-1)
        out = {}
        for e, c in poly.items():
            k = e[m - 1]
            rest = list(e)
            rest[m - 1] = 0
            term = {tuple(rest): c / (k + 1)}
            for _ in range(k + 1):
                term = _pmul(term, u)
            for e2, c2 in term.items():
                out[e2] = out.get(e2, 0) + c2
        poly = {e: c for e, c in out.items() if c}
    return poly.get((0,) * n, Fraction(0))


def poset_sheaf_cohomology(points, leq, dim, rho, top):
    """Cohomology dims of a sheaf of vector spaces on a finite poset via the
    complex of strict chains x_0 < ... < x_n with values in the stalk of x_n.

    ``rho(x, y)`` is a dense row list for the restriction F_x -> F_y."""
    chains = {0: [(p,) for p in points]}
    for n in range(1, top + 2):
        chains[n] = [c + (y,) for c in chains[n - 1] for y in points
                     if y != c[-1] and leq(c[-1], y)]

    def block_rows(n):
        # matrix of d: C^n -> C^{n+1}
        src = chains[n]
        col_off, o = {}, 0
        for c in src:
            col_off[c] = o
            o += dim(c[-1])
        rows = []
        for c in chains[n + 1]:
            block = [[Fraction(0)] * o for _ in range(dim(c[-1]))]
            for i in range(n + 2):
                face = c[:i] + c[i + 1:]
                off = col_off[face]
                if i == n + 1:
                    m = rho(face[-1], c[-1])
                else:
                    m = [[Fraction(int(r == s)) for s in range(dim(c[-1]))]
                         for r in range(dim(c[-1]))]
                for r, row in enumerate(m):
                    for s, v in enumerate(row):
                        block[r][off + s] += (-1) ** i * Fraction(v)
            rows += block
        return rows, o

    sizes, ranks = {}, {}
    for n in range(top + 1):
        rows, cols = block_rows(n)
        sizes[n] = cols
        ranks[n] = naive_rank(rows) if rows and cols else 0
    return {n: sizes[n] - ranks[n] - (ranks[n - 1] if n else 0) for n in range(top + 1)}


def multichain_count(points, leq, dim, start, length):
    """Total dimension of the bar level with ``length`` points in the chain."""
    chains = [(p,) for p in points if p in start]
    for _ in range(length - 1):
        chains = [c + (y,) for c in chains for y in points if leq(c[-1], y)]
    return sum(dim(c[-1]) for c in chains)
