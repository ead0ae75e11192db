"""Small exact linear algebra kit over the rationals.

Matrices are plain lists of rows.  Entries are ints or Fractions; nothing
here ever produces a float.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Row = list
Mat = list


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def zeros(r: int, c: int) -> Mat:
    return [[0] * c for _ in range(r)]


def identity(n: int) -> Mat:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def copy(m: Mat) -> Mat:
    return [list(r) for r in m]


def transpose(m: Mat, ncols: int | None = None) -> Mat:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Mat, b: Mat, inner: int | None = None) -> Mat:
    if not a:
        return []
    n = len(b) if inner is None else inner
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(n):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def matvec(a: Mat, v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), 0) for row in a]


def is_zero(m) -> bool:
    if m and isinstance(m[0], list):
        return all(not x for row in m for x in row)
    return all(not x for x in m)


def _sparse_rows(m, ncols=None):
    out = []
    for row in m:
        out.append({j: frac(x) for j, x in enumerate(row) if x})
    return out


def rref_sparse(rows: list[dict]) -> list[tuple[int, dict]]:
    """Reduced echelon form of sparse rows; returns (pivot column, row) sorted by column."""
    piv: dict[int, dict] = {}
    for r in rows:
        r = dict(r)
        for c in [c for c in r if c in piv]:
            f = r.get(c)
            if not f:
                continue
            for j, v in piv[c].items():
                nv = r.get(j, 0) - f * v
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {j: v * inv for j, v in r.items()}
        for pc, prow in piv.items():
            f = prow.get(c)
            if f:
                for j, v in r.items():
                    nv = prow.get(j, 0) - f * v
                    if nv:
                        prow[j] = nv
                    else:
                        prow.pop(j, None)
        piv[c] = r
    return sorted(piv.items())


def rref(m: Mat, ncols: int | None = None):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    rows = len(m)
    cols = len(m[0]) if m else (ncols or 0)
    if ncols is not None and m:
        cols = max(cols, ncols)
    ech = rref_sparse(_sparse_rows(m))
    out = []
    for _, r in ech:
        d = [Fraction(0)] * cols
        for j, v in r.items():
            d[j] = v
        out.append(d)
    out += [[Fraction(0)] * cols for _ in range(rows - len(ech))]
    return out, [c for c, _ in ech]


class Solver:
    """Reusable exact solver for m x = b with a fixed m."""

    def __init__(self, m: Mat, ncols: int):
        self.ncols = ncols
        self.nrows = len(m)
        aug = []
        for i, row in enumerate(m):
            r = {j: frac(x) for j, x in enumerate(row) if x}
            r[ncols + i] = Fraction(1)
            aug.append(r)
        ech = rref_sparse(aug)
        self.pivots = []
        self.E = []  # rows of the transformation, as sparse dicts over row indices
        self.R = []
        self.left_null = []
        for c, r in ech:
            t = {j - ncols: v for j, v in r.items() if j >= ncols}
            if c < ncols:
                self.pivots.append(c)
                self.R.append({j: v for j, v in r.items() if j < ncols})
                self.E.append(t)
            else:
                self.left_null.append(t)
        self.rank = len(self.pivots)

    def consistent(self, b) -> bool:
        return all(sum((v * b[i] for i, v in t.items() if b[i]), 0) == 0 for t in self.left_null)

    def solve(self, b):
        if not self.consistent(b):
            return None
        x = [Fraction(0)] * self.ncols
        for c, t in zip(self.pivots, self.E):
            x[c] = sum((v * b[i] for i, v in t.items() if b[i]), Fraction(0))
        return x

    def nullspace(self) -> list[list[Fraction]]:
        pset = set(self.pivots)
        free = [c for c in range(self.ncols) if c not in pset]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for c, r in zip(self.pivots, self.R):
                if f in r:
                    v[c] = -r[f]
            basis.append(v)
        return basis


def rank(m: Mat) -> int:
    return len(rref_sparse(_sparse_rows(m))) if m else 0


def nullspace(m: Mat, ncols: int) -> list[list[Fraction]]:
    """Basis of {x : m x = 0} as a list of vectors (length ncols)."""
    if not m:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ech = rref_sparse(_sparse_rows(m))
    piv = {c for c, _ in ech}
    basis = []
    for f in range(ncols):
        if f in piv:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, r in ech:
            if f in r:
                v[c] = -r[f]
        basis.append(v)
    return basis


def column_space(m: Mat, nrows: int) -> list[list[Fraction]]:
    """Basis of the column span, taken from pivot columns of m."""
    if not m or not m[0]:
        return []
    piv = [c for c, _ in rref_sparse(_sparse_rows(m))]
    return [[frac(m[i][c]) for i in range(nrows)] for c in piv]


def solve(m: Mat, b: Sequence, ncols: int):
    """One solution of m x = b (the one with free variables zero), or None."""
    if not m:
        return [Fraction(0)] * ncols if all(x == 0 for x in b) else None
    aug = _sparse_rows(m)
    for r, bi in zip(aug, b):
        if bi:
            r[ncols] = frac(bi)
    ech = rref_sparse(aug)
    x = [Fraction(0)] * ncols
    for c, r in ech:
        if c == ncols:
            return None
        x[c] = r.get(ncols, Fraction(0))
    return x


def least_norm_solve(m: Mat, b: Sequence, ncols: int):
    """Minimal Euclidean-norm solution of m x = b, exact (x in row space)."""
    if not m:
        return [Fraction(0)] * ncols if all(x == 0 for x in b) else None
    r, piv = rref(m, ncols)
    rows = [row for row in r[: len(piv)]]
    if solve(m, b, ncols) is None:
        return None
    # x = R^T y with (M R^T) y = b
    rt = transpose(rows) if rows else [[] for _ in range(ncols)]
    mrt = matmul(m, rt, ncols) if rows else [[] for _ in m]
    y = solve(mrt, b, len(rows)) if rows else []
    if y is None:
        return None
    return [sum((rt[i][j] * y[j] for j in range(len(rows))), Fraction(0)) for i in range(ncols)]


def inverse(m: Mat) -> Mat:
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    r, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r[:n]]


def det(m: Mat):
    n = len(m)
    a = [[frac(x) for x in row] for row in m]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def common_denominator(vals) -> int:
    out = 1
    for v in vals:
        out = lcm(out, frac(v).denominator)
    return out


def to_integer_rows(m: Mat) -> tuple[Mat, int]:
    """Scale a rational matrix by one positive integer so it becomes integral."""
    n = common_denominator(x for row in m for x in row)
    return [[int(frac(x) * n) for x in row] for row in m], n


def primitive(v: Sequence[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return [int(x) // g for x in v] if g else [int(x) for x in v]


def complement_basis(vectors: list[list[Fraction]], dim: int) -> list[list[Fraction]]:
    """Standard basis vectors extending a basis of span(vectors) to the whole space."""
    piv = {c for c, _ in rref_sparse(_sparse_rows(vectors))} if vectors else set()
    return [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim) if i not in piv]


def extend_independent(base: list, candidates: list, dim: int) -> list[int]:
    """Indices of candidates that extend span(base) independently, greedily in order."""
    cols = list(base) + list(candidates)
    if not cols:
        return []
    mat = [[v[i] for v in cols] for i in range(dim)]
    piv = [c for c, _ in rref_sparse(_sparse_rows(mat))]
    nb = len(base)
    return [c - nb for c in piv if c >= nb]
