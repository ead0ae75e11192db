"""Integer and rational linear algebra for cohomology of finite models.

Smith normal form, presentations of finitely generated abelian groups,
and cohomology of complexes whose cochains mix an integer lattice with a
rational vector space (the shape of every Deligne total complex).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la


class SquareZeroError(ValueError):
    """Raised when a differential does not square to zero."""


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry table does not match shape")
        for r in self.entries:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"non-integer entry {x!r}")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        c = len(rows[0]) if rows else (cols or 0)
        return cls(len(rows), c, tuple(rows))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def eye(cls, n: int) -> "IntegerMatrix":
        return cls.of(la.identity(n), n)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = la.matmul(self.tolist(), other.tolist(), self.cols)
        if not out:
            return IntegerMatrix.zero(self.rows, other.cols)
        return IntegerMatrix.of(out, other.cols)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return int(la.det(self.tolist())) if self.rows else 1

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)


def _as_rows(m) -> tuple[list[list[int]], int, int]:
    if isinstance(m, IntegerMatrix):
        return m.tolist(), m.rows, m.cols
    rows = [list(r) for r in m]
    return rows, len(rows), (len(rows[0]) if rows else 0)


# ----------------------------------------------------------- Smith form


@dataclass(frozen=True)
class SmithForm:
    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D.entries[i][i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _smallest_pivot(a, t, r, c):
    best = None
    for i in range(t, r):
        row = a[i]
        for j in range(t, c):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(m, cols: int | None = None) -> SmithForm:
    """U·m·V = D with U, V unimodular and d1 | d2 | ... on the diagonal.

    The pivot is always the smallest nonzero entry (in absolute value) of
    the active block, first in row-major order, so the output is determined
    by the input alone.
    """
    a, r, c = _as_rows(m)
    if cols is not None and r == 0:
        c = cols
    a = [[int(x) for x in row] for row in a]
    U = la.identity(r)
    V = la.identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(r, c):
        piv = _smallest_pivot(a, t, r, c)
        if piv is None:
            break
        _, pi, pj = piv
        if pi != t:
            swap_rows(pi, t)
        if pj != t:
            swap_cols(pj, t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if not dirty:
                bad = next(
                    (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad, 1)
            # re-pivot on the smallest entry of row t / column t
            best = None
            for i in range(t, r):
                x = a[i][t]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, t)
            for j in range(t, c):
                x = a[t][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), t, j)
            _, bi, bj = best
            if bi != t:
                swap_rows(bi, t)
            if bj != t:
                swap_cols(bj, t)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SmithForm(IntegerMatrix.of(U, r), IntegerMatrix.of(a, c), IntegerMatrix.of(V, c))


def integer_inverse(m: IntegerMatrix) -> IntegerMatrix:
    inv = la.inverse(m.tolist())
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return IntegerMatrix.of(out, m.cols)


def integer_kernel(m, ncols: int) -> list[list[int]]:
    """A Z-basis of {x in Z^n : m x = 0}."""
    rows, r, _ = _as_rows(m)
    if r == 0:
        return la.identity(ncols)
    snf = smith_normal_form(rows, ncols)
    k = snf.rank
    V = snf.V.tolist()
    return [[V[i][j] for i in range(ncols)] for j in range(k, ncols)]


def integer_solve(m, b: Sequence[int], ncols: int):
    """An integer solution of m x = b, or None."""
    rows, r, _ = _as_rows(m)
    if r == 0:
        return [0] * ncols if not any(b) else None
    snf = smith_normal_form(rows, ncols)
    ub = la.matvec(snf.U.tolist(), b)
    diag = snf.diagonal
    z = [0] * ncols
    for i, x in enumerate(ub):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if x != 0:
                return None
        else:
            if x % d:
                return None
            z[i] = x // d
    return la.matvec(snf.V.tolist(), z)


# -------------------------------------------------------- abelian groups


def _fmt_power(sym: str, n: int) -> str:
    return sym if n == 1 else f"{sym}^{n}"


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^rank + sum of Z/d_i, with an explicit presentation inside Z^ambient.

    ``generators`` lists cocycle vectors, torsion generators first; the
    ``projection`` rows turn a cocycle into its coordinates.
    """

    rank: int
    torsion: tuple[int, ...]
    ambient: int = 0
    generators: tuple[tuple[int, ...], ...] = ()
    projection: tuple[tuple[int, ...], ...] = ()
    boundary: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion must form a divisibility chain")
        if any(d <= 1 for d in self.torsion):
            raise ValueError("torsion coefficients must exceed 1")

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.rank

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def normalize(self, coords: Sequence[int]) -> tuple[int, ...]:
        s = len(self.torsion)
        return tuple(int(x) % d for x, d in zip(coords[:s], self.torsion)) + tuple(
            int(x) for x in coords[s:]
        )

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        if len(x) != self.ambient:
            raise ValueError("cochain length does not match the ambient lattice")
        return self.normalize(la.matvec([list(r) for r in self.projection], x))

    def representative(self, coords: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.ambient
        for c, g in zip(coords, self.generators):
            if c:
                out = [o + c * gi for o, gi in zip(out, g)]
        return tuple(out)

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.coordinates(x))

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append(_fmt_power("ℤ", self.rank))
        parts += [f"ℤ/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"


def _quotient_presentation(K: list[list[int]], kinv_rows: list[list[int]], image: list[list[int]]):
    """Present span(K)/image where image vectors lie in span(K).

    K: basis vectors (list of ambient vectors, saturated), kinv_rows: rows
    giving K-coordinates of ambient vectors, image: ambient vectors.
    Returns (torsion, rank, generators, projection).
    """
    z = len(K)
    if z == 0:
        return (), 0, [], []
    X = [la.matvec(kinv_rows, v) for v in image]  # each a length-z vector
    Xmat = la.transpose(X, z) if X else la.zeros(z, 0)
    snf = smith_normal_form(Xmat if X else [[0] * 0 for _ in range(z)], len(X))
    U = snf.U.tolist()
    Uinv = integer_inverse(snf.U).tolist()
    diag = list(snf.diagonal) + [0] * (z - len(snf.diagonal))
    torsion, gens, proj = [], [], []
    free_gens, free_proj = [], []
    ambient = len(K[0])
    for i in range(z):
        d = diag[i]
        if d == 1:
            continue
        col = [Uinv[r][i] for r in range(z)]
        g = [sum(col[j] * K[j][a] for j in range(z)) for a in range(ambient)]
        prow = [sum(U[i][j] * kinv_rows[j][a] for j in range(z)) for a in range(ambient)]
        if d == 0:
            free_gens.append(g)
            free_proj.append(prow)
        else:
            torsion.append(d)
            gens.append(g)
            proj.append(prow)
    return tuple(torsion), len(free_gens), gens + free_gens, proj + free_proj


def _kernel_with_coords(A: list[list[int]], n: int):
    """Saturated Z-basis of ker A plus rows computing coordinates in it."""
    if not A:
        I = la.identity(n)
        return I, I
    snf = smith_normal_form(A, n)
    k = snf.rank
    V = snf.V.tolist()
    Vinv = integer_inverse(snf.V).tolist()
    K = [[V[i][j] for i in range(n)] for j in range(k, n)]
    return K, Vinv[k:]


def homology_Z(d_in, d_out, n: int | None = None) -> FgAbelianGroup:
    """ker(d_out)/im(d_in) for integer differentials C_prev -> C -> C_next."""
    rin, rin_r, rin_c = _as_rows(d_in)
    rout, rout_r, rout_c = _as_rows(d_out)
    if n is None:
        n = rout_c if rout_r else rin_r
    if rin_r and rin_r != n:
        raise ValueError("d_in target dimension mismatch")
    if rout_r and rout_c != n:
        raise ValueError("d_out source dimension mismatch")
    if rin_r and rout_r and not la.is_zero(la.matmul(rout, rin, n)):
        raise SquareZeroError("d_out · d_in is not zero")
    K, kinv = _kernel_with_coords(rout, n)
    image = [list(col) for col in zip(*rin)] if rin_r else []
    torsion, rank, gens, proj = _quotient_presentation(K, kinv, image)
    return FgAbelianGroup(
        rank=rank,
        torsion=torsion,
        ambient=n,
        generators=tuple(tuple(g) for g in gens),
        projection=tuple(tuple(p) for p in proj),
        boundary=tuple(tuple(v) for v in image),
    )


# ------------------------------------------------------ mixed complexes


@dataclass
class MixedComplex:
    """Cochains Z^{a_n} + Q^{b_n}; the differential has no Q -> Z block.

    zz[n]: a_{n+1} x a_n integers, zq[n]: b_{n+1} x a_n, qq[n]: b_{n+1} x b_n.
    Degrees run from 0 to len(int_dims) - 1.
    """

    int_dims: list[int]
    rat_dims: list[int]
    zz: dict[int, list[list[int]]] = field(default_factory=dict)
    zq: dict[int, list[list[Fraction]]] = field(default_factory=dict)
    qq: dict[int, list[list[Fraction]]] = field(default_factory=dict)

    def dims(self, n: int) -> tuple[int, int]:
        if 0 <= n < len(self.int_dims):
            return self.int_dims[n], self.rat_dims[n]
        return 0, 0

    def block(self, kind: str, n: int) -> list[list]:
        a0, b0 = self.dims(n)
        a1, b1 = self.dims(n + 1)
        src = {"zz": a0, "zq": a0, "qq": b0}[kind]
        tgt = {"zz": a1, "zq": b1, "qq": b1}[kind]
        m = getattr(self, kind).get(n)
        if m is None:
            return la.zeros(tgt, src)
        return m

    def apply(self, n: int, x: Sequence[int], y: Sequence) -> tuple[list[int], list[Fraction]]:
        zz, zq, qq = self.block("zz", n), self.block("zq", n), self.block("qq", n)
        a1, b1 = self.dims(n + 1)
        xo = la.matvec(zz, x) if a1 else []
        yo = [Fraction(0)] * b1
        if b1:
            yo = [u + v for u, v in zip(la.matvec(zq, x), la.matvec(qq, y))]
        return [int(v) for v in xo], [la.frac(v) for v in yo]

    def check_square_zero(self) -> None:
        for n in range(len(self.int_dims) - 1):
            a0, b0 = self.dims(n)
            a2, b2 = self.dims(n + 2)
            if not (a2 or b2):
                continue
            zz0, zq0, qq0 = self.block("zz", n), self.block("zq", n), self.block("qq", n)
            zz1, zq1, qq1 = self.block("zz", n + 1), self.block("zq", n + 1), self.block("qq", n + 1)
            a1, b1 = self.dims(n + 1)
            if a2 and a0 and not la.is_zero(la.matmul(zz1, zz0, a1)):
                raise SquareZeroError(f"integer block of D∘D is nonzero at degree {n}")
            if b2 and a0:
                t = la.matmul(zq1, zz0, a1) if a1 else la.zeros(b2, a0)
                u = la.matmul(qq1, zq0, b1) if b1 else la.zeros(b2, a0)
                if not la.is_zero([[p + q for p, q in zip(r1, r2)] for r1, r2 in zip(t, u)]):
                    raise SquareZeroError(f"mixed block of D∘D is nonzero at degree {n}")
            if b2 and b0 and b1 and not la.is_zero(la.matmul(qq1, qq0, b1)):
                raise SquareZeroError(f"rational block of D∘D is nonzero at degree {n}")


@dataclass(frozen=True)
class MixedElement:
    """Normal form: torsion residues, free integers, torus values mod 1, vector part."""

    torsion: tuple[int, ...]
    free: tuple[int, ...]
    torus: tuple[Fraction, ...]
    vector: tuple[Fraction, ...]

    def is_zero(self) -> bool:
        return not (any(self.torsion) or any(self.free) or any(self.torus) or any(self.vector))

    def lifted(self) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
        return self.torsion + self.free, self.torus + self.vector


@dataclass
class MixedAbelianGroup:
    """Discrete part (f.g. abelian) + torus (Q^t/Z^t) + rational vector space.

    Built by :func:`mixed_homology`.  The lifted coordinate space is
    Z^(s+r) + Q^(t+v); its relation subgroup is d_i Z on torsion
    coordinates and Z on torus coordinates.
    """

    torsion: tuple[int, ...]
    rank: int
    torus_dim: int
    vector_dim: int
    complex: MixedComplex | None = None
    degree: int = 0
    # discrete generators: (integer part, rational part) cocycles
    gen_reps: list = field(default_factory=list)
    _proj: list = field(default_factory=list)
    _ker_prev: tuple = ()
    _vbasis: list = field(default_factory=list)  # columns [im C | comp] basis of ker C
    _n_im: int = 0
    _lattice: list = field(default_factory=list)  # basis of Q^v: lattice vectors then complement
    _lattice_inv: list = field(default_factory=list)
    _vsolver: object = None

    # -- descriptive
    @property
    def discrete(self) -> FgAbelianGroup:
        return FgAbelianGroup(rank=self.rank, torsion=self.torsion)

    @property
    def int_coords(self) -> int:
        return len(self.torsion) + self.rank

    @property
    def rat_coords(self) -> int:
        return self.torus_dim + self.vector_dim

    def is_trivial(self) -> bool:
        return not (self.int_coords or self.rat_coords)

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append(_fmt_power("ℤ", self.rank))
        parts += [f"ℤ/{d}" for d in self.torsion]
        if self.torus_dim:
            parts.append("ℝ/ℤ" if self.torus_dim == 1 else f"(ℝ/ℤ)^{self.torus_dim}")
        if self.vector_dim:
            parts.append(_fmt_power("ℝ", self.vector_dim))
        return " ⊕ ".join(parts) if parts else "0"

    # -- elements
    def normalize(self, e: MixedElement) -> MixedElement:
        return MixedElement(
            tuple(int(x) % d for x, d in zip(e.torsion, self.torsion)),
            tuple(int(x) for x in e.free),
            tuple(Fraction(x) % 1 for x in e.torus),
            tuple(Fraction(x) for x in e.vector),
        )

    def zero(self) -> MixedElement:
        return MixedElement(
            (0,) * len(self.torsion), (0,) * self.rank, (Fraction(0),) * self.torus_dim,
            (Fraction(0),) * self.vector_dim,
        )

    def relation_subgroup(self) -> "MixedSubgroup":
        ni, nq = self.int_coords, self.rat_coords
        gens = []
        for i, d in enumerate(self.torsion):
            a = [0] * ni
            a[i] = d
            gens.append((tuple(a), (Fraction(0),) * nq))
        for j in range(self.torus_dim):
            b = [Fraction(0)] * nq
            b[j] = Fraction(1)
            gens.append(((0,) * ni, tuple(b)))
        return MixedSubgroup(ni, nq, (), tuple(gens))

    def lifted_coordinates(self, x: Sequence[int], y: Sequence) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
        """Coordinates of a cocycle before reducing mod the relations.

        Linear over Q on cocycles with zero integer part, which is what
        lifting homomorphisms out of divisible groups needs.
        """
        cx = self.complex
        n = self.degree
        x = [int(v) for v in x]
        y = [la.frac(v) for v in y]
        xo, yo = cx.apply(n, x, y)
        if any(xo) or any(yo):
            raise ValueError("not a cocycle")
        s = len(self.torsion)
        w = la.matvec(self._proj, x) if self._proj else []
        w = [int(v) for v in w]
        wred = [v % d for v, d in zip(w[:s], self.torsion)] + w[s:]
        rx = list(x)
        ry = list(y)
        for c, (gx, gy) in zip(wred, self.gen_reps):
            if c:
                rx = [u - c * v for u, v in zip(rx, gx)]
                ry = [u - c * v for u, v in zip(ry, gy)]
        if any(rx):
            A_prev = self.complex.block("zz", n - 1)
            a_prev = self.complex.dims(n - 1)[0]
            xp = integer_solve(A_prev, rx, a_prev)
            if xp is None:
                raise ArithmeticError("integer residue is not a boundary")
            _, by = cx.apply(n - 1, xp, [0] * cx.dims(n - 1)[1])
            ry = [u - v for u, v in zip(ry, by)]
        v = self._vector_coords(ry)
        torus_vec = la.matvec(self._lattice_inv, v) if v else []
        return tuple(wred), tuple(la.frac(t) for t in torus_vec)

    def _vector_coords(self, y):
        if not self._vbasis:
            if any(y):
                raise ArithmeticError("rational residue outside the cocycle space")
            return []
        if self._vsolver is None:
            self._vsolver = la.Solver(la.transpose(self._vbasis), len(self._vbasis))
        sol = self._vsolver.solve(y)
        if sol is None:
            raise ArithmeticError("rational residue outside the cocycle space")
        return sol[self._n_im:]

    def coordinates(self, x: Sequence[int], y: Sequence) -> MixedElement:
        ints, rats = self.lifted_coordinates(x, y)
        s, t = len(self.torsion), self.torus_dim
        return self.normalize(MixedElement(ints[:s], ints[s:], rats[:t], rats[t:]))

    def representative(self, e: MixedElement) -> tuple[list[int], list[Fraction]]:
        a, b = self.complex.dims(self.degree)
        x = [0] * a
        y = [Fraction(0)] * b
        for c, (gx, gy) in zip(e.torsion + e.free, self.gen_reps):
            if c:
                x = [u + c * v for u, v in zip(x, gx)]
                y = [u + c * v for u, v in zip(y, gy)]
        coords = list(e.torus) + list(e.vector)
        if coords:
            v = la.matvec(self._lattice, coords)  # Q^v coordinates
            comp = self._vbasis[self._n_im:]
            for c, vec in zip(v, comp):
                if c:
                    y = [u + c * w for u, w in zip(y, vec)]
        return x, y

    def is_zero(self, x, y) -> bool:
        return self.coordinates(x, y).is_zero()


def _lattice_basis(vectors: list[list[Fraction]], dim: int) -> list[list[Fraction]]:
    """Z-basis of the subgroup of Q^dim generated by ``vectors``."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    N = la.common_denominator(x for v in vecs for x in v)
    G = [[int(v[i] * N) for v in vecs] for i in range(dim)]  # dim x g
    snf = smith_normal_form(G, len(vecs))
    Uinv = integer_inverse(snf.U).tolist()
    out = []
    for i, d in enumerate(snf.diagonal):
        if d:
            out.append([Fraction(Uinv[r][i] * d, N) for r in range(dim)])
    return out


def mixed_homology(cx: MixedComplex, n: int) -> MixedAbelianGroup:
    """Degree-n cohomology of a mixed complex, in normal form."""
    cx.check_square_zero()
    a_n, b_n = cx.dims(n)
    a_p, b_p = cx.dims(n - 1)
    A = cx.block("zz", n)
    Bn = cx.block("zq", n)
    Cn = cx.block("qq", n)
    A_p = cx.block("zz", n - 1)
    B_p = cx.block("zq", n - 1)
    C_p = cx.block("qq", n - 1)

    # rational sector: ker C_n / im C_{n-1}
    b_next = cx.dims(n + 1)[1]
    c_solver = la.Solver(Cn, b_n) if (b_next and b_n) else None
    kerC = c_solver.nullspace() if c_solver else [
        [Fraction(int(i == j)) for i in range(b_n)] for j in range(b_n)
    ]
    imC = la.column_space(C_p, b_n) if (b_p and b_n) else []
    comp = [kerC[i] for i in la.extend_independent(imC, kerC, b_n)]
    vbasis = imC + comp
    vdim = len(comp)
    v_solver = la.Solver(la.transpose(vbasis), len(vbasis)) if vbasis else None

    def vcoords(y):
        if not vbasis:
            return []
        sol = v_solver.solve(y)
        if sol is None:
            raise ArithmeticError("vector outside the cocycle space")
        return sol[len(imC):]

    # lattice: B_{n-1} applied to integer (n-1)-cocycles
    if a_p:
        Kp = integer_kernel(A_p, a_p) if cx.dims(n)[0] else la.identity(a_p)
    else:
        Kp = []
    lat_gens = []
    for xk in Kp:
        yv = la.matvec(B_p, xk) if b_n else []
        lat_gens.append(vcoords(yv) if vdim else [])
    lattice = _lattice_basis(lat_gens, vdim) if vdim else []
    tdim = len(lattice)
    ext = la.complement_basis(lattice, vdim) if vdim else []
    basis = lattice + ext  # vectors in Q^vdim
    lat_mat = la.transpose(basis) if basis else []
    lat_inv = la.inverse(lat_mat) if basis else []

    # discrete sector: integer cocycles x with B x in im C_n, modulo im A_{n-1}
    K, kinv = _kernel_with_coords(A, a_n) if cx.dims(n + 1)[0] else (la.identity(a_n), la.identity(a_n))
    if b_next and K:
        if c_solver is not None:
            left = c_solver.left_null
        else:
            left = [{i: Fraction(1)} for i in range(b_next)]
        # constraint matrix on K-coordinates: left annihilators of C_n applied to B_n K
        BK = [la.matvec(Bn, k) for k in K]
        M = [[sum((v * bk[i] for i, v in t.items() if bk[i]), Fraction(0)) for bk in BK] for t in left]
        M = [row for row in M if any(row)]
        if M:
            Mi, _ = la.to_integer_rows(M)
            subK, subinv = _kernel_with_coords(Mi, len(K))
            K2 = [[sum(c[j] * K[j][a] for j in range(len(K)) if c[j]) for a in range(a_n)] for c in subK]
            kinv2 = la.matmul(subinv, kinv, len(K)) if subinv else []
            K, kinv = K2, kinv2
    image = [list(col) for col in zip(*A_p)] if (a_p and a_n) else []
    if K:
        torsion, rank, gens, proj = _quotient_presentation(K, kinv, image)
    else:
        torsion, rank, gens, proj = (), 0, [], []

    gen_reps = []
    for g in gens:
        by = la.matvec(Bn, g) if b_next else []
        if b_next and any(by):
            sol = c_solver.solve([-v for v in by]) if c_solver else None
            if sol is None:
                raise ArithmeticError("discrete generator does not lift to a cocycle")
        else:
            sol = [Fraction(0)] * b_n
        gen_reps.append((list(g), sol))

    return MixedAbelianGroup(
        torsion=torsion,
        rank=rank,
        torus_dim=tdim,
        vector_dim=vdim - tdim,
        complex=cx,
        degree=n,
        gen_reps=gen_reps,
        _proj=[list(p) for p in proj],
        _vbasis=vbasis,
        _n_im=len(imC),
        _lattice=lat_mat,
        _lattice_inv=lat_inv,
        _vsolver=v_solver,
    )


# -------------------------------------------- subgroups of Z^n + Q^m


@dataclass(frozen=True)
class MixedMap:
    """Homomorphism Z^n + Q^m -> Z^n' + Q^m' (no Q -> Z block)."""

    zz: tuple  # n' x n integers
    zq: tuple  # m' x n rationals
    qq: tuple  # m' x m rationals
    src: tuple[int, int]
    tgt: tuple[int, int]

    @classmethod
    def from_images(cls, src: tuple[int, int], tgt: tuple[int, int], int_images, rat_images) -> "MixedMap":
        """Build from images of the basis: int_images[i] = (a', b'), rat_images[j] = b'."""
        n, m = src
        n2, m2 = tgt
        zz = [[int_images[i][0][r] for i in range(n)] for r in range(n2)]
        zq = [[la.frac(int_images[i][1][r]) for i in range(n)] for r in range(m2)]
        qq = [[la.frac(rat_images[j][r]) for j in range(m)] for r in range(m2)]
        return cls(tuple(map(tuple, zz)), tuple(map(tuple, zq)), tuple(map(tuple, qq)), src, tgt)

    def __call__(self, a, b):
        xo = tuple(int(v) for v in la.matvec([list(r) for r in self.zz], a)) if self.tgt[0] else ()
        yo = ()
        if self.tgt[1]:
            u = la.matvec([list(r) for r in self.zq], a) if self.src[0] else [0] * self.tgt[1]
            v = la.matvec([list(r) for r in self.qq], b) if self.src[1] else [0] * self.tgt[1]
            yo = tuple(la.frac(p) + la.frac(q) for p, q in zip(u, v))
        return xo, yo


@dataclass(frozen=True)
class MixedSubgroup:
    """U + span_Z(gens) inside Z^n + Q^m, with U a subspace of the Q part."""

    n: int
    m: int
    divisible: tuple  # basis vectors of U (length m)
    gens: tuple  # pairs (int tuple, rational tuple)

    def _reducer(self):
        if not self.divisible:
            return [], []
        r, piv = la.rref([list(v) for v in self.divisible], self.m)
        return r[: len(piv)], piv

    def _reduce(self, b, red):
        rows, piv = red
        b = [la.frac(x) for x in b]
        for row, p in zip(rows, piv):
            if b[p]:
                f = b[p]
                b = [x - f * y for x, y in zip(b, row)]
        return b

    def find(self, a, b):
        """Integer coefficients on gens expressing (a, b) modulo U, or None."""
        red = self._reducer()
        target_b = self._reduce(b, red)
        gb = [self._reduce(g[1], red) for g in self.gens]
        N = la.common_denominator(list(target_b) + [x for v in gb for x in v])
        cols = len(self.gens)
        rows = []
        rhs = []
        for i in range(self.n):
            rows.append([int(g[0][i]) for g in self.gens])
            rhs.append(int(a[i]))
        for i in range(self.m):
            rows.append([int(v[i] * N) for v in gb])
            rhs.append(int(target_b[i] * N))
        if cols == 0:
            return [] if not any(rhs) else None
        return integer_solve(rows, rhs, cols)

    def contains(self, a, b) -> bool:
        return self.find(a, b) is not None

    def contains_line(self, b) -> bool:
        """Whether the whole Q-line through (0, b) lies in the subgroup."""
        red = self._reducer()
        return not any(self._reduce(b, red))

    def __add__(self, other: "MixedSubgroup") -> "MixedSubgroup":
        return MixedSubgroup(self.n, self.m, self.divisible + other.divisible, self.gens + other.gens)

    def first_outside(self, other: "MixedSubgroup"):
        """First generator of self not contained in other (None if self <= other)."""
        for v in self.divisible:
            if not other.contains_line(v):
                return ("line", tuple(v))
        for g in self.gens:
            if not other.contains(*g):
                return ("element", g)
        return None

    def equals(self, other: "MixedSubgroup") -> bool:
        return self.first_outside(other) is None and other.first_outside(self) is None


def image_subgroup(f: MixedMap, H: MixedSubgroup) -> MixedSubgroup:
    div = []
    for u in H.divisible:
        _, yo = f((0,) * f.src[0], u)
        if any(yo):
            div.append(tuple(yo))
    gens = tuple(f(a, b) for a, b in H.gens)
    return MixedSubgroup(f.tgt[0], f.tgt[1], tuple(div), gens)


def full_subgroup(n: int, m: int) -> MixedSubgroup:
    gens = tuple((tuple(int(i == j) for j in range(n)), (Fraction(0),) * m) for i in range(n))
    div = tuple(tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m))
    return MixedSubgroup(n, m, div, gens)


def preimage_subgroup(f: MixedMap, H: MixedSubgroup) -> MixedSubgroup:
    """{(a, b) : f(a, b) in H}, as a mixed subgroup of the source."""
    n, m = f.src
    n2, m2 = f.tgt
    zz = [list(r) for r in f.zz]
    zq = [list(r) for r in f.zq]
    qq = [list(r) for r in f.qq]
    U = [list(u) for u in H.divisible]
    p = len(H.gens)
    # columns of [qq | U^T] span the rational freedom
    free_cols = [[qq[r][j] for r in range(m2)] for j in range(m)] + U
    if m2:
        if free_cols:
            left = la.nullspace([list(c) for c in free_cols], m2)  # rows p with p.col = 0
        else:
            left = [[Fraction(int(i == j)) for j in range(m2)] for i in range(m2)]
    else:
        left = []
    # integer system on (a, lambda)
    rows = []
    for r in range(n2):
        rows.append([Fraction(zz[r][i]) for i in range(n)] + [Fraction(-H.gens[j][0][r]) for j in range(p)])
    for pr in left:
        rowa = [sum(pr[r] * zq[r][i] for r in range(m2)) for i in range(n)]
        rowl = [-sum(pr[r] * la.frac(H.gens[j][1][r]) for r in range(m2)) for j in range(p)]
        rows.append(rowa + rowl)
    rows = [r for r in rows if any(r)]
    nv = n + p
    if rows:
        Mi, _ = la.to_integer_rows(rows)
        ker = integer_kernel(Mi, nv)
    else:
        ker = la.identity(nv)
    gens = []
    for v in ker:
        a = v[:n]
        lam = v[n:]
        target = [
            sum(lam[j] * la.frac(H.gens[j][1][r]) for j in range(p))
            - sum(zq[r][i] * a[i] for i in range(n))
            for r in range(m2)
        ]
        if m:
            mat = [[free_cols[c][r] for c in range(len(free_cols))] for r in range(m2)] if m2 else []
            sol = la.solve(mat, target, len(free_cols)) if m2 else [Fraction(0)] * len(free_cols)
            if sol is None:
                raise ArithmeticError("inconsistent preimage system")
            b = tuple(sol[:m])
        else:
            b = ()
        if any(a) or any(b):
            gens.append((tuple(int(x) for x in a), b))
    # divisible part: b with qq b in U
    if m:
        if m2:
            ann = la.nullspace(U, m2) if U else [[Fraction(int(i == j)) for j in range(m2)] for i in range(m2)]
            cons = [[sum(w[r] * qq[r][j] for r in range(m2)) for j in range(m)] for w in ann]
            cons = [c for c in cons if any(c)]
            div = la.nullspace(cons, m) if cons else [[Fraction(int(i == j)) for i in range(m)] for j in range(m)]
        else:
            div = [[Fraction(int(i == j)) for i in range(m)] for j in range(m)]
    else:
        div = []
    return MixedSubgroup(n, m, tuple(tuple(d) for d in div), tuple(gens))


class MixedSolver:
    """Reusable solver for zz a = s, zq a + qq b = t with a integral, b rational."""

    def __init__(self, zz, zq, qq, n: int, m: int):
        self.n, self.m = n, m
        self.zq = [[la.frac(x) for x in row] for row in zq]
        if qq and m:
            self.solver = la.Solver(qq, m)
            left = self.solver.left_null
        else:
            self.solver = None
            left = [{i: Fraction(1)} for i in range(len(zq))]
        self.left = left
        self.zz = [[Fraction(x) for x in row] for row in zz]
        self.zq_left = [
            [sum((v * self.zq[i][j] for i, v in t.items() if self.zq[i][j]), Fraction(0)) for j in range(n)]
            for t in left
        ]

    def solve(self, target_int, target_rat):
        n, m = self.n, self.m
        t_int = [int(v) for v in target_int]
        t_rat = [la.frac(v) for v in target_rat]
        rows = list(self.zz) + list(self.zq_left)
        rhs = [Fraction(v) for v in t_int]
        rhs += [sum((v * t_rat[i] for i, v in t.items() if t_rat[i]), Fraction(0)) for t in self.left]
        keep = [i for i, r in enumerate(rows) if any(r) or rhs[i]]
        rows = [rows[i] for i in keep]
        rhs = [rhs[i] for i in keep]
        if rows:
            scaled, N = la.to_integer_rows([r + [b] for r, b in zip(rows, rhs)])
            mat = [r[:-1] for r in scaled]
            vec = [r[-1] for r in scaled]
            a = integer_solve(mat, vec, n) if n else ([] if not any(vec) else None)
            if a is None:
                return None
        else:
            a = [0] * n
        resid = [t - sum((self.zq[i][j] * a[j] for j in range(n) if a[j]), Fraction(0)) for i, t in enumerate(t_rat)]
        if m:
            b = self.solver.solve(resid) if self.solver else None
            if b is None:
                return None
        else:
            if any(resid):
                return None
            b = []
        return a, b


def mixed_solve(zz, zq, qq, n: int, m: int, target_int, target_rat):
    """(a, b) in Z^n + Q^m with zz a = target_int and zq a + qq b = target_rat, or None."""
    return MixedSolver(zz, zq, qq, n, m).solve(target_int, target_rat)
