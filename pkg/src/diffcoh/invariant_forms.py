"""Chern–Weil calculus over finite DGAs.

Connections and curvatures are square matrices of DGA elements.  All
transcendental constants (2πi, π) are carried as :class:`FormalScalar`
prefactors and never evaluated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

from . import linalg as la
from .gca import Element, FiniteDGA, polynomial_forms

__all__ = [
    "FiniteDGA", "FormalScalar", "FormalForm", "MatrixForm", "CharacteristicSeries",
    "InvariantPolynomial", "Verdict", "KoszulAlgebra", "KoszulReport", "RP3Report",
    "curvature", "bianchi_check", "chern_forms", "pontryagin_forms", "euler_form", "euler_class",
    "inverse_classes", "cs_transgression", "variation_check", "whitney_check", "koszul_suite",
    "rp3_phi", "pfaffian", "determinant", "elementary", "chern_polynomial", "pontryagin_polynomial",
    "trace_polynomial", "so3_dga", "so3_connection", "torus_dga", "polynomial_dga",
    "random_matrix_form", "pf_squared_check", "pfaffian_conjugation_check", "dP_check",
    "symbolic_inverse_classes", "SO3_STRUCTURE",
]


class ShapeError(ValueError):
    pass


# ---------------------------------------------------------------- scalars


@dataclass(frozen=True)
class FormalScalar:
    """coeff · π^pi · i^i with i ∈ {0, 1}."""

    coeff: Fraction = Fraction(1)
    pi: int = 0
    i: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", la.frac(self.coeff))
        if self.i not in (0, 1):
            q, r = divmod(self.i, 2)
            object.__setattr__(self, "coeff", self.coeff * (-1) ** q)
            object.__setattr__(self, "i", r)

    @classmethod
    def two_pi_i(cls, power: int = 1) -> "FormalScalar":
        return cls(Fraction(2), 1, 1) ** power

    def __mul__(self, o):
        if not isinstance(o, FormalScalar):
            return FormalScalar(self.coeff * la.frac(o), self.pi, self.i)
        return FormalScalar(self.coeff * o.coeff, self.pi + o.pi, self.i + o.i)

    __rmul__ = __mul__

    def __neg__(self):
        return FormalScalar(-self.coeff, self.pi, self.i)

    def inverse(self) -> "FormalScalar":
        # i^{-1} = −i
        return FormalScalar((-1 if self.i else 1) / self.coeff, -self.pi, self.i)

    def __truediv__(self, o):
        if not isinstance(o, FormalScalar):
            o = FormalScalar(la.frac(o))
        return self * o.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = FormalScalar()
        for _ in range(k):
            out = out * self
        return out

    @property
    def is_rational(self) -> bool:
        return self.pi == 0 and self.i == 0

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coeff

    def __str__(self):
        parts = [str(self.coeff)]
        if self.pi:
            parts.append("π" if self.pi == 1 else f"π^{self.pi}")
        if self.i:
            parts.append("i")
        return "·".join(parts)


@dataclass
class FormalForm:
    """raw · scalar, with raw a DGA element."""

    raw: Element
    scalar: FormalScalar = field(default_factory=FormalScalar)

    def d(self) -> "FormalForm":
        return FormalForm(self.raw.d(), self.scalar)

    def is_zero(self) -> bool:
        return self.raw.is_zero() or self.scalar.coeff == 0

    def _aligned(self, o: "FormalForm") -> Element:
        if o.is_zero():
            return o.raw.alg.zero() if isinstance(o.raw, Element) else o.raw
        if (o.scalar.pi, o.scalar.i) != (self.scalar.pi, self.scalar.i):
            raise ValueError("adding forms with different transcendental prefactors")
        return o.raw * (o.scalar.coeff / self.scalar.coeff)

    def __add__(self, o: "FormalForm") -> "FormalForm":
        if self.is_zero():
            return o
        return FormalForm(self.raw + self._aligned(o), self.scalar)

    def __sub__(self, o: "FormalForm") -> "FormalForm":
        return self + FormalForm(o.raw, -o.scalar)

    def __mul__(self, o):
        if isinstance(o, FormalForm):
            return FormalForm(self.raw * o.raw, self.scalar * o.scalar)
        if isinstance(o, FormalScalar):
            return FormalForm(self.raw, self.scalar * o)
        return FormalForm(self.raw * o, self.scalar)

    def __eq__(self, o):
        if not isinstance(o, FormalForm):
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return self.is_zero() and o.is_zero()
        return (self - o).is_zero()

    def __str__(self):
        return f"({self.raw})·{self.scalar}"


# --------------------------------------------------------- commutative algebra


class _Dual:
    """a + ε b with ε² = 0; b may be odd as long as a is even."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def __add__(self, o):
        o = _dual(o)
        return _Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _dual(o)
        return _Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _dual(o) - self

    def __neg__(self):
        return _Dual(-self.a, -self.b)

    def __mul__(self, o):
        o = _dual(o)
        return _Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__


def _dual(x):
    return x if isinstance(x, _Dual) else _Dual(x, 0)


def _zero_like(x):
    if isinstance(x, Element):
        return x.alg.zero()
    if isinstance(x, _Dual):
        return _Dual(_zero_like(x.a), _zero_like(x.a))
    return Fraction(0)


def _one_like(x):
    if isinstance(x, Element):
        return x.alg.one()
    if isinstance(x, _Dual):
        return _Dual(_one_like(x.a), _zero_like(x.a))
    return Fraction(1)


def determinant(m: Sequence[Sequence]):
    """Laplace expansion with memo over column subsets; entries must commute."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    one = _one_like(m[0][0])

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset):
        if row == n:
            return one
        acc = _zero_like(one)
        for pos, c in enumerate(sorted(cols)):
            e = m[row][c]
            if isinstance(e, Element) and e.is_zero() or (not isinstance(e, (Element, _Dual)) and not e):
                continue
            term = e * minor(row + 1, cols - {c})
            acc = acc - term if pos % 2 else acc + term
        return acc

    return minor(0, frozenset(range(n)))


def elementary(m: Sequence[Sequence], k: int):
    """Sum of the principal k×k minors, i.e. e_k of the eigenvalues."""
    n = len(m)
    if k == 0:
        return _one_like(m[0][0]) if n else Fraction(1)
    acc = None
    for S in combinations(range(n), k):
        d = determinant([[m[i][j] for j in S] for i in S])
        acc = d if acc is None else acc + d
    return acc if acc is not None else _zero_like(m[0][0])


def pfaffian(m: Sequence[Sequence]):
    """Perfect-matching expansion along the first row."""
    n = len(m)
    if n % 2:
        raise ShapeError("Pfaffian of an odd-size matrix")
    if n == 0:
        return Fraction(1)
    idx = tuple(range(n))

    @lru_cache(maxsize=None)
    def pf(rest: tuple):
        if not rest:
            return _one_like(m[0][0])
        i = rest[0]
        acc = _zero_like(m[0][0])
        for pos, j in enumerate(rest[1:]):
            e = m[i][j]
            if isinstance(e, Element) and e.is_zero() or (not isinstance(e, (Element, _Dual)) and not e):
                continue
            sub = tuple(x for x in rest[1:] if x != j)
            term = e * pf(sub)
            acc = acc - term if pos % 2 else acc + term
        return acc

    return pf(idx)


# ------------------------------------------------------------- matrix forms


_TAGS = ("general", "orthogonal", "traceless", "unitary-traceless")


class MatrixForm:
    """Square matrix of DGA elements with a Lie-algebra tag checked entrywise."""

    def __init__(self, alg: FiniteDGA, entries, tag: str = "general"):
        if tag not in _TAGS:
            raise ValueError(f"unknown constraint tag {tag!r}")
        self.alg = alg
        rows = [[alg.coerce(e) if not isinstance(e, str) else alg.parse(e) for e in row] for row in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ShapeError("matrix form must be square")
        self.entries = rows
        self.n = n
        self.tag = tag
        bad = self.constraint_violation()
        if bad:
            raise ShapeError(f"{tag} constraint fails at {bad}")

    def constraint_violation(self):
        e = self.entries
        if self.tag == "orthogonal":
            for i in range(self.n):
                for j in range(i, self.n):
                    if not (e[i][j] + e[j][i]).is_zero():
                        return (i, j)
        if self.tag in ("traceless", "unitary-traceless"):
            if not self.trace().is_zero():
                return "trace"
        return None

    @classmethod
    def zero(cls, alg: FiniteDGA, n: int, tag: str = "general") -> "MatrixForm":
        return cls(alg, [[alg.zero()] * n for _ in range(n)], tag)

    @classmethod
    def scalar(cls, alg: FiniteDGA, m, tag: str = "general") -> "MatrixForm":
        return cls(alg, [[alg.const(x) for x in row] for row in m], tag)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def degree(self) -> int | None:
        degs = {e.degree() for row in self.entries for e in row if not e.is_zero()}
        if len(degs) > 1:
            raise ShapeError("matrix entries of mixed degree")
        return degs.pop() if degs else None

    def _same(self, o: "MatrixForm"):
        if o.n != self.n:
            raise ShapeError("size mismatch")

    def _meet(self, o):
        return self.tag if self.tag == o.tag else "general"

    def __add__(self, o: "MatrixForm") -> "MatrixForm":
        self._same(o)
        return MatrixForm(self.alg, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, o.entries)],
                          self._meet(o))

    def __sub__(self, o: "MatrixForm") -> "MatrixForm":
        self._same(o)
        return MatrixForm(self.alg, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, o.entries)],
                          self._meet(o))

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "MatrixForm":
        if isinstance(c, Element):
            return MatrixForm(self.alg, [[c * a for a in r] for r in self.entries])
        return MatrixForm(self.alg, [[a * c for a in r] for r in self.entries], self.tag)

    def __mul__(self, o: "MatrixForm") -> "MatrixForm":
        """Matrix product with the wedge product on entries."""
        self._same(o)
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.alg.zero()
                for k in range(n):
                    a, b = self.entries[i][k], o.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixForm(self.alg, out)

    def d(self) -> "MatrixForm":
        return MatrixForm(self.alg, [[e.d() for e in r] for r in self.entries], self.tag)

    def transpose(self) -> "MatrixForm":
        return MatrixForm(self.alg, [list(c) for c in zip(*self.entries)], self.tag)

    def trace(self) -> Element:
        acc = self.alg.zero()
        for i in range(self.n):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def __eq__(self, o):
        if not isinstance(o, MatrixForm):
            return NotImplemented
        return self.n == o.n and all(a == b for r, s in zip(self.entries, o.entries) for a, b in zip(r, s))

    def block_sum(self, o: "MatrixForm") -> "MatrixForm":
        n, m = self.n, o.n
        z = self.alg.zero()
        rows = [list(r) + [z] * m for r in self.entries]
        rows += [[z] * n + [o.alg.coerce(e) if o.alg is not self.alg else e for e in r] for r in o.entries]
        return MatrixForm(self.alg, rows, self._meet(o))

    def conjugate(self, g, g_inv=None) -> "MatrixForm":
        """g·X·g⁻¹ for an invertible rational matrix g."""
        g = [[la.frac(x) for x in row] for row in g]
        gi = la.inverse(g) if g_inv is None else g_inv
        G = MatrixForm.scalar(self.alg, g)
        Gi = MatrixForm.scalar(self.alg, gi)
        return G * self * Gi

    def map(self, f: Callable[[Element], Element], alg: FiniteDGA | None = None) -> "MatrixForm":
        return MatrixForm(alg or self.alg, [[f(e) for e in r] for r in self.entries], self.tag)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(e) for e in r) for r in self.entries) + "]"


def _require_degree(A: MatrixForm, deg: int, what: str):
    d = A.degree()
    if d is not None and d != deg:
        raise ShapeError(f"{what} needs degree-{deg} entries, got degree {d}")


@dataclass
class Verdict:
    name: str
    passed: bool
    witness: object = None

    def __bool__(self):
        return self.passed

    def __str__(self):
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'}"


def curvature(A: MatrixForm) -> MatrixForm:
    """F = dA + A∧A."""
    _require_degree(A, 1, "curvature")
    F = A.d() + A * A
    tag = A.tag if A.tag in ("orthogonal",) else "general"
    return MatrixForm(A.alg, F.entries, tag)


def bianchi_check(A: MatrixForm) -> Verdict:
    """dF = F∧A − A∧F."""
    F = curvature(A)
    lhs = F.d()
    rhs = F * A - A * F
    for i in range(A.n):
        for j in range(A.n):
            if lhs[i, j] != rhs[i, j]:
                return Verdict("Bianchi", False, ((i, j), str(lhs[i, j] - rhs[i, j])))
    return Verdict("Bianchi", True)


# ------------------------------------------------------ characteristic data


@dataclass
class CharacteristicSeries:
    """Total class Σ raw_{2j} · scale^j; raw[0] = 1 for total classes."""

    alg: FiniteDGA
    raw: dict
    scale: FormalScalar = field(default_factory=FormalScalar)

    def __post_init__(self):
        self.raw = {d: self.alg.coerce(e) for d, e in self.raw.items() if not self.alg.coerce(e).is_zero()}
        if any(d % 2 for d in self.raw):
            raise ValueError("characteristic series live in even degrees")

    def term(self, degree: int) -> FormalForm:
        e = self.raw.get(degree, self.alg.zero())
        return FormalForm(e, self.scale ** (degree // 2))

    def __getitem__(self, degree: int) -> Element:
        return self.raw.get(degree, self.alg.zero())

    @property
    def max_degree(self) -> int:
        return max(self.raw, default=0)

    def truncate(self, top: int) -> "CharacteristicSeries":
        return CharacteristicSeries(self.alg, {d: e for d, e in self.raw.items() if d <= top}, self.scale)

    def __mul__(self, o: "CharacteristicSeries") -> "CharacteristicSeries":
        if o.scale != self.scale:
            raise ValueError("multiplying series with different normalizations")
        out: dict = {}
        for a, x in self.raw.items():
            for b, y in o.raw.items():
                p = x * y
                if not p.is_zero():
                    out[a + b] = out[a + b] + p if a + b in out else p
        return CharacteristicSeries(self.alg, out, self.scale)

    def is_one(self, top: int | None = None) -> bool:
        for d, e in self.raw.items():
            if top is not None and d > top:
                continue
            if d == 0:
                if e != self.alg.one():
                    return False
            elif not e.is_zero():
                return False
        return self.raw.get(0) is not None

    def __eq__(self, o):
        if not isinstance(o, CharacteristicSeries):
            return NotImplemented
        keys = set(self.raw) | set(o.raw)
        return self.scale == o.scale and all(self[k] == o[k] for k in keys)

    def __str__(self):
        return " + ".join(f"[{self.raw[d]}]·({self.scale})^{d // 2}" for d in sorted(self.raw)) or "0"


def _even_entries(F: MatrixForm):
    d = F.degree()
    if d is not None and d % 2:
        raise ShapeError("characteristic forms need even-degree entries")


def chern_forms(F: MatrixForm) -> CharacteristicSeries:
    """det(1 − F/2πi): raw_{2k} = e_k(F), scale = −1/(2πi)."""
    _even_entries(F)
    raw = {2 * k: elementary(F.entries, k) for k in range(F.n + 1)}
    return CharacteristicSeries(F.alg, raw, -FormalScalar.two_pi_i(-1))


def pontryagin_forms(F: MatrixForm) -> CharacteristicSeries:
    """p_k = e_{2k}(F)/(2π)^{2k} for antisymmetric F; odd e_k are checked to vanish."""
    _even_entries(F)
    if F.tag != "orthogonal" and not _antisymmetric(F):
        raise ShapeError("Pontryagin forms need an antisymmetric curvature")
    raw = {}
    for k in range(F.n + 1):
        e = elementary(F.entries, k)
        if k % 2:
            if not e.is_zero():
                raise AssertionError(f"odd coefficient e_{k} of an antisymmetric matrix is nonzero")
            continue
        raw[2 * k] = e
    return CharacteristicSeries(F.alg, raw, FormalScalar(Fraction(1, 2), -1))


def _antisymmetric(F: MatrixForm) -> bool:
    return all((F[i, j] + F[j, i]).is_zero() for i in range(F.n) for j in range(F.n))


def euler_form(F: MatrixForm) -> Element:
    """pf(F) for antisymmetric even-size F."""
    if F.n % 2:
        raise ShapeError("Euler form needs even rank")
    if not _antisymmetric(F):
        raise ShapeError("Euler form needs an antisymmetric curvature")
    _even_entries(F)
    return F.alg.coerce(pfaffian(F.entries))


def euler_class(F: MatrixForm) -> FormalForm:
    """pf(F/2π) with the 2π tracked formally."""
    return FormalForm(euler_form(F), FormalScalar(Fraction(1, 2), -1) ** (F.n // 2))


def pf_squared_check(X: MatrixForm) -> Verdict:
    pf = euler_form(X)
    det = X.alg.coerce(determinant(X.entries))
    return Verdict(f"pf² = det (n={X.n})", pf * pf == det, None if pf * pf == det else str(pf * pf - det))


def pfaffian_conjugation_check(X: MatrixForm, g) -> Verdict:
    """pf(g X gᵀ) = det(g) pf(X); for orthogonal g this is pf(g X g⁻¹)."""
    g = [[la.frac(x) for x in row] for row in g]
    gt = la.transpose(g)
    Y = MatrixForm.scalar(X.alg, g) * X * MatrixForm.scalar(X.alg, gt)
    lhs = euler_form(Y)
    rhs = euler_form(X) * la.det(g)
    return Verdict("pf(g X gᵀ) = det(g) pf(X)", lhs == rhs, None if lhs == rhs else str(lhs - rhs))


def whitney_check(F1: MatrixForm, F2: MatrixForm, family: str) -> Verdict:
    """Total class of diag(F₁, F₂) against the product of total classes."""
    if F1.alg is not F2.alg:
        raise ShapeError("blocks live in different DGAs")
    S = F1.block_sum(F2)
    if family == "chern":
        ok = chern_forms(S) == chern_forms(F1) * chern_forms(F2)
    elif family == "pontryagin":
        ok = pontryagin_forms(S) == pontryagin_forms(F1) * pontryagin_forms(F2)
    elif family == "euler":
        ok = euler_form(S) == euler_form(F1) * euler_form(F2)
    else:
        raise ValueError(f"unknown family {family!r}")
    return Verdict(f"Whitney ({family})", ok)


def inverse_classes(c: CharacteristicSeries, top: int) -> CharacteristicSeries:
    """c⊥ with c · c⊥ = 1 through degree ``top``."""
    if c[0] != c.alg.one():
        raise ValueError("leading term of a total class must be 1")
    inv = {0: c.alg.one()}
    for d in range(2, top + 1, 2):
        acc = c.alg.zero()
        for a in range(2, d + 1, 2):
            if a in c.raw and d - a in inv:
                acc = acc + c.raw[a] * inv[d - a]
        inv[d] = -acc
    return CharacteristicSeries(c.alg, inv, c.scale)


def symbolic_inverse_classes(n: int, top: int):
    """Inverse of 1 + C₁ + ⋯ + Cₙ over free generators C_j of degree 2j."""
    names = [f"C{j}" for j in range(1, n + 1)]
    alg = FiniteDGA(names, [2 * j for j in range(1, n + 1)])
    c = CharacteristicSeries(alg, {0: alg.one(), **{2 * j: alg.gen(f"C{j}") for j in range(1, n + 1)}})
    return alg, c, inverse_classes(c, top)


# ------------------------------------------------------- invariant polynomials


@dataclass
class InvariantPolynomial:
    """Ad-invariant polynomial of degree k, evaluated through ``raw``; value raw · scalar."""

    name: str
    degree: int
    raw: Callable
    scalar: FormalScalar = field(default_factory=FormalScalar)

    def __call__(self, X: MatrixForm) -> FormalForm:
        return FormalForm(X.alg.coerce(self.raw(X.entries)), self.scalar)

    def linearized(self, X: MatrixForm, Y: MatrixForm) -> FormalForm:
        """d/dε f(X + εY) at 0, i.e. k·f(Y, X, …, X)."""
        m = [[_Dual(a, b) for a, b in zip(r, s)] for r, s in zip(X.entries, Y.entries)]
        v = self.raw(m)
        b = v.b if isinstance(v, _Dual) else 0
        return FormalForm(X.alg.coerce(b), self.scalar)


def chern_polynomial(k: int) -> InvariantPolynomial:
    return InvariantPolynomial(f"c{k}", k, lambda m: elementary(m, k), (-FormalScalar.two_pi_i(-1)) ** k)


def pontryagin_polynomial(k: int) -> InvariantPolynomial:
    return InvariantPolynomial(f"p{k}", 2 * k, lambda m: elementary(m, 2 * k), FormalScalar(Fraction(1, 2), -1) ** (2 * k))


def _mat_mul(a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                t = a[i][k] * b[k][j]
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def _trace_power(m, k: int):
    p = m
    for _ in range(k - 1):
        p = _mat_mul(p, m)
    acc = None
    for i in range(len(m)):
        acc = p[i][i] if acc is None else acc + p[i][i]
    return acc


def trace_polynomial(k: int, scalar: FormalScalar | None = None) -> InvariantPolynomial:
    return InvariantPolynomial(f"tr^{k}", k, lambda m: _trace_power(m, k), scalar or FormalScalar())


# ---------------------------------------------------------- transgression


def _path_algebra(alg: FiniteDGA, extra: Sequence[str] = ()):
    """alg ⊗ ℚ[extra] ⊗ ℚ[s, ds] with the extra parameters closed."""
    names = list(extra) + ["__s", "__ds"]
    degs = [0] * len(extra) + [0, 1]
    ext = alg.extend(names, degs, {"__s": "__ds"}, weights=[1] * len(extra) + [1, 1])
    if alg.top is not None:
        ext.top = alg.top + 1
    return ext


def _split_by(ext: FiniteDGA, x: Element, name: str) -> dict:
    """Coefficients of x as a polynomial in one degree-0 generator: power -> Element."""
    i = ext.index[name]
    out: dict = {}
    for m, c in x.terms.items():
        p = m[i]
        mm = m[:i] + (0,) + m[i + 1:]
        out.setdefault(p, {})[mm] = c
    return {p: Element(ext, t) for p, t in out.items()}


def _restrict(base: FiniteDGA, x: Element) -> Element:
    """Element of an extension with no extra generators, viewed in ``base``."""
    out = {}
    for m, c in x.terms.items():
        if any(m[base.n:]):
            raise ValueError("element still involves path parameters")
        out[m[: base.n]] = c
    return Element(base, out)


def _integrate_path(ext: FiniteDGA, x: Element) -> Element:
    """∫₀¹ along s of the part of x containing ds, with ds moved to the front."""
    i_s, i_ds = ext.index["__s"], ext.index["__ds"]
    out: dict = {}
    for m, c in x.terms.items():
        if not m[i_ds]:
            continue
        # ds is the last generator; moving it to the front passes the rest of m
        rest = list(m)
        rest[i_ds] = 0
        deg = ext.mono_degree(tuple(rest))
        sign = -1 if deg % 2 else 1
        p = rest[i_s]
        rest[i_s] = 0
        k = tuple(rest)
        out[k] = out.get(k, 0) + sign * c / (p + 1)
    return Element(ext, {k: v for k, v in out.items() if v})


def cs_transgression(A0: MatrixForm, A1: MatrixForm, f: InvariantPolynomial) -> FormalForm:
    """∫₀¹ f(F) over the straight path Ā = A₀ + s(A₁ − A₀); d of it is f(F₁) − f(F₀)."""
    _require_degree(A0, 1, "cs_transgression")
    _require_degree(A1, 1, "cs_transgression")
    if A0.n != A1.n or A0.alg is not A1.alg:
        raise ShapeError("connections must have the same size and DGA")
    base = A0.alg
    ext = _path_algebra(base)
    s = ext.gen("__s")
    Abar = MatrixForm(ext, [[ext.include(a) + s * ext.include(b - a) for a, b in zip(r, q)]
                            for r, q in zip(A0.entries, A1.entries)])
    F = Abar.d() + Abar * Abar
    val = ext.coerce(f.raw(F.entries))
    return FormalForm(_restrict(base, _integrate_path(ext, val)), f.scalar)


def variation_check(path: Sequence[MatrixForm], f: InvariantPolynomial, max_weight: int | None = None) -> Verdict:
    """(d/dt) CS_f(A_t, A₀) at t = 0 minus k·f(A′∧F^{k−1}) lies in im d.

    ``path`` lists the coefficients of A_t = Σ t^j path[j].
    """
    base = path[0].alg
    n = path[0].n
    ext = _path_algebra(base, ["__t"])
    t, s = ext.gen("__t"), ext.gen("__s")
    At = [[ext.zero() for _ in range(n)] for _ in range(n)]
    for j, Aj in enumerate(path):
        for a in range(n):
            for b in range(n):
                if not Aj[a, b].is_zero():
                    At[a][b] = At[a][b] + (t ** j) * ext.include(Aj[a, b])
    A0 = [[ext.include(path[0][a, b]) for b in range(n)] for a in range(n)]
    Abar = MatrixForm(ext, [[A0[a][b] + s * (At[a][b] - A0[a][b]) for b in range(n)] for a in range(n)])
    F = Abar.d() + Abar * Abar
    cs = _integrate_path(ext, ext.coerce(f.raw(F.entries)))
    dcs = _restrict(base, _split_by(ext, cs, "__t").get(1, ext.zero()))
    Aprime = path[1] if len(path) > 1 else MatrixForm.zero(base, n)
    lin = f.linearized(curvature(path[0]), Aprime).raw
    diff = dcs - lin
    if diff.is_zero():
        return Verdict(f"variation ({f.name})", True, "identical")
    if max_weight is None:
        max_weight = max(base.mono_weight(m) for m in diff.terms) + 1
    prim = base.primitive(diff, max_weight=max_weight)
    return Verdict(f"variation ({f.name})", prim is not None, prim if prim is not None else str(diff))


def dP_check(F: MatrixForm, family: str = "chern") -> Verdict:
    series = chern_forms(F) if family == "chern" else pontryagin_forms(F)
    for d, e in series.raw.items():
        if not e.d().is_zero():
            return Verdict(f"dP(F) = 0 ({family})", False, (d, str(e.d())))
    return Verdict(f"dP(F) = 0 ({family})", True)


# ------------------------------------------------------------ shipped DGAs


def _eps(i: int, j: int, k: int) -> int:
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


def so3_structure() -> list:
    """c[a][b][c] with [e_a, e_b] = Σ_c c[a][b][c] e_c; here ε_{abc}."""
    return [[[Fraction(_eps(a, b, c)) for c in range(3)] for b in range(3)] for a in range(3)]


SO3_STRUCTURE = so3_structure()


def so3_dga(frame_sign: int = 1) -> FiniteDGA:
    """Left-invariant forms on SO(3) ≅ ℝP³ for the orthonormal coframe θ of the round metric.

    With [v₁, v₂] = 2v₃ cyclically, dθ¹ = −2θ²θ³ and cyclic; vol = θ¹θ²θ³.
    ``frame_sign = −1`` uses the coframe −θ (same algebra, rescaled generators).
    """
    s = frame_sign
    diff = {
        "th1": f"{-2 * s}*th2*th3",
        "th2": f"{-2 * s}*th3*th1",
        "th3": f"{-2 * s}*th1*th2",
    }
    return FiniteDGA(["th1", "th2", "th3"], [1, 1, 1], diff, top=3, volume="th1*th2*th3")


def so3_connection(alg: FiniteDGA) -> MatrixForm:
    """Levi-Civita connection in the frame: A_{ij} = −Σ_k ε_{ijk} θ^k."""
    th = [alg.gen(f"th{k + 1}") for k in range(3)]
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            acc = alg.zero()
            for k in range(3):
                if _eps(i, j, k):
                    acc = acc - th[k] * _eps(i, j, k)
            row.append(acc)
        rows.append(row)
    return MatrixForm(alg, rows, "orthogonal")


def torus_dga(n: int) -> FiniteDGA:
    """Invariant forms on Tⁿ: closed degree-1 generators."""
    names = [f"e{i + 1}" for i in range(n)]
    return FiniteDGA(names, [1] * n, {}, top=n, volume="*".join(names))


def polynomial_dga(n: int = 5) -> FiniteDGA:
    return polynomial_forms([f"x{i + 1}" for i in range(n)])


def random_form(alg: FiniteDGA, degree: int, rng: random.Random, terms: int = 2, max_weight: int | None = None):
    if max_weight is None:
        max_weight = degree + (1 if any(d == 0 for d in alg.degrees) else 0)
    basis = alg.basis(degree, max_weight=max_weight)
    if not basis:
        return alg.zero()
    pick = rng.sample(basis, min(terms, len(basis)))
    return Element(alg, {m: Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for m in pick})


def random_matrix_form(alg: FiniteDGA, n: int, degree: int, rng: random.Random, tag: str = "general",
                       terms: int = 2, max_weight: int | None = None) -> MatrixForm:
    rows = [[alg.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if tag == "orthogonal" and j < i:
                rows[i][j] = -rows[j][i]
            elif tag == "orthogonal" and i == j:
                continue
            else:
                rows[i][j] = random_form(alg, degree, rng, terms, max_weight)
    if tag in ("traceless", "unitary-traceless"):
        tr = alg.zero()
        for i in range(n - 1):
            tr = tr + rows[i][i]
        rows[n - 1][n - 1] = -tr
    return MatrixForm(alg, rows, tag)


# ---------------------------------------------------------------- Koszul


class KoszulAlgebra:
    """Λ(V∨) ⊗ Sym(V∨) with generators l_i (degree 1), L_i (degree 2), d l_i = L_i."""

    def __init__(self, dim: int, structure=None):
        self.dim = dim
        ls = [f"l{i + 1}" for i in range(dim)]
        Ls = [f"L{i + 1}" for i in range(dim)]
        self.alg = FiniteDGA(ls + Ls, [1] * dim + [2] * dim, {a: b for a, b in zip(ls, Ls)})
        self.structure = None
        if structure is not None:
            check_lie(structure)
            self.structure = [[[la.frac(x) for x in row] for row in mat] for mat in structure]

    def l(self, i: int) -> Element:
        return self.alg.gen(f"l{i + 1}")

    def L(self, i: int) -> Element:
        return self.alg.gen(f"L{i + 1}")

    def basis(self, degree: int):
        return self.alg.basis(degree, max_weight=degree)

    def Q(self, x: Element) -> Element:
        """Q(1⊗λ) = λ⊗1 as an odd derivation, divided by word length."""
        raw = self._Q(x)
        out = {}
        for m, c in raw.terms.items():
            length = sum(m)
            out[m] = c / length
        return Element(self.alg, out)

    @property
    def _Q(self):
        if not hasattr(self, "_q"):
            self._q = self.alg.derivation({f"L{i + 1}": self.l(i) for i in range(self.dim)}, -1)
        return self._q

    def iota(self, a: int) -> Callable[[Element], Element]:
        """ι_{e_a}: λ_i ↦ δ_{ai}, λ̃_i ↦ −ad*_{e_a} λ_i = Σ_b c[a][b][i] λ_b."""
        c = self.structure
        imgs = {}
        for i in range(self.dim):
            imgs[f"l{i + 1}"] = self.alg.const(int(a == i))
            acc = self.alg.zero()
            if c is not None:
                for b in range(self.dim):
                    if c[a][b][i]:
                        acc = acc + self.l(b) * c[a][b][i]
            imgs[f"L{i + 1}"] = acc
        return self.alg.derivation(imgs, -1)

    def lie_derivative(self, a: int) -> Callable[[Element], Element]:
        io = self.iota(a)
        return lambda x: io(x.d()) + io(x).d()

    def omega(self, i: int) -> Element:
        """Ω_λ = λ̃ + ½[λ, λ] with ½[λ,λ]_i = −½ Σ c[b][c][i] λ_b λ_c."""
        acc = self.L(i)
        if self.structure is not None:
            for b in range(self.dim):
                for cc in range(self.dim):
                    v = self.structure[b][cc][i]
                    if v:
                        acc = acc - self.l(b) * self.l(cc) * (v / 2)
        return acc


def check_lie(c) -> None:
    n = len(c)
    for a in range(n):
        for b in range(n):
            for k in range(n):
                if c[a][b][k] != -c[b][a][k]:
                    raise ValueError("structure constants are not antisymmetric")
    for a in range(n):
        for b in range(n):
            for e in range(n):
                for k in range(n):
                    # [[a,b],e] + [[b,e],a] + [[e,a],b]
                    v = sum((c[a][b][m] * c[m][e][k] + c[b][e][m] * c[m][a][k] + c[e][a][m] * c[m][b][k]
                             for m in range(n)), Fraction(0))
                    if v:
                        raise ValueError(f"Jacobi identity fails at ({a},{b},{e})")


def _elements_matrix(alg, elems, basis_idx):
    mat = [[Fraction(0)] * len(elems) for _ in basis_idx]
    for j, e in enumerate(elems):
        for m, c in e.terms.items():
            mat[basis_idx[m]][j] = c
    return mat


def _joint_kernel_dim(alg: FiniteDGA, basis, maps) -> int:
    if not basis:
        return 0
    rows_idx: dict = {}
    cols = []
    for m in basis:
        x = Element(alg, {m: Fraction(1)})
        img = {}
        for t, f in enumerate(maps):
            for mm, c in f(x).terms.items():
                img[(t, mm)] = c
        cols.append(img)
        for key in img:
            rows_idx.setdefault(key, len(rows_idx))
    if not rows_idx:
        return len(basis)
    mat = [[Fraction(0)] * len(basis) for _ in rows_idx]
    for j, img in enumerate(cols):
        for key, c in img.items():
            mat[rows_idx[key]][j] = c
    return len(basis) - la.rank(mat)


def invariant_polynomial_dim(structure, degree: int) -> int:
    """dim Sym^degree(𝔤∨)^𝔤 by solving coadjoint invariance on polynomials."""
    n = len(structure)
    names = [f"y{i + 1}" for i in range(n)]
    alg = FiniteDGA(names, [2] * n)
    c = structure
    derivs = []
    for a in range(n):
        imgs = {}
        for i in range(n):
            acc = alg.zero()
            for b in range(n):
                if c[a][b][i]:
                    acc = acc + alg.gen(f"y{b + 1}") * c[a][b][i]
            imgs[f"y{i + 1}"] = acc
        derivs.append(alg.derivation(imgs, 0))
    return _joint_kernel_dim(alg, alg.basis(2 * degree, max_weight=2 * degree), derivs)


@dataclass
class KoszulReport:
    dim: int
    lie: bool
    checks: list
    horizontal_dims: dict
    basic_dims: dict
    invariant_dims: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self):
        lines = [str(c) for c in self.checks]
        lines.append(f"horizontal dims: {self.horizontal_dims}")
        if self.lie:
            lines.append(f"basic dims: {self.basic_dims}; Sym(g*)^g dims: {self.invariant_dims}")
        return "\n".join(lines)


def koszul_suite(dim: int, structure=None, max_degree: int = 4) -> KoszulReport:
    K = KoszulAlgebra(dim, structure)
    alg = K.alg
    checks = []
    dd = alg.check_d_squared()
    checks.append(Verdict("d² = 0", dd is None, dd))

    ok, wit = True, None
    for deg in range(0, max_degree + 1):
        for m in K.basis(deg):
            x = Element(alg, {m: Fraction(1)})
            lhs = K.Q(x).d() + K.Q(x.d())
            rhs = x - alg.const(x.constant_term())
            if lhs != rhs:
                ok, wit = False, str(x)
                break
        if not ok:
            break
    checks.append(Verdict("dQ + Qd = id − constants", ok, wit))

    ok, wit = True, None
    for deg in range(1, max_degree + 1):
        b0, b1, b2 = K.basis(deg - 1), K.basis(deg), K.basis(deg + 1)
        idx1 = {m: i for i, m in enumerate(b1)}
        idx2 = {m: i for i, m in enumerate(b2)}
        d_in = _elements_matrix(alg, [Element(alg, {m: Fraction(1)}).d() for m in b0], idx1) if b0 else []
        d_out = _elements_matrix(alg, [Element(alg, {m: Fraction(1)}).d() for m in b1], idx2) if b2 else []
        r_in = la.rank(d_in) if d_in and b0 else 0
        r_out = la.rank(d_out) if d_out and b1 else 0
        h = len(b1) - r_out - r_in
        if h:
            ok, wit = False, (deg, h)
            break
    checks.append(Verdict("acyclic in positive degrees", ok, wit))

    horizontal, basic, inv = {}, {}, {}
    if structure is not None or dim:
        iotas = [K.iota(a) for a in range(dim)]
        ok, wit = True, None
        for a in range(dim):
            for i in range(dim):
                v = iotas[a](K.l(i))
                if v != alg.const(int(a == i)):
                    ok, wit = False, ("ι λ", a, i)
                v = iotas[a](K.omega(i))
                if not v.is_zero():
                    ok, wit = False, ("ι Ω", a, i, str(v))
        checks.append(Verdict("ι_ξ λ = ⟨ξ,λ⟩ and ι_ξ Ω_λ = 0", ok, wit))
        for deg in range(0, max_degree + 1):
            horizontal[deg] = _joint_kernel_dim(alg, K.basis(deg), iotas)
        if structure is not None:
            lies = [K.lie_derivative(a) for a in range(dim)]
            for deg in range(0, max_degree + 1):
                basic[deg] = _joint_kernel_dim(alg, K.basis(deg), iotas + lies)
                inv[deg] = invariant_polynomial_dim(K.structure, deg // 2) if deg % 2 == 0 else 0
            checks.append(Verdict("basic subalgebra ≅ Sym(g*)^g", basic == inv, (basic, inv)))
    return KoszulReport(dim, structure is not None, checks, horizontal, basic, inv)


# ------------------------------------------------------------------- ℝP³


@dataclass
class RP3Report:
    cs_raw: Element  # CS_{P₁}(A) raw form; value = raw · scale
    scale: FormalScalar
    coefficient: FormalScalar  # (1/2) CS_{P₁} = coefficient · vol
    volume: FormalScalar
    phi: Fraction

    def __str__(self):
        return f"Phi(RP3) = {self.phi}"


def rp3_phi(volume: FormalScalar | None = None, frame_sign: int = 1) -> RP3Report:
    """Φ = ∫ ½ CS_{P₁}(A) mod 1 for the Levi-Civita connection on ℝP³ ≅ SO(3)."""
    vol_total = volume if volume is not None else FormalScalar(Fraction(1), 2)
    alg = so3_dga(frame_sign)
    A = so3_connection(alg)
    if frame_sign == -1:
        # the frame of −θ: connection and volume form are pulled along θ ↦ −θ
        A = A.scale(-1)
    zero = MatrixForm.zero(alg, 3)
    cs = cs_transgression(zero, A, pontryagin_polynomial(1))
    vol = alg.volume * (frame_sign ** 3)
    c = alg.integrate(cs.raw) / alg.integrate(vol)
    coeff = cs.scalar * (c / 2)
    total = coeff * vol_total
    if not total.is_rational:
        raise AssertionError(f"Φ did not come out rational: {total}")
    return RP3Report(cs.raw, cs.scalar, coeff, vol_total, total.rational() % 1)
