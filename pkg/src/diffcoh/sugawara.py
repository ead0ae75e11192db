"""Kac–Moody brackets, Fock and Verma truncations, Sugawara operators and Virasoro checks.

Everything is over the rationals.  Operators are sparse matrices on an energy
truncation; commutator identities are asserted only on the safe window, the
states whose images under both orderings stay inside the truncation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg as la


class LieError(ValueError):
    pass


class CriticalLevel(LieError):
    pass


class WindowError(LieError):
    pass


# ------------------------------------------------------------ finite algebras


@dataclass
class FiniteLieAlgebra:
    """Basis names, brackets [u_i, u_j] = Σ_k c[i][j][k] u_k and an invariant form B."""

    names: tuple
    c: list  # c[i][j] -> list of length d
    B: list
    tag: str = "simple"

    def __post_init__(self):
        d = len(self.names)
        self.c = [[[Fraction(x) for x in self.c[i][j]] for j in range(d)] for i in range(d)]
        self.B = [[Fraction(x) for x in row] for row in self.B]
        if self.tag not in ("simple", "abelian", "other"):
            raise LieError(f"unknown tag {self.tag!r}")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LieError(f"no basis element {name!r}") from None

    def bracket(self, x: Sequence, y: Sequence) -> list:
        d = self.dim
        out = [Fraction(0)] * d
        for i in range(d):
            if not x[i]:
                continue
            for j in range(d):
                if not y[j]:
                    continue
                s = x[i] * y[j]
                for k, v in enumerate(self.c[i][j]):
                    if v:
                        out[k] += s * v
        return out

    def form(self, x: Sequence, y: Sequence) -> Fraction:
        return sum((x[i] * self.B[i][j] * y[j] for i in range(self.dim) for j in range(self.dim)), Fraction(0))

    def unit(self, i: int) -> list:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def ad(self, i: int) -> list:
        """Matrix of ad(u_i), columns indexed by the input basis vector."""
        d = self.dim
        return [[self.c[i][j][k] for j in range(d)] for k in range(d)]

    def ad_vec(self, x: Sequence) -> list:
        d = self.dim
        m = la.zeros(d, d)
        for i in range(d):
            if x[i]:
                a = self.ad(i)
                for r in range(d):
                    for s in range(d):
                        m[r][s] += x[i] * a[r][s]
        return m

    def dual_basis(self) -> list:
        """Coordinates of u^j with B(u_i, u^j) = δ_ij."""
        if la.det(self.B) == 0:
            raise LieError("B is degenerate")
        inv = la.inverse(self.B)
        # u^j = Σ_k X[k][j] u_k with B X = I
        return [[inv[k][j] for k in range(self.dim)] for j in range(self.dim)]

    def check(self) -> list:
        """Names of failed axioms; empty when the data is a Lie algebra with invariant nondegenerate B."""
        d, bad = self.dim, []
        e = [self.unit(i) for i in range(d)]
        if any(self.c[i][j][k] != -self.c[j][i][k] for i in range(d) for j in range(d) for k in range(d)):
            bad.append("antisymmetry")
        for i, j, k in product(range(d), repeat=3):
            t = [a + b + c for a, b, c in zip(
                self.bracket(e[i], self.bracket(e[j], e[k])),
                self.bracket(e[j], self.bracket(e[k], e[i])),
                self.bracket(e[k], self.bracket(e[i], e[j])))]
            if any(t):
                bad.append("jacobi")
                break
        if any(self.B[i][j] != self.B[j][i] for i in range(d) for j in range(d)):
            bad.append("symmetry of B")
        for i, j, k in product(range(d), repeat=3):
            if self.form(self.bracket(e[i], e[j]), e[k]) != self.form(e[i], self.bracket(e[j], e[k])):
                bad.append("invariance of B")
                break
        if la.det(self.B) == 0:
            bad.append("nondegeneracy of B")
        return bad

    def scaled(self, s) -> "FiniteLieAlgebra":
        s = Fraction(s)
        return FiniteLieAlgebra(self.names, self.c, [[s * x for x in row] for row in self.B], self.tag)

    def change_basis(self, P: Sequence[Sequence]) -> "FiniteLieAlgebra":
        """New basis v_a = Σ_i P[a][i] u_i."""
        d = self.dim
        P = [[Fraction(x) for x in row] for row in P]
        Pinv = la.inverse(P)  # u_i = Σ_a Pinv[i][a] v_a
        v = [P[a] for a in range(d)]
        c = [[None] * d for _ in range(d)]
        for a in range(d):
            for b in range(d):
                w = self.bracket(v[a], v[b])
                c[a][b] = [sum((w[i] * Pinv[i][k] for i in range(d)), Fraction(0)) for k in range(d)]
        B = [[self.form(v[a], v[b]) for b in range(d)] for a in range(d)]
        names = tuple(f"v{a + 1}" for a in range(d))
        return FiniteLieAlgebra(names, c, B, self.tag)


def _structure(names, table: Mapping[tuple, Mapping[str, object]]):
    d = len(names)
    c = [[[0] * d for _ in range(d)] for _ in range(d)]
    for (x, y), out in table.items():
        i, j = names.index(x), names.index(y)
        for z, v in out.items():
            k = names.index(z)
            c[i][j][k] = Fraction(v)
            c[j][i][k] = -Fraction(v)
    return c


def heisenberg_algebra(scale=1) -> FiniteLieAlgebra:
    return FiniteLieAlgebra(("u",), [[[0]]], [[scale]], "abelian")


def sl2(scale=1) -> FiniteLieAlgebra:
    """Basis e, h, f with [h,e] = 2e, [h,f] = −2f, [e,f] = h; B(e,f) = 1, B(h,h) = 2."""
    names = ("e", "h", "f")
    c = _structure(names, {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}})
    s = Fraction(scale)
    B = [[0, 0, s], [0, 2 * s, 0], [s, 0, 0]]
    return FiniteLieAlgebra(names, c, B, "simple")


def so3(scale=1) -> FiniteLieAlgebra:
    """[x_i, x_j] = ε_ijk x_k with B = −½·Killing, i.e. B(x_i, x_j) = δ_ij."""
    names = ("x1", "x2", "x3")
    c = _structure(names, {("x1", "x2"): {"x3": 1}, ("x2", "x3"): {"x1": 1}, ("x3", "x1"): {"x2": 1}})
    s = Fraction(scale)
    return FiniteLieAlgebra(names, c, [[s if i == j else 0 for j in range(3)] for i in range(3)], "simple")


def builtin_algebra(name: str) -> FiniteLieAlgebra:
    table = {"heisenberg": heisenberg_algebra, "sl2": sl2, "so3": so3}
    if name not in table:
        raise LieError(f"unknown algebra {name!r}")
    return table[name]()


def random_invertible(d: int, rng: random.Random, lo: int = -3, hi: int = 3) -> list:
    while True:
        P = [[Fraction(rng.randint(lo, hi)) for _ in range(d)] for _ in range(d)]
        if la.det(P) != 0:
            return P


# ------------------------------------------------------------ Kac–Moody


@dataclass(frozen=True)
class LoopGenerator:
    i: int
    m: int


@dataclass
class KMElement:
    """Σ coeff·u_i⟨m⟩ + central·c."""

    terms: dict = field(default_factory=dict)
    central: Fraction = Fraction(0)

    def __add__(self, o: "KMElement") -> "KMElement":
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
            if not t[k]:
                del t[k]
        return KMElement(t, self.central + o.central)

    def scale(self, s) -> "KMElement":
        return KMElement({k: s * v for k, v in self.terms.items() if s * v}, s * self.central)

    def is_zero(self) -> bool:
        return not self.terms and not self.central


def km_bracket(x: LoopGenerator, y: LoopGenerator, alg: FiniteLieAlgebra) -> KMElement:
    """[X⟨m⟩, Y⟨n⟩] = [X,Y]⟨m+n⟩ + δ_{m,−n} m B(X,Y) c."""
    terms = {LoopGenerator(k, x.m + y.m): v for k, v in enumerate(alg.c[x.i][y.i]) if v}
    central = Fraction(x.m) * alg.B[x.i][y.i] if x.m + y.m == 0 else Fraction(0)
    return KMElement(terms, central)


def km_bracket_elements(a: KMElement, b: KMElement, alg: FiniteLieAlgebra) -> KMElement:
    out = KMElement()
    for g, u in a.terms.items():
        for h, v in b.terms.items():
            out = out + km_bracket(g, h, alg).scale(u * v)
    return out


def km_jacobi_check(alg: FiniteLieAlgebra, trials: int = 50, seed: int = 0, max_mode: int = 4) -> bool:
    rng = random.Random(seed)
    for _ in range(trials):
        g = [KMElement({LoopGenerator(rng.randrange(alg.dim), rng.randint(-max_mode, max_mode)): Fraction(1)})
             for _ in range(3)]
        t = KMElement()
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            t = t + km_bracket_elements(g[a], km_bracket_elements(g[b], g[c], alg), alg)
        if not t.is_zero():
            return False
    return True


# ------------------------------------------------------------ Casimir


def casimir(alg: FiniteLieAlgebra) -> dict:
    """Cas = Σ_i u_i u^i as {(i, j): coeff} on ordered words u_i u_j."""
    dual = alg.dual_basis()
    out: dict = {}
    for i in range(alg.dim):
        for j, v in enumerate(dual[i]):
            if v:
                out[(i, j)] = out.get((i, j), 0) + v
    return {k: v for k, v in out.items() if v}


def format_casimir(alg: FiniteLieAlgebra, cas: Mapping | None = None) -> str:
    cas = casimir(alg) if cas is None else cas
    parts = []
    for (i, j), v in sorted(cas.items()):
        w = f"{alg.names[i]}²" if i == j else f"{alg.names[i]}{alg.names[j]}"
        parts.append(w if v == 1 else f"{v}·{w}")
    return " + ".join(parts) or "0"


def casimir_commutator(alg: FiniteLieAlgebra, cas: Mapping, x: int) -> dict:
    """[Cas, u_x] as a degree-2 tensor: Σ c_ij ([u_i,u_x] u_j + u_i [u_j,u_x])."""
    out: dict = {}
    for (i, j), v in cas.items():
        for k, w in enumerate(alg.c[i][x]):
            if w:
                out[(k, j)] = out.get((k, j), 0) + v * w
        for k, w in enumerate(alg.c[j][x]):
            if w:
                out[(i, k)] = out.get((i, k), 0) + v * w
    return {k: v for k, v in out.items() if v}


def casimir_is_central(alg: FiniteLieAlgebra) -> bool:
    cas = casimir(alg)
    return all(not casimir_commutator(alg, cas, x) for x in range(alg.dim))


def casimir_in_basis(alg: FiniteLieAlgebra, P) -> dict:
    """Cas computed in the basis v_a = Σ P[a][i] u_i, re-expressed in u-words."""
    new = alg.change_basis(P)
    P = [[Fraction(x) for x in row] for row in P]
    out: dict = {}
    for (a, b), v in casimir(new).items():
        for i in range(alg.dim):
            for j in range(alg.dim):
                w = v * P[a][i] * P[b][j]
                if w:
                    out[(i, j)] = out.get((i, j), 0) + w
    return {k: v for k, v in out.items() if v}


def ad_casimir(alg: FiniteLieAlgebra) -> list:
    d = alg.dim
    dual = alg.dual_basis()
    m = la.zeros(d, d)
    for i in range(d):
        prod_ = la.matmul(alg.ad(i), alg.ad_vec(dual[i]))
        for r in range(d):
            for s in range(d):
                m[r][s] += prod_[r][s]
    return m


def lambda_B(alg: FiniteLieAlgebra) -> Fraction:
    """Half the scalar by which ad(Cas_B) acts."""
    m = ad_casimir(alg)
    d = alg.dim
    s = m[0][0]
    if any(m[r][c] != (s if r == c else 0) for r in range(d) for c in range(d)):
        raise LieError("ad(Cas) is not scalar: the algebra is neither abelian nor simple for this form")
    return s / 2


# ------------------------------------------------------------ sparse operators


Vec = dict  # basis key -> Fraction


def _vadd(acc: dict, v: Mapping, s=1):
    for k, x in v.items():
        y = acc.get(k, 0) + s * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


@dataclass
class GradedOperator:
    """Sparse matrix on a truncation; ``shift`` is the change of energy."""

    basis: list
    energy: Callable
    shift: int
    cols: dict  # column key -> {row key: coeff}, rows restricted to the truncation
    N: int

    def apply(self, v: Mapping) -> dict:
        out: dict = {}
        for k, x in v.items():
            _vadd(out, self.cols.get(k, {}), x)
        return out

    def __matmul__(self, o: "GradedOperator") -> "GradedOperator":
        cols = {k: self.apply(o.cols.get(k, {})) for k in o.basis}
        return GradedOperator(self.basis, self.energy, self.shift + o.shift, cols, self.N)

    def __sub__(self, o: "GradedOperator") -> "GradedOperator":
        cols = {k: _vadd(dict(self.cols.get(k, {})), o.cols.get(k, {}), -1) for k in self.basis}
        return GradedOperator(self.basis, self.energy, self.shift, cols, self.N)

    def scale(self, s) -> "GradedOperator":
        return GradedOperator(self.basis, self.energy, self.shift,
                              {k: {r: s * x for r, x in c.items()} for k, c in self.cols.items()} if s else {},
                              self.N)

    def to_matrix(self) -> list:
        idx = {k: n for n, k in enumerate(self.basis)}
        m = la.zeros(len(self.basis), len(self.basis))
        for k, col in self.cols.items():
            for r, x in col.items():
                m[idx[r]][idx[k]] = x
        return m

    def respects_grading(self) -> bool:
        return all(self.energy(r) == self.energy(k) + self.shift for k, c in self.cols.items() for r in c)

    def restricted(self, window: int) -> dict:
        return {k: c for k, c in self.cols.items() if self.energy(k) <= window and c}


def safe_window(N: int, m: int, n: int) -> int:
    """Largest e such that energy-e states stay inside the truncation through L_m L_n and L_n L_m."""
    return N - max(0, -m, -n, -m - n)


def _require_window(N, m, n):
    w = safe_window(N, m, n)
    if w < 0:
        raise WindowError(f"safe window empty for (m, n) = ({m}, {n}) at N = {N}")
    return w


@dataclass
class Verdict:
    name: str
    passed: bool
    window: int = 0
    states: int = 0
    witness: object = None

    def __bool__(self):
        return self.passed

    def __str__(self):
        s = f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({self.states} states, energy ≤ {self.window})"
        if not self.passed and self.witness is not None:
            s += f" witness {self.witness}"
        return s


# ------------------------------------------------------------ Fock space


def partitions(n: int, max_part: int | None = None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def _mono(exps: Iterable[int]) -> tuple:
    t = list(exps)
    while t and t[-1] == 0:
        t.pop()
    return tuple(t)


def mono_energy(m: tuple) -> int:
    return sum((i + 1) * e for i, e in enumerate(m))


def fock_basis(N: int) -> list:
    out = []
    for e in range(N + 1):
        for part in partitions(e):
            exps = [0] * (max(part) if part else 0)
            for k in part:
                exps[k - 1] += 1
            out.append(_mono(exps))
    return out


@dataclass
class FockState:
    coeffs: dict  # monomial exponent tuple -> Fraction
    mu: Fraction = Fraction(0)
    hbar: Fraction = Fraction(1)

    def energy_support(self) -> set:
        return {mono_energy(m) for m in self.coeffs}


def fock_mode(n: int, v: Mapping, mu=0, hbar=1) -> dict:
    """u⟨n⟩ on a polynomial: ∂/∂x_n (n > 0), |n|ħ x_{|n|} (n < 0), μ (n = 0).

    The creation operator carries |n|ħ so that [u⟨n⟩, u⟨−n⟩] = nħ.
    """
    mu, hbar = Fraction(mu), Fraction(hbar)
    out: dict = {}
    if n == 0:
        return {k: mu * x for k, x in v.items() if mu * x}
    if n > 0:
        for m, x in v.items():
            if len(m) >= n and m[n - 1]:
                e = list(m)
                c = e[n - 1]
                e[n - 1] -= 1
                _vadd(out, {_mono(e): x * c})
        return out
    k = -n
    for m, x in v.items():
        e = list(m) + [0] * max(0, k - len(m))
        e[k - 1] += 1
        _vadd(out, {_mono(e): k * hbar * x})
    return out


def fock_action(g: LoopGenerator, v: FockState) -> FockState:
    if g.i != 0:
        raise LieError("the Fock module is for the one-dimensional algebra")
    return FockState(fock_mode(g.m, v.coeffs, v.mu, v.hbar), v.mu, v.hbar)


def fock_central(v: FockState) -> FockState:
    return FockState({k: v.hbar * x for k, x in v.coeffs.items()}, v.mu, v.hbar)


def _normal_pair(a: int, b: int) -> tuple:
    """Annihilator rightmost."""
    return (a, b) if a <= b else (b, a)


def _heis_L_vec(m: int, v: Mapping, mu, hbar) -> dict:
    out: dict = {}
    e = max((mono_energy(k) for k in v), default=0)
    for j in range(-e - abs(m) - 1, e + abs(m) + 2):
        left, right = _normal_pair(-j, j + m)
        if right > e:
            continue
        w = fock_mode(right, v, mu, hbar)
        if w:
            _vadd(out, fock_mode(left, w, mu, hbar))
    if not hbar:
        raise LieError("ħ = 0: the Sugawara operators need ħ ≠ 0")
    s = 1 / (2 * Fraction(hbar))
    return {k: s * x for k, x in out.items()}


def sugawara_heisenberg(m: int, N: int, mu=0, hbar=1) -> GradedOperator:
    """L_m = (1/2ħ) Σ_j :u⟨−j⟩u⟨j+m⟩: on Fock(μ, ħ) truncated at energy N."""
    if N < 0:
        raise LieError("N must be non-negative")
    basis = fock_basis(N)
    cols = {}
    for k in basis:
        col = _heis_L_vec(m, {k: Fraction(1)}, Fraction(mu), Fraction(hbar))
        cols[k] = {r: x for r, x in col.items() if mono_energy(r) <= N}
    return GradedOperator(basis, mono_energy, -m, cols, N)


def _commutator_identity(Lm, Ln, Lmn, coeff, central, window) -> tuple[bool, object]:
    lhs = (Lm @ Ln) - (Ln @ Lm)
    for k, col in lhs.cols.items():
        if Lm.energy(k) > window:
            continue
        want = {r: coeff * x for r, x in Lmn.cols.get(k, {}).items() if coeff * x} if Lmn is not None else {}
        if central:
            _vadd(want, {k: central})
        diff = _vadd(dict(col), want, -1)
        if diff:
            return False, (k, diff)
    return True, None


def virasoro_check(m: int, n: int, N: int, mu=0, hbar=1, ops: dict | None = None) -> Verdict:
    """[L_m, L_n] = (m−n)L_{m+n} + δ_{m,−n}(m³−m)/12 on the safe window of Fock(μ, ħ)."""
    w = _require_window(N, m, n)
    cache = {} if ops is None else ops

    def L(k):
        if k not in cache:
            cache[k] = sugawara_heisenberg(k, N, mu, hbar)
        return cache[k]

    central = Fraction(m ** 3 - m, 12) if m + n == 0 else Fraction(0)
    ok, wit = _commutator_identity(L(m), L(n), L(m + n), m - n, central, w)
    states = sum(1 for k in L(m).basis if mono_energy(k) <= w)
    return Verdict(f"[L{m},L{n}]", ok, w, states, wit)


def virasoro_sweep(N: int, bound: int = 3, mu=0, hbar=1) -> list:
    ops: dict = {}
    return [virasoro_check(m, n, N, mu, hbar, ops)
            for m in range(-bound, bound + 1) for n in range(-bound, bound + 1)]


def central_value(Lp: GradedOperator, Lm: GradedOperator, L0: GradedOperator, m: int, window: int) -> Fraction | None:
    """Scalar s with [L_m, L_{−m}] − 2m L_0 = s·id on the window, or None if not scalar."""
    lhs = (Lp @ Lm) - (Lm @ Lp) - L0.scale(2 * m)
    s = None
    for k in Lp.basis:
        if Lp.energy(k) > window:
            continue
        col = lhs.cols.get(k, {})
        if set(col) - {k}:
            return None
        v = col.get(k, Fraction(0))
        if s is None:
            s = v
        elif s != v:
            return None
    return s


def central_charge_from(s: Fraction, m: int) -> Fraction:
    return s * 12 / (m ** 3 - m)


def l0_spectrum_check(N: int, mu, hbar) -> bool:
    """L₀ is diagonal with eigenvalue μ²/(2ħ) + energy."""
    L0 = sugawara_heisenberg(0, N, mu, hbar)
    base = Fraction(mu) ** 2 / (2 * Fraction(hbar))
    return all(L0.cols[k] == ({k: base + mono_energy(k)} if base + mono_energy(k) else {}) for k in L0.basis)


# ------------------------------------------------------------ Verma / Weyl modules


def sl2_irrep(alg: FiniteLieAlgebra, weight: int) -> list:
    """Matrices of e, h, f on the irreducible module of highest weight ``weight`` (basis f^k v/k!)."""
    if alg.names != ("e", "h", "f"):
        raise LieError("sl2_irrep needs the standard e, h, f basis")
    if weight < 0:
        raise LieError("highest weight must be a non-negative integer")
    n = weight + 1
    e, h, f = la.zeros(n, n), la.zeros(n, n), la.zeros(n, n)
    for k in range(n):
        h[k][k] = Fraction(weight - 2 * k)
        if k + 1 < n:
            f[k + 1][k] = Fraction(k + 1)
            e[k][k + 1] = Fraction(weight - k)
    return [e, h, f]


def trivial_rep(alg: FiniteLieAlgebra) -> list:
    return [[[Fraction(0)]] for _ in range(alg.dim)]


def scalar_rep(alg: FiniteLieAlgebra, weights: Sequence) -> list:
    """One-dimensional module; only sensible when the weights vanish on [𝔤, 𝔤]."""
    return [[[Fraction(w)]] for w in weights]


def check_rep(alg: FiniteLieAlgebra, rho: Sequence) -> bool:
    d = alg.dim
    for i in range(d):
        for j in range(d):
            lhs = la.matmul(rho[i], rho[j])
            rhs = la.matmul(rho[j], rho[i])
            want = la.zeros(len(lhs), len(lhs))
            for k, v in enumerate(alg.c[i][j]):
                if v:
                    for r in range(len(lhs)):
                        for s in range(len(lhs)):
                            want[r][s] += v * rho[k][r][s]
            if any(lhs[r][s] - rhs[r][s] != want[r][s] for r in range(len(lhs)) for s in range(len(lhs))):
                return False
    return True


def _gen_key(g: tuple) -> tuple:
    """Straightening order: modes descending, then basis index ascending."""
    i, m = g
    return (-m, i)


class VermaTruncation:
    """Module induced from a finite 𝔤-module V₀ (c ↦ ℓ, positive modes kill V₀), truncated at energy N.

    Basis: words u_{i₁}⟨−n₁⟩⋯u_{i_k}⟨−n_k⟩ ⊗ v_s with nondecreasing generator key.
    """

    def __init__(self, alg: FiniteLieAlgebra, level, rho: Sequence | None = None, N: int = 0):
        if N < 0:
            raise LieError("N must be non-negative")
        self.alg = alg
        self.level = Fraction(level)
        self.rho = [[[Fraction(x) for x in row] for row in m] for m in (rho or trivial_rep(alg))]
        if not check_rep(alg, self.rho):
            raise LieError("V₀ matrices do not form a representation")
        self.dim0 = len(self.rho[0])
        self.N = N
        self._memo: dict = {}
        self.basis = self._enumerate()

    @staticmethod
    def energy(key) -> int:
        word, _ = key
        return -sum(m for _, m in word)

    def _enumerate(self) -> list:
        gens = sorted(((i, -n) for n in range(1, self.N + 1) for i in range(self.alg.dim)), key=_gen_key)
        words = []

        def rec(start, word, e):
            words.append(tuple(word))
            for t in range(start, len(gens)):
                g = gens[t]
                if e - g[1] <= self.N:
                    word.append(g)
                    rec(t, word, e - g[1])
                    word.pop()

        rec(0, [], 0)
        words.sort(key=lambda w: (-sum(m for _, m in w), len(w), [_gen_key(g) for g in w]))
        return [(w, s) for w in words for s in range(self.dim0)]

    def graded_dims(self) -> list:
        dims = [0] * (self.N + 1)
        for k in self.basis:
            dims[self.energy(k)] += 1
        return dims

    def act(self, g: tuple, key: tuple) -> dict:
        """u_i⟨m⟩ applied to a basis word; terms above energy N are dropped."""
        i, m = g
        word, s = key
        if self.energy(key) - m > self.N:
            return {}
        memo_key = (g, key)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        out: dict = {}
        if not word:
            if m == 0:
                for t in range(self.dim0):
                    v = self.rho[i][t][s]
                    if v:
                        out[((), t)] = v
            elif m < 0:
                out[((g,), s)] = Fraction(1)
        elif m < 0 and _gen_key(g) <= _gen_key(word[0]):
            out[((g,) + word, s)] = Fraction(1)
        else:
            y, rest = word[0], (word[1:], s)
            # g·y·rest = y·(g·rest) + [g, y]·rest
            for k2, v in self.act(g, rest).items():
                _vadd(out, self.act(y, k2), v)
            br = km_bracket(LoopGenerator(i, m), LoopGenerator(*y), self.alg)
            for h, v in br.terms.items():
                _vadd(out, self.act((h.i, h.m), rest), v)
            if br.central:
                _vadd(out, {rest: br.central * self.level})
        self._memo[memo_key] = out
        return out

    def act_vec(self, g: tuple, v: Mapping) -> dict:
        out: dict = {}
        for k, x in v.items():
            _vadd(out, self.act(g, k), x)
        return out

    def act_element(self, x: Sequence, m: int, v: Mapping) -> dict:
        """(Σ x_i u_i)⟨m⟩ on a vector."""
        out: dict = {}
        for i, c in enumerate(x):
            if c:
                _vadd(out, self.act_vec((i, m), v), c)
        return out

    def operator(self, i: int, m: int) -> GradedOperator:
        return GradedOperator(self.basis, self.energy, -m,
                              {k: self.act((i, m), k) for k in self.basis}, self.N)

    def central_is_scalar(self, trials: int = 20, seed: int = 0) -> bool:
        """[u_i⟨m⟩, u_j⟨−m⟩] − [u_i,u_j]⟨0⟩ acts as m B(u_i,u_j) ℓ on the window."""
        rng = random.Random(seed)
        for _ in range(trials):
            i, j = rng.randrange(self.alg.dim), rng.randrange(self.alg.dim)
            m = rng.randint(1, max(1, self.N))
            for key in self.basis:
                if self.energy(key) + m > self.N:
                    continue
                v = {key: Fraction(1)}
                a = self.act_vec((i, m), self.act_vec((j, -m), v))
                _vadd(a, self.act_vec((j, -m), self.act_vec((i, m), v)), -1)
                _vadd(a, self.act_element(self.alg.c[i][j], 0, v), -1)
                want = m * self.alg.B[i][j] * self.level
                if a != ({key: want} if want else {}):
                    return False
        return True


def graded_dims_oracle(dim: int, dim0: int, N: int) -> list:
    """Coefficients of dim0 · Π_{n≥1} (1 − qⁿ)^{−dim}, by power-series multiplication."""
    series = [0] * (N + 1)
    series[0] = dim0
    for n in range(1, N + 1):
        for _ in range(dim):
            for e in range(n, N + 1):
                series[e] += series[e - n]
    return series


def verma_truncation(alg: FiniteLieAlgebra, level, weight=None, N: int = 0) -> VermaTruncation:
    """``weight``: None (trivial V₀), an integer (sl₂ irreducible), or explicit matrices."""
    if weight is None:
        rho = None
    elif isinstance(weight, int):
        rho = sl2_irrep(alg, weight)
    else:
        rho = weight
    return VermaTruncation(alg, level, rho, N)


def _T_cols(V: VermaTruncation, m: int, dual: list) -> dict:
    alg = V.alg
    cols = {}
    for key in V.basis:
        e = V.energy(key)
        out: dict = {}
        v = {key: Fraction(1)}
        for j in range(-e - abs(m) - 1, e + abs(m) + 2):
            a, b = -j, j + m
            for i in range(alg.dim):
                if a <= b:
                    if b > e:
                        continue
                    w = V.act_element(dual[i], b, v)
                    if w:
                        _vadd(out, V.act_vec((i, a), w))
                else:
                    if a > e:
                        continue
                    w = V.act_vec((i, a), v)
                    if w:
                        _vadd(out, V.act_element(dual[i], b, w))
        cols[key] = {r: x / 2 for r, x in out.items()}
    return cols


def t_operator(V: VermaTruncation, m: int, basis_change=None) -> GradedOperator:
    """T_m = ½ Σ_i Σ_j :u_i⟨−j⟩ u^i⟨j+m⟩:, optionally summed over a second dual pair."""
    alg = V.alg
    if basis_change is None:
        dual = alg.dual_basis()
        cols = _T_cols(V, m, dual)
    else:
        # pairs (v_a, v^a) expressed in the u basis
        P = [[Fraction(x) for x in row] for row in basis_change]
        new = alg.change_basis(P)
        ndual = new.dual_basis()
        cols: dict = {k: {} for k in V.basis}
        for a in range(alg.dim):
            va = P[a]
            vdual = [sum((ndual[a][b] * P[b][i] for b in range(alg.dim)), Fraction(0)) for i in range(alg.dim)]
            for key in V.basis:
                _vadd(cols[key], _pair_term(V, va, vdual, m, key))
        cols = {k: {r: x / 2 for r, x in c.items()} for k, c in cols.items()}
    return GradedOperator(V.basis, V.energy, -m, cols, V.N)


def _pair_term(V: VermaTruncation, x: Sequence, y: Sequence, m: int, key) -> dict:
    e = V.energy(key)
    out: dict = {}
    v = {key: Fraction(1)}
    for j in range(-e - abs(m) - 1, e + abs(m) + 2):
        a, b = -j, j + m
        if a <= b:
            if b > e:
                continue
            w = V.act_element(y, b, v)
            if w:
                _vadd(out, V.act_element(x, a, w))
        else:
            if a > e:
                continue
            w = V.act_element(x, a, v)
            if w:
                _vadd(out, V.act_element(y, b, w))
    return out


def sugawara_general(V: VermaTruncation, m: int, basis_change=None) -> GradedOperator:
    """L_m = T_m / (ℓ + λ_B)."""
    lam = lambda_B(V.alg)
    if V.level + lam == 0:
        raise CriticalLevel(f"critical level ℓ = {V.level} = −λ_B")
    return t_operator(V, m, basis_change).scale(1 / (V.level + lam))


def central_charge_formula(alg: FiniteLieAlgebra, level) -> Fraction:
    level = Fraction(level)
    lam = lambda_B(alg)
    if level + lam == 0:
        raise CriticalLevel(f"critical level ℓ = {level} = −λ_B")
    return level * alg.dim / (level + lam)


def t_commutator_check(V: VermaTruncation, m: int, n: int, ops: dict | None = None) -> Verdict:
    """[T_m, T_n] = (ℓ+λ_B)(m−n)T_{m+n} + δ_{m,−n} dim(𝔤)((m³−m)/12) ℓ(ℓ+λ_B) on the safe window."""
    w = _require_window(V.N, m, n)
    cache = {} if ops is None else ops

    def T(k):
        if k not in cache:
            cache[k] = t_operator(V, k)
        return cache[k]

    lam = lambda_B(V.alg)
    ell = V.level
    central = (Fraction(V.alg.dim * (m ** 3 - m), 12) * ell * (ell + lam)) if m + n == 0 else Fraction(0)
    ok, wit = _commutator_identity(T(m), T(n), T(m + n), (ell + lam) * (m - n), central, w)
    states = sum(1 for k in V.basis if V.energy(k) <= w)
    return Verdict(f"[T{m},T{n}]", ok, w, states, wit)


def sugawara_virasoro_check(V: VermaTruncation, m: int, n: int, ops: dict | None = None) -> Verdict:
    w = _require_window(V.N, m, n)
    cache = {} if ops is None else ops

    def L(k):
        if k not in cache:
            cache[k] = sugawara_general(V, k)
        return cache[k]

    c = central_charge_formula(V.alg, V.level)
    central = c * Fraction(m ** 3 - m, 12) if m + n == 0 else Fraction(0)
    ok, wit = _commutator_identity(L(m), L(n), L(m + n), m - n, central, w)
    states = sum(1 for k in V.basis if V.energy(k) <= w)
    return Verdict(f"[L{m},L{n}]", ok, w, states, wit)


def extract_central_charge(V: VermaTruncation, m: int = 2) -> Fraction | None:
    """c from [L_m, L_{−m}] − 2m L₀ = c(m³−m)/12 on the safe window."""
    w = _require_window(V.N, m, -m)
    Lp, Lm, L0 = sugawara_general(V, m), sugawara_general(V, -m), sugawara_general(V, 0)
    s = central_value(Lp, Lm, L0, m, w)
    return None if s is None else central_charge_from(s, m)


def heisenberg_word_weight(key) -> int:
    """u⟨−n⟩ ↦ n x_n at ħ = 1, so a word corresponds to Π n_i times its monomial."""
    word, _ = key
    w = 1
    for _, m in word:
        w *= -m
    return w


def word_to_monomial(key) -> tuple:
    word, _ = key
    exps: list = []
    for _, m in word:
        n = -m
        if len(exps) < n:
            exps += [0] * (n - len(exps))
        exps[n - 1] += 1
    return _mono(exps)


def heisenberg_reduction_check(N: int, mu=0) -> bool:
    """Abelian dim-1 at level 1 with u⟨0⟩ = μ agrees with the Fock Sugawara operators."""
    alg = heisenberg_algebra()
    V = VermaTruncation(alg, 1, scalar_rep(alg, [mu]), N)
    for m in range(-N, N + 1):
        Lv = sugawara_general(V, m)
        Lf = sugawara_heisenberg(m, N, mu, 1)
        for key in V.basis:
            want = {}
            for r, x in Lv.cols[key].items():
                want[word_to_monomial(r)] = x * Fraction(heisenberg_word_weight(r), heisenberg_word_weight(key))
            if want != Lf.cols[word_to_monomial(key)]:
                return False
    return True


def virasoro_jacobi_check(ops: Callable[[int], GradedOperator], a: int, b: int, c: int, N: int) -> bool:
    """[[L_a,L_b],L_c] + cyclic = 0 on states whose every intermediate energy stays ≤ N."""
    shifts = [0]
    for seq in ((a, b, c), (b, a, c), (c, a, b), (c, b, a), (a, c, b), (b, c, a)):
        t = 0
        for s in reversed(seq):
            t -= s
            shifts.append(t)
    window = N - max(0, max(shifts))
    if window < 0:
        raise WindowError("safe window empty")

    def br(x, y):
        return (x @ y) - (y @ x)

    La, Lb, Lc = ops(a), ops(b), ops(c)
    total = br(br(La, Lb), Lc)
    for t in (br(br(Lb, Lc), La), br(br(Lc, La), Lb)):
        total = GradedOperator(total.basis, total.energy, total.shift,
                               {k: _vadd(dict(total.cols.get(k, {})), t.cols.get(k, {})) for k in total.basis},
                               total.N)
    return not total.restricted(window)
