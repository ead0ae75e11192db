"""Deligne cup product on Čech–Deligne cochains and on differential triples."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from . import linalg as la
from .abelian_core import MixedSolver, integer_inverse, integer_kernel, mixed_solve, smith_normal_form
from .cech_deligne import DeligneCochain, DeligneComplex, ModelError, faces, integral_closed_forms


# ------------------------------------------------------- sheaf-level rule


def _components(x: DeligneCochain):
    """Yield (čech degree i, sheaf degree a, cochain dict) of x."""
    if x.ints:
        yield x.degree, 0, x.ints
    for p, comp in x.forms.items():
        if comp:
            yield x.degree - p - 1, p + 1, comp


def _nonzero(v) -> bool:
    return bool(v) if isinstance(v, (int, Fraction)) else not v.is_zero()


def _local(u, a: int, v, b: int, l: int):
    """Four-case product of a sheaf-degree-a section of ℤ(k) and a degree-b one of ℤ(ℓ).

    Returns (sheaf degree, value) or None.  The integer-times-form case on
    the right only survives for ℓ = 0; for ℓ > 0 it is the zero map.
    """
    if a == 0:
        if b == 0:
            return 0, int(u) * int(v)
        return b, v * int(u)
    if b == 0 and l == 0:
        return a, u * int(v)
    if b == l and l > 0:
        return a + l, u * v.d()
    return None


def cup(cx: DeligneComplex, x: DeligneCochain, y: DeligneCochain) -> DeligneCochain:
    """x ⌣ y in ℤ(k+ℓ); ``cx`` only supplies the nerve and the restriction maps.

    On a simplex (α₀…α_{i+j}) the x-part is read on the front face (α₀…α_i)
    and the y-part on the back face (α_i…α_{i+j}), pulled back to α₀'s
    coordinates, with sign (−1)^{a·j} (a = sheaf degree of x, j = Čech degree of y).
    """
    k, l = x.k, y.k
    out = DeligneCochain(k + l, x.degree + y.degree)
    for i, a, cu in _components(x):
        for j, b, cv in _components(y):
            for J in cx.nerve.of_dim(i + j):
                front, back = J[: i + 1], J[i:]
                u, v = cu.get(front), cv.get(back)
                if u is None or v is None or not _nonzero(u) or not _nonzero(v):
                    continue
                if b > 0:
                    v = cx.restrict(v, back, J)
                r = _local(u, a, v, b, l)
                if r is None:
                    continue
                deg, val = r
                if (a * j) % 2:
                    val = -val
                if deg == 0:
                    out.ints[J] = out.ints.get(J, 0) + val
                else:
                    comp = out.forms.setdefault(deg - 1, {})
                    comp[J] = comp[J] + val if J in comp else val
    return out.clean()


# --------------------------------------------------------- Čech cochains


def cech_cup(a: Mapping, p: int, b: Mapping, q: int, nerve) -> dict:
    """Alexander–Whitney cup of constant-coefficient Čech cochains."""
    out = {}
    for J in nerve.of_dim(p + q):
        u = a.get(J[: p + 1], 0)
        v = b.get(J[p:], 0)
        if u and v:
            out[J] = u * v
    return out


def cech_delta(c: Mapping, p: int, nerve) -> dict:
    out = {}
    for J in nerve.of_dim(p + 1):
        v = sum((((-1) ** s) * c.get(F, 0) for s, F in faces(J)), 0)
        if v:
            out[J] = v
    return out


def _add(*cs, signs=None) -> dict:
    out: dict = {}
    signs = signs or [1] * len(cs)
    for s, c in zip(signs, cs):
        for J, v in c.items():
            out[J] = out.get(J, 0) + s * v
    return {J: v for J, v in out.items() if v}


# ----------------------------------------------------------- the homotopy B


def _wedge(f: Mapping, g: Mapping) -> dict:
    out = {}
    for V, e in f.items():
        if V in g:
            w = e * g[V]
            if not w.is_zero():
                out[V] = w
    return out


@dataclass
class WedgeCupHomotopy:
    """B on closed global forms: δB(ω, η) = Ψ(ω∧η) − Ψ(ω)⌣Ψ(η).

    Stored on pairs of basis forms and extended bilinearly.  For closed
    inputs the defining identity dB + B(dω,η) ± B(ω,dη) = ω∧η − ω⌣η
    reduces to the equation above.
    """

    cx: DeligneComplex
    basis: dict  # degree -> list of closed global forms
    values: dict = field(default_factory=dict)  # (p, i, q, j) -> Čech (p+q−1)-cochain

    def coords(self, form: Mapping, p: int) -> list[Fraction]:
        return self.cx.global_coords(form, p, self.basis[p]) if self.basis.get(p) else []

    def __call__(self, w1: Mapping, p: int, w2: Mapping, q: int) -> dict:
        if not w1 or not w2:
            return {}
        c1 = self.coords(w1, p)
        c2 = self.coords(w2, q)
        out: dict = {}
        for i, a in enumerate(c1):
            if not a:
                continue
            for j, b in enumerate(c2):
                if not b:
                    continue
                for J, v in self.values.get((p, i, q, j), {}).items():
                    out[J] = out.get(J, 0) + a * b * v
        return {J: v for J, v in out.items() if v}

    def residual(self, p: int, i: int, q: int, j: int) -> dict:
        """δB − (Ψ(ω∧η) − Ψ(ω)⌣Ψ(η)) on one basis pair; zero when B is valid."""
        cx = self.cx
        nerve = cx.nerve
        w1, w2 = self.basis[p][i], self.basis[q][j]
        target = _add(cx.psi(_wedge(w1, w2), p + q),
                      cech_cup(cx.psi(w1, p), p, cx.psi(w2, q), q, nerve), signs=[1, -1])
        return _add(cech_delta(self.values.get((p, i, q, j), {}), p + q - 1, nerve), target, signs=[1, -1])


def _closed_global(cx: DeligneComplex, p: int) -> list[dict]:
    forms = cx.global_forms(p)
    if not forms:
        return []
    out = []
    vecs = []
    b = cx.form_basis(p + 1)
    verts = cx.nerve.of_dim(0)
    for f in forms:
        df = cx.d_form(f)
        v = []
        for V in verts:
            e = df.get(V)
            v.extend(e.terms.get(m, Fraction(0)) if e is not None else Fraction(0) for m in b)
        vecs.append(v)
    ker = la.nullspace(la.transpose(vecs), len(forms)) if any(any(v) for v in vecs) else [
        [Fraction(int(i == j)) for i in range(len(forms))] for j in range(len(forms))
    ]
    for v in ker:
        f = {}
        for c, g in zip(v, forms):
            if c:
                for V, e in g.items():
                    f[V] = f[V] + e * c if V in f else e * c
        out.append({V: e for V, e in f.items() if not e.is_zero()})
    return out


def solve_homotopy_B(cx: DeligneComplex, max_degree: int | None = None) -> WedgeCupHomotopy:
    """Least-norm exact solve for B on every pair of closed global basis forms."""
    if not cx.model.good:
        raise ModelError(f"B needs a good cover; {cx.model.name!r} is not one")
    nerve = cx.nerve
    top = nerve.dimension if max_degree is None else max_degree
    basis = {p: _closed_global(cx, p) for p in range(0, top + 1)}
    B = WedgeCupHomotopy(cx, basis)
    unsolvable = []
    for p, bp in basis.items():
        for q, bq in basis.items():
            if p + q > top or p + q == 0:
                continue
            src = nerve.of_dim(p + q - 1)
            dmat = nerve.coboundary(p + q - 1)
            for i in range(len(bp)):
                for j in range(len(bq)):
                    target = _add(cx.psi(_wedge(bp[i], bq[j]), p + q),
                                  cech_cup(cx.psi(bp[i], p), p, cx.psi(bq[j], q), q, nerve), signs=[1, -1])
                    if not target:
                        continue
                    rhs = [target.get(J, 0) for J in nerve.of_dim(p + q)]
                    sol = la.least_norm_solve(dmat, rhs, len(src)) if dmat else None
                    if sol is None:
                        unsolvable.append((p, q))
                        continue
                    B.values[(p, i, q, j)] = {J: v for J, v in zip(src, sol) if v}
    if unsolvable:
        raise ModelError(f"no homotopy B in bidegrees {sorted(set(unsolvable))}")
    return B


# --------------------------------------------------------------- triples


@dataclass
class Triple:
    """(c, h, ω): c integer Čech n-cocycle, h rational Čech (n−1)-cochain, ω closed n-form."""

    n: int
    c: dict
    h: dict
    omega: dict


def triple_is_cocycle(cx: DeligneComplex, t: Triple) -> bool:
    nerve = cx.nerve
    if cech_delta(t.c, t.n, nerve):
        return False
    if any(not e.d().is_zero() for e in t.omega.values()):
        return False
    if cx.delta_forms(t.omega, 0):
        return False
    return not triple_defect(cx, t)


def triple_defect(cx: DeligneComplex, t: Triple) -> dict:
    """δh − (ω − c) with ω read through the de Rham map."""
    nerve = cx.nerve
    dh = cech_delta(t.h, t.n - 1, nerve) if t.n >= 1 else {}
    return _add(dh, cx.psi(t.omega, t.n), t.c, signs=[1, -1, 1])


def cup_triples(cx: DeligneComplex, t1: Triple, t2: Triple, B: WedgeCupHomotopy) -> Triple:
    """(c₁⌣c₂, (−1)^{|c₁|}c₁⌣h₂ + h₁⌣ω₂ + B(ω₁,ω₂), ω₁∧ω₂)."""
    for t in (t1, t2):
        if not triple_is_cocycle(cx, t):
            raise ModelError("triple product needs differential cocycles")
    nerve = cx.nerve
    n1, n2 = t1.n, t2.n
    c3 = cech_cup(t1.c, n1, t2.c, n2, nerve)
    s = -1 if n1 % 2 else 1
    parts = []
    if n2 >= 1:
        parts.append({J: s * v for J, v in cech_cup(t1.c, n1, t2.h, n2 - 1, nerve).items()})
    if n1 >= 1:
        parts.append(cech_cup(t1.h, n1 - 1, cx.psi(t2.omega, n2), n2, nerve))
    parts.append(B(t1.omega, n1, t2.omega, n2))
    h3 = _add(*parts)
    return Triple(n1 + n2, c3, h3, _wedge(t1.omega, t2.omega))


def random_triple(cx: DeligneComplex, n: int, rng: random.Random, basis: dict | None = None) -> Triple:
    """A random differential cocycle of degree n on the model."""
    nerve = cx.nerve
    simp = nerve.of_dim(n)
    zc = integer_kernel(nerve.coboundary(n), len(simp)) if nerve.of_dim(n + 1) else la.identity(len(simp))
    c = [0] * len(simp)
    for z in zc:
        a = rng.randint(-2, 2)
        c = [u + a * v for u, v in zip(c, z)]
    cdict = {J: v for J, v in zip(simp, c) if v}
    closed = (basis or {}).get(n)
    if closed is None:
        closed = _closed_global(cx, n)
    psis = [cx.psi(w, n) for w in closed]
    prev = nerve.of_dim(n - 1) if n >= 1 else []
    dmat = nerve.coboundary(n - 1) if n >= 1 else []
    # unknowns: coefficients on closed forms, then h
    cols = []
    for ps in psis:
        cols.append([ps.get(J, Fraction(0)) for J in simp])
    for jx in range(len(prev)):
        cols.append([Fraction(-dmat[r][jx]) for r in range(len(simp))])
    mat = la.transpose(cols) if cols else []
    sol = la.solve(mat, [Fraction(v) for v in c], len(cols)) if cols else None
    if sol is None:
        raise ModelError(f"integer class of degree {n} has no closed-form representative in the model")
    coeffs, h = sol[: len(closed)], sol[len(closed):]
    # move along the affine space of solutions
    null = la.nullspace(mat, len(cols)) if cols else []
    for v in null:
        a = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        coeffs = [x + a * y for x, y in zip(coeffs, v[: len(closed)])]
        h = [x + a * y for x, y in zip(h, v[len(closed):])]
    omega: dict = {}
    for a, w in zip(coeffs, closed):
        if a:
            for V, e in w.items():
                omega[V] = omega[V] + e * a if V in omega else e * a
    omega = {V: e for V, e in omega.items() if not e.is_zero()}
    t = Triple(n, cdict, {J: v for J, v in zip(prev, h) if v}, omega)
    if triple_defect(cx, t):
        raise AssertionError("random triple is not a cocycle")
    return t


def triple_to_deligne(cx: DeligneComplex, t: Triple) -> DeligneCochain:
    """Deligne cocycle ((−1)^n c, η + h) with η the zigzag primitives of ω."""
    n = t.n
    if n == 0:
        return DeligneCochain(0, 0, dict(t.c), {})
    _, etas = cx.psi_with_primitives(t.omega, n)
    x = DeligneCochain(n, n)
    sign = -1 if n % 2 else 1
    x.ints = {J: sign * v for J, v in t.c.items()}
    for i, eta in enumerate(etas):
        p = n - 1 - i
        if eta:
            x.forms.setdefault(p, {}).update(eta)
    if t.h:
        comp = x.forms.setdefault(0, {})
        for J, v in t.h.items():
            c = cx.alg.const(v)
            comp[J] = comp[J] + c if J in comp else c
    return x.clean()


# ---------------------------------------------------------- defects


@dataclass
class DefectReport:
    defect: DeligneCochain
    witness: DeligneCochain | None

    @property
    def is_coboundary(self) -> bool:
        return self.defect.is_zero() or self.witness is not None


def coboundary_witness(cx: DeligneComplex, z: DeligneCochain) -> DeligneCochain | None:
    """w with D w = z inside the finite model, or None."""
    if z.is_zero():
        return DeligneCochain(z.k, z.degree - 1)
    wt = max([cx.N] + [cx.alg.mono_weight(m) for c in z.forms.values() for e in c.values() for m in e.terms])
    n = z.degree
    cache = cx.__dict__.setdefault("_witness", {})
    key = (z.k, wt, n)
    if key not in cache:
        big = DeligneComplex(cx.model, z.k, wt)
        zz, zq, qq = big._blocks(n - 1)
        cache[key] = big, MixedSolver(zz, zq, qq, *big.dims(n - 1))
    big, solver = cache[key]
    sol = solver.solve(*big.vectorize(z))
    if sol is None:
        return None
    w = big.cochain(n - 1, *sol)
    if big.D(w) != z:
        raise AssertionError("coboundary witness failed to verify")
    return w


def commutativity_defect(cx: DeligneComplex, x: DeligneCochain, y: DeligneCochain) -> DefectReport:
    """x⌣y − (−1)^{|x||y|} y⌣x with a coboundary witness when one exists."""
    s = -1 if (x.degree * y.degree) % 2 else 1
    d = cup(cx, x, y) - cup(cx, y, x).scale(s)
    return DefectReport(d, coboundary_witness(cx, d) if not d.is_zero() else None)


def associativity_defect(cx: DeligneComplex, x, y, z) -> DefectReport:
    """(x⌣y)⌣z − x⌣(y⌣z) with a coboundary witness when nonzero."""
    d = cup(cx, cup(cx, x, y), z) - cup(cx, x, cup(cx, y, z))
    return DefectReport(d, coboundary_witness(cx, d) if not d.is_zero() else None)


@dataclass
class CompatibilityReport:
    """Triple product against the sheaf-level cup, compared in Ĥ."""

    from_triples: DeligneCochain
    from_cup: DeligneCochain
    witness: DeligneCochain | None

    @property
    def agree(self) -> bool:
        return (self.from_triples - self.from_cup).is_zero() or self.witness is not None


def compatibility_report(cx: DeligneComplex, t1: Triple, t2: Triple, B: WedgeCupHomotopy) -> CompatibilityReport:
    a = triple_to_deligne(cx, cup_triples(cx, t1, t2, B))
    b = cup(cx, triple_to_deligne(cx, t1), triple_to_deligne(cx, t2))
    d = a - b
    return CompatibilityReport(a, b, coboundary_witness(cx, d) if not d.is_zero() else None)


# ------------------------------------------------------ calibrating B


def triple_from_form(cx: DeligneComplex, omega: Mapping, n: int) -> Triple:
    """Some differential cocycle with curvature ω; needs integral periods."""
    nerve = cx.nerve
    simp = nerve.of_dim(n)
    prev = nerve.of_dim(n - 1) if n >= 1 else []
    zz = nerve.coboundary(n) if nerve.of_dim(n + 1) else []
    zq = la.identity(len(simp))
    qq = nerve.coboundary(n - 1) if prev else [[] for _ in simp]
    ps = cx.psi(omega, n)
    sol = mixed_solve(zz, zq, qq, len(simp), len(prev), [0] * len(zz), [ps.get(J, 0) for J in simp])
    if sol is None:
        raise ModelError("form does not have integral periods")
    c, h = sol
    t = Triple(n, {J: v for J, v in zip(simp, c) if v}, {J: v for J, v in zip(prev, h) if v}, dict(omega))
    if triple_defect(cx, t):
        raise AssertionError("triple_from_form produced a non-cocycle")
    return t


def _lattice_frame(cx: DeligneComplex, p: int, basis: list[dict]):
    """Square matrix whose rows are a ℤ-basis of the integral-period lattice
    followed by a basis of the exact directions (all in ``basis`` coordinates);
    returns (rows, number of lattice rows)."""
    S = integral_closed_forms(cx, p, basis)
    red = S._reducer()
    gens = [S._reduce(g[1], red) for g in S.gens]
    gens = [g for g in gens if any(g)]
    lattice = []
    if gens:
        ints, N = la.to_integer_rows(gens)
        snf = smith_normal_form(ints, len(basis))
        vinv = integer_inverse(snf.V).tolist()
        for i, d in enumerate(snf.diagonal):
            if d:
                lattice.append([Fraction(d * x, N) for x in vinv[i]])
    rows = lattice + [list(v) for v in S.divisible]
    if len(rows) != len(basis) or la.rank(rows) != len(basis):
        raise ModelError(f"closed {p}-forms do not split into periods and exact forms")
    return rows, len(lattice)


def _flat_shift(big: DeligneComplex, target: DeligneCochain) -> dict | None:
    """Rational cocycle z with (0, z) ≡ target modulo coboundaries (z in the h-slot)."""
    K = big.k
    nerve = big.nerve
    simp = nerve.of_dim(K - 1)
    solver = big.__dict__.get("_flat_shift_solver")
    if solver is None:
        solver = big._flat_shift_solver = _flat_shift_solver(big)
    ti, tr = big.vectorize(target)
    sol = solver.solve(ti, list(tr) + [0] * (len(solver.zq) - len(tr)))
    if sol is None:
        return None
    b = big.dims(K - 1)[1]
    return {J: v for J, v in zip(simp, sol[1][b:]) if v}


def _flat_shift_solver(big: DeligneComplex) -> MixedSolver:
    K = big.k
    nerve = big.nerve
    zz, zq, qq = big._blocks(K - 1)
    a, b = big.dims(K - 1)
    simp = nerve.of_dim(K - 1)
    one = next(iter(big.alg.one().terms))
    offsets, pos = {}, 0
    for p, J in big.rat_layout(K):
        if p == 0:
            offsets[J] = pos + big.form_basis(0).index(one)
        pos += len(big.form_basis(p))
    qq2 = [list(row) + [Fraction(0)] * len(simp) for row in qq]
    for c, J in enumerate(simp):
        qq2[offsets[J]][b + c] = Fraction(1)
    cob = nerve.coboundary(K - 1) if nerve.of_dim(K) else []
    qq2 += [[Fraction(0)] * b + [Fraction(v) for v in row] for row in cob]
    zq2 = [list(r) for r in zq] + [[Fraction(0)] * a for _ in cob]
    return MixedSolver(zz, zq2, qq2, a, b + len(simp))


def calibrate_homotopy(B: WedgeCupHomotopy, N: int | None = None) -> WedgeCupHomotopy:
    """Shift B by rational cocycles so the triple product matches ⌣ on a lattice basis.

    B is only pinned down up to cocycles, and such a shift moves the triple
    product by a flat class bilinear in the curvatures.  Fitting the shift
    on lattice generators and then testing arbitrary pairs checks that this
    is the only discrepancy.
    """
    cx = B.cx
    out = WedgeCupHomotopy(cx, B.basis, {k: dict(v) for k, v in B.values.items()})
    frames = {p: _lattice_frame(cx, p, b) for p, b in B.basis.items() if p >= 1 and b}
    top = cx.nerve.dimension
    bigs: dict = {}
    for p, (Lp, rp) in frames.items():
        for q, (Lq, rq) in frames.items():
            if p + q > top:
                continue
            Mp, Mq = la.inverse(Lp), la.inverse(Lq)
            z = {}
            for i in range(rp):
                wi = _combine(B.basis[p], Lp[i])
                ti = triple_from_form(cx, wi, p)
                for j in range(rq):
                    wj = _combine(B.basis[q], Lq[j])
                    tj = triple_from_form(cx, wj, q)
                    got = triple_to_deligne(cx, cup_triples(cx, ti, tj, out))
                    want = cup(cx, triple_to_deligne(cx, ti), triple_to_deligne(cx, tj))
                    diff = want - got
                    w = N or max([p + q] + [cx.alg.mono_weight(m) for c in diff.forms.values()
                                            for e in c.values() for m in e.terms])
                    key = (p + q, w)
                    if key not in bigs:
                        bigs[key] = DeligneComplex(cx.model, p + q, w)
                    shift = _flat_shift(bigs[key], diff)
                    if shift is None:
                        raise ModelError(f"triple and sheaf products differ by a non-flat class in bidegree ({p},{q})")
                    z[(i, j)] = shift
            for a in range(len(B.basis[p])):
                for b in range(len(B.basis[q])):
                    acc: dict = dict(out.values.get((p, a, q, b), {}))
                    for (i, j), zij in z.items():
                        f = Mp[a][i] * Mq[b][j]
                        if f:
                            for J, v in zij.items():
                                acc[J] = acc.get(J, 0) + f * v
                    acc = {J: v for J, v in acc.items() if v}
                    if acc:
                        out.values[(p, a, q, b)] = acc
                    else:
                        out.values.pop((p, a, q, b), None)
    return out


def _combine(forms: list[dict], coeffs) -> dict:
    f: dict = {}
    for c, g in zip(coeffs, forms):
        if c:
            for V, e in g.items():
                f[V] = f[V] + e * c if V in f else e * c
    return {V: e for V, e in f.items() if not e.is_zero()}
