"""Command-line front end: ``diffcoh deligne|cs|forms|vir``.

Exit status: 0 when every check in the report passes, 1 on any FAIL, 2 on bad input.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from . import cech_deligne as cd
from . import deligne_product as dp
from . import invariant_forms as inv
from . import lens_cs as lc
from . import modelio
from . import sugawara as sg


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.failed = False

    def add(self, line: str = ""):
        self.lines.append(line)

    def check(self, label: str, ok: bool):
        self.failed |= not ok
        self.add(f"{label}: {'PASS' if ok else 'FAIL'}")

    def emit(self) -> int:
        print("\n".join(self.lines))
        return 1 if self.failed else 0


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


# ------------------------------------------------------------ deligne


def cmd_deligne(args) -> int:
    model = modelio.load(args.model, "chart-model")
    r = Report()
    k = args.k
    if args.action == "cohomology":
        G = cd.deligne_cohomology(model, k, args.N)
        r.add(f"Ĥ^{k}({model.name}) = {G}")
    elif args.action == "hexagon":
        if not model.good:
            raise cd.ModelError(f"model {model.name!r} is not a good cover: {model.notes}")
        rep = cd.verify_hexagon(model, k, args.N)
        r.add(str(rep))
        r.failed = not rep.passed
    elif args.action == "cup":
        _deligne_cup(model, k, args, r)
    elif args.action == "integrate":
        cx = cd.DeligneComplex(model, k, args.N)
        coord = model.coords[-1] if model.coords else None
        if coord is None:
            raise cd.ModelError("fiber integration needs a circle coordinate")
        a = args.value
        x = cx.iota(cx.uniform_form(f"{a}*d{coord}"))
        y = cd.fiber_integrate_circle(cx, x)
        if k == 2:
            val = y.forms.get(0, {}).get((0,))
            got = lc.mod1(val.constant_term() if val is not None else 0)
        else:
            got = lc.mod1(y.ints.get((0,), 0))
        r.add(f"∫ ι({a} d{coord}) = {got} mod 1")
        r.check("fiber integral", got == lc.mod1(a) if k == 2 else True)
    return r.emit()


def _deligne_cup(model, k, args, r: Report):
    """Leibniz rule for ⌣ on random cochains and the triple product on random cocycle pairs."""
    rng = random.Random(args.seed)
    l = args.l if args.l is not None else k
    cxk, cxl, cxs = (cd.DeligneComplex(model, w, args.N) for w in (k, l, k + l))
    ok = True
    for _ in range(args.trials):
        x = cxk.random_cochain(k, rng)
        y = cxl.random_cochain(l, rng)
        lhs = cxs.D(dp.cup(cxs, x, y))
        rhs = dp.cup(cxs, cxk.D(x), y) + dp.cup(cxs, x, cxl.D(y)).scale((-1) ** k)
        ok &= lhs == rhs
    r.check(f"Leibniz D(x⌣y) = Dx⌣y + (−1)^{k} x⌣Dy, weights ({k},{l}), {args.trials} pairs", ok)
    if model.good:
        cx = cd.DeligneComplex(model, max(k, l), args.N)
        B = dp.solve_homotopy_B(cx)
        basis = {p: dp._closed_global(cx, p) for p in range(0, cx.top_degree + 1)}
        ok = True
        for _ in range(args.trials):
            t1 = dp.random_triple(cx, k, rng, basis)
            t2 = dp.random_triple(cx, l, rng, basis)
            ok &= dp.triple_is_cocycle(cx, dp.cup_triples(cx, t1, t2, B))
        r.check(f"triple product dh = ω − c, {args.trials} pairs", ok)


# ------------------------------------------------------------ cs


def cmd_cs(args) -> int:
    r = Report()
    L = lc.LensData(args.p, args.q)
    r.add(f"{L}: r = {L.r}")
    r.add(f"cs values: {lc.format_set(lc.cs_set(L))}")
    if args.q2 is not None:
        M = lc.LensData(args.p, args.q2)
        r.add(f"{M}: r = {M.r}")
        r.add(f"cs values: {lc.format_set(lc.cs_set(M))}")
        cmp_ = lc.equal_cs_sets(L, M)
        r.add(f"cs sets equal: {'yes' if cmp_.equal else 'no'}")
        r.add(str(cmp_.homotopy))
        r.add(str(lc.homotopy_equivalent(L, M, oriented=False)))
        r.check("cs criterion agrees with quadratic residues", cmp_.consistent)
    if args.config is not None:
        k, l = args.config
        for X in [L] + ([lc.LensData(args.p, args.q2)] if args.q2 is not None else []):
            nt, t = lc.config_cs_values(X, k, l)
            r.add(f"Conf₂ {X}, (k, ℓ) = ({k}, {l}): nontorsion {nt}, torsion {t}")
        if args.q2 is not None:
            tables = modelio.load(args.massey, "massey-table") if args.massey else None
            rep = lc.configuration_pipeline(args.p, args.q, args.q2, tables)
            r.add(str(rep))
    return r.emit()


# ------------------------------------------------------------ forms


def cmd_forms(args) -> int:
    r = Report()
    if args.action == "rp3":
        rep = inv.rp3_phi()
        r.add(f"½ CS_p1(A) = {rep.coefficient} · vol")
        r.add(str(rep))
        r.check("Phi(RP3) = 1/2", rep.phi == Fraction(1, 2))
        return r.emit()
    if args.action == "koszul":
        for name, dim, st in (("abelian, dim 1", 1, [[[Fraction(0)]]]), ("so(3)", 3, inv.SO3_STRUCTURE)):
            rep = inv.koszul_suite(dim, st)
            r.add(f"[{name}]")
            for c in rep.checks:
                r.check(f"  {c.name}", c.passed)
            r.add(f"  basic dims: {rep.basic_dims}")
        return r.emit()
    model = modelio.load(args.dga, "dga")
    A = model.connection
    if A is None:
        raise modelio.ParseError("the DGA has no connection block")
    alg = model.alg
    if args.action == "classes":
        F = inv.curvature(A)
        r.check("Bianchi", inv.bianchi_check(A).passed)
        ch = inv.chern_forms(F)
        for k in range(1, A.n + 1):
            t = ch.term(2 * k)
            r.add(f"c{k} = {'0' if t.is_zero() else t}")
        if A.tag == "orthogonal":
            pt = inv.pontryagin_forms(F)
            for k in range(1, A.n // 2 + 1):
                t = pt.term(4 * k)
                r.add(f"p{k} = {'0' if t.is_zero() else t}")
    elif args.action == "cs":
        f = inv.pontryagin_polynomial(1) if A.tag == "orthogonal" else inv.chern_polynomial(2)
        cs = inv.cs_transgression(inv.MatrixForm.zero(alg, A.n), A, f)
        r.add(f"CS_{f.name}(A) = {cs}")
        if alg.volume is not None and cs.raw.degree() == alg.top:
            r.add(f"∫ CS = {alg.integrate(cs.raw)} · {cs.scalar}")
        F = inv.curvature(A)
        r.check("dCS = f(F)", cs.d() == f(F))
    elif args.action == "whitney":
        rng = random.Random(args.seed)
        blocks = inv.polynomial_dga(4)
        for fam, tag in (("chern", "general"), ("pontryagin", "orthogonal"), ("euler", "orthogonal")):
            ok = True
            for _ in range(args.trials):
                n1, n2 = (2, 2) if fam == "euler" else (rng.randint(1, 2), rng.randint(1, 2))
                F1 = inv.random_matrix_form(blocks, n1, 2, rng, tag)
                F2 = inv.random_matrix_form(blocks, n2, 2, rng, tag)
                ok &= inv.whitney_check(F1, F2, fam).passed
            r.check(f"Whitney ({fam}), {args.trials} block pairs", ok)
        F = inv.curvature(A)
        fam = "pontryagin" if A.tag == "orthogonal" else "chern"
        r.check(f"Whitney ({fam}) on {model.name or 'model'} ⊕ itself", inv.whitney_check(F, F, fam).passed)
    return r.emit()


# ------------------------------------------------------------ vir


def cmd_vir(args) -> int:
    r = Report()
    alg = modelio.load(args.algebra, "lie-algebra")
    bad = alg.check()
    if bad:
        raise sg.LieError("not a Lie algebra with invariant form: " + ", ".join(bad))
    level = args.level
    rng = range(-args.range, args.range + 1)
    if alg.tag == "abelian" and alg.dim == 1 and alg.B[0][0] == 1:
        N = args.N if args.N is not None else 10
        r.add(f"Fock(μ={args.mu}, ħ={level}), energy ≤ {N}")
        ops: dict = {}
        for m in rng:
            for n in rng:
                try:
                    v = sg.virasoro_check(m, n, N, args.mu, level, ops)
                except sg.WindowError:
                    r.add(f"[L{m},L{n}]: SKIP (window empty)")
                    continue
                r.check(f"[L{m},L{n}] ({v.states} states)", v.passed)
        m = 2
        w = sg.safe_window(N, m, -m)
        s = sg.central_value(ops.get(m) or sg.sugawara_heisenberg(m, N, args.mu, level),
                             ops.get(-m) or sg.sugawara_heisenberg(-m, N, args.mu, level),
                             ops.get(0) or sg.sugawara_heisenberg(0, N, args.mu, level), m, w)
        c = None if s is None else sg.central_charge_from(s, m)
    else:
        lam = sg.lambda_B(alg)
        r.add(f"λ_B = {lam}")
        c_formula = sg.central_charge_formula(alg, level)
        N = args.N if args.N is not None else 4
        V = sg.verma_truncation(alg, level, None, N)
        r.add(f"vacuum module at level {level}, energy ≤ {N}: graded dims {V.graded_dims()}")
        ops = {}
        for m in rng:
            for n in rng:
                try:
                    v = sg.sugawara_virasoro_check(V, m, n, ops)
                except sg.WindowError:
                    r.add(f"[L{m},L{n}]: SKIP (window empty)")
                    continue
                r.check(f"[L{m},L{n}] ({v.states} states)", v.passed)
        c = sg.extract_central_charge(V)
        r.check(f"central charge matches ℓ·dim/(ℓ+λ_B) = {c_formula}", c == c_formula)
    r.add(f"central charge = {c if c is not None else 'not scalar'}")
    if c is None:
        r.failed = True
    return r.emit()


# ------------------------------------------------------------ entry


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diffcoh", description="Differential cohomology and Chern–Simons calculators.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("deligne", help="Čech–Deligne cohomology on chart models")
    p.add_argument("model", help="model file, fixture name, or builtin (point, circle, torus)")
    p.add_argument("k", type=int)
    p.add_argument("action", choices=["cohomology", "hexagon", "cup", "integrate"])
    p.add_argument("--N", type=int, default=None, help="polynomial weight bound")
    p.add_argument("--l", type=int, default=None, help="second weight for cup (default k)")
    p.add_argument("--value", type=_frac, default=Fraction(1, 3), help="∫A for integrate")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_deligne)

    p = sub.add_parser("cs", help="lens-space Chern–Simons invariants")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("q2", type=int, nargs="?")
    p.add_argument("--config", type=int, nargs=2, metavar=("K", "L"))
    p.add_argument("--massey", help="Massey base-case table")
    p.set_defaults(func=cmd_cs)

    p = sub.add_parser("forms", help="Chern–Weil forms and Chern–Simons transgression")
    p.add_argument("action", choices=["classes", "cs", "whitney", "koszul", "rp3"])
    p.add_argument("dga", nargs="?", default="so3", help="DGA file, fixture name, or builtin (so3, flat)")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("vir", help="Virasoro relations for Sugawara operators")
    p.add_argument("algebra", help="Lie algebra file, fixture name, or builtin (heisenberg, sl2, so3)")
    p.add_argument("--level", type=_frac, default=Fraction(1))
    p.add_argument("--mu", type=_frac, default=Fraction(0))
    p.add_argument("--range", type=int, default=3)
    p.add_argument("--N", type=int, default=None)
    p.set_defaults(func=cmd_vir)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
