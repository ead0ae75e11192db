"""Free graded-commutative algebras with a differential, over the rationals.

A monomial is a tuple of exponents, one per generator; odd generators
appear with exponent 0 or 1 and are ordered by index.  Elements are
sparse dictionaries monomial -> Fraction wrapped in :class:`Element`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import linalg as la

Monomial = tuple


class DifferentialError(ValueError):
    pass


class FiniteDGA:
    """Free graded-commutative algebra on named generators, truncated above ``top``.

    ``differential`` maps generator names to elements (or strings parsed by
    :meth:`parse`); missing generators are closed.  Relations are not
    supported: quotient DGAs are modelled by choosing generators well.
    """

    def __init__(
        self,
        names: Sequence[str],
        degrees: Sequence[int],
        differential: Mapping[str, object] | None = None,
        top: int | None = None,
        weights: Sequence[int] | None = None,
        volume: str | None = None,
    ):
        if len(names) != len(degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if any(d < 0 for d in degrees):
            raise ValueError("negative generator degree")
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.top = top
        self.weights = tuple(weights) if weights is not None else tuple(max(d, 1) for d in self.degrees)
        self.n = len(self.names)
        self._dcache: dict = {}
        self._dgen: list = [None] * self.n
        self._raw_differential = dict(differential or {})
        for name, val in self._raw_differential.items():
            if name not in self.index:
                raise KeyError(f"differential given for unknown generator {name!r}")
        for i in range(self.n):
            val = self._raw_differential.get(self.names[i])
            if val is None:
                self._dgen[i] = {}
            else:
                el = self.parse(val) if isinstance(val, str) else self.coerce(val)
                if el.terms and el.degree() != self.degrees[i] + 1:
                    raise DifferentialError(f"d({self.names[i]}) has the wrong degree")
                self._dgen[i] = el.terms
        self.volume = self.parse(volume) if volume else None

    # -- construction helpers
    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"FiniteDGA({gens}; top={self.top})"

    def extend(self, names, degrees, differential=None, weights=None) -> "FiniteDGA":
        """A new DGA with extra generators appended (existing differentials kept)."""
        new = FiniteDGA(
            self.names + tuple(names),
            self.degrees + tuple(degrees),
            None,
            self.top,
            self.weights + tuple(weights if weights is not None else [max(d, 1) for d in degrees]),
        )
        for i in range(self.n):
            new._dgen[i] = new._lift_terms(self, self._dgen[i])
        for k, v in (differential or {}).items():
            el = new.parse(v) if isinstance(v, str) else new.coerce(v)
            new._dgen[new.index[k]] = el.terms
        if self.volume is not None:
            new.volume = new.include(self.volume)
        return new

    def _lift_terms(self, old: "FiniteDGA", terms):
        pad = (0,) * (self.n - old.n)
        return {m + pad: c for m, c in terms.items()}

    def include(self, x: "Element") -> "Element":
        """Image of an element of a DGA whose generators are a prefix of ours."""
        if x.alg is self:
            return x
        if x.alg.names != self.names[: x.alg.n]:
            raise ValueError("not a sub-DGA")
        return Element(self, self._lift_terms(x.alg, x.terms))

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def mono_weight(self, m: Monomial) -> int:
        return sum(e * w for e, w in zip(m, self.weights))

    def one(self) -> "Element":
        return Element(self, {(0,) * self.n: Fraction(1)})

    def zero(self) -> "Element":
        return Element(self, {})

    def const(self, c) -> "Element":
        c = la.frac(c)
        return Element(self, {(0,) * self.n: c} if c else {})

    def gen(self, name: str) -> "Element":
        m = [0] * self.n
        m[self.index[name]] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def gens(self) -> list["Element"]:
        return [self.gen(n) for n in self.names]

    def coerce(self, x) -> "Element":
        if isinstance(x, Element):
            if x.alg is not self:
                return self.include(x)
            return x
        return self.const(x)

    # -- arithmetic on term dictionaries
    def _truncate_ok(self, m) -> bool:
        return self.top is None or self.mono_degree(m) <= self.top

    def mono_mul(self, a: Monomial, b: Monomial):
        """(sign, monomial) for a*b, or (0, None)."""
        sign = 1
        out = list(a)
        # odd generator j of b moves left past the odd generators of a with index > j
        a_odd = [i for i, e in enumerate(a) if e and self.degrees[i] % 2]
        for j, e in enumerate(b):
            if not e:
                continue
            if self.degrees[j] % 2:
                if a[j]:
                    return 0, None
                inv = sum(1 for i in a_odd if i > j)
                if inv % 2:
                    sign = -sign
            out[j] += e
        return sign, tuple(out)

    def mul_terms(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for ma, ca in x.items():
            for mb, cb in y.items():
                s, m = self.mono_mul(ma, mb)
                if not s or not self._truncate_ok(m):
                    continue
                v = out.get(m, 0) + s * ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    def d_mono(self, m: Monomial) -> dict:
        hit = self._dcache.get(m)
        if hit is None:
            hit = self._dcache[m] = self._derive_mono(m, self._dgen, 1)
        return hit

    def _derive_mono(self, m: Monomial, images, parity: int) -> dict:
        """Leibniz expansion of a derivation of the given parity on one monomial."""
        out: dict = {}
        prefix = [0] * self.n
        pdeg = 0
        for i, e in enumerate(m):
            if not e:
                continue
            dg = images[i]
            if dg:
                pre = {tuple(prefix): Fraction(-1 if parity * pdeg % 2 else 1)}
                if self.degrees[i] % 2:
                    mid = dg
                else:
                    p = [0] * self.n
                    p[i] = e - 1
                    mid = self.mul_terms({tuple(p): Fraction(e)}, dg)
                suf = [0] * self.n
                suf[i + 1:] = m[i + 1:]
                term = self.mul_terms(self.mul_terms(pre, mid), {tuple(suf): Fraction(1)})
                for k, v in term.items():
                    nv = out.get(k, 0) + v
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
            prefix[i] = e
            pdeg += e * self.degrees[i]
        return out

    def derivation(self, images: Mapping[str, object], degree: int) -> Callable[["Element"], "Element"]:
        """The graded derivation of the given degree with prescribed values on generators."""
        imgs = [{} for _ in range(self.n)]
        for name, v in images.items():
            el = self.parse(v) if isinstance(v, str) else self.coerce(v)
            if el.terms and el.degree() != self.degrees[self.index[name]] + degree:
                raise DifferentialError(f"image of {name!r} has the wrong degree")
            imgs[self.index[name]] = el.terms
        cache: dict = {}

        def apply(x: "Element") -> "Element":
            out: dict = {}
            for m, c in self.coerce(x).terms.items():
                dm = cache.get(m)
                if dm is None:
                    dm = cache[m] = self._derive_mono(m, imgs, degree % 2)
                for k, v in dm.items():
                    nv = out.get(k, 0) + c * v
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
            return Element(self, out)

        return apply

    def d_terms(self, x: dict) -> dict:
        out: dict = {}
        for m, c in x.items():
            for k, v in self.d_mono(m).items():
                nv = out.get(k, 0) + c * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    # -- checks
    def check_d_squared(self):
        """First generator whose d(d(g)) is nonzero, as (name, dd), or None."""
        for i, nm in enumerate(self.names):
            dd = self.d_terms(self._dgen[i])
            if dd:
                return nm, Element(self, dd)
        return None

    # -- bases and exactness
    def basis(self, degree: int, max_weight: int | None = None, max_poly: int | None = None) -> list[Monomial]:
        """Monomials of the given degree, bounded by weight or by degree-0 exponent sum."""
        if self.top is not None and degree > self.top:
            return []
        zero_deg = [i for i in range(self.n) if self.degrees[i] == 0]
        if zero_deg and max_weight is None and max_poly is None:
            raise ValueError("degree-0 generators need a weight or polynomial bound")
        out = []

        def rec(i, cur, deg, wt, poly):
            if i == self.n:
                if deg == degree:
                    out.append(tuple(cur))
                return
            d = self.degrees[i]
            w = self.weights[i]
            if d % 2:
                choices = (0, 1)
            elif d == 0:
                lim = []
                if max_weight is not None:
                    lim.append((max_weight - wt) // w)
                if max_poly is not None:
                    lim.append(max_poly - poly)
                choices = range(0, max(min(lim), -1) + 1)
            else:
                choices = range(0, (degree - deg) // d + 1)
            for e in choices:
                nd = deg + e * d
                nw = wt + e * w
                if nd > degree or (max_weight is not None and nw > max_weight):
                    break
                cur.append(e)
                rec(i + 1, cur, nd, nw, poly + (e if d == 0 else 0))
                cur.pop()

        rec(0, [], 0, 0, 0)
        return sorted(out)

    def max_poly(self, x: "Element") -> int:
        return max(
            (sum(e for e, d in zip(m, self.degrees) if d == 0) for m in x.terms), default=0
        )

    def primitive(self, z: "Element", max_weight: int | None = None, max_poly: int | None = None):
        """Some y with d y = z inside the bounded basis, or None if none exists there."""
        z = self.coerce(z)
        if z.is_zero():
            return self.zero()
        degs = {self.mono_degree(m) for m in z.terms}
        if len(degs) != 1:
            raise ValueError("primitive of an inhomogeneous element")
        deg = degs.pop()
        if deg == 0:
            return None
        has_zero = any(d == 0 for d in self.degrees)
        if has_zero and max_weight is None and max_poly is None:
            max_poly = self.max_poly(z) + 1
        cand = self.basis(deg - 1, max_weight, max_poly)
        if not cand:
            return None
        images = [self.d_mono(m) for m in cand]
        rows_idx = {}
        for img in images:
            for k in img:
                rows_idx.setdefault(k, len(rows_idx))
        for k in z.terms:
            if k not in rows_idx:
                rows_idx.setdefault(k, len(rows_idx))
        mat = [[Fraction(0)] * len(cand) for _ in rows_idx]
        for j, img in enumerate(images):
            for k, v in img.items():
                mat[rows_idx[k]][j] = v
        rhs = [Fraction(0)] * len(rows_idx)
        for k, v in z.terms.items():
            rhs[rows_idx[k]] = v
        sol = la.solve(mat, rhs, len(cand))
        if sol is None:
            return None
        return Element(self, {m: c for m, c in zip(cand, sol) if c})

    def is_exact(self, z, **kw) -> bool:
        return self.primitive(z, **kw) is not None

    # -- homomorphisms
    def hom(self, target: "FiniteDGA", images: Mapping[str, "Element"]) -> Callable[["Element"], "Element"]:
        """Algebra map sending generators to ``images`` (missing ones to themselves by name)."""
        imgs = []
        for nm in self.names:
            if nm in images:
                imgs.append(target.coerce(images[nm]))
            else:
                imgs.append(target.gen(nm))
        cache: dict = {}

        def apply(x: "Element") -> "Element":
            out = target.zero()
            for m, c in x.terms.items():
                v = cache.get(m)
                if v is None:
                    v = target.one()
                    for i, e in enumerate(m):
                        for _ in range(e):
                            v = v * imgs[i]
                    cache[m] = v
                out = out + v * c
            return out

        return apply

    def integrate(self, x: "Element") -> Fraction:
        """Pairing of a top-degree element against the fundamental class."""
        if self.volume is None:
            raise ValueError("this DGA has no fundamental class")
        (vm, vc), = self.volume.terms.items()
        x = self.coerce(x)
        return x.terms.get(vm, Fraction(0)) / vc

    # -- text
    def parse(self, text: str) -> "Element":
        """Parse sums of products like ``-2*x*dx + 1/3*t``; '*' binds generators."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return self.zero()
        out = self.zero()
        terms = []
        cur = ""
        for ch in text:
            if ch in "+-" and cur and cur[-1] not in "*/^":
                terms.append(cur)
                cur = ch
            else:
                cur += ch
        if cur:
            terms.append(cur)
        for t in terms:
            sign = 1
            if t[0] in "+-":
                sign = -1 if t[0] == "-" else 1
                t = t[1:]
            v = self.const(sign)
            for fac in t.split("*"):
                if not fac:
                    raise ValueError(f"bad term {t!r}")
                base, _, power = fac.partition("^")
                p = int(power) if power else 1
                if base in self.index:
                    for _ in range(p):
                        v = v * self.gen(base)
                else:
                    try:
                        v = v * (Fraction(base) ** p)
                    except (ValueError, ZeroDivisionError) as exc:
                        raise ValueError(f"unknown symbol {base!r}") from exc
            out = out + v
        return out


class Element:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: FiniteDGA, terms: dict):
        self.alg = alg
        self.terms = {m: la.frac(c) for m, c in terms.items() if c}

    def _other(self, o) -> "Element":
        if isinstance(o, Element):
            if o.alg is self.alg:
                return o
            return self.alg.coerce(o)
        return self.alg.const(o)

    def __add__(self, o):
        o = self._other(o)
        t = dict(self.terms)
        for m, c in o.terms.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return Element(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        if isinstance(o, Element):
            o = self._other(o)
            return Element(self.alg, self.alg.mul_terms(self.terms, o.terms))
        c = la.frac(o)
        return Element(self.alg, {m: v * c for m, v in self.terms.items()} if c else {})

    def __rmul__(self, o):
        # scalars only; Element * Element goes through __mul__
        return self * o

    def __truediv__(self, o):
        return self * (1 / la.frac(o))

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = self.alg.const(o)
        if not isinstance(o, Element):
            return NotImplemented
        return self.terms == self._other(o).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def d(self) -> "Element":
        return Element(self.alg, self.alg.d_terms(self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        degs = {self.alg.mono_degree(m) for m in self.terms}
        if not degs:
            return 0
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop()

    def part(self, degree: int) -> "Element":
        return Element(self.alg, {m: c for m, c in self.terms.items() if self.alg.mono_degree(m) == degree})

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.alg.n, Fraction(0))

    def __pow__(self, k: int):
        out = self.alg.one()
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (self.alg.mono_degree(m), m)):
            c = self.terms[m]
            fac = []
            for i, e in enumerate(m):
                if e == 1:
                    fac.append(self.alg.names[i])
                elif e:
                    fac.append(f"{self.alg.names[i]}^{e}")
            mono = "*".join(fac)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        s = "+".join(parts)
        return s.replace("+-", "-")


def polynomial_forms(coords: Sequence[str], top: int | None = None) -> FiniteDGA:
    """Polynomial de Rham forms Q[x] ⊗ Λ(dx) on affine coordinates."""
    names = list(coords) + ["d" + c for c in coords]
    degs = [0] * len(coords) + [1] * len(coords)
    diff = {c: "d" + c for c in coords}
    return FiniteDGA(names, degs, diff, top=top if top is not None else len(coords))
