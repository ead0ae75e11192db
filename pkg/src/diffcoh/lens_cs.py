"""Chern–Simons invariants of lens spaces and the two-point configuration-space filter."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence


class LensError(ValueError):
    pass


def mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def format_set(values: Iterable[Fraction]) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


@dataclass(frozen=True)
class LensData:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise LensError("p and q must be positive")
        if gcd(self.p, self.q) != 1:
            raise LensError(f"gcd({self.p}, {self.q}) ≠ 1")

    @property
    def r(self) -> int:
        """Canonical r in [1, p) with q r ≡ −1 (mod p); r = 0 only for p = 1."""
        if self.p == 1:
            return 0
        return (-pow(self.q, -1, self.p)) % self.p

    @property
    def squares(self) -> frozenset:
        return frozenset(n * n % self.p for n in range(self.p))

    def __str__(self):
        return f"L({self.p},{self.q})"


def lens(p: int, q: int) -> LensData:
    return LensData(p, q)


def cs_value(L: LensData, n: int, r: int | None = None) -> Fraction:
    """−n²r/p mod 1 for the flat class indexed by n."""
    if not 0 <= n <= L.p // 2:
        raise LensError(f"flat class index {n} outside [0, {L.p // 2}]")
    r = L.r if r is None else r
    if (L.q * r + 1) % L.p:
        raise LensError("r must satisfy q r ≡ −1 (mod p)")
    return mod1(Fraction(-n * n * r, L.p))


def cs_set(L: LensData) -> frozenset:
    return frozenset(cs_value(L, n) for n in range(L.p // 2 + 1))


# ---------------------------------------------------------------- Kirk–Klassen


@dataclass(frozen=True)
class PathPiece:
    """α, β polynomial in t on [start, end]; coefficients in increasing degree."""

    start: Fraction
    end: Fraction
    alpha: tuple
    beta: tuple

    def __post_init__(self):
        for name in ("alpha", "beta"):
            coeffs = getattr(self, name)
            try:
                object.__setattr__(self, name, tuple(Fraction(c) for c in coeffs))
            except (TypeError, ValueError) as e:
                raise LensError(f"{name} must be a rational polynomial: {e}") from None
        object.__setattr__(self, "start", Fraction(self.start))
        object.__setattr__(self, "end", Fraction(self.end))


def _peval(c: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for x in reversed(c):
        acc = acc * t + x
    return acc


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _pderiv(a):
    return [i * a[i] for i in range(1, len(a))]


def _pint(a, lo: Fraction, hi: Fraction) -> Fraction:
    anti = [Fraction(0)] + [x / (i + 1) for i, x in enumerate(a)]
    return _peval(anti, hi) - _peval(anti, lo)


def kirk_klassen_integral(pieces: Sequence[PathPiece]) -> Fraction:
    """−2 Σ ∫ β α′ dt, exact and not reduced."""
    total = Fraction(0)
    for pc in pieces:
        total += _pint(_pmul(list(pc.beta), _pderiv(list(pc.alpha))), pc.start, pc.end)
    return -2 * total


def kirk_klassen(pieces: Sequence[PathPiece], p: int | None = None) -> Fraction:
    """cs(f₁) − cs(f₀) mod 1.  With ``p`` given, pα at both ends must be integral."""
    if not pieces:
        return Fraction(0)
    if isinstance(pieces, PathPiece):
        pieces = [pieces]
    for a, b in zip(pieces, pieces[1:]):
        if a.end != b.start:
            raise LensError("path pieces must be contiguous")
    if p is not None:
        ends = (_peval(pieces[0].alpha, pieces[0].start), _peval(pieces[-1].alpha, pieces[-1].end))
        if any((p * v).denominator != 1 for v in ends):
            raise LensError("endpoint condition fails: pα is not integral at an end")
    return mod1(kirk_klassen_integral(pieces))


def canonical_path(L: LensData, n: int) -> list[PathPiece]:
    """α(t) = p t, β(t) = r t on [0, n/p]."""
    return [PathPiece(Fraction(0), Fraction(n, L.p), (0, L.p), (0, L.r))]


def kirk_klassen_set(L: LensData) -> frozenset:
    return frozenset(kirk_klassen(canonical_path(L, n), L.p) for n in range(L.p // 2 + 1))


# ------------------------------------------------------------ classification


@dataclass
class HomotopyVerdict:
    equivalent: bool
    witness: int | None
    sign: int | None = None
    oriented: bool = True

    def __bool__(self):
        return self.equivalent

    def __str__(self):
        kind = "oriented" if self.oriented else "unoriented"
        if self.equivalent:
            return f"{kind} homotopy equivalent: yes (a={self.witness})"
        return f"{kind} homotopy equivalent: no"


def homotopy_equivalent(L: LensData, M: LensData, oriented: bool = True) -> HomotopyVerdict:
    """q′q⁻¹ ≡ a² (oriented) or ±a² (unoriented) mod p; smallest witness a."""
    if L.p != M.p:
        return HomotopyVerdict(False, None, None, oriented)
    p = L.p
    if p == 1:
        return HomotopyVerdict(True, 1, 1, oriented)
    target = M.q * pow(L.q, -1, p) % p
    signs = (1,) if oriented else (1, -1)
    for a in range(1, p):
        if gcd(a, p) != 1:
            continue
        for s in signs:
            if (s * a * a - target) % p == 0:
                return HomotopyVerdict(True, a, s, oriented)
    return HomotopyVerdict(False, None, None, oriented)


@dataclass
class CsComparison:
    equal: bool
    homotopy: HomotopyVerdict

    @property
    def consistent(self) -> bool:
        return self.equal == self.homotopy.equivalent


def equal_cs_sets(L: LensData, M: LensData) -> CsComparison:
    eq = L.p == M.p and cs_set(L) == cs_set(M)
    return CsComparison(eq, homotopy_equivalent(L, M, oriented=True))


def coprime_pairs(max_p: int):
    for p in range(2, max_p + 1):
        qs = [q for q in range(1, p) if gcd(p, q) == 1]
        for q in qs:
            for q2 in qs:
                yield LensData(p, q), LensData(p, q2)


# --------------------------------------------------------- configuration spaces


def config_cs_values(L: LensData, k: int, l: int) -> tuple[Fraction, Fraction]:
    """(r(k² + ℓ²)/p, 2kℓ/p) mod 1 on the nontorsion and torsion generators."""
    p = L.p
    return mod1(Fraction(L.r * (k * k + l * l), p)), mod1(Fraction(2 * k * l, p))


@dataclass(frozen=True)
class EquivalenceCandidate:
    """ε, a with εq′ ≡ qa² (mod p); f₁ = diag(a, ±a), h₃ = diag(ε, ±a²)."""

    p: int
    eps: int
    a: int

    @property
    def f1(self) -> tuple:
        return ((self.a, 0), (0, f"±{self.a}"))

    @property
    def h3(self) -> tuple:
        return ((self.eps, 0), (0, f"±{self.a * self.a % self.p}"))

    def __str__(self):
        return f"(ε={self.eps:+d}, a={self.a})"


def candidate_equivalences(p: int, q: int, q2: int) -> frozenset:
    if gcd(p, q) != 1 or gcd(p, q2) != 1:
        raise LensError("q and q′ must be prime to p")
    out = set()
    for a in range(1, p):
        if gcd(a, p) != 1:
            continue
        for eps in (1, -1):
            if (eps * q2 - q * a * a) % p == 0:
                out.add(EquivalenceCandidate(p, eps, a))
    return frozenset(out)


def cs_intertwining_experiment(p: int, q: int, q2: int) -> dict:
    """For each congruence candidate: do the configuration cs values transform consistently?

    α(k, ℓ) on the q side is sent by f₁ = diag(a, ±a) to α(ak, ±aℓ) on the q′
    side; h₃ scales the nontorsion value by ε and the torsion value by ±a².
    Candidates outside the congruence are tested too, so the result shows
    whether the cs values carry any constraint beyond it.
    """
    L, M = LensData(p, q), LensData(p, q2)
    congruent = candidate_equivalences(p, q, q2)
    out = {}
    for a in range(1, p):
        if gcd(a, p) != 1:
            continue
        for eps in (1, -1):
            ok_any = False
            for s in (1, -1):
                ok = True
                for k in range(p):
                    for l in range(p):
                        nt1, t1 = config_cs_values(L, k, l)
                        nt2, t2 = config_cs_values(M, a * k, s * a * l)
                        if nt2 != mod1(eps * nt1) or t2 != mod1(s * a * a * t1):
                            ok = False
                            break
                    if not ok:
                        break
                ok_any = ok_any or ok
            c = EquivalenceCandidate(p, eps, a)
            out[c] = (ok_any, c in congruent)
    return out


def cs_adds_constraints(p: int, q: int, q2: int) -> bool:
    """True when the cs-value test and the congruence disagree on some (ε, a)."""
    return any(cs != cong for cs, cong in cs_intertwining_experiment(p, q, q2).values())


# ------------------------------------------------------------ 𝔽₂(ζ_p)


class CyclotomicF2:
    """𝔽₂[t]/(1 + t + ⋯ + t^{p−1}); elements are bitmasks of degree < p − 1."""

    __slots__ = ("p", "bits")

    def __init__(self, p: int, bits: int = 0):
        if p < 3 or p % 2 == 0:
            raise LensError("𝔽₂(ζ_p) needs an odd p ≥ 3")
        self.p = p
        self.bits = self._normalize(p, bits)

    @staticmethod
    def _normalize(p: int, bits: int) -> int:
        full = (1 << p) - 1
        # t^p = 1
        while bits >> p:
            bits = (bits & full) ^ (bits >> p)
        if bits >> (p - 1) & 1:
            bits ^= full
        return bits

    @classmethod
    def t(cls, p: int, n: int = 1) -> "CyclotomicF2":
        return cls(p, 1 << (n % p))

    @classmethod
    def one(cls, p: int) -> "CyclotomicF2":
        return cls(p, 1)

    @classmethod
    def from_exponents(cls, p: int, exps: Iterable[int]) -> "CyclotomicF2":
        bits = 0
        for e in exps:
            bits ^= 1 << (e % p)
        return cls(p, bits)

    @classmethod
    def parse(cls, p: int, text: str) -> "CyclotomicF2":
        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls(p, 0)
        exps = []
        for term in text.split("+"):
            if term == "1":
                exps.append(0)
            elif term == "t":
                exps.append(1)
            elif term.startswith("t^"):
                exps.append(int(term[2:]))
            else:
                raise LensError(f"cannot parse term {term!r}")
        return cls.from_exponents(p, exps)

    def _check(self, o):
        if not isinstance(o, CyclotomicF2) or o.p != self.p:
            raise LensError("mixing different cyclotomic rings")

    def __add__(self, o):
        self._check(o)
        return CyclotomicF2(self.p, self.bits ^ o.bits)

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, o):
        self._check(o)
        acc, a, b = 0, self.bits, o.bits
        i = 0
        while b:
            if b & 1:
                acc ^= a << i
            b >>= 1
            i += 1
        return CyclotomicF2(self.p, acc)

    def __pow__(self, n: int):
        out = CyclotomicF2.one(self.p)
        for _ in range(n):
            out = out * self
        return out

    def dilate(self, a: int) -> "CyclotomicF2":
        """The ring map t ↦ t^a."""
        return CyclotomicF2.from_exponents(self.p, [a * i for i in range(self.p) if self.bits >> i & 1])

    def is_zero(self) -> bool:
        return self.bits == 0

    def degree(self) -> int:
        return self.bits.bit_length() - 1

    def __eq__(self, o):
        return isinstance(o, CyclotomicF2) and o.p == self.p and o.bits == self.bits

    def __hash__(self):
        return hash((self.p, self.bits))

    def __repr__(self):
        return f"CyclotomicF2({self.p}, {self})"

    def __str__(self):
        terms = []
        for i in range(self.p):
            if self.bits >> i & 1:
                terms.append("1" if i == 0 else "t" if i == 1 else f"t^{i}")
        return " + ".join(terms) or "0"


def f2_cyclotomic_ops(p: int):
    """(add, mul, normalize) on bitmask representatives."""
    CyclotomicF2(p)  # validates p

    def add(a: int, b: int) -> int:
        return CyclotomicF2(p, a ^ b).bits

    def mul(a: int, b: int) -> int:
        return (CyclotomicF2(p, a) * CyclotomicF2(p, b)).bits

    def normalize(a: int) -> int:
        return CyclotomicF2(p, a).bits

    return add, mul, normalize


# ------------------------------------------------------------------ Massey


class MasseyTable:
    """Base values ⟨t^k, t^ℓ, t^j⟩ with one exponent zero, for one (p, q)."""

    def __init__(self, p: int, q: int, entries: Mapping[tuple, Iterable[CyclotomicF2]] | None = None):
        self.p, self.q = p, q
        self.base: dict = {}
        for key, vals in (entries or {}).items():
            self.add(key, vals)

    def add(self, key: tuple, values: Iterable[CyclotomicF2]):
        k, l, j = (x % self.p for x in key)
        if 0 not in (k, l, j):
            raise LensError("base entries need an exponent equal to zero")
        canon, shift = canonical_triple(self.p, (k, l, j))
        vals = frozenset(v * CyclotomicF2.t(self.p, -shift) for v in values)
        old = self.base.get(canon)
        if old is not None and old != vals:
            raise LensError(f"inconsistent base entries for ⟨{canon}⟩")
        self.base[canon] = vals

    def __len__(self):
        return len(self.base)


def canonical_triple(p: int, key: tuple) -> tuple[tuple, int]:
    """Lexicographically least orbit element with a zero entry, and the shift m
    with key = canon + m (componentwise, mod p)."""
    k, l, j = (x % p for x in key)
    best = None
    for m in (k, l, j):
        for trip in (((k - m) % p, (l - m) % p, (j - m) % p),):
            for cand in (trip, trip[::-1]):
                if best is None or cand < best[0]:
                    best = (cand, m)
    return best


@dataclass
class MasseyResult:
    query: tuple
    base: tuple
    shift: int
    values: frozenset | None

    @property
    def missing(self) -> bool:
        return self.values is None

    def __str__(self):
        if self.values is None:
            return f"⟨{self.query}⟩: base case {self.base} missing"
        return f"⟨{self.query}⟩ = t^{self.shift}·⟨{self.base}⟩ = {{{', '.join(sorted(map(str, self.values)))}}}"


def massey_reduce(k: int, l: int, j: int, table: MasseyTable) -> MasseyResult:
    p = table.p
    canon, shift = canonical_triple(p, (k, l, j))
    base = table.base.get(canon)
    vals = None if base is None else frozenset(v * CyclotomicF2.t(p, shift) for v in base)
    return MasseyResult((k % p, l % p, j % p), canon, shift, vals)


def parse_massey_tables(text: str) -> dict:
    """Sections "[p q]" followed by lines "k ℓ j : poly, poly"."""
    tables: dict = {}
    cur = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            try:
                p, q = (int(x) for x in line.strip("[]").split())
            except ValueError:
                raise LensError(f"line {lineno}: bad section header {raw!r}") from None
            cur = tables.setdefault((p, q), MasseyTable(p, q))
            continue
        if cur is None:
            raise LensError(f"line {lineno}: entry before any [p q] header")
        lhs, sep, rhs = line.partition(":")
        if not sep:
            raise LensError(f"line {lineno}: expected 'k l j : values'")
        try:
            key = tuple(int(x) for x in lhs.split())
        except ValueError:
            raise LensError(f"line {lineno}: bad exponents {lhs!r}") from None
        if len(key) != 3:
            raise LensError(f"line {lineno}: need three exponents")
        vals = [CyclotomicF2.parse(cur.p, v) for v in rhs.split(",") if v.strip()]
        cur.add(key, vals)
    return tables


def format_massey_table(t: MasseyTable) -> str:
    lines = [f"[{t.p} {t.q}]"]
    for key in sorted(t.base):
        lines.append(f"{key[0]} {key[1]} {key[2]} : " + ", ".join(sorted(str(v) for v in t.base[key])))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ τ-action


def _f2_rank_rows(rows: list[int]) -> int:
    piv: dict = {}
    r = 0
    for row in rows:
        while row:
            h = row.bit_length() - 1
            if h in piv:
                row ^= piv[h]
            else:
                piv[h] = row
                r += 1
                break
    return r


def _shift_matrix(p: int, s: int) -> list[int]:
    """Columns of a_i ↦ a_{i+s} on the basis a₁…a_{p−1} (a₀ = a₁ + ⋯ + a_{p−1} mod 2)."""
    cols = []
    allmask = (1 << (p - 1)) - 1
    for i in range(1, p):
        tgt = (i + s) % p
        cols.append(allmask if tgt == 0 else 1 << (tgt - 1))
    return cols


def _apply(cols: list[int], v: int) -> int:
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= cols[i]
        v >>= 1
        i += 1
    return out


def _compose(a: list[int], b: list[int]) -> list[int]:
    return [_apply(a, c) for c in b]


def dilation_matrix(p: int, alpha: int) -> list[int]:
    cols = []
    allmask = (1 << (p - 1)) - 1
    for i in range(1, p):
        tgt = alpha * i % p
        cols.append(allmask if tgt == 0 else 1 << (tgt - 1))
    return cols


@dataclass
class TauVerdict:
    alpha: int
    passed: bool
    intertwiner: list | None
    solution_dim: int

    def __bool__(self):
        return self.passed


def tau_intertwine_check(candidate: EquivalenceCandidate | int, p: int) -> TauVerdict:
    """Some invertible M on H² with M∘τ_{k,ℓ} = τ_{αk,αℓ}∘M for all (k, ℓ), over 𝔽₂.

    τ_{k,ℓ} is the index shift by k − ℓ, so it suffices to intertwine the unit
    shift with the shift by α.  The full solution space is computed by
    elimination; the dilation a_i ↦ a_{αi} is offered and verified as witness.
    """
    alpha = candidate.a if isinstance(candidate, EquivalenceCandidate) else int(candidate)
    if gcd(alpha, p) != 1:
        raise LensError(f"α = {alpha} is not a unit mod {p}")
    n = p - 1
    S1 = _shift_matrix(p, 1)
    Sa = _shift_matrix(p, alpha)
    # unknown M as n×n bits, variable index col*n + row; equations (M S1 − Sa M) e_c = 0
    eqs = []
    for c in range(n):
        s1c = S1[c]
        for row in range(n):
            v = 0
            # (M S1)_{row,c} = Σ_j M_{row,j} (S1)_{j,c}
            for j in range(n):
                if s1c >> j & 1:
                    v ^= 1 << (j * n + row)
            # (Sa M)_{row,c} = Σ_j (Sa)_{row,j} M_{j,c}
            for j in range(n):
                if Sa[j] >> row & 1:
                    v ^= 1 << (c * n + j)
            if v:
                eqs.append(v)
    dim = n * n - _f2_rank_rows(eqs)
    D = dilation_matrix(p, alpha)
    ok = all(_compose(D, _shift_matrix(p, s)) == _compose(_shift_matrix(p, alpha * s % p), D) for s in range(p))
    ok = ok and _f2_rank_rows(list(D)) == n
    return TauVerdict(alpha, ok and dim > 0, D if ok else None, dim)


# ------------------------------------------------------------ pipeline


@dataclass
class StageResult:
    name: str
    kept: list
    dropped: list = field(default_factory=list)
    notes: list = field(default_factory=list)


@dataclass
class PipelineReport:
    p: int
    q: int
    q2: int
    stages: list

    @property
    def candidates(self) -> list:
        return self.stages[-1].kept if self.stages else []

    @property
    def verdict(self) -> str:
        if not self.candidates:
            return "not homotopy equivalent"
        if any(s.notes for s in self.stages):
            return "undecided (missing data)"
        return "candidates remain"

    def __str__(self):
        lines = [f"Conf₂ L({self.p},{self.q}) vs Conf₂ L({self.p},{self.q2})"]
        for s in self.stages:
            kept = ", ".join(str(c) for c in s.kept) or "none"
            lines.append(f"  {s.name}: {kept}")
            for n in s.notes:
                lines.append(f"    {n}")
        lines.append(f"  verdict: {self.verdict}")
        return "\n".join(lines)


def massey_intertwines(c: EquivalenceCandidate, table_q: MasseyTable, table_q2: MasseyTable):
    """For each base entry of the q′ table: dilate_a ⟨…⟩′ = ⟨t^{ak}, t^{aℓ}, t^{aj}⟩.

    Returns (ok, missing queries)."""
    p, a = c.p, c.a
    missing = []
    for (k, l, j), vals in sorted(table_q2.base.items()):
        lhs = frozenset(v.dilate(a) for v in vals)
        rhs = massey_reduce(a * k, a * l, a * j, table_q)
        if rhs.missing:
            missing.append(rhs.query)
            continue
        if lhs != rhs.values:
            return False, missing
    return True, missing


def configuration_pipeline(p: int, q: int, q2: int, massey_tables: Mapping | None = None,
                           stages: Sequence[str] = ("congruence", "tau", "massey")) -> PipelineReport:
    cands = sorted(candidate_equivalences(p, q, q2), key=lambda c: (c.eps, c.a))
    out = [StageResult("congruence εq′ ≡ qa²", list(cands))]
    if "tau" in stages:
        kept, dropped = [], []
        for c in cands:
            (kept if tau_intertwine_check(c, p) else dropped).append(c)
        out.append(StageResult("τ-intertwining", kept, dropped))
        cands = kept
    if "massey" in stages:
        tq = (massey_tables or {}).get((p, q))
        tq2 = (massey_tables or {}).get((p, q2))
        stage = StageResult("Massey", [])
        if tq is None or tq2 is None:
            stage.kept = list(cands)
            stage.notes.append("Massey base table not supplied; stage skipped")
        else:
            for c in cands:
                ok, missing = massey_intertwines(c, tq, tq2)
                if not ok:
                    stage.dropped.append(c)
                    continue
                stage.kept.append(c)
                if missing:
                    stage.notes.append(f"{c}: base cases missing for {sorted(set(missing))}")
        out.append(stage)
    return PipelineReport(p, q, q2, out)
