"""Line-oriented model files (JSON accepted as the same schema) and the fixture directory.

Every file starts with ``kind <name>`` and ``version 1``.  Kinds:

chart-model
    name, vertices, coords, ``simplex`` (maximal simplices), ``transition a b : A | c``
    with matrix rows separated by ``/``, ``cycle`` entries, fiber, good, notes.
dga
    ``generator name degree``, ``d name = expr``, top, volume, optional
    ``connection tag`` followed by ``row e1 | e2 | …`` lines.
lie-algebra
    basis, tag, ``bracket x y : c z, …``, ``form x y : c``.
massey-table
    ``[p q]`` sections of ``k l j : poly, poly`` lines.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .cech_deligne import MODELS, ChartModel, ModelError, Nerve
from .gca import FiniteDGA
from .invariant_forms import MatrixForm, so3_connection, so3_dga, torus_dga
from .lens_cs import MasseyTable, format_massey_table, parse_massey_tables
from .sugawara import FiniteLieAlgebra, builtin_algebra

FIXTURE_ENV = "DIFFCOH_FIXTURES"
VERSION = 1


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("diffcoh") / "fixtures"))


# ------------------------------------------------------------ generic framing


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def _header(text: str) -> tuple[str, list]:
    kind = version = None
    kind_at = version_at = None
    body = []
    for n, line in _lines(text):
        key, _, rest = line.partition(" ")
        if key == "kind" and kind is None:
            kind, kind_at = rest.strip(), n
        elif key == "version" and version is None:
            version_at = n
            try:
                version = int(rest)
            except ValueError:
                raise ParseError(f"bad version {rest!r}", n) from None
        else:
            body.append((n, line))
    if kind is None:
        raise ParseError("missing 'kind' header", body[0][0] if body else 1)
    if version is None:
        raise ParseError("missing 'version' header", kind_at)
    if version != VERSION:
        raise ParseError(f"unsupported version {version}", version_at)
    return kind, body


def _frac(s: str, n: int) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {s!r}", n) from None


def _int(s: str, n: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"not an integer: {s!r}", n) from None


# ------------------------------------------------------------ chart models


def _maximal(nerve: Nerve) -> list:
    simp = set(nerve.simplices)
    return sorted((s for s in simp if not any(set(s) < set(t) for t in simp)), key=lambda t: (len(t), t))


def chart_model_to_dict(m: ChartModel) -> dict:
    return {
        "kind": "chart-model",
        "version": VERSION,
        "name": m.name,
        "vertices": m.nerve.nvert,
        "coords": list(m.coords),
        "simplices": [list(s) for s in _maximal(m.nerve)],
        "transitions": [
            {"edge": list(e), "A": [[str(x) for x in row] for row in A], "c": [str(x) for x in c]}
            for e, (A, c) in sorted(m.transitions.items()) if m.coords
        ],
        "cycle": [{"simplex": list(s), "coeff": v} for s, v in sorted((m.cycle or {}).items())],
        "fiber": m.fiber,
        "good": m.good,
        "notes": m.notes,
    }


def chart_model_from_dict(d: dict) -> ChartModel:
    try:
        nerve = Nerve.from_maximal(int(d["vertices"]), [tuple(s) for s in d["simplices"]])
        tr = {tuple(t["edge"]): ([[Fraction(x) for x in row] for row in t["A"]], [Fraction(x) for x in t["c"]])
              for t in d.get("transitions", [])}
        cycle = {tuple(c["simplex"]): int(c["coeff"]) for c in d.get("cycle", [])} or None
        return ChartModel(d["name"], nerve, tuple(d.get("coords", [])), tr, cycle=cycle,
                          fiber=d.get("fiber"), good=bool(d.get("good", True)), notes=d.get("notes", ""))
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed chart model: {e}") from None


def emit_chart_model(m: ChartModel) -> str:
    d = chart_model_to_dict(m)
    out = ["kind chart-model", f"version {VERSION}", f"name {m.name}", f"vertices {m.nerve.nvert}"]
    if m.coords:
        out.append("coords " + " ".join(m.coords))
    for s in d["simplices"]:
        out.append("simplex " + " ".join(map(str, s)))
    for t in d["transitions"]:
        A = " / ".join(" ".join(row) for row in t["A"])
        out.append(f"transition {t['edge'][0]} {t['edge'][1]} : {A} | {' '.join(t['c'])}")
    for c in d["cycle"]:
        out.append("cycle " + " ".join(map(str, c["simplex"])) + f" : {c['coeff']}")
    if m.fiber:
        out.append(f"fiber {m.fiber}")
    out.append(f"good {'yes' if m.good else 'no'}")
    if m.notes:
        out.append(f"notes {m.notes}")
    return "\n".join(out) + "\n"


def parse_chart_model(body: list) -> ChartModel:
    d: dict = {"simplices": [], "transitions": [], "cycle": [], "coords": [], "good": True, "notes": ""}
    for n, line in body:
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "name":
            d["name"] = rest
        elif key == "vertices":
            d["vertices"] = _int(rest, n)
        elif key == "coords":
            d["coords"] = rest.split()
        elif key == "simplex":
            d["simplices"].append([_int(x, n) for x in rest.split()])
        elif key == "transition":
            lhs, sep, rhs = rest.partition(":")
            A, bar, c = rhs.partition("|")
            edge = [_int(x, n) for x in lhs.split()]
            if not sep or not bar or len(edge) != 2:
                raise ParseError("expected 'transition a b : A | c'", n)
            rows = [[str(_frac(x, n)) for x in r.split()] for r in A.split("/")]
            d["transitions"].append({"edge": edge, "A": rows, "c": [str(_frac(x, n)) for x in c.split()]})
        elif key == "cycle":
            lhs, sep, rhs = rest.partition(":")
            if not sep:
                raise ParseError("expected 'cycle v… : coeff'", n)
            d["cycle"].append({"simplex": [_int(x, n) for x in lhs.split()], "coeff": _int(rhs.strip(), n)})
        elif key == "fiber":
            d["fiber"] = rest
        elif key == "good":
            if rest not in ("yes", "no"):
                raise ParseError("good must be yes or no", n)
            d["good"] = rest == "yes"
        elif key == "notes":
            d["notes"] = rest
        else:
            raise ParseError(f"unknown key {key!r}", n)
    for req in ("name", "vertices"):
        if req not in d:
            raise ParseError(f"missing {req!r}")
    try:
        return chart_model_from_dict(d)
    except ModelError as e:
        raise ParseError(str(e)) from None


# ------------------------------------------------------------ DGAs


@dataclass
class DGAModel:
    alg: FiniteDGA
    connection: MatrixForm | None = None
    name: str = ""

    def __eq__(self, o):
        if not isinstance(o, DGAModel):
            return NotImplemented
        return dga_model_to_dict(self) == dga_model_to_dict(o)


def dga_model_to_dict(m: DGAModel) -> dict:
    a = m.alg
    d = {
        "kind": "dga",
        "version": VERSION,
        "name": m.name,
        "generators": [{"name": n, "degree": k} for n, k in zip(a.names, a.degrees)],
        "differential": {n: str(a.gen(n).d()) for n in a.names if not a.gen(n).d().is_zero()},
        "top": a.top,
        "volume": str(a.volume) if a.volume is not None else None,
    }
    if m.connection is not None:
        d["connection"] = {"tag": m.connection.tag,
                           "rows": [[str(e) for e in row] for row in m.connection.entries]}
    return d


def dga_model_from_dict(d: dict) -> DGAModel:
    try:
        gens = d["generators"]
        alg = FiniteDGA([g["name"] for g in gens], [int(g["degree"]) for g in gens],
                        d.get("differential") or {}, d.get("top"), volume=d.get("volume"))
        conn = None
        if d.get("connection"):
            c = d["connection"]
            conn = MatrixForm(alg, [[alg.parse(e) for e in row] for row in c["rows"]], c.get("tag", "general"))
        return DGAModel(alg, conn, d.get("name", ""))
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed dga: {e}") from None


def emit_dga_model(m: DGAModel) -> str:
    d = dga_model_to_dict(m)
    out = ["kind dga", f"version {VERSION}"]
    if m.name:
        out.append(f"name {m.name}")
    for g in d["generators"]:
        out.append(f"generator {g['name']} {g['degree']}")
    for n, e in d["differential"].items():
        out.append(f"d {n} = {e}")
    if d["top"] is not None:
        out.append(f"top {d['top']}")
    if d["volume"]:
        out.append(f"volume {d['volume']}")
    if "connection" in d:
        out.append(f"connection {d['connection']['tag']}")
        for row in d["connection"]["rows"]:
            out.append("row " + " | ".join(row))
    return "\n".join(out) + "\n"


def parse_dga_model(body: list) -> DGAModel:
    d: dict = {"generators": [], "differential": {}, "top": None, "volume": None, "name": ""}
    rows, tag = [], None
    for n, line in body:
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "name":
            d["name"] = rest
        elif key == "generator":
            parts = rest.split()
            if len(parts) != 2:
                raise ParseError("expected 'generator name degree'", n)
            d["generators"].append({"name": parts[0], "degree": _int(parts[1], n)})
        elif key == "d":
            name, sep, expr = rest.partition("=")
            if not sep:
                raise ParseError("expected 'd name = expr'", n)
            d["differential"][name.strip()] = expr.strip()
        elif key == "top":
            d["top"] = _int(rest, n)
        elif key == "volume":
            d["volume"] = rest
        elif key == "connection":
            tag = rest
        elif key == "row":
            if tag is None:
                raise ParseError("row before 'connection'", n)
            rows.append((n, [e.strip() for e in rest.split("|")]))
        else:
            raise ParseError(f"unknown key {key!r}", n)
    if tag is not None:
        d["connection"] = {"tag": tag, "rows": [r for _, r in rows]}
    try:
        return dga_model_from_dict(d)
    except ParseError:
        raise
    except (ValueError, KeyError) as e:
        raise ParseError(str(e)) from None


def builtin_dga(name: str) -> DGAModel:
    if name == "so3":
        alg = so3_dga()
        return DGAModel(alg, so3_connection(alg), "so3")
    if name == "flat":
        alg = torus_dga(2)
        return DGAModel(alg, MatrixForm(alg, [["e1", "0"], ["0", "e2"]]), "flat")
    raise ParseError(f"unknown builtin dga {name!r}")


# ------------------------------------------------------------ Lie algebras


def lie_to_dict(a: FiniteLieAlgebra) -> dict:
    br = []
    for i in range(a.dim):
        for j in range(i + 1, a.dim):
            out = {a.names[k]: str(v) for k, v in enumerate(a.c[i][j]) if v}
            if out:
                br.append({"x": a.names[i], "y": a.names[j], "out": out})
    form = [{"x": a.names[i], "y": a.names[j], "value": str(a.B[i][j])}
            for i in range(a.dim) for j in range(i, a.dim) if a.B[i][j]]
    return {"kind": "lie-algebra", "version": VERSION, "basis": list(a.names), "tag": a.tag,
            "brackets": br, "form": form}


def lie_from_dict(d: dict) -> FiniteLieAlgebra:
    try:
        names = tuple(d["basis"])
        n = len(names)
        idx = {x: i for i, x in enumerate(names)}
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for b in d.get("brackets", []):
            i, j = idx[b["x"]], idx[b["y"]]
            for z, v in b["out"].items():
                c[i][j][idx[z]] += Fraction(v)
                c[j][i][idx[z]] -= Fraction(v)
        B = [[Fraction(0)] * n for _ in range(n)]
        for f in d.get("form", []):
            i, j = idx[f["x"]], idx[f["y"]]
            B[i][j] = B[j][i] = Fraction(f["value"])
        return FiniteLieAlgebra(names, c, B, d.get("tag", "simple"))
    except KeyError as e:
        raise ParseError(f"unknown basis element or field {e}") from None


def emit_lie(a: FiniteLieAlgebra) -> str:
    d = lie_to_dict(a)
    out = ["kind lie-algebra", f"version {VERSION}", "basis " + " ".join(a.names), f"tag {a.tag}"]
    for b in d["brackets"]:
        out.append(f"bracket {b['x']} {b['y']} : " + ", ".join(f"{v} {z}" for z, v in b["out"].items()))
    for f in d["form"]:
        out.append(f"form {f['x']} {f['y']} : {f['value']}")
    return "\n".join(out) + "\n"


def parse_lie(body: list) -> FiniteLieAlgebra:
    d: dict = {"brackets": [], "form": []}
    for n, line in body:
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "basis":
            d["basis"] = rest.split()
        elif key == "tag":
            d["tag"] = rest
        elif key in ("bracket", "form"):
            lhs, sep, rhs = rest.partition(":")
            xy = lhs.split()
            if not sep or len(xy) != 2:
                raise ParseError(f"expected '{key} x y : …'", n)
            if key == "form":
                d["form"].append({"x": xy[0], "y": xy[1], "value": str(_frac(rhs.strip(), n))})
            else:
                out = {}
                for term in rhs.split(","):
                    parts = term.split()
                    if len(parts) != 2:
                        raise ParseError(f"expected 'coeff name', got {term!r}", n)
                    out[parts[1]] = str(_frac(parts[0], n))
                d["brackets"].append({"x": xy[0], "y": xy[1], "out": out})
        else:
            raise ParseError(f"unknown key {key!r}", n)
    if "basis" not in d:
        raise ParseError("missing 'basis'")
    return lie_from_dict(d)


# ------------------------------------------------------------ Massey tables


def emit_massey(tables: dict) -> str:
    return f"kind massey-table\nversion {VERSION}\n" + "".join(
        format_massey_table(t) for _, t in sorted(tables.items()))


def massey_to_dict(tables: dict) -> dict:
    return {"kind": "massey-table", "version": VERSION, "tables": [
        {"p": t.p, "q": t.q, "entries": [{"key": list(k), "values": sorted(str(v) for v in vals)}
                                         for k, vals in sorted(t.base.items())]}
        for _, t in sorted(tables.items())]}


def massey_from_dict(d: dict) -> dict:
    from .lens_cs import CyclotomicF2

    out = {}
    for t in d.get("tables", []):
        tab = MasseyTable(int(t["p"]), int(t["q"]))
        for e in t["entries"]:
            tab.add(tuple(e["key"]), [CyclotomicF2.parse(tab.p, v) for v in e["values"]])
        out[(tab.p, tab.q)] = tab
    return out


# ------------------------------------------------------------ dispatch


_TEXT = {"chart-model": parse_chart_model, "dga": parse_dga_model, "lie-algebra": parse_lie}
_FROM_DICT = {"chart-model": chart_model_from_dict, "dga": dga_model_from_dict,
              "lie-algebra": lie_from_dict, "massey-table": massey_from_dict}


def loads(text: str):
    """Parse a model file (text or JSON); returns (kind, object)."""
    if text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.lineno) from None
        kind = d.get("kind")
        if kind not in _FROM_DICT:
            raise ParseError(f"unknown kind {kind!r}")
        if d.get("version") != VERSION:
            raise ParseError(f"unsupported version {d.get('version')}")
        return kind, _FROM_DICT[kind](d)
    kind, body = _header(text)
    if kind == "massey-table":
        try:
            return kind, parse_massey_tables("\n".join(line for _, line in body))
        except ValueError as e:
            raise ParseError(str(e)) from None
    if kind not in _TEXT:
        raise ParseError(f"unknown kind {kind!r}")
    return kind, _TEXT[kind](body)


def dumps(obj, fmt: str = "text") -> str:
    if isinstance(obj, ChartModel):
        d, t = chart_model_to_dict, emit_chart_model
    elif isinstance(obj, DGAModel):
        d, t = dga_model_to_dict, emit_dga_model
    elif isinstance(obj, FiniteLieAlgebra):
        d, t = lie_to_dict, emit_lie
    elif isinstance(obj, dict):
        d, t = massey_to_dict, emit_massey
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    if fmt == "json":
        return json.dumps(d(obj), indent=2, ensure_ascii=False) + "\n"
    return t(obj)


def _resolve(name: str, suffixes: tuple) -> Path | None:
    p = Path(name)
    if p.is_file():
        return p
    for suf in suffixes:
        cand = fixture_dir() / f"{name}{suf}"
        if cand.is_file():
            return cand
    return None


def load(name: str, kind: str):
    """Load from a path, a fixture name, or a builtin name."""
    path = _resolve(name, (".model", ".dga", ".lie", ".massey", ".json"))
    if path is None:
        if kind == "chart-model" and name in MODELS:
            return MODELS[name]()
        if kind == "dga":
            return builtin_dga(name)
        if kind == "lie-algebra":
            try:
                return builtin_algebra(name)
            except ValueError as e:
                raise ParseError(str(e)) from None
        raise ParseError(f"no such model: {name}")
    got, obj = loads(path.read_text(encoding="utf-8"))
    if got != kind:
        raise ParseError(f"{path}: expected kind {kind!r}, found {got!r}")
    return obj
