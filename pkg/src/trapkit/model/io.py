"""Readers and writers for the line-oriented network formats.

=========  ===========================================================
``.bn``    ``NAME, EXPR`` per component; optional ``unate: NAME: +-+``
``.tt``    ``INDEX: k=K p=I1,...,IK t=BITS``
``.bdd``   ``INDEX { ID var=J lo=T hi=T ... root=ID }``
``.d01``   ``INDEX.0: CLAUSES`` and ``INDEX.1: CLAUSES``
``.fg``    ``XBITS -> YBITS``, one line per configuration
=========  ===========================================================

All formats accept ``#`` comments and blank lines.
"""
from __future__ import annotations

import re
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import ParseError, TrapkitError, ValidationError
from .types import (
    And,
    Bdd,
    BooleanNetwork,
    Const,
    Dnf,
    Dnf01,
    Expr,
    Formula,
    FunctionalGraph,
    LocalFunction,
    Not,
    Or,
    TtLocal,
    Var,
)

FORMATS = ("formula", "tt", "bdd", "dnf01", "fg")
EXTENSIONS = {".bn": "formula", ".tt": "tt", ".bdd": "bdd", ".d01": "dnf01", ".fg": "fg"}

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line.strip():
            yield lineno, line


# ------------------------------------------------------------- expressions

_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_.]*)|(?P<const>[01])(?![A-Za-z0-9_])|(?P<op>[!&|()]))")


class ExprParser:
    """Recursive descent over ``expr := term ('|' term)*``,
    ``term := factor ('&' factor)*``,
    ``factor := '!' factor | '(' expr ')' | NAME | '0' | '1'``.
    """

    def __init__(self, text: str, resolve: Callable[[str], int], line: int = 1, offset: int = 0):
        self.text = text
        self.resolve = resolve
        self.line = line
        self.offset = offset
        self.tokens = self._tokenize()
        self.pos = 0

    def _error(self, message, col):
        raise ParseError(message, self.line, col + self.offset + 1)

    def _tokenize(self):
        tokens = []
        i = 0
        text = self.text
        while True:
            while i < len(text) and text[i].isspace():
                i += 1
            if i >= len(text):
                break
            m = _TOKEN_RE.match(text, i)
            if not m or m.end() == i:
                self._error(f"unexpected character {text[i]!r}", i)
            kind = m.lastgroup
            tokens.append((kind, m.group(kind), m.start(kind)))
            i = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def _peek(self):
        return self.tokens[self.pos]

    def _next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        e = self._expr()
        kind, value, col = self._peek()
        if kind != "end":
            self._error(f"unexpected {value!r}", col)
        return e

    def _expr(self):
        args = [self._term()]
        while self._peek()[1] == "|" and self._peek()[0] == "op":
            self._next()
            args.append(self._term())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def _term(self):
        args = [self._factor()]
        while self._peek()[1] == "&" and self._peek()[0] == "op":
            self._next()
            args.append(self._factor())
        return args[0] if len(args) == 1 else And(tuple(args))

    def _factor(self):
        kind, value, col = self._next()
        if kind == "op" and value == "!":
            return Not(self._factor())
        if kind == "op" and value == "(":
            e = self._expr()
            kind, value, col2 = self._next()
            if value != ")":
                self._error("expected ')'" if kind != "end" else "unclosed '('", col2 if kind != "end" else col)
            return e
        if kind == "const":
            return Const(int(value))
        if kind == "name":
            try:
                return Var(self.resolve(value))
            except KeyError:
                self._error(f"unknown component {value!r}", col)
        if kind == "end":
            self._error("unexpected end of expression", col)
        self._error(f"unexpected {value!r}", col)


def parse_expr(text: str, resolve: Callable[[str], int], line: int = 1, offset: int = 0) -> Expr:
    return ExprParser(text, resolve, line, offset).parse()


def format_expr(e: Expr, names) -> str:
    """Render with the minimum parentheses for ``! > & > |`` precedence."""

    def go(node, ctx):
        if isinstance(node, Var):
            return names[node.index - 1]
        if isinstance(node, Const):
            return str(int(node.value))
        if isinstance(node, Not):
            return "!" + go(node.arg, 3)
        if isinstance(node, And):
            s = " & ".join(go(a, 2) for a in node.args)
            return f"({s})" if ctx > 2 else s
        if isinstance(node, Or):
            s = " | ".join(go(a, 1) for a in node.args)
            return f"({s})" if ctx > 1 else s
        raise TypeError(node)

    return go(e, 0)


# ------------------------------------------------------------- .bn reader


def _parse_formula_network(text: str, seed: int) -> BooleanNetwork:
    comps = []  # (lineno, name, expr text, col offset)
    unate = []  # (lineno, name, signs)
    for lineno, line in _lines(text):
        stripped = line.strip()
        if stripped.startswith("unate:"):
            rest = stripped[len("unate:"):]
            name, sep, signs = rest.partition(":")
            if not sep:
                raise ParseError("expected 'unate: NAME: SIGNS'", lineno, 1)
            unate.append((lineno, name.strip(), signs.strip()))
            continue
        if unate:
            raise ParseError("component lines must precede unate annotations", lineno, 1)
        name, sep, expr = line.partition(",")
        if not sep:
            raise ParseError("expected 'NAME, EXPR'", lineno, len(line.rstrip()) + 1)
        name = name.strip()
        if not NAME_RE.fullmatch(name):
            raise ParseError(f"invalid component name {name!r}", lineno, 1)
        if name.lower() == "targets" and expr.strip().lower() == "factors" and not comps:
            continue  # BoolNet header
        comps.append((lineno, name, expr, len(name) + line.index(name) + 1))
    if not comps:
        raise ParseError("empty network")
    index = {}
    for lineno, name, _, _ in comps:
        if name in index:
            raise ParseError(f"component {name!r} defined twice", lineno, 1)
        index[name] = len(index) + 1
    n = len(comps)
    orderings: dict[str, str] = {}
    for lineno, name, signs in unate:
        if name not in index:
            raise ParseError(f"unate annotation for unknown component {name!r}", lineno)
        if len(signs) != n or set(signs) - {"+", "-"}:
            raise ParseError(f"unate ordering needs {n} characters over '+'/'-'", lineno)
        orderings[name] = signs
    locals_ = []
    for lineno, name, expr, offset in comps:
        e = parse_expr(expr, index.__getitem__, lineno, offset)
        locals_.append(Formula(e, orderings.get(name)))
    return _network(locals_, [c[1] for c in comps], seed)


def _network(locals_, names, seed):
    try:
        return BooleanNetwork(tuple(locals_), tuple(names) if names else None, seed=seed)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc


def _component_index(token, lineno, col, seen):
    if not token.isdigit() or int(token) < 1:
        raise ParseError(f"expected a component index, got {token!r}", lineno, col)
    i = int(token)
    if i in seen:
        raise ParseError(f"component {i} defined twice", lineno, col)
    return i


def _collect(defs, kind):
    if not defs:
        raise ParseError("empty network")
    n = max(defs)
    missing = sorted(set(range(1, n + 1)) - set(defs))
    if missing:
        raise ParseError(f"no {kind} definition for component(s) {missing}")
    return [defs[i] for i in range(1, n + 1)]


# ------------------------------------------------------------- .tt reader

_TT_RE = re.compile(r"\s*(\S+?)\s*:\s*k\s*=\s*(\S*)\s+p\s*=\s*(\S*)\s+t\s*=\s*(\S*)\s*$")


def _parse_tt_network(text: str, seed: int) -> BooleanNetwork:
    defs = {}
    for lineno, line in _lines(text):
        m = _TT_RE.match(line)
        if not m:
            raise ParseError("expected 'INDEX: k=K p=I1,...,IK t=BITS'", lineno, 1)
        i = _component_index(m.group(1), lineno, m.start(1) + 1, defs)
        if not m.group(2).isdigit():
            raise ParseError(f"invalid arity {m.group(2)!r}", lineno, m.start(2) + 1)
        k = int(m.group(2))
        p = [s for s in m.group(3).split(",") if s] if m.group(3) else []
        if any(not s.isdigit() for s in p):
            raise ParseError(f"invalid index map {m.group(3)!r}", lineno, m.start(3) + 1)
        if len(p) != k:
            raise ParseError(f"index map has {len(p)} entries, k={k}", lineno, m.start(3) + 1)
        t = m.group(4)
        if len(t) != 1 << k or set(t) - {"0", "1"}:
            raise ParseError(f"truth table must have {1 << k} bits", lineno, m.start(4) + 1)
        try:
            defs[i] = TtLocal(tuple(int(s) for s in p), t)
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from exc
    return _network(_collect(defs, "truth-table"), None, seed)


# ------------------------------------------------------------ .bdd reader

_BDD_TOKEN = re.compile(r"\{|\}|[^\s{}]+")


def _parse_bdd_network(text: str, seed: int) -> BooleanNetwork:
    tokens = []
    for lineno, line in _lines(text):
        for m in _BDD_TOKEN.finditer(line):
            tokens.append((m.group(), lineno, m.start() + 1))
    defs = {}
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(tokens):
            last = tokens[-1] if tokens else ("", None, None)
            raise ParseError("unexpected end of input", last[1], last[2])
        tok = tokens[pos]
        pos += 1
        return tok

    def keyval(key):
        tok, lineno, col = take()
        k, sep, v = tok.partition("=")
        if k != key or not sep or not v:
            raise ParseError(f"expected '{key}=...', got {tok!r}", lineno, col)
        return v, lineno, col

    while pos < len(tokens):
        tok, lineno, col = take()
        comp = _component_index(tok, lineno, col, defs)
        tok, lineno, col = take()
        if tok != "{":
            raise ParseError("expected '{'", lineno, col)
        raw = []  # (id, var, lo, hi, lineno, col)
        root = None
        while True:
            tok, lineno, col = take()
            if tok == "}":
                break
            if tok.startswith("root="):
                root = (tok[5:], lineno, col)
                continue
            if "=" in tok:
                raise ParseError(f"expected a node id, got {tok!r}", lineno, col)
            var, vl, vc = keyval("var")
            lo, _, _ = keyval("lo")
            hi, _, _ = keyval("hi")
            if not var.isdigit():
                raise ParseError(f"invalid variable {var!r}", vl, vc)
            raw.append((tok, int(var), lo, hi, lineno, col))
        if root is None:
            raise ParseError(f"BDD of component {comp} has no root", lineno, col)
        ids = {"T0": 0, "T1": 1}
        for node_id, *_rest, nl, nc in raw:
            if node_id in ids:
                raise ParseError(f"duplicate node id {node_id!r}", nl, nc)
            ids[node_id] = len(ids)
        nodes = [(0, 0, 0), (0, 1, 1)]
        for node_id, var, lo, hi, nl, nc in raw:
            for target in (lo, hi):
                if target not in ids:
                    raise ParseError(f"unknown node {target!r}", nl, nc)
            nodes.append((var, ids[lo], ids[hi]))
        if root[0] not in ids:
            raise ParseError(f"unknown root node {root[0]!r}", root[1], root[2])
        defs[comp] = Bdd(tuple(nodes), ids[root[0]])
    return _network(_collect(defs, "BDD"), None, seed)


# ------------------------------------------------------------ .d01 reader

_D01_RE = re.compile(r"\s*(\S+?)\.([01])\s*:(.*)$")


def parse_clauses(text: str, lineno: int = 1) -> tuple:
    text = text.strip()
    if text == "TRUE":
        return ((),)
    if text == "FALSE" or not text:
        return ()
    clauses = []
    for chunk in text.split(";"):
        lits = []
        for tok in chunk.split(","):
            tok = tok.strip()
            pol = not tok.startswith("!")
            body = tok.lstrip("!").strip()
            if not body.isdigit() or int(body) < 1 or tok.count("!") > 1:
                raise ParseError(f"invalid literal {tok!r}", lineno)
            lits.append((int(body), pol))
        clauses.append(tuple(lits))
    return tuple(clauses)


def format_clauses(d: Dnf) -> str:
    if not d.clauses:
        return "FALSE"
    if d.clauses == ((),):
        return "TRUE"
    if any(not c for c in d.clauses):
        # an empty clause among others still makes the whole DNF true
        return "TRUE"
    return "; ".join(",".join(("" if pol else "!") + str(v) for v, pol in c) for c in d.clauses)


def _parse_d01_network(text: str, seed: int) -> BooleanNetwork:
    halves: dict[int, dict[int, Dnf]] = {}
    for lineno, line in _lines(text):
        m = _D01_RE.match(line)
        if not m:
            raise ParseError("expected 'INDEX.0: CLAUSES' or 'INDEX.1: CLAUSES'", lineno, 1)
        tok = m.group(1)
        if not tok.isdigit() or int(tok) < 1:
            raise ParseError(f"expected a component index, got {tok!r}", lineno, m.start(1) + 1)
        i, b = int(tok), int(m.group(2))
        part = halves.setdefault(i, {})
        if b in part:
            raise ParseError(f"component {i}.{b} defined twice", lineno, 1)
        part[b] = Dnf(parse_clauses(m.group(3), lineno))
    defs = {}
    for i, part in halves.items():
        if set(part) != {0, 1}:
            raise ParseError(f"component {i} needs both {i}.0 and {i}.1 lines")
        defs[i] = Dnf01(part[0], part[1])
    return _network(_collect(defs, "double-DNF"), None, seed)


# ------------------------------------------------------------- .fg reader

_FG_RE = re.compile(r"\s*([01]+)\s*->\s*([01]+)\s*$")


def _parse_fg(text: str) -> FunctionalGraph:
    succ = None
    n = None
    for lineno, line in _lines(text):
        m = _FG_RE.match(line)
        if not m:
            raise ParseError("expected 'XBITS -> YBITS'", lineno, 1)
        x, y = m.group(1), m.group(2)
        if n is None:
            n = len(x)
            if n > 24:
                raise ParseError(f"functional graph of dimension {n} exceeds the 24 guard", lineno)
            succ = np.full(1 << n, -1, dtype=np.int64)
        if len(x) != n or len(y) != n:
            raise ParseError(f"configurations must have length {n}", lineno, 1)
        r = int(x, 2)
        if succ[r] >= 0:
            raise ParseError(f"configuration {x} listed twice", lineno, 1)
        succ[r] = int(y, 2)
    if n is None:
        raise ParseError("empty network")
    if (succ < 0).any():
        missing = int(np.argmin(succ >= 0))
        raise ParseError(f"no successor for {format(missing, f'0{n}b')}")
    return FunctionalGraph(n, succ)


def parse_network(text: str, format: str, seed: int = 0):
    """Parse ``text`` in one of :data:`FORMATS`; returns a network or graph."""
    if format == "formula":
        return _parse_formula_network(text, seed)
    if format == "tt":
        return _parse_tt_network(text, seed)
    if format == "bdd":
        return _parse_bdd_network(text, seed)
    if format == "dnf01":
        return _parse_d01_network(text, seed)
    if format == "fg":
        return _parse_fg(text)
    raise TrapkitError(f"unknown format {format!r}; expected one of {FORMATS}")


def format_for_path(path) -> str:
    ext = Path(path).suffix
    if ext not in EXTENSIONS:
        raise TrapkitError(f"cannot infer format from extension {ext!r}; use --format")
    return EXTENSIONS[ext]


def load(path, format: str | None = None, seed: int = 0):
    path = Path(path)
    return parse_network(path.read_text(encoding="utf-8"), format or format_for_path(path), seed)


# ----------------------------------------------------------------- writers


def _formula_of(fn: LocalFunction) -> Expr:
    if isinstance(fn, Formula):
        return fn.expr
    if isinstance(fn, Dnf):
        return fn.to_expr()
    raise TypeError(fn)


def serialize(net, fmt: str) -> str:
    """Render a network (converting locals as needed) or a functional graph."""
    from .convert import convert, convert_local

    if fmt == "fg":
        if not isinstance(net, FunctionalGraph):
            from ..funcgraph import build_functional_graph

            net = build_functional_graph(net)
        n = net.n
        return "".join(
            f"{format(r, f'0{n}b')} -> {format(int(s), f'0{n}b')}\n" for r, s in enumerate(net.succ)
        )
    if isinstance(net, FunctionalGraph):
        raise TrapkitError("a functional graph can only be written as 'fg'")
    if fmt == "formula":
        names = net.component_names()
        lines = []
        for name, fn in zip(names, net.locals):
            if not isinstance(fn, (Formula, Dnf)):
                fn = convert_local(fn, "formula", net.n)
            lines.append(f"{name}, {format_expr(_formula_of(fn), names)}")
        for name, fn in zip(names, net.locals):
            if fn.ordering is not None:
                lines.append(f"unate: {name}: {fn.ordering}")
        return "\n".join(lines) + "\n"
    converted = convert(net, fmt)
    out = []
    if fmt == "tt":
        for i, fn in enumerate(converted.locals, start=1):
            out.append(f"{i}: k={fn.k} p={','.join(map(str, fn.p))} t={fn.t}")
    elif fmt == "bdd":
        for i, fn in enumerate(converted.locals, start=1):
            ref = lambda m: "T0" if m == 0 else "T1" if m == 1 else f"n{m}"
            body = [f"  n{m} var={v} lo={ref(lo)} hi={ref(hi)}" for m, (v, lo, hi) in enumerate(fn.nodes) if m >= 2]
            out.append(f"{i} {{")
            out.extend(body)
            out.append(f"  root={ref(fn.root)}")
            out.append("}")
    elif fmt == "dnf01":
        for i, fn in enumerate(converted.locals, start=1):
            out.append(f"{i}.0: {format_clauses(fn.phi0)}")
            out.append(f"{i}.1: {format_clauses(fn.phi1)}")
    else:
        raise TrapkitError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return "\n".join(out) + "\n"


def dump(net, path, fmt: str | None = None) -> None:
    path = Path(path)
    path.write_text(serialize(net, fmt or format_for_path(path)), encoding="utf-8")
