"""Network generators that encode TAUTOLOGY and Pi2 truth as trap-space questions.

Each generator returns a ReductionInstance: the network, the hypercube or
configuration to query, and the equivalence the construction guarantees.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import GuardError, ParseError, ValidationError
from .model.io import _lines, parse_clauses, parse_expr
from .model.semantics import truth_values
from .model.types import (
    BooleanNetwork,
    Configuration,
    Dnf,
    Expr,
    Formula,
    Hypercube,
    LocalFunction,
    Not,
    Var,
    conj,
    disj,
)

BRUTE_GUARD = 20
PROBLEMS = ("TRAPSPACE", "MINTRAP", "IN-MINTRAP")


@dataclass(frozen=True)
class QbfInstance:
    """forall y_1..y_n1 exists y_{n1+1}..y_n2 : matrix(y)."""

    n1: int
    n2: int
    matrix: LocalFunction

    def __post_init__(self):
        if not 0 <= self.n1 <= self.n2:
            raise ValidationError(f"need 0 <= n1 <= n2, got n1={self.n1}, n2={self.n2}")
        if self.n2 < 1:
            raise ValidationError("QBF needs at least one variable")
        if not isinstance(self.matrix, (Formula, Dnf)):
            raise ValidationError("QBF matrix must be a formula or a DNF")
        supp = self.matrix.syntactic_support()
        if supp and max(supp) > self.n2:
            raise ValidationError(f"matrix mentions y{max(supp)} beyond n2={self.n2}")


@dataclass(frozen=True)
class ReductionInstance:
    network: BooleanNetwork
    target_hypercube: Hypercube
    target_configuration: Configuration | None
    expected_problem: str
    source: object
    contract: str = ""
    problems: tuple[str, ...] = field(default=())

    def manifest(self) -> dict:
        return {
            "n": self.network.n,
            "target_hypercube": str(self.target_hypercube),
            "target_configuration": None
            if self.target_configuration is None
            else str(self.target_configuration),
            "expected_problem": self.expected_problem,
            "problems": list(self.problems or (self.expected_problem,)),
            "contract": self.contract,
        }


def _as_function(phi) -> LocalFunction:
    if isinstance(phi, Expr):
        return Formula(phi)
    if isinstance(phi, (Formula, Dnf)):
        return phi
    raise ValidationError(f"expected a formula or DNF, got {type(phi).__name__}")


def _as_expr(phi: LocalFunction) -> Expr:
    return phi.expr if isinstance(phi, Formula) else phi.to_expr()


def _width(phi, n):
    supp = phi.syntactic_support()
    if n is None:
        n = max(supp, default=1)
    if supp and max(supp) > n:
        raise ValidationError(f"formula mentions y{max(supp)} beyond n={n}")
    return n


# ------------------------------------------------------------------ TAUTOLOGY -> TRAPSPACE


def gen_tautology_trapspace(phi, n1: int | None = None) -> ReductionInstance:
    """f_i = not x_i for i <= n1, f_{n1+1} = phi(x_1..x_n1); query *^n1 1.

    TRAPSPACE holds iff phi is a tautology.
    """
    phi = _as_function(phi)
    n1 = _width(phi, n1)
    if n1 < 1:
        raise ValidationError("need at least one formula variable")
    locals_ = [Formula(Not(Var(i))) for i in range(1, n1 + 1)]
    locals_.append(Formula(_as_expr(phi)))
    names = tuple(f"y{i}" for i in range(1, n1 + 1)) + ("a1",)
    net = BooleanNetwork(tuple(locals_), names)
    return ReductionInstance(
        net,
        Hypercube("*" * n1 + "1"),
        None,
        "TRAPSPACE",
        phi,
        "TRAPSPACE(f, h) <=> forall y: phi(y)",
        ("TRAPSPACE",),
    )


# ------------------------------------------------------------------ Pi2 -> MINTRAP


def gen_pi2_mintrap(q: QbfInstance) -> ReductionInstance:
    """Network over n2+2 components whose only trap space is the full cube
    exactly when the QBF is true."""
    n1, n2 = q.n1, q.n2
    a1, a2 = n2 + 1, n2 + 2
    phi = _as_expr(q.matrix)
    locals_ = []
    for j in range(1, n1 + 1):
        locals_.append(Formula(disj([conj([Var(j), Not(Var(a1))]), Var(a2)])))
    for j in range(n1 + 1, n2 + 1):
        locals_.append(Formula(Not(Var(j))))
    locals_.append(Formula(conj([phi, Not(Var(a2))])))
    locals_.append(Formula(conj([Var(a1), Not(Var(a2))])))
    names = tuple(f"y{i}" for i in range(1, n2 + 1)) + ("a1", "a2")
    net = BooleanNetwork(tuple(locals_), names)
    N = n2 + 2
    return ReductionInstance(
        net,
        Hypercube.full(N),
        Configuration("1" * N),
        "MINTRAP",
        q,
        "MINTRAP(f, *^N) <=> IN-MINTRAP(f, 1^N) <=> forall y[1..n1] exists y[n1+1..n2]: phi(y)",
        ("MINTRAP", "IN-MINTRAP"),
    )


# ------------------------------------------------------------------ DNF TAUTOLOGY -> MINTRAP


def _prepare_dnf(phi: Dnf, n):
    if not isinstance(phi, Dnf):
        raise ValidationError("expected a DNF")
    n = _width(phi, n)
    return phi.normalized(), n


def _order(N, signs: dict[int, str]) -> str:
    return "".join(signs.get(i, "+") for i in range(1, N + 1))


def gen_dnf_taut_monotone(phi: Dnf, n: int | None = None) -> ReductionInstance:
    """Locally monotone network over n+k+2 components, orderings attached.

    Contradictory clauses (always false) are dropped first.
    """
    phi, n = _prepare_dnf(phi, n)
    k = len(phi.clauses)
    N = n + k + 2
    a1, a2 = n + k + 1, n + k + 2
    locals_ = []
    for i in range(1, n + 1):
        locals_.append(Dnf((((i, True), (a1, False)), ((a2, True),)), _order(N, {a1: "-"})))
    for c in phi.clauses:
        signs = {v: "+" if pol else "-" for v, pol in c}
        signs[a1] = "-"
        locals_.append(Dnf((tuple(c) + ((a1, False),), ((a2, True),)), _order(N, signs)))
    locals_.append(
        Dnf(tuple(((n + j, True), (a2, False)) for j in range(1, k + 1)), _order(N, {a2: "-"}))
    )
    locals_.append(Dnf((((a1, True), (a2, False)),), _order(N, {a2: "-"})))
    names = (
        tuple(f"y{i}" for i in range(1, n + 1))
        + tuple(f"c{j}" for j in range(1, k + 1))
        + ("a1", "a2")
    )
    net = BooleanNetwork(tuple(locals_), names)
    return ReductionInstance(
        net,
        Hypercube.full(N),
        Configuration("1" * N),
        "MINTRAP",
        phi,
        "MINTRAP(f, *^N) <=> IN-MINTRAP(f, 1^N) <=> forall y: phi(y)",
        ("MINTRAP", "IN-MINTRAP"),
    )


def gen_dnf_taut_chain(phi: Dnf, n: int | None = None) -> ReductionInstance:
    """Network over n+2k+2 components in which the k-ary disjunction is
    replaced by a chain of binary ORs, so every local has at most 5 inputs.

    The clause and variable cells are suppressed by x_{n+2k+1} and
    overridden by x_{n+2k+2}.
    """
    phi, n = _prepare_dnf(phi, n)
    k = len(phi.clauses)
    if k < 1:
        raise ValidationError("chain construction needs at least one clause")
    wide = [c for c in phi.clauses if len(c) > 3]
    if wide:
        raise ValidationError(f"clause with {len(wide[0])} literals; at most 3 allowed")
    N = n + 2 * k + 2
    a1, a2 = n + 2 * k + 1, n + 2 * k + 2
    locals_ = []
    for i in range(1, n + 1):
        locals_.append(Dnf((((i, True), (a1, False)), ((a2, True),))))
    for c in phi.clauses:
        locals_.append(Dnf((tuple(c) + ((a1, False),), ((a2, True),))))
    locals_.append(Dnf((((n + 1, True),),)))
    for j in range(2, k + 1):
        locals_.append(Dnf((((n + j, True),), ((n + k + j - 1, True),))))
    locals_.append(Dnf((((n + 2 * k, True), (a2, False)),)))
    locals_.append(Dnf((((a1, True), (a2, False)),)))
    names = (
        tuple(f"y{i}" for i in range(1, n + 1))
        + tuple(f"c{j}" for j in range(1, k + 1))
        + tuple(f"d{j}" for j in range(1, k + 1))
        + ("a1", "a2")
    )
    net = BooleanNetwork(tuple(locals_), names)
    return ReductionInstance(
        net,
        Hypercube.full(N),
        Configuration("1" * N),
        "MINTRAP",
        phi,
        "MINTRAP(f, *^N) <=> IN-MINTRAP(f, 1^N) <=> forall y: phi(y)",
        ("MINTRAP", "IN-MINTRAP"),
    )


# ------------------------------------------------------------------ brute force


def brute_taut(phi, n: int | None = None) -> bool:
    """forall y: phi(y), by enumerating all 2^n assignments."""
    phi = _as_function(phi)
    n = _width(phi, n)
    if n > BRUTE_GUARD:
        raise GuardError("tautology enumeration", BRUTE_GUARD, n)
    return bool(truth_values(phi, range(1, n + 1)).all())


def brute_qbf(q: QbfInstance) -> bool:
    """Outer loop over the universal block, inner over the existential one."""
    if q.n2 > BRUTE_GUARD:
        raise GuardError("QBF enumeration", BRUTE_GUARD, q.n2)
    values = truth_values(q.matrix, range(1, q.n2 + 1))
    table = values.reshape(1 << q.n1, 1 << (q.n2 - q.n1))
    return bool(table.any(axis=1).all())


# ------------------------------------------------------------------ instance files

_VARS_RE = re.compile(r"vars\s+(\d+)\s*$")
_QBF_RE = re.compile(r"forall\s+(\d+)\s+exists\s+(\d+)\s*$")
_VAR_NAME = re.compile(r"[xy]?(\d+)$")


def _resolve_numbered(name: str) -> int:
    m = _VAR_NAME.match(name)
    if not m or int(m.group(1)) < 1:
        raise KeyError(name)
    return int(m.group(1))


def parse_dnf_instance(text: str) -> tuple[Dnf, int]:
    """``vars N`` (optional) then lines of ';'-separated clauses such as ``1,!2; 3``."""
    n = None
    clauses = []
    seen_any = False
    for lineno, line in _lines(text):
        m = _VARS_RE.match(line)
        if m:
            n = int(m.group(1))
            continue
        seen_any = True
        clauses.extend(parse_clauses(line, lineno))
    if not seen_any:
        raise ParseError("no clause lines", 1)
    phi = Dnf(tuple(clauses))
    supp = phi.syntactic_support()
    top = max(supp, default=1)
    if n is not None and top > n:
        raise ParseError(f"clause mentions variable {top} beyond vars {n}", 1)
    return phi, n if n is not None else top


def parse_formula_instance(text: str) -> tuple[Formula, int]:
    """``vars N`` (optional) then one formula over x1.. or y1..."""
    n = None
    body = None
    for lineno, line in _lines(text):
        m = _VARS_RE.match(line)
        if m:
            n = int(m.group(1))
            continue
        if body is not None:
            raise ParseError("expected a single formula line", lineno)
        body = parse_expr(line, _resolve_numbered, lineno)
    if body is None:
        raise ParseError("missing formula line", 1)
    phi = Formula(body)
    top = max(phi.syntactic_support(), default=1)
    if n is not None and top > n:
        raise ParseError(f"formula mentions variable {top} beyond vars {n}", 1)
    return phi, n if n is not None else top


def parse_qbf_instance(text: str) -> QbfInstance:
    """``forall N1 exists M`` header (M = n2 - n1) then one formula line."""
    header = None
    body = None
    for lineno, line in _lines(text):
        if header is None:
            m = _QBF_RE.match(line)
            if not m:
                raise ParseError("expected header 'forall N1 exists N2-N1'", lineno)
            header = int(m.group(1)), int(m.group(2))
            continue
        if body is not None:
            raise ParseError("expected a single formula line", lineno)
        body = parse_expr(line, _resolve_numbered, lineno)
    if header is None or body is None:
        raise ParseError("QBF instance needs a header and a formula line", 1)
    n1, m = header
    return QbfInstance(n1, n1 + m, Formula(body))


def reduce_instance(kind: str, text: str) -> ReductionInstance:
    """Parse an instance file and apply the generator named ``kind``."""
    if kind == "taut":
        phi, n = parse_formula_instance(text)
        return gen_tautology_trapspace(phi, n)
    if kind == "pi2":
        return gen_pi2_mintrap(parse_qbf_instance(text))
    if kind == "monotone":
        phi, n = parse_dnf_instance(text)
        return gen_dnf_taut_monotone(phi, n)
    if kind == "chain":
        phi, n = parse_dnf_instance(text)
        return gen_dnf_taut_chain(phi, n)
    raise ValidationError(f"unknown generator {kind!r}")


GENERATORS = ("taut", "pi2", "monotone", "chain")
