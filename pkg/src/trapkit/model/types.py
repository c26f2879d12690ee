"""Configurations, hypercubes, local-function encodings and networks.

Textual convention everywhere: component 1 is the leftmost character of a
configuration or hypercube string.  Integer ranks are big-endian, so
component 1 is the most significant bit of ``rank``.
"""
from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from functools import cached_property
from typing import Iterator, Sequence, Union

import numpy as np

from ..errors import ValidationError

FREE = 2  # array code for '*'

_CUBE_CODES = np.full(256, 255, dtype=np.uint8)
_CUBE_CODES[ord("0")] = 0
_CUBE_CODES[ord("1")] = 1
_CUBE_CODES[ord("*")] = FREE
_CUBE_CHARS = np.frombuffer(b"01*", dtype=np.uint8)


def _encode(cells: str) -> np.ndarray:
    return _CUBE_CODES[np.frombuffer(cells.encode("ascii"), dtype=np.uint8)].astype(np.int8)


def _decode(arr) -> str:
    return _CUBE_CHARS[np.asarray(arr, dtype=np.intp)].tobytes().decode("ascii")


@dataclass(frozen=True, order=True)
class Configuration:
    """A vertex of the Boolean hypercube, written as a string over {0,1}."""

    bits: str

    def __post_init__(self):
        if not isinstance(self.bits, str) or not self.bits or set(self.bits) - {"0", "1"}:
            raise ValidationError(f"invalid configuration {self.bits!r}")

    @classmethod
    def from_array(cls, arr) -> Configuration:
        return cls(_decode(arr))

    @classmethod
    def from_rank(cls, rank: int, n: int) -> Configuration:
        return cls(format(int(rank), f"0{n}b"))

    @property
    def n(self) -> int:
        return len(self.bits)

    @cached_property
    def rank(self) -> int:
        return int(self.bits, 2)

    def to_array(self) -> np.ndarray:
        return _encode(self.bits)

    def __getitem__(self, i: int) -> int:
        """Value of component ``i`` (1-based)."""
        return int(self.bits[i - 1])

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return self.bits


@dataclass(frozen=True, order=True)
class Hypercube:
    """A sub-hypercube over {0,1,*}^n."""

    cells: str

    def __post_init__(self):
        if not isinstance(self.cells, str) or not self.cells or set(self.cells) - {"0", "1", "*"}:
            raise ValidationError(f"invalid hypercube {self.cells!r}")

    @classmethod
    def full(cls, n: int) -> Hypercube:
        return cls("*" * n)

    @classmethod
    def point(cls, x: Configuration | str) -> Hypercube:
        return cls(str(x))

    @classmethod
    def from_array(cls, arr) -> Hypercube:
        return cls(_decode(arr))

    @classmethod
    def from_masks(cls, fixed_mask: int, value: int, n: int) -> Hypercube:
        cells = []
        for i in range(n):
            bit = 1 << (n - 1 - i)
            cells.append(("1" if value & bit else "0") if fixed_mask & bit else "*")
        return cls("".join(cells))

    @property
    def n(self) -> int:
        return len(self.cells)

    @cached_property
    def free(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, c in enumerate(self.cells) if c == "*")

    @cached_property
    def fixed(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, c in enumerate(self.cells) if c != "*")

    @cached_property
    def masks(self) -> tuple[int, int]:
        """(fixed_mask, value) as big-endian integers."""
        fixed = int(self.cells.replace("0", "1").replace("*", "0"), 2)
        value = int(self.cells.replace("*", "0"), 2)
        return fixed, value

    def to_array(self) -> np.ndarray:
        return _encode(self.cells)

    def is_point(self) -> bool:
        return "*" not in self.cells

    def as_configuration(self) -> Configuration:
        if not self.is_point():
            raise ValidationError(f"{self.cells} has free cells")
        return Configuration(self.cells)

    def size(self) -> int:
        return 1 << len(self.free)

    def __contains__(self, x) -> bool:
        """Vertex membership ``x in v(h)``."""
        bits = str(x)
        if len(bits) != self.n:
            return False
        return all(c == "*" or c == b for c, b in zip(self.cells, bits))

    def issubcube(self, other: Hypercube) -> bool:
        """Cellwise inclusion h ⊆ h': wherever ``other`` is fixed, ``self`` agrees."""
        if other.n != self.n:
            raise ValidationError("hypercube dimensions differ")
        return all(o == "*" or s == o for s, o in zip(self.cells, other.cells))

    def is_strict_subcube(self, other: Hypercube) -> bool:
        return self != other and self.issubcube(other)

    def vertices(self) -> Iterator[Configuration]:
        """v(h) in ascending rank order."""
        free = [i - 1 for i in self.free]
        cells = list(self.cells)
        for r in range(1 << len(free)):
            for j, pos in enumerate(free):
                cells[pos] = "1" if (r >> (len(free) - 1 - j)) & 1 else "0"
            yield Configuration("".join(cells))

    def __len__(self):
        return len(self.cells)

    def __str__(self):
        return self.cells


# ---------------------------------------------------------------- formulas


class Expr:
    """Propositional expression node; supports ``&``, ``|`` and ``~``."""

    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class Const(Expr):
    value: int


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class And(Expr):
    args: tuple[Expr, ...]

    def __and__(self, other):
        return And(self.args + (other,))


@dataclass(frozen=True)
class Or(Expr):
    args: tuple[Expr, ...]

    def __or__(self, other):
        return Or(self.args + (other,))


TRUE = Const(1)
FALSE = Const(0)


def conj(args: Sequence[Expr]) -> Expr:
    args = tuple(args)
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else And(args)


def disj(args: Sequence[Expr]) -> Expr:
    args = tuple(args)
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else Or(args)


def expr_support(e: Expr) -> frozenset[int]:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.index)
        elif isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, (And, Or)):
            stack.extend(node.args)
    return frozenset(out)


# ---------------------------------------------------------- local functions

Literal = tuple[int, bool]  # (component index, polarity)
Clause = tuple[Literal, ...]


class LocalFunction:
    """Marker base for the five encodings.

    Every variant carries ``ordering``: ``None`` or a string over ``+``/``-``
    of length n (``+`` means the function is non-decreasing in that
    component).
    """

    __slots__ = ()
    encoding: str = ""

    def with_ordering(self, ordering):
        from dataclasses import replace

        return replace(self, ordering=ordering)

    def syntactic_support(self) -> frozenset[int]:
        raise NotImplementedError


@dataclass(frozen=True)
class Formula(LocalFunction):
    expr: Expr
    ordering: str | None = None
    encoding = "formula"

    def syntactic_support(self):
        return expr_support(self.expr)


def _clause(lits) -> Clause:
    seen = []
    for v, pol in lits:
        lit = (int(v), bool(pol))
        if lit not in seen:
            seen.append(lit)
    return tuple(seen)


@dataclass(frozen=True)
class Dnf(LocalFunction):
    """Disjunction of clauses; no clauses is false, an empty clause is true."""

    clauses: tuple[Clause, ...]
    ordering: str | None = None
    encoding = "dnf"

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(_clause(c) for c in self.clauses))

    def syntactic_support(self):
        return frozenset(v for c in self.clauses for v, _ in c)

    @staticmethod
    def contradictory(clause: Clause) -> bool:
        vs = {}
        for v, pol in clause:
            if vs.setdefault(v, pol) != pol:
                return True
        return False

    def normalized(self) -> Dnf:
        """Drop clauses holding both polarities of a variable."""
        return Dnf(tuple(c for c in self.clauses if not self.contradictory(c)), self.ordering)

    def to_expr(self) -> Expr:
        return disj(
            conj(Var(v) if pol else Not(Var(v)) for v, pol in c) for c in self.clauses
        )


@dataclass(frozen=True)
class TtLocal(LocalFunction):
    """Truth table over the components ``p``; row index is big-endian in ``p``."""

    p: tuple[int, ...]
    t: str
    ordering: str | None = None
    encoding = "tt"

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(i) for i in self.p))
        if len(set(self.p)) != len(self.p):
            raise ValidationError(f"truth-table index map {self.p} repeats a component")
        if len(self.t) != 1 << len(self.p) or set(self.t) - {"0", "1"}:
            raise ValidationError(
                f"truth table needs {1 << len(self.p)} bits over {{0,1}}, got {self.t!r}"
            )

    @property
    def k(self) -> int:
        return len(self.p)

    def syntactic_support(self):
        return frozenset(self.p)


@dataclass(frozen=True)
class Bdd(LocalFunction):
    """Free BDD as a node table.

    ``nodes[m] = (var, lo, hi)``; ids 0 and 1 are the terminals (their entries
    are ignored) and every other id is a decision node on component ``var``.
    """

    nodes: tuple[tuple[int, int, int], ...]
    root: int
    ordering: str | None = None
    encoding = "bdd"

    def __post_init__(self):
        nodes = tuple(tuple(int(v) for v in node) for node in self.nodes)
        if len(nodes) < 2:
            nodes = ((0, 0, 0), (0, 1, 1)) + nodes[2:]
        object.__setattr__(self, "nodes", nodes)
        m = len(nodes)
        if not 0 <= self.root < m:
            raise ValidationError(f"BDD root {self.root} is not a node")
        for idx, (_, lo, hi) in enumerate(nodes[2:], start=2):
            if not (0 <= lo < m and 0 <= hi < m):
                raise ValidationError(f"BDD node {idx} points outside the node table")

    def syntactic_support(self):
        return frozenset(v for v, _, _ in self.nodes[2:])


@dataclass(frozen=True)
class Dnf01(LocalFunction):
    """Double DNF: ``phi0`` covers the off-set and ``phi1`` the on-set."""

    phi0: Dnf
    phi1: Dnf
    ordering: str | None = None
    encoding = "dnf01"

    def syntactic_support(self):
        return self.phi0.syntactic_support() | self.phi1.syntactic_support()


ENCODINGS = ("formula", "dnf", "tt", "bdd", "dnf01")
LocalLike = Union[Formula, Dnf, TtLocal, Bdd, Dnf01]


# ----------------------------------------------------------------- networks


@dataclass(frozen=True)
class BooleanNetwork:
    """n local functions, one per component, with optional component names."""

    locals: tuple[LocalFunction, ...]
    names: tuple[str, ...] | None = None
    seed: InitVar[int] = 0

    def __post_init__(self, seed):
        object.__setattr__(self, "locals", tuple(self.locals))
        if not self.locals:
            raise ValidationError("empty network")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != len(self.locals):
                raise ValidationError("one name per component is required")
            if len(set(self.names)) != len(self.names):
                raise ValidationError("component names must be distinct")
        from .semantics import validate_network

        validate_network(self, seed)

    @property
    def n(self) -> int:
        return len(self.locals)

    def __len__(self):
        return len(self.locals)

    def __getitem__(self, i: int) -> LocalFunction:
        """Local function of component ``i`` (1-based)."""
        return self.locals[i - 1]

    def component_names(self) -> tuple[str, ...]:
        return self.names if self.names is not None else tuple(f"x{i}" for i in range(1, self.n + 1))

    @property
    def locally_monotone(self) -> bool:
        return all(fn.ordering is not None for fn in self.locals)

    @property
    def encodings(self) -> frozenset[str]:
        return frozenset(fn.encoding for fn in self.locals)

    @cached_property
    def compiled(self):
        """Flat array form consumed by the kernels (built once, shared)."""
        from ..kernels import compile_network

        return compile_network(self.locals, self.n)


@dataclass(frozen=True, eq=False)
class FunctionalGraph:
    """Synchronous transition graph: ``succ[rank(x)] == rank(f(x))``."""

    n: int
    succ: np.ndarray = field(repr=False)

    def __post_init__(self):
        succ = np.ascontiguousarray(self.succ, dtype=np.int64)
        if self.n < 1:
            raise ValidationError("empty network")
        if succ.shape != (1 << self.n,):
            raise ValidationError(f"functional graph needs {1 << self.n} successors, got {succ.shape}")
        if succ.size and (succ.min() < 0 or succ.max() >= 1 << self.n):
            raise ValidationError("successor rank out of range")
        succ.setflags(write=False)
        object.__setattr__(self, "succ", succ)

    def __eq__(self, other):
        return isinstance(other, FunctionalGraph) and self.n == other.n and np.array_equal(self.succ, other.succ)

    def __hash__(self):
        return hash((self.n, self.succ.tobytes()))

    def successor(self, x: Configuration) -> Configuration:
        return Configuration.from_rank(self.succ[x.rank], self.n)

    def out_ranks(self, ranks: np.ndarray) -> np.ndarray:
        return self.succ[ranks]

    def edges(self) -> Iterator[tuple[Configuration, Configuration]]:
        for r in range(1 << self.n):
            yield Configuration.from_rank(r, self.n), Configuration.from_rank(self.succ[r], self.n)
