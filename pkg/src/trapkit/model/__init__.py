from .convert import TARGETS, convert, convert_local
from .io import FORMATS, dump, format_expr, load, parse_clauses, parse_expr, parse_network, serialize
from .semantics import dependency_set, evaluate, truth_values, validate_network
from .types import (
    FALSE,
    TRUE,
    And,
    Bdd,
    BooleanNetwork,
    Configuration,
    Const,
    Dnf,
    Dnf01,
    Expr,
    Formula,
    FunctionalGraph,
    Hypercube,
    LocalFunction,
    Not,
    Or,
    TtLocal,
    Var,
    conj,
    disj,
)
