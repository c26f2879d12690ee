"""Cross-encoding conversion of local functions.

Conversions to ``tt``, ``bdd`` and ``dnf01`` go through the truth table of
the function restricted to its dependency set, so they are guarded by the
arity of that set.
"""
from __future__ import annotations

import numpy as np

from ..errors import GuardError, TrapkitError, ValidationError
from .semantics import SUPPORT_GUARD, dependency_set, truth_values
from .types import (
    Bdd,
    BooleanNetwork,
    Dnf,
    Dnf01,
    Formula,
    LocalFunction,
    Not,
    TtLocal,
    Var,
    conj,
    disj,
)

TARGETS = ("formula", "dnf", "tt", "bdd", "dnf01")
ARITY_GUARD = 20


def _restricted_table(fn: LocalFunction, n: int, component=None):
    try:
        deps = sorted(dependency_set(fn, n, guard=SUPPORT_GUARD))
    except GuardError as exc:
        raise GuardError(
            f"conversion arity (component {component})", exc.limit, exc.actual
        ) from None
    if len(deps) > ARITY_GUARD:
        raise GuardError(f"conversion arity (component {component})", ARITY_GUARD, len(deps))
    supp = sorted(fn.syntactic_support())
    values = truth_values(fn, supp)
    if len(deps) < len(supp):
        # the function ignores the other axes, so slice them at 0
        cube = values.reshape((2,) * len(supp))
        index = tuple(slice(None) if v in deps else 0 for v in supp)
        values = np.asarray(cube[index]).reshape(-1)
    return deps, values


def _minterms(deps, values, want):
    k = len(deps)
    out = []
    for row, val in enumerate(values):
        if bool(val) == want:
            out.append(tuple((v, bool((row >> (k - 1 - j)) & 1)) for j, v in enumerate(deps)))
    return tuple(out)


def _build_bdd(deps, values) -> Bdd:
    """Shannon expansion in ascending component order with node sharing."""
    nodes = [(0, 0, 0), (0, 1, 1)]
    unique = {}

    def mk(var, lo, hi):
        if lo == hi:
            return lo
        key = (var, lo, hi)
        if key not in unique:
            unique[key] = len(nodes)
            nodes.append(key)
        return unique[key]

    # bottom-up over levels: level j holds one node per distinct sub-table
    level = [int(v) for v in values]  # ids of terminal nodes for each row
    for j in range(len(deps) - 1, -1, -1):
        level = [mk(deps[j], level[2 * r], level[2 * r + 1]) for r in range(len(level) // 2)]
    return Bdd(tuple(nodes), level[0])


def convert_local(fn: LocalFunction, target: str, n: int, component=None) -> LocalFunction:
    """Semantically equal local function in encoding ``target``."""
    if target not in TARGETS:
        raise TrapkitError(f"unknown encoding {target!r}; expected one of {TARGETS}")
    if fn.encoding == target:
        return fn
    keep = fn.ordering if target in ("formula", "dnf") else None
    if target == "formula" and isinstance(fn, Dnf):
        return Formula(fn.to_expr(), keep)
    if target == "formula" and isinstance(fn, Dnf01):
        return Formula(fn.phi1.to_expr(), keep)
    if target == "dnf" and isinstance(fn, Dnf01):
        return Dnf(fn.phi1.clauses, keep)
    deps, values = _restricted_table(fn, n, component)
    if target == "tt":
        return TtLocal(tuple(deps), "".join("1" if v else "0" for v in values))
    if target == "bdd":
        return _build_bdd(deps, values)
    if target == "dnf01":
        return Dnf01(Dnf(_minterms(deps, values, False)), Dnf(_minterms(deps, values, True)))
    clauses = _minterms(deps, values, True)
    if target == "dnf":
        return Dnf(clauses, keep)
    return Formula(disj(conj(Var(v) if pol else Not(Var(v)) for v, pol in c) for c in clauses), keep)


def convert(net: BooleanNetwork, target: str) -> BooleanNetwork:
    """Convert every local of ``net`` to ``target``."""
    locals_ = []
    for i, fn in enumerate(net.locals, start=1):
        try:
            locals_.append(convert_local(fn, target, net.n, i))
        except ValidationError as exc:
            raise ValidationError(str(exc), i) from exc
    if all(a is b for a, b in zip(locals_, net.locals)):
        return net
    return BooleanNetwork(tuple(locals_), net.names)
