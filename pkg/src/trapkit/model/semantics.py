"""Vectorized evaluation of local functions over explicit input tables.

This is the numpy route to the meaning of an encoding.  It is deliberately
independent of the compiled scalar kernels so that the two can be checked
against each other.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import GuardError, ValidationError
from .types import (
    And,
    Bdd,
    BooleanNetwork,
    Const,
    Dnf,
    Dnf01,
    Expr,
    Formula,
    LocalFunction,
    Not,
    Or,
    TtLocal,
    Var,
)

SUPPORT_GUARD = 20
EXHAUSTIVE_LIMIT = 16
SAMPLES = 2048


def input_columns(variables: Sequence[int]) -> dict[int, np.ndarray]:
    """Column of each variable over the 2^k big-endian assignments."""
    k = len(variables)
    rows = np.arange(1 << k, dtype=np.int64)
    return {v: ((rows >> (k - 1 - j)) & 1).astype(bool) for j, v in enumerate(variables)}


def _eval_expr(e: Expr, cols, size):
    if isinstance(e, Var):
        return cols[e.index]
    if isinstance(e, Const):
        return np.full(size, bool(e.value))
    if isinstance(e, Not):
        return ~_eval_expr(e.arg, cols, size)
    if isinstance(e, And):
        out = np.ones(size, dtype=bool)
        for a in e.args:
            out &= _eval_expr(a, cols, size)
        return out
    if isinstance(e, Or):
        out = np.zeros(size, dtype=bool)
        for a in e.args:
            out |= _eval_expr(a, cols, size)
        return out
    raise TypeError(f"not an expression node: {e!r}")


def _eval_dnf(d: Dnf, cols, size):
    out = np.zeros(size, dtype=bool)
    for clause in d.clauses:
        term = np.ones(size, dtype=bool)
        for v, pol in clause:
            term &= cols[v] if pol else ~cols[v]
        out |= term
    return out


def _eval_tt(fn: TtLocal, cols, size):
    idx = np.zeros(size, dtype=np.int64)
    for v in fn.p:
        idx = (idx << 1) | cols[v]
    table = np.frombuffer(fn.t.encode(), dtype=np.uint8) == ord("1")
    return table[idx]


def _eval_bdd(fn: Bdd, cols, size):
    var = np.array([v for v, _, _ in fn.nodes], dtype=np.int64)
    lo = np.array([l for _, l, _ in fn.nodes], dtype=np.int64)
    hi = np.array([h for _, _, h in fn.nodes], dtype=np.int64)
    node = np.full(size, fn.root, dtype=np.int64)
    # a path visits each node at most once, so len(nodes) steps suffice
    for _ in range(len(fn.nodes)):
        active = node >= 2
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        cur = node[idx]
        bits = np.zeros(idx.size, dtype=bool)
        for v in np.unique(var[cur]):
            sel = var[cur] == v
            bits[sel] = cols[int(v)][idx[sel]]
        node[idx] = np.where(bits, hi[cur], lo[cur])
    if (node >= 2).any():
        raise ValidationError("BDD contains a cycle")
    return node == 1


def truth_values(fn: LocalFunction, variables: Sequence[int]) -> np.ndarray:
    """Values of ``fn`` over all 2^k assignments to ``variables``.

    Row r assigns variables[0] the most significant bit of r.  The
    syntactic support of ``fn`` must be contained in ``variables``.
    """
    variables = list(variables)
    missing = fn.syntactic_support() - set(variables)
    if missing:
        raise ValueError(f"variables {sorted(missing)} are not enumerated")
    cols = input_columns(variables)
    size = 1 << len(variables)
    if isinstance(fn, Formula):
        return _eval_expr(fn.expr, cols, size)
    if isinstance(fn, Dnf):
        return _eval_dnf(fn, cols, size)
    if isinstance(fn, TtLocal):
        return _eval_tt(fn, cols, size)
    if isinstance(fn, Bdd):
        return _eval_bdd(fn, cols, size)
    if isinstance(fn, Dnf01):
        return _eval_dnf(fn.phi1, cols, size)
    raise TypeError(f"unknown local function {fn!r}")


def evaluate_rows(fn: LocalFunction, rows: np.ndarray) -> np.ndarray:
    """Values of ``fn`` on each row of a (m, n) boolean array; column j-1 is x_j."""
    rows = np.asarray(rows, dtype=bool)
    supp = sorted(fn.syntactic_support())
    if supp and supp[-1] > rows.shape[1]:
        raise ValidationError(f"rows of width {rows.shape[1]} miss component {supp[-1]}")
    return _table_eval(fn, supp, rows[:, [v - 1 for v in supp]]) if supp else _table_eval(fn, [], rows[:, :0])


def dnf01_consistency(fn: Dnf01, variables: Sequence[int]) -> np.ndarray:
    """Boolean mask of rows where exactly one of phi0, phi1 holds."""
    cols = input_columns(list(variables))
    size = 1 << len(variables)
    return _eval_dnf(fn.phi0, cols, size) != _eval_dnf(fn.phi1, cols, size)


def evaluate(fn: LocalFunction, x) -> int:
    """Scalar evaluation through the vectorized route (one-row table)."""
    bits = str(x)
    supp = sorted(fn.syntactic_support())
    if supp and supp[-1] > len(bits):
        raise ValidationError(f"input of length {len(bits)} misses component {supp[-1]}")
    cols = {v: np.array([bits[v - 1] == "1"]) for v in supp}
    if isinstance(fn, Formula):
        return int(_eval_expr(fn.expr, cols, 1)[0])
    if isinstance(fn, Dnf):
        return int(_eval_dnf(fn, cols, 1)[0])
    if isinstance(fn, TtLocal):
        return int(_eval_tt(fn, cols, 1)[0])
    if isinstance(fn, Bdd):
        return int(_eval_bdd(fn, cols, 1)[0])
    if isinstance(fn, Dnf01):
        return int(_eval_dnf(fn.phi1, cols, 1)[0])
    raise TypeError(f"unknown local function {fn!r}")


def _depends(values: np.ndarray, k: int, j: int) -> tuple[bool, bool]:
    """(exists 0->1 increase, exists 0->1 decrease) along axis j of the table."""
    cube = values.reshape((2,) * k) if k else values.reshape(())
    lo = np.take(cube, 0, axis=j).astype(np.int8)
    hi = np.take(cube, 1, axis=j).astype(np.int8)
    return bool((hi > lo).any()), bool((hi < lo).any())


def dependency_set(fn: LocalFunction, n: int | None = None, guard: int = SUPPORT_GUARD) -> frozenset[int]:
    """Components j such that flipping x_j changes fn for some input."""
    supp = sorted(fn.syntactic_support())
    if n is not None and supp and (supp[0] < 1 or supp[-1] > n):
        raise ValidationError(f"index out of range 1..{n}: {supp}")
    if len(supp) > guard:
        raise GuardError("support", guard, len(supp))
    if not supp:
        return frozenset()
    values = truth_values(fn, supp)
    out = set()
    for j, v in enumerate(supp):
        up, down = _depends(values, len(supp), j)
        if up or down:
            out.add(v)
    return frozenset(out)


def monotonicity(fn: LocalFunction, guard: int = EXHAUSTIVE_LIMIT) -> dict[int, str] | None:
    """Direction of every dependent variable ('+' or '-'), or None if not unate."""
    supp = sorted(fn.syntactic_support())
    if len(supp) > guard:
        raise GuardError("unate inference arity", guard, len(supp))
    if not supp:
        return {}
    values = truth_values(fn, supp)
    out = {}
    for j, v in enumerate(supp):
        up, down = _depends(values, len(supp), j)
        if up and down:
            return None
        if up:
            out[v] = "+"
        elif down:
            out[v] = "-"
    return out


# -------------------------------------------------------------- validation


def _check_bdd_free(fn: Bdd, component):
    """Acyclic, and no decision node reaches another node on its own variable."""
    below: dict[int, frozenset[int]] = {0: frozenset(), 1: frozenset()}
    state = {}
    for start in range(2, len(fn.nodes)):
        if start in below:
            continue
        stack = [(start, False)]
        while stack:
            node, done = stack.pop()
            if node in below:
                continue
            var, lo, hi = fn.nodes[node]
            if done:
                reach = below[lo] | below[hi]
                if var in reach:
                    raise ValidationError(
                        f"BDD is not free: a path tests component {var} twice", component
                    )
                below[node] = reach | {var}
                state[node] = 2
                continue
            if state.get(node) == 1:
                raise ValidationError("BDD contains a cycle", component)
            state[node] = 1
            stack.append((node, True))
            for child in (lo, hi):
                if child not in below:
                    if state.get(child) == 1:
                        raise ValidationError("BDD contains a cycle", component)
                    stack.append((child, False))


def _sample_rows(k, rng):
    return rng.integers(0, 2, size=(SAMPLES, k)).astype(bool)


def _check_ordering(fn: LocalFunction, n: int, component, rng):
    ordering = fn.ordering
    if len(ordering) != n or set(ordering) - {"+", "-"}:
        raise ValidationError(f"unate ordering {ordering!r} must have {n} characters over +/-", component)
    supp = sorted(fn.syntactic_support())
    if not supp:
        return
    if len(supp) <= EXHAUSTIVE_LIMIT:
        mono = monotonicity(fn)
        bad = None if mono is None else [v for v, d in mono.items() if ordering[v - 1] != d]
        if mono is None or bad:
            raise ValidationError(
                f"function is not unate under ordering {ordering}"
                + (f" (components {bad})" if bad else ""),
                component,
            )
        return
    base = _sample_rows(len(supp), rng)
    for j, v in enumerate(supp):
        lo = base.copy()
        lo[:, j] = False
        hi = base.copy()
        hi[:, j] = True
        a = _table_eval(fn, supp, lo)
        b = _table_eval(fn, supp, hi)
        if ordering[v - 1] == "+" and (a > b).any() or ordering[v - 1] == "-" and (a < b).any():
            raise ValidationError(f"function is not unate under ordering {ordering} (component {v})", component)


def _table_eval(fn, supp, rows):
    cols = {v: rows[:, j] for j, v in enumerate(supp)}
    size = rows.shape[0]
    if isinstance(fn, Formula):
        return _eval_expr(fn.expr, cols, size)
    if isinstance(fn, Dnf):
        return _eval_dnf(fn, cols, size)
    if isinstance(fn, TtLocal):
        return _eval_tt(fn, cols, size)
    if isinstance(fn, Bdd):
        return _eval_bdd(fn, cols, size)
    return _eval_dnf(fn.phi1, cols, size)


def validate_local(fn: LocalFunction, n: int, component=None, seed: int = 0) -> None:
    supp = sorted(fn.syntactic_support())
    if supp and (supp[0] < 1 or supp[-1] > n):
        bad = [v for v in supp if not 1 <= v <= n]
        raise ValidationError(f"index out of range 1..{n}: {bad}", component)
    rng = np.random.default_rng(seed)
    if isinstance(fn, Bdd):
        _check_bdd_free(fn, component)
    if isinstance(fn, Dnf01):
        if len(supp) <= EXHAUSTIVE_LIMIT:
            ok = dnf01_consistency(fn, supp)
            if not ok.all():
                row = int(np.argmin(ok))
                raise ValidationError(
                    "double DNF is inconsistent (phi0 and phi1 agree) at "
                    + ", ".join(f"x{v}={(row >> (len(supp) - 1 - j)) & 1}" for j, v in enumerate(supp)),
                    component,
                )
        else:
            rows = _sample_rows(len(supp), rng)
            cols = {v: rows[:, j] for j, v in enumerate(supp)}
            if (_eval_dnf(fn.phi0, cols, SAMPLES) == _eval_dnf(fn.phi1, cols, SAMPLES)).any():
                raise ValidationError("double DNF is inconsistent on a sampled input", component)
    if fn.ordering is not None:
        _check_ordering(fn, n, component, rng)


def validate_network(net: BooleanNetwork, seed: int = 0) -> None:
    for i, fn in enumerate(net.locals, start=1):
        if not isinstance(fn, LocalFunction):
            raise ValidationError(f"not a local function: {fn!r}", i)
        validate_local(fn, net.n, i, seed)
