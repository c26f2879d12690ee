"""Per-encoding evaluation and restricted existential queries.

A network is flattened once into :class:`Compiled`, a named tuple of numpy
arrays, and every hot loop below runs over that form.  The loops are
compiled with numba unless ``TRAPKIT_NUMBA=0``.

Cube arrays use int8 codes 0, 1 and 2 (``*``), indexed from 0.
"""
from __future__ import annotations

import os
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._accel import jit
from .errors import BudgetExceeded, GuardError, IntegrityError, ValidationError
from .model.semantics import monotonicity
from .model.types import (
    And,
    Bdd,
    Configuration,
    Const,
    Dnf,
    Dnf01,
    Formula,
    Hypercube,
    LocalFunction,
    Not,
    Or,
    TtLocal,
    Var,
)

DEFAULT_BUDGET = 1 << 22

K_FORMULA, K_DNF, K_TT, K_BDD, K_DNF01 = 0, 1, 2, 3, 4
OP_CONST, OP_VAR, OP_NOT, OP_AND, OP_OR = 0, 1, 2, 3, 4
STAR = 2


def default_budget() -> int:
    env = os.environ.get("TRAPKIT_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class Compiled(NamedTuple):
    n: int
    kind: np.ndarray
    has_order: np.ndarray
    order: np.ndarray  # int8[m, n], 1 = non-decreasing
    prog_start: np.ndarray
    prog_op: np.ndarray
    prog_arg: np.ndarray
    supp_start: np.ndarray
    supp: np.ndarray
    rdep_start: np.ndarray
    rdep: np.ndarray
    c1_lo: np.ndarray
    c1_hi: np.ndarray
    c0_lo: np.ndarray
    c0_hi: np.ndarray
    cl_start: np.ndarray
    cl_bad: np.ndarray
    lit_var: np.ndarray
    lit_pol: np.ndarray
    tt_pstart: np.ndarray
    tt_p: np.ndarray
    tt_tstart: np.ndarray
    tt_t: np.ndarray
    bdd_root: np.ndarray
    bdd_first: np.ndarray
    bdd_last: np.ndarray
    node_var: np.ndarray
    node_lo: np.ndarray
    node_hi: np.ndarray
    max_prog: int


def _postfix(expr, ops, args):
    # explicit stack: deep parser output must not hit the recursion limit
    stack = [(expr, False)]
    while stack:
        node, done = stack.pop()
        if isinstance(node, Var):
            ops.append(OP_VAR)
            args.append(node.index - 1)
        elif isinstance(node, Const):
            ops.append(OP_CONST)
            args.append(1 if node.value else 0)
        elif isinstance(node, Not):
            if done:
                ops.append(OP_NOT)
                args.append(0)
            else:
                stack.append((node, True))
                stack.append((node.arg, False))
        elif isinstance(node, (And, Or)):
            if done:
                ops.append(OP_AND if isinstance(node, And) else OP_OR)
                args.append(len(node.args))
            else:
                stack.append((node, True))
                for a in reversed(node.args):
                    stack.append((a, False))
        else:
            raise TypeError(f"not an expression node: {node!r}")


def compile_network(locals_, n: int) -> Compiled:
    """Flatten local functions over ``n`` components into kernel arrays."""
    m = len(locals_)
    i64 = np.int64
    kind = np.zeros(m, i64)
    has_order = np.zeros(m, np.int8)
    order = np.ones((m, n), np.int8)
    prog_start, ops, args = [0], [], []
    supp_start, supp = [0], []
    c1_lo, c1_hi, c0_lo, c0_hi = (np.zeros(m, i64) for _ in range(4))
    cl_start, cl_bad, lit_var, lit_pol = [0], [], [], []
    tt_pstart, tt_p, tt_tstart, tt_t = [0], [], [], []
    bdd_root = np.zeros(m, i64)
    bdd_first = np.zeros(m, i64)
    bdd_last = np.zeros(m, i64)
    node_var, node_lo, node_hi = [0, 0], [0, 1], [0, 1]

    def add_clauses(dnf):
        lo = len(cl_bad)
        for clause in dnf.clauses:
            for v, pol in clause:
                lit_var.append(v - 1)
                lit_pol.append(1 if pol else 0)
            cl_start.append(len(lit_var))
            cl_bad.append(1 if Dnf.contradictory(clause) else 0)
        return lo, len(cl_bad)

    for i, fn in enumerate(locals_):
        if not isinstance(fn, LocalFunction):
            raise ValidationError(f"not a local function: {fn!r}", i + 1)
        s = sorted(fn.syntactic_support())
        if s and (s[0] < 1 or s[-1] > n):
            raise ValidationError(f"index out of range 1..{n}", i + 1)
        supp.extend(v - 1 for v in s)
        supp_start.append(len(supp))
        if fn.ordering is not None and isinstance(fn, (Formula, Dnf)):
            if len(fn.ordering) != n:
                raise ValidationError(f"unate ordering must have {n} characters", i + 1)
            has_order[i] = 1
            order[i] = [1 if c == "+" else 0 for c in fn.ordering]
        if isinstance(fn, Formula):
            kind[i] = K_FORMULA
            _postfix(fn.expr, ops, args)
        elif isinstance(fn, Dnf):
            kind[i] = K_DNF
            _postfix(fn.to_expr(), ops, args)
            c1_lo[i], c1_hi[i] = add_clauses(fn)
        elif isinstance(fn, TtLocal):
            kind[i] = K_TT
            tt_tstart.append(len(tt_t))
            tt_p.extend(v - 1 for v in fn.p)
            tt_t.extend(1 if ch == "1" else 0 for ch in fn.t)
        elif isinstance(fn, Bdd):
            kind[i] = K_BDD
            base = len(node_var) - 2
            remap = lambda idx: idx if idx < 2 else idx + base
            bdd_first[i] = len(node_var)
            for v, lo, hi in fn.nodes[2:]:
                node_var.append(v - 1)
                node_lo.append(remap(lo))
                node_hi.append(remap(hi))
            bdd_last[i] = len(node_var)
            bdd_root[i] = remap(fn.root)
        elif isinstance(fn, Dnf01):
            kind[i] = K_DNF01
            c1_lo[i], c1_hi[i] = add_clauses(fn.phi1)
            c0_lo[i], c0_hi[i] = add_clauses(fn.phi0)
        if not isinstance(fn, TtLocal):
            tt_tstart.append(len(tt_t))
        tt_pstart.append(len(tt_p))
        prog_start.append(len(ops))

    # locals whose support contains each variable
    buckets = [[] for _ in range(n)]
    for i in range(m):
        for q in range(supp_start[i], supp_start[i + 1]):
            buckets[supp[q]].append(i)
    rdep_start = np.zeros(n + 1, i64)
    rdep_start[1:] = np.cumsum([len(b) for b in buckets])
    rdep = np.array([i for b in buckets for i in b], dtype=i64)
    arr = lambda xs, dt=i64: np.array(xs, dtype=dt)
    max_prog = max((prog_start[i + 1] - prog_start[i] for i in range(m)), default=0)
    return Compiled(
        n=n,
        kind=kind,
        has_order=has_order,
        order=order,
        prog_start=arr(prog_start),
        prog_op=arr(ops),
        prog_arg=arr(args),
        supp_start=arr(supp_start),
        supp=arr(supp),
        rdep_start=rdep_start,
        rdep=rdep,
        c1_lo=c1_lo,
        c1_hi=c1_hi,
        c0_lo=c0_lo,
        c0_hi=c0_hi,
        cl_start=arr(cl_start),
        cl_bad=arr(cl_bad, np.int8),
        lit_var=arr(lit_var),
        lit_pol=arr(lit_pol, np.int8),
        tt_pstart=arr(tt_pstart),
        tt_p=arr(tt_p),
        tt_tstart=arr(tt_tstart),
        tt_t=arr(tt_t, np.int8),
        bdd_root=bdd_root,
        bdd_first=bdd_first,
        bdd_last=bdd_last,
        node_var=arr(node_var),
        node_lo=arr(node_lo),
        node_hi=arr(node_hi),
        max_prog=max(max_prog, 1),
    )


# ------------------------------------------------------------------ kernels


@jit
def _eval3(c, i, a, stack):
    """Kleene evaluation of a formula program; 2 means undetermined."""
    sp = 0
    for pc in range(c.prog_start[i], c.prog_start[i + 1]):
        op = c.prog_op[pc]
        arg = c.prog_arg[pc]
        if op == OP_VAR:
            stack[sp] = a[arg]
            sp += 1
        elif op == OP_CONST:
            stack[sp] = arg
            sp += 1
        elif op == OP_NOT:
            v = stack[sp - 1]
            if v != STAR:
                stack[sp - 1] = 1 - v
        elif op == OP_AND:
            r = 1
            for q in range(sp - arg, sp):
                v = stack[q]
                if v == 0:
                    r = 0
                    break
                if v == STAR:
                    r = STAR
            sp -= arg
            stack[sp] = r
            sp += 1
        else:
            r = 0
            for q in range(sp - arg, sp):
                v = stack[q]
                if v == 1:
                    r = 1
                    break
                if v == STAR:
                    r = STAR
            sp -= arg
            stack[sp] = r
            sp += 1
    return stack[0]


@jit
def _clauses_hold(c, lo, hi, x):
    for cl in range(lo, hi):
        ok = True
        for q in range(c.cl_start[cl], c.cl_start[cl + 1]):
            if x[c.lit_var[q]] != c.lit_pol[q]:
                ok = False
                break
        if ok:
            return 1
    return 0


@jit
def _tt_row(c, i, x):
    row = 0
    for q in range(c.tt_pstart[i], c.tt_pstart[i + 1]):
        row = (row << 1) | x[c.tt_p[q]]
    return c.tt_t[c.tt_tstart[i] + row]


@jit
def _bdd_walk(c, i, x):
    node = c.bdd_root[i]
    while node >= 2:
        if x[c.node_var[node]] == 1:
            node = c.node_hi[node]
        else:
            node = c.node_lo[node]
    return node


@jit
def eval_kernel(c, i, x, stack):
    """Value of local ``i`` at point ``x``; -1 flags a double-DNF clash."""
    k = c.kind[i]
    if k == K_FORMULA or k == K_DNF:
        return _eval3(c, i, x, stack)
    if k == K_TT:
        return _tt_row(c, i, x)
    if k == K_BDD:
        return _bdd_walk(c, i, x)
    one = _clauses_hold(c, c.c1_lo[i], c.c1_hi[i], x)
    zero = _clauses_hold(c, c.c0_lo[i], c.c0_hi[i], x)
    if one == zero:
        return -1
    return one


@jit
def _fill(h, w):
    for j in range(h.shape[0]):
        w[j] = 0 if h[j] == STAR else h[j]


@jit
def _sat_clauses(c, lo, hi, h, w):
    for cl in range(lo, hi):
        if c.cl_bad[cl]:
            continue
        ok = True
        for q in range(c.cl_start[cl], c.cl_start[cl + 1]):
            v = h[c.lit_var[q]]
            if v != STAR and v != c.lit_pol[q]:
                ok = False
                break
        if ok:
            _fill(h, w)
            for q in range(c.cl_start[cl], c.cl_start[cl + 1]):
                w[c.lit_var[q]] = c.lit_pol[q]
            return 1
    return 0


@jit
def _sat_tt(c, i, h, b, w):
    p0 = c.tt_pstart[i]
    k = c.tt_pstart[i + 1] - p0
    t0 = c.tt_tstart[i]
    for row in range(1 << k):
        if c.tt_t[t0 + row] != b:
            continue
        ok = True
        for j in range(k):
            v = h[c.tt_p[p0 + j]]
            if v != STAR and v != (row >> (k - 1 - j)) & 1:
                ok = False
                break
        if ok:
            _fill(h, w)
            for j in range(k):
                w[c.tt_p[p0 + j]] = (row >> (k - 1 - j)) & 1
            return 1
    return 0


@jit
def _sat_bdd(c, i, h, b, w):
    root = c.bdd_root[i]
    if root < 2:
        if root == b:
            _fill(h, w)
            return 1
        return 0
    first = c.bdd_first[i]
    size = c.bdd_last[i] - first
    seen = np.zeros(size, np.int8)
    parent = np.empty(size, np.int64)
    edge = np.empty(size, np.int8)
    stack = np.empty(size, np.int64)
    sp = 0
    stack[sp] = root
    sp += 1
    seen[root - first] = 1
    parent[root - first] = -1
    while sp > 0:
        sp -= 1
        u = stack[sp]
        var = c.node_var[u]
        for e in range(2):
            if h[var] != STAR and h[var] != e:
                continue
            t = c.node_hi[u] if e == 1 else c.node_lo[u]
            if t < 2:
                if t == b:
                    _fill(h, w)
                    w[var] = e
                    node = u
                    while parent[node - first] >= 0:
                        up = parent[node - first]
                        w[c.node_var[up]] = edge[node - first]
                        node = up
                    return 1
                continue
            if seen[t - first] == 0:
                seen[t - first] = 1
                parent[t - first] = u
                edge[t - first] = e
                stack[sp] = t
                sp += 1
    return 0


@jit
def _sat_unate(c, i, h, b, w, stack):
    _fill(h, w)
    for q in range(c.supp_start[i], c.supp_start[i + 1]):
        v = c.supp[q]
        if h[v] == STAR:
            w[v] = b if c.order[i, v] == 1 else 1 - b
    return 1 if _eval3(c, i, w, stack) == b else 0


@jit
def _sat_search(c, i, h, b, w, budget, stack):
    """Backtracking over free support variables with constant propagation."""
    a = h.copy()
    r = _eval3(c, i, a, stack)
    if r == b:
        _fill(a, w)
        return 1
    if r != STAR:
        return 0
    lo = c.supp_start[i]
    hi = c.supp_start[i + 1]
    free = np.empty(hi - lo, np.int64)
    m = 0
    for q in range(lo, hi):
        if a[c.supp[q]] == STAR:
            free[m] = c.supp[q]
            m += 1
    choice = np.full(m + 1, -1, np.int64)
    nodes = 0
    d = 0
    while d >= 0:
        if choice[d] == 1:
            a[free[d]] = STAR
            choice[d] = -1
            d -= 1
            continue
        choice[d] += 1
        a[free[d]] = choice[d]
        nodes += 1
        if nodes > budget:
            return -1
        r = _eval3(c, i, a, stack)
        if r == b:
            _fill(a, w)
            return 1
        if r != STAR or d == m - 1:
            continue
        d += 1
    return 0


@jit
def sat_kernel(c, i, h, b, w, budget, stack):
    """Is there x in v(h) with f_i(x) == b?  1 (witness in w), 0, or -1 (budget)."""
    k = c.kind[i]
    if k == K_FORMULA or k == K_DNF:
        if c.has_order[i]:
            return _sat_unate(c, i, h, b, w, stack)
        if k == K_DNF and b == 1:
            return _sat_clauses(c, c.c1_lo[i], c.c1_hi[i], h, w)
        return _sat_search(c, i, h, b, w, budget, stack)
    if k == K_TT:
        return _sat_tt(c, i, h, b, w)
    if k == K_BDD:
        return _sat_bdd(c, i, h, b, w)
    if b == 1:
        return _sat_clauses(c, c.c1_lo[i], c.c1_hi[i], h, w)
    return _sat_clauses(c, c.c0_lo[i], c.c0_hi[i], h, w)


@jit
def trapspace_kernel(c, h, budget, w, stack):
    """0 if h is closed; i+1 if component i escapes (witness in w); -(i+1) on budget."""
    for i in range(c.n):
        if h[i] == STAR:
            continue
        s = sat_kernel(c, i, h, 1 - h[i], w, budget, stack)
        if s < 0:
            return -(i + 1)
        if s == 1:
            return i + 1
    return 0


@jit
def _meets_visited(fixed, value, r):
    """Does the cube (fixed, value) over Gray bits meet Gray codes 0..r-1?

    The prefix [0, r) splits into aligned dyadic blocks, one per set bit b
    of r; each block's Gray codes agree above bit b-1 and vary below.
    """
    b = 0
    while (r >> b) > 0:
        if (r >> b) & 1:
            a = (r >> (b + 1)) << (b + 1)
            g = a ^ (a >> 1)
            mask = ~((np.int64(1) << b) - 1)
            if ((value ^ g) & fixed & mask) == 0:
                return True
        b += 1
    return False


@jit
def closure_kernel(c, g, out, budget, w, stack, need, bitpos, r):
    """Smallest trap space containing v(g), written into ``out``.

    Passes over fixed components in ascending order; a component is only
    re-queried after a variable of its support was freed.  Returns the
    number of passes, or -(i+1) if the search budget ran out on component i.

    When ``r > 0``, ``g`` is the r-th vertex of a Gray-code walk whose
    earlier vertices all saturate to the same trap space; ``bitpos`` maps a
    component to its Gray bit (-1 if not walked).  The search then returns
    0 as soon as the partial closure meets an earlier vertex, since its
    closure contains that vertex's.  ``out`` is left partial in that case.
    """
    n = c.n
    fixed = np.int64(0)
    value = np.int64(0)
    for j in range(n):
        out[j] = g[j]
        need[j] = 1
        if r > 0 and bitpos[j] >= 0:
            fixed |= np.int64(1) << bitpos[j]
            value |= np.int64(g[j]) << bitpos[j]
    passes = 0
    changed = True
    while changed:
        changed = False
        passes += 1
        for i in range(n):
            if out[i] == STAR or need[i] == 0:
                continue
            need[i] = 0
            s = sat_kernel(c, i, out, 1 - out[i], w, budget, stack)
            if s < 0:
                return -(i + 1)
            if s == 1:
                out[i] = STAR
                changed = True
                for q in range(c.rdep_start[i], c.rdep_start[i + 1]):
                    need[c.rdep[q]] = 1
                if r > 0 and bitpos[i] >= 0:
                    fixed &= ~(np.int64(1) << bitpos[i])
                    if _meets_visited(fixed, value, r):
                        return 0
    return passes


@jit
def mintrap_kernel(c, h, budget, x, t):
    """Saturate every vertex of the trap space ``h`` in Gray-code order.

    Bit j of the Gray code drives the j-th free position counted from the
    right.  Vertices already visited all saturate to h (otherwise the walk
    has stopped), which lets most closures stop early.  Returns (0, 0) if
    every closure equals h, (1, rank) with the vertex in ``x`` and its
    closure in ``t`` for the first failure, or (-1, component) on budget
    exhaustion.
    """
    n = c.n
    free = np.empty(n, np.int64)
    bitpos = np.full(n, -1, np.int64)
    m = 0
    for j in range(n):
        x[j] = h[j]
        if h[j] == STAR:
            free[m] = j
            m += 1
            x[j] = 0
    for j in range(m):
        bitpos[free[m - 1 - j]] = j
    w = np.zeros(n, np.int8)
    need = np.zeros(n, np.int8)
    stack = np.empty(c.max_prog + 1, np.int8)
    total = np.int64(1) << m
    for r in range(total):
        if r > 0:
            tz = 0
            while (r >> tz) & 1 == 0:
                tz += 1
            pos = free[m - 1 - tz]
            x[pos] = 1 - x[pos]
        s = closure_kernel(c, x, t, budget, w, stack, need, bitpos, r)
        if s < 0:
            return -1, -s - 1
        if s == 0:
            continue
        for j in range(n):
            if t[j] != h[j]:
                return 1, r
    return 0, 0


@jit
def successors_kernel(c, out):
    """out[rank(x)] = rank(f(x)); returns -1, or the first clashing rank."""
    n = c.n
    x = np.zeros(n, np.int8)
    stack = np.empty(c.max_prog + 1, np.int8)
    for r in range(out.shape[0]):
        for j in range(n):
            x[j] = (r >> (n - 1 - j)) & 1
        y = 0
        for i in range(n):
            v = eval_kernel(c, i, x, stack)
            if v < 0:
                return r
            y = (y << 1) | v
        out[r] = y
    return -1


# ----------------------------------------------------------- python surface


@lru_cache(maxsize=512)
def _single(fn: LocalFunction, n: int) -> Compiled:
    return compile_network((fn,), n)


def _stack(c: Compiled):
    return np.empty(c.max_prog + 1, np.int8)


def eval_local(fn: LocalFunction, x) -> int:
    """Value of ``fn`` at configuration ``x``."""
    x = x if isinstance(x, Configuration) else Configuration(str(x))
    c = _single(fn, x.n)
    v = eval_kernel(c, 0, x.to_array(), _stack(c))
    if v < 0:
        raise IntegrityError(None, x)
    return int(v)


def eval_network(net, x) -> Configuration:
    """f(x) for the whole network."""
    x = x if isinstance(x, Configuration) else Configuration(str(x))
    c = net.compiled
    arr = x.to_array()
    stack = _stack(c)
    out = []
    for i in range(net.n):
        v = eval_kernel(c, i, arr, stack)
        if v < 0:
            raise IntegrityError(i + 1, x)
        out.append("1" if v else "0")
    return Configuration("".join(out))


def restricted_sat(fn: LocalFunction, h, b: int, budget: int | None = None) -> Configuration | None:
    """A configuration x in v(h) with fn(x) == b, or None.

    Free positions the witness does not need are set to 0.
    """
    h = h if isinstance(h, Hypercube) else Hypercube(str(h))
    c = _single(fn, h.n)
    budget = default_budget() if budget is None else budget
    w = np.zeros(h.n, np.int8)
    s = sat_kernel(c, 0, h.to_array(), int(b), w, budget, _stack(c))
    if s < 0:
        raise BudgetExceeded(budget)
    return Configuration.from_array(w) if s == 1 else None


def infer_unate_ordering(fn: LocalFunction, n: int, guard: int = 16) -> str | None:
    """Ordering string over +/- under which ``fn`` is unate, or None.

    Components the function does not depend on get ``+``.
    """
    try:
        mono = monotonicity(fn, guard)
    except GuardError as exc:
        raise GuardError("unate inference arity", guard, exc.actual) from None
    if mono is None:
        return None
    return "".join(mono.get(j, "+") for j in range(1, n + 1))
