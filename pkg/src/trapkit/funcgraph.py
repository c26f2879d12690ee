"""Trap-space questions on an explicit functional graph.

All vertex sets are sorted int64 arrays of configuration ranks (component 1
is the most significant bit), so every query is deterministic.
"""
from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from . import kernels
from ._accel import jit
from .deciders import Escape, SmallerTrap, TrapVerdict
from .errors import GuardError, IntegrityError, ValidationError
from .model.types import BooleanNetwork, Configuration, FunctionalGraph, Hypercube

GRAPH_GUARD = 24


class VertexSet:
    """A set of configurations of a fixed dimension, stored as sorted ranks."""

    __slots__ = ("n", "ranks")

    def __init__(self, n: int, ranks: Iterable[int] | np.ndarray = ()):
        arr = np.unique(np.asarray(list(ranks) if not isinstance(ranks, np.ndarray) else ranks, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= 1 << n):
            raise ValidationError(f"rank out of range for n={n}")
        self.n = n
        self.ranks = arr

    @classmethod
    def of(cls, configs: Iterable[Configuration | str]) -> VertexSet:
        configs = [c if isinstance(c, Configuration) else Configuration(str(c)) for c in configs]
        if not configs:
            raise ValidationError("cannot infer dimension of an empty vertex set")
        n = configs[0].n
        if any(c.n != n for c in configs):
            raise ValidationError("configurations of different lengths")
        return cls(n, [c.rank for c in configs])

    def __len__(self):
        return int(self.ranks.size)

    def __iter__(self) -> Iterator[Configuration]:
        for r in self.ranks:
            yield Configuration.from_rank(r, self.n)

    def __contains__(self, x) -> bool:
        x = x if isinstance(x, Configuration) else Configuration(str(x))
        i = np.searchsorted(self.ranks, x.rank)
        return x.n == self.n and i < self.ranks.size and self.ranks[i] == x.rank

    def __eq__(self, other):
        if isinstance(other, VertexSet):
            return self.n == other.n and np.array_equal(self.ranks, other.ranks)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.ranks.tobytes()))

    def __repr__(self):
        return "{" + ", ".join(str(c) for c in self) + "}"

    def min(self) -> Configuration:
        return Configuration.from_rank(self.ranks[0], self.n)


def _as_vertex_set(W, n=None) -> VertexSet:
    if isinstance(W, VertexSet):
        vs = W
    else:
        W = list(W)
        if not W:
            raise ValidationError("vertex set must be non-empty")
        vs = VertexSet.of(W)
    if not len(vs):
        raise ValidationError("vertex set must be non-empty")
    if n is not None and vs.n != n:
        raise ValidationError(f"vertex set has dimension {vs.n}, graph has {n}")
    return vs


def cube_ranks(h: Hypercube) -> np.ndarray:
    """Sorted ranks of v(h)."""
    fixed, value = h.masks
    ranks = np.array([value], dtype=np.int64)
    for i in reversed(h.free):
        bit = np.int64(1) << (h.n - i)
        ranks = np.concatenate([ranks, ranks | bit])
    ranks.sort()
    return ranks


def _masks_of(ranks: np.ndarray, n: int) -> tuple[int, int]:
    full = (1 << n) - 1
    all_ones = int(np.bitwise_and.reduce(ranks))
    any_ones = int(np.bitwise_or.reduce(ranks))
    return full & ~(all_ones ^ any_ones), all_ones


def build_functional_graph(f: BooleanNetwork, guard: int = GRAPH_GUARD) -> FunctionalGraph:
    """succ[rank(x)] = rank(f(x)) for all 2^n configurations."""
    if f.n > guard:
        raise GuardError("functional graph size", guard, f.n, "use the symbolic engine")
    out = np.empty(1 << f.n, np.int64)
    clash = kernels.successors_kernel(f.compiled, out)
    if clash >= 0:
        x = Configuration.from_rank(clash, f.n)
        comp = next(
            (i for i, fn in enumerate(f.locals, 1) if kernels.eval_local(fn, x) < 0),
            None,
        )
        raise IntegrityError(comp, str(x))
    return FunctionalGraph(f.n, out)


def sub_hypercube(W) -> Hypercube:
    """Smallest hypercube enclosing a non-empty vertex set."""
    vs = _as_vertex_set(W)
    fixed, value = _masks_of(vs.ranks, vs.n)
    return Hypercube.from_masks(fixed, value, vs.n)


def _check(G: FunctionalGraph, h) -> Hypercube:
    h = h if isinstance(h, Hypercube) else Hypercube(str(h))
    if h.n != G.n:
        raise ValidationError(f"hypercube {h} has length {h.n}, graph has {G.n} components")
    return h


def _async_images(G: FunctionalGraph, ranks: np.ndarray) -> np.ndarray:
    diff = ranks ^ G.succ[ranks]
    parts = []
    for b in range(G.n):
        bit = np.int64(1) << b
        sel = (diff & bit) != 0
        if sel.any():
            parts.append(ranks[sel] ^ bit)
    return np.concatenate(parts) if parts else ranks[:0]


def saturate(G: FunctionalGraph, W, update: str = "sync") -> Hypercube:
    """T(sub_hypercube(W)): widen until every image stays inside.

    ``update="async"`` widens with the fully asynchronous successors
    instead of f(x); both give the same fixpoint.
    """
    vs = _as_vertex_set(W, G.n)
    if update not in ("sync", "async"):
        raise ValueError(f"unknown update mode {update!r}")
    fixed, value = _masks_of(vs.ranks, G.n)
    for _ in range(G.n + 1):
        h = Hypercube.from_masks(fixed, value, G.n)
        ranks = cube_ranks(h)
        images = G.succ[ranks] if update == "sync" else _async_images(G, ranks)
        if images.size:
            f2, v2 = _masks_of(np.concatenate([ranks, images]), G.n)
        else:
            f2, v2 = fixed, value
        if f2 == fixed:
            return h
        fixed, value = f2, v2 & f2
    raise AssertionError("saturation did not converge")  # pragma: no cover


def trapspace_g(G: FunctionalGraph, h) -> TrapVerdict:
    """Scan v(h) in rank order; the first vertex whose successor leaves h is the witness."""
    h = _check(G, h)
    fixed, value = h.masks
    ranks = cube_ranks(h)
    succ = G.succ[ranks]
    bad = np.nonzero((succ & fixed) != value)[0]
    if not bad.size:
        return TrapVerdict(True)
    r, s = int(ranks[bad[0]]), int(succ[bad[0]])
    d = (s ^ value) & fixed
    comp = G.n - d.bit_length() + 1  # most significant differing fixed bit
    return TrapVerdict(
        False, Escape(Configuration.from_rank(r, G.n), comp, Configuration.from_rank(s, G.n))
    )


@jit
def tarjan_scc(indptr, indices):
    """Iterative Tarjan over a CSR graph.  Returns (component id per node,
    number of components); ids are assigned in reverse topological order."""
    m = indptr.shape[0] - 1
    index = np.full(m, -1, np.int64)
    low = np.zeros(m, np.int64)
    onstack = np.zeros(m, np.bool_)
    comp = np.full(m, -1, np.int64)
    stack = np.empty(m, np.int64)
    sp = 0
    call = np.empty(m, np.int64)
    edge = np.empty(m, np.int64)
    counter = 0
    ncomp = 0
    for root in range(m):
        if index[root] >= 0:
            continue
        depth = 0
        call[0] = root
        edge[0] = indptr[root]
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        onstack[root] = True
        while depth >= 0:
            v = call[depth]
            e = edge[depth]
            if e < indptr[v + 1]:
                edge[depth] = e + 1
                w = indices[e]
                if index[w] < 0:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    onstack[w] = True
                    depth += 1
                    call[depth] = w
                    edge[depth] = indptr[w]
                elif onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            if low[v] == index[v]:
                while True:
                    sp -= 1
                    w = stack[sp]
                    onstack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            depth -= 1
            if depth >= 0:
                u = call[depth]
                if low[v] < low[u]:
                    low[u] = low[v]
    return comp, ncomp


def terminal_sccs(G: FunctionalGraph, h=None) -> list[VertexSet]:
    """Terminal SCCs of the subgraph induced by the trap space h, sorted by least member."""
    h = Hypercube.full(G.n) if h is None else _check(G, h)
    if not trapspace_g(G, h).answer:
        raise ValidationError(f"{h} is not a trap space, so the induced subgraph is not closed")
    ranks = cube_ranks(h)
    local = np.searchsorted(ranks, G.succ[ranks])
    indptr = np.arange(ranks.size + 1, dtype=np.int64)
    comp, ncomp = tarjan_scc(indptr, local)
    leaves = np.zeros(ncomp, np.bool_)
    leaves[:] = True
    # a component is terminal iff no edge leaves it
    leaves[comp[comp != comp[local]]] = False
    out = []
    for cid in np.nonzero(leaves)[0]:
        out.append(VertexSet(G.n, ranks[comp == cid]))
    out.sort(key=lambda vs: int(vs.ranks[0]))
    return out


def mintrap_g(G: FunctionalGraph, h) -> TrapVerdict:
    """Minimal iff every terminal SCC inside h saturates back to h."""
    h = _check(G, h)
    closed = trapspace_g(G, h)
    if not closed.answer:
        return closed
    for W in terminal_sccs(G, h):
        t = saturate(G, W)
        if t != h:
            return TrapVerdict(False, SmallerTrap(t, W.min()))
    return TrapVerdict(True)


def in_mintrap_g(G: FunctionalGraph, x) -> TrapVerdict:
    x = x if isinstance(x, Configuration) else Configuration(str(x))
    if x.n != G.n:
        raise ValidationError(f"configuration {x} has length {x.n}, graph has {G.n} components")
    closure = saturate(G, VertexSet(G.n, [x.rank]))
    v = mintrap_g(G, closure)
    return TrapVerdict(v.answer, v.witness, closure)


def async_out(f: BooleanNetwork | FunctionalGraph, x) -> VertexSet:
    """Fully asynchronous successors: flip one component i with f_i(x) != x_i."""
    x = x if isinstance(x, Configuration) else Configuration(str(x))
    y = f.successor(x) if isinstance(f, FunctionalGraph) else kernels.eval_network(f, x)
    n = x.n
    out = [x.rank ^ (1 << (n - i)) for i in range(1, n + 1) if x[i] != y[i]]
    return VertexSet(n, out)


def to_dot(G: FunctionalGraph, h=None, names=None) -> str:
    """DOT rendering of the subgraph induced by h (default all vertices).

    Terminal SCCs are filled; when h is a proper trap space its boundary is
    drawn as a cluster.
    """
    h = Hypercube.full(G.n) if h is None else _check(G, h)
    ranks = cube_ranks(h)
    closed = trapspace_g(G, h).answer
    attractor = set()
    if closed:
        for W in terminal_sccs(G, h):
            attractor.update(int(r) for r in W.ranks)
    label = lambda r: format(int(r), f"0{G.n}b")  # noqa: E731
    lines = ["digraph G {", "  node [shape=box, fontname=monospace];"]
    if names:
        lines.append(f'  label="{" ".join(names)}";')
    inside = set(int(r) for r in ranks)
    lines.append(f'  subgraph cluster_h {{ label="{h}"; style=dashed;')
    for r in ranks:
        style = ', style=filled, fillcolor="#dddddd"' if int(r) in attractor else ""
        lines.append(f'    "{label(r)}" [label="{label(r)}"{style}];')
    lines.append("  }")
    for r in ranks:
        s = int(G.succ[r])
        extra = "" if s in inside else " [color=red]"
        lines.append(f'  "{label(r)}" -> "{label(s)}"{extra};')
    lines.append("}")
    return "\n".join(lines) + "\n"
