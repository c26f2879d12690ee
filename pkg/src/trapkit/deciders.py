"""TRAPSPACE, MINTRAP and IN-MINTRAP over symbolic encodings, plus T(.)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetExceeded, GuardError, ValidationError
from .model.semantics import evaluate_rows
from .model.types import BooleanNetwork, Configuration, Hypercube

ENUMERATION_GUARD = 22


@dataclass(frozen=True)
class Escape:
    """A vertex of h whose image leaves h.

    The symbolic route names the component (``f_component(config)`` differs
    from the fixed cell); the graph route also records the successor.
    """

    config: Configuration
    component: int | None = None
    successor: Configuration | None = None


@dataclass(frozen=True)
class SmallerTrap:
    """A trap space strictly inside the queried one, and the vertex or
    attractor representative it was saturated from."""

    cube: Hypercube
    seed: Configuration | None = None


@dataclass(frozen=True)
class TrapVerdict:
    answer: bool
    witness: Escape | SmallerTrap | None = None
    closure: Hypercube | None = None  # T(x) for IN-MINTRAP

    def __bool__(self):
        return self.answer


def _cube(h, n) -> Hypercube:
    h = h if isinstance(h, Hypercube) else Hypercube(str(h))
    if h.n != n:
        raise ValidationError(f"hypercube {h} has length {h.n}, network has {n} components")
    return h


def _config(x, n) -> Configuration:
    x = x if isinstance(x, Configuration) else Configuration(str(x))
    if x.n != n:
        raise ValidationError(f"configuration {x} has length {x.n}, network has {n} components")
    return x


def _budget(budget):
    return kernels.default_budget() if budget is None else int(budget)


def trapspace(f: BooleanNetwork, h, budget: int | None = None) -> TrapVerdict:
    """Is ``h`` closed under ``f``?  Components are scanned in ascending order."""
    h = _cube(h, f.n)
    c = f.compiled
    budget = _budget(budget)
    w = np.zeros(f.n, np.int8)
    s = kernels.trapspace_kernel(c, h.to_array(), budget, w, np.empty(c.max_prog + 1, np.int8))
    if s < 0:
        raise BudgetExceeded(budget, -s)
    if s == 0:
        return TrapVerdict(True)
    return TrapVerdict(False, Escape(Configuration.from_array(w), int(s)))


def compute_T(f: BooleanNetwork, g, budget: int | None = None) -> Hypercube:
    """Smallest trap space containing v(g)."""
    g = _cube(g, f.n)
    c = f.compiled
    budget = _budget(budget)
    out = np.empty(f.n, np.int8)
    s = kernels.closure_kernel(
        c,
        g.to_array(),
        out,
        budget,
        np.zeros(f.n, np.int8),
        np.empty(c.max_prog + 1, np.int8),
        np.zeros(f.n, np.int8),
        np.full(f.n, -1, np.int64),
        0,
    )
    if s < 0:
        raise BudgetExceeded(budget, -s)
    return Hypercube.from_array(out)


def mintrap(f: BooleanNetwork, h, budget: int | None = None, guard: int = ENUMERATION_GUARD) -> TrapVerdict:
    """Is ``h`` a minimal trap space of ``f``?

    A hypercube that is not closed is answered False with its escape
    witness.  Otherwise every vertex is saturated in Gray-code order and the
    first closure strictly inside ``h`` is the witness.
    """
    h = _cube(h, f.n)
    if len(h.free) > guard:
        raise GuardError(
            "MINTRAP enumeration", guard, len(h.free),
            "use the functional-graph engine or the oracle for small networks",
        )
    closed = trapspace(f, h, budget)
    if not closed.answer:
        return closed
    budget = _budget(budget)
    x = np.empty(f.n, np.int8)
    t = np.empty(f.n, np.int8)
    status, detail = kernels.mintrap_kernel(f.compiled, h.to_array(), budget, x, t)
    if status < 0:
        raise BudgetExceeded(budget, int(detail) + 1)
    if status == 0:
        return TrapVerdict(True)
    return TrapVerdict(False, SmallerTrap(Hypercube.from_array(t), Configuration.from_array(x)))


def in_mintrap(f: BooleanNetwork, x, budget: int | None = None, guard: int = ENUMERATION_GUARD) -> TrapVerdict:
    """Does ``x`` lie in a minimal trap space?  Decided as MINTRAP(f, T(x))."""
    x = _config(x, f.n)
    closure = compute_T(f, Hypercube.point(x), budget)
    v = mintrap(f, closure, budget, guard)
    return TrapVerdict(v.answer, v.witness, closure)


def _cube_rows(h: Hypercube) -> np.ndarray:
    free = [i - 1 for i in h.free]
    m = len(free)
    rows = np.tile(h.to_array().astype(bool), (1 << m, 1))
    r = np.arange(1 << m)
    for j, pos in enumerate(free):
        rows[:, pos] = (r >> (m - 1 - j)) & 1
    return rows


def verify_witness(f: BooleanNetwork, h, verdict: TrapVerdict, guard: int = ENUMERATION_GUARD) -> bool:
    """Re-check a verdict's witness by direct evaluation of the locals.

    Uses the vectorized table evaluation rather than the compiled kernels,
    so a kernel bug cannot confirm its own output.  A positive verdict is
    valid when it carries no witness.
    """
    if verdict.answer:
        return verdict.witness is None
    w = verdict.witness
    h = _cube(h, f.n) if verdict.closure is None else verdict.closure
    if isinstance(w, Escape):
        if w.config not in h:
            return False
        row = w.config.to_array().astype(bool)[None, :]
        image = "".join(str(int(evaluate_rows(fn, row)[0])) for fn in f.locals)
        if w.successor is not None and str(w.successor) != image:
            return False
        if w.component is not None:
            i = w.component
            return h.cells[i - 1] != "*" and image[i - 1] != h.cells[i - 1]
        return image not in h
    if isinstance(w, SmallerTrap):
        if not w.cube.is_strict_subcube(h):
            return False
        if w.seed is not None and w.seed not in w.cube:
            return False
        if len(w.cube.free) > guard:
            raise GuardError("witness re-verification", guard, len(w.cube.free))
        rows = _cube_rows(w.cube)
        for i, fn in enumerate(f.locals):
            cell = w.cube.cells[i]
            if cell != "*" and (evaluate_rows(fn, rows) != (cell == "1")).any():
                return False
        return True
    return False
