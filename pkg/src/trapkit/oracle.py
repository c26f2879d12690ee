"""Exhaustive ground truth for small networks.

Deliberately naive: the successor table comes from the vectorized truth
tables (not the compiled kernels) and every hypercube is checked by full
vertex evaluation.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import GuardError, ValidationError
from .model.semantics import truth_values
from .model.types import BooleanNetwork, Configuration, Hypercube

ORACLE_GUARD = 12


def successor_table(f: BooleanNetwork) -> np.ndarray:
    """rank(f(x)) for every rank(x), via the numpy evaluation route."""
    n = f.n
    variables = list(range(1, n + 1))
    succ = np.zeros(1 << n, dtype=np.int64)
    for i, fn in enumerate(f.locals, start=1):
        succ |= truth_values(fn, variables).astype(np.int64) << (n - i)
    return succ


def _guard(f):
    if f.n > ORACLE_GUARD:
        raise GuardError("oracle dimension", ORACLE_GUARD, f.n, "use the symbolic or graph engine")


def _ternary_cubes(n):
    """All 3^n hypercubes in ternary counter order (digit 0='0', 1='1', 2='*')."""
    for r in range(3**n):
        digits = []
        for _ in range(n):
            r, d = divmod(r, 3)
            digits.append("01*"[d])
        yield "".join(reversed(digits))


@lru_cache(maxsize=64)
def _trap_spaces(f: BooleanNetwork) -> tuple[Hypercube, ...]:
    _guard(f)
    n = f.n
    succ = successor_table(f)
    x = np.arange(1 << n, dtype=np.int64)
    # for each fixed mask, the values v whose hypercube has an escaping vertex
    escaping = {}
    for mask in range(1 << n):
        bad = (succ & mask) != (x & mask)
        escaping[mask] = set(np.unique(x[bad] & mask).tolist())
    found = []
    for cells in _ternary_cubes(n):
        mask = int(cells.replace("0", "1").replace("*", "0"), 2)
        value = int(cells.replace("*", "0"), 2)
        if value not in escaping[mask]:
            found.append(Hypercube(cells))
    return tuple(sorted(found))


def enumerate_trap_spaces(f: BooleanNetwork) -> list[Hypercube]:
    """Every trap space of ``f``, sorted."""
    return list(_trap_spaces(f))


@lru_cache(maxsize=64)
def _minimal(f: BooleanNetwork) -> tuple[Hypercube, ...]:
    minimal: list[Hypercube] = []
    # any trap space containing another contains a minimal one, so testing
    # against the minimal ones found so far (by ascending size) suffices
    for h in sorted(_trap_spaces(f), key=lambda h: len(h.free)):
        if not any(m.issubcube(h) for m in minimal):
            minimal.append(h)
    return tuple(sorted(minimal))


def enumerate_minimal_trap_spaces(f: BooleanNetwork) -> list[Hypercube]:
    """Inclusion-minimal trap spaces of ``f``, sorted."""
    return list(_minimal(f))


def oracle_trapspace(f: BooleanNetwork, h) -> bool:
    h = h if isinstance(h, Hypercube) else Hypercube(str(h))
    _dims(f, h)
    return h in _trap_spaces(f)


def oracle_mintrap(f: BooleanNetwork, h) -> bool:
    h = h if isinstance(h, Hypercube) else Hypercube(str(h))
    _dims(f, h)
    return h in _minimal(f)


def oracle_in_mintrap(f: BooleanNetwork, x) -> bool:
    x = x if isinstance(x, Configuration) else Configuration(str(x))
    _dims(f, x)
    return any(x in m for m in _minimal(f))


def oracle_closure(f: BooleanNetwork, g) -> Hypercube:
    """Smallest enumerated trap space containing g (intersection of all such)."""
    g = g if isinstance(g, Hypercube) else Hypercube(str(g))
    _dims(f, g)
    best = None
    for h in _trap_spaces(f):
        if g.issubcube(h) and (best is None or h.issubcube(best)):
            best = h
    return best


def _dims(f, obj):
    if len(obj) != f.n:
        raise ValidationError(f"{obj} has length {len(obj)}, network has {f.n} components")
