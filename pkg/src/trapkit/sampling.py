"""Seeded random formulas, DNFs, QBFs and networks for tests and benchmarks."""
from __future__ import annotations

import numpy as np

from .model.convert import convert_local
from .model.semantics import monotonicity
from .model.types import (
    FALSE,
    TRUE,
    BooleanNetwork,
    Dnf,
    Expr,
    Formula,
    Not,
    Var,
    conj,
    disj,
)
from .reductions import QbfInstance

ENCODINGS = ("formula", "dnf", "tt", "bdd", "dnf01")


def rng_for(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_expr(rng, variables, depth: int = 3) -> Expr:
    """Random and/or/not tree over ``variables`` (1-based indices)."""
    variables = list(variables)
    if not variables:
        return TRUE if rng.random() < 0.5 else FALSE
    if depth <= 0 or rng.random() < 0.3:
        leaf = Var(int(rng.choice(variables)))
        return Not(leaf) if rng.random() < 0.5 else leaf
    kind = rng.integers(0, 5)
    if kind == 0:
        return Not(random_expr(rng, variables, depth - 1))
    args = [random_expr(rng, variables, depth - 1) for _ in range(int(rng.integers(2, 4)))]
    return conj(args) if kind in (1, 2) else disj(args)


def random_formula(rng, n: int, depth: int = 3) -> Formula:
    return Formula(random_expr(rng_for(rng), range(1, n + 1), depth))


def random_dnf(rng, n: int, k: int, width: int = 3) -> Dnf:
    """k clauses of 1..width distinct literals over y1..yn."""
    rng = rng_for(rng)
    clauses = []
    for _ in range(k):
        size = int(rng.integers(1, min(width, n) + 1))
        vs = rng.choice(np.arange(1, n + 1), size=size, replace=False)
        clauses.append(tuple((int(v), bool(rng.random() < 0.5)) for v in sorted(vs)))
    return Dnf(tuple(clauses))


def random_qbf(rng, n2: int, depth: int = 3) -> QbfInstance:
    rng = rng_for(rng)
    n1 = int(rng.integers(0, n2 + 1))
    return QbfInstance(n1, n2, random_formula(rng, n2, depth))


def random_network(
    rng,
    n: int,
    encodings=ENCODINGS,
    max_inputs: int = 3,
    depth: int = 2,
    unate_rate: float = 0.5,
) -> BooleanNetwork:
    """Each local reads up to ``max_inputs`` random components and is stored in
    a randomly chosen encoding.  Unate formula/dnf locals get their ordering
    attached with probability ``unate_rate``."""
    rng = rng_for(rng)
    locals_ = []
    for i in range(1, n + 1):
        k = int(rng.integers(0, min(max_inputs, n) + 1))
        inputs = sorted(int(v) for v in rng.choice(np.arange(1, n + 1), size=k, replace=False))
        fn = Formula(random_expr(rng, inputs, depth))
        enc = str(rng.choice(list(encodings)))
        fn = convert_local(fn, enc, n, i)
        if enc in ("formula", "dnf") and rng.random() < unate_rate:
            mono = monotonicity(fn)
            if mono is not None:
                fn = fn.with_ordering("".join(mono.get(j, "+") for j in range(1, n + 1)))
        locals_.append(fn)
    return BooleanNetwork(tuple(locals_))
