import itertools

import pytest

from trapkit.errors import GuardError
from trapkit.funcgraph import build_functional_graph, terminal_sccs
from trapkit.model import Formula, Hypercube, Var
from trapkit.model.types import BooleanNetwork
from trapkit.oracle import (
    enumerate_minimal_trap_spaces,
    enumerate_trap_spaces,
    oracle_in_mintrap,
    oracle_mintrap,
    successor_table,
)
from trapkit.sampling import random_network

IDENTITY2 = BooleanNetwork((Formula(Var(1)), Formula(Var(2))))


def cells(hs):
    return {str(h) for h in hs}


def test_net3_trap_spaces(net3):
    ts = cells(enumerate_trap_spaces(net3))
    assert {"000", "**1", "***"} <= ts
    assert cells(enumerate_minimal_trap_spaces(net3)) == {"000", "**1"}


def test_identity_trap_spaces():
    assert len(enumerate_trap_spaces(IDENTITY2)) == 9
    assert cells(enumerate_minimal_trap_spaces(IDENTITY2)) == {"00", "01", "10", "11"}


def test_xor_or_trap_spaces(xor_or):
    assert cells(enumerate_trap_spaces(xor_or)) == {"00", "*1", "**"}
    assert cells(enumerate_minimal_trap_spaces(xor_or)) == {"00", "*1"}


def test_membership_queries(net3):
    assert oracle_mintrap(net3, "**1")
    assert not oracle_mintrap(net3, "*00")
    assert not oracle_in_mintrap(net3, "110")
    assert oracle_in_mintrap(net3, "101")


def test_results_are_sorted(net3):
    ts = enumerate_trap_spaces(net3)
    assert ts == sorted(ts)


def test_oracle_guard():
    net = BooleanNetwork(tuple(Formula(Var(i)) for i in range(1, 14)))
    with pytest.raises(GuardError):
        enumerate_trap_spaces(net)


def test_successor_table(net3):
    assert successor_table(net3).tolist() == [0, 5, 1, 5, 1, 7, 1, 3]


@pytest.mark.parametrize("seed", range(40))
def test_minimal_sets_are_incomparable_and_hold_attractors(seed):
    net = random_network(seed, 1 + seed % 7)
    minimal = enumerate_minimal_trap_spaces(net)
    for a, b in itertools.combinations(minimal, 2):
        assert not a.issubcube(b) and not b.issubcube(a)
    attractors = terminal_sccs(build_functional_graph(net))
    for m in minimal:
        assert any(all(x in m for x in W) for W in attractors)


def test_closure_check_by_vertex_evaluation(net3):
    # cross-check a few hypercubes by hand-rolled evaluation of the successor table
    succ = successor_table(net3)
    for h in ("0*0", "**1", "1**"):
        cube = Hypercube(h)
        closed = all(format(int(succ[x.rank]), "03b") in cube for x in cube.vertices())
        assert closed == (cube in enumerate_trap_spaces(net3))
