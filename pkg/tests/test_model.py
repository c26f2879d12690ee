import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trapkit.errors import GuardError, ParseError, ValidationError
from trapkit.model import (
    TRUE,
    Bdd,
    BooleanNetwork,
    Configuration,
    Const,
    Dnf,
    Dnf01,
    Formula,
    FunctionalGraph,
    Hypercube,
    Not,
    Or,
    TtLocal,
    Var,
    convert,
    convert_local,
    dependency_set,
    evaluate,
    io,
    truth_values,
)
from trapkit.model.convert import ARITY_GUARD
from trapkit.sampling import random_network

# x1 & !(x2 & !x3), the running unate example
UNATE3 = Formula(Var(1) & Not(Var(2) & Not(Var(3))))


def cubes(n):
    return [Hypercube("".join(c)) for c in itertools.product("01*", repeat=n)]


# ------------------------------------------------------------ configurations / hypercubes


def test_configuration_indexing_is_one_based():
    x = Configuration("011")
    assert (x[1], x[2], x[3]) == (0, 1, 1)
    assert x.rank == 3
    assert Configuration.from_rank(6, 3) == Configuration("110")


@pytest.mark.parametrize("bad", ["", "012", "a"])
def test_configuration_rejects_bad_strings(bad):
    with pytest.raises(ValidationError):
        Configuration(bad)


def test_hypercube_free_fixed_and_vertices():
    h = Hypercube("1*0*")
    assert h.free == (2, 4)
    assert h.fixed == (1, 3)
    assert [str(v) for v in h.vertices()] == ["1000", "1001", "1100", "1101"]
    assert h.size() == 4
    assert Hypercube.from_masks(*h.masks, 4) == h


def test_vertex_membership():
    assert "101" in Hypercube("1*1")
    assert "001" not in Hypercube("1*1")
    assert "10" not in Hypercube("1*1")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cellwise_inclusion_matches_vertex_sets(n):
    all_cubes = cubes(n)
    verts = {h: set(map(str, h.vertices())) for h in all_cubes}
    for a in all_cubes:
        for b in all_cubes:
            assert a.issubcube(b) == (verts[a] <= verts[b])


@given(st.text("01*", min_size=5, max_size=6), st.text("01*", min_size=5, max_size=6))
def test_inclusion_property_up_to_six(a, b):
    n = min(len(a), len(b))
    ha, hb = Hypercube(a[:n]), Hypercube(b[:n])
    va = set(map(str, ha.vertices()))
    vb = set(map(str, hb.vertices()))
    assert ha.issubcube(hb) == (va <= vb)


# ------------------------------------------------------------ local functions


def test_tt_validates_shape():
    with pytest.raises(ValidationError):
        TtLocal((1, 2), "010")
    with pytest.raises(ValidationError):
        TtLocal((1, 1), "0101")


def test_bdd_must_be_free():
    # node 3 tests x1 and reaches node 2, which tests x1 again
    nodes = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 2, 1))
    with pytest.raises(ValidationError, match="not free"):
        BooleanNetwork((Bdd(nodes, 3),))


def test_dnf01_consistency_checked():
    bad = Dnf01(Dnf((((1, True),),)), Dnf((((1, True),),)))
    with pytest.raises(ValidationError, match="inconsistent"):
        BooleanNetwork((bad,))


def test_ordering_checked():
    with pytest.raises(ValidationError, match="not unate"):
        BooleanNetwork((UNATE3.with_ordering("+++"), Formula(Var(1)), Formula(Var(1))))
    BooleanNetwork((UNATE3.with_ordering("+-+"), Formula(Var(1)), Formula(Var(1))))


def test_index_out_of_range_reports_component():
    with pytest.raises(ValidationError) as exc:
        BooleanNetwork((Formula(Var(1)), Formula(Var(3))))
    assert exc.value.component == 2


def test_empty_network_rejected():
    with pytest.raises(ValidationError, match="empty network"):
        BooleanNetwork(())
    with pytest.raises(ParseError, match="empty network"):
        io.parse_network("# nothing here\n", "formula")


# ------------------------------------------------------------ parsing


def test_parse_net3(net3):
    assert net3.n == 3
    f1 = net3[1]
    for x in ("000", "001", "011", "101", "111"):
        a = [int(c) for c in x]
        assert evaluate(f1, x) == int((not a[0] or not a[1]) and a[2])


def test_parse_tt_line():
    net = io.parse_network("1: k=3 p=1,2,3 t=00001101\n2: k=0 p= t=0\n3: k=1 p=3 t=01\n", "tt")
    f = net[1]
    for x in itertools.product((0, 1), repeat=3):
        s = "".join(map(str, x))
        assert evaluate(f, s) == int(x[0] and not (x[1] and not x[2]))


def test_parse_error_has_position():
    with pytest.raises(ParseError) as exc:
        io.parse_network("x1, x1 &\n", "formula")
    assert exc.value.line == 1


def test_parse_unknown_name():
    with pytest.raises(ParseError, match="unknown"):
        io.parse_network("x1, x7\n", "formula")


def test_parse_unate_annotation():
    text = "a, a & !b\nb, a\nunate: a: +-\nunate: b: ++\n"
    net = io.parse_network(text, "formula")
    assert net[1].ordering == "+-"
    assert net.locally_monotone


def test_parse_bdd_block():
    text = """
    1 { n1 var=1 lo=T0 hi=n2  n2 var=2 lo=T1 hi=n3  n3 var=3 lo=T0 hi=T1  root=n1 }
    2 { root=T1 }
    3 { root=T0 }
    """
    net = io.parse_network(text, "bdd")
    assert [evaluate(net[1], "".join(x)) for x in itertools.product("01", repeat=3)] == [
        0, 0, 0, 0, 1, 1, 0, 1
    ]
    assert evaluate(net[2], "000") == 1


def test_parse_d01():
    net = io.parse_network("1.0: !1; 2,!3\n1.1: 1,!2; 1,3\n2.0: FALSE\n2.1: TRUE\n3.0: 3\n3.1: !3\n", "dnf01")
    assert evaluate(net[1], "100") == 1
    assert evaluate(net[1], "110") == 0
    assert evaluate(net[2], "000") == 1


def test_parse_fg_checks_completeness():
    G = io.parse_network("0 -> 1\n1 -> 1\n", "fg")
    assert isinstance(G, FunctionalGraph)
    assert G.successor(Configuration("0")) == Configuration("1")
    with pytest.raises(ParseError):
        io.parse_network("0 -> 1\n", "fg")


def test_boolnet_header_is_skipped():
    net = io.parse_network("targets, factors\nA, B\nB, !A\n", "formula")
    assert net.component_names() == ("A", "B")


@pytest.mark.parametrize("fmt", ["formula", "tt", "bdd", "dnf01"])
def test_round_trip_every_format(fmt):
    rng = np.random.default_rng(5)
    for _ in range(10):
        net = random_network(rng, int(rng.integers(1, 6)))
        back = io.parse_network(io.serialize(net, fmt), fmt)
        rows = list(itertools.product("01", repeat=net.n))
        for i in range(1, net.n + 1):
            for x in rows:
                s = "".join(x)
                assert evaluate(back[i], s) == evaluate(net[i], s)


def test_fg_round_trip(net3):
    G = io.parse_network(io.serialize(net3, "fg"), "fg")
    assert G.successor(Configuration("111")) == Configuration("011")


def test_load_and_dump(tmp_path, net3):
    path = tmp_path / "net.d01"
    io.dump(net3, path)
    back = io.load(path)
    assert back[2].encoding == "dnf01"


# ------------------------------------------------------------ conversion & dependence


def test_unate3_truth_table():
    tt = convert_local(UNATE3, "tt", 3)
    assert tt.p == (1, 2, 3)
    assert tt.t == "00001101"


def test_unate3_bdd_matches_drawing():
    bdd = convert_local(UNATE3, "bdd", 3)
    # x1 -0-> 0, x1 -1-> x2; x2 -0-> 1, x2 -1-> x3; x3 -0-> 0, x3 -1-> 1
    root = bdd.nodes[bdd.root]
    assert root[0] == 1 and root[1] == 0
    x2 = bdd.nodes[root[2]]
    assert x2[0] == 2 and x2[1] == 1
    x3 = bdd.nodes[x2[2]]
    assert x3 == (3, 0, 1)
    assert len(bdd.nodes) == 5


def test_constant_to_dnf01():
    d = convert_local(Formula(TRUE), "dnf01", 2)
    assert d.phi1.clauses == ((),)
    assert d.phi0.clauses == ()


@pytest.mark.parametrize("target", ["formula", "dnf", "tt", "bdd", "dnf01"])
def test_convert_net3_pointwise(net3, target):
    conv = convert(net3, target)
    for x in itertools.product("01", repeat=3):
        s = "".join(x)
        for i in (1, 2, 3):
            assert evaluate(conv[i], s) == evaluate(net3[i], s)


@given(st.integers(0, 2**31 - 1), st.integers(1, 8))
def test_convert_preserves_semantics(seed, n):
    net = random_network(seed, n, max_inputs=4)
    variables = range(1, n + 1)
    for target in ("tt", "bdd", "dnf01", "dnf", "formula"):
        conv = convert(net, target)
        for a, b in zip(net.locals, conv.locals):
            assert np.array_equal(truth_values(a, variables), truth_values(b, variables))


def test_orderings_survive_only_formula_and_dnf():
    fn = UNATE3.with_ordering("+-+")
    assert convert_local(fn, "dnf", 3).ordering == "+-+"
    assert convert_local(fn, "tt", 3).ordering is None
    net = BooleanNetwork((fn, Formula(Var(1)).with_ordering("+++"), Formula(Var(2)).with_ordering("+++")))
    assert net.locally_monotone
    assert not convert(net, "bdd").locally_monotone


def test_dependency_sets(net3):
    assert dependency_set(UNATE3, 3) == {1, 2, 3}
    assert dependency_set(Formula(Var(1) | Not(Var(1))), 1) == frozenset()
    assert dependency_set(convert_local(net3[2], "dnf01", 3), 3) == {1, 3}


def test_tt_arity_equals_dependency_set():
    fn = Formula((Var(1) & Var(2)) | (Var(1) & Not(Var(2))) | (Var(3) & Not(Var(3))))
    tt = convert_local(fn, "tt", 3)
    assert tt.p == (1,)
    assert tt.t == "01"


def test_conversion_arity_guard():
    wide = Formula(Or(tuple(Var(i) for i in range(1, ARITY_GUARD + 2))))
    with pytest.raises(GuardError):
        convert_local(wide, "tt", ARITY_GUARD + 1)


def test_constant_local_evaluates():
    assert evaluate(Formula(Const(0)), "101") == 0
