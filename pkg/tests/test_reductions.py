import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trapkit import kernels
from trapkit.deciders import compute_T, in_mintrap, mintrap, trapspace, verify_witness
from trapkit.errors import ParseError, ValidationError
from trapkit.model import Dnf, Formula, Hypercube, Not, Var, convert, dependency_set, evaluate
from trapkit.oracle import oracle_in_mintrap, oracle_mintrap, oracle_trapspace
from trapkit.reductions import (
    QbfInstance,
    brute_qbf,
    brute_taut,
    gen_dnf_taut_chain,
    gen_dnf_taut_monotone,
    gen_pi2_mintrap,
    gen_tautology_trapspace,
    parse_dnf_instance,
    parse_formula_instance,
    parse_qbf_instance,
    reduce_instance,
)
from trapkit.sampling import random_dnf, random_formula, random_qbf, rng_for

y1, y2 = Var(1), Var(2)
XOR12 = Formula((y1 & Not(y2)) | (Not(y1) & y2))
AND12 = Formula(y1 & y2)


def lit(v, pol=True):
    return (v, pol)


# ------------------------------------------------------------ TAUTOLOGY -> TRAPSPACE


def test_taut_examples():
    inst = gen_tautology_trapspace(Formula(y1 | Not(y1)))
    assert inst.network.n == 2 and str(inst.target_hypercube) == "*1"
    assert trapspace(inst.network, inst.target_hypercube).answer

    inst = gen_tautology_trapspace(Formula(y1))
    v = trapspace(inst.network, inst.target_hypercube)
    assert not v.answer
    assert v.witness.component == 2 and str(v.witness.config) == "01"


def test_taut_unsatisfiable_matrix():
    clauses = [y1 | y2, y1 | Not(y2), Not(y1) | y2, Not(y1) | Not(y2)]
    phi = Formula(clauses[0] & clauses[1] & clauses[2] & clauses[3])
    inst = gen_tautology_trapspace(phi)
    assert not brute_taut(phi)
    assert not trapspace(inst.network, inst.target_hypercube).answer


def test_taut_names_and_manifest():
    inst = gen_tautology_trapspace(Formula(y1 | y2))
    assert inst.network.component_names() == ("y1", "y2", "a1")
    m = inst.manifest()
    assert m["target_hypercube"] == "**1" and m["target_configuration"] is None
    assert m["expected_problem"] == "TRAPSPACE"


# ------------------------------------------------------------ Pi2 -> MINTRAP


def test_pi2_xor_is_true():
    q = QbfInstance(1, 2, XOR12)
    assert brute_qbf(q)
    inst = gen_pi2_mintrap(q)
    assert inst.network.n == 4
    assert str(inst.target_hypercube) == "****" and str(inst.target_configuration) == "1111"
    assert mintrap(inst.network, "****").answer
    assert in_mintrap(inst.network, "1111").answer
    assert oracle_mintrap(inst.network, "****")


def test_pi2_and_is_false_with_small_trap():
    q = QbfInstance(1, 2, AND12)
    assert not brute_qbf(q)
    inst = gen_pi2_mintrap(q)
    v = mintrap(inst.network, "****")
    assert not v.answer
    assert verify_witness(inst.network, "****", v)
    # the trap space y1=0, y2 free, both auxiliaries 0
    assert trapspace(inst.network, "0*00").answer
    assert compute_T(inst.network, "0000") == Hypercube("0*00")


def test_pi2_degenerate_universal_only():
    q = QbfInstance(2, 2, Formula(y1 | Not(y1) | y2))
    assert brute_qbf(q)
    assert mintrap(gen_pi2_mintrap(q).network, "****").answer


def test_qbf_validation():
    with pytest.raises(ValidationError):
        QbfInstance(3, 2, AND12)
    with pytest.raises(ValidationError):
        QbfInstance(1, 1, AND12)


# ------------------------------------------------------------ DNF TAUTOLOGY -> MINTRAP


def test_monotone_examples():
    inst = gen_dnf_taut_monotone(Dnf(((),)), 1)
    assert inst.network.n == 4
    assert mintrap(inst.network, "****").answer

    inst = gen_dnf_taut_monotone(Dnf(((lit(1),),)), 1)
    assert str(kernels.eval_network(inst.network, "0000")) == "0000"
    v = mintrap(inst.network, "****")
    assert not v.answer and verify_witness(inst.network, "****", v)

    inst = gen_dnf_taut_monotone(Dnf(((lit(1),), (lit(1, False),))), 1)
    assert inst.network.n == 5
    assert mintrap(inst.network, "*****").answer
    assert oracle_mintrap(inst.network, "*****")


def test_monotone_empty_dnf_is_not_a_tautology():
    inst = gen_dnf_taut_monotone(Dnf(()), 2)
    assert inst.network.n == 4
    assert not mintrap(inst.network, "****").answer


def test_monotone_drops_contradictory_clauses():
    phi = Dnf(((lit(1), lit(1, False)), (lit(2),)))
    inst = gen_dnf_taut_monotone(phi, 2)
    assert inst.network.n == 2 + 1 + 2


def test_chain_examples():
    inst = gen_dnf_taut_chain(Dnf(((),)), 1)
    assert inst.network.n == 5
    assert mintrap(inst.network, "*****").answer

    inst = gen_dnf_taut_chain(Dnf(((lit(1),),)), 1)
    assert str(kernels.eval_network(inst.network, "00000")) == "00000"
    assert not mintrap(inst.network, "*****").answer


def test_chain_tautology_under_every_encoding():
    phi = Dnf(((lit(1), lit(2)), (lit(1, False),), (lit(1), lit(2, False))))
    assert brute_taut(phi)
    inst = gen_dnf_taut_chain(phi, 2)
    assert inst.network.n == 10
    assert inst.network.component_names()[-2:] == ("a1", "a2")
    assert oracle_mintrap(inst.network, "*" * 10)
    for enc in ("tt", "bdd", "dnf01"):
        net = convert(inst.network, enc)
        assert mintrap(net, "*" * 10).answer
        assert in_mintrap(net, "1" * 10).answer


def test_chain_rejects_wide_clauses_and_empty_dnf():
    with pytest.raises(ValidationError):
        gen_dnf_taut_chain(Dnf(((lit(1), lit(2), lit(3), lit(4)),)))
    with pytest.raises(ValidationError):
        gen_dnf_taut_chain(Dnf(()), 2)


# ------------------------------------------------------------ brute force


def test_brute_examples():
    assert brute_qbf(QbfInstance(1, 2, XOR12))
    assert not brute_qbf(QbfInstance(1, 2, AND12))
    assert brute_taut(Formula(y1 | Not(y1)))
    assert not brute_taut(Formula(y1))


@given(st.integers(0, 2**31 - 1))
def test_brute_qbf_matches_nested_loops(seed):
    q = random_qbf(rng_for(seed), 4)
    expected = all(
        any(
            evaluate(q.matrix, "".join(u + e)) == 1
            for e in itertools.product("01", repeat=q.n2 - q.n1)
        )
        for u in itertools.product("01", repeat=q.n1)
    )
    assert brute_qbf(q) == expected


# ------------------------------------------------------------ structure


@given(st.integers(0, 2**31 - 1), st.integers(1, 5), st.integers(0, 4))
def test_monotone_orderings_are_valid(seed, n, k):
    inst = gen_dnf_taut_monotone(random_dnf(rng_for(seed), n, k), n)
    net = inst.network
    assert net.locally_monotone
    for fn in net.locals:
        inferred = kernels.infer_unate_ordering(fn, net.n)
        assert inferred is not None
        # attached signs agree with inferred ones wherever the variable matters
        deps = dependency_set(fn, net.n)
        assert all(fn.ordering[v - 1] == inferred[v - 1] for v in deps)


@given(st.integers(0, 2**31 - 1), st.integers(1, 5), st.integers(1, 4))
def test_chain_arity_is_bounded(seed, n, k):
    inst = gen_dnf_taut_chain(random_dnf(rng_for(seed), n, k), n)
    net = inst.network
    assert all(len(dependency_set(fn, net.n)) <= 5 for fn in net.locals)


# ------------------------------------------------------------ closure observations


def _cubes(n):
    return ("".join(c) for c in itertools.product("01*", repeat=n))


@given(st.integers(0, 2**31 - 1))
def test_satisfying_vertex_frees_both_auxiliaries(seed):
    q = random_qbf(rng_for(seed), 3)
    net = gen_pi2_mintrap(q).network
    N = q.n2 + 2
    for h in _cubes(N):
        cube = Hypercube(h)
        if any(evaluate(q.matrix, str(x)[: q.n2] + "00") for x in cube.vertices()):
            t = str(compute_T(net, cube))
            assert t[-2:] == "**", (h, t)


@given(st.integers(0, 2**31 - 1))
def test_negation_components_always_free(seed):
    q = random_qbf(rng_for(seed), 3)
    net = gen_pi2_mintrap(q).network
    neg = range(q.n1, q.n2)
    for h in _cubes(q.n2 + 2):
        t = str(compute_T(net, h))
        assert all(t[j] == "*" for j in neg)


@given(st.integers(0, 2**31 - 1), st.integers(0, 2))
def test_free_auxiliaries_free_the_overridden_cells(seed, which):
    rng = rng_for(seed)
    if which == 0:
        net = gen_pi2_mintrap(random_qbf(rng, 3)).network
    elif which == 1:
        net = gen_dnf_taut_monotone(random_dnf(rng, 3, 2), 3).network
    else:
        net = gen_dnf_taut_chain(random_dnf(rng, 3, 2), 3).network
    N = net.n
    for _ in range(30):
        base = "".join(rng.choice(list("01*"), size=N - 2))
        t = str(compute_T(net, base + "**"))
        assert t == "*" * N


# ------------------------------------------------------------ soundness at small scale


@pytest.mark.parametrize("seed", range(30))
def test_generators_agree_with_brute_force_and_oracle(seed):
    rng = rng_for(seed)
    phi = random_formula(rng, 1 + seed % 4)
    inst = gen_tautology_trapspace(phi)
    truth = brute_taut(phi, inst.network.n - 1)
    assert trapspace(inst.network, inst.target_hypercube).answer == truth
    assert oracle_trapspace(inst.network, inst.target_hypercube) == truth

    q = random_qbf(rng, 1 + seed % 4)
    inst = gen_pi2_mintrap(q)
    truth = brute_qbf(q)
    assert mintrap(inst.network, inst.target_hypercube).answer == truth
    assert in_mintrap(inst.network, inst.target_configuration).answer == truth
    assert oracle_in_mintrap(inst.network, inst.target_configuration) == truth

    n = 1 + seed % 3
    phi = random_dnf(rng, n, 1 + seed % 3)
    truth = brute_taut(phi, n)
    for gen in (gen_dnf_taut_monotone, gen_dnf_taut_chain):
        inst = gen(phi, n)
        assert mintrap(inst.network, inst.target_hypercube).answer == truth
        assert oracle_mintrap(inst.network, inst.target_hypercube) == truth


def test_random_dnfs_include_tautologies():
    # sanity check on the sampler: the soundness tests see both answers
    rng = np.random.default_rng(0)
    answers = {brute_taut(random_dnf(rng, 1, 3), 1) for _ in range(100)}
    assert answers == {True, False}


# ------------------------------------------------------------ instance files


def test_parse_dnf_instance():
    phi, n = parse_dnf_instance("vars 3\n1,2; !1\n1,!2\n")
    assert n == 3 and len(phi.clauses) == 3
    phi, n = parse_dnf_instance("1; !1\n")
    assert n == 1
    with pytest.raises(ParseError):
        parse_dnf_instance("vars 1\n1,2\n")


def test_parse_formula_instance():
    phi, n = parse_formula_instance("x1 | !x1\n")
    assert n == 1 and brute_taut(phi, n)
    phi, n = parse_formula_instance("vars 3\ny1 & y2\n")
    assert n == 3
    with pytest.raises(ParseError):
        parse_formula_instance("x1\nx2\n")


def test_parse_qbf_instance():
    q = parse_qbf_instance("forall 1 exists 1\n(y1 & !y2) | (!y1 & y2)\n")
    assert (q.n1, q.n2) == (1, 2) and brute_qbf(q)
    with pytest.raises(ParseError):
        parse_qbf_instance("y1 & y2\n")


def test_reduce_instance_dispatch():
    assert reduce_instance("taut", "x1 | !x1\n").network.n == 2
    assert reduce_instance("pi2", "forall 1 exists 1\ny1 & y2\n").network.n == 4
    assert reduce_instance("monotone", "1; !1\n").network.n == 5
    assert reduce_instance("chain", "1,2; !1; 1,!2\n").network.n == 10
    with pytest.raises(ValidationError):
        reduce_instance("nope", "")
