from __future__ import annotations

import pytest

from chorc.ast import participants
from chorc.cfsm import (CFSM, CycleWithoutBound, InitialMismatch, StateOverlap, determinize, is_acyclic,
                        is_local, isomorphic, minimize, product, project, traces, union)
from chorc.hypergraph import Action
from chorc.language import parse_word
from chorc.syntax import parse
from chorc.verify import random_choreography

from oracles import path_traces, residual_count

AX, AY = Action("A", "B", "?", "x"), Action("A", "B", "?", "y")


def labels(m):
    return sorted(str(a) for _, a, _ in m.transitions)


def test_project_interaction():
    a = project(parse("A->B:x"), "A")
    assert a.states == {"q0", "qe"} and a.transitions == {("q0", Action("A", "B", "!", "x"), "qe")}
    b = project(parse("A->B:x"), "B")
    assert b.transitions == {("q0", Action("A", "B", "?", "x"), "qe")}


def test_project_uninvolved():
    c = project(parse("A->B:x"), "C")
    assert len(c.states) == 1 and not c.transitions


def test_project_parallel_diamond():
    b = project(parse("A->B:x | A->B:y"), "B")
    assert len(b.states) == 4 and len(b.transitions) == 4
    assert labels(b) == ["AB?x", "AB?x", "AB?y", "AB?y"]
    assert traces(b) == {(), (AX,), (AY,), (AX, AY), (AY, AX)}
    assert len(traces(b)) == 5
    assert len(minimize(b).states) == 4


def test_project_choice_shares_entry_and_exit():
    g = parse("A->B:x + A->B:y")
    left, right = project(parse("A->B:x"), "A"), project(parse("A->B:y"), "A")
    assert left.states & right.states == {"q0", "qe"}
    whole = project(g, "A")
    assert whole.states == {"q0", "qe"} and len(whole.transitions) == 2


def test_minimization_example():
    b = project(parse("(A->B:m;A->B:x)+(A->B:m;A->B:y)"), "B")
    assert len(b.states) == 4 and not b.is_deterministic()
    m = minimize(b)
    assert m.states == {"q0", "q1", "q2"}
    assert m.transitions == {("q0", Action("A", "B", "?", "m"), "q1"),
                             ("q1", AX, "q2"), ("q1", AY, "q2")}


def machine(prefix, n, label="AB!x"):
    a = parse_word(label)[0]
    states = [f"{prefix}{i}" for i in range(n)]
    return CFSM("A", states, states[0], {(states[i], a, states[i + 1]) for i in range(n - 1)})


def test_product_counts():
    m, m2 = machine("s", 2), machine("t", 2, "AB!y")
    p = product(m, m2)
    assert len(p.states) == 4 and len(p.transitions) == 4
    m, m2 = machine("s", 3), machine("t", 4, "AB!y")
    p = product(m, m2)
    assert len(p.transitions) == len(m.transitions) * 4 + len(m2.transitions) * 3
    assert p.initial == "(s0,t0)"


def test_product_overlap_and_union_mismatch():
    with pytest.raises(StateOverlap):
        product(machine("s", 2), machine("s", 3))
    with pytest.raises(InitialMismatch):
        union(machine("s", 2), machine("t", 2))
    u = union(machine("s", 2), machine("s", 3, "AB!y"))
    assert len(u.transitions) == 3


def test_traces_cycle_needs_bound():
    a = parse_word("AB!x")[0]
    loop = CFSM("A", {"p"}, "p", {("p", a, "p")})
    assert not is_acyclic(loop)
    with pytest.raises(CycleWithoutBound):
        traces(loop)
    assert traces(loop, 2) == {(), (a,), (a, a)}


def test_minimize_of_minimal_is_isomorphic():
    m = minimize(project(parse("A->B:x ; B->A:y"), "A"))
    assert isomorphic(minimize(m), m)
    assert not isomorphic(m, minimize(project(parse("A->B:x"), "A")))


def test_to_json_and_dot():
    m = minimize(project(parse("A->B:x"), "A"))
    assert m.to_json() == {"participant": "A", "states": ["q0", "q1"], "initial": "q0",
                           "transitions": [{"from": "q0", "label": "AB!x", "to": "q1"}]}
    assert '"q0" -> "q1" [label="AB!x"];' in m.to_dot()


PROJECTIONS = [(seed, p) for seed in range(60) for p in "ABC"]


@pytest.mark.parametrize("seed, p", PROJECTIONS)
def test_projection_properties(seed, p):
    g = random_choreography(seed, 1 + seed % 6)
    m = project(g, p)
    assert is_local(m, p) and is_acyclic(m)
    assert traces(m) == path_traces(m)
    d = determinize(m)
    assert d.is_deterministic() and traces(d) == traces(m)
    mm = minimize(m)
    assert mm.is_deterministic()
    assert traces(mm) == traces(m)
    assert len(mm.states) == residual_count(traces(m))
    assert isomorphic(minimize(mm), mm)
    assert project(g, p) == m and minimize(project(g, p)).to_json() == mm.to_json()
    if p not in participants(g):
        assert len(m.states) == 1
