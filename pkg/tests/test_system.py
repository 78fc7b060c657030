from __future__ import annotations

import pytest

from chorc.cfsm import CFSM
from chorc.language import parse_word, words
from chorc.syntax import parse
from chorc.system import (UNBOUNDED, BudgetExceeded, CommSystem, Configuration, ExplorationBudget, Policy,
                          ReplayError, deadlocks, is_stable, language, reachable, replay)
from chorc.verify import build_system, random_choreography

SEND_X, SEND_Y = parse_word("AB!x AB!y")
RECV_X, RECV_Y = parse_word("AB?x AB?y")


def chain(p, *actions):
    states = [f"s{i}" for i in range(len(actions) + 1)]
    return CFSM(p, states, "s0", {(states[i], a, states[i + 1]) for i, a in enumerate(actions)})


def test_initial_configuration():
    s = CommSystem({"A": chain("A", SEND_X), "B": chain("B", RECV_X)})
    c = s.initial()
    assert c == Configuration(("s0", "s0"), ((), ()))
    assert s.channels == (("A", "B"), ("B", "A"))
    assert is_stable(c) and not s.is_deadlock(c)
    empty = CommSystem({})
    assert empty.initial() == Configuration((), ())


def test_non_local_machine_rejected():
    with pytest.raises(ValueError):
        CommSystem({"A": chain("A", RECV_X)})


def test_fifo_blocks_out_of_order_receive():
    machines = {"A": chain("A", SEND_X, SEND_Y), "B": chain("B", RECV_Y, RECV_X)}
    c = Configuration(("s2", "s0"), (("x", "y"), ()))
    assert CommSystem(machines).step(c) == []
    bag = CommSystem(machines, Policy.BAG)
    (a, nxt), = bag.step(c)
    assert a == RECV_Y and nxt.buffers == (("x",), ())
    assert CommSystem(machines).step(Configuration(("s2", "s2"), ((), ()))) == []


def test_deadlock_cases():
    finished = CommSystem({"A": chain("A", SEND_X), "B": chain("B", RECV_X)})
    assert not finished.is_deadlock(Configuration(("s1", "s1"), ((), ())))
    stuck = CommSystem({"A": chain("A", SEND_X), "B": chain("B", RECV_Y)})
    exp = reachable(stuck)
    (d,) = deadlocks(exp)
    assert d == Configuration(("s1", "s0"), (("x",), ()))
    assert exp.path(d) == [SEND_X]
    waiting = CommSystem({"A": chain("A"), "B": chain("B", RECV_Y)})
    assert waiting.is_deadlock(waiting.initial())


def test_reachable_single_interaction():
    s = build_system(parse("A->B:x"))
    assert len(reachable(s).configs) == 3
    assert deadlocks(reachable(s)) == []


def test_budget():
    s = build_system(parse("A->B:x ; B->A:y"))
    with pytest.raises(BudgetExceeded) as info:
        reachable(s, ExplorationBudget(max_configs=1))
    assert len(info.value.partial.parent) == 2
    with pytest.raises(ValueError):
        ExplorationBudget(max_configs=0)
    assert language(s, ExplorationBudget(max_trace_len=1)) == {(), (parse_word("AB!x")[0],)}


def test_system_language_examples():
    assert language(build_system(parse("A->B:x"))) == {(), (SEND_X,), (SEND_X, RECV_X)}
    crossed = parse_word("AB!x AB!y AB?y AB?x")
    g = parse("A->B:x | A->B:y")
    assert crossed not in language(build_system(g))
    assert crossed in language(build_system(g, Policy.BAG))
    assert language(build_system(g, Policy.BAG)) == words(g)


def test_replay():
    s = build_system(parse("A->B:x ; B->A:y"))
    (c,) = replay(s, parse_word("AB!x AB?x"))
    assert c.buffers == ((), ())
    with pytest.raises(ReplayError):
        replay(s, parse_word("AB?x"))


@pytest.mark.parametrize("seed", range(200))
def test_exploration_properties(seed):
    g = random_choreography(seed, 1 + seed % 6)
    fifo = build_system(g)
    one = reachable(fifo, workers=1)
    four = reachable(fifo, workers=4)
    assert one.parent == four.parent
    assert deadlocks(one) == deadlocks(four)
    for c in list(one.configs)[:50]:
        assert c in replay(fifo, one.path(c))
    small = language(fifo, ExplorationBudget(max_trace_len=5))
    assert all(w[:-1] in small for w in small if w)
    bag_small = language(fifo.with_policy(Policy.BAG), ExplorationBudget(max_trace_len=5))
    assert small <= bag_small


def test_unbounded_is_default():
    assert UNBOUNDED.max_configs is None and UNBOUNDED.max_trace_len is None
