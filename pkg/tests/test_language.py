from __future__ import annotations

import random

import pytest

from chorc.ast import ControlPoint
from chorc.hypergraph import Comm, Ctl, edge, recv, send
from chorc.language import (IncompleteResolution, LanguageAutomaton, choice_edges, format_word,
                            member, parse_action, parse_word, resolutions, resolve, words)
from chorc.hypergraph import Action
from chorc.semantics import SemanticsUndefined, sem
from chorc.syntax import parse
from chorc.verify import random_choreography

from oracles import comm_count, corpus_terms, psi_words

NESTED = "((A->B:x + A->B:y) + (A->B:x + A->B:y)) ; (A->C:z + A->C:w)"


def w(text):
    return parse_word(text)


def k(i, barred=False):
    return ControlPoint(i, barred)


def test_choice_edges_simple():
    forks = choice_edges(parse("A->B:x + A->B:y"))
    assert forks == {k(1): frozenset({edge(Ctl(k(1)), send("A", "B", "x", k(2))),
                                       edge(Ctl(k(1)), send("A", "B", "y", k(3)))})}
    assert choice_edges(parse("A->B:x")) == {}


def test_choice_edges_nested():
    forks = choice_edges(parse(NESTED))
    assert len(forks) == 4
    assert all(len(hs) == 2 for hs in forks.values())


def test_choice_edges_undefined():
    with pytest.raises(SemanticsUndefined):
        choice_edges(parse("A->B:x ; C->D:y"))


def test_resolve_left_branch():
    g = parse("A->B:x + A->B:y")
    left = next(h for h in choice_edges(g)[k(1)] if send("A", "B", "x", k(2)) in h.target)
    x, xr = send("A", "B", "x", k(2)), recv("A", "B", "x", k(2))
    assert resolve(g, {k(1): left}).edges == {edge(Ctl(k(1)), x), edge(x, xr), edge(xr, Ctl(k(1, True)))}


def test_resolve_without_choices_is_identity():
    g = parse("A->B:x ; B->C:y | C->A:z")
    assert resolve(g, {}) == sem(g).graph


def test_resolve_incomplete():
    with pytest.raises(IncompleteResolution):
        resolve(parse("A->B:x + A->B:y"), {})


def test_resolve_nested_path():
    g = parse(NESTED)
    forks = choice_edges(g)
    outer, left, _, last = sorted(forks)

    def pick(cp, msg_or_target):
        return next(h for h in forks[cp]
                    if any(isinstance(t, Comm) and t.msg == msg_or_target or t == msg_or_target
                           for t in h.target))

    left_fork = next(iter(next(h for h in forks[outer] if Ctl(left) in h.target).target))
    sigma = {outer: next(h for h in forks[outer] if left_fork in h.target),
             left: pick(left, "x"), last: pick(last, "z")}
    graph = resolve(g, sigma)
    assert sorted(str(e.action) for e in graph.comm_events()) == ["AB!x", "AB?x", "AC!z", "AC?z"]


def test_resolutions_count_nested():
    assert len(list(resolutions(parse(NESTED)))) == 8
    assert len(words(parse(NESTED))) == len({format_word(v) for v in words(parse(NESTED))})


def test_words_single():
    assert words(parse("A->B:x")) == {(), w("AB!x"), w("AB!x AB?x")}


def test_words_par_contains_crossed():
    assert w("AB!x AB!y AB?y AB?x") in words(parse("A->B:x | A->B:y"))


def test_words_choice_no_mixing():
    got = words(parse("A->B:x + A->B:y"))
    assert got == {(), w("AB!x"), w("AB!x AB?x"), w("AB!y"), w("AB!y AB?y")}


def test_words_max_len():
    g = parse("A->B:x ; B->C:y")
    assert words(g, 2) == {v for v in words(g) if len(v) <= 2}
    assert words(g, 0) == {()}


@pytest.mark.parametrize("text, word, expected", [
    ("A->B:x", "AB?x", False),
    ("A->B:x", "AB!x AB?x", True),
    ("A->B:x | A->B:y", "AB!x AB!y AB?y AB?x", True),
    ("A->B:x + A->B:y", "AB!x AB?y", False),
    (NESTED, "AB!y AB?y AC!w", True),
    (NESTED, "AC!z", False),
])
def test_member(text, word, expected):
    assert member(parse(text), w(word)) is expected


CORPUS = corpus_terms()
DEFINED = {name: g for name, g in CORPUS.items() if sem(g).defined}


@pytest.mark.parametrize("name", sorted(n for n, g in DEFINED.items() if comm_count(g) <= 8))
def test_words_match_brute_force(name):
    assert words(DEFINED[name]) == psi_words(DEFINED[name])


@pytest.mark.parametrize("name", sorted(DEFINED))
def test_corpus_language_properties(name):
    g = DEFINED[name]
    lang = words(g)
    assert all(v[:i] in lang for v in lang for i in range(len(v)))
    for v in sorted(lang, key=len)[-5:]:
        assert member(g, v)


def random_walk(automaton, rng):
    state, word = automaton.initial, ()
    while True:
        moves = automaton.step(state)
        if not moves:
            return word
        a = rng.choice(sorted(moves))
        state, word = moves[a], word + (a,)


@pytest.mark.parametrize("seed", range(200))
def test_prefix_closure_random(seed):
    g = random_choreography(seed, 1 + seed % 6)
    short = words(g, 5)
    assert all(v[:-1] in short for v in short if v)
    automaton = LanguageAutomaton(g)
    rng = random.Random(seed)
    for _ in range(3):
        walk = random_walk(automaton, rng)
        assert len(walk) in {len(po.events) for po in automaton.orders}
        for i in range(len(walk) + 1):
            assert member(g, walk[:i])


def test_parse_word_forms():
    assert parse_action("AB!x") == Action("A", "B", "!", "x")
    assert parse_action("Alice>Bob?m") == Action("Alice", "Bob", "?", "m")
    assert parse_action("AliceBob!m", {"Alice", "Bob"}) == Action("Alice", "Bob", "!", "m")
    assert format_word(w("AB!x BA?y")) == "AB!x BA?y"
    for bad in ("AB", "AB!", "ABC!x"):
        with pytest.raises(ValueError):
            parse_action(bad)
