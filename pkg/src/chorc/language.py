"""Trace language of a g-choreography.

A resolution picks one outgoing edge for every choice fork; removing the other
fork edges and trimming what became unreachable leaves a hypergraph whose
happens-before on communication events is a partial order.  The language is
the set of action sequences that are prefixes of linear extensions of one of
these orders.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterator, Mapping, Optional, Sequence

from .ast import ChorError, ControlPoint, mu
from .hypergraph import (Action, Comm, Ctl, HyperEdge, HyperGraph, Order, event_key,
                         happens_before, minima)
from .semantics import SemanticsUndefined, sem


class IncompleteResolution(ChorError):
    pass


Word = tuple  # of Action


def _graph(g) -> HyperGraph:
    if isinstance(g, HyperGraph):
        return g
    res = sem(g)
    if not res.defined:
        raise SemanticsUndefined(res.reason)
    return res.graph


def choice_edges(g) -> dict[ControlPoint, frozenset]:
    """Fork edges of every choice, keyed by the choice's control point."""
    out = defaultdict(set)
    for h in _graph(g).edges:
        if len(h.source) == 1:
            (src,) = h.source
            if isinstance(src, Ctl) and not src.cp.barred:
                out[src.cp].add(h)
    return {k: frozenset(v) for k, v in sorted(out.items())}


def trim(r: HyperGraph, roots) -> HyperGraph:
    """Keep events reachable from ``roots``; an edge fires once any of its sources is reached."""
    reached = set(roots)
    by_source = defaultdict(list)
    for h in r.edges:
        for e in h.source:
            by_source[e].append(h)
    stack = list(reached)
    while stack:
        e = stack.pop()
        for h in by_source.get(e, ()):
            for t in h.target:
                if t not in reached:
                    reached.add(t)
                    stack.append(t)
    out = set()
    for h in r.edges:
        src, tgt = h.source & reached, h.target & reached
        if src and tgt:
            out.add(HyperEdge(src, tgt))
    return HyperGraph(out)


def _prune(full: HyperGraph, forks: dict, sigma: Mapping, order: Order) -> HyperGraph:
    """Drop the fork edges ``sigma`` did not pick together with the branches behind them.

    Sequential composition links the events before a choice straight to the
    first actions of its branches, so cutting the fork edge alone leaves an
    unselected branch reachable.  A branch is recovered as the events at or
    after the dropped fork's targets that still precede the matching merge.
    """
    dropped, doomed = set(), set()
    for k, chosen in sigma.items():
        merge = Ctl(mu(k))
        for h in forks[k] - {chosen}:
            dropped.add(h)
            for e in h.target:
                doomed.update(x for x in {e} | order.succ.get(e, set())
                              if x == merge or order.before(x, merge))
            doomed.discard(merge)
    out = set()
    for h in full.edges - dropped:
        src, tgt = h.source - doomed, h.target - doomed
        if src and tgt:
            out.add(HyperEdge(src, tgt))
    return HyperGraph(out)


def resolve(g, sigma: Mapping[ControlPoint, HyperEdge]) -> HyperGraph:
    """The trimmed hypergraph selected by ``sigma``."""
    full = _graph(g)
    forks = choice_edges(full)
    for k, chosen in sigma.items():
        if k not in forks or chosen not in forks[k]:
            raise IncompleteResolution(f"{chosen} is not a branch of choice {k}")
    resolved = trim(_prune(full, forks, sigma, Order.of(full)), minima(full))
    pending = _open_choices(resolved, forks, sigma)
    if pending:
        names = ", ".join(str(k) for k in pending)
        raise IncompleteResolution(f"no branch selected for reachable choice(s) {names}")
    return resolved


def _open_choices(graph: HyperGraph, forks: dict, sigma: Mapping) -> list:
    present = graph.edges
    return [k for k, hs in forks.items() if k not in sigma and hs & present]


def resolutions(g) -> Iterator[tuple[dict, HyperGraph]]:
    """All (resolution, resolved graph) pairs, deciding only choices that remain reachable."""
    full = _graph(g)
    forks = choice_edges(full)
    roots = minima(full)
    order = Order.of(full)

    def go(sigma: dict) -> Iterator[tuple[dict, HyperGraph]]:
        current = trim(_prune(full, forks, sigma, order), roots)
        pending = _open_choices(current, forks, sigma)
        if not pending:
            yield dict(sigma), current
            return
        k = pending[0]
        for h in sorted(forks[k], key=lambda h: h.key):
            sigma[k] = h
            yield from go(sigma)
            del sigma[k]

    yield from go({})


class PartialOrder:
    """Communication events of a resolved graph with their strict predecessors."""

    def __init__(self, graph: HyperGraph):
        self.graph = graph
        self.events = sorted(graph.comm_events(), key=event_key)
        order = Order(happens_before(graph))
        self.preds = {e: frozenset(p for p in order.pred.get(e, ()) if isinstance(p, Comm))
                      for e in self.events}

    def enabled(self, done: frozenset) -> list:
        return [e for e in self.events if e not in done and self.preds[e] <= done]


def orders(g) -> list[PartialOrder]:
    return [PartialOrder(graph) for _, graph in resolutions(g)]


def words(g, max_len: Optional[int] = None) -> frozenset:
    """The prefix-closed language, optionally truncated to words of length ``<= max_len``."""
    out: set = {()}
    for po in orders(g):
        seen_states: set = set()

        def extend(done: frozenset, word: tuple):
            if (done, word) in seen_states:
                return
            seen_states.add((done, word))
            out.add(word)
            if max_len is not None and len(word) >= max_len:
                return
            for e in po.enabled(done):
                extend(done | {e}, word + (e.action,))

        extend(frozenset(), ())
    return frozenset(out)


def member(g, w: Sequence[Action]) -> bool:
    """Search an event sequence and resolution realising ``w``."""
    w = tuple(w)
    for po in orders(g):
        failed: set = set()

        def search(done: frozenset, i: int) -> bool:
            if i == len(w):
                return True
            if (done, i) in failed:
                return False
            for e in po.enabled(done):
                if e.action == w[i] and search(done | {e}, i + 1):
                    return True
            failed.add((done, i))
            return False

        if search(frozenset(), 0):
            return True
    return False


class LanguageAutomaton:
    """Deterministic view of the language: a state is the set of (order, done-events) pairs
    reachable by the word read so far."""

    def __init__(self, g):
        self.orders = orders(g)
        self.initial = frozenset((i, frozenset()) for i in range(len(self.orders)))

    def step(self, state: frozenset) -> dict[Action, frozenset]:
        out = defaultdict(set)
        for i, done in state:
            for e in self.orders[i].enabled(done):
                out[e.action].add((i, done | {e}))
        return {a: frozenset(s) for a, s in out.items()}


def format_word(w: Sequence[Action]) -> str:
    return " ".join(str(a) for a in w)


def parse_action(text: str, participants=None) -> Action:
    """Read ``AB!m`` / ``AB?m``; ``A>B!m`` is accepted for multi-letter names."""
    for d in ("!", "?"):
        if d in text:
            chan, msg = text.split(d, 1)
            break
    else:
        raise ValueError(f"not an action: {text!r}")
    if not msg:
        raise ValueError(f"not an action: {text!r}")
    if ">" in chan:
        a, b = chan.split(">", 1)
        return Action(a, b, d, msg)
    splits = [(chan[:i], chan[i:]) for i in range(1, len(chan))]
    if participants is not None:
        splits = [s for s in splits if s[0] in participants and s[1] in participants]
    elif len(chan) == 2:
        splits = [(chan[0], chan[1])]
    if len(splits) != 1:
        raise ValueError(f"ambiguous or unknown channel in {text!r}")
    a, b = splits[0]
    return Action(a, b, d, msg)


def parse_word(text: str, participants=None) -> Word:
    return tuple(parse_action(t, participants) for t in text.split())
