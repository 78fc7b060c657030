"""Events, hyperedges and the hypergraph algebra used by the semantics.

A hypergraph is a finite set of hyperedges, each relating a set of source
events to a set of target events.  Composition chains two edges whenever the
target of the first overlaps the source of the second; the closure of a
hypergraph saturates it under composition and is what happens-before is read
from.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .ast import ChorError, ControlPoint, mu

OUT = "!"
IN = "?"


class UndefinedOnControlPoint(ChorError):
    def __init__(self, event):
        super().__init__(f"{event} is a control point, not a communication")
        self.event = event


class UniverseOverlap(ChorError):
    def __init__(self, shared):
        names = ", ".join(str(e) for e in sorted(shared, key=event_key))
        super().__init__(f"hypergraphs share events: {names}")
        self.shared = shared


@dataclass(frozen=True, order=True)
class Action:
    """A communication with its control point erased, e.g. ``AB!x``."""
    sender: str
    receiver: str
    direction: str
    msg: str

    @property
    def subject(self) -> str:
        return self.sender if self.direction == OUT else self.receiver

    @property
    def channel(self) -> tuple[str, str]:
        return (self.sender, self.receiver)

    @property
    def is_output(self) -> bool:
        return self.direction == OUT

    def __str__(self) -> str:
        return f"{self.sender}{self.receiver}{self.direction}{self.msg}"


@dataclass(frozen=True)
class Comm:
    sender: str
    receiver: str
    direction: str
    cp: ControlPoint
    msg: str

    @property
    def action(self) -> Action:
        return Action(self.sender, self.receiver, self.direction, self.msg)

    def __str__(self) -> str:
        return f"{self.action}@{self.cp}"


@dataclass(frozen=True)
class Ctl:
    cp: ControlPoint

    def __str__(self) -> str:
        return str(self.cp)


Event = Union[Comm, Ctl]


def event_key(e: Event) -> tuple:
    """Total order on events: by control point, then control < send < receive."""
    if isinstance(e, Ctl):
        return (e.cp.id, e.cp.barred, 0, "", "", "")
    return (e.cp.id, e.cp.barred, 1 if e.direction == OUT else 2,
            e.sender, e.receiver, e.msg)


def is_control(e: Event) -> bool:
    return isinstance(e, Ctl)


def subject(e: Event) -> str:
    if isinstance(e, Ctl):
        raise UndefinedOnControlPoint(e)
    return e.sender if e.direction == OUT else e.receiver


def act(e: Event) -> Action:
    if isinstance(e, Ctl):
        raise UndefinedOnControlPoint(e)
    return e.action


def send(a: str, b: str, msg: str, cp: ControlPoint) -> Comm:
    return Comm(a, b, OUT, cp, msg)


def recv(a: str, b: str, msg: str, cp: ControlPoint) -> Comm:
    return Comm(a, b, IN, cp, msg)


def _fmt_set(events: Iterable[Event]) -> str:
    items = sorted(events, key=event_key)
    if len(items) == 1:
        return str(items[0])
    return "{" + ", ".join(str(e) for e in items) + "}"


@dataclass(frozen=True)
class HyperEdge:
    source: frozenset
    target: frozenset

    def __post_init__(self):
        # accept any iterable, store frozensets
        object.__setattr__(self, "source", frozenset(self.source))
        object.__setattr__(self, "target", frozenset(self.target))

    @property
    def key(self) -> tuple:
        return (tuple(event_key(e) for e in sorted(self.source, key=event_key)),
                tuple(event_key(e) for e in sorted(self.target, key=event_key)))

    def reversed(self) -> "HyperEdge":
        return HyperEdge(self.target, self.source)

    def __str__(self) -> str:
        return f"({_fmt_set(self.source)}, {_fmt_set(self.target)})"


def edge(source, target) -> HyperEdge:
    """Build an edge; single events stand for singleton sets."""
    if isinstance(source, (Comm, Ctl)):
        source = (source,)
    if isinstance(target, (Comm, Ctl)):
        target = (target,)
    return HyperEdge(frozenset(source), frozenset(target))


@dataclass(frozen=True)
class HyperGraph:
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))

    def __iter__(self) -> Iterator[HyperEdge]:
        return iter(sorted(self.edges, key=lambda h: h.key))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, item) -> bool:
        return item in self.edges

    def __or__(self, other: "HyperGraph") -> "HyperGraph":
        return HyperGraph(self.edges | other.edges)

    def events(self) -> frozenset:
        out = set()
        for h in self.edges:
            out |= h.source
            out |= h.target
        return frozenset(out)

    def comm_events(self) -> frozenset:
        return frozenset(e for e in self.events() if isinstance(e, Comm))

    def reversed(self) -> "HyperGraph":
        return HyperGraph(h.reversed() for h in self.edges)

    def __str__(self) -> str:
        return "{" + ", ".join(str(h) for h in self) + "}"


EMPTY = HyperGraph()


def compose(r: HyperGraph, r2: HyperGraph) -> HyperGraph:
    by_source = defaultdict(list)
    for h in r2.edges:
        for e in h.source:
            by_source[e].append(h)
    out = set()
    for h in r.edges:
        for e in h.target:
            for h2 in by_source.get(e, ()):
                out.add(HyperEdge(h.source, h2.target))
    return HyperGraph(out)


def _edge_reach(r: HyperGraph) -> dict[HyperEdge, set[HyperEdge]]:
    """For each edge, the edges reachable through one or more overlaps (itself included)."""
    by_source = defaultdict(list)
    for h in r.edges:
        for e in h.source:
            by_source[e].append(h)
    reach = {}
    for h in r.edges:
        seen = {h}
        stack = [h]
        while stack:
            cur = stack.pop()
            for e in cur.target:
                for nxt in by_source.get(e, ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
        reach[h] = seen
    return reach


def closure(r: HyperGraph) -> HyperGraph:
    """Union of all n-fold self-compositions of ``r`` for n >= 1."""
    out = set()
    for h, reached in _edge_reach(r).items():
        for h2 in reached:
            out.add(HyperEdge(h.source, h2.target))
    return HyperGraph(out)


def happens_before(r: HyperGraph) -> frozenset:
    """Event pairs ``(e, e2)`` with ``e`` in a source and ``e2`` in a target of ``closure(r)``."""
    pairs = set()
    for h, reached in _edge_reach(r).items():
        targets = set()
        for h2 in reached:
            targets |= h2.target
        for e in h.source:
            for e2 in targets:
                pairs.add((e, e2))
    return frozenset(pairs)


class Order:
    """Successor/predecessor view of a happens-before relation."""

    def __init__(self, pairs: Iterable[tuple[Event, Event]]):
        self.pairs = frozenset(pairs)
        self.succ: dict = defaultdict(set)
        self.pred: dict = defaultdict(set)
        for a, b in self.pairs:
            self.succ[a].add(b)
            self.pred[b].add(a)

    @classmethod
    def of(cls, r: HyperGraph) -> "Order":
        return cls(happens_before(r))

    def before(self, a: Event, b: Event) -> bool:
        return (a, b) in self.pairs


def minima(r: HyperGraph) -> frozenset:
    targets = set()
    for h in r.edges:
        targets |= h.target
    return r.events() - targets


def maxima(r: HyperGraph) -> frozenset:
    sources = set()
    for h in r.edges:
        sources |= h.source
    return r.events() - sources


def _all_control(events: Iterable[Event]) -> bool:
    return all(isinstance(e, Ctl) for e in events)


def is_interaction_edge(h: HyperEdge) -> bool:
    """An edge from a send to the matching receive."""
    if len(h.source) != 1 or len(h.target) != 1:
        return False
    (a,), (b,) = h.source, h.target
    return (isinstance(a, Comm) and isinstance(b, Comm) and a.direction == OUT
            and b.direction != OUT and a.cp == b.cp)


def last_edges(r: HyperGraph, order: Order | None = None) -> frozenset:
    """Interaction edges carrying the last communications: every event after them is a control point.

    Ordering links added by sequential composition never count, so the result
    does not depend on how a sequence is bracketed.
    """
    order = order or Order.of(r)
    return frozenset(h for h in r.edges if is_interaction_edge(h)
                     and all(_all_control(order.succ.get(e, ())) for e in h.target))


def first_edges(r: HyperGraph, order: Order | None = None) -> frozenset:
    """Mirror image of :func:`last_edges`: every event before the edge is a control point."""
    order = order or Order.of(r)
    return frozenset(h for h in r.edges if is_interaction_edge(h)
                     and all(_all_control(order.pred.get(e, ())) for e in h.source))


def _comm_members(edges: Iterable[HyperEdge]) -> set:
    out = set()
    for h in edges:
        out |= {e for e in h.source | h.target if isinstance(e, Comm)}
    return out


def seq_compose(r: HyperGraph, r2: HyperGraph) -> HyperGraph:
    """Sequential composition: the union plus subject-matching links from last to first actions."""
    shared = r.events() & r2.events()
    if shared:
        raise UniverseOverlap(shared)
    before = _comm_members(last_edges(r))
    after = _comm_members(first_edges(r2))
    links = {edge(e, e2) for e in before for e2 in after if subject(e) == subject(e2)}
    return HyperGraph(r.edges | r2.edges | links)


def only_set(events: Iterable[Event], participant: str) -> frozenset:
    """Keep ``participant``'s communications; foreign ones become control points."""
    out = set()
    for e in events:
        if isinstance(e, Ctl) or subject(e) == participant:
            out.add(e)
        elif e.direction == OUT:
            out.add(Ctl(e.cp))
        else:
            out.add(Ctl(mu(e.cp)))
    return frozenset(out)


def only(r: HyperGraph, participant: str) -> HyperGraph:
    return HyperGraph(HyperEdge(only_set(h.source, participant), only_set(h.target, participant))
                      for h in r.edges)


def sqcap(events: Iterable[Event], others: Iterable[Event]) -> frozenset:
    """Actions common to both sets, control points disregarded."""
    return frozenset(act(e) for e in events) & frozenset(act(e) for e in others)
