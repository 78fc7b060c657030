"""Hypergraph semantics of g-choreographies and the well-branchedness check.

``sem`` maps a term to a hypergraph of events, or to an ``Undefined`` verdict
that names why: a sequential composition whose last actions do not causally
precede the first actions of its continuation, or a choice that is not
well-branched.

Well-branchedness classifies every participant of a choice as active (it
selects the branch by sending distinct messages) or passive (it learns the
branch from distinct inputs), after discounting behaviour common to both
branches through a reflection.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .ast import ChorError, ControlPoint, GChor, Interaction, Par, Seq, Zero, mu, participants
from .hypergraph import (EMPTY, IN, OUT, Comm, Ctl, Event, HyperEdge, HyperGraph, Order, edge,
                         event_key, first_edges, happens_before, last_edges, maxima, minima,
                         recv, send, seq_compose, sqcap)


class SemanticsUndefined(ChorError):
    def __init__(self, reason):
        super().__init__(f"semantics undefined: {reason}")
        self.reason = reason


class InvalidReflection(ChorError):
    pass


# -- reflections -------------------------------------------------------------

@dataclass(frozen=True)
class Reflection:
    """An action- and order-preserving bijection between subject-A events of two branches."""
    pairs: tuple = ()

    @property
    def left(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    @property
    def right(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    @property
    def bijection(self) -> dict:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        if not self.pairs:
            return "{}"
        return "{" + ", ".join(f"{a}->{b}" for a, b in self.pairs) + "}"

    @classmethod
    def of(cls, mapping) -> "Reflection":
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(tuple(sorted(items, key=lambda p: event_key(p[0]))))


EMPTY_REFLECTION = Reflection()


class _Branch:
    """One branch of a choice with its happens-before relation precomputed."""

    def __init__(self, graph: HyperGraph):
        self.graph = graph
        self.order = Order.of(graph)
        self.comm = graph.comm_events()

    def owned(self, participant: str) -> list:
        return sorted((e for e in self.comm if _subj(e) == participant), key=event_key)

    def before(self, a: Event, b: Event) -> bool:
        return (a, b) in self.order.pairs


def _subj(e: Comm) -> str:
    return e.sender if e.direction == OUT else e.receiver


def _as_graph(g: Union[GChor, HyperGraph]) -> HyperGraph:
    if isinstance(g, HyperGraph):
        return g
    res = sem(g)
    if not res.defined:
        raise SemanticsUndefined(res.reason)
    return res.graph


def _as_branch(g) -> _Branch:
    return g if isinstance(g, _Branch) else _Branch(_as_graph(g))


def is_reflection(refl: Reflection, participant: str, g, g2) -> bool:
    """Check the three reflection conditions directly against both orders."""
    b1, b2 = _as_branch(g), _as_branch(g2)
    phi = refl.bijection
    if len(phi) != len(set(phi.values())):
        return False
    for e, e2 in phi.items():
        if e not in b1.comm or e2 not in b2.comm:
            return False
        if _subj(e) != participant or _subj(e2) != participant or e.action != e2.action:
            return False
    inverse = {v: k for k, v in phi.items()}
    for side, other, fwd in ((b1, b2, phi), (b2, b1, inverse)):
        for later in fwd:
            for earlier in side.order.pred.get(later, ()):
                if not isinstance(earlier, Comm) or _subj(earlier) != participant:
                    continue
                if earlier not in fwd or not other.before(fwd[earlier], fwd[later]):
                    return False
    return True


def _ideals(events: list, branch: _Branch, participant: str, limit: int) -> Iterator[list]:
    """Downward-closed subsets of ``events`` (w.r.t. participant-owned predecessors), by size."""
    owned = set(events)
    preds = {e: {p for p in branch.order.pred.get(e, ()) if p in owned} for e in events}
    level = [frozenset()]
    yield []
    for _ in range(min(limit, len(events))):
        nxt = set()
        for ideal in level:
            for e in events:
                if e not in ideal and preds[e] <= ideal:
                    nxt.add(ideal | {e})
        if not nxt:
            return
        level = sorted(nxt, key=lambda s: [event_key(e) for e in sorted(s, key=event_key)])
        for ideal in level:
            yield sorted(ideal, key=lambda e: (len(preds[e]), event_key(e)))


def find_reflections(g, g2, participant: str, max_size: Optional[int] = None) -> Iterator[Reflection]:
    """Enumerate reflections lazily: the empty one first, then by increasing size."""
    b1, b2 = _as_branch(g), _as_branch(g2)
    left, right = b1.owned(participant), b2.owned(participant)
    limit = min(len(left), len(right))
    if max_size is not None:
        limit = min(limit, max_size)
    right_preds = {e: {p for p in b2.order.pred.get(e, ()) if p in set(right)} for e in right}

    for ideal in _ideals(left, b1, participant, limit):
        if not ideal:
            yield EMPTY_REFLECTION
            continue
        mapping: dict = {}
        used: set = set()

        def extend(i: int) -> Iterator[Reflection]:
            if i == len(ideal):
                yield Reflection.of(mapping)
                return
            e = ideal[i]
            for cand in right:
                if cand in used or cand.action != e.action or not right_preds[cand] <= used:
                    continue
                if any(b1.before(d, e) != b2.before(d2, cand) or b1.before(e, d) != b2.before(cand, d2)
                       for d, d2 in mapping.items()):
                    continue
                mapping[e] = cand
                used.add(cand)
                yield from extend(i + 1)
                del mapping[e]
                used.discard(cand)

        yield from extend(0)


def _divergence(branch: _Branch, participant: str, common: frozenset) -> frozenset:
    """The participant's earliest events once the reflected prefix ``common`` is set aside."""
    rest = [e for e in branch.owned(participant) if e not in common]
    rest_set = set(rest)
    return frozenset(e for e in rest
                     if not any(p in rest_set for p in branch.order.pred.get(e, ())))


def branching_pair(participant: str, g, g2, refl: Reflection = EMPTY_REFLECTION):
    b1, b2 = _as_branch(g), _as_branch(g2)
    if not is_reflection(refl, participant, b1, b2):
        raise InvalidReflection(f"{refl} is not a {participant}-reflection")
    return (_divergence(b1, participant, refl.left), _divergence(b2, participant, refl.right))


def _not_before(branch: _Branch, anchors: frozenset) -> list:
    return [e for e in branch.comm if not any(branch.before(e, a) for a in anchors)]


def _passive_pair(b1: _Branch, b2: _Branch, pair) -> bool:
    e1, e2 = pair
    if any(e.direction != IN for e in e1 | e2):
        return False
    if bool(e1) != bool(e2):
        return False
    return not sqcap(e1, _not_before(b2, e2)) and not sqcap(e2, _not_before(b1, e1))


def _active_pair(pair) -> bool:
    e1, e2 = pair
    return (bool(e1) and bool(e2) and all(e.direction == OUT for e in e1 | e2)
            and not sqcap(e1, e2))


def is_passive(participant: str, g, g2, max_size: Optional[int] = None):
    b1, b2 = _as_branch(g), _as_branch(g2)
    for refl in find_reflections(b1, b2, participant, max_size):
        pair = (_divergence(b1, participant, refl.left), _divergence(b2, participant, refl.right))
        if _passive_pair(b1, b2, pair):
            return True, (refl, pair)
    return False, None


def is_active(participant: str, g, g2, max_size: Optional[int] = None):
    b1, b2 = _as_branch(g), _as_branch(g2)
    for refl in find_reflections(b1, b2, participant, max_size):
        pair = (_divergence(b1, participant, refl.left), _divergence(b2, participant, refl.right))
        if _active_pair(pair):
            return True, (refl, pair)
    return False, None


ACTIVE = "active"
PASSIVE = "passive"
NEITHER = "neither"


@dataclass(frozen=True)
class ParticipantRole:
    participant: str
    role: str
    reflection: Optional[Reflection] = None
    pair: Optional[tuple] = None

    def to_json(self) -> dict:
        out = {"participant": self.participant, "role": self.role}
        if self.reflection is not None:
            out["reflection"] = [[str(a), str(b)] for a, b in self.reflection.pairs]
            out["branching"] = [sorted((str(e) for e in s)) for s in self.pair]
        return out


@dataclass(frozen=True)
class BranchReport:
    cp: Optional[ControlPoint]
    roles: tuple
    well_branched: bool
    cap_hit: bool = False

    def role(self, participant: str) -> str:
        for r in self.roles:
            if r.participant == participant:
                return r.role
        return PASSIVE

    def with_role(self, role: str) -> list:
        return [r.participant for r in self.roles if r.role == role]

    @property
    def active(self) -> list:
        return self.with_role(ACTIVE)

    @property
    def passive(self) -> list:
        return self.with_role(PASSIVE)

    @property
    def neither(self) -> list:
        return self.with_role(NEITHER)

    def to_json(self) -> dict:
        return {"choice": str(self.cp) if self.cp else None,
                "well_branched": self.well_branched,
                "cap_hit": self.cap_hit,
                "roles": [r.to_json() for r in self.roles]}


def _classify(participant: str, b1: _Branch, b2: _Branch, max_size) -> ParticipantRole:
    active_witness = None
    for refl in find_reflections(b1, b2, participant, max_size):
        pair = (_divergence(b1, participant, refl.left), _divergence(b2, participant, refl.right))
        if _passive_pair(b1, b2, pair):
            return ParticipantRole(participant, PASSIVE, refl, pair)
        if active_witness is None and _active_pair(pair):
            active_witness = ParticipantRole(participant, ACTIVE, refl, pair)
    return active_witness or ParticipantRole(participant, NEITHER)


def well_branched(g, g2, max_size: Optional[int] = None, *, cp: Optional[ControlPoint] = None,
                  among=None):
    """Decide whether the choice between ``g`` and ``g2`` is well-branched.

    At most one participant may be non-passive, and that one must be active.
    Returns the verdict and a per-participant report.
    """
    b1, b2 = _as_branch(g), _as_branch(g2)
    if among is None:
        among = {p for e in b1.comm | b2.comm for p in (e.sender, e.receiver)}
    roles = tuple(_classify(p, b1, b2, max_size) for p in sorted(among))
    non_passive = [r for r in roles if r.role != PASSIVE]
    ok = len(non_passive) <= 1 and all(r.role == ACTIVE for r in non_passive)
    cap_hit = max_size is not None and any(
        max_size < min(len(b1.owned(p)), len(b2.owned(p))) for p in among)
    return ok, BranchReport(cp, roles, ok, cap_hit)


# -- the semantics map -------------------------------------------------------

@dataclass(frozen=True)
class SeqUnsound:
    pair: tuple

    def __str__(self) -> str:
        a, b = self.pair
        return f"sequential composition unsound: missing dependency {_label(a)} ≺ {_label(b)}"

    def to_json(self) -> dict:
        return {"kind": "seq-unsound", "message": str(self),
                "pair": [str(e) for e in self.pair]}


@dataclass(frozen=True)
class NotWellBranched:
    participant: str
    report: BranchReport

    def __str__(self) -> str:
        where = f" at {self.report.cp}" if self.report.cp else ""
        if self.report.role(self.participant) == ACTIVE:
            actives = ", ".join(self.report.active)
            return f"choice{where} not well-branched: more than one active participant ({actives})"
        return (f"choice{where} not well-branched: participant {self.participant} "
                f"is neither active nor passive")

    def to_json(self) -> dict:
        return {"kind": "not-well-branched", "message": str(self),
                "participant": self.participant, "report": self.report.to_json()}


def _label(e: Event) -> str:
    return str(e.action) if isinstance(e, Comm) else str(e)


@dataclass(frozen=True)
class Defined:
    graph: HyperGraph
    choices: tuple = ()
    defined = True
    reason = None


@dataclass(frozen=True)
class Undefined:
    reason: Union[SeqUnsound, NotWellBranched]
    choices: tuple = ()
    defined = False
    graph = None


SemanticsResult = Union[Defined, Undefined]


def required_pairs(left: HyperGraph, right: HyperGraph) -> list:
    """Pairs the composed graph must order: last sources of ``left`` by first targets of ``right``."""
    before = set()
    for h in last_edges(left):
        before |= h.source
    after = set()
    for h in first_edges(right):
        after |= h.target
    return [(a, b) for a in sorted(before, key=event_key) for b in sorted(after, key=event_key)]


def _choice_graph(k: ControlPoint, left: HyperGraph, right: HyperGraph) -> HyperGraph:
    extra = set()
    for branch in (left, right):
        lo, hi = minima(branch), maxima(branch)
        if lo:
            extra.add(HyperEdge(frozenset({Ctl(k)}), lo))
        if hi:
            extra.add(HyperEdge(hi, frozenset({Ctl(mu(k))})))
    return HyperGraph(left.edges | right.edges | extra)


def sem(g: GChor, max_size: Optional[int] = None) -> SemanticsResult:
    """Compute the hypergraph semantics of ``g`` (control points must be assigned)."""
    reports: list[BranchReport] = []

    def walk(node: GChor):
        if isinstance(node, Zero):
            return EMPTY, None
        if isinstance(node, Interaction):
            if node.cp is None:
                raise ValueError("control points not assigned; use assign_control_points")
            a, b, m, k = node.sender, node.receiver, node.msg, node.cp
            return HyperGraph({edge(send(a, b, m, k), recv(a, b, m, k))}), None
        left, why = walk(node.left)
        right, why2 = walk(node.right)
        if why is not None or why2 is not None:
            return None, why if why is not None else why2
        if isinstance(node, Par):
            return left | right, None
        if isinstance(node, Seq):
            composed = seq_compose(left, right)
            hb = happens_before(composed)
            for pair in required_pairs(left, right):
                if pair not in hb:
                    return None, SeqUnsound(pair)
            return composed, None
        ok, report = well_branched(left, right, max_size, cp=node.cp,
                                   among=participants(node.left) | participants(node.right))
        reports.append(report)
        if not ok:
            neither = report.neither
            culprit = neither[0] if neither else report.active[1]
            return None, NotWellBranched(culprit, report)
        return _choice_graph(node.cp, left, right), None

    graph, reason = walk(g)
    reports.sort(key=lambda r: r.cp)
    if reason is None:
        return Defined(graph, tuple(reports))
    return Undefined(reason, tuple(reports))


def hb(g: GChor) -> frozenset:
    res = sem(g)
    return happens_before(res.graph) if res.defined else frozenset()
