"""Communicating finite-state machines and projection of g-choreographies.

States are strings.  Projection names them after the syntax path of the
subterm that introduced them (``q@0.L.1``), products pair names as
``(s,t)`` and determinization collects them as ``{s,t}``, so the same input
always yields the same machine.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .ast import ChorError, Cho, GChor, Interaction, Par, Seq, Zero
from .hypergraph import IN, OUT, Action

Transition = tuple  # (source state, Action, target state)


class InitialMismatch(ChorError):
    pass


class StateOverlap(ChorError):
    pass


class CycleWithoutBound(ChorError):
    pass


@dataclass(frozen=True)
class CFSM:
    participant: Optional[str]
    states: frozenset
    initial: str
    transitions: frozenset = frozenset()
    exit: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial} is not a state")
        for s, _, t in self.transitions:
            if s not in self.states or t not in self.states:
                raise ValueError(f"transition {s} -> {t} leaves the state set")

    def outgoing(self, state: str) -> list[Transition]:
        return sorted((tr for tr in self.transitions if tr[0] == state), key=_tr_key)

    def successors(self) -> dict:
        out: dict = {s: [] for s in self.states}
        for tr in sorted(self.transitions, key=_tr_key):
            out[tr[0]].append((tr[1], tr[2]))
        return out

    def labels(self) -> frozenset:
        return frozenset(a for _, a, _ in self.transitions)

    def is_deterministic(self) -> bool:
        seen = set()
        for s, a, _ in self.transitions:
            if (s, a) in seen:
                return False
            seen.add((s, a))
        return True

    def to_json(self) -> dict:
        return {"participant": self.participant,
                "states": sorted(self.states),
                "initial": self.initial,
                "transitions": [{"from": s, "label": str(a), "to": t}
                                for s, a, t in sorted(self.transitions, key=_tr_key)]}

    def to_dot(self) -> str:
        name = self.participant or "M"
        lines = [f'digraph "{name}" {{', "  rankdir=LR;", '  node [shape=circle];',
                 '  __start [shape=point, style=invis];',
                 f'  __start -> "{self.initial}" [arrowhead=none];']
        for s in sorted(self.states):
            lines.append(f'  "{s}";')
        for s, a, t in sorted(self.transitions, key=_tr_key):
            lines.append(f'  "{s}" -> "{t}" [label="{a}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _tr_key(tr: Transition) -> tuple:
    return (tr[0], tr[1], tr[2])


# -- algebra -------------------------------------------------------------------

def shared_states(m: CFSM, m2: CFSM) -> frozenset:
    return m.states & m2.states


def union(m: CFSM, m2: CFSM) -> CFSM:
    if m.initial != m2.initial:
        raise InitialMismatch(f"initial states differ: {m.initial} vs {m2.initial}")
    return CFSM(m.participant or m2.participant, m.states | m2.states, m.initial,
                m.transitions | m2.transitions, m.exit)


def pair(s: str, t: str) -> str:
    return f"({s},{t})"


def product(m: CFSM, m2: CFSM) -> CFSM:
    """Interleaving product: one component moves, the other stays put."""
    common = shared_states(m, m2)
    if common:
        raise StateOverlap(f"machines share states: {', '.join(sorted(common))}")
    states = {pair(s, t) for s in m.states for t in m2.states}
    trans = {(pair(s, q), a, pair(t, q)) for s, a, t in m.transitions for q in m2.states}
    trans |= {(pair(q, s), a, pair(q, t)) for s, a, t in m2.transitions for q in m.states}
    exit_ = pair(m.exit, m2.exit) if m.exit is not None and m2.exit is not None else None
    return CFSM(m.participant or m2.participant, states, pair(m.initial, m2.initial), trans, exit_)


def rename(m: CFSM, mapping: dict) -> CFSM:
    f = lambda s: mapping.get(s, s)  # noqa: E731
    return CFSM(m.participant, {f(s) for s in m.states}, f(m.initial),
                {(f(s), a, f(t)) for s, a, t in m.transitions},
                f(m.exit) if m.exit is not None else None)


# -- projection ----------------------------------------------------------------

def _single(participant: str, name: str) -> CFSM:
    return CFSM(participant, {name}, name, (), name)


def _trivial(m: CFSM) -> bool:
    return m.initial == m.exit


def _project(g: GChor, a: str, path: str) -> CFSM:
    if isinstance(g, Zero):
        return _single(a, f"q@{path}")
    if isinstance(g, Interaction):
        if a not in (g.sender, g.receiver):
            return _single(a, f"q@{path}")
        entry, exit_ = f"q@{path}.0", f"q@{path}.1"
        direction = OUT if a == g.sender else IN
        label = Action(g.sender, g.receiver, direction, g.msg)
        return CFSM(a, {entry, exit_}, entry, {(entry, label, exit_)}, exit_)
    left = _project(g.left, a, f"{path}.L")
    right = _project(g.right, a, f"{path}.R")
    if isinstance(g, Seq):
        right = rename(right, {right.initial: left.exit})
        return CFSM(a, left.states | right.states, left.initial,
                    left.transitions | right.transitions, right.exit)
    if isinstance(g, Par):
        return product(left, right)
    if isinstance(g, Cho):
        # a branch where the participant does nothing cannot be glued at two
        # distinct points; such choices are never well-branched, keep the other
        if _trivial(right) and not _trivial(left):
            return left
        if _trivial(left) and not _trivial(right):
            return right
        right = rename(right, {right.initial: left.initial, right.exit: left.exit})
        return union(left, right)
    raise TypeError(f"not a choreography: {g!r}")


def project(g: GChor, participant: str, q0: str = "q0", qe: str = "qe") -> CFSM:
    """Syntax-directed projection of ``g`` on ``participant`` (not minimized)."""
    m = _project(g, participant, "0")
    if _trivial(m):
        return rename(m, {m.initial: q0})
    return rename(m, {m.initial: q0, m.exit: qe})


def is_local(m: CFSM, participant: Optional[str] = None) -> bool:
    p = participant if participant is not None else m.participant
    return all(a.subject == p for _, a, _ in m.transitions)


def is_acyclic(m: CFSM) -> bool:
    succ = m.successors()
    colour: dict = {}

    def visit(s) -> bool:
        colour[s] = 1
        for _, t in succ[s]:
            c = colour.get(t, 0)
            if c == 1 or (c == 0 and not visit(t)):
                return False
        colour[s] = 2
        return True

    return all(colour.get(s, 0) == 2 or visit(s) for s in sorted(m.states))


# -- determinization and minimization -------------------------------------------

def _subset_name(states: Iterable[str]) -> str:
    return "{" + ",".join(sorted(states)) + "}"


def determinize(m: CFSM) -> CFSM:
    """Subset construction from the initial state; every state is accepting."""
    succ = m.successors()
    start = frozenset({m.initial})
    seen = {start}
    queue = deque([start])
    trans = set()
    while queue:
        cur = queue.popleft()
        moves: dict = {}
        for s in cur:
            for a, t in succ[s]:
                moves.setdefault(a, set()).add(t)
        for a, targets in moves.items():
            nxt = frozenset(targets)
            trans.add((_subset_name(cur), a, _subset_name(nxt)))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return CFSM(m.participant, {_subset_name(s) for s in seen}, _subset_name(start), trans)


def minimize(m: CFSM) -> CFSM:
    """Minimal deterministic machine with the same trace language.

    Partition refinement runs over the partial transition function; missing
    moves go to an implicit dead state, which is the only non-accepting one.
    States are renamed ``q0, q1, ...`` in breadth-first order.
    """
    d = determinize(m)
    delta = {s: {} for s in d.states}
    for s, a, t in d.transitions:
        delta[s][a] = t
    block = {s: 0 for s in d.states}
    while True:
        sigs = {s: (block[s], tuple(sorted((a, block[t]) for a, t in delta[s].items())))
                for s in d.states}
        ids: dict = {}
        for s in sorted(d.states, key=lambda s: sigs[s]):
            ids.setdefault(sigs[s], len(ids))
        refined = {s: ids[sigs[s]] for s in d.states}
        if len(ids) == len(set(block.values())):
            block = refined
            break
        block = refined
    reps: dict = {}
    for s in sorted(d.states):
        reps.setdefault(block[s], s)
    names: dict = {}
    queue = deque([block[d.initial]])
    names[block[d.initial]] = "q0"
    trans = set()
    while queue:
        b = queue.popleft()
        for a, t in sorted(delta[reps[b]].items()):
            bt = block[t]
            if bt not in names:
                names[bt] = f"q{len(names)}"
                queue.append(bt)
            trans.add((names[b], a, names[bt]))
    return CFSM(m.participant, set(names.values()), "q0", trans)


def traces(m: CFSM, max_len: Optional[int] = None) -> frozenset:
    """Label sequences along paths from the initial state, prefix-closed."""
    if max_len is None and not is_acyclic(m):
        raise CycleWithoutBound("machine has a cycle; give max_len")
    succ = m.successors()
    out = set()
    stack = [(m.initial, ())]
    seen = set()
    while stack:
        s, w = stack.pop()
        if (s, w) in seen:
            continue
        seen.add((s, w))
        out.add(w)
        if max_len is not None and len(w) >= max_len:
            continue
        for a, t in succ[s]:
            stack.append((t, w + (a,)))
    return frozenset(out)


def isomorphic(m: CFSM, m2: CFSM) -> bool:
    """Isomorphism test for deterministic machines, walking both from their initial states."""
    if len(m.states) != len(m2.states) or len(m.transitions) != len(m2.transitions):
        return False
    s1, s2 = m.successors(), m2.successors()
    iso = {m.initial: m2.initial}
    queue = deque([m.initial])
    while queue:
        s = queue.popleft()
        left, right = dict(s1[s]), dict(s2[iso[s]])
        if len(left) != len(s1[s]) or len(right) != len(s2[iso[s]]) or left.keys() != right.keys():
            return False
        for a, t in left.items():
            if t in iso:
                if iso[t] != right[a]:
                    return False
            else:
                iso[t] = right[a]
                queue.append(t)
    return len(iso) == len(m.states) and len(set(iso.values())) == len(iso)
