"""Communicating systems: machines composed over unbounded channel buffers.

Buffers are FIFO queues by default.  Under the bag policy a buffer is a
multiset, kept here as a sorted tuple so that configurations stay hashable
and canonical.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional

from .ast import ChorError
from .cfsm import CFSM, is_local
from .hypergraph import OUT, Action


class Policy(str, Enum):
    FIFO = "fifo"
    BAG = "bag"


class BudgetExceeded(ChorError):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ReplayError(ChorError):
    pass


@dataclass(frozen=True)
class ExplorationBudget:
    max_configs: Optional[int] = None
    max_trace_len: Optional[int] = None

    def __post_init__(self):
        for v in (self.max_configs, self.max_trace_len):
            if v is not None and v < 1:
                raise ValueError("budget bounds must be positive")


UNBOUNDED = ExplorationBudget()


@dataclass(frozen=True, order=True)
class Configuration:
    """Machine states in participant order, buffers in channel order."""
    states: tuple
    buffers: tuple

    def to_json(self, system: "CommSystem") -> dict:
        return {"states": dict(zip(system.participants, self.states)),
                "buffers": {f"{a}>{b}": list(buf)
                            for (a, b), buf in zip(system.channels, self.buffers)}}


class CommSystem:
    def __init__(self, machines: Mapping[str, CFSM], policy: Policy = Policy.FIFO):
        self.participants = tuple(sorted(machines))
        for p in self.participants:
            m = machines[p]
            if m.participant not in (None, p) or not is_local(m, p):
                raise ValueError(f"machine for {p} is not {p}-local")
        self.machines = {p: machines[p] for p in self.participants}
        self.policy = Policy(policy)
        self.channels = tuple((a, b) for a in self.participants for b in self.participants if a != b)
        self._chan = {c: i for i, c in enumerate(self.channels)}
        self._index = {p: i for i, p in enumerate(self.participants)}
        self._succ = {p: m.successors() for p, m in self.machines.items()}

    def with_policy(self, policy: Policy) -> "CommSystem":
        return CommSystem(self.machines, policy)

    def initial(self) -> Configuration:
        return Configuration(tuple(self.machines[p].initial for p in self.participants),
                             tuple(() for _ in self.channels))

    def _fire(self, c: Configuration, i: int, target: str, a: Action) -> Optional[Configuration]:
        ch = self._chan[a.channel]
        buf = c.buffers[ch]
        if a.direction == OUT:
            new = buf + (a.msg,)
            if self.policy is Policy.BAG:
                new = tuple(sorted(new))
        elif self.policy is Policy.FIFO:
            if not buf or buf[0] != a.msg:
                return None
            new = buf[1:]
        else:
            if a.msg not in buf:
                return None
            k = buf.index(a.msg)
            new = buf[:k] + buf[k + 1:]
        states = c.states[:i] + (target,) + c.states[i + 1:]
        return Configuration(states, c.buffers[:ch] + (new,) + c.buffers[ch + 1:])

    def step(self, c: Configuration) -> list[tuple[Action, Configuration]]:
        """Every (action, successor) pair, sorted by action."""
        out = []
        for i, p in enumerate(self.participants):
            for a, t in self._succ[p][c.states[i]]:
                nxt = self._fire(c, i, t, a)
                if nxt is not None:
                    out.append((a, nxt))
        out.sort(key=lambda x: (x[0], x[1]))
        return out

    def fire(self, c: Configuration, a: Action) -> list[Configuration]:
        return [nxt for b, nxt in self.step(c) if b == a]

    def is_deadlock(self, c: Configuration) -> bool:
        if self.step(c):
            return False
        if any(c.buffers):
            return True
        return any(a.direction != OUT
                   for i, p in enumerate(self.participants)
                   for a, _ in self._succ[p][c.states[i]])


def is_stable(c: Configuration) -> bool:
    return not any(c.buffers)


def worker_count() -> int:
    env = os.environ.get("CHORC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


@dataclass
class Exploration:
    """Reachable configurations with BFS predecessor links for path recovery."""
    system: CommSystem
    initial: Configuration
    parent: dict

    @property
    def configs(self) -> frozenset:
        return frozenset(self.parent)

    def path(self, c: Configuration) -> list[Action]:
        out = []
        while self.parent[c] is not None:
            prev, a = self.parent[c]
            out.append(a)
            c = prev
        return out[::-1]


def reachable(system: CommSystem, budget: ExplorationBudget = UNBOUNDED,
              workers: Optional[int] = None) -> Exploration:
    """Breadth-first exploration from the initial configuration.

    Each level is expanded (optionally by a thread pool) and then merged in
    sorted order, so the parent links, and the first path found to every
    configuration, do not depend on scheduling.
    """
    workers = workers or worker_count()
    start = system.initial()
    parent: dict = {start: None}
    level = [start]
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while level:
            if pool is not None and len(level) > 1:
                expanded = list(pool.map(system.step, level))
            else:
                expanded = [system.step(c) for c in level]
            nxt = []
            for c, succs in zip(level, expanded):
                for a, d in succs:
                    if d not in parent:
                        parent[d] = (c, a)
                        nxt.append(d)
                        if budget.max_configs is not None and len(parent) > budget.max_configs:
                            raise BudgetExceeded(
                                f"more than {budget.max_configs} configurations",
                                Exploration(system, start, parent))
            level = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    return Exploration(system, start, parent)


def deadlocks(exploration: Exploration) -> list[Configuration]:
    s = exploration.system
    return sorted((c for c in exploration.parent if s.is_deadlock(c)),
                  key=lambda c: (len(exploration.path(c)), c))


def language(system: CommSystem, budget: ExplorationBudget = UNBOUNDED) -> frozenset:
    """All firable action sequences from the initial configuration."""
    out = set()
    seen = set()
    stack = [(system.initial(), ())]
    while stack:
        c, w = stack.pop()
        if (c, w) in seen:
            continue
        seen.add((c, w))
        out.add(w)
        if budget.max_configs is not None and len(out) > budget.max_configs:
            raise BudgetExceeded(f"more than {budget.max_configs} words", frozenset(out))
        if budget.max_trace_len is not None and len(w) >= budget.max_trace_len:
            continue
        for a, d in system.step(c):
            stack.append((d, w + (a,)))
    return frozenset(out)


def replay(system: CommSystem, word: Iterable[Action]) -> list[Configuration]:
    """Configurations reachable by firing ``word``; raises if it gets stuck."""
    current = {system.initial()}
    for i, a in enumerate(word):
        current = {d for c in current for d in system.fire(c, a)}
        if not current:
            raise ReplayError(f"action {i} ({a}) cannot fire")
    return sorted(current)


def format_trace(word: Iterable[Action]) -> str:
    return "".join(f"{a}\n" for a in word)
