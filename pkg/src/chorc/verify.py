"""Checks of deadlock freedom and language inclusion for projected systems."""
from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .ast import ChorError, Cho, GChor, Interaction, Par, Seq, assign_control_points, participants
from .cfsm import minimize, project
from .language import LanguageAutomaton, format_word, words
from .semantics import SemanticsUndefined, sem
from .system import (UNBOUNDED, BudgetExceeded, CommSystem, ExplorationBudget, Policy, deadlocks,
                     language, reachable)

PASS, FAIL, SKIP, INCONCLUSIVE = "pass", "fail", "skip", "inconclusive"
ECLAIM_FAIL = "eclaim-fail"


class GenerationExhausted(ChorError):
    pass


def build_system(g: GChor, policy: Policy = Policy.FIFO, minimized: bool = True) -> CommSystem:
    """One (minimized) projection per participant."""
    res = sem(g)
    if not res.defined:
        raise SemanticsUndefined(res.reason)
    machines = {}
    for p in sorted(participants(g)):
        m = project(g, p)
        machines[p] = minimize(m) if minimized else m
    return CommSystem(machines, policy)


@dataclass
class DeadlockCheck:
    verdict: str
    trace: Optional[tuple] = None
    configs: int = 0
    note: Optional[str] = None


@dataclass
class InclusionCheck:
    policy: str
    verdict: str
    strict: bool = False
    equality: bool = False
    witness: Optional[tuple] = None
    strict_witness: Optional[tuple] = None
    claim: Optional[str] = None
    words: int = 0
    note: Optional[str] = None

    def to_json(self) -> dict:
        return {"policy": self.policy, "verdict": self.verdict,
                "strict": self.strict, "equality": self.equality,
                "witness": _word_json(self.witness),
                "strict_witness": _word_json(self.strict_witness),
                "claim": self.claim}


def _word_json(w) -> Optional[str]:
    return None if w is None else format_word(w)


def _shortest(ws) -> Optional[tuple]:
    return min(ws, key=lambda w: (len(w), w)) if ws else None


def check_deadlock_free(subject: Union[GChor, CommSystem],
                        budget: ExplorationBudget = UNBOUNDED,
                        workers: Optional[int] = None) -> DeadlockCheck:
    """Explore every reachable configuration; a failure carries the shortest path to a deadlock."""
    if isinstance(subject, CommSystem):
        system = subject
    else:
        try:
            system = build_system(subject)
        except SemanticsUndefined as exc:
            return DeadlockCheck(SKIP, note=str(exc.reason))
    try:
        exp = reachable(system, budget, workers)
    except BudgetExceeded as exc:
        return DeadlockCheck(INCONCLUSIVE, configs=len(exc.partial.parent), note=str(exc))
    stuck = deadlocks(exp)
    if stuck:
        return DeadlockCheck(FAIL, tuple(exp.path(stuck[0])), len(exp.parent))
    return DeadlockCheck(PASS, configs=len(exp.parent))


def _complete(w: tuple, step, state) -> tuple:
    """Extend ``w`` with least actions until ``step`` offers none."""
    while True:
        moves = step(state)
        if not moves:
            return w
        a = min(moves)
        w, state = w + (a,), moves[a]


def compare_languages(system_lang: frozenset, chor_lang: frozenset, policy: Policy) -> InclusionCheck:
    """Explicit finite-set comparison of L(S) against L(G)."""
    extra = system_lang - chor_lang
    missing = chor_lang - system_lang
    strict = not extra and bool(missing)
    strict_witness = None
    if strict:
        def step(w):
            return {v[-1]: v for v in chor_lang if len(v) == len(w) + 1 and v[:-1] == w}
        first = _shortest(missing)
        strict_witness = _complete(first, step, first)
    return _result(policy, _shortest(extra), strict_witness, bool(missing), len(chor_lang))


def _result(policy, witness, strict_witness, missing: bool, count: int) -> InclusionCheck:
    policy = Policy(policy)
    equality = witness is None and not missing
    claim = None
    if policy is Policy.BAG:
        claim = PASS if equality else ECLAIM_FAIL
    return InclusionCheck(policy.value, FAIL if witness is not None else PASS,
                          witness is None and missing, equality, witness,
                          strict_witness if witness is None else None, claim, count)


def product_inclusion(g: GChor, system: CommSystem,
                      budget: ExplorationBudget = UNBOUNDED) -> InclusionCheck:
    """Decide L(S) against L(G) without listing words.

    Both sides are determinized on the fly (sets of choreography positions,
    sets of configurations) and explored in lockstep, breadth first with
    actions in sorted order, so the first witness found is the shortest and
    lexicographically least.
    """
    auto = LanguageAutomaton(g)

    def sys_step(configs: frozenset) -> dict:
        out: dict = {}
        for c in configs:
            for a, d in system.step(c):
                out.setdefault(a, set()).add(d)
        return {a: frozenset(ds) for a, ds in out.items()}

    start = (auto.initial, frozenset({system.initial()}))
    parent = {start: None}
    queue = deque([start])
    witness = missing = None
    while queue:
        node = queue.popleft()
        gstate, sstate = node
        gmoves, smoves = auto.step(gstate), sys_step(sstate)
        for a in sorted(set(gmoves) | set(smoves)):
            if a not in gmoves:
                if witness is None:
                    witness = _path(parent, node) + (a,)
                continue
            if a not in smoves:
                if missing is None:
                    missing = _complete(_path(parent, node) + (a,), auto.step, gmoves[a])
                continue
            nxt = (gmoves[a], smoves[a])
            if nxt not in parent:
                parent[nxt] = (node, a)
                queue.append(nxt)
                if budget.max_configs is not None and len(parent) > budget.max_configs:
                    raise BudgetExceeded(f"more than {budget.max_configs} product states")
        if witness is not None:
            break
    return _result(system.policy, witness, missing, missing is not None, len(parent))


def _path(parent: dict, node) -> tuple:
    out = []
    while parent[node] is not None:
        node, a = parent[node]
        out.append(a)
    return tuple(reversed(out))


def check_inclusion(g: GChor, policy: Policy = Policy.FIFO,
                    budget: ExplorationBudget = UNBOUNDED, explicit: bool = False) -> InclusionCheck:
    """Check L(S) included in L(G); ``explicit`` compares the two languages as enumerated sets."""
    policy = Policy(policy)
    try:
        system = build_system(g, policy)
    except SemanticsUndefined as exc:
        return InclusionCheck(policy.value, SKIP, note=str(exc.reason))
    try:
        if explicit:
            return compare_languages(language(system, budget), words(g), policy)
        return product_inclusion(g, system, budget)
    except BudgetExceeded as exc:
        return InclusionCheck(policy.value, INCONCLUSIVE, note=str(exc))


@dataclass
class Report:
    subject: str
    defined: bool
    reason: Optional[str]
    deadlock: DeadlockCheck
    inclusion: InclusionCheck
    bag: Optional[InclusionCheck] = None
    millis: float = 0.0
    configs: int = 0
    words: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        checks = [self.deadlock.verdict, self.inclusion.verdict]
        if self.bag is not None:
            checks.append(self.bag.verdict)
        return all(v in (PASS, SKIP) for v in checks) and (
            self.bag is None or self.bag.claim in (None, PASS))

    def to_json(self, stats: bool = True) -> dict:
        out = {"subject": self.subject,
               "wf": {"defined": self.defined, "reason": self.reason},
               "deadlock_free": self.deadlock.verdict,
               "deadlock_trace": _word_json(self.deadlock.trace),
               "inclusion": self.inclusion.to_json()}
        if self.bag is not None:
            out["inclusion_bag"] = self.bag.to_json()
        if stats:
            out["stats"] = {"configs": self.configs, "words": self.words,
                            "millis": round(self.millis, 3)}
        return out


def verify(g: GChor, subject: str = "<term>", policy: Policy = Policy.FIFO,
           budget: ExplorationBudget = UNBOUNDED, with_bag: bool = True) -> Report:
    start = time.perf_counter()
    res = sem(g)
    reason = None if res.defined else str(res.reason)
    dl = check_deadlock_free(g, budget)
    inc = check_inclusion(g, policy, budget)
    bag = None
    if with_bag and Policy(policy) is not Policy.BAG:
        bag = check_inclusion(g, Policy.BAG, budget)
    millis = (time.perf_counter() - start) * 1000
    return Report(subject, res.defined, reason, dl, inc, bag, millis, dl.configs, inc.words)


# -- random terms ----------------------------------------------------------------

def _random_term(rng: random.Random, size: int, names: Sequence[str], msgs: Sequence[str]) -> GChor:
    if size == 1:
        a, b = rng.sample(list(names), 2)
        return Interaction(a, b, rng.choice(list(msgs)))
    k = rng.randint(1, size - 1)
    op = rng.choice((Seq, Seq, Par, Cho))
    return op(_random_term(rng, k, names, msgs), _random_term(rng, size - k, names, msgs))


def random_choreography(seed: int, size: int, participants: Sequence[str] = "ABC",
                        messages: Sequence[str] = "xyz", tries: int = 2000) -> GChor:
    """A term with ``size`` interactions whose semantics is defined; deterministic in ``seed``."""
    if size < 1:
        raise ValueError("size must be at least 1")
    if len(participants) < 2:
        raise ValueError("need at least two participants")
    rng = random.Random(seed)
    for _ in range(tries):
        g = assign_control_points(_random_term(rng, size, participants, messages))
        if sem(g).defined:
            return g
    raise GenerationExhausted(f"no well-formed term of size {size} after {tries} tries (seed {seed})")


def random_terms(seeds: Sequence[int], max_size: int = 6, **kw) -> list[GChor]:
    """One term per seed, size cycling through 1..max_size."""
    return [random_choreography(s, 1 + s % max_size, **kw) for s in seeds]


