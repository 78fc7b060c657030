from __future__ import annotations

import json

import pytest

from chorc.cfsm import CFSM
from chorc.language import member, parse_word
from chorc.semantics import SemanticsUndefined
from chorc.syntax import parse, pretty
from chorc.system import CommSystem, ExplorationBudget, Policy, ReplayError, replay
from chorc.verify import (ECLAIM_FAIL, FAIL, INCONCLUSIVE, PASS, SKIP, GenerationExhausted, build_system,
                          check_deadlock_free, check_inclusion, random_choreography, random_terms, verify)
from chorc.ast import interactions

PAR = parse("A->B:x | A->B:y")


def test_build_system():
    s = build_system(parse("A->B:x"))
    assert s.participants == ("A", "B")
    assert all(len(m.states) == 2 for m in s.machines.values())
    with pytest.raises(SemanticsUndefined):
        build_system(parse("A->B:x ; C->D:y"))


def test_skip_on_undefined():
    g = parse("A->B:x ; C->D:y")
    assert check_deadlock_free(g).verdict == SKIP
    assert check_inclusion(g).verdict == SKIP
    r = verify(g)
    assert r.ok and not r.defined and r.reason.startswith("sequential composition unsound")


def test_hand_built_deadlock():
    send, recv = parse_word("AB!x AB?y")
    s = CommSystem({"A": CFSM("A", {"a0", "a1"}, "a0", {("a0", send, "a1")}),
                    "B": CFSM("B", {"b0", "b1"}, "b0", {("b0", recv, "b1")})})
    check = check_deadlock_free(s)
    assert check.verdict == FAIL and check.trace == (send,)
    (c,) = replay(s, check.trace)
    assert s.is_deadlock(c)


def test_strict_inclusion_fifo():
    check = check_inclusion(PAR)
    assert check.verdict == PASS and check.strict and not check.equality
    assert check.strict_witness == parse_word("AB!x AB!y AB?y AB?x")


def test_equality_bag():
    check = check_inclusion(PAR, Policy.BAG)
    assert check.verdict == PASS and check.equality and check.claim == PASS


def test_bag_claim_violation_reported_distinctly():
    g = parse("A->B:y ; (C->A:x ; A->B:z)")
    check = check_inclusion(g, Policy.BAG)
    assert check.verdict == PASS and check.claim == ECLAIM_FAIL
    assert check.strict_witness is not None


def test_inconclusive_on_budget():
    assert check_deadlock_free(PAR, ExplorationBudget(max_configs=1)).verdict == INCONCLUSIVE
    assert check_inclusion(PAR, budget=ExplorationBudget(max_configs=1)).verdict == INCONCLUSIVE


def test_report_json():
    data = verify(PAR, "par").to_json()
    assert set(data) == {"subject", "wf", "deadlock_free", "deadlock_trace", "inclusion",
                         "inclusion_bag", "stats"}
    assert data["inclusion"]["strict_witness"] == "AB!x AB!y AB?y AB?x"
    assert set(data["stats"]) == {"configs", "words", "millis"}
    assert "stats" not in verify(PAR).to_json(stats=False)
    json.dumps(data)


def test_generator_determinism_and_errors():
    assert random_choreography(1, 1) == random_choreography(1, 1)
    assert len(interactions(random_choreography(1, 1))) == 1
    assert [pretty(g) for g in random_terms(range(5))] == [pretty(g) for g in random_terms(range(5))]
    with pytest.raises(ValueError):
        random_choreography(0, 0)
    with pytest.raises(GenerationExhausted):
        random_choreography(3, 4, tries=0)


@pytest.mark.parametrize("seed", range(0, 200, 4))
def test_product_and_explicit_inclusion_agree(seed):
    g = random_choreography(seed, 1 + seed % 4)
    for policy in Policy:
        fast = check_inclusion(g, policy)
        slow = check_inclusion(g, policy, explicit=True)
        assert (fast.verdict, fast.strict, fast.equality, fast.witness, fast.strict_witness) == \
               (slow.verdict, slow.strict, slow.equality, slow.witness, slow.strict_witness)


BAG_CLAIM_VIOLATIONS = [10, 16, 21, 22, 23, 28, 41, 53, 59, 62, 69, 70, 71, 88, 94, 95, 101, 107, 110,
                        111, 125, 143, 149, 166, 167, 173, 178, 179, 196]


def test_bag_equality_on_random_seeds():
    """The equality claim fails on these generated terms; every witness is confirmed independently."""
    violations = []
    for seed in range(200):
        g = random_choreography(seed, 1 + seed % 6)
        check = check_inclusion(g, Policy.BAG)
        if check.claim == PASS:
            continue
        violations.append(seed)
        assert check.claim == ECLAIM_FAIL
        system = build_system(g, Policy.BAG)
        if check.witness is not None:
            replay(system, check.witness)
            assert not member(g, check.witness)
        else:
            w = check.strict_witness
            assert member(g, w)
            with pytest.raises(ReplayError):
                replay(system, w)
    print(f"bag equality fails on {len(violations)}/200 seeds: {violations}")
    assert violations == BAG_CLAIM_VIOLATIONS
