from itertools import islice

import pytest

from ittmbb.classical import (HALT, L, R, Action, ClassicalMachine, Halted, OutOfBudget, is_clean_output,
                              replay_classical, run_classical, score_rado, step_classical, blank_config)
from ittmbb.classical_search import leaves
from ittmbb.deciders import simulate_partial, static_proof
from conftest import random_classical

BB2 = ClassicalMachine.from_rows({(0, 0): (1, R, 1), (0, 1): (1, L, 1), (1, 0): (1, L, 0), (1, 1): (1, R, HALT)})


def test_bb2_champion():
    out = run_classical(BB2, 100)
    assert isinstance(out, Halted)
    assert out.steps == 6
    assert score_rado(out.tape) == 4
    assert is_clean_output(out.tape) == 4


def test_budget_exhaustion():
    loop = ClassicalMachine(1, (Action(0, R, 0), Action(0, R, 0)))
    out = run_classical(loop, 50)
    assert isinstance(out, OutOfBudget) and out.steps == 50


def test_step_by_step_matches_run(rng):
    for _ in range(50):
        m = random_classical(rng, 3)
        cfg = blank_config()
        steps = 0
        while steps < 200:
            cfg = step_classical(m, cfg)
            steps += 1
            if isinstance(cfg, Halted):
                break
        out = run_classical(m, 200)
        if isinstance(cfg, Halted):
            assert isinstance(out, Halted) and out.steps == steps
            assert score_rado(out.tape) == score_rado(cfg.tape)
        else:
            assert isinstance(out, OutOfBudget)


def test_replay_stops_at_halt():
    trace = list(replay_classical(BB2, 100))
    assert isinstance(trace[-1], Halted) and len(trace) == 6


def test_clean_output():
    assert is_clean_output([1, 1, 1, 0, 0]) == 3
    assert is_clean_output([1, 0, 1]) is None
    assert is_clean_output([0, 0]) == 0


def test_mirror_keeps_scores(rng):
    for _ in range(30):
        m = random_classical(rng, 3)
        a, b = run_classical(m, 300), run_classical(m.mirror(), 300)
        assert type(a) is type(b) and a.steps == b.steps
        if isinstance(a, Halted):
            assert score_rado(a.tape) == score_rado(b.tape)


def test_bad_tables_rejected():
    with pytest.raises(ValueError):
        ClassicalMachine(1, (Action(2, R, 0), Action(0, R, 0)))
    with pytest.raises(ValueError):
        ClassicalMachine(1, (Action(0, R, 3), Action(0, R, 0)))
    with pytest.raises(ValueError):
        ClassicalMachine(2, (Action(0, R, 0),))


def test_decider_claims_hold_under_long_simulation():
    # every n=3 leaf the deciders call non-halting must really run on
    nonhalt = [leaf.machine for leaf in islice(leaves(3, 2000), 15_000) if leaf.status == "nonhalt"]
    assert len(nonhalt) > 1000
    for m in nonhalt[::29]:
        assert isinstance(run_classical(m, 10_000), OutOfBudget)


def test_translated_cycler_detected():
    run = simulate_partial([Action(1, R, 0), Action(1, R, 0)], 100)
    assert run.kind == "translated"


def test_cycler_detected():
    # bounces between two cells forever
    run = simulate_partial([Action(0, R, 1), Action(0, R, 1), Action(0, L, 0), Action(0, L, 0)], 100)
    assert run.kind == "cycle"


def test_static_proofs_are_sound():
    assert static_proof(list(BB2.table)) is None
    no_halt = [Action(1, L, 1), Action(0, R, 0), Action(1, R, 0), Action(1, L, 1)]
    assert static_proof(no_halt) == "backward"
