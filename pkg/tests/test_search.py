from dataclasses import replace
from itertools import product

import pytest
from hypothesis import given, strategies as st

from ittmbb import search
from ittmbb.classical import HALT as CHALT, Action, ClassicalMachine, Halted as CHalted, run_classical, score_rado
from ittmbb.classical_search import leaves
from ittmbb.ittm import HALT, TRIPLES, ITTAction, ITTMachine
from ittmbb.ittm_search import TooLarge, check_ceiling, enumerate_ittm, space_estimate
from ittmbb.formats import from_compact
from ittmbb.ledger import Ledger
from ittmbb.search import (CLEAN, EXACT, FSTAR0, RADO, Certificate, Tally, certify_classical, certify_ittm,
                           sigma_classical, sigma_inf_lower_bound, s_time_classical, verify_certificate)
from ittmbb.transfinite import ExecBudget, f_star

SMALL = ExecBudget(1000, 4)
ALL_ACTIONS = [Action(w, mv, q) for w in (0, 1) for mv in (-1, 1) for q in (0, 1, CHALT)]


def strip(report):
    return report.as_dict()


tallies = st.builds(
    Tally, st.integers(0, 9), st.integers(0, 9), st.integers(0, 9), st.integers(0, 9), st.integers(0, 9),
    st.dictionaries(st.sampled_from(["rado", "time"]),
                    st.tuples(st.integers(0, 5), st.sampled_from(["a", "b", "c"])).map(list)),
    st.lists(st.sampled_from(["x", "y"]), max_size=2), st.just([]))


@given(tallies, tallies, tallies)
def test_tally_merge_is_associative_and_commutative(a, b, c):
    assert a.merge(b).merge(c) == a.merge(b.merge(c))
    assert a.merge(b) == b.merge(a)


def test_tie_goes_to_least_encoding():
    t = Tally()
    t.offer("rado", 3, "b")
    t.offer("rado", 3, "a")
    t.offer("rado", 2, "0")
    assert t.best["rado"] == [3, "a"]


def _raw_behaviours(n, budget=200):
    """(steps, ones) of every halting raw n-state table."""
    choices = [Action(w, mv, q) for w in (0, 1) for mv in (-1, 1) for q in list(range(n)) + [CHALT]]
    out = set()
    for table in product(choices, repeat=2 * n):
        res = run_classical(ClassicalMachine(n, table), budget)
        if isinstance(res, CHalted):
            out.add((res.steps, score_rado(res.tape)))
    return out


@pytest.mark.parametrize("n", [1, 2])
def test_normalization_keeps_every_halting_behaviour(n):
    norm = {(leaf.steps, leaf.rado) for leaf in leaves(n, 200) if leaf.status == "halt"}
    assert norm == _raw_behaviours(n)


def test_small_exact_values():
    for n, sigma, stime in ((1, 1, 1), (2, 4, 6)):
        r, s = sigma_classical(n, 1000), s_time_classical(n, 1000)
        assert (r.value, r.status, s.value, s.status) == (sigma, EXACT, stime, EXACT)
        assert all(verify_certificate(c) for c in r.certificates + s.certificates)


def test_clean_never_beats_rado():
    for n in (1, 2):
        assert sigma_classical(n, 1000, CLEAN).value <= sigma_classical(n, 1000, RADO).value


def test_classical_bounds():
    with pytest.raises(ValueError):
        sigma_classical(5, 10)
    with pytest.raises(ValueError):
        sigma_classical(2, 10, convention="time")


def test_workers_do_not_change_reports():
    assert strip(sigma_classical(2, 1000, workers=1)) == strip(sigma_classical(2, 1000, workers=2))
    a = sigma_inf_lower_bound(1, SMALL, workers=1, max_entries=2)
    b = sigma_inf_lower_bound(1, SMALL, workers=3, max_entries=2)
    assert strip(a) == strip(b)


def test_ledger_resume_is_idempotent(tmp_path, monkeypatch):
    path = tmp_path / "run.jsonl"
    first = sigma_classical(2, 1000, ledger=Ledger(path))

    def boom(*a, **k):
        raise AssertionError("a finished search must not simulate again")

    monkeypatch.setattr(search.classical_search, "expand", boom)
    again = sigma_classical(2, 1000, ledger=Ledger(path))
    assert strip(again) == strip(first)


def test_ledger_resumes_unfinished_tasks(tmp_path, monkeypatch):
    path = tmp_path / "run.jsonl"
    full = sigma_classical(3, 500, ledger=Ledger(path))
    lines = path.read_text().splitlines()
    tasks = [ln for ln in lines if '"kind": "task"' in ln]
    kept = tasks[:len(tasks) // 2]
    path.write_text("\n".join(kept) + "\n" + '{"torn": ')  # interrupted mid-write
    calls = []
    real = search._classical_task
    monkeypatch.setattr(search, "_classical_task", lambda args: calls.append(1) or real(args))
    resumed = sigma_classical(3, 500, ledger=Ledger(path))
    assert len(calls) == len(tasks) - len(kept)
    assert strip(resumed) == strip(full)


def test_certificate_tampering_is_caught():
    cert = sigma_classical(2, 1000).certificates[0]
    assert verify_certificate(cert)
    assert not verify_certificate(replace(cert, score=cert.score + 1))
    assert not verify_certificate(replace(cert, stage=str(int(cert.stage) + 1)))
    edited = cert.machine[:-1] + ("A" if cert.machine[-1] != "A" else "B")
    assert not verify_certificate(replace(cert, machine=edited))
    assert not verify_certificate(replace(cert, machine="garbage"))
    assert not verify_certificate(replace(cert, budgets={"step_budget": 2}))
    c = Certificate.from_dict(cert.as_dict())
    assert c == cert


def lift(m: ClassicalMachine) -> ITTMachine:
    """The classical machine working on the output tape; the Limit row halts."""
    table = []
    for q in range(m.n_states):
        for t in TRIPLES:
            a = m.action(q, t[1])
            table.append(ITTAction((t[0], a.write, t[2]), a.move, HALT if a.next == CHALT else a.next))
    table += [ITTAction(t, 1, HALT) for t in TRIPLES]
    return ITTMachine(m.n_states, tuple(table))


def test_lifted_classical_machines_keep_clean_score():
    best_inf = sigma_inf_lower_bound(1, SMALL).value
    checked = 0
    for n in (1, 2):
        for leaf in leaves(n, 500):
            if leaf.status != "halt" or leaf.clean is None:
                continue
            res = run_classical(leaf.machine, 500)
            if res.tape.origin < 0:  # went left of the start cell
                continue
            value = f_star(lift(leaf.machine), 0, SMALL)
            assert value == leaf.clean
            if n == 1:
                assert value <= best_inf
            checked += 1
    assert checked >= 10


def test_ittm_ceiling():
    check_ceiling(2)
    with pytest.raises(TooLarge):
        check_ceiling(3)
    with pytest.raises(TooLarge):
        sigma_inf_lower_bound(3)
    assert space_estimate(1) == 17 ** 16


def test_ittm_champion_certificate():
    r = sigma_inf_lower_bound(1, SMALL, max_entries=2)
    assert r.value >= 1 and r.status == "LowerBound"
    (cert,) = r.certificates
    assert cert.convention == FSTAR0 and verify_certificate(cert)
    assert not verify_certificate(replace(cert, score=cert.score + 1))
    assert not verify_certificate(replace(cert, digest="0" * 32))


def test_enumeration_is_deterministic():
    a = [m for _, m in zip(range(300), enumerate_ittm(1, SMALL, max_entries=2))]
    b = [m for _, m in zip(range(300), enumerate_ittm(1, SMALL, max_entries=2))]
    assert a == b and len(set(a)) == len(a)


@pytest.fixture(scope="module")
def classical_reports():
    led = Ledger()
    out = {}
    for n in (1, 2, 3):
        out[n] = {conv: sigma_classical(n, 10_000, conv, ledger=led) for conv in (RADO, CLEAN)}
        out[n]["time"] = s_time_classical(n, 10_000, ledger=led)
    return out


def test_score_time_consistency(classical_reports):
    for n, reps in classical_reports.items():
        champ = run_classical(from_compact(reps[RADO].champion), 10_000)
        assert isinstance(champ, CHalted) and champ.steps <= reps["time"].value
        slow = run_classical(from_compact(reps["time"].champion), 10_000)
        assert isinstance(slow, CHalted) and slow.steps == reps["time"].value


def test_monotone_in_n(classical_reports):
    for key in (RADO, CLEAN, "time"):
        values = [classical_reports[n][key].value for n in (1, 2, 3)]
        assert values == sorted(values)
    assert all(classical_reports[n][CLEAN].value <= classical_reports[n][RADO].value for n in (1, 2, 3))


def test_sigma_inf_monotone():
    small = ExecBudget(500, 3)
    values = [sigma_inf_lower_bound(n, small, max_entries=e).value for n in (1, 2) for e in (1, 2)]
    assert values[0] <= values[1] and values[2] <= values[3]
    assert values[0] <= values[2] and values[1] <= values[3]
    assert sigma_inf_lower_bound(1, small, max_entries=2).value <= sigma_inf_lower_bound(1, SMALL, max_entries=2).value
