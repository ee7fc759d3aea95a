import pytest
from hypothesis import given, settings, strategies as st

from ittmbb.classical import HALT as CHALT, Action, ClassicalMachine
from ittmbb.formats import ParseError, compact, from_compact, parse_machine, serialize
from ittmbb.ittm import HALT, TRIPLES, ITTAction, ITTMachine
from conftest import one_writer

moves = st.sampled_from((-1, 1))


@st.composite
def classical(draw):
    n = draw(st.integers(1, 5))
    targets = st.sampled_from(list(range(n)) + [CHALT])
    return ClassicalMachine(n, tuple(Action(draw(st.integers(0, 1)), draw(moves), draw(targets))
                                     for _ in range(2 * n)))


@st.composite
def ittms(draw):
    n = draw(st.integers(1, 3))
    targets = st.sampled_from(list(range(n)) + [HALT])
    table = tuple(ITTAction(draw(st.sampled_from(TRIPLES)), draw(moves), draw(targets)) for _ in range(8 * (n + 1)))
    return ITTMachine(n, table, draw(st.sampled_from(("limsup", "liminf"))))


@settings(max_examples=60)
@given(st.one_of(classical(), ittms()))
def test_round_trips(m):
    text = serialize(m)
    assert parse_machine(text) == m
    assert serialize(parse_machine(text)) == text
    assert from_compact(compact(m)) == m


def test_comments_and_blank_lines():
    text = "# a machine\n\nclassical states=1   # header\nS0 0 -> 1 R HALT\n  S0 1 -> 0 L S0  # loop\n"
    m = parse_machine(text)
    assert m.compact() == "1RH0LA"


def test_canonical_form_sample():
    text = serialize(one_writer())
    assert text.splitlines()[0] == "ittm states=1 rule=limsup"
    assert text.splitlines()[1] == "S0 (0,0,0) -> (0,1,0) R HALT"
    assert text.splitlines()[-1] == "LIM (1,1,1) -> (1,1,1) R HALT"


def _error(text):
    with pytest.raises(ParseError) as info:
        parse_machine(text)
    return info.value


def test_missing_transition_is_reported():
    e = _error("classical states=2\nS0 0 -> 1 R S1\nS0 1 -> 1 R S1\nS1 0 -> 1 R HALT\n")
    assert "missing transition for S1 1" in e.reason and e.line == 4


def test_duplicate_transition():
    e = _error("classical states=1\nS0 0 -> 1 R HALT\nS0 0 -> 1 R HALT\nS0 1 -> 1 R HALT\n")
    assert "duplicate" in e.reason and (e.line, e.column) == (3, 1)


def test_limit_state_not_a_target():
    lines = serialize(one_writer()).splitlines()
    lines[1] = "S0 (0,0,0) -> (0,1,0) R LIM"
    e = _error("\n".join(lines))
    assert e.reason == "limit state not a valid target" and e.line == 2 and e.column == 25


def test_other_errors_carry_positions():
    assert _error("").reason == "empty document"
    assert _error("machine states=1\n").column == 1
    assert "rule" in _error("classical states=1 rule=limsup\n").reason
    assert "out of range" in _error("classical states=1\nS3 0 -> 1 R HALT\n").reason
    e = _error("classical states=1\nS0 0 -> 1 X HALT\n")
    assert (e.line, e.column) == (2, 11)
    assert "triple" in _error("ittm states=1\nS0 (0,0) -> (0,0,0) R S0\n").reason
    assert "bad state name" in _error("classical states=1\nQ0 0 -> 1 R HALT\n").reason


def test_bad_compact_rejected():
    for bad in ("1XH0LA", "2RH0LA", "1RH", "limsup:000RA"):
        with pytest.raises(ValueError):
            from_compact(bad)
