from hypothesis import given, strategies as st
import pytest

from ittmbb.eptape import EPTape

words = st.text(alphabet="01", max_size=8)
periods = st.text(alphabet="01", min_size=1, max_size=6)
tapes = st.builds(EPTape, words, periods)


@given(words, periods)
def test_canonical_form_denotes_same_word(prefix, period):
    t = EPTape(prefix, period)
    raw = prefix + period * 40
    assert "".join(map(str, t.cells(len(raw)))) == raw
    assert len(t.prefix) <= len(prefix)
    assert len(t.period) <= len(period)


@given(tapes, tapes)
def test_equality_is_semantic(a, b):
    n = 2 * (len(a.prefix) + len(b.prefix)) + 4 * len(a.period) * len(b.period) + 8
    assert (a == b) == (a.cells(n) == b.cells(n))


def test_canonical_examples():
    assert EPTape("1010", "10") == EPTape("", "10")
    assert EPTape("0", "00") == EPTape.blank()
    assert EPTape("11", "0101") == EPTape("1", "10")


@given(tapes)
def test_parse_round_trip(t):
    assert EPTape.parse(str(t)) == t


def test_parse_rejects_garbage():
    for bad in ("12", "1(", "()", "abc", "1(0)1"):
        with pytest.raises(ValueError):
            EPTape.parse(bad)


@given(tapes, tapes)
def test_boolean_ops_cellwise(a, b):
    n = 60
    assert (a | b).cells(n) == [x | y for x, y in zip(a.cells(n), b.cells(n))]
    assert (a & b).cells(n) == [x & y for x, y in zip(a.cells(n), b.cells(n))]
    assert (~a).cells(n) == [1 - x for x in a.cells(n)]
    assert (a & b).below(a)


@given(tapes, st.integers(0, 20))
def test_suffix(t, k):
    assert t.suffix(k).cells(30) == t.cells(k + 30)[k:]


def test_ones():
    assert EPTape("1101").ones() == 3
    assert EPTape("1", "01").ones() is None
    with pytest.raises(IndexError):
        EPTape.blank()[-1]
