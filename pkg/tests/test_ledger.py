import json

import pytest

from ittmbb.ledger import FIELDS, SCHEMA_VERSION, Ledger, make_record


def test_record_has_every_field():
    rec = make_record("run", n=2, machine="1RB1LB_1LA1RH", extra=5)
    for key in FIELDS + ("schema_version", "timestamp"):
        assert key in rec
    assert rec["kind"] == "run" and rec["extra"] == 5 and rec["outcome"] is None
    assert rec["schema_version"] == SCHEMA_VERSION


def test_append_and_find(tmp_path):
    led = Ledger(tmp_path / "sub" / "l.jsonl")
    led.append(make_record("task", search="a", task=0))
    led.append(make_record("task", search="b", task=0))
    led.append(make_record("report", search="a"))
    assert [r["kind"] for r in led.records()] == ["task", "task", "report"]
    assert len(led.find("task", "a")) == 1
    line = (tmp_path / "sub" / "l.jsonl").read_text().splitlines()[0]
    assert list(json.loads(line)) == sorted(json.loads(line))


def test_torn_line_is_skipped(tmp_path):
    path = tmp_path / "l.jsonl"
    led = Ledger(path)
    led.append(make_record("task", search="a", task=0))
    with path.open("a") as fh:
        fh.write('{"kind": "task", "sea')
    assert len(list(led.records())) == 1


def test_unknown_schema_rejected(tmp_path):
    path = tmp_path / "l.jsonl"
    path.write_text(json.dumps({"schema_version": 99, "kind": "task"}) + "\n")
    with pytest.raises(ValueError, match="schema_version"):
        list(Ledger(path).records())


def test_memory_ledger():
    led = Ledger()
    led.append(make_record("task", search="x"))
    assert len(led.find("task", "x")) == 1
    assert not list(Ledger(None).records())
