import json
import subprocess
import sys

import pytest

from ittmbb.cli import BAD_INPUT, OK, UNDETERMINED, cli_dispatch
from ittmbb.formats import serialize
from conftest import one_writer, right_mover, unary_successor, input_copier

BB2 = "classical states=2\nS0 0 -> 1 R S1\nS0 1 -> 1 L S1\nS1 0 -> 1 L S0\nS1 1 -> 1 R HALT\n"


@pytest.fixture
def files(tmp_path):
    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return put


def run(capsys, *argv):
    code = cli_dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sim(capsys, files):
    code, out, _ = run(capsys, "sim", "--machine", files("bb2.tm", BB2))
    assert code == OK
    assert "Halted after 6 steps" in out and "score (ones) = 4" in out and "clean output = 4" in out


def test_sim_undetermined(capsys, files):
    loop = "classical states=1\nS0 0 -> 1 R S0\nS0 1 -> 1 R S0\n"
    code, out, _ = run(capsys, "sim", "--machine", files("loop.tm", loop), "--budget", "100")
    assert code == UNDETERMINED


def test_itsim_reports_stage(capsys, files, tmp_path):
    path = files("one.ittm", serialize(one_writer()))
    trace = tmp_path / "trace.jsonl"
    code, out, _ = run(capsys, "itsim", "--machine", path, "--trace", str(trace), "--trace-steps")
    assert code == OK
    assert "Halted at ω·0+1 (w*0+1)" in out and "output value: 1" in out
    events = [json.loads(line) for line in trace.read_text().splitlines()]
    assert [e["event"] for e in events] == ["step", "halt"]


def test_itsim_certificate_and_ledger(capsys, files, tmp_path):
    ledger = tmp_path / "l.jsonl"
    code, out, _ = run(capsys, "itsim", "--machine", files("rm.ittm", serialize(right_mover())),
                       "--ledger", str(ledger))
    assert code == OK
    assert "NonHaltingCertified: equal snapshots at ω·1+0 (w*1+0) and ω·2+0 (w*2+0)" in out
    rec = json.loads(ledger.read_text())
    assert rec["outcome"] == "nonhalting" and rec["witness"] == ["w*1+0", "w*2+0"]


def test_itsim_input_and_rule(capsys, files):
    path = files("succ.ittm", serialize(unary_successor().machine))
    code, out, _ = run(capsys, "itsim", "--machine", path, "--input", "111", "--rule", "liminf")
    assert code == OK and "input: 1111(0)" in out


def test_fstar(capsys, files):
    code, out, _ = run(capsys, "fstar", "--machine", files("one.ittm", serialize(one_writer())), "--n", "3")
    assert code == OK and out.strip() == "f*(3) = 1"


def test_bad_inputs(capsys, files):
    assert run(capsys, "sim", "--machine", "/nonexistent")[0] == BAD_INPUT
    code, _, err = run(capsys, "sim", "--machine", files("bad.tm", "classical states=1\nS0 0 -> 1 R HALT\n"))
    assert code == BAD_INPUT and "missing transition" in err and "line 2" in err
    assert run(capsys, "itsim", "--machine", files("bb2.tm", BB2))[0] == BAD_INPUT
    assert run(capsys, "decode", "1x")[0] == BAD_INPUT
    assert run(capsys, "encode", "--", "-1")[0] == BAD_INPUT
    assert run(capsys, "sigma", "--n", "9")[0] == BAD_INPUT
    assert run(capsys, "sigma-inf-lb", "--n", "3")[0] == BAD_INPUT
    assert run(capsys, "sigma", "--n", "1", "--workers", "0")[0] == BAD_INPUT
    assert run(capsys, "nonsense")[0] == BAD_INPUT


def test_encode_decode(capsys):
    assert run(capsys, "encode", "3")[1].strip() == "111(0)"
    assert run(capsys, "decode", "110")[1].strip() == "2"
    assert run(capsys, "decode", "1(01)")[1].strip() == "undefined"


def test_sigma_and_verify(capsys, tmp_path):
    ledger = str(tmp_path / "l.jsonl")
    code, out, _ = run(capsys, "sigma", "--n", "2", "--ledger", ledger)
    assert code == OK and out.startswith("Σ(2)=4 Exact")
    code, out, _ = run(capsys, "stime", "--n", "2", "--ledger", ledger)
    assert code == OK and out.startswith("S(2)=6 Exact")
    code, out, _ = run(capsys, "verify", "--certificate", ledger)
    assert code == OK and "2/2 certificates verified" in out


def test_verify_rejects_tampered(capsys, tmp_path):
    ledger = str(tmp_path / "l.jsonl")
    run(capsys, "sigma", "--n", "2", "--ledger", ledger)
    rec = next(json.loads(x) for x in open(ledger) if '"certificate"' in x and '"kind": "certificate"' in x)
    cert = rec["certificate"]
    cert["score"] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    code, out, _ = run(capsys, "verify", "--certificate", str(bad))
    assert code == UNDETERMINED and "FAIL" in out


def test_compose(capsys, files):
    code, out, _ = run(capsys, "compose", "--machine", files("succ.ittm", serialize(unary_successor().machine)),
                       "--x", "2")
    assert code == OK
    assert out.startswith("ittm states=11 rule=limsup")
    assert out.rstrip().endswith("# x=2 C=1 h(C)=9 s(x)=11")
    code, _, err = run(capsys, "compose", "--machine", files("rm.ittm", serialize(input_copier())), "--x", "1")
    assert code == BAD_INPUT and "more than one tape" in err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "ittmbb.cli", "encode", "2"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "11(0)"
