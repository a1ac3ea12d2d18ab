import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from cbpv import lind
from cbpv.cli import REPORT_SCHEMA, run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def cfg(name):
    return str(CONFIGS / name)


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--format", "json")
    report = json.loads(out)
    jsonschema.validate(report, REPORT_SCHEMA)
    return code, report


def test_check_prints_type(capsys):
    code, out, _ = call(capsys, "check", cfg("choice.cbpv"), "--model", cfg("pfin_model.json"))
    assert code == 0 and out.strip() == f"{cfg('choice.cbpv')}: F b"


def test_check_rejects_ill_typed(tmp_path, capsys):
    bad = tmp_path / "bad.cbpv"
    bad.write_text("return () to x. pm x as (y, z). return y\n")
    code, out, _ = call(capsys, "check", str(bad), "--sig", cfg("choice_sig.json"))
    assert code == 1 and "bad.cbpv" in out


def test_check_reports_parse_position(tmp_path, capsys):
    bad = tmp_path / "bad.cbpv"
    bad.write_text("or(return ();\n  return $)\n")
    code, report = call_json(capsys, "check", str(bad), "--sig", cfg("choice_sig.json"))
    assert code == 1 and report["status"] == "fail"
    assert report["error"].startswith("2:10")


def test_eval_pfin(capsys):
    code, out, _ = call(capsys, "eval", cfg("choice.cbpv"), "--model", cfg("pfin_model.json"))
    assert code == 0 and out.splitlines() == ["F b", "{a, b}"]


def test_eval_storage(capsys):
    code, report = call_json(capsys, "eval", cfg("tick.cbpv"), "--model", cfg("storage_model.json"))
    assert code == 0
    assert report["denotation"] == "fun{s0 -> ((a, b), s0), s1 -> ((b, a), s1)}"


def test_eval_with_environment(tmp_path, capsys):
    env = tmp_path / "env.json"
    env.write_text(json.dumps({"x": {"type": "b", "value": "b"}}))
    prog = tmp_path / "p.cbpv"
    prog.write_text("or(return x; return c)")
    code, out, _ = call(capsys, "eval", str(prog), "--model", cfg("pfin_model.json"), "--env", str(env))
    assert code == 0 and out.splitlines()[1] == "{a, b}"


@pytest.mark.parametrize("glue", ["glue_exception.json", "glue_free.json", "glue_tt.json", "glue_em.json"])
def test_logrel_generated_corpus(glue, capsys):
    code, report = call_json(capsys, "logrel", "--glue", cfg(glue), "--count", "60", "--seed", "3",
                             "--type", "F b")
    assert code == 0 and report["status"] == "pass"
    assert len(report["terms"]) == 60


def test_logrel_corpus_file(capsys):
    code, out, _ = call(capsys, "logrel", "--glue", cfg("glue_exception.json"), "--corpus",
                        cfg("sample_corpus.txt"))
    assert code == 0 and "3/3" in out


def test_logrel_negative_control(capsys):
    code, out, _ = call(capsys, "logrel", cfg("raise.cbpv"), "--glue", cfg("glue_exception_unrelated.json"))
    assert code == 1
    assert "unrelated constant boom" in out
    assert "counterexample #0: boom to x. return x" in out


def test_simulate(capsys):
    code, out, _ = call(capsys, "simulate", "--sig", cfg("choice_sig.json"), "--count", "40", "--seed", "7")
    assert code == 0
    assert out.splitlines()[-1].startswith("effect simulation: no counterexample found (40/40")


def test_simulate_json(capsys):
    code, report = call_json(capsys, "simulate", "--sig", cfg("choice_sig.json"), "--count", "20",
                             "--seed", "7")
    assert code == 0 and all(r["equation"] == r["relation"] for r in report["terms"])


def test_seed_is_mandatory(capsys):
    code, _, err = call(capsys, "simulate", "--sig", cfg("choice_sig.json"), "--count", "5")
    assert code == 2 and "--seed" in err


def test_missing_file_is_usage_error(capsys):
    code, report = call_json(capsys, "eval", cfg("choice.cbpv"), "--model", "nope.json")
    assert code == 2 and report["status"] == "error"


def test_simulate_needs_choice_signature(tmp_path, capsys):
    sig = tmp_path / "s.json"
    sig.write_text(json.dumps({"value_bases": ["b"], "operations": [{"name": "or", "arity": 2}]}))
    code, _, _ = call(capsys, "simulate", "--sig", str(sig), "--count", "5", "--seed", "1")
    assert code == 2


def test_gen_is_deterministic(capsys):
    argv = ["gen", "--sig", cfg("choice_sig.json"), "--type", "F (b + 1)", "--depth", "3",
            "--count", "25", "--seed", "42", "--model", cfg("pfin_model.json")]
    first = call(capsys, *argv)
    second = call(capsys, *argv)
    assert first == second and first[0] == 0
    assert len(first[1].splitlines()) == 25


def test_reports_are_byte_identical(capsys):
    argv = ["logrel", "--glue", cfg("glue_free.json"), "--count", "30", "--seed", "9", "--type", "F b",
            "--format", "json"]
    assert call(capsys, *argv) == call(capsys, *argv)


def test_gen_json(capsys):
    code, report = call_json(capsys, "gen", "--sig", cfg("choice_sig.json"), "--type", "F 1", "--depth", "2",
                             "--count", "3", "--seed", "0")
    assert code == 0 and len(report["terms"]) == 3


def test_lind_check_files(tmp_path, capsys):
    _, _, F = lind.pred_truncation((0, 1))
    good = tmp_path / "pred.json"
    good.write_text(json.dumps(F.to_json()))
    code, report = call_json(capsys, "lind", "check", str(good))
    assert code == 0 and report["kind"] == "functor" and report["fibration"]["failures"] == []
    bad = tmp_path / "idem.json"
    bad.write_text(json.dumps(lind.corrupt_reindex(lind.idempotent_lind(), "id1", "t", "id").to_json()))
    code, report = call_json(capsys, "lind", "check", str(bad))
    assert code == 1 and len(report["violations"]) == 1


def test_lind_check_malformed(tmp_path, capsys):
    junk = tmp_path / "junk.json"
    junk.write_text('{"index": {}}')
    code, report = call_json(capsys, "lind", "check", str(junk))
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cbpv.cli", "check", cfg("choice.cbpv"),
                           "--model", cfg("pfin_model.json")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().endswith(": F b")
