import json
import os
import subprocess
import sys

import pytest

from vvalla import cli
from vvalla.errors import InputError
from vvalla.experiments import runner
from vvalla.experiments.checks import RunConfig
from vvalla.experiments.corpus import bundled_corpus_path, load_corpus, parse_corpus

HERE = os.path.dirname(__file__)
GOLDEN = os.path.join(HERE, "golden", "gb_report.json")

SMALL = """characteristic: 32003
variables: [x, y]
ideals:
  m: [x, y]
  sq: [x^2, y^2]
"""


def bundled_text():
    with open(bundled_corpus_path(), encoding="utf-8") as fh:
        return fh.read()


# -- parsing ---------------------------------------------------------------------

def test_bundled_corpus_entries():
    c = load_corpus(bundled_corpus_path())
    keys = [e.key for e in c.entries]
    assert keys == ["ring1.m", "ring1.sq", "ring1.d0", "ring1.d1", "ring2.m", "ring2.d0", "ring3.m"]
    assert {e.key: e.ideal.colength for e in c.entries}["ring1.d0"] == 11
    assert all(e.model.cohen_macaulay for e in c.entries)


def test_digest_is_content_hash():
    assert parse_corpus(SMALL).digest == parse_corpus(SMALL).digest
    assert parse_corpus(SMALL).digest != parse_corpus(SMALL.replace("sq", "sq2")).digest


@pytest.mark.parametrize("text,field,fragment", [
    (SMALL + "name: foo\n", "name", "unknown field"),
    (SMALL.replace("32003", "32004"), "characteristic", "not prime"),
    (SMALL.replace("[x^2, y^2]", "[x^2, w]"), "ideals.sq[1]", ""),
    (SMALL.replace("[x^2, y^2]", "[x^2]"), "ideals.sq", "m-primary"),
    (SMALL.replace("variables: [x, y]\n", ""), "variables", "missing field"),
    (SMALL.replace("characteristic: 32003", "characteristic: abc"), "characteristic", "integer"),
])
def test_rejections_name_the_field(text, field, fragment):
    with pytest.raises(InputError) as info:
        parse_corpus(text)
    assert info.value.field == field
    assert fragment in str(info.value)


def test_unknown_field_reports_line():
    with pytest.raises(InputError) as info:
        parse_corpus(SMALL + "name: foo\n")
    assert info.value.line == 6
    assert "'name'" in str(info.value) and "line 6" in str(info.value)


def test_malformed_yaml():
    with pytest.raises(InputError):
        parse_corpus("ideals: [unclosed\n")


def test_empty_document():
    with pytest.raises(InputError):
        parse_corpus("")


# -- reports ---------------------------------------------------------------------

def test_report_is_deterministic_across_processes(tmp_path):
    """Same document, command and seed under different hash seeds give identical bytes."""
    doc = tmp_path / "doc.yaml"
    doc.write_text(SMALL, encoding="utf-8")
    code = ("import sys; from vvalla.experiments import runner; from vvalla.experiments.checks import RunConfig;"
            "r, c, _, _ = runner.execute(open(sys.argv[1]).read(), 'ann', RunConfig(samples=3));"
            "sys.stdout.write(runner.dump_json(r) + c)")
    outs = []
    for hs in ("1", "977"):
        env = dict(os.environ, PYTHONHASHSEED=hs)
        outs.append(subprocess.run([sys.executable, "-c", code, str(doc)], env=env, check=True,
                                   capture_output=True, text=True).stdout)
    assert outs[0] == outs[1]
    assert '"schema": "vvalla.report/1"' in outs[0]


def test_gb_report_matches_golden_file():
    report, _, _, _ = runner.execute(bundled_text(), "gb", RunConfig())
    with open(GOLDEN, encoding="utf-8") as fh:
        assert runner.dump_json(report) == fh.read()


def test_report_field_order():
    report, csv_text, _, _ = runner.execute(SMALL, "gb", RunConfig())
    assert list(report) == ["schema", "command", "document_digest", "config", "incomplete", "status", "entries"]
    assert list(report["entries"][0]) == ["entry", "ring", "ideal", "status", "verdicts", "result"]
    assert csv_text.splitlines()[0] == "entry,index,generator"


def test_only_filter_and_unknown_entry():
    report, _, _, _ = runner.execute(SMALL, "gb", RunConfig(only=("ring1.sq",)))
    assert [e["entry"] for e in report["entries"]] == ["ring1.sq"]
    with pytest.raises(InputError):
        runner.execute(SMALL, "gb", RunConfig(only=("ring9.x",)))


def test_unstable_entries_carry_no_values(monkeypatch):
    from vvalla.errors import UnstabilizedError

    def boom(entry, session):
        raise UnstabilizedError("window exhausted", 42)
    monkeypatch.setitem(runner.HANDLERS, "gb", (boom, ["entry"]))
    report, _, _, _ = runner.execute(SMALL, "gb", RunConfig())
    assert report["status"] == "unstable"
    assert all(e["result"] is None for e in report["entries"])
    assert runner.exit_code(report["status"]) == 3


def test_fail_takes_precedence_over_unstable():
    recs = [{"status": "unstable"}, {"status": "fail"}, {"status": "pass"}]
    assert runner.overall_status(recs) == "fail"


# -- persistence and the CLI --------------------------------------------------------

def test_run_directory_is_append_only(tmp_path):
    out = tmp_path / "runs"
    run_dir, report, status = runner.run_corpus(SMALL, "gb", RunConfig(), str(out), "both")
    assert status == "pass"
    names = sorted(os.listdir(run_dir))
    assert names == ["input.yaml", "manifest.json", "report.csv", "report.json"]
    manifest = json.loads((open(os.path.join(run_dir, "manifest.json")).read()))
    for key in ("document_digest", "config", "seeds", "versions", "wall_clock", "steps", "files"):
        assert key in manifest
    before = open(os.path.join(run_dir, "report.json")).read()
    again, _, status2 = runner.run_corpus(SMALL, "gb", RunConfig(), str(out), "both")
    assert again == run_dir and status2 == "pass"
    assert open(os.path.join(run_dir, "report.json")).read() == before
    log = [json.loads(line) for line in open(os.path.join(run_dir, "replays.jsonl"))]
    assert log[-1]["identical"] is True
    with pytest.raises(FileExistsError):
        runner.atomic_write(os.path.join(run_dir, "report.json"), "x")


def test_interrupted_run_is_marked_incomplete(tmp_path, monkeypatch):
    real = runner.run_entry
    calls = []

    def flaky(command, entry, session):
        calls.append(entry.key)
        if len(calls) == 2:
            raise KeyboardInterrupt
        return real(command, entry, session)
    monkeypatch.setattr(runner, "run_entry", flaky)
    run_dir, report, status = runner.run_corpus(SMALL, "gb", RunConfig(), str(tmp_path), "json")
    assert status == "incomplete" and report["incomplete"]
    names = os.listdir(run_dir)
    assert "report.json" not in names and "manifest.json" not in names
    assert any(n.startswith("INCOMPLETE-") and n.endswith("report.json") for n in names)


def test_cli_exit_codes_and_replay(tmp_path, capsys):
    doc = tmp_path / "doc.yaml"
    doc.write_text(SMALL, encoding="utf-8")
    out = tmp_path / "runs"
    assert cli.main(["gb", str(doc), "--out", str(out), "--format", "both"]) == 0
    (run_dir,) = [out / d for d in os.listdir(out)]
    assert cli.main(["replay", str(run_dir)]) == 0
    assert "identical" in capsys.readouterr().err
    bad = tmp_path / "bad.yaml"
    bad.write_text(SMALL + "name: foo\n", encoding="utf-8")
    assert cli.main(["gb", str(bad), "--out", str(out)]) == 2
    assert "name" in capsys.readouterr().err
    assert cli.main(["gb", str(tmp_path / "missing.yaml"), "--out", str(out)]) == 2
    assert cli.main(["gb", str(doc), "--lmax", "1", "--out", str(out)]) == 2


def test_cli_replay_detects_tampering(tmp_path):
    doc = tmp_path / "doc.yaml"
    doc.write_text(SMALL, encoding="utf-8")
    out = tmp_path / "runs"
    assert cli.main(["depth-g", str(doc), "--out", str(out)]) == 0
    (run_dir,) = [out / d for d in os.listdir(out)]
    path = run_dir / "report.json"
    os.chmod(path, 0o644)
    path.write_text(path.read_text().replace('"depth": 2', '"depth": 1', 1))
    assert cli.main(["replay", str(run_dir)]) == 1
