import json
import subprocess
import sys
from pathlib import Path

import pytest

from ufe import SingleFactorData, analyze
from ufe.cli import main
from ufe.golden import load_example
from ufe.report import StageError, from_json, render_text, to_json

DATA = Path(__file__).resolve().parents[1] / "src" / "ufe" / "data"


@pytest.mark.parametrize("name, interaction", [("example1", False), ("example2", True), ("example3", True)])
def test_json_round_trip(name, interaction):
    report = analyze(load_example(name), interaction=interaction, objective="larger" if interaction else None)
    assert from_json(to_json(report)) == report


def test_json_is_deterministic():
    a = analyze(load_example("example3"), interaction=True, objective="smaller")
    b = analyze(load_example("example3"), interaction=True, objective="smaller")
    assert to_json(a) == to_json(b)


def test_text_and_json_agree():
    report = analyze(load_example("example2"), interaction=True)
    text = render_text(report)
    for e in report.fit.effects():
        assert f"{e.estimate:.3f} +- {e.ci.half_width:.3f}" in text
    for t in report.tests:
        assert f"{t.name}: {t.decision.value}" in text


def test_recommendation_only_with_interaction():
    assert analyze(load_example("example3"), interaction=False, objective="larger").recommendation is None
    assert analyze(load_example("example3"), interaction=True).recommendation is None
    rec = analyze(load_example("example3"), interaction=True, objective="smaller").recommendation
    assert rec.label == "A2B2"


def test_halted_report_has_no_fit():
    tight = tuple(5.0 + x for x in (0.01, -0.01, 0.02, -0.02, 0.01, -0.01))
    wide = tuple(20.0 + x for x in (5.0, -5.0, 4.0, -4.0, 6.0, -6.0))
    report = analyze(SingleFactorData((tight, wide)))
    assert report.status == "halted"
    assert report.halted_at == "homogeneity-sigma"
    assert report.fit is None and report.tests == ()
    assert "HALTED at homogeneity-sigma" in render_text(report)
    assert from_json(to_json(report)) == report


def test_stage_errors_name_the_stage():
    d = SingleFactorData(((1.0,), (2.0, 3.0)))
    with pytest.raises(StageError) as err:
        analyze(d)
    assert err.value.stage == "diagnostics"


def test_cli_analyze_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["analyze", "--input", str(DATA / "example3.csv"), "--design", "two", "--interaction",
                 "--objective", "larger", "--format", "json", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert list(doc) == ["dataset", "diagnostics", "fit", "tests", "recommendation", "provenance"]
    assert doc["recommendation"]["label"] == "A1B2"
    assert doc["provenance"]["digest"].startswith("sha256:")


def test_cli_analyze_text(capsys):
    code = main(["analyze", "--input", str(DATA / "example1.csv"), "--design", "single"])
    assert code == 0
    text = capsys.readouterr().out
    assert "H_a: reject" in text and "H0: reject" in text


def test_cli_exit_2_on_halt(tmp_path, capsys):
    rows = ["level_a,value"]
    rows += [f"1,{5 + x}" for x in (0.01, -0.01, 0.02, -0.02, 0.01, -0.01)]
    rows += [f"2,{20 + x}" for x in (5, -5, 4, -4, 6, -6)]
    f = tmp_path / "halt.csv"
    f.write_text("\n".join(rows) + "\n")
    assert main(["analyze", "--input", str(f), "--design", "single"]) == 2
    captured = capsys.readouterr()
    assert "homogeneity of sigma: reject" in captured.out
    assert "halted [homogeneity-sigma]" in captured.err


def test_cli_exit_1_on_bad_input(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("level_a,value\n1,2\n2,x\n")
    assert main(["analyze", "--input", str(f), "--design", "single"]) == 1
    assert "error [parse]" in capsys.readouterr().err
    assert main(["analyze", "--input", str(tmp_path / "missing.csv"), "--design", "single"]) == 1


def test_cli_exit_1_on_degenerate_group(tmp_path, capsys):
    f = tmp_path / "one.csv"
    f.write_text("level_a,value\n1,2\n2,3\n2,4\n")
    assert main(["analyze", "--input", str(f), "--design", "single"]) == 1
    assert "error [diagnostics]" in capsys.readouterr().err


def test_cli_flag_validation(capsys):
    assert main(["analyze", "--input", str(DATA / "example1.csv"), "--design", "single",
                 "--interaction"]) == 1
    with pytest.raises(SystemExit):
        main(["analyze", "--input", "x", "--design", "single", "--alpha", "1.5"])


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ufe.cli", "golden", "example3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "58/58" in proc.stdout
