"""CLI behavior: exit-code partition and byte-stable golden outputs."""

from __future__ import annotations

from pathlib import Path

import pytest

from a2.cli import main

from conftest import fixture_path

GOLDEN = Path(__file__).resolve().parent / "golden"


def run(capsys, *argv) -> tuple:
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# exit codes: {0 pass, 1 gate failure, 2 usage/parse}
# ---------------------------------------------------------------------------


def test_check_clean_case(capsys):
    code, out, _ = run(capsys, "check", fixture_path("minimal.a2"))
    assert code == 0
    assert out == "no structural findings\n"


def test_check_findings_exit_one(capsys, tmp_path):
    bad = tmp_path / "incomplete.a2"
    bad.write_text(
        'case "X" { claim TC "t" top claim S "floating" '
        'block decomposition B { parent TC; sub S; justification "j"; } }'
    )
    code, out, _ = run(capsys, "check", bad)
    assert code == 1
    assert "unsupported-leaf" in out


def test_parse_error_exit_two(capsys, tmp_path):
    bad = tmp_path / "broken.a2"
    bad.write_text('case "X" { claim }')
    code, _, err = run(capsys, "check", bad)
    assert code == 2
    assert "error" in err


def test_missing_file_exit_two(capsys):
    code, _, err = run(capsys, "check", "no-such-file.a2")
    assert code == 2


def test_usage_error_exit_two(capsys):
    assert main(["confidence", str(fixture_path("sound.a2"))]) == 2  # --method required
    capsys.readouterr()


def test_validity_gate(capsys):
    code, *_ = run(capsys, "validity", fixture_path("sound.a2"), "--concur-all")
    assert code == 0
    code, *_ = run(capsys, "validity", fixture_path("doubt.a2"), "--concur-all")
    assert code == 1
    code, *_ = run(capsys, "validity", fixture_path("sound.a2"))  # no concurrence
    assert code == 1


def test_sound_gate(capsys):
    assert run(capsys, "sound", fixture_path("sound.a2"), "--concur-all")[0] == 0
    assert run(capsys, "sound", fixture_path("doubt.a2"), "--concur-all")[0] == 1


def test_confidence_requires_soundness_or_flag(capsys):
    code, _, err = run(capsys, "confidence", fixture_path("doubt.a2"), "--method", "product",
                       "--concur-all")
    assert code == 1
    assert "not sound" in err
    code, out, _ = run(capsys, "confidence", fixture_path("doubt.a2"), "--method", "product",
                       "--concur-all", "--exploratory")
    assert code == 0
    assert "TC:" in out


def test_confidence_top_line(capsys):
    code, out, _ = run(capsys, "confidence", fixture_path("sound.a2"), "--method", "product",
                       "--concur-all")
    assert code == 0
    assert "top TC: 0.6615" in out


def test_measures_gate(capsys):
    assert run(capsys, "measures", fixture_path("sound.a2"))[0] == 0
    assert run(capsys, "measures", fixture_path("inconsistent.a2"))[0] == 1
    assert run(capsys, "measures", fixture_path("sound.a2"), "--node", "nope")[0] == 2


def test_risks_gate_and_thresholds_file(capsys, tmp_path):
    assert run(capsys, "risks", fixture_path("residuals.a2"))[0] == 0
    # tighter class threshold makes the same ledger unacceptable
    config = tmp_path / "t.conf"
    config.write_text("class_threshold = 0.03\nindividual_threshold = 0.01\n")
    code, out, _ = run(capsys, "risks", fixture_path("residuals.a2"), "--thresholds", config)
    assert code == 1
    assert "unacceptable" in out
    config.write_text("bogus_key = 1\n")
    assert run(capsys, "risks", fixture_path("residuals.a2"), "--thresholds", config)[0] == 2


def test_fmt_round_trips_itself(capsys, tmp_path):
    code, out, _ = run(capsys, "fmt", fixture_path("sound.a2"))
    assert code == 0
    again = tmp_path / "again.a2"
    again.write_text(out)
    code2, out2, _ = run(capsys, "fmt", again)
    assert out2 == out


# ---------------------------------------------------------------------------
# golden outputs (byte-stable across runs)
# ---------------------------------------------------------------------------

GOLDEN_COMMANDS = {
    "check_minimal.txt": ("check", "minimal.a2"),
    "validity_doubt.txt": ("validity", "doubt.a2", "--concur-all"),
    "sound_sound.txt": ("sound", "sound.a2", "--concur-all"),
    "confidence_sound_product.txt": ("confidence", "sound.a2", "--method", "product", "--concur-all"),
    "confidence_sound_doubts.txt": ("confidence", "sound.a2", "--method", "doubts", "--concur-all"),
    "measures_inconsistent.txt": ("measures", "inconsistent.a2"),
    "risks_residuals.txt": ("risks", "residuals.a2"),
    "export_dot_sound.txt": ("export", "sound.a2", "--dot", "--concur-all"),
    "export_json_eliminative.txt": ("export", "eliminative.a2", "--json", "--concur-all"),
    "fmt_sound.txt": ("fmt", "sound.a2"),
    "fmt_sound_json.txt": ("fmt", "sound.a2", "--format", "json"),
    "report_residuals.txt": ("report", "residuals.a2", "--concur-all"),
}


@pytest.mark.parametrize("golden_name", sorted(GOLDEN_COMMANDS))
def test_golden_output(capsys, golden_name):
    command, case, *flags = GOLDEN_COMMANDS[golden_name]
    argv = [command, str(fixture_path(case)), *flags]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second, "output not byte-stable across runs"
    assert first == (GOLDEN / golden_name).read_text(encoding="utf-8")
