"""End-to-end command behavior: exit codes, determinism, artifacts."""

import json
import shutil
import subprocess
import sys

import pytest

from jacfact.acceptance import corpus_root
from jacfact.cli import main, run_command
from jacfact.field import QQ
from jacfact.mf import koszul_mf, mf_to_text, termwise_decomposition
from jacfact.poly import Polynomial
from jacfact.reports import render_json


def poly_path(name):
    return str(corpus_root() / "polys" / name)


def gram_path(name):
    return str(corpus_root() / "grams" / name)


def strip_timing(report_json):
    data = json.loads(report_json)
    data.pop("timing_seconds")
    return json.dumps(data, sort_keys=True)


def test_jacring_pass():
    report, code = run_command(["jacring", poly_path("fermat_cubic_binary.poly")])
    assert code == 0
    assert report.status == "pass"
    assert report.data["hilbert"] == [1, 2, 1]
    assert report.input_hash


def test_jacring_rejects_singular(tmp_path):
    bad = tmp_path / "cone.poly"
    bad.write_text("vars 2\nx0^3\n")
    report, code = run_command(["jacring", str(bad)])
    assert code == 1
    assert report.status == "reject"
    assert [c.name for c in report.checks if not c.passed] == ["smooth"]


def test_missing_file_is_input_error():
    report, code = run_command(["jacring", "/no/such/file.poly"])
    assert code == 2
    assert report.status == "error"


def test_bad_field_is_input_error():
    report, code = run_command(
        ["jacring", poly_path("fermat_cubic_binary.poly"), "--field", "fp:4"]
    )
    assert code == 2


def test_budget_exhaustion_is_resource_exit():
    report, code = run_command(
        ["jacring", poly_path("fermat_cubic_4fold.poly"), "--budget", "10"]
    )
    assert code == 3
    assert report.status == "resource"
    details = report.checks[0].details
    assert details["needed"] > details["budget"]


def test_json_reports_are_deterministic_and_float_free():
    argv = ["jacring", poly_path("fermat_quartic_surface.poly"), "--output", "json"]
    first, _ = run_command(argv)
    second, _ = run_command(argv)
    assert strip_timing(render_json(first)) == strip_timing(render_json(second))

    def walk(node):
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)
        else:
            assert not isinstance(node, float)

    walk(json.loads(strip_timing(render_json(first))))


def test_report_flag_is_an_output_alias():
    via_report, _ = run_command(
        ["jacring", poly_path("fermat_cubic_binary.poly"), "--report", "json"]
    )
    via_output, _ = run_command(
        ["jacring", poly_path("fermat_cubic_binary.poly"), "--output", "json"]
    )
    assert via_report.config == via_output.config
    assert strip_timing(render_json(via_report)) == strip_timing(render_json(via_output))


def test_main_prints_text_report(capsys):
    code = main(["jacring", poly_path("fermat_cubic_binary.poly")])
    captured = capsys.readouterr()
    assert code == 0
    assert "status: pass" in captured.out
    assert "[ pass ] smooth" in captured.out


def test_mf_commands_on_polynomial_input():
    target = poly_path("fermat_cubic_binary.poly")
    for argv in [
        ["mf", "validate", target],
        ["mf", "shift-check", target],
        ["mf", "chainrule", target],
        ["mf", "hom", target, "--degree", "2"],
        ["mf", "lmf", target, "--degree", "2"],
    ]:
        report, code = run_command(argv)
        assert code == 0, argv
        assert report.all_passed


def test_mf_validate_serialized_object(tmp_path):
    f = Polynomial.parse("x0^3 + x1^3", 2, QQ)
    text = mf_to_text(koszul_mf(f, termwise_decomposition(f)))
    good = tmp_path / "cubic.mf"
    good.write_text(text)
    _, code = run_command(["mf", "validate", str(good)])
    assert code == 0

    tampered = tmp_path / "broken.mf"
    tampered.write_text(text.replace("x0^2 ; x1^2", "x0^2 ; x0*x1"))
    report, code = run_command(["mf", "validate", str(tampered)])
    assert code == 1
    assert report.status == "reject"
    assert report.checks[-1].details["first_violation"] is not None


def test_mf_rejects_malformed_file(tmp_path):
    bad = tmp_path / "garbage.mf"
    bad.write_text("vars 2\nnope\n")
    _, code = run_command(["mf", "validate", str(bad)])
    assert code == 2


def test_mf_budget_exit():
    _, code = run_command(
        ["mf", "hom", poly_path("fermat_cubic_binary.poly"), "--budget", "2"]
    )
    assert code == 3


def test_lattice_commands():
    report, code = run_command(["lattice", "disc", gram_path("a2.gram")])
    assert code == 0
    assert report.data["invariant_factors"] == [3]

    report, code = run_command(["lattice", "ogroup", gram_path("a2.gram")])
    assert code == 0
    assert report.data["order"] == 12

    report, code = run_command(
        ["lattice", "glue", gram_path("a2.gram"), gram_path("a2_neg.gram")]
    )
    assert code == 0
    assert report.data["overlattice"]["unimodular"]

    report, code = run_command(
        ["lattice", "glue", gram_path("a2.gram"), gram_path("a2.gram")]
    )
    assert code == 1

    report, code = run_command(
        [
            "lattice", "extend", gram_path("a2.gram"), gram_path("a2_neg.gram"),
            "--phi", "swap", "--g", "neg-id",
        ]
    )
    assert code == 0

    report, code = run_command(
        [
            "lattice", "extend", gram_path("a2.gram"), gram_path("a2_neg.gram"),
            "--phi", "swap", "--g", "id",
        ]
    )
    assert code == 1
    failing = report.checks[-1]
    assert failing.details["witness"]["non_integral_entry"]

    report, code = run_command(
        ["lattice", "orient", gram_path("a2.gram"), "--iso", "rot"]
    )
    assert code == 0
    assert report.data["orientation_sign"] == 1

    report, code = run_command(["lattice", "orient", gram_path("a2.gram"), "--iso", "bogus"])
    assert code == 2


def test_corpus_runner_all_green():
    report, code = run_command(["corpus"])
    assert code == 0
    assert report.data["passed"] == report.data["total"] == 9


def test_corpus_detects_golden_tampering(tmp_path):
    clone = tmp_path / "corpus"
    shutil.copytree(corpus_root(), clone)
    golden = clone / "golden" / "criterion_2.json"
    record = json.loads(golden.read_text())
    record["dim_3"] = 21
    golden.write_text(json.dumps(record, indent=2, sort_keys=True))
    report, code = run_command(["corpus", str(clone)])
    assert code == 1
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == ["criterion_2"]


def test_figures_are_written(tmp_path):
    figures = tmp_path / "figs"
    _, code = run_command(
        [
            "jacring", poly_path("fermat_cubic_binary.poly"),
            "--figures", str(figures),
        ]
    )
    assert code == 0
    pngs = sorted(p.name for p in figures.glob("*.png"))
    csvs = sorted(p.name for p in figures.glob("*.csv"))
    assert pngs == ["fermat_cubic_binary_hilbert.png"]
    assert csvs == [
        "fermat_cubic_binary_hilbert.csv",
        "fermat_cubic_binary_pairings.csv",
    ]
    assert all((figures / n).stat().st_size > 0 for n in pngs + csvs)


def test_installed_script_entry_point():
    exe = shutil.which("jacfact")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run(
        [exe, "jacring", poly_path("fermat_cubic_binary.poly")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "status: pass" in proc.stdout


def test_python_dash_m_invocation():
    proc = subprocess.run(
        [sys.executable, "-m", "jacfact", "lattice", "disc", gram_path("u.gram")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "status: pass" in proc.stdout
