"""CLI surface: exit codes, JSON contract, determinism."""
import json

import numpy as np
import pytest
from click.testing import CliRunner

from fanatic.cli import (
    EXIT_BUDGET,
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    cmd_bordism_table,
    cmd_verify_fan2,
    cmd_verify_fan3,
    main,
    rat,
)


@pytest.fixture
def runner():
    return CliRunner()


def write_measure(path, seed, n=150):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    w = rng.random(n) + 0.1
    path.write_text(json.dumps({"points": pts.tolist(), "weights": w.tolist()}))
    return str(path)


def test_rational_serialization():
    from fractions import Fraction

    assert rat(Fraction(3, 7)) == "3/7"
    assert rat(2) == "2/1"


def test_bordism_table_report():
    report = cmd_bordism_table(6)
    assert report.all_pass
    rows = report.checks[0].witness["rows"]
    assert rows[2] == {
        "n": 3,
        "group": "Q_12",
        "abelianization": "Z/4",
        "parity": "odd",
        "in_scope": True,
    }
    assert rows[5]["abelianization"] == "Z/2 + Z/2"
    assert rows[5]["in_scope"] is False


def test_bordism_table_json_roundtrip_and_determinism(runner):
    r1 = runner.invoke(main, ["bordism-table", "--max-n", "4", "--json"])
    r2 = runner.invoke(main, ["bordism-table", "--max-n", "4", "--json"])
    assert r1.exit_code == EXIT_OK
    d1, d2 = json.loads(r1.output), json.loads(r2.output)
    d1.pop("timings"), d2.pop("timings")
    assert d1 == d2
    assert d1["command"] == "bordism-table"
    assert d1["all_pass"] is True


def test_verify_fan2_even_n_usage_error(runner):
    result = runner.invoke(main, ["verify-fan2", "--n", "4"])
    assert result.exit_code == EXIT_USAGE


def test_verify_fan2_report_structure():
    report = cmd_verify_fan2(3)
    names = [c.name for c in report.checks]
    for expected in (
        "condition-a1",
        "equivariance",
        "transversality",
        "o-components",
        "delta-components",
        "label-structure",
        "component-stabilizers",
        "bordism-class",
    ):
        assert expected in names
    by_name = {c.name: c for c in report.checks}
    # every failed check carries a concrete witness
    for c in report.checks:
        if not c.passed:
            assert c.witness
    assert by_name["o-components"].passed
    assert by_name["delta-components"].passed
    assert by_name["label-structure"].passed


def test_verify_fan2_with_reduction():
    report = cmd_verify_fan2(5, p=2)
    by_name = {c.name: c for c in report.checks}
    assert by_name["reduction-identities"].passed
    assert "/" in by_name["reduction-identities"].witness["det_c"]


def test_verify_fan3_distinct_passes_class_check(runner):
    report = cmd_verify_fan3(7, (1, 2, 4))
    by_name = {c.name: c for c in report.checks}
    assert by_name["bordism-class"].passed
    assert by_name["o-components"].passed
    assert by_name["arrangement-stabilizer"].passed


def test_verify_fan3_repeated_structure_only(runner):
    result = runner.invoke(main, ["verify-fan3", "--n", "5", "--alpha", "1,1,3", "--json"])
    assert result.exit_code == EXIT_OK
    data = json.loads(result.output)
    by_name = {c["name"]: c for c in data["checks"]}
    assert by_name["arrangement-stabilizer"]["witness"]["observed_order"] == 4
    assert "bordism-class" not in by_name
    assert any("skipped" in note for note in data["notes"])


def test_verify_fan3_malformed_alpha(runner):
    assert runner.invoke(main, ["verify-fan3", "--n", "5", "--alpha", "1,1"]).exit_code == EXIT_USAGE
    assert runner.invoke(main, ["verify-fan3", "--n", "5", "--alpha", "1,1,4"]).exit_code == EXIT_USAGE
    assert runner.invoke(main, ["verify-fan3", "--n", "5", "--alpha", "a,b,c"]).exit_code == EXIT_USAGE


def test_solve_command_converges(runner, tmp_path):
    files = [write_measure(tmp_path / f"mu{i}.json", seed=i) for i in range(3)]
    result = runner.invoke(
        main,
        [
            "solve",
            "--mu1", files[0],
            "--mu2", files[1],
            "--mu3", files[2],
            "--alpha", "0.4,0.6",
            "--seed", "0",
            "--budget", "30000",
            "--json",
        ],
    )
    assert result.exit_code == EXIT_OK, result.output
    data = json.loads(result.output)
    check = data["checks"][0]
    assert check["name"] == "converged" and check["passed"]
    assert max(check["witness"]["residuals"]) <= check["witness"]["tolerance"]
    solution = json.loads(data["notes"][0])
    assert len(solution["center"]) == 3
    assert len(solution["azimuths"]) == 2


def test_solve_alpha_validation(runner, tmp_path):
    files = [write_measure(tmp_path / f"m{i}.json", seed=10 + i) for i in range(3)]
    result = runner.invoke(
        main,
        ["solve", "--mu1", files[0], "--mu2", files[1], "--mu3", files[2],
         "--alpha", "0.5,0.6"],
    )
    assert result.exit_code == EXIT_USAGE


def test_solve_budget_exhaustion_exit_code(runner, tmp_path):
    files = [write_measure(tmp_path / f"b{i}.json", seed=20 + i) for i in range(3)]
    result = runner.invoke(
        main,
        ["solve", "--mu1", files[0], "--mu2", files[1], "--mu3", files[2],
         "--alpha", "0.4,0.6", "--budget", "600", "--tol", "1e-12"],
    )
    assert result.exit_code == EXIT_BUDGET


def test_explore_3fan_marked(runner, tmp_path):
    f1 = write_measure(tmp_path / "e1.json", seed=30)
    result = runner.invoke(
        main,
        ["explore-3fan", "--mu1", f1, "--mu2", f1,
         "--alpha", "0.33333333,0.33333333,0.33333334", "--budget", "20000",
         "--json"],
    )
    data = json.loads(result.output)
    assert any("exploratory" in note for note in data["notes"])


def test_verify_fan2_exit_reflects_checks(runner):
    result = runner.invoke(main, ["verify-fan2", "--n", "3", "--json"])
    data = json.loads(result.output)
    want = EXIT_OK if data["all_pass"] else EXIT_CHECK_FAILED
    assert result.exit_code == want
