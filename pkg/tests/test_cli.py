"""命令行：输出格式、退出码、可复现性"""

import json

import pytest

from sigma_lab.main import (
    EXIT_CHECK_FAILED,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    build_parser,
    main,
    resolve_run_config,
)
from sigma_lab.config import AppConfig
from sigma_lab.models import OutputFormat


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def _value(cell):
    return complex(cell["re"], cell["im"])


# ============ 参数解析 ============

def test_table_defaults_to_csv():
    args = build_parser().parse_args(["table"])
    config = resolve_run_config(args, AppConfig())
    assert config.output_format is OutputFormat.CSV
    assert config.r_max == 12


def test_cli_overrides_config():
    args = build_parser().parse_args(["audit", "--max-shell", "9", "--rmax", "4", "--format", "text"])
    config = resolve_run_config(args, AppConfig())
    assert config.max_shell == 9
    assert config.r_max == 4
    assert config.output_format is OutputFormat.TEXT
    assert config.resolve_lattice() is None


def test_lattice_and_preset_are_exclusive(fresh_config, capsys):
    code, _ = _run(capsys, "invariants", "--preset", "square", "--lattice", "1", "0", "0", "1")
    assert code == EXIT_USAGE


def test_unknown_command(fresh_config, capsys):
    code, _ = _run(capsys, "frobnicate")
    assert code == EXIT_USAGE


# ============ table ============

def test_table_rows(fresh_config, capsys):
    code, out = _run(capsys, "table", "--rmax", "3")
    assert code == EXIT_OK
    assert out.out == (
        "m,n,numerator,denominator\r\n"
        "0,0,1,1\r\n"
        "1,0,-1,1\r\n"
        "0,1,-3,1\r\n"
    )


def test_table_json(fresh_config, capsys):
    code, out = _run(capsys, "table", "--rmax", "6", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out.out)
    assert payload["command"] == "table"
    entries = {(row["m"], row["n"]): (row["numerator"], row["denominator"]) for row in payload["results"]}
    assert entries[(2, 0)] == (-9, 1)
    assert entries[(1, 1)] == (-18, 1)
    assert entries[(3, 0)] == (69, 1)
    assert entries[(0, 2)] == (-54, 1)


# ============ invariants ============

def test_invariants_requires_lattice(fresh_config, capsys):
    code, _ = _run(capsys, "invariants")
    assert code == EXIT_USAGE


def test_invariants_square(fresh_config, capsys):
    code, out = _run(capsys, "invariants", "--lattice", "1", "0", "0", "1")
    assert code == EXIT_OK
    payload = json.loads(out.out)
    assert payload["schema_version"] == "1.0"
    (record,) = payload["results"]
    assert record["lattice"] == "custom"
    assert abs(_value(record["mu"])) < 1e-10
    assert _value(record["eta1"]) == pytest.approx(3.141592653589793, rel=1e-10)
    assert _value(record["g2"]).real == pytest.approx(189.07272, rel=1e-6)
    assert abs(_value(record["g3"])) < 1e-8


def test_invariants_hexagonal(fresh_config, capsys):
    code, out = _run(capsys, "invariants", "--preset", "hexagonal")
    assert code == EXIT_OK
    (record,) = json.loads(out.out)["results"]
    assert abs(_value(record["g2"])) < 1e-8
    assert abs(_value(record["g3"])) > 1.0


def test_degenerate_lattice(fresh_config, capsys):
    code, _ = _run(capsys, "invariants", "--lattice", "1", "0", "2", "0")
    assert code == EXIT_USAGE


def test_out_of_range_shell(fresh_config, capsys):
    code, _ = _run(capsys, "invariants", "--preset", "square", "--max-shell", "0")
    assert code == EXIT_USAGE


def test_bad_config_file(fresh_config, capsys):
    bad = fresh_config / "bad.yaml"
    bad.write_text("quadrature:\n  order: 1\n", encoding="utf-8")
    code, _ = _run(capsys, "table", "--config", str(bad))
    assert code == EXIT_USAGE


# ============ coeffs ============

def test_coeffs_rows(fresh_config, capsys):
    code, out = _run(capsys, "coeffs", "--preset", "generic", "--rmax", "4")
    assert code == EXIT_OK
    rows = json.loads(out.out)["results"]
    assert [row["r"] for row in rows] == [0, 1, 2, 3, 4]
    for row in rows:
        assert row["dev_series_recursion"] < 1e-6
        assert row["dev_integral_recursion"] < 1e-4


def test_coeffs_text(fresh_config, capsys):
    code, out = _run(capsys, "coeffs", "--preset", "square", "--rmax", "2", "--format", "text")
    assert code == EXIT_OK
    header = out.out.splitlines()[0]
    assert "W_recursion_re" in header
    assert "dev_series_integral" in header


# ============ audit ============

def test_audit_square_csv(fresh_config, capsys):
    code, out = _run(capsys, "audit", "--preset", "square", "--rmax", "4", "--format", "csv")
    assert code == EXIT_OK
    lines = out.out.split("\r\n")
    assert lines[0].startswith("identity_id,lattice_label,")
    assert "verdict" in lines[0]
    assert any(line.startswith("Highly1.oracle,square,") for line in lines)


def test_audit_under_resolved_fails(fresh_config, capsys):
    code, _ = _run(capsys, "audit", "--preset", "square", "--rmax", "3", "--max-shell", "2")
    assert code == EXIT_CHECK_FAILED


def test_audit_output_file(fresh_config, capsys):
    target = fresh_config / "audit.json"
    code, out = _run(capsys, "audit", "--preset", "square", "--rmax", "3", "--out", str(target))
    assert code == EXIT_OK
    assert out.out == ""
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["command"] == "audit"
    assert "output_path" not in payload["config"]


def test_output_into_missing_directory(fresh_config, capsys):
    target = fresh_config / "no_such_dir" / "out.csv"
    code, _ = _run(capsys, "table", "--rmax", "3", "--out", str(target))
    assert code == EXIT_IO


def test_repeated_runs_are_byte_identical(fresh_config, capsys):
    _, first = _run(capsys, "invariants", "--preset", "generic")
    _, second = _run(capsys, "invariants", "--preset", "generic")
    assert first.out == second.out
