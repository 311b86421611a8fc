import json
import math
import subprocess
import sys

import jsonschema
import pytest

from pointspec.cli import main, parse_angle
from pointspec.serialize import (
    FLOW_COLUMNS,
    SCATTER_COLUMNS,
    SPECTRUM_COLUMNS,
    load_schema,
    read_csv,
    write_csv,
)

PI = math.pi

SPECTRUM = ["spectrum", "--theta-plus", "0", "--theta-minus", "pi", "--L", "1", "--levels", "4"]
CYCLE = ["cycle", "--L", "1", "--L0", "1", "--samples", "512", "--levels", "8"]
DUALITY = ["duality", "--theta-plus", "0.9", "--theta-minus", "2.3", "--levels", "10"]
FLOW = ["flow", "--samples", "33", "--levels", "4"]
SCATTER = ["scatter", "--theta-plus", "pi/3", "--theta-minus", "2", "--k-count", "7"]
ORACLE = ["oracle", "--theta-plus", "pi/2", "--theta-minus", "pi", "--levels", "3"]


def run_cli(capsys, args):
    status = main(args)
    out = capsys.readouterr()
    return status, out.out, out.err


@pytest.mark.parametrize("text, value", [
    ("pi", PI), ("pi/2", PI / 2), ("3pi/2", 1.5 * PI), ("-pi/4", -PI / 4),
    ("2*pi/3", 2 * PI / 3), ("0.25", 0.25), ("1e-3", 1e-3),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_spectrum_example(capsys):
    status, out, _ = run_cli(capsys, SPECTRUM)
    assert status == 0
    cols, rows, _ = read_csv(out)
    assert cols == SPECTRUM_COLUMNS
    assert [r[3] for r in rows] == pytest.approx([PI / 2, PI, 1.5 * PI, 2 * PI], abs=1e-12)
    assert [r[1] for r in rows] == ["E", "O", "E", "O"]


def test_cycle_example(capsys):
    status, out, _ = run_cli(capsys, CYCLE)
    assert status == 0
    assert out.rstrip("\n").splitlines()[-1] == "# shift_even=-1 shift_odd=-1"
    assert read_csv(out)[0] == FLOW_COLUMNS


def test_duality_example(capsys):
    status, out, _ = run_cli(capsys, DUALITY)
    assert status == 0
    _, rows, comments = read_csv(out)
    dev = [r[2] for r in rows if r[0] == "half_reflection_duality" and r[1] == "max_multiset_dev"]
    assert dev and dev[0] <= 1e-9
    assert comments[-1] == "passed=true"


def test_scatter_columns(capsys):
    status, out, _ = run_cli(capsys, SCATTER)
    cols, rows, _ = read_csv(out)
    assert status == 0 and cols == SCATTER_COLUMNS and len(rows) == 7
    assert max(r[5] for r in rows) <= 1e-12


@pytest.mark.parametrize("args", [SPECTRUM, CYCLE, DUALITY, FLOW, SCATTER, ORACLE])
def test_csv_round_trip_is_byte_identical(capsys, args):
    status, out, _ = run_cli(capsys, args)
    assert status == 0
    assert write_csv(*read_csv(out)) == out
    assert "\r" not in out


@pytest.mark.parametrize("args", [SPECTRUM, CYCLE, DUALITY, FLOW, SCATTER, ORACLE])
def test_json_matches_schema(capsys, args):
    status, out, _ = run_cli(capsys, args + ["--format", "json"])
    assert status == 0
    payload = json.loads(out)
    jsonschema.validate(payload, load_schema())
    assert payload["command"] == args[0]


def test_cycle_json_shift(capsys):
    _, out, _ = run_cli(capsys, CYCLE + ["--format", "json"])
    payload = json.loads(out)
    assert (payload["shift_even"], payload["shift_odd"]) == (-1, -1)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "spec.csv"
    assert main(SPECTRUM + ["-o", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert target.read_bytes().startswith(b"index,parity,branch,k_or_kappa,energy\n")


def test_characteristic_params_input(capsys):
    args = ["spectrum", "--xi", "0", "--alpha-r", "0", "--alpha-i", "0", "--beta-r", "1", "--beta-i", "0",
            "--levels", "3"]
    status, out, _ = run_cli(capsys, args)
    assert status == 0
    assert [r[1] for r in read_csv(out)[1]] == ["U", "U", "U"]


@pytest.mark.parametrize("args", [
    ["spectrum", "--theta-plus", "1"],                                       # incomplete torus
    ["spectrum", "--theta-plus", "1", "--theta-minus", "2", "--xi", "0"],   # conflicting inputs
    ["spectrum", "--theta-plus", "1", "--theta-minus", "2", "--L", "-1"],   # nonpositive L
    ["spectrum", "--theta-plus", "1", "--theta-minus", "2", "--L0", "0"],   # nonpositive L0
    ["spectrum", "--xi", "0", "--alpha-r", "1", "--alpha-i", "1", "--beta-r", "0", "--beta-i", "0"],
    ["spectrum", "--theta-plus", "one", "--theta-minus", "2"],
    ["bogus"],
])
def test_usage_errors_exit_1(capsys, args):
    try:
        status = main(args)
    except SystemExit as exc:
        status = exc.code
    assert status == 1
    assert "error" in capsys.readouterr().err


DEEP_ORACLE = ["oracle", "--theta-plus", "3.14", "--theta-minus", "pi", "--levels", "2"]


def test_numerical_failure_is_reported(capsys):
    # a deep bound level the oracle grid cannot resolve
    status, out, err = run_cli(capsys, DEEP_ORACLE)
    assert status == 2
    assert "GridTooCoarse" in err
    _, rows, comments = read_csv(out)
    assert rows[0][:2] == ["oracle", "error"] and comments == ["passed=false"]
    status, out, _ = run_cli(capsys, DEEP_ORACLE + ["--format", "json"])
    payload = json.loads(out)
    jsonschema.validate(payload, load_schema())
    assert status == 2 and payload["passed"] is False


def test_flow_is_the_fig3_sweep(capsys):
    _, out, _ = run_cli(capsys, FLOW)
    rows = read_csv(out)[1]
    assert (rows[0][1], rows[0][2]) == (0.0, pytest.approx(PI))
    assert rows[-1][0] == pytest.approx(PI)


def test_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pointspec.cli", *SPECTRUM], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(SPECTRUM_COLUMNS)
