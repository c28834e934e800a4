import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughsio.cli import COMMANDS, build_config, parse_and_dispatch, UsageError
from roughsio.report import config_hash, dumps, emit_report, rows_to_csv, to_jsonable


def run(argv):
    buf = io.StringIO()
    code = parse_and_dispatch(argv, stdout=buf)
    return code, buf.getvalue()


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip_exactly(x):
    assert json.loads(dumps({"x": x}))["x"] == x


def test_special_values():
    d = to_jsonable({"a": math.inf, "b": -math.inf, "c": math.nan, "z": 1 + 2j, "f": Fraction(4, 3),
                     "arr": np.array([1.5, 2.0]), "i": np.int64(3)})
    assert d == {"a": "inf", "b": "-inf", "c": "nan", "z": {"re": 1.0, "im": 2.0}, "f": "4/3",
                 "arr": [1.5, 2.0], "i": 3}
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_dumps_sorted_and_deterministic():
    a = dumps({"b": 1, "a": [0.1, 0.2]})
    assert a == dumps({"a": [0.1, 0.2], "b": 1})
    assert a.index('"a"') < a.index('"b"')
    assert config_hash({"x": 1, "y": 2}) == config_hash({"y": 2, "x": 1})


def test_csv_sorted():
    text = rows_to_csv([{"j": 2, "v": 0.5}, {"j": -1, "v": 0.25}])
    assert text.splitlines() == ["j,v", "-1,0.25", "2,0.5"]
    assert rows_to_csv([]) == ""


def test_emit_to_file(tmp_path):
    p = tmp_path / "r.json"
    text = emit_report({"k": 1}, "json", p)
    assert p.read_text() == text
    with pytest.raises(ValueError):
        emit_report({}, "xml")


def test_all_commands_registered():
    assert len(COMMANDS) == 16


@pytest.mark.parametrize(
    "argv,code",
    [
        (["ranges", "--alpha", "2"], 0),
        (["bootstrap", "--alpha", "1"], 0),
        (["rademacher", "--seed", "4"], 0),
        (["counterexample", "params"], 0),
        (["h1-example", "--M", "2000"], 0),
        (["counterexample", "params", "--n", "1000"], 2),
        (["counterexample"], 2),
        (["ranges", "extra"], 2),
        (["nope"], 2),
        (["ranges", "--tol", "-1"], 2),
        (["apply", "--grid-n", "48"], 2),
        (["ranges", "--alpha", "-1"], 2),
    ],
)
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_report_envelope_and_determinism():
    code, text = run(["ranges", "--alpha", "2"])
    rep = json.loads(text)
    assert rep["result"]["theorem1"]["exact_lower"] == "4/3"
    assert rep["result"]["theorem2"]["upper"] == pytest.approx(8 / 3)
    assert {"config_hash", "versions", "seed", "tol", "checks"} <= set(rep)
    assert run(["ranges", "--alpha", "2"])[1] == text


def test_failed_check_exits_one():
    # too few iterations to approach the limit
    assert run(["bootstrap", "--alpha", "2", "--iterations", "2"])[0] == 1


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 3.0, "seed": 9}))
    c = build_config(["ranges", "--config", str(cfg), "--alpha", "2"])
    assert c.alpha == 2.0 and c.seed == 9
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(UsageError):
        build_config(["ranges", "--config", str(cfg)])


def test_csv_output_and_out_dir(tmp_path):
    code, _ = run(["tj-norms", "--j-min", "0", "--j-max", "1", "--format", "csv", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "tj-norms.csv").read_text().splitlines()
    assert lines[0] == "j,norm,scaled_neg,scaled_pos" and len(lines) == 3


def test_inline_kernel_json():
    k = json.dumps({"type": "fourier", "coefficients": [[1, 0.5, 0.0], [-1, 0.5, 0.0]]})
    code, text = run(["apply", "--kernel", k, "--grid-n", "32"])
    assert code == 0
    assert json.loads(text)["result"]["output"]["meta"]["inner"] == 0.5


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "roughsio.cli", "ranges", "--alpha", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["theorem2"]["empty"] is True
