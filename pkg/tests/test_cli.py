import json
import subprocess
import sys

import pytest

from netpredict import cli
from netpredict.errors import ConfigError, DataError, NumericError, StageError


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["metrics", "--bogus"])
    assert exc.value.code == 1


def test_unknown_config_key_exit_1(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"bins": 3}))
    assert cli.main(["metrics", "-c", str(tmp_path / "c.json")]) == 1


def test_empty_data_dir_exit_2_and_nothing_written(tmp_path, capsys):
    (tmp_path / "data").mkdir()
    out = tmp_path / "out"
    assert cli.main(["report", "--data", str(tmp_path / "data"), "--output", str(out), "--index-name", "SPX"]) == 2
    assert not out.exists()
    assert "not found" in capsys.readouterr().err


def test_missing_metric_table_for_single_stage(tmp_path):
    assert cli.main(["regress", "--data", str(tmp_path / "nope"), "--output", str(tmp_path / "o")]) == 2


@pytest.mark.parametrize("exc,code", [
    (ConfigError("x"), 1),
    (DataError("x"), 2),
    (NumericError("x"), 3),
    (StageError("arima", None, NumericError("x")), 3),
    (StageError("load", None, DataError("x")), 2),
    (StageError("mutual_info", 4, ValueError("x")), 3),
])
def test_exit_code_mapping(exc, code):
    assert cli._exit_code(exc) == code


def test_stage_error_message():
    assert str(StageError("mutual_info", 4, ValueError("boom"))) == "stage 'mutual_info', window 4: boom"


def test_synth_then_report_via_console_script(tmp_path):
    data, out = tmp_path / "d", tmp_path / "o"
    run = lambda *a: subprocess.run([sys.executable, "-m", "netpredict.cli", *a], capture_output=True, text=True)
    r = run("synth", str(data), "--tickers", "6", "--minutes", "1500", "--regimes", "1", "--seed", "1")
    assert r.returncode == 0, r.stderr
    r = run("report", "--data", str(data), "--output", str(out))
    assert r.returncode == 0, r.stderr
    assert (out / "table3.csv").exists()
