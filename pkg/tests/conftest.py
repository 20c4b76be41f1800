import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from netpredict.config import load_config  # noqa: E402
from netpredict.pipeline import run_report  # noqa: E402
from netpredict.synth import SynthSpec, generate, write_dataset  # noqa: E402

SMALL_SPEC = SynthSpec(n_tickers=20, n_minutes=1800, n_regimes=2, seed=3)
GOLDEN_DIR = Path(__file__).parent / "golden" / "small"
OUTPUT_FILES = ("metrics.csv", "changes.csv", "manifest.json", "table1.csv", "table1.json",
                "table2.csv", "table3.csv", "predictions.csv")

_acceptance: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or report.when not in ("setup", "call"):
        return
    number, title = mark.args
    entry = _acceptance.setdefault(number, {"title": title, "ok": True, "ran": False})
    if report.failed:
        entry["ok"] = False
    if report.when == "call":
        entry["ran"] = True


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        e = _acceptance[number]
        status = "PASS" if e["ok"] and e["ran"] else ("FAIL" if not e["ok"] else "NOT RUN")
        terminalreporter.write_line(f"[{status}] {number:2d}. {e['title']}")


def report(data, out):
    cfg = load_config(overrides={"data": str(data), "output": str(out)})
    run_report(cfg)
    return out


@pytest.fixture(scope="session")
def small_data(tmp_path_factory):
    out = tmp_path_factory.mktemp("small_data")
    write_dataset(generate(SMALL_SPEC), out, SMALL_SPEC)
    return out


@pytest.fixture(scope="session")
def small_report(small_data, tmp_path_factory):
    return report(small_data, tmp_path_factory.mktemp("small_out"))
