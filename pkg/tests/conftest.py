from pathlib import Path

import pytest

from attrition.dataset import load_dataset

ROOT = Path(__file__).resolve().parents[1]
IBM_CSV = ROOT / "data" / "WA_Fn-UseC_-HR-Employee-Attrition.csv"
BENCH_CFG = ROOT / "configs" / "benchmark.cfg"


@pytest.fixture(scope="session")
def ibm():
    return load_dataset(IBM_CSV)


@pytest.fixture
def write_csv(tmp_path):
    def write(text, name="t.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


# One summary line per acceptance criterion, printed after the run.
_criteria: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        status = "PASS" if report.passed else "FAIL"
        _criteria.append((props["criterion"], status, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in sorted(_criteria):
        terminalreporter.write_line(f"{status} criterion {name}: {detail}")
