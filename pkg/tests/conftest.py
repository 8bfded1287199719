from pathlib import Path

import pytest

from omega_triangle import build_triangle, import_triangle

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, tuple[str, str]] = {}
_notes: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion checked by the test"
    )


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        previous = _criteria.get(number, (title, "PASS"))[1]
        verdict = "PASS" if report.outcome == "passed" and previous == "PASS" else "FAIL"
        _criteria[number] = (title, verdict)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d} {verdict}: {title}")
        for note in _notes.get(number, []):
            terminalreporter.write_line(f"              {note}")


@pytest.fixture
def criterion_note(request):
    """Attach a line of detail to the acceptance summary for this criterion."""
    number = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _notes.setdefault(number, []).append(text)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("OMEGA_TRIANGLE_CACHE", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def golden():
    """Published triangle to 2^23, transcribed to TSV."""
    return import_triangle((FIXTURES / "golden_triangle.tsv").read_text(), "tsv")


@pytest.fixture(scope="session")
def golden_text():
    return (FIXTURES / "golden_triangle.tsv").read_text()


@pytest.fixture(scope="session")
def golden_logs():
    """Rows of (column, n, ln text, diff text) exactly as printed in the published log table."""
    lines = (FIXTURES / "golden_log_counts.tsv").read_text().splitlines()[1:]
    rows = []
    for line in lines:
        column, n, ln, diff = line.split("\t")
        rows.append((int(column), int(n), ln, diff))
    return rows


@pytest.fixture(scope="session")
def triangle23():
    return build_triangle(23)
