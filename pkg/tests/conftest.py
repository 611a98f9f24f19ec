import pytest

from fields import GF8_CLASSIC, gf


@pytest.fixture
def gf8():
    return gf(2, 3, GF8_CLASSIC)


@pytest.fixture
def gf16():
    return gf(2, 4)


@pytest.fixture
def gf32():
    return gf(2, 5)


@pytest.fixture
def gf128():
    return gf(2, 7)


@pytest.fixture
def gf27():
    return gf(3, 3)


# -- acceptance summary ------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    n, title = marker.args
    ok = call.excinfo is None
    prev = _CRITERIA.get(n, (title, True, 0.0))
    _CRITERIA[n] = (title, prev[1] and ok, prev[2] + call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, secs = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f} s)")
