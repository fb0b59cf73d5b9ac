import numpy as np
import pytest

from regchristoffel.oracle import ORACLE_SEED

_RESULTS: list[tuple[str, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test checks")


@pytest.fixture
def rng():
    return np.random.default_rng(ORACLE_SEED)


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the acceptance summary."""

    def _note(text):
        request.node.user_properties.append(("detail", str(text)))

    return _note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    _RESULTS.append((mark.args[0], "PASS" if rep.passed else "FAIL", item.name, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, name, detail in sorted(_RESULTS, key=lambda r: (int(r[0].rstrip("abcdef")), r[0])):
        line = f"[{status}] criterion {label:<4} {name}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
