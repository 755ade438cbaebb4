import pytest

from fareyspin.spinchain import phi_table

_criteria = {}
_notes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, text = mark.args
    if rep.failed:
        _criteria[num] = (text, "FAIL")
    elif _criteria.get(num, (None, ""))[1] != "FAIL":
        if rep.skipped:
            _criteria[num] = (text, "SKIP")
        elif rep.when == "call":
            _criteria[num] = (text, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        text, status = _criteria[num]
        note = _notes.get(num)
        terminalreporter.write_line(f"{status} criterion {num}: {text}" + (f" [{note}]" if note else ""))


@pytest.fixture(scope="session")
def phi_10k():
    return phi_table(10_000)


@pytest.fixture
def note(request):
    """Attach observed values to the criterion line in the summary."""
    num = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _notes.__setitem__(num, text)
