import pytest

CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.fixture
def note(request):
    """Attach a short measurement line to the acceptance summary."""
    return lambda text: request.node.user_properties.append(("note", text))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    number, title = mark.args
    ok, notes = CRITERIA.get(number, (True, []))
    notes += [v for k, v in item.user_properties if k == "note" and v not in notes]
    CRITERIA[number] = (ok and rep.passed, notes)
    item.config._criterion_titles = {**getattr(item.config, "_criterion_titles", {}), number: title}


def pytest_terminal_summary(terminalreporter, config):
    if not CRITERIA:
        return
    titles = getattr(config, "_criterion_titles", {})
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, notes = CRITERIA[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {titles[number]}"
        if notes:
            line += "  [" + "; ".join(notes) + "]"
        terminalreporter.write_line(line)
