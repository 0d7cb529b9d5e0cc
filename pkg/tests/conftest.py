from __future__ import annotations

from collections import OrderedDict

import pytest

from qcover.gfq import field_of_order

_CRITERIA: "OrderedDict[str, list[tuple[str, str, str]]]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, part): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, part = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if rep.passed:
            status = "PASS"
        elif hasattr(rep, "wasxfail"):
            status = "FAIL"
        elif rep.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        note = getattr(rep, "wasxfail", "") or ""
        if rep.skipped and not note and isinstance(rep.longrepr, tuple):
            note = rep.longrepr[2]
        _CRITERIA.setdefault(str(number), []).append((part, status, note))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA, key=int):
        parts = _CRITERIA[number]
        statuses = {s for _, s, _ in parts}
        overall = "FAIL" if "FAIL" in statuses else ("SKIP" if statuses == {"SKIP"} else "PASS")
        detail = "; ".join(f"{p}={s}" for p, s, _ in parts)
        tr.write_line(f"criterion {number:>2}: {overall}  [{detail}]")
        for p, s, note in parts:
            if s != "PASS" and note:
                tr.write_line(f"    {p}: {note}")


@pytest.fixture(scope="session")
def F2():
    return field_of_order(2)


@pytest.fixture(scope="session")
def F3():
    return field_of_order(3)


@pytest.fixture(scope="session")
def design632_q2(F2):
    from qcover.quadrics import build_design_632

    return build_design_632(F2)


@pytest.fixture(scope="session")
def design842_q2(F2):
    from qcover.designs import build_842

    return build_842(F2)


@pytest.fixture(scope="session")
def parallelism_q2(F2):
    from qcover.spreads import find_parallelism

    return find_parallelism(F2)


@pytest.fixture(scope="session")
def design843_q2(F2, parallelism_q2):
    from qcover.designs import build_843

    return build_843(F2, (parallelism_q2, parallelism_q2))
