import pytest

from sumset_lab import kernels

_criteria = {}


@pytest.fixture(params=kernels.available_backends(), ids=lambda m: m.BACKEND)
def backend(request):
    """Each available kernel module in turn."""
    return request.param


@pytest.fixture
def criterion(request):
    """Collects the measured detail printed in the acceptance summary."""
    notes = []
    _criteria.setdefault(request.node.nodeid, {"notes": notes})
    return notes.append


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid in _criteria:
        _criteria[report.nodeid]["outcome"] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, row in _criteria.items():
        name = nodeid.split("::")[-1]
        detail = "; ".join(row["notes"])
        terminalreporter.write_line(f"{row.get('outcome', 'ERROR'):4} {name}  {detail}")
