import pytest

from uavrecover.model import LinkParams, NetworkState, Point, UavNode


@pytest.fixture
def params():
    return LinkParams.from_range(50.0)


def make_state(*coords):
    """NetworkState with ids 0..k-1 at the given (x, y) pairs."""
    return NetworkState([UavNode(i, Point(float(x), float(y))) for i, (x, y) in enumerate(coords)])


CRITERIA: dict[str, tuple[bool, str]] = {}


def record_criterion(key: str, ok: bool, detail: str):
    CRITERIA[key] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: int(k[1:].split()[0])):
        ok, detail = CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
