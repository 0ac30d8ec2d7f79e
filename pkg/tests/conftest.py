"""Shared pytest wiring: the acceptance summary lines."""

import time

import pytest

_LINES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.start = time.perf_counter()
        self.notes: list[str] = []

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def note(self, text: str) -> None:
        self.notes.append(text)

    def check_runtime(self) -> None:
        assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


@pytest.fixture
def criterion(request):
    mark = request.node.get_closest_marker("criterion")
    c = Criterion(*mark.args, **mark.kwargs)
    yield c
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    extra = f"; {'; '.join(c.notes)}" if c.notes else ""
    line = (f"{status} criterion {c.number}: {c.title} "
            f"({c.elapsed:.2f}s, limit {c.limit}s{extra})")
    print("\n" + line)
    _LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
