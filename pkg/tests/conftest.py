import collections

import pytest

from genelab.core import RandomSource


class ScriptedRandom(RandomSource):
    """RandomSource whose draws come from per-method queues.

    Any draw that was not scripted fails the test, so an example also
    checks which draws an operator makes and in what order.
    """

    def __init__(self, **queues):
        super().__init__(0)
        self.queues = {k: collections.deque(v) for k, v in queues.items()}

    def _next(self, kind):
        q = self.queues.get(kind)
        if not q:
            raise AssertionError(f"unscripted {kind} draw")
        return q.popleft()

    def random(self):
        return self._next("random")

    def normal(self):
        return self._next("normal")

    def uniform(self, a, b):
        return self._next("uniform")

    def integer(self, a, b):
        v = self._next("integer")
        assert a <= v <= b, f"scripted integer {v} outside [{a}, {b}]"
        return v

    def bernoulli(self, p):
        return self._next("bernoulli")

    def boolean(self):
        return self._next("boolean")

    def exhausted(self):
        return all(not q for q in self.queues.values())


@pytest.fixture
def scripted():
    return ScriptedRandom


# One PASS/FAIL line per acceptance criterion, printed after the run.
_CRITERIA: dict = {}
CRITERION_NOTES: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    n = marker.args[0]
    _CRITERIA.setdefault(n, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status = "PASS" if all(_CRITERIA[n]) else "FAIL"
        notes = "; ".join(CRITERION_NOTES.get(n, []))
        terminalreporter.write_line(f"criterion {n}: {status}" + (f"  ({notes})" if notes else ""))


@pytest.fixture
def note(request):
    """Attach a short measurement to the summary line of this test's criterion."""
    n = request.node.get_closest_marker("criterion").args[0]
    return lambda text: CRITERION_NOTES.setdefault(n, []).append(text)
