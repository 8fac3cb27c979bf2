"""Shared fixtures and the per-criterion acceptance summary."""

from collections import defaultdict

import pytest

_RESULTS = defaultdict(list)

TITLES = {
    1: "ballistic exit",
    2: "support and symmetry",
    3: "dense-matrix oracle",
    4: "square transition point",
    5: "honeycomb transition point",
    6: "nanotube radial independence",
    7: "theta robustness",
    8: "analytic agreement",
    9: "continuum self-consistency",
    10: "reproducibility across --jobs",
}


class Recorder:
    """Collects sub-checks; a criterion passes only if all of them do."""

    def check(self, criterion, ok, detail):
        _RESULTS[criterion].append((bool(ok), detail))
        assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture
def acceptance():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(TITLES):
        checks = _RESULTS.get(k)
        if not checks:
            tr.write_line(f"criterion {k:2d} NOT RUN  {TITLES[k]}")
            continue
        ok = all(c for c, _ in checks)
        tr.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}     {TITLES[k]}")
        for c, detail in checks:
            tr.write_line(f"    [{'ok' if c else 'x '}] {detail}")
