import time

import pytest

from vertexq.cli import PRESETS, parse_config
from vertexq.suite import CHECKS, Context, run_checks

ACCEPTANCE_LINES: list[str] = []


class PresetRun:
    """All check groups of one preset, run once per session, with wall time per group."""

    def __init__(self, name: str):
        self.cfg = parse_config(PRESETS[name])
        t0 = time.perf_counter()
        self.ctx = Context(self.cfg.params, self.cfg.method, self.cfg.u_grid)
        self.ctx.prepare(CHECKS)
        self.setup_seconds = time.perf_counter() - t0
        self.reports = {}
        self.seconds = {}
        for group in CHECKS:
            t0 = time.perf_counter()
            self.reports[group] = run_checks(self.ctx, (group,))
            self.seconds[group] = time.perf_counter() - t0

    def group(self, *names):
        return [r for n in names for r in self.reports[n]]

    def by_id(self, id_):
        for reps in self.reports.values():
            for r in reps:
                if r.id == id_:
                    return r
        raise KeyError(id_)


_RUNS: dict[str, PresetRun] = {}


def preset_run(name: str) -> PresetRun:
    if name not in _RUNS:
        _RUNS[name] = PresetRun(name)
    return _RUNS[name]


@pytest.fixture(scope="session")
def runs():
    return preset_run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
