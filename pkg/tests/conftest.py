"""Shared fixtures plus the acceptance-summary hook.

test_acceptance.py registers one record per numbered criterion through the
``criterion`` context manager; pytest_terminal_summary then prints a single
pass/fail line for each so the final report is readable at a glance.
"""
from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass, field

import pytest

from lpequiv import builtin_problem

ACCEPTANCE: dict[int, "CriterionRecord"] = {}


@dataclass
class CriterionRecord:
    number: int
    title: str
    checks: list[tuple[bool, str]] = field(default_factory=list)
    elapsed: float = 0.0

    def expect(self, ok: bool, label: str) -> None:
        self.checks.append((bool(ok), label))

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(flag for flag, _ in self.checks)

    def failures(self) -> str:
        bad = [label for flag, label in self.checks if not flag]
        return "; ".join(bad) if bad else "no checks ran"


@contextlib.contextmanager
def criterion(number: int, title: str):
    rec = CriterionRecord(number, title)
    start = time.perf_counter()
    try:
        yield rec
    except BaseException as exc:  # noqa: BLE001 - recorded, then re-raised
        rec.checks.append((False, f"aborted: {exc!r:.200}"))
        raise
    finally:
        rec.elapsed = time.perf_counter() - start
        ACCEPTANCE[number] = rec


@pytest.fixture(scope="session")
def ex1():
    return builtin_problem(1)


@pytest.fixture(scope="session")
def ex2():
    return builtin_problem(2)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        rec = ACCEPTANCE[number]
        if rec.ok:
            tr.write_line(
                f"criterion {number:2d} PASS  {rec.title} "
                f"({len(rec.checks)} checks, {rec.elapsed:.2f}s)",
                green=True,
            )
        else:
            tr.write_line(
                f"criterion {number:2d} FAIL  {rec.title} "
                f"({rec.elapsed:.2f}s): {rec.failures()}",
                red=True,
            )
    missing = sorted(set(range(1, 12)) - set(ACCEPTANCE))
    if missing:
        tr.write_line(
            "criteria not executed: " + ", ".join(map(str, missing)), yellow=True
        )
