"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""

from collections import defaultdict

import pytest

_PARTS: dict[int, list[tuple[str, bool | None, str]]] = defaultdict(list)
_WORD = {True: "ok", False: "FAILED", None: "skipped"}


class AcceptanceLog:
    def record(self, criterion: int, part: str, ok: bool | None, detail: str = "") -> bool:
        """ok=None marks a part that was not run; it does not decide the criterion."""
        ok = None if ok is None else bool(ok)
        _PARTS[criterion].append((part, ok, detail))
        return bool(ok)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def acceptance_lines() -> list[str]:
    lines = []
    for k in sorted(_PARTS):
        parts = _PARTS[k]
        status = "PASS" if all(ok is not False for _, ok, _ in parts) else "FAIL"
        body = "; ".join(f"{name} {_WORD[ok]}{f' ({d})' if d else ''}" for name, ok, d in parts)
        lines.append(f"criterion {k}: {status} | {body}")
    return lines


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_lines()
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
