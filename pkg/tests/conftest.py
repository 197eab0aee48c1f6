import math

import pytest

from optomech.params import preset_p0

_RESULTS: dict[str, list[tuple[bool, str]]] = {}


def record(label: str, ok: bool, detail: str = "") -> bool:
    """Store one acceptance sub-result; printed in the terminal summary."""
    _RESULTS.setdefault(label, []).append((bool(ok), detail))
    return ok


@pytest.fixture
def report():
    return record


@pytest.fixture(scope="session")
def p0():
    return preset_p0()


@pytest.fixture(scope="session")
def omega(p0):
    return p0.mech.damped_frequency


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance")
    for label in sorted(_RESULTS, key=lambda s: int(s.split()[0])):
        parts = _RESULTS[label]
        ok = all(p[0] for p in parts)
        detail = "; ".join(p[1] for p in parts if p[1])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}")


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


__all__ = ["close", "math", "record"]
