"""Shared test plumbing: the acceptance-criteria reporter."""

import pytest

ACCEPTANCE_RESULTS = []


def _sort_key(number):
    text = str(number)
    digits = "".join(ch for ch in text if ch.isdigit())
    return (int(digits) if digits else 0, text)


def record_acceptance(number, name, passed, detail="", seconds=None):
    status = "PASS" if passed else "FAIL"
    timing = f" [{seconds:.1f}s]" if seconds is not None else ""
    line = f"ACCEPTANCE {number}: {status} - {name}{timing} {detail}".rstrip()
    ACCEPTANCE_RESULTS.append((_sort_key(number), line))
    print("\n" + line)
    return line


@pytest.fixture(scope="session")
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)
