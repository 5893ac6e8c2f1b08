import numpy as np
import pytest

from turbfree.types import FrameStack

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion outcome for the terminal summary."""
    def record(number, name, passed, detail=""):
        _ACCEPTANCE.append((number, name, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'}  {number:>2}. {name}  {detail}")


def stack_of(values, bit_depth=8):
    """FrameStack from an ``(m, H, W[, C])`` nested list or array."""
    a = np.asarray(values)
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    return FrameStack.from_array(a.astype(dtype), bit_depth)


def series(values):
    """Single-pixel stack from a list of counts."""
    return stack_of(np.asarray(values).reshape(-1, 1, 1))
