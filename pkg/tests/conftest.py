import numpy as np
import pytest

from qcenv.grid import GridFn

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def random_grid(rng, shape, lo=-1.0, hi=1.0, spacing=None):
    shape = tuple(shape)
    spacing = spacing or (1.0,) * len(shape)
    vals = rng.uniform(lo, hi, size=int(np.prod(shape)))
    return GridFn(shape, (0.0,) * len(shape), spacing, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
