"""Shared fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from deltaflow import FluidState, Grid

# acceptance tests register one line each; printed after the run so the
# criterion verdicts are visible in one block regardless of capture settings
_ACCEPTANCE_LINES: dict[str, str] = {}


def record_criterion(key: str, text: str) -> None:
    _ACCEPTANCE_LINES[key] = text


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    items = [(k, v) for k, v in sorted(_ACCEPTANCE_LINES.items())]
    failed = {rep.nodeid.split("::")[-1] for rep in
              terminalreporter.stats.get("failed", [])}
    if not items and not failed:
        return
    terminalreporter.section("acceptance criteria")
    seen = set()
    for key, text in items:
        terminalreporter.write_line(text)
        seen.add(key)
    for name in sorted(failed):
        if name.startswith("test_c") and name[6:8].isdigit() and name[6:8] not in seen:
            terminalreporter.write_line(f"criterion {int(name[6:8]):2d} FAIL ({name})")


def uniform_state(grid: Grid, rho: float = 1.0, u=0.0) -> FluidState:
    """Constant-density state with constant velocity per axis."""
    r = np.full(grid.shape, rho)
    if np.isscalar(u):
        u = (u,) * grid.dim
    mom = np.stack([r * u[ax] for ax in range(grid.dim)])
    return FluidState(r, mom)


@pytest.fixture
def grid1d():
    return Grid(n=(64,), h=0.1, boundary="zero_margin", margin=2)


@pytest.fixture
def grid2d():
    return Grid(n=(32, 32), h=0.1, boundary="zero_margin", margin=2)
