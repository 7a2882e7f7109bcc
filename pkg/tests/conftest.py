"""Session fixtures: the expensive benchmark trajectories shared between the
acceptance criteria, plus the acceptance summary printed at the end."""

from dataclasses import dataclass, field

import numpy as np
import pytest

from avflow.diagnostics import DiagnosticsRecorder
from avflow.driver import RunResult, continuation_run
from avflow.evolve import RunConfig
from avflow.scenarios import Scenario, generate_ic
from avflow.spectral import Grid


@dataclass
class Trajectory:
    """A finished continuation run plus per-sample drift bookkeeping."""

    grid: Grid
    config: RunConfig
    result: RunResult
    u_drift: list = field(default_factory=list)     # sup|u(t) - u(0)| per sample
    sup_delta: list = field(default_factory=list)   # sup|delta(t)| per sample

    @property
    def records(self):
        return self.result.records

    @property
    def max_u_drift(self) -> float:
        return max(self.u_drift)

    @property
    def max_sup_delta(self) -> float:
        return max(self.sup_delta)


def run_trajectory(scenario: Scenario, grid: Grid, config: RunConfig, *,
                   cadence: int = 10, with_oracle: bool = False) -> Trajectory:
    phi = generate_ic(scenario, grid)
    holder = {}
    traj = Trajectory(grid=grid, config=config, result=None)

    def on_sample(rec, extra, state):
        if "u0" not in holder:
            holder["u0"] = state.u.copy()
        traj.u_drift.append(float(np.max(np.abs(state.u - holder["u0"]))))
        traj.sup_delta.append(float(np.max(np.abs(state.delta))))

    # a cheaper interpolant for diagnostics than for the dynamics: the
    # recorder tolerances are ~1e-3 while stepping targets round-off
    recorder = DiagnosticsRecorder(
        grid, interp_kw=dict(scheme="spline", factor=2, order=5))
    traj.result = continuation_run(phi, grid, config, cadence=cadence,
                                   with_oracle=with_oracle, recorder=recorder,
                                   sample_callback=on_sample)
    return traj


@pytest.fixture(scope="session")
def abc_traj():
    """ABC flow, N=32, dt=1e-3, t in [0, 0.5], resetting at eps=0.25."""
    grid = Grid(32)
    cfg = RunConfig(t_end=0.5, dt_max=1e-3, cfl=0.9, epsilon_reset=0.25)
    return run_trajectory(Scenario("abc"), grid, cfg, cadence=10)


@pytest.fixture(scope="session")
def tg_traj():
    """2D Taylor-Green embedded in 3D, same protocol as abc_traj."""
    grid = Grid(32)
    cfg = RunConfig(t_end=0.5, dt_max=1e-3, cfl=0.9, epsilon_reset=0.25)
    return run_trajectory(Scenario("taylor_green_2d"), grid, cfg, cadence=10)


@pytest.fixture(scope="session")
def equiv_trajs():
    """Random band-limited 2D-embedded data, N=64, t=0.5, against the oracle,
    at two time steps (for the dt-halving check)."""
    grid = Grid(64)
    scenario = Scenario("random_bandlimited",
                        {"seed": 7, "k_cut": 6, "two_d": True,
                         "max_velocity": 1.0})
    out = {}
    for dt, cadence in ((0.02, 5), (0.01, 10)):
        cfg = RunConfig(t_end=0.5, dt_max=dt, cfl=1.0, epsilon_reset=0.25,
                        interp_factor=2)
        out[dt] = run_trajectory(scenario, grid, cfg, cadence=cadence,
                                 with_oracle=True)
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
