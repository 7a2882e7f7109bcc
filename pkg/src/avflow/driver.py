"""Continuation-run driver shared by the CLI and by validation code.

Advances the active-vector solver across charts (resetting whenever the
grad-delta norm crosses the threshold), advects the circulation marker loops
through the same RK4 stages, optionally runs the classical oracle in lockstep,
and emits one DiagnosticsRecord per cadence interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import DiagnosticsRecorder
from .evolve import ChartState, RunConfig, reset_chart, step_self_consistent
from .fields import MarkerLoop
from .oracle import OracleState, compare, oracle_step
from .spectral import Grid

__all__ = ["RunResult", "continuation_run"]


@dataclass
class RunResult:
    state: ChartState
    records: list
    extras: list
    oracle: OracleState | None = None
    resets: list = field(default_factory=list)  # times at which charts were reset


def continuation_run(phi: np.ndarray, grid: Grid, config: RunConfig, *,
                     cadence: int = 1, with_oracle: bool = False,
                     recorder: DiagnosticsRecorder | None = None,
                     sample_callback=None, reset_callback=None,
                     step_callback=None) -> RunResult:
    state = ChartState.initial(phi, grid, config)
    oracle = OracleState.initial(phi, grid) if with_oracle else None
    if recorder is None:
        recorder = DiagnosticsRecorder(grid, interp_kw=config.interp_kw())
    sizes = [len(lp.points) for lp in recorder.loops]
    markers = np.concatenate([lp.points for lp in recorder.loops])
    result = RunResult(state=state, records=[], extras=[], oracle=oracle)

    def sample():
        at = 0
        loops = []
        for m in sizes:
            loops.append(MarkerLoop(markers[at:at + m]))
            at += m
        recorder.loops = loops
        rec = recorder.sample(state)
        extra = {}
        if oracle is not None:
            extra["oracle_l2_diff"] = compare(state, oracle)
        result.records.append(rec)
        result.extras.append(extra)
        if sample_callback is not None:
            sample_callback(rec, extra, state)

    sample()
    nstep = 0
    while state.t < config.t_end - 1e-12:
        if state.holder_grad_delta.total >= config.epsilon_reset:
            result.resets.append(state.t)
            state = reset_chart(state, config)
            if reset_callback is not None:
                reset_callback(state)
        umax = float(np.max(np.sqrt(np.sum(state.u**2, axis=0))))
        dt = min(config.dt_max, config.t_end - state.t)
        if umax > 0:
            dt = min(dt, config.cfl * grid.spacing / umax)
        state, markers = step_self_consistent(state, dt, config, markers=markers)
        if oracle is not None:
            oracle = oracle_step(oracle, dt)
        nstep += 1
        if step_callback is not None:
            step_callback(state, nstep)
        if nstep % cadence == 0 or state.t >= config.t_end - 1e-12:
            result.state = state
            result.oracle = oracle
            sample()
    result.state = state
    result.oracle = oracle
    return result
