"""Classical velocity-form pseudo-spectral Euler solver (cross-validation oracle).

Rotational form: du/dt = P(u x omega), RK4 in time, two-thirds dealiased. The
Bernoulli pressure is absorbed by the projection, so no Poisson solve is
needed. Kept deliberately independent of the active-vector machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CflViolation, GridMismatch, NonFinite
from .eos import velocity_w
from .spectral import Grid, curl, dealias, fft, ifft, leray_project

__all__ = ["OracleState", "oracle_rhs", "oracle_step", "oracle_run", "compare"]


@dataclass
class OracleState:
    grid: Grid
    u: np.ndarray
    t: float = 0.0

    @classmethod
    def initial(cls, u: np.ndarray, grid: Grid) -> "OracleState":
        uh = leray_project(dealias(fft(u), grid), grid)
        return cls(grid=grid, u=ifft(uh, grid), t=0.0)


def oracle_rhs(u: np.ndarray, grid: Grid) -> np.ndarray:
    uh = fft(u)
    omega = ifft(curl(uh, grid), grid)
    lamb = np.stack([
        u[1] * omega[2] - u[2] * omega[1],
        u[2] * omega[0] - u[0] * omega[2],
        u[0] * omega[1] - u[1] * omega[0],
    ])
    return ifft(leray_project(dealias(fft(lamb), grid), grid), grid)


def oracle_step(state: OracleState, dt: float, cfl: float = 1.0) -> OracleState:
    grid = state.grid
    umax = float(np.max(np.sqrt(np.sum(state.u**2, axis=0))))
    if umax > 0 and dt > cfl * grid.spacing / umax * (1.0 + 1e-9):
        raise CflViolation(f"dt={dt:.3e} exceeds CFL bound")
    u = state.u
    k1 = oracle_rhs(u, grid)
    k2 = oracle_rhs(u + 0.5 * dt * k1, grid)
    k3 = oracle_rhs(u + 0.5 * dt * k2, grid)
    k4 = oracle_rhs(u + dt * k3, grid)
    unew = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(unew)):
        raise NonFinite(f"oracle velocity left finite range at t={state.t + dt:.6f}")
    return replace(state, u=unew, t=state.t + dt)


def oracle_run(state: OracleState, t_end: float, dt: float, cfl: float = 1.0) -> OracleState:
    while state.t < t_end - 1e-12:
        state = oracle_step(state, min(dt, t_end - state.t), cfl=cfl)
    return state


def compare(active_state, oracle_state: OracleState) -> float:
    """Relative L2 distance between the equation-of-state velocity and the oracle's."""
    if not active_state.grid.compatible(oracle_state.grid):
        raise GridMismatch("active and oracle states live on different grids")
    if abs(active_state.t - oracle_state.t) > 1e-9:
        raise GridMismatch(
            f"states at different times: {active_state.t} vs {oracle_state.t}")
    ua = velocity_w(active_state.delta, active_state.phi, active_state.grid,
                    interp=active_state.phi_interp)
    diff = ua - oracle_state.u
    denom = max(np.sqrt(np.mean(np.sum(oracle_state.u**2, axis=0))), 1e-300)
    return float(np.sqrt(np.mean(np.sum(diff * diff, axis=0))) / denom)
