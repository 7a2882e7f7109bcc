"""Velocity reconstruction from the displacement/initial-velocity pair.

The core map takes (delta, phi) to u = P{(I + grad delta)^T phi(x + delta)};
its gradient is assembled from pointwise 3x3 determinants without ever
differentiating u, and the Poisson potential and Eulerian pressure are
recovered as diagnostics.
"""

from __future__ import annotations

import numpy as np

from . import spectral
from .errors import InsufficientHistory
from .fields import compose, make_interpolant
from .spectral import Grid, dealias, fft, grad_vector, ifft, leray_project

__all__ = [
    "check_divergence_free",
    "velocity_w",
    "w_field",
    "velocity_gradient_det",
    "solve_n_a",
    "pressure",
]

_EPS = np.array([
    [[0, 0, 0], [0, 0, 1], [0, -1, 0]],
    [[0, 0, -1], [0, 0, 0], [1, 0, 0]],
    [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
], dtype=float)


def check_divergence_free(phi: np.ndarray, grid: Grid, rel_tol: float = 1e-10) -> None:
    ph = fft(phi)
    div = spectral.divergence(ph, grid)
    scale = max(np.max(np.abs(ph)), 1e-300)
    if np.max(np.abs(div)) > rel_tol * scale * np.max(grid.k2) ** 0.5:
        raise ValueError("phi is not divergence-free to tolerance")


def _grad_a(delta: np.ndarray, grid: Grid) -> np.ndarray:
    """grad A with A = x + delta: G[m, i] = dA_m/dx_i, shape (3, 3, n, n, n)."""
    g = grad_vector(delta, grid)
    g[0, 0] += 1.0
    g[1, 1] += 1.0
    g[2, 2] += 1.0
    return g


def w_field(delta: np.ndarray, psi: np.ndarray, grid: Grid, *, interp=None,
            apply_dealias: bool = True, **interp_kw) -> np.ndarray:
    """w_psi = (grad A)^T psi(A); no projection."""
    c = compose(psi, delta, grid, interp=interp, **interp_kw)
    ga = _grad_a(delta, grid)
    w = np.einsum("mi...,m...->i...", ga, c)
    if apply_dealias:
        w = ifft(dealias(fft(w), grid), grid)
    return w


def velocity_w(delta: np.ndarray, phi: np.ndarray, grid: Grid, *, interp=None,
               **interp_kw) -> np.ndarray:
    """Equation of state: u = P{(grad A)^T phi(A)}, dealiased, divergence-free."""
    w = w_field(delta, phi, grid, interp=interp, apply_dealias=False, **interp_kw)
    wh = dealias(fft(w), grid)
    return ifft(leray_project(wh, grid), grid)


def velocity_gradient_det(delta: np.ndarray, phi: np.ndarray, grid: Grid, *,
                          zeta_interp=None, **interp_kw) -> np.ndarray:
    """Velocity gradient via the determinant identity, no derivatives of u.

    Returns G[j, i] = du_j/dx_i, assembled as P_{jl} Det[zeta(A); dA/dx_i;
    dA/dx_l] with zeta = curl phi composed with the map (never differentiating
    the composition).
    """
    if zeta_interp is None:
        zeta = ifft(spectral.curl(fft(phi), grid), grid)
        zeta_interp = make_interpolant(zeta, grid, **_interp_args(interp_kw))
    z = zeta_interp(grid.x + delta)
    ga = _grad_a(delta, grid)
    # d[i, l] = z . (dA/dx_i x dA/dx_l); columns of ga are dA/dx_i
    cross = np.einsum("pqr,qi...,rl...->pil...", _EPS, ga, ga)
    d = np.einsum("p...,pil...->il...", z, cross)
    dh = dealias(fft(d), grid)
    out = np.empty((3, 3, grid.n, grid.n, grid.n))
    for i in range(3):
        proj = leray_project(dh[i], grid)  # vector over l, projected in l -> j
        out[:, i] = ifft(proj, grid)
    return out


def _interp_args(interp_kw: dict) -> dict:
    return {k: interp_kw[k] for k in ("scheme", "factor", "order") if k in interp_kw}


def solve_n_a(delta: np.ndarray, phi: np.ndarray, grid: Grid, *, interp=None,
              **interp_kw) -> np.ndarray:
    """Zero-mean potential n_A with lap n_A = div{(grad A)^T phi(A)}."""
    w = w_field(delta, phi, grid, interp=interp, **interp_kw)
    rhs = spectral.divergence(fft(w), grid)
    rhs[0, 0, 0] = 0.0  # divergence of a periodic field has exactly zero mean
    return ifft(spectral.inverse_laplacian(rhs, grid), grid)


def pressure(n_path, dt: float, u: np.ndarray, grid: Grid) -> np.ndarray:
    """Eulerian pressure p = dn/dt + u . grad n + |u|^2 / 2, zero-mean.

    ``n_path`` holds >= 3 consecutive n_A samples at uniform spacing dt; the
    time derivative is centered at the middle sample, where u must be taken.
    """
    if len(n_path) < 3:
        raise InsufficientHistory("pressure needs >= 3 consecutive n_A samples")
    n_prev, n_mid, n_next = n_path[-3], n_path[-2], n_path[-1]
    dndt = (n_next - n_prev) / (2.0 * dt)
    gn = ifft(spectral.gradient(fft(n_mid), grid), grid)
    p = dndt + np.einsum("i...,i...->...", u, gn) + 0.5 * np.sum(u * u, axis=0)
    return p - np.mean(p)
