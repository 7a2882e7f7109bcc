"""Shared construction helpers for the test suite."""

import numpy as np

from avflow.spectral import Grid, dealias, fft, grad_vector, ifft, leray_project


def random_field(grid: Grid, rng, kmax: int = 2, ncomp: int = 3) -> np.ndarray:
    """Smooth random field as a sum of a few real Fourier modes, |k| <= kmax."""
    w = 2.0 * np.pi / grid.length
    x = grid.x
    shape = (ncomp,) + (grid.n,) * 3 if ncomp else (grid.n,) * 3
    f = np.zeros(shape)
    for _ in range(8):
        k = rng.integers(-kmax, kmax + 1, size=3)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        carrier = np.cos(w * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]) + phase)
        if ncomp:
            f += rng.normal(size=ncomp)[:, None, None, None] * carrier
        else:
            f += rng.normal() * carrier
    return f


def random_divfree(grid: Grid, rng, kmax: int = 2) -> np.ndarray:
    """Random smooth divergence-free (and dealias-safe) vector field."""
    f = random_field(grid, rng, kmax=kmax, ncomp=3)
    return ifft(leray_project(dealias(fft(f), grid), grid), grid)


def random_delta(grid: Grid, rng, kmax: int = 1, grad_sup: float = 0.2) -> np.ndarray:
    """Random smooth displacement scaled to a target sup-norm of its gradient."""
    d = random_field(grid, rng, kmax=kmax, ncomp=3)
    g = grad_vector(d, grid)
    scale = float(np.max(np.sqrt(np.sum(g * g, axis=(0, 1)))))
    return d * (grad_sup / scale)


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    """Relative L2 distance, component axes summed pointwise."""
    a, b = np.asarray(a), np.asarray(b)
    diff = np.sqrt(np.mean(np.sum((a - b) ** 2, axis=tuple(range(a.ndim - 3)))))
    ref = np.sqrt(np.mean(np.sum(b * b, axis=tuple(range(b.ndim - 3)))))
    return float(diff / max(ref, 1e-300))


def sup(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))
