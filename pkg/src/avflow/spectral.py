"""Fourier-space kernels on the periodic box.

All spectral arrays use the numpy ``rfftn`` layout over the last three axes,
shape ``(..., n, n, n//2 + 1)``; conjugate symmetry is implicit in that
representation and the k = 0 coefficient of a real field is real. Leading axes
carry vector/matrix components.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonZeroMean

__all__ = [
    "Grid",
    "fft",
    "ifft",
    "gradient",
    "divergence",
    "curl",
    "grad_vector",
    "inverse_laplacian",
    "leray_project",
    "dealias",
]


@dataclass(frozen=True)
class Grid:
    """Uniform cubic periodic lattice: n points per axis, period length."""

    n: int
    length: float = 2.0 * np.pi

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if self.length <= 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        """Node coordinates, shape (3, n, n, n)."""
        ax = np.arange(self.n) * self.spacing
        return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"))

    @cached_property
    def freq(self) -> np.ndarray:
        """Integer mode numbers per axis in rfftn layout, shape (3, n, n, n//2+1)."""
        full = np.fft.fftfreq(self.n) * self.n
        half = np.arange(self.n // 2 + 1, dtype=float)
        fx = full[:, None, None]
        fy = full[None, :, None]
        fz = half[None, None, :]
        return np.stack(np.broadcast_arrays(fx, fy, fz))

    @cached_property
    def k(self) -> np.ndarray:
        """Wavenumbers 2*pi/L * mode, with the Nyquist mode zeroed (odd derivative)."""
        k = (2.0 * np.pi / self.length) * self.freq
        k[np.abs(self.freq) == self.n // 2] = 0.0
        return k

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 built from the Nyquist-zeroed wavenumbers, so that division
        by k2 is consistent with the derivative operators."""
        return np.sum(self.k * self.k, axis=0)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule: keep |mode_j| <= n/3 on every axis."""
        cut = self.n // 3
        return np.all(np.abs(self.freq) <= cut, axis=0)

    def compatible(self, other: "Grid") -> bool:
        return self.n == other.n and np.isclose(self.length, other.length)


def fft(f: np.ndarray) -> np.ndarray:
    return np.fft.rfftn(f, axes=(-3, -2, -1))


def ifft(fh: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.irfftn(fh, s=(grid.n,) * 3, axes=(-3, -2, -1))


def gradient(fh: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral gradient of a scalar: component i is i*k_i*fh. Output (3, ...)."""
    return 1j * grid.k * fh[..., None, :, :, :]


def divergence(vh: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral divergence of a vector (3, ...) spectral field."""
    return np.sum(1j * grid.k * vh, axis=-4)


def curl(vh: np.ndarray, grid: Grid) -> np.ndarray:
    k = grid.k
    return 1j * np.stack([
        k[1] * vh[..., 2, :, :, :] - k[2] * vh[..., 1, :, :, :],
        k[2] * vh[..., 0, :, :, :] - k[0] * vh[..., 2, :, :, :],
        k[0] * vh[..., 1, :, :, :] - k[1] * vh[..., 0, :, :, :],
    ], axis=-4)


def grad_vector(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Real-space gradient of a real vector field: G[i, j] = d v_i / d x_j."""
    vh = fft(v)
    gh = 1j * grid.k[None, :] * vh[:, None]
    return ifft(gh, grid)


def inverse_laplacian(fh: np.ndarray, grid: Grid, mean_tol: float = 1e-8) -> np.ndarray:
    """Solve lap(g) = f spectrally, zero-mean convention for the free constant."""
    scale = np.max(np.abs(fh))
    mean_coeff = np.abs(fh[..., 0, 0, 0])
    if scale > 0 and np.any(mean_coeff > mean_tol * scale):
        raise NonZeroMean(
            f"Poisson RHS mean coefficient {np.max(mean_coeff):.3e} exceeds tolerance"
        )
    zero = grid.k2 == 0.0  # mean mode and pure-Nyquist modes
    k2 = np.where(zero, 1.0, grid.k2)
    gh = -fh / k2
    gh[..., zero] = 0.0
    return gh


def leray_project(vh: np.ndarray, grid: Grid) -> np.ndarray:
    """P v = v - grad(invlap(div v)); divergence-free, k = 0 mode preserved."""
    k = grid.k
    k2 = grid.k2.copy()
    # k2 = 0 on the mean mode and pure-Nyquist modes, where kdotv = 0 too
    k2[k2 == 0.0] = 1.0
    kdotv = np.sum(k * vh, axis=-4, keepdims=True)
    return vh - k * kdotv / k2


def dealias(fh: np.ndarray, grid: Grid) -> np.ndarray:
    return fh * grid.dealias_mask
