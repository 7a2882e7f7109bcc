"""Initial-condition library: divergence-free, dealias-safe velocity fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters
from .spectral import Grid, dealias, fft, ifft, leray_project

__all__ = ["Scenario", "generate_ic"]

KNOWN = ("taylor_green_2d", "abc", "random_bandlimited", "shear_layer_2d")


@dataclass
class Scenario:
    name: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in KNOWN:
            raise BadParameters(f"unknown scenario {self.name!r}; choose from {KNOWN}")


def _scaled_coords(grid: Grid):
    w = 2.0 * np.pi / grid.length
    return w * grid.x[0], w * grid.x[1], w * grid.x[2]


def generate_ic(scenario: Scenario, grid: Grid) -> np.ndarray:
    p = scenario.parameters
    if scenario.name == "abc":
        # accept lowercase keys too: configparser lowercases INI option names
        A = float(p.get("A", p.get("a", 1.0)))
        B = float(p.get("B", p.get("b", 1.0)))
        C = float(p.get("C", p.get("c", 1.0)))
        x, y, z = _scaled_coords(grid)
        phi = np.stack([
            A * np.sin(z) + C * np.cos(y),
            B * np.sin(x) + A * np.cos(z),
            C * np.sin(y) + B * np.cos(x),
        ])
    elif scenario.name == "taylor_green_2d":
        amp = float(p.get("amplitude", 1.0))
        x, y, _ = _scaled_coords(grid)
        phi = amp * np.stack([
            np.sin(x) * np.cos(y),
            -np.cos(x) * np.sin(y),
            np.zeros((grid.n,) * 3),
        ])
    elif scenario.name == "random_bandlimited":
        phi = _random_bandlimited(grid, p)
    elif scenario.name == "shear_layer_2d":
        phi = _shear_layer(grid, p)
    else:  # pragma: no cover - guarded in Scenario
        raise BadParameters(scenario.name)
    # dealias-safe and spectrally divergence-free by construction of the output
    return ifft(leray_project(dealias(fft(phi), grid), grid), grid)


def _random_bandlimited(grid: Grid, p: dict) -> np.ndarray:
    seed = int(p.get("seed", 0))
    s = float(p.get("spectrum_exponent", 2.0))
    k_cut = int(p.get("k_cut", max(2, grid.n // 8)))
    two_d = bool(p.get("two_d", False))
    normalize = float(p.get("max_velocity", 1.0))
    if k_cut < 1 or k_cut > grid.n // 3:
        raise BadParameters(f"k_cut must lie in [1, n/3], got {k_cut}")
    rng = np.random.default_rng(seed)
    freq = np.fft.fftfreq(grid.n) * grid.n
    fx, fy, fz = np.meshgrid(freq, freq, freq, indexing="ij")
    kk = np.sqrt(fx**2 + fy**2 + fz**2)
    band = (kk >= 1.0) & (kk <= k_cut)
    if two_d:
        band &= fz == 0
    amp = np.where(band, np.where(kk > 0, kk, 1.0) ** (-s), 0.0)
    ncomp = 2 if two_d else 3
    vh = np.zeros((3, grid.n, grid.n, grid.n), dtype=complex)
    for c in range(ncomp):
        coeff = rng.normal(size=band.shape) + 1j * rng.normal(size=band.shape)
        vh[c] = amp * coeff
    v = np.fft.ifftn(vh, axes=(-3, -2, -1)).real
    vmax = float(np.max(np.sqrt(np.sum(v * v, axis=0))))
    if vmax > 0:
        v *= normalize / vmax
    return v


def _shear_layer(grid: Grid, p: dict) -> np.ndarray:
    width = float(p.get("width", 0.05)) * grid.length
    perturb = float(p.get("perturbation", 0.05))
    amp = float(p.get("amplitude", 1.0))
    if width <= 0:
        raise BadParameters("shear layer width must be positive")
    x, y = grid.x[0], grid.x[1]
    L = grid.length
    u1 = amp * (np.tanh((y - 0.25 * L) / width) - np.tanh((y - 0.75 * L) / width) - 1.0)
    u2 = perturb * np.sin(2.0 * np.pi * x / L)
    phi = np.stack([u1, u2, np.zeros_like(u1)])
    return phi
