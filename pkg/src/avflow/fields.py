"""Real-space field utilities: periodic interpolation and composition
x -> f(x + delta(x)), Holder-norm estimators, and marker-loop geometry.

Fields are plain numpy arrays on a :class:`~avflow.spectral.Grid`; scalars have
shape (n, n, n), vectors (3, n, n, n). Composition uses spectrally upsampled
quintic splines by default; an exact (slow) Fourier-sum path is available for
verification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._spline_kernel import eval_quintic
from .errors import DegenerateLoop, NonFinite
from .spectral import Grid, fft, grad_vector, ifft

__all__ = [
    "PeriodicInterpolant",
    "FourierInterpolant",
    "spectral_upsample",
    "compose",
    "interpolate_at",
    "HolderNorm",
    "holder_norm_c0mu",
    "holder_norm_c1mu",
    "MarkerLoop",
    "circulation",
]


def spectral_upsample(f: np.ndarray, grid: Grid, factor: int) -> np.ndarray:
    """Zero-pad the spectrum of f to a factor-times finer grid."""
    if factor == 1:
        return np.asarray(f, dtype=float)
    n, m = grid.n, grid.n * factor
    fh = fft(f)
    shape = f.shape[:-3] + (m, m, m // 2 + 1)
    out = np.zeros(shape, dtype=complex)
    lo, hi = n // 2, n - n // 2  # positive-freq block, negative-freq block
    sl = (np.s_[:lo], np.s_[m - (n - hi):])
    src = (np.s_[:lo], np.s_[hi:])
    for a in range(2):
        for b in range(2):
            out[..., sl[a], sl[b], : n // 2 + 1] = fh[..., src[a], src[b], :]
    return np.fft.irfftn(out, s=(m, m, m), axes=(-3, -2, -1)) * factor**3


class PeriodicInterpolant:
    """Periodic spline interpolant of a field, built once, evaluated repeatedly.

    The field is spectrally upsampled by ``factor`` and spline-filtered so that
    repeated evaluations only pay for ``map_coordinates``.
    """

    def __init__(self, f: np.ndarray, grid: Grid, factor: int = 4, order: int = 5):
        self.grid = grid
        self.order = order
        self._m = grid.n * factor
        self._h = grid.length / self._m
        fine = spectral_upsample(np.asarray(f, dtype=float), grid, factor)
        if fine.ndim == 3:
            fine = fine[None]
            self._scalar = True
        else:
            self._scalar = False
        if order > 1:
            fine = np.stack([
                ndimage.spline_filter(c, order=order, mode="grid-wrap") for c in fine
            ])
        if order == 5:
            # padded, branch-free layout for the numba kernel
            self._coeffs = np.ascontiguousarray(
                np.pad(fine, ((0, 0), (2, 3), (2, 3), (2, 3)), mode="wrap"))
        else:
            self._coeffs = fine

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at physical positions, ``points`` shape (3, ...)."""
        pts = np.asarray(points, dtype=float)
        if not np.all(np.isfinite(pts)):
            raise NonFinite("interpolation points contain non-finite values")
        coords = np.mod(pts / self._h, self._m).reshape(3, -1)
        # fmod of a tiny negative value can round up to exactly m; wrap it back
        coords[coords >= self._m] = 0.0
        if self.order == 5:
            out = np.empty((len(self._coeffs), coords.shape[1]))
            eval_quintic(self._coeffs, np.ascontiguousarray(coords.T), out)
            vals = out
        else:
            vals = np.stack([
                ndimage.map_coordinates(c, coords, order=self.order,
                                        mode="grid-wrap", prefilter=False)
                for c in self._coeffs
            ])
        out = vals.reshape((len(self._coeffs),) + pts.shape[1:])
        return out[0] if self._scalar else out


class FourierInterpolant:
    """Exact trigonometric evaluation by direct mode summation (slow path)."""

    def __init__(self, f: np.ndarray, grid: Grid, mode_tol: float = 1e-13):
        self.grid = grid
        f = np.asarray(f, dtype=float)
        if f.ndim == 3:
            f = f[None]
            self._scalar = True
        else:
            self._scalar = False
        ch = np.fft.fftn(f, axes=(-3, -2, -1)) / grid.n**3
        mag = np.max(np.abs(ch), axis=0)
        mask = mag > mode_tol * max(np.max(mag), 1e-300)
        freq = np.fft.fftfreq(grid.n) * grid.n
        fx, fy, fz = np.meshgrid(freq, freq, freq, indexing="ij")
        kfac = 2.0 * np.pi / grid.length
        self._kvecs = kfac * np.stack([fx[mask], fy[mask], fz[mask]])  # (3, M)
        self._coeffs = ch[:, mask]  # (ncomp, M)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(3, -1)
        out = np.empty((len(self._coeffs), flat.shape[1]))
        chunk = 4096
        for s in range(0, flat.shape[1], chunk):
            phase = np.exp(1j * (flat[:, s:s + chunk].T @ self._kvecs))  # (P, M)
            out[:, s:s + chunk] = (phase @ self._coeffs.T).T.real
        out = out.reshape((len(self._coeffs),) + pts.shape[1:])
        return out[0] if self._scalar else out


def make_interpolant(f: np.ndarray, grid: Grid, scheme: str = "spline",
                     factor: int = 4, order: int = 5):
    if scheme == "spline":
        return PeriodicInterpolant(f, grid, factor=factor, order=order)
    if scheme == "fourier":
        return FourierInterpolant(f, grid)
    raise ValueError(f"unknown interpolation scheme {scheme!r}")


def compose(f: np.ndarray, delta: np.ndarray, grid: Grid, *, interp=None,
            scheme: str = "spline", factor: int = 4, order: int = 5) -> np.ndarray:
    """Sample x -> f(x + delta(x)) on the grid via periodic interpolation of f.

    Pass a prebuilt ``interp`` (from :func:`make_interpolant`) to amortize the
    interpolant construction when f is fixed and delta varies.
    """
    if interp is None:
        interp = make_interpolant(f, grid, scheme, factor, order)
    return interp(grid.x + delta)


def interpolate_at(f: np.ndarray, points: np.ndarray, grid: Grid, *, interp=None,
                   scheme: str = "spline", factor: int = 4, order: int = 5) -> np.ndarray:
    """Periodic interpolation of f at arbitrary points (same scheme as compose)."""
    if interp is None:
        interp = make_interpolant(f, grid, scheme, factor, order)
    return interp(points)


# --------------------------------------------------------------------------
# Holder norms


@dataclass(frozen=True)
class HolderNorm:
    """C^{0,mu} (or C^{1,mu}) norm estimate, split into its two parts.

    For C^{0,mu}: total = sup_part + seminorm_part.
    For C^{1,mu}: sup_part is the full C^{0,mu} norm of f, seminorm_part is
    L * ||grad f||_{0,mu}, and total is their sum.
    """

    mu: float
    sup_part: float
    seminorm_part: float

    @property
    def total(self) -> float:
        return self.sup_part + self.seminorm_part


def _pointwise_mag(f: np.ndarray) -> np.ndarray:
    """Euclidean magnitude over leading component axes."""
    f = np.asarray(f)
    if f.ndim == 3:
        return np.abs(f)
    flat = f.reshape(-1, *f.shape[-3:])
    return np.sqrt(np.sum(flat * flat, axis=0))


def _dyadic_separations(n: int):
    s = 1
    while s <= n // 2:
        yield s
        s *= 2


def holder_norm_c0mu(f: np.ndarray, mu: float, grid: Grid) -> HolderNorm:
    """C^{0,mu} estimator: sup over nodes plus a dyadic-separation seminorm.

    Pair sampling is restricted to axis-aligned separations of 1, 2, 4, ...,
    n/2 grid steps (periodic distance), which underestimates the true
    seminorm by at most a modest constant factor on smooth fields.
    """
    if not 0.0 < mu < 1.0:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    f = np.asarray(f, dtype=float)
    sup = float(np.max(_pointwise_mag(f)))
    semi = 0.0
    L = grid.length
    for axis in (-3, -2, -1):
        for s in _dyadic_separations(grid.n):
            diff = np.roll(f, -s, axis=axis) - f
            d = min(s, grid.n - s) * grid.spacing  # periodic pair distance
            semi = max(semi, float(np.max(_pointwise_mag(diff))) * (L / d) ** mu)
    return HolderNorm(mu=mu, sup_part=sup, seminorm_part=semi)


def holder_norm_c1mu(f: np.ndarray, mu: float, grid: Grid) -> HolderNorm:
    """C^{1,mu} norm: ||f||_{0,mu} + L ||grad f||_{0,mu}, gradient spectral."""
    f = np.asarray(f, dtype=float)
    base = holder_norm_c0mu(f, mu, grid)
    if f.ndim == 3:
        gf = ifft(1j * grid.k * fft(f)[None], grid)
    else:
        gf = grad_vector(f.reshape(-1, *f.shape[-3:]), grid)
    gnorm = holder_norm_c0mu(gf, mu, grid)
    return HolderNorm(mu=mu, sup_part=base.total, seminorm_part=grid.length * gnorm.total)


# --------------------------------------------------------------------------
# Marker loops and circulation


@dataclass
class MarkerLoop:
    """Closed polyline of markers in the box; the closing segment is implied."""

    points: np.ndarray  # (M, 3)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise ValueError("loop points must have shape (M, 3)")
        if len(self.points) < 16:
            raise ValueError(f"loop needs >= 16 points, got {len(self.points)}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("loop points must be finite")

    @staticmethod
    def circle(center, radius: float, normal_axis: int = 2, m: int = 64) -> "MarkerLoop":
        theta = 2.0 * np.pi * np.arange(m) / m
        pts = np.zeros((m, 3))
        a, b = [i for i in range(3) if i != normal_axis]
        pts[:, a] = radius * np.cos(theta)
        pts[:, b] = radius * np.sin(theta)
        pts += np.asarray(center, dtype=float)
        return MarkerLoop(pts)


def _minimal_image(seg: np.ndarray, length: float) -> np.ndarray:
    return seg - length * np.round(seg / length)


def circulation(u: np.ndarray, loop: MarkerLoop, grid: Grid, *, interp=None) -> float:
    """Trapezoidal quadrature of the closed line integral of u along the loop."""
    pts = loop.points
    segs = _minimal_image(np.roll(pts, -1, axis=0) - pts, grid.length)
    if np.any(np.linalg.norm(segs, axis=1) < 1e-12 * grid.length):
        raise DegenerateLoop("consecutive loop markers coincide")
    vals = interpolate_at(u, pts.T, grid, interp=interp).T  # (M, 3)
    mid = 0.5 * (vals + np.roll(vals, -1, axis=0))
    return float(np.sum(mid * segs))
