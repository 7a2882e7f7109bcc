"""Property-based tests (hypothesis): structural invariants that must hold
for arbitrary smooth inputs, with fields built from drawn seeds."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from avflow.eos import velocity_w
from avflow.fields import (MarkerLoop, circulation, compose, holder_norm_c0mu)
from avflow.spectral import (Grid, dealias, divergence, fft, gradient, ifft,
                             leray_project)
from helpers import random_delta, random_divfree, random_field, rel_l2, sup

GRID = Grid(16)
SLOW = settings(max_examples=10, deadline=None)
seeds = st.integers(min_value=0, max_value=2**31 - 1)


class TestSpectralProperties:
    @given(seed=seeds)
    @SLOW
    def test_fft_roundtrip(self, seed):
        f = np.random.default_rng(seed).normal(size=(GRID.n,) * 3)
        assert sup(ifft(fft(f), GRID) - f) < 1e-12

    @given(seed=seeds)
    @SLOW
    def test_projector_idempotent_and_divfree(self, seed):
        rng = np.random.default_rng(seed)
        vh = fft(rng.normal(size=(3,) + (GRID.n,) * 3))
        p1 = leray_project(vh, GRID)
        p2 = leray_project(p1, GRID)
        assert sup(np.abs(p2 - p1)) < 1e-10 * max(sup(np.abs(vh)), 1.0)
        div = ifft(divergence(p1, GRID), GRID)
        assert sup(div) < 1e-9 * max(sup(np.abs(vh)), 1.0)

    @given(seed=seeds)
    @SLOW
    def test_dealias_idempotent_commutes_with_gradient(self, seed):
        rng = np.random.default_rng(seed)
        fh = fft(rng.normal(size=(GRID.n,) * 3))
        assert sup(np.abs(dealias(dealias(fh, GRID), GRID)
                          - dealias(fh, GRID))) == 0.0
        a = gradient(dealias(fh, GRID), GRID)
        b = dealias(gradient(fh, GRID), GRID)
        assert sup(np.abs(a - b)) < 1e-12 * max(sup(np.abs(fh)), 1.0)


class TestEosProperties:
    @given(seed=seeds, a=st.floats(-2.0, 2.0), b=st.floats(-2.0, 2.0))
    @SLOW
    def test_velocity_linear_in_phi(self, seed, a, b):
        rng = np.random.default_rng(seed)
        p1 = random_divfree(GRID, rng, kmax=2)
        p2 = random_divfree(GRID, rng, kmax=2)
        delta = random_delta(GRID, rng, kmax=1, grad_sup=0.2)
        lhs = velocity_w(delta, a * p1 + b * p2, GRID)
        rhs = a * velocity_w(delta, p1, GRID) + b * velocity_w(delta, p2, GRID)
        assert sup(lhs - rhs) < 1e-9 * (abs(a) + abs(b) + 1.0)


class TestFieldsProperties:
    @given(seed=seeds, c=st.floats(-3.0, 3.0))
    @SLOW
    def test_holder_norm_absolute_homogeneity(self, seed, c):
        rng = np.random.default_rng(seed)
        f = random_field(GRID, rng, kmax=3, ncomp=0)
        base = holder_norm_c0mu(f, 0.5, GRID)
        scaled = holder_norm_c0mu(c * f, 0.5, GRID)
        assert scaled.total == pytest.approx(abs(c) * base.total,
                                             rel=1e-10, abs=1e-12)

    @given(seed=seeds)
    @SLOW
    def test_holder_norm_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        f = random_field(GRID, rng, kmax=3, ncomp=0)
        g = random_field(GRID, rng, kmax=3, ncomp=0)
        nf = holder_norm_c0mu(f, 0.5, GRID).total
        ng = holder_norm_c0mu(g, 0.5, GRID).total
        assert holder_norm_c0mu(f + g, 0.5, GRID).total <= nf + ng + 1e-10

    @given(seed=seeds, axis=st.integers(0, 2))
    @SLOW
    def test_compose_periodic_in_delta(self, seed, axis):
        rng = np.random.default_rng(seed)
        f = random_field(GRID, rng, kmax=2)
        delta = random_delta(GRID, rng, kmax=1, grad_sup=0.2)
        shifted = delta.copy()
        shifted[axis] += GRID.length
        a = compose(f, delta, GRID)
        b = compose(f, shifted, GRID)
        assert sup(a - b) < 1e-9

    @given(seed=seeds, k=st.integers(1, 63))
    @SLOW
    def test_circulation_cyclic_invariance(self, seed, k):
        rng = np.random.default_rng(seed)
        u = random_field(GRID, rng, kmax=2)
        lp = MarkerLoop.circle((np.pi, np.pi, np.pi), 1.2, m=64)
        rolled = MarkerLoop(np.roll(lp.points, k, axis=0))
        assert circulation(u, lp, GRID) == pytest.approx(
            circulation(u, rolled, GRID), rel=1e-9, abs=1e-11)
