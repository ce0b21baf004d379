import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moltwave.bc1d import BCSpec
from moltwave.kernelweights import SchemeParams
from moltwave.mesh1d import build_chebyshev, build_uniform
from moltwave.stepper1d import (
    SourceSpec,
    WaveState1D,
    amplification_check,
    init_history,
    run,
    source_convolution,
    step,
)


def gaussian(x):
    return np.exp(-36.0 * x * x)


def trav_error(kind, n, cfl=1.0):
    """Max error of u = sin(2(x - t)) on [0, 1] with exact boundary data."""
    g = build_uniform(0.0, 1.0, n)
    p = SchemeParams.from_cfl(cfl, g.h_max)
    x = g.nodes
    if kind == "dirichlet":
        bc = BCSpec.uniform(kind, lambda t: math.sin(-2 * t), lambda t: math.sin(2 * (1 - t)))
    else:
        bc = BCSpec.uniform(kind, lambda t: 2 * math.cos(-2 * t), lambda t: 2 * math.cos(2 * (1 - t)))
    s = init_history(np.sin(2 * x), -2 * np.cos(2 * x), p, g, f_xx=-4 * np.sin(2 * x))
    n_steps = int(round(0.5 / p.dt))
    s = run(s, g, p, bc, n_steps)
    return np.max(np.abs(s.u_curr - np.sin(2 * (x - s.t))))


class TestInitHistory:
    g = build_uniform(-1.0, 1.0, 40)
    p = SchemeParams.from_cfl(1.0, 0.05)

    def test_constant(self):
        s = init_history(np.full(41, 3.0), np.zeros(41), self.p, self.g)
        np.testing.assert_allclose(s.u_prev, 3.0, rtol=1e-14)

    def test_gaussian(self):
        x = self.g.nodes
        fxx = (72.0 * 72.0 * x * x - 72.0) * gaussian(x)
        s = init_history(gaussian(x), np.zeros(41), self.p, self.g, f_xx=fxx)
        np.testing.assert_allclose(s.u_prev, gaussian(x) + 0.5 * self.p.dt**2 * fxx, rtol=1e-14)

    def test_velocity(self):
        s = init_history(np.zeros(41), np.ones(41), self.p, self.g)
        np.testing.assert_allclose(s.u_prev, -self.p.dt)

    def test_shape_check(self):
        with pytest.raises(ValueError):
            init_history(np.zeros(40), np.zeros(41), self.p, self.g)

    def test_state_shapes(self):
        with pytest.raises(ValueError):
            WaveState1D(np.zeros(3), np.zeros(4))


class TestStep:
    @pytest.mark.parametrize("kind", ["dirichlet", "neumann", "periodic", "outflow"])
    def test_quiescence(self, kind):
        g = build_chebyshev(0.0, 1.0, 30)
        p = SchemeParams.from_cfl(2.0, g.h_max)
        s = run(init_history(np.zeros(31), np.zeros(31), p, g), g, p, BCSpec.uniform(kind), 50)
        assert not s.u_curr.any()

    @pytest.mark.parametrize("kind", ["periodic", "neumann"])
    @pytest.mark.parametrize("cfl", [0.5, 5.0])
    def test_constants_preserved(self, kind, cfl):
        g = build_uniform(0.0, 1.0, 50)
        p = SchemeParams.from_cfl(cfl, g.h_max)
        s = WaveState1D(np.ones(51), np.ones(51))
        s = run(s, g, p, BCSpec.uniform(kind), 1000)
        assert np.max(np.abs(s.u_curr - 1.0)) <= 1e-10

    @pytest.mark.parametrize("kind", ["periodic", "neumann", "dirichlet"])
    @pytest.mark.parametrize("grid", ["uniform", "chebyshev"])
    def test_rough_data_stays_bounded(self, kind, grid):
        # small cell parameters (CFL 20) once drove the periodic and Neumann
        # end rows unstable; random data must not grow exponentially
        g = build_uniform(0.0, 1.0, 50) if grid == "uniform" else build_chebyshev(0.0, 1.0, 50)
        p = SchemeParams.from_cfl(20.0, 0.02)
        # the two periodic end values deliberately differ
        r = np.random.default_rng(0).standard_normal(51) * 1e-6
        s = run(WaveState1D(r.copy(), r.copy()), g, p, BCSpec.uniform(kind), 2000)
        assert np.max(np.abs(s.u_curr)) < 1e-3

    def test_periodic_seam_is_one_unknown(self):
        g = build_uniform(0.0, 1.0, 20)
        p = SchemeParams.from_cfl(1.0, 0.05)
        u = np.zeros(21)
        u[0] = 1e-3
        s = step(WaveState1D(u, u.copy()), g, p, BCSpec.uniform("periodic"))
        assert s.u_curr[0] == s.u_curr[-1]

    def test_one_constant_step(self):
        g = build_uniform(0.0, 1.0, 10)
        p = SchemeParams(2.0, 1.0, 0.1)
        s = step(WaveState1D(np.ones(11), np.ones(11)), g, p, BCSpec.uniform("periodic"))
        np.testing.assert_allclose(s.u_curr, 1.0, rtol=1e-14)
        assert s.n == 1 and s.t == pytest.approx(0.1)

    @pytest.mark.parametrize("kind", ["dirichlet", "neumann"])
    def test_inhomogeneous_data_second_order(self, kind):
        e1, e2 = trav_error(kind, 40), trav_error(kind, 80)
        assert e2 < 1e-3
        assert math.log2(e1 / e2) == pytest.approx(2.0, abs=0.25)

    def test_outflow_lets_pulse_leave(self):
        g = build_uniform(-1.0, 1.0, 200)
        p = SchemeParams.from_cfl(1.0, g.h_max)
        s = init_history(gaussian(g.nodes), np.zeros(201), p, g)
        s = run(s, g, p, BCSpec.uniform("outflow"), int(round(2.0 / p.dt)))
        # the pulse has left; only the reflection error remains
        assert np.max(np.abs(s.u_curr)) < 2e-3

    def test_dirichlet_reflects(self):
        g = build_uniform(-1.0, 1.0, 200)
        p = SchemeParams.from_cfl(1.0, g.h_max)
        s = init_history(gaussian(g.nodes), np.zeros(201), p, g)
        s = run(s, g, p, BCSpec.uniform("dirichlet"), int(round(2.0 / p.dt)))
        # two inverted half pulses meet back at the centre
        assert s.u_curr[100] == pytest.approx(-1.0, abs=0.02)

    def test_nan_raises(self):
        g = build_uniform(0.0, 1.0, 10)
        p = SchemeParams(2.0, 1.0, 0.1)
        u = np.ones(11)
        u[3] = np.nan
        with pytest.raises(FloatingPointError):
            step(WaveState1D(u, u.copy()), g, p, BCSpec.uniform("dirichlet"))


class TestSources:
    g = build_uniform(0.0, 1.0, 20)
    p = SchemeParams(2.0, 1.0, 0.05)

    def test_empty(self):
        assert not source_convolution(SourceSpec(), 0.0, self.g, self.p).any()

    def test_single_point(self):
        src = SourceSpec(points=[(0.5, lambda t: 1.0)])
        out = source_convolution(src, 0.0, self.g, self.p)
        want = (self.p.c * self.p.dt / self.p.beta) * np.exp(-self.p.alpha * np.abs(self.g.nodes - 0.5))
        np.testing.assert_allclose(out, want, rtol=1e-15)
        np.testing.assert_allclose(out, out[::-1], rtol=1e-13)

    def test_linearity(self):
        one = SourceSpec(points=[(0.25, lambda t: 1.0)])
        two = SourceSpec(points=[(0.25, lambda t: 1.0), (0.25, lambda t: 1.0)])
        np.testing.assert_allclose(source_convolution(two, 0.0, self.g, self.p),
                                   2 * source_convolution(one, 0.0, self.g, self.p))

    def test_outside(self):
        with pytest.raises(ValueError):
            source_convolution(SourceSpec(points=[(2.0, lambda t: 1.0)]), 0.0, self.g, self.p)

    def test_smooth_source_manufactured(self):
        # u = t^2 solves u_tt = u_xx + S with S = 2
        g = build_uniform(0.0, 1.0, 20)
        p = SchemeParams(2.0, 1.0, 0.01)
        bc = BCSpec.uniform("dirichlet", lambda t: t * t, lambda t: t * t)
        src = SourceSpec(smooth=lambda x, t: 2.0)
        s = init_history(np.zeros(21), np.zeros(21), p, g, src)
        s = run(s, g, p, bc, 100, src)
        assert np.max(np.abs(s.u_curr - 1.0)) < 2e-3


class TestAmplification:
    def test_zero_frequency(self):
        r1, r2 = amplification_check(0.0, SchemeParams(2.0, 1.0, 1.0))
        assert r1 == pytest.approx(1.0) and r2 == pytest.approx(1.0)

    @given(st.floats(0.0, 1e3), st.floats(1e-3, 10.0), st.floats(0.05, 2.0))
    @settings(max_examples=200, deadline=None)
    def test_unit_circle(self, omega, dt, beta):
        r1, r2 = amplification_check(omega, SchemeParams(beta, 1.0, dt))
        assert abs(abs(r1) - 1.0) <= 1e-12 and abs(abs(r2) - 1.0) <= 1e-12
        assert abs(r1 * r2 - 1.0) <= 1e-12

    def test_beta_four_unstable(self):
        r1, r2 = amplification_check(100.0, SchemeParams(4.0, 1.0, 1.0))
        assert max(abs(r1), abs(r2)) > 1.0 + 1e-3
