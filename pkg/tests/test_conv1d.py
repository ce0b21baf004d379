import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moltwave.conv1d import LinePlan, assemble, fast_convolve, homogeneous_profiles, local_integrals
from moltwave.harness.checks import quad_convolution
from moltwave.kernelweights import simpson_weights
from moltwave.mesh1d import build_chebyshev, build_from_nodes, build_uniform

# Frozen from adaptive quadrature: x_j = 0.5, h = 0.1, alpha = 7 (nu = 0.7).
JR_X2 = 0.14950506289160972
JL_X2 = 0.10498935330458006


def constant_convolution(x, a, b, alpha):
    return 2.0 - np.exp(-alpha * (x - a)) - np.exp(-alpha * (b - x))


GRIDS = {
    "uniform": lambda: build_uniform(0.0, 1.0, 32),
    "chebyshev": lambda: build_chebyshev(0.0, 1.0, 32),
    "half": lambda: build_chebyshev(0.0, 1.0, 32, "half"),
}


class TestLocalIntegrals:
    def test_zero(self):
        g = build_uniform(0.0, 1.0, 10)
        JL, JR = local_integrals(np.zeros(11), g, 5.0)
        assert not JL.any() and not JR.any()

    @pytest.mark.parametrize("alpha", [0.5, 10.0, 300.0])
    def test_constant(self, alpha):
        g = build_uniform(0.0, 1.0, 10)
        JL, JR = local_integrals(np.ones(11), g, alpha)
        w = simpson_weights(alpha * 0.1)
        np.testing.assert_allclose(JL[1:], w.P + w.Q, rtol=1e-14)
        np.testing.assert_allclose(JR[:-1], -math.expm1(-alpha * 0.1), rtol=1e-13)
        assert JL[0] == 0.0 and JR[-1] == 0.0

    def test_quadratic_cell_integrals(self):
        g = build_uniform(0.0, 1.0, 10)
        JL, JR = local_integrals(g.nodes**2, g, 7.0)
        assert JR[5] == pytest.approx(JR_X2, rel=1e-13)
        assert JL[5] == pytest.approx(JL_X2, rel=1e-13)


class TestFastConvolve:
    @pytest.mark.parametrize("name", sorted(GRIDS))
    @pytest.mark.parametrize("alpha", [1.0, 40.0, 2000.0])
    def test_constant(self, name, alpha):
        g = GRIDS[name]()
        I = fast_convolve(np.ones(g.nodes.size), g, alpha).I
        want = constant_convolution(g.nodes, g.a, g.b, alpha)
        np.testing.assert_allclose(I, want, rtol=1e-12)

    @pytest.mark.parametrize("name", sorted(GRIDS))
    @pytest.mark.parametrize("coeffs", [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.3, -2.0, 5.0)])
    def test_quadratics_exact(self, name, coeffs):
        g = GRIDS[name]()
        alpha = 7.0
        f = lambda y: coeffs[0] + coeffs[1] * y + coeffs[2] * y * y  # noqa: E731
        I = fast_convolve(f(g.nodes), g, alpha).I
        want = np.array([quad_convolution(f, x, g.a, g.b, alpha) for x in g.nodes])
        assert np.max(np.abs(I - want)) / np.max(np.abs(want)) <= 1e-10

    def test_zero(self):
        g = build_uniform(-1.0, 1.0, 20)
        res = fast_convolve(np.zeros(21), g, 3.0)
        assert not res.I.any()

    def test_characteristics_sum(self):
        g = build_chebyshev(0.0, 1.0, 20)
        res = fast_convolve(np.sin(g.nodes), g, 9.0)
        np.testing.assert_array_equal(res.I, res.IL + res.IR)
        assert res.IL[0] == 0.0 and res.IR[-1] == 0.0

    def test_fourth_order_on_smooth_data(self):
        # the compact rule is exact on quadratics, so smooth data converge fast
        f = lambda y: math.cos(3.0 * y)  # noqa: E731
        errs = []
        for n in (16, 32):
            g = build_uniform(0.0, 1.0, n)
            I = fast_convolve(np.cos(3.0 * g.nodes), g, 5.0).I
            want = np.array([quad_convolution(f, x, 0.0, 1.0, 5.0) for x in g.nodes])
            errs.append(np.max(np.abs(I - want)))
        assert math.log2(errs[0] / errs[1]) > 2.5

    @given(st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=5, max_size=40),
           st.floats(min_value=0.1, max_value=1e4))
    @settings(max_examples=50, deadline=None)
    def test_linear(self, values, alpha):
        u = np.array(values)
        g = build_uniform(0.0, 1.0, u.size - 1)
        v = np.roll(u, 2)
        lhs = fast_convolve(2.0 * u - v, g, alpha).I
        rhs = 2.0 * fast_convolve(u, g, alpha).I - fast_convolve(v, g, alpha).I
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            fast_convolve(np.ones(5), build_uniform(0.0, 1.0, 4), 0.0)

    def test_wrong_size(self):
        with pytest.raises(ValueError):
            fast_convolve(np.ones(4), build_uniform(0.0, 1.0, 4), 1.0)


class TestLinePlan:
    def test_batched_lines_match_single(self):
        lines = [np.linspace(0, 1, 11), np.sort(np.r_[0.0, np.random.default_rng(3).uniform(0, 2, 8), 2.0]),
                 np.array([0.0, 0.3, 0.5])]
        plan = LinePlan(lines, 6.0)
        u = np.concatenate([np.sin(x) for x in lines])
        batched = plan.convolve(u).I
        single = [fast_convolve(np.sin(x), build_from_nodes(x), 6.0).I for x in lines]
        np.testing.assert_allclose(batched, np.concatenate(single), rtol=1e-13, atol=1e-15)

    def test_three_node_line_quadratic(self):
        x = np.array([0.0, 0.3, 0.5])
        f = lambda y: 1.0 - y + 2.0 * y * y  # noqa: E731
        I = LinePlan([x], 4.0).convolve(f(x)).I
        want = [quad_convolution(f, xi, 0.0, 0.5, 4.0) for xi in x]
        np.testing.assert_allclose(I, want, rtol=1e-12)

    def test_mu(self):
        plan = LinePlan([np.linspace(0, 2, 9)], 3.0)
        assert plan.mu[0] == pytest.approx(math.exp(-6.0))

    def test_short_line_rejected(self):
        with pytest.raises(ValueError):
            LinePlan([np.array([0.0, 1.0])], 1.0)


class TestAssemble:
    def setup_method(self):
        self.g = build_uniform(0.0, 1.0, 10)
        self.alpha = 4.0

    def test_no_homogeneous_part(self):
        conv = fast_convolve(self.g.nodes**2, self.g, self.alpha)
        np.testing.assert_array_equal(assemble(conv, 0.0, 0.0, self.g, self.alpha), conv.I)

    def test_left_profile(self):
        conv = fast_convolve(np.zeros(11), self.g, self.alpha)
        w = assemble(conv, 1.0, 0.0, self.g, self.alpha)
        np.testing.assert_allclose(w, np.exp(-self.alpha * self.g.nodes), rtol=1e-15)

    def test_periodic_constant(self):
        # u = 1 with the periodic closure A = B = I(b)/(1 - mu) = 1 gives w = 2
        conv = fast_convolve(np.ones(11), self.g, self.alpha)
        mu = math.exp(-self.alpha)
        A = conv.I[-1] / (1 - mu)
        assert A == pytest.approx(1.0, rel=1e-13)
        np.testing.assert_allclose(assemble(conv, A, A, self.g, self.alpha), 2.0, rtol=1e-13)

    def test_profiles(self):
        ea, eb = homogeneous_profiles(self.g, self.alpha)
        assert ea[0] == 1.0 and eb[-1] == 1.0
        np.testing.assert_allclose(ea, eb[::-1], rtol=1e-15)
