import math

import numpy as np
import pytest

from moltwave.adi2d import (
    ADIState,
    LineSource,
    bc_for_line,
    build_lines,
    init_state,
    invert_helmholtz_line,
    rms,
    run2d,
    step2d,
)
from moltwave.geometry import Circle, DoubleCircle, QuarterCircle, Rectangle, SlitStrip
from moltwave.kernelweights import SchemeParams

NEUMANN_BOX = Rectangle(0.0, 1.0, 0.0, 1.0, "neumann", "neumann", "neumann", "neumann")


def step_operator(domain, params, orderings=("xy", "yx")):
    """Dense matrix of the averaged inverse, read off one step per unit vector."""
    n, b2 = domain.n_nodes, params.beta**2
    M = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        s = step2d(ADIState(e, np.zeros(n)), domain, params, orderings=orderings)
        M[:, k] = (s.u_curr + (b2 - 2.0) * e) / b2
    return M


class TestBuildLines:
    def test_unit_square(self):
        d = build_lines(Rectangle(0.0, 1.0, 0.0, 1.0), 0.25, 0.25, 4.0)
        assert d.n_nodes == 9
        assert d.x_lines.n_lines == 3 and d.y_lines.n_lines == 3
        np.testing.assert_array_equal(d.x_lines.plan.a, 0.0)
        np.testing.assert_array_equal(d.x_lines.plan.b, 1.0)
        np.testing.assert_allclose(d.x_lines.coords, [0.25, 0.5, 0.75])

    def test_double_circle_centre_line(self):
        d = build_lines(DoubleCircle(0.3, 0.2), 0.05, 0.05, 4.0)
        k = int(np.argmin(np.abs(d.x_lines.coords)))
        assert d.x_lines.plan.a[k] == pytest.approx(-0.5, abs=1e-12)
        assert d.x_lines.plan.b[k] == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("geom", [Circle(0.5), DoubleCircle(0.3, 0.2), QuarterCircle(0.5)])
    def test_endpoints_on_boundary(self, geom):
        d = build_lines(geom, 0.05, 0.05, 4.0)
        fam = d.x_lines
        for y, a, b, klo, khi in zip(fam.coords, fam.plan.a, fam.plan.b, fam.kind_lo, fam.kind_hi):
            for end, kind in ((a, klo), (b, khi)):
                if kind == "dirichlet":
                    assert abs(np.hypot(end, y) - 0.5) < 1e-10 or isinstance(geom, DoubleCircle)
        # every field node is inside the closed domain
        assert np.all(geom.inside(d.x, d.y) | (np.abs(d.x) < 1e-12) | (np.abs(d.y) < 1e-12))

    def test_every_node_in_one_line_of_each_family(self):
        d = build_lines(Circle(0.5), 0.1, 0.1, 4.0)
        for fam in (d.x_lines, d.y_lines):
            used = fam.node_field[fam.node_field >= 0]
            np.testing.assert_array_equal(np.sort(used), np.arange(d.n_nodes))

    def test_quarter_circle_kinds(self):
        d = build_lines(QuarterCircle(0.5), 0.1, 0.1, 4.0)
        assert bc_for_line(d, "x", 0) == ("dirichlet", "neumann")
        assert bc_for_line(d, "y", 0) == ("neumann", "dirichlet")

    def test_bad_spacing(self):
        with pytest.raises(ValueError):
            build_lines(Circle(0.5), 0.0, 0.1, 4.0)

    def test_laplacian_of_quadratic(self):
        d = build_lines(NEUMANN_BOX, 0.1, 0.1, 4.0)
        lap = d.laplacian(d.x**2 + d.y**2)
        np.testing.assert_allclose(lap, 4.0, rtol=1e-10)


class TestInvertHelmholtzLine:
    x = np.linspace(0.0, 1.0, 21)

    @pytest.mark.parametrize("kinds", [("neumann", "neumann"), ("periodic", "periodic")])
    def test_constant(self, kinds):
        w = invert_helmholtz_line(np.full(21, -2.0), self.x, 5.0, kinds)
        np.testing.assert_allclose(w, 2.0, rtol=1e-14)

    def test_dirichlet_against_closed_form(self):
        alpha = 5.0
        w = invert_helmholtz_line(np.full(21, -2.0), self.x, alpha)
        exact = 2.0 * (1.0 - np.cosh(alpha * (self.x - 0.5)) / np.cosh(alpha / 2))
        np.testing.assert_allclose(w, exact, atol=1e-12)

    def test_outflow_rejected(self):
        with pytest.raises(ValueError):
            invert_helmholtz_line(np.zeros(21), self.x, 5.0, ("outflow", "outflow"))


class TestStep:
    def test_zero_stays_zero(self):
        d = build_lines(Circle(0.5), 0.1, 0.1, 20.0)
        p = SchemeParams.from_cfl(1.0, 0.1)
        s = run2d(ADIState(np.zeros(d.n_nodes), np.zeros(d.n_nodes)), d, p, 10)
        assert not s.u_curr.any()

    @pytest.mark.parametrize("cfl", [0.5, 10.0])
    def test_neumann_constant_fixed_point(self, cfl):
        d = build_lines(NEUMANN_BOX, 0.05, 0.05, 1.0)
        p = SchemeParams.from_cfl(cfl, 0.05)
        one = np.ones(d.n_nodes)
        s = run2d(ADIState(one, one.copy()), d, p, 200)
        assert np.max(np.abs(s.u_curr - 1.0)) < 1e-10

    def test_dirichlet_mode_second_order(self):
        errs = []
        for h in (1 / 20, 1 / 40):
            p = SchemeParams.from_cfl(1.0, h)
            d = build_lines(Rectangle(0.0, 1.0, 0.0, 1.0), h, h, p.alpha)
            f = np.sin(math.pi * d.x) * np.sin(math.pi * d.y)
            s = init_state(d, f, np.zeros_like(f), p, lap_f=-2 * math.pi**2 * f)
            s = run2d(s, d, p, int(round(0.5 / p.dt)))
            errs.append(rms(s.u_curr - f * math.cos(math.sqrt(2) * math.pi * s.t)))
        assert errs[1] < 2e-3
        assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.3)

    def test_symmetric_data_stays_symmetric(self):
        d = build_lines(Rectangle(0.0, 1.0, 0.0, 1.0), 0.05, 0.05, 1.0)
        p = SchemeParams.from_cfl(2.0, 0.05)
        f = np.exp(-40 * ((d.x - 0.4) ** 2 + (d.y - 0.4) ** 2))
        s = run2d(init_state(d, f, np.zeros_like(f), p), d, p, 20)
        swap = {(int(i), int(j)): n for n, (i, j) in enumerate(d.ij)}
        perm = np.array([swap[(int(j), int(i))] for i, j in d.ij])
        np.testing.assert_allclose(s.u_curr, s.u_curr[perm], atol=1e-13)

    def test_unknown_ordering(self):
        d = build_lines(Circle(0.5), 0.1, 0.1, 20.0)
        z = np.zeros(d.n_nodes)
        with pytest.raises(ValueError):
            step2d(ADIState(z, z.copy()), d, SchemeParams.from_cfl(1.0, 0.1), orderings=("zz",))

    def test_nan_raises(self):
        d = build_lines(Circle(0.5), 0.1, 0.1, 20.0)
        u = np.zeros(d.n_nodes)
        u[0] = np.nan
        with pytest.raises(FloatingPointError):
            step2d(ADIState(u, u.copy()), d, SchemeParams.from_cfl(1.0, 0.1))

    def test_init_state_shape(self):
        d = build_lines(Circle(0.5), 0.1, 0.1, 20.0)
        with pytest.raises(ValueError):
            init_state(d, np.zeros(3), np.zeros(3), SchemeParams.from_cfl(1.0, 0.1))


class TestStability:
    @pytest.mark.parametrize("geom", [Rectangle(), NEUMANN_BOX])
    @pytest.mark.parametrize("cfl", [0.5, 10.0])
    def test_rectangle_operator_spectrum(self, geom, cfl):
        # on rectangles the two sweep orders commute, so the averaged inverse
        # has real eigenvalues in (0, 1] and the scheme is stable
        p = SchemeParams.from_cfl(cfl, 0.1)
        d = build_lines(geom, 0.1, 0.1, p.alpha)
        ev = np.linalg.eigvals(step_operator(d, p))
        assert np.max(np.abs(ev.imag)) < 1e-12
        assert ev.real.min() > 0.0 and ev.real.max() <= 1.0 + 1e-12

    def test_slit_random_data_bounded(self):
        g = SlitStrip(a=0.2, d=1.0, Ly=1.0)
        h = 0.05
        p = SchemeParams.from_cfl(2.0, h)
        d = build_lines(g, h, h, p.alpha)
        r = np.random.default_rng(1).standard_normal(d.n_nodes) * 1e-6
        s = run2d(ADIState(r.copy(), r.copy()), d, p, 400)
        assert np.max(np.abs(s.u_curr)) < 1e-4

    def test_periodic_seams_identified(self):
        g = SlitStrip(a=0.2, d=1.0, Ly=1.0)
        p = SchemeParams.from_cfl(2.0, 0.05)
        d = build_lines(g, 0.05, 0.05, p.alpha)
        r = np.random.default_rng(2).standard_normal(d.n_nodes)
        s = step2d(ADIState(r, r.copy()), d, p)
        lo, hi = d.x_lines.seam
        assert lo.size > 0
        np.testing.assert_array_equal(s.u_curr[lo], s.u_curr[hi])


class TestLineSource:
    def test_strength_from_derivative(self):
        src = LineSource(0.0, math.sin, math.cos)
        assert src.strength(0.0, 0.1, 2.0) == pytest.approx(1.0)

    def test_strength_by_difference(self):
        src = LineSource(0.0, lambda t: t * t)
        assert src.strength(1.0, 0.1, 1.0) == pytest.approx(4.0)

    def test_quiet_source_leaves_field_zero(self):
        g = SlitStrip(a=0.2, d=1.0, Ly=1.0)
        p = SchemeParams.from_cfl(1.0, 0.05)
        d = build_lines(g, 0.05, 0.05, p.alpha)
        z = np.zeros(d.n_nodes)
        src = LineSource(-0.25, lambda t: 0.0, lambda t: 0.0)
        s = run2d(ADIState(z, z.copy()), d, p, 5, line_sources=[src])
        assert not s.u_curr.any()

    def test_source_launches_wave(self):
        g = SlitStrip(a=0.2, d=1.0, Ly=1.0)
        p = SchemeParams.from_cfl(1.0, 0.05)
        d = build_lines(g, 0.05, 0.05, p.alpha)
        z = np.zeros(d.n_nodes)
        src = LineSource(-0.25, lambda t: math.sin(2 * math.pi * t))
        s = run2d(ADIState(z, z.copy()), d, p, 5, line_sources=[src])
        assert np.max(np.abs(s.u_curr)) > 0.1
