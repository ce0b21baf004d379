import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moltwave.harness.checks import closed_pqr_exact, quad_gammas, quad_pqr
from moltwave.kernelweights import (
    SERIES_THRESHOLD,
    SchemeParams,
    exp_int,
    outflow_weights,
    simpson_weights,
    simpson_weights_array,
)
from moltwave.kernelweights import _series_pqr

# Frozen from 40-digit closed forms at nu = 1 and nu = 1e-6.
PQR_NU1 = (0.36787944117144233, 0.26424111765711533, -0.05181916175716348)
PQR_NU1E6 = (4.99999833333375e-07, 4.999996666667917e-07, -8.333329166667916e-08)
# Frozen from adaptive quadrature of the quadratic's Lagrange basis.
GAMMAS = {
    0.2: (-0.015095709644501113, 0.12384518467891152, 0.07251977188760773),
    1.0: (-0.05181916175716348, 0.4715177646857692, 0.21242195589995186),
    2.0: (-0.06766764161830634, 0.7030029248549191, 0.2293294335267746),
    10.0: (-0.04000272399578575, 0.9800099879845477, 0.059947336081475504),
}


class TestSchemeParams:
    def test_alpha(self):
        p = SchemeParams(beta=2.0, c=0.5, dt=0.1)
        assert p.alpha == pytest.approx(40.0)

    def test_from_cfl(self):
        p = SchemeParams.from_cfl(2.0, 0.05, c=2.0)
        assert p.dt == pytest.approx(0.05)
        assert p.beta == 2.0

    @pytest.mark.parametrize("beta, stable", [(0.5, True), (2.0, True), (2.5, False)])
    def test_a_stable(self, beta, stable):
        assert SchemeParams(beta, 1.0, 0.1).a_stable is stable

    @pytest.mark.parametrize("kw", [dict(beta=0.0, c=1.0, dt=1.0), dict(beta=2.0, c=-1.0, dt=1.0),
                                    dict(beta=2.0, c=1.0, dt=0.0)])
    def test_rejects_nonpositive(self, kw):
        with pytest.raises(ValueError):
            SchemeParams(**kw)


class TestExpInt:
    @pytest.mark.parametrize("nu", [0.01, 0.3, 1.0, 4.0, 30.0])
    def test_zeroth_moment(self, nu):
        assert exp_int(0, nu) == pytest.approx(-math.expm1(-nu), rel=1e-14)

    def test_first_moment_at_one(self):
        assert exp_int(1, 1.0) == pytest.approx(1.0 - 2.0 / math.e, rel=1e-14)
        assert exp_int(1, 1.0) == pytest.approx(0.2642411176571154, rel=1e-13)

    def test_second_moment_at_one(self):
        assert exp_int(2, 1.0) == pytest.approx(1.0 - 2.5 / math.e, rel=1e-14)
        assert exp_int(2, 1.0) == pytest.approx(0.08030139707139419, rel=1e-13)

    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    @pytest.mark.parametrize("nu", [0.999999, 1.0])
    def test_branches_join(self, m, nu):
        # the series and closed branches meet at nu = 1
        assert exp_int(m, nu) == pytest.approx(exp_int(m, 1.0), rel=1e-5)

    @pytest.mark.parametrize("m, nu", [(4, 1.0), (-1, 1.0), (1, 0.0), (1, -2.0)])
    def test_errors(self, m, nu):
        with pytest.raises(ValueError):
            exp_int(m, nu)


class TestSimpsonWeights:
    def test_nu_one(self):
        w = simpson_weights(1.0)
        assert w.d == pytest.approx(math.exp(-1.0), rel=1e-15)
        for got, want in zip((w.P, w.Q, w.R), PQR_NU1):
            assert got == pytest.approx(want, rel=1e-14)

    def test_small_nu_series(self):
        w = simpson_weights(1e-6)
        for got, want in zip((w.P, w.Q, w.R), PQR_NU1E6):
            assert got == pytest.approx(want, rel=1e-12)
        assert w.P == pytest.approx(5e-7, rel=1e-6)
        assert w.R == pytest.approx(-1e-6 / 12, rel=1e-5)

    def test_large_nu_limit(self):
        nu = 50.0
        w = simpson_weights(nu)
        assert w.d == pytest.approx(1.9287498479639178e-22, rel=1e-12)
        assert w.P == pytest.approx(1 - 1 / nu, rel=1e-15)
        assert w.Q == pytest.approx(1 / nu, rel=1e-12)
        assert w.R == pytest.approx(1 / nu**2 - 1 / (2 * nu), rel=1e-12)

    @pytest.mark.parametrize("nu", [0.2, 1.0, 2.0, 10.0, 50.0])
    def test_against_quadrature(self, nu):
        w = simpson_weights(nu)
        np.testing.assert_allclose((w.P, w.Q, w.R), quad_pqr(nu), rtol=1e-12)

    @pytest.mark.parametrize("nu", [1e-3, 0.05, 0.3, SERIES_THRESHOLD * 0.999])
    def test_series_matches_exact_closed_form(self, nu):
        P, Q, R = _series_pqr(np.array([nu]))
        np.testing.assert_allclose([P[0], Q[0], R[0]], closed_pqr_exact(nu), rtol=1e-13)

    @given(st.floats(min_value=1e-8, max_value=200.0))
    @settings(max_examples=200, deadline=None)
    def test_constant_exactness(self, nu):
        # P + Q integrates the constant 1 against nu exp(-nu z)
        w = simpson_weights(nu)
        assert w.P + w.Q == pytest.approx(-math.expm1(-nu), rel=1e-13)

    def test_array_matches_scalar(self):
        nu = np.array([1e-4, 0.4, 0.6, 3.0])
        d, P, Q, R = simpson_weights_array(nu)
        for k, v in enumerate(nu):
            w = simpson_weights(float(v))
            assert (d[k], P[k], Q[k], R[k]) == (w.d, w.P, w.Q, w.R)

    @pytest.mark.parametrize("nu", [0.0, -1.0, float("nan")])
    def test_rejects_bad_nu(self, nu):
        with pytest.raises(ValueError):
            simpson_weights(nu)


class TestOutflowWeights:
    @pytest.mark.parametrize("beta", sorted(GAMMAS))
    def test_frozen_gammas(self, beta):
        ow = outflow_weights(beta)
        np.testing.assert_allclose((ow.gamma0, ow.gamma1, ow.gamma2), GAMMAS[beta], rtol=1e-13)

    @pytest.mark.parametrize("beta", [0.05, 0.2, 1.0, 2.0, 10.0, 50.0])
    def test_against_quadrature(self, beta):
        ow = outflow_weights(beta)
        np.testing.assert_allclose((ow.gamma0, ow.gamma1, ow.gamma2), quad_gammas(beta), rtol=1e-12)

    @given(st.floats(min_value=1e-4, max_value=100.0))
    @settings(max_examples=100, deadline=None)
    def test_sum_rule(self, beta):
        ow = outflow_weights(beta)
        assert ow.gamma0 + ow.gamma1 + ow.gamma2 == pytest.approx(-math.expm1(-beta), rel=1e-12, abs=1e-15)

    def test_eliminated_weights(self):
        ow = outflow_weights(2.0)
        assert ow.Gamma2 == ow.gamma2 - ow.gamma0
        assert ow.Gamma0 == pytest.approx(2.0 * ow.gamma0)
        assert ow.Gamma1 == pytest.approx(ow.gamma1 - 2.0 * ow.gamma0)
        assert ow.decay == pytest.approx(math.exp(-2.0))

    def test_rejects_bad_beta(self):
        with pytest.raises(ValueError):
            outflow_weights(0.0)
