"""Exponential moment integrals and the quadrature weights built from them.

Every weight in the solver is an integral of a low-degree polynomial
against the decaying exponential on the unit interval,

    nu * int_0^1 p(z) exp(-nu z) dz,

evaluated in closed form.  For small ``nu`` the closed forms cancel
catastrophically, so a convergent power series is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvWeights",
    "OutflowWeights",
    "SchemeParams",
    "exp_int",
    "simpson_weights",
    "simpson_weights_array",
    "outflow_weights",
    "SERIES_THRESHOLD",
]

#: Below this value of ``nu`` the Simpson weights are summed as a power series.
SERIES_THRESHOLD = 0.5
_SERIES_TERMS = 22
_MAX_MOMENT = 3


@dataclass(frozen=True)
class SchemeParams:
    """Time discretization parameters.

    ``alpha = beta / (c * dt)`` is the modified Helmholtz parameter.
    """

    beta: float
    c: float
    dt: float

    def __post_init__(self):
        if not (self.c > 0 and self.dt > 0 and self.beta > 0):
            raise ValueError("beta, c and dt must be positive")

    @property
    def alpha(self) -> float:
        return self.beta / (self.c * self.dt)

    @property
    def a_stable(self) -> bool:
        return 0.0 < self.beta <= 2.0

    @classmethod
    def from_cfl(cls, cfl: float, h_max: float, c: float = 1.0, beta: float = 2.0):
        """Build parameters with ``dt = cfl * h_max / c``."""
        if cfl <= 0 or h_max <= 0:
            raise ValueError("cfl and h_max must be positive")
        return cls(beta=beta, c=c, dt=cfl * h_max / c)


@dataclass(frozen=True)
class ConvWeights:
    """Compact Simpson weights for one cell with ``nu = alpha * h``."""

    nu: float
    d: float
    P: float
    Q: float
    R: float


@dataclass(frozen=True)
class OutflowWeights:
    """Weights of the quadratic-in-time outflow recurrence."""

    beta: float
    gamma0: float
    gamma1: float
    gamma2: float
    Gamma0: float
    Gamma1: float
    Gamma2: float

    @property
    def decay(self) -> float:
        return math.exp(-self.beta)


def exp_int(m: int, nu: float) -> float:
    """Return ``E_m(nu) = nu * int_0^1 z^m/m! exp(-nu z) dz`` for m <= 3.

    Uses ``nu**-m * (1 - exp(-nu) * T_m(nu))`` with ``T_m`` the degree-m
    Taylor polynomial of ``exp``; for ``nu < 1`` the equivalent alternating
    series is summed to avoid cancellation.
    """
    if m != int(m) or not 0 <= m <= _MAX_MOMENT:
        raise ValueError(f"moment order must be in 0..{_MAX_MOMENT}, got {m}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    m = int(m)
    if nu < 1.0:
        # nu * sum_k (-nu)^k / (k! m! (m+k+1))
        total = 0.0
        term = 1.0
        for k in range(30):
            total += term / (m + k + 1)
            term *= -nu / (k + 1)
        return nu * total / math.factorial(m)
    taylor = sum(nu**ell / math.factorial(ell) for ell in range(m + 1))
    return (1.0 - math.exp(-nu) * taylor) / nu**m


def _series_pqr(nu):
    # P = nu sum (-nu)^k/k! /((k+1)(k+2)), Q = nu sum (-nu)^k/k! /(k+2),
    # R = -nu sum (-nu)^k/k! /(2(k+2)(k+3))
    nu = np.asarray(nu, dtype=float)
    P = np.zeros_like(nu)
    Q = np.zeros_like(nu)
    R = np.zeros_like(nu)
    term = np.ones_like(nu)
    for k in range(_SERIES_TERMS):
        P += term / ((k + 1) * (k + 2))
        Q += term / (k + 2)
        R -= term / (2 * (k + 2) * (k + 3))
        term = term * (-nu / (k + 1))
    return nu * P, nu * Q, nu * R


def _closed_pqr(nu):
    nu = np.asarray(nu, dtype=float)
    d = np.exp(-nu)
    one_minus_d = -np.expm1(-nu)
    P = 1.0 - one_minus_d / nu
    Q = -d + one_minus_d / nu
    R = one_minus_d / nu**2 - (1.0 + d) / (2.0 * nu)
    return P, Q, R


def simpson_weights_array(nu):
    """Vectorized :func:`simpson_weights`; returns arrays ``(d, P, Q, R)``."""
    nu = np.asarray(nu, dtype=float)
    if np.any(~(nu > 0)):
        raise ValueError("all cell parameters nu must be positive")
    d = np.exp(-nu)
    small = nu < SERIES_THRESHOLD
    P, Q, R = _closed_pqr(np.where(small, 1.0, nu))
    if np.any(small):
        Ps, _, Rs = _series_pqr(nu[small])
        # tie Q to d so that P + Q = 1 - d holds in floating point; constants
        # are then fixed points of the recurrences without a roundoff bias
        P[small], Q[small], R[small] = Ps, (1.0 - d[small]) - Ps, Rs
    return d, P, Q, R


def simpson_weights(nu: float) -> ConvWeights:
    """Compact Simpson weights for a cell of width ``h`` with ``nu = alpha h``.

    ``J = P u_near + Q u_far + R h^2 u''`` integrates the quadratic
    interpolant against ``nu exp(-nu z)`` exactly.
    """
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    d, P, Q, R = simpson_weights_array(np.array([nu]))
    return ConvWeights(nu=float(nu), d=float(d[0]), P=float(P[0]), Q=float(Q[0]), R=float(R[0]))


def outflow_weights(beta: float) -> OutflowWeights:
    """Weights for the outflow time recurrence at one boundary point.

    ``gamma0..gamma2`` multiply ``u^{n+1}, u^n, u^{n-1}`` of the quadratic
    interpolant in time; the ``Gamma`` set results from eliminating
    ``u^{n+1}`` with the update equation.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    e = math.exp(-beta)
    if beta < SERIES_THRESHOLD:
        # gamma0 has the same integrand as R; the others follow from
        # gamma1 = E0 - 2 E2 and gamma2 = E2 + E1/2.
        _, _, R = _series_pqr(np.array([beta]))
        g0 = float(R[0])
        e0, e1, e2 = (exp_int(m, beta) for m in range(3))
        g1 = e0 - 2.0 * e2
        g2 = e2 + 0.5 * e1
    else:
        one_minus_e = -math.expm1(-beta)
        g0 = one_minus_e / beta**2 - (1.0 + e) / (2.0 * beta)
        g1 = -2.0 * one_minus_e / beta**2 + 2.0 * e / beta + 1.0
        g2 = one_minus_e / beta**2 + (1.0 - 3.0 * e) / (2.0 * beta) - e
    G0 = 0.5 * beta**2 * g0
    G1 = g1 - g0 * (beta**2 - 2.0)
    G2 = g2 - g0
    return OutflowWeights(beta=beta, gamma0=g0, gamma1=g1, gamma2=g2, Gamma0=G0, Gamma1=G1, Gamma2=G2)
