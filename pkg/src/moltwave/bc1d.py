"""Homogeneous-solution coefficients closing the 1D integral solution.

The update ``w = I + A exp(-alpha (x - a)) + B exp(-alpha (b - x))`` leaves
two scalars free.  Each boundary condition contributes one linear equation
per end; the closed forms below solve the resulting 2x2 systems.  Mixed
ends go through :func:`end_row` and :func:`solve_rows`.

All functions accept NumPy arrays in place of scalars so that many lines
can be closed at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .kernelweights import OutflowWeights, SchemeParams, outflow_weights

__all__ = [
    "BC_KINDS",
    "BCSpec",
    "OutflowState",
    "dirichlet_coeffs",
    "neumann_coeffs",
    "periodic_coeffs",
    "outflow_coeffs",
    "end_row",
    "solve_rows",
    "closure_coeffs",
    "ghost_widths",
    "ghost_values",
]

BC_KINDS = ("dirichlet", "neumann", "periodic", "outflow", "transmission")

TimeFunction = Callable[[float], float]


def _zero(t):
    return 0.0


@dataclass(frozen=True)
class BCSpec:
    """Boundary conditions at the two ends of a line.

    ``left_data``/``right_data`` give the Dirichlet value ``U(t)`` or the
    Neumann derivative ``V(t)``; they default to zero.  Transmission ends
    carry the coefficient itself in ``A``/``B``.
    """

    left: str
    right: str
    left_data: Optional[TimeFunction] = None
    right_data: Optional[TimeFunction] = None
    A: Optional[float] = None
    B: Optional[float] = None

    def __post_init__(self):
        for kind in (self.left, self.right):
            if kind not in BC_KINDS:
                raise ValueError(f"unknown boundary kind {kind!r}")
        if (self.left == "periodic") != (self.right == "periodic"):
            raise ValueError("periodic conditions must be imposed at both ends")
        if self.left == "transmission" and not np.isfinite(self.A if self.A is not None else np.nan):
            raise ValueError("transmission end needs a finite A")
        if self.right == "transmission" and not np.isfinite(self.B if self.B is not None else np.nan):
            raise ValueError("transmission end needs a finite B")

    @property
    def kind(self) -> str:
        return self.left if self.left == self.right else "mixed"

    @classmethod
    def uniform(cls, kind: str, left_data=None, right_data=None) -> "BCSpec":
        return cls(kind, kind, left_data, right_data)

    def data(self, side: str) -> TimeFunction:
        f = self.left_data if side == "left" else self.right_data
        return _zero if f is None else f

    def levels(self, side: str, t_next: float, dt: float):
        """Boundary data at ``(t^{n+1}, t^n, t^{n-1})``."""
        f = self.data(side)
        return f(t_next), f(t_next - dt), f(t_next - 2.0 * dt)


@dataclass(frozen=True)
class OutflowState:
    """History coefficients ``A^{n-1}``, ``B^{n-1}`` of the outflow recurrence."""

    A_prev: float = 0.0
    B_prev: float = 0.0


def _check_mu(mu):
    mu = np.asarray(mu, dtype=float)
    if np.any(~((mu >= 0) & (mu < 1))):
        raise ValueError("mu = exp(-alpha (b - a)) must lie in [0, 1)")
    return mu


def _three(levels):
    nxt, cur, prv = levels
    return nxt, cur, prv


def dirichlet_coeffs(I_a, I_b, U_left, U_right, params: SchemeParams, mu):
    """Coefficients enforcing ``u(a) = U_L(t)``, ``u(b) = U_R(t)``.

    ``U_left`` and ``U_right`` hold the data at ``(t^{n+1}, t^n, t^{n-1})``.
    """
    mu = _check_mu(mu)
    b2 = params.beta**2
    nl, cl, pl = _three(U_left)
    nr, cr, pr = _three(U_right)
    wa = I_a - (2.0 / b2) * (nl + (b2 - 2.0) * cl + pl)
    wb = I_b - (2.0 / b2) * (nr + (b2 - 2.0) * cr + pr)
    den = 1.0 - mu**2
    return -(wa - mu * wb) / den, -(wb - mu * wa) / den


def neumann_coeffs(I_a, I_b, V_left, V_right, params: SchemeParams, mu):
    """Coefficients enforcing ``u_x(a) = V_L(t)``, ``u_x(b) = V_R(t)``."""
    mu = _check_mu(mu)
    b2 = params.beta**2
    scale = 2.0 / (params.alpha * b2)
    nl, cl, pl = _three(V_left)
    nr, cr, pr = _three(V_right)
    wa = I_a - scale * (nl + (b2 - 2.0) * cl + pl)
    wb = I_b + scale * (nr + (b2 - 2.0) * cr + pr)
    den = 1.0 - mu**2
    return (wa + mu * wb) / den, (wb + mu * wa) / den


def periodic_coeffs(I_a, I_b, mu):
    """Coefficients making ``w`` and ``w'`` agree at both ends."""
    mu = _check_mu(mu)
    return I_b / (1.0 - mu), I_a / (1.0 - mu)


def _outflow_rhs(I_end, u_cur, u_prev, hist, ow: OutflowWeights):
    return ow.decay * hist + ow.Gamma0 * I_end + ow.Gamma1 * u_cur + ow.Gamma2 * u_prev


def outflow_coeffs(I_a, I_b, u_a, u_b, state: OutflowState, ow: OutflowWeights, mu):
    """Non-reflecting closure at both ends.

    ``u_a`` and ``u_b`` are ``(u^n, u^{n-1})`` at the two ends.  Returns
    ``(A, B, new_state)``.
    """
    mu = _check_mu(mu)
    g0 = ow.Gamma0
    den = (1.0 - g0) ** 2 - (mu * g0) ** 2
    if np.any(np.abs(den) < 1e-14):
        raise ValueError("outflow closure is singular for this beta and domain")
    wa = _outflow_rhs(I_a, u_a[0], u_a[1], state.A_prev, ow)
    wb = _outflow_rhs(I_b, u_b[0], u_b[1], state.B_prev, ow)
    A = ((1.0 - g0) * wa + mu * g0 * wb) / den
    B = ((1.0 - g0) * wb + mu * g0 * wa) / den
    return A, B, OutflowState(A, B)


def end_row(kind: str, side: str, I_end, mu, params: SchemeParams, *, levels=None,
            u_hist=None, hist=0.0, ow: Optional[OutflowWeights] = None, value=None):
    """One row ``(cA, cB, rhs)`` of the 2x2 closure for a single end.

    ``levels`` are Dirichlet/Neumann data at ``(t^{n+1}, t^n, t^{n-1})``;
    ``u_hist`` is ``(u^n, u^{n-1})`` at the end and ``hist`` the previous
    outflow coefficient; ``value`` is a prescribed transmission coefficient.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    left = side == "left"
    b2 = params.beta**2
    one = np.ones_like(np.asarray(mu, dtype=float))
    if kind == "dirichlet":
        nxt, cur, prv = (0.0, 0.0, 0.0) if levels is None else levels
        w = I_end - (2.0 / b2) * (nxt + (b2 - 2.0) * cur + prv)
        return (one, mu, -w) if left else (mu, one, -w)
    if kind == "neumann":
        nxt, cur, prv = (0.0, 0.0, 0.0) if levels is None else levels
        corr = (2.0 / (params.alpha * b2)) * (nxt + (b2 - 2.0) * cur + prv)
        return (one, -mu, I_end - corr) if left else (-mu, one, I_end + corr)
    if kind == "outflow":
        if ow is None or u_hist is None:
            raise ValueError("outflow rows need weights and the boundary history")
        w = _outflow_rhs(I_end, u_hist[0], u_hist[1], hist, ow)
        g0 = ow.Gamma0
        return ((1.0 - g0) * one, -g0 * mu, w) if left else (-g0 * mu, (1.0 - g0) * one, w)
    if kind == "transmission":
        return (one, 0.0 * one, value) if left else (0.0 * one, one, value)
    raise ValueError(f"no single-end row for boundary kind {kind!r}")


def solve_rows(row_a, row_b):
    """Solve the 2x2 system assembled from two end rows."""
    a11, a12, r1 = row_a
    a21, a22, r2 = row_b
    det = a11 * a22 - a12 * a21
    if np.any(np.abs(det) < 1e-300):
        raise ValueError("boundary closure is singular")
    return (r1 * a22 - a12 * r2) / det, (a11 * r2 - r1 * a21) / det


def closure_coeffs(bc: BCSpec, I_a, I_b, mu, params: SchemeParams, t_next: float, *,
                   u_left=None, u_right=None, state: Optional[OutflowState] = None):
    """``(A, B, new_state)`` for the conditions in ``bc``.

    ``u_left``/``u_right`` are ``(u^n, u^{n-1})`` at the ends and are only
    needed for outflow.  ``new_state`` is ``None`` unless an end is outflow.
    """
    dt = params.dt
    state = OutflowState() if state is None else state
    ow = outflow_weights(params.beta) if "outflow" in (bc.left, bc.right) else None
    kind = bc.kind
    if kind == "dirichlet":
        A, B = dirichlet_coeffs(I_a, I_b, bc.levels("left", t_next, dt), bc.levels("right", t_next, dt), params, mu)
        return A, B, None
    if kind == "neumann":
        A, B = neumann_coeffs(I_a, I_b, bc.levels("left", t_next, dt), bc.levels("right", t_next, dt), params, mu)
        return A, B, None
    if kind == "periodic":
        A, B = periodic_coeffs(I_a, I_b, mu)
        return A, B, None
    if kind == "outflow":
        return outflow_coeffs(I_a, I_b, u_left, u_right, state, ow, mu)
    _check_mu(mu)
    rows = []
    for side, kind_end, I_end, u_end, hist, value in (
        ("left", bc.left, I_a, u_left, state.A_prev, bc.A),
        ("right", bc.right, I_b, u_right, state.B_prev, bc.B),
    ):
        levels = bc.levels(side, t_next, dt) if kind_end in ("dirichlet", "neumann") else None
        rows.append(end_row(kind_end, side, I_end, mu, params, levels=levels, u_hist=u_end,
                            hist=hist, ow=ow, value=value))
    A, B = solve_rows(*rows)
    new_state = OutflowState(A, B) if ow is not None else None
    return A, B, new_state


def ghost_widths(bc: BCSpec, h_first: float, h_last: float):
    """Widths of the ghost cells beyond each end, or ``None`` for no ghost.

    Periodic ends wrap around and Neumann ends mirror the first interior
    cell, so the end nodes get centred second-derivative stencils.  Other
    ends use one-sided stencils.
    """
    if bc.left == "periodic":
        return float(h_last), float(h_first)
    return (float(h_first) if bc.left == "neumann" else None,
            float(h_last) if bc.right == "neumann" else None)


def ghost_values(bc: BCSpec, t: float, u_second, u_penult, h_first: float, h_last: float):
    """Ghost values matching :func:`ghost_widths`.

    ``u_second`` and ``u_penult`` are the values at the second and the
    second-to-last node.  Neumann ghosts reflect them with the slope data at
    time ``t``.
    """
    if bc.left == "periodic":
        return u_penult, u_second
    left = u_second - 2.0 * h_first * bc.data("left")(t) if bc.left == "neumann" else None
    right = u_penult + 2.0 * h_last * bc.data("right")(t) if bc.right == "neumann" else None
    return left, right
