"""Two-level time stepping of the 1D wave equation.

The wave equation ``u_xx - u_tt / c^2 = -S`` is advanced by

    u^{n+1} = -(beta^2 - 2) u^n - u^{n-1}
              + beta^2 / 2 * (I[u^n + S^n / alpha^2] + A e^{-alpha (x - a)} + B e^{-alpha (b - x)})

with ``I`` the fast convolution and ``A``, ``B`` from the boundary closure.
Point sources are convolved exactly with the exponential kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .bc1d import BCSpec, OutflowState, closure_coeffs, ghost_values, ghost_widths
from .conv1d import plan_for_grid
from .kernelweights import SchemeParams
from .mesh1d import Grid1D, stencil_table

__all__ = [
    "WaveState1D",
    "SourceSpec",
    "source_convolution",
    "smooth_source",
    "init_history",
    "step",
    "run",
    "amplification_check",
]


@dataclass(frozen=True)
class WaveState1D:
    """Solution at two consecutive time levels."""

    u_curr: NDArray[np.float64]
    u_prev: NDArray[np.float64]
    t: float = 0.0
    n: int = 0
    outflow: Optional[OutflowState] = None

    def __post_init__(self):
        if np.shape(self.u_curr) != np.shape(self.u_prev):
            raise ValueError("u_curr and u_prev must have the same shape")


@dataclass(frozen=True)
class SourceSpec:
    """Sources entering the right-hand side ``-S``.

    Parameters
    ----------
    points : sequence of (x_i, sigma_i)
        Point sources ``sigma_i(t) delta(x - x_i)``.
    soft : sequence of (x_s, sigma, dsigma)
        Soft sources forcing ``u(x_s, t) = sigma(t)``; ``dsigma`` may be
        ``None``, in which case a centred difference replaces ``sigma'``.
    smooth : callable, optional
        ``S(x, t)`` sampled at the nodes.
    """

    points: Sequence[tuple] = field(default_factory=tuple)
    soft: Sequence[tuple] = field(default_factory=tuple)
    smooth: Optional[Callable] = None

    @property
    def empty(self) -> bool:
        return not self.points and not self.soft and self.smooth is None


NO_SOURCES = SourceSpec()


def _soft_strength(sigma, dsigma, t, dt, c):
    if dsigma is not None:
        deriv = dsigma(t)
    else:
        deriv = (sigma(t + dt) - sigma(t - dt)) / (2.0 * dt)
    return 2.0 / c * deriv


def source_convolution(sources: SourceSpec, t_n: float, grid: Grid1D, params: SchemeParams):
    """``I[S / alpha^2]`` of the point and soft sources at the nodes of ``grid``."""
    x = grid.nodes
    out = np.zeros_like(x)
    alpha = params.alpha
    coef = params.c * params.dt / params.beta
    strengths = [(xs, sig(t_n)) for xs, sig in sources.points]
    strengths += [(xs, _soft_strength(sig, dsig, t_n, params.dt, params.c)) for xs, sig, dsig in sources.soft]
    for xs, s in strengths:
        if not grid.a <= xs <= grid.b:
            raise ValueError(f"source at {xs} lies outside [{grid.a}, {grid.b}]")
        out += coef * s * np.exp(-alpha * np.abs(x - xs))
    return out


def smooth_source(sources: SourceSpec, t: float, x) -> NDArray[np.float64]:
    if sources.smooth is None:
        return np.zeros_like(np.asarray(x, dtype=float))
    return np.asarray(sources.smooth(x, t), dtype=float) * np.ones_like(x)


def second_derivative(u, grid: Grid1D):
    """Node values of ``u''`` from the grid's stencils."""
    off, w, scale = stencil_table(grid.nodes, grid.uniform)
    return np.einsum("ij,ij->i", w, np.asarray(u)[off]) / scale**2


def init_history(f, g, params: SchemeParams, grid: Grid1D, sources: SourceSpec = NO_SOURCES,
                 f_xx=None) -> WaveState1D:
    """Start the two-level recursion from ``u(x, 0) = f`` and ``u_t(x, 0) = g``.

    ``u^{-1}`` is the second-order Taylor expansion backwards in time, using
    ``u_tt = c^2 (f'' + S)``.  ``f_xx`` overrides the stencil estimate of
    ``f''``.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != grid.nodes.shape or g.shape != grid.nodes.shape:
        raise ValueError("initial data must be sampled at the grid nodes")
    fxx = second_derivative(f, grid) if f_xx is None else np.asarray(f_xx, dtype=float)
    dt, c = params.dt, params.c
    utt = c**2 * (fxx + smooth_source(sources, 0.0, grid.nodes))
    u_prev = f - dt * g + 0.5 * dt**2 * utt
    return WaveState1D(u_curr=f.copy(), u_prev=u_prev, t=0.0, n=0, outflow=OutflowState())


def step(state: WaveState1D, grid: Grid1D, params: SchemeParams, bc: BCSpec,
         sources: SourceSpec = NO_SOURCES) -> WaveState1D:
    """Advance ``state`` by one time step."""
    u, u_prev = state.u_curr, state.u_prev
    if u.shape != grid.nodes.shape:
        raise ValueError("state does not match the grid")
    alpha, b2 = params.alpha, params.beta**2
    t_n = state.t
    v = u
    if sources.smooth is not None:
        v = u + smooth_source(sources, t_n, grid.nodes) / alpha**2
    h = grid.widths
    halo = ghost_widths(bc, h[0], h[-1])
    plan = plan_for_grid(grid, alpha, halo)
    ghosts = None
    if halo != (None, None):
        ghosts = [ghost_values(bc, t_n, v[1], v[-2], h[0], h[-1])]
    I = plan.convolve(v, ghosts).I
    if sources.points or sources.soft:
        I = I + source_convolution(sources, t_n, grid, params)
    A, B, out_state = closure_coeffs(
        bc, I[0], I[-1], plan.mu[0], params, t_n + params.dt,
        u_left=(u[0], u_prev[0]), u_right=(u[-1], u_prev[-1]),
        state=state.outflow,
    )
    ea, eb = plan.homogeneous()
    u_next = -(b2 - 2.0) * u - u_prev + 0.5 * b2 * (I + A * ea + B * eb)
    t_next = t_n + params.dt
    if bc.left == "periodic":
        # the two ends are one unknown; averaging removes the seam mode,
        # which the periodic closure cannot see and which would grow linearly
        u_next[0] = u_next[-1] = 0.5 * (u_next[0] + u_next[-1])
    if bc.left == "dirichlet":
        u_next[0] = bc.data("left")(t_next)
    if bc.right == "dirichlet":
        u_next[-1] = bc.data("right")(t_next)
    if not np.all(np.isfinite(u_next)):
        raise FloatingPointError(f"non-finite solution at step {state.n + 1}")
    return WaveState1D(u_curr=u_next, u_prev=u, t=(state.n + 1) * params.dt, n=state.n + 1,
                       outflow=out_state if out_state is not None else state.outflow)


def run(state: WaveState1D, grid: Grid1D, params: SchemeParams, bc: BCSpec, n_steps: int,
        sources: SourceSpec = NO_SOURCES, callback=None) -> WaveState1D:
    """Take ``n_steps`` steps, calling ``callback(state)`` after each."""
    for _ in range(int(n_steps)):
        state = step(state, grid, params, bc, sources)
        if callback is not None:
            callback(state)
    return state


def amplification_check(omega: float, params: SchemeParams):
    """Roots of the von Neumann polynomial for a mode ``exp(i omega x / c)``.

    ``rho^2 - (2 - (beta k)^2 / (beta^2 + k^2)) rho + 1 = 0`` with
    ``k = omega dt``.
    """
    k = omega * params.dt
    beta = params.beta
    mid = 2.0 - (beta * k) ** 2 / (beta**2 + k**2)
    disc = np.sqrt(complex(mid * mid - 4.0))
    return (mid + disc) / 2.0, (mid - disc) / 2.0
