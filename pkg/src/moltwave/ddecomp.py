"""Domain decomposition of the 1D convolution.

The interval is split into subdomains ``[a_m, b_m]`` sharing their interface
nodes.  Each step has three phases:

1. every subdomain convolves its own data (independently);
2. a coordinator combines the subdomain endpoint integrals with exponential
   recurrences on the coarse mesh of interfaces, applies the global boundary
   closure and returns one pair ``(A_m, B_m)`` per subdomain;
3. every subdomain assembles its local solution and updates (independently).

Only scalars travel between phases.  With ``stencil="halo"`` each subdomain
also receives the node values adjacent to its interfaces, so its
second-derivative stencils match the undivided grid and the result agrees
with the monolithic solve to roundoff.  With ``stencil="local"`` each
subdomain uses one-sided stencils at its ends and the decomposition
introduces a small, high-order interface error.
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .bc1d import BCSpec, OutflowState, closure_coeffs, ghost_values, ghost_widths
from .conv1d import ConvResult, LinePlan
from .kernelweights import SchemeParams
from .mesh1d import Grid1D, build_from_nodes
from .stepper1d import NO_SOURCES, SourceSpec, second_derivative, smooth_source, source_convolution

__all__ = [
    "Subdomain",
    "CoarseMesh",
    "DDState",
    "split_grid",
    "make_subdomains",
    "local_sweep",
    "coarse_assemble",
    "dd_init",
    "dd_step",
    "dd_run",
    "gather",
]

STENCIL_MODES = ("halo", "local")


@dataclass
class Subdomain:
    """One piece ``[a_m, b_m]`` of the decomposed interval and its field."""

    index: int
    grid: Grid1D
    u_curr: NDArray[np.float64]
    u_prev: NDArray[np.float64]
    plan: Optional[LinePlan] = field(default=None, repr=False)
    JL_out: float = 0.0
    JR_out: float = 0.0
    A: float = 0.0
    B: float = 0.0

    @property
    def a(self) -> float:
        return self.grid.a

    @property
    def b(self) -> float:
        return self.grid.b


@dataclass(frozen=True)
class CoarseMesh:
    """Interface positions ``X_0 < ... < X_M`` and coarse cell parameters."""

    X: NDArray[np.float64]
    alpha: float

    @property
    def nu(self) -> NDArray[np.float64]:
        return self.alpha * np.diff(self.X)

    @property
    def M(self) -> int:
        return self.X.size - 1


@dataclass
class DDState:
    subdomains: List[Subdomain]
    t: float = 0.0
    n: int = 0
    outflow: OutflowState = field(default_factory=OutflowState)
    stencil: str = "halo"
    ends: tuple = (None, None)


def split_grid(grid: Grid1D, cuts: Sequence[int]) -> List[Grid1D]:
    """Split ``grid`` at node indices ``cuts``; interface nodes are shared."""
    idx = [0, *sorted(int(c) for c in cuts), grid.n_cells]
    pieces = []
    for lo, hi in zip(idx[:-1], idx[1:]):
        if hi - lo < 3:
            raise ValueError("every subdomain needs at least 3 cells")
        pieces.append(Grid1D(grid.nodes[lo:hi + 1], uniform=grid.uniform))
    return pieces


def _build_plan(grids: Sequence[Grid1D], m: int, alpha: float, stencil: str, ends=(None, None)) -> LinePlan:
    # ends: ghost-cell widths beyond the outer boundary (see bc1d.ghost_widths)
    g = grids[m]
    hl = ends[0] if m == 0 else None
    hr = ends[1] if m == len(grids) - 1 else None
    if stencil == "halo":
        if m > 0:
            hl = float(grids[m - 1].widths[-1])
        if m < len(grids) - 1:
            hr = float(grids[m + 1].widths[0])
    return LinePlan([g.nodes], alpha, uniform=[g.uniform], halos=[(hl, hr)])


def make_subdomains(grids: Sequence[Grid1D], alpha: float, stencil: str = "halo",
                    ends=(None, None)) -> List[Subdomain]:
    """Empty subdomains for consecutive grids with matching interfaces.

    ``ends`` holds the ghost-cell widths beyond the outer boundary.
    """
    if stencil not in STENCIL_MODES:
        raise ValueError(f"stencil must be one of {STENCIL_MODES}, got {stencil!r}")
    for left, right in zip(grids[:-1], grids[1:]):
        if not np.isclose(left.b, right.a, rtol=0, atol=1e-14 * max(1.0, abs(left.b))):
            raise ValueError("adjacent subdomains must share their interface")
    subs = []
    for m, g in enumerate(grids):
        zero = np.zeros_like(g.nodes)
        subs.append(Subdomain(m, g, zero, zero.copy(), _build_plan(grids, m, alpha, stencil, ends)))
    return subs


def coarse_mesh(subs: Sequence[Subdomain], alpha: float) -> CoarseMesh:
    X = np.array([s.a for s in subs] + [subs[-1].b])
    return CoarseMesh(X=X, alpha=alpha)


def _halo_values(values: Sequence[NDArray[np.float64]], m: int, stencil: str, outer=(None, None)):
    # neighbour nodes next to the shared interfaces, ghosts at the outer ends
    last = len(values) - 1
    left = outer[0] if m == 0 else None
    right = outer[1] if m == last else None
    if stencil == "halo":
        if m > 0:
            left = values[m - 1][-2]
        if m < last:
            right = values[m + 1][1]
    if left is None and right is None:
        return None
    return [(left, right)]


def local_sweep(sub: Subdomain, v, halo_values=None):
    """Convolve ``v`` over one subdomain.

    Returns ``(JL_out, JR_out, conv)``: the local integral at ``b_m`` (the
    left-going contribution to the next subdomain) and at ``a_m``.
    """
    conv = sub.plan.convolve(v, halo_values)
    sub.JL_out = float(conv.I[-1])
    sub.JR_out = float(conv.I[0])
    return sub.JL_out, sub.JR_out, conv


def coarse_recurrences(coarse: CoarseMesh, JL_out, JR_out):
    """Coarse characteristics ``IL_m``, ``IR_m`` at every interface ``X_m``."""
    M = coarse.M
    if len(JL_out) != M or len(JR_out) != M:
        raise ValueError(f"expected {M} scalars from each direction")
    decay = np.exp(-coarse.nu)
    IL = np.zeros(M + 1)
    IR = np.zeros(M + 1)
    for m in range(1, M + 1):
        IL[m] = decay[m - 1] * IL[m - 1] + JL_out[m - 1]
    for m in range(M - 1, -1, -1):
        IR[m] = decay[m] * IR[m + 1] + JR_out[m]
    return IL, IR


def coarse_assemble(coarse: CoarseMesh, JL_out, JR_out, A: float, B: float):
    """Per-subdomain ``(A_m, B_m)`` given the global closure ``(A, B)``.

    ``A_m`` collects everything left of ``a_m`` and ``B_m`` everything right
    of ``b_m``, each as the amplitude of the matching decaying exponential.
    """
    IL, IR = coarse_recurrences(coarse, JL_out, JR_out)
    X, alpha = coarse.X, coarse.alpha
    Am = IL[:-1] + A * np.exp(-alpha * (X[:-1] - X[0]))
    Bm = IR[1:] + B * np.exp(-alpha * (X[-1] - X[1:]))
    return Am, Bm


def dd_init(grids: Sequence[Grid1D], f, g, params: SchemeParams, stencil: str = "halo",
            sources: SourceSpec = NO_SOURCES, f_xx=None) -> DDState:
    """Start a decomposed run from callables ``f(x)``, ``g(x)`` (and ``f_xx``)."""
    subs = make_subdomains(grids, params.alpha, stencil)
    whole = build_from_nodes(np.concatenate([s.grid.nodes[:-1] for s in subs] + [subs[-1].grid.nodes[-1:]]))
    x = whole.nodes
    fx = f(x)
    fxx = second_derivative(fx, whole) if f_xx is None else f_xx(x)
    dt, c = params.dt, params.c
    prev = fx - dt * g(x) + 0.5 * dt**2 * c**2 * (fxx + smooth_source(sources, 0.0, x))
    start = 0
    for s in subs:
        n = s.grid.nodes.size
        s.u_curr = fx[start:start + n].copy()
        s.u_prev = prev[start:start + n].copy()
        start += n - 1
    return DDState(subdomains=subs, stencil=stencil)


def _map(executor: Optional[Executor], fn, items):
    if executor is None:
        return [fn(i) for i in items]
    return list(executor.map(fn, items))


def dd_step(state: DDState, params: SchemeParams, bc: BCSpec, sources: SourceSpec = NO_SOURCES,
            executor: Optional[Executor] = None) -> DDState:
    """Advance every subdomain one step."""
    subs = state.subdomains
    alpha, b2 = params.alpha, params.beta**2
    t_n = state.t
    t_next = t_n + params.dt
    has_points = bool(sources.points or sources.soft)

    h_first, h_last = subs[0].grid.widths[0], subs[-1].grid.widths[-1]
    ends = ghost_widths(bc, h_first, h_last)
    if ends != state.ends:
        grids = [s.grid for s in subs]
        for m in {0, len(subs) - 1}:
            subs[m].plan = _build_plan(grids, m, alpha, state.stencil, ends)
        state.ends = ends

    # phase 1: local sweeps
    vs = [s.u_curr if sources.smooth is None
          else s.u_curr + smooth_source(sources, t_n, s.grid.nodes) / alpha**2 for s in subs]
    outer = (None, None)
    if ends != (None, None):
        outer = ghost_values(bc, t_n, vs[0][1], vs[-1][-2], h_first, h_last)

    def sweep(m):
        return local_sweep(subs[m], vs[m], _halo_values(vs, m, state.stencil, outer))[2]

    convs: List[ConvResult] = _map(executor, sweep, range(len(subs)))

    # phase 2: coarse solve on the coordinator
    coarse = coarse_mesh(subs, alpha)
    JL = [s.JL_out for s in subs]
    JR = [s.JR_out for s in subs]
    IL, IR = coarse_recurrences(coarse, JL, JR)
    I_a, I_b = IR[0], IL[-1]
    point_I = None
    if has_points:
        point_I = [source_convolution(sources, t_n, s.grid, params) for s in subs]
        I_a += point_I[0][0]
        I_b += point_I[-1][-1]
    first, last = subs[0], subs[-1]
    mu = np.exp(-alpha * (coarse.X[-1] - coarse.X[0]))
    A, B, out_state = closure_coeffs(
        bc, I_a, I_b, mu, params, t_next,
        u_left=(first.u_curr[0], first.u_prev[0]), u_right=(last.u_curr[-1], last.u_prev[-1]),
        state=state.outflow,
    )
    Am, Bm = coarse_assemble(coarse, JL, JR, A, B)
    for s, a_m, b_m in zip(subs, Am, Bm):
        s.A, s.B = float(a_m), float(b_m)

    # phase 3: local updates
    def update(m):
        s = subs[m]
        ea, eb = s.plan.homogeneous()
        I = convs[m].I if point_I is None else convs[m].I + point_I[m]
        w = I + s.A * ea + s.B * eb
        return -(b2 - 2.0) * s.u_curr - s.u_prev + 0.5 * b2 * w

    new = _map(executor, update, range(len(subs)))
    for s, u_next in zip(subs, new):
        s.u_prev, s.u_curr = s.u_curr, u_next
    for left, right in zip(subs[:-1], subs[1:]):
        shared = 0.5 * (left.u_curr[-1] + right.u_curr[0])
        left.u_curr[-1] = right.u_curr[0] = shared
    if bc.left == "periodic":
        first.u_curr[0] = last.u_curr[-1] = 0.5 * (first.u_curr[0] + last.u_curr[-1])
    if bc.left == "dirichlet":
        first.u_curr[0] = bc.data("left")(t_next)
    if bc.right == "dirichlet":
        last.u_curr[-1] = bc.data("right")(t_next)
    if not all(np.all(np.isfinite(s.u_curr)) for s in subs):
        raise FloatingPointError(f"non-finite solution at step {state.n + 1}")
    state.n += 1
    state.t = state.n * params.dt
    if out_state is not None:
        state.outflow = out_state
    return state


def dd_run(state: DDState, params: SchemeParams, bc: BCSpec, n_steps: int,
           sources: SourceSpec = NO_SOURCES, executor: Optional[Executor] = None, callback=None) -> DDState:
    for _ in range(int(n_steps)):
        state = dd_step(state, params, bc, sources, executor)
        if callback is not None:
            callback(state)
    return state


def gather(state: DDState):
    """Global node positions and values with interface duplicates removed."""
    subs = state.subdomains
    x = np.concatenate([s.grid.nodes[:-1] for s in subs] + [subs[-1].grid.nodes[-1:]])
    u = np.concatenate([s.u_curr[:-1] for s in subs] + [subs[-1].u_curr[-1:]])
    return x, u
