"""Experiment drivers: single runs, refinement studies and error comparisons."""

from __future__ import annotations

import math
import time
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..adi2d import ADIState, Domain2D, LineSource, build_lines, init_state, step2d
from ..bc1d import BCSpec
from ..ddecomp import dd_init, dd_step, gather
from ..geometry import Circle, DoubleCircle, Geometry, QuarterCircle, Rectangle, SlitStrip
from ..kernelweights import SchemeParams
from ..mesh1d import Grid1D, build_chebyshev, build_from_nodes, build_uniform
from ..stepper1d import init_history, step
from . import reference as ref
from .config import ConfigError, RunConfig
from .norms import l2_error
from .output import RefinementReport

__all__ = [
    "TimeGrid",
    "DecompResult",
    "Run2D",
    "mixed_layout",
    "grids_1d",
    "time_grid",
    "config_time_grid",
    "simulate_1d",
    "decomp_compare",
    "make_domain",
    "simulate_2d",
    "boundary_points",
    "error_2d",
    "refine",
    "slit_energy",
]

_WINDOW_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    params: SchemeParams
    n_steps: int

    @property
    def dt(self) -> float:
        return self.params.dt


def time_grid(cfg: RunConfig, spacing: float) -> TimeGrid:
    """``dt = cfl * spacing / c``, shortened so that ``n dt = t_final`` when ``fit_dt``."""
    dt = cfg.cfl * spacing / cfg.c
    if cfg.fit_dt:
        n = max(1, int(round(cfg.t_final / dt)))
        dt = cfg.t_final / n
    else:
        n = int(math.floor(cfg.t_final / dt + 1e-9))
    return TimeGrid(SchemeParams(beta=cfg.beta, c=cfg.c, dt=dt), n)


def _in_window(cfg: RunConfig, t: float) -> bool:
    hi = cfg.t_final if cfg.error_t_max is None else cfg.error_t_max
    return cfg.error_t_min - _WINDOW_TOL <= t <= hi + _WINDOW_TOL


# ---------------------------------------------------------------- 1D


def mixed_layout(a: float, b: float, N: int) -> List[Grid1D]:
    """Four quarters of ``[a, b]``: uniform ``N``, half-cosine ``N``,
    uniform ``2N`` and full-cosine ``2N`` cells (``6N + 1`` nodes)."""
    q = (b - a) / 4.0
    e = [a, a + q, a + 2 * q, a + 3 * q, b]
    return [
        build_uniform(e[0], e[1], N),
        build_chebyshev(e[1], e[2], N, "half"),
        build_uniform(e[2], e[3], 2 * N),
        build_chebyshev(e[3], e[4], 2 * N, "full"),
    ]


def _split(grid: Grid1D, m: int) -> List[Grid1D]:
    idx = np.linspace(0, grid.n_cells, m + 1).round().astype(int)
    return [Grid1D(grid.nodes[lo:hi + 1], uniform=grid.uniform) for lo, hi in zip(idx[:-1], idx[1:])]


def grids_1d(cfg: RunConfig, N: int) -> List[Grid1D]:
    """Subdomain grids for resolution ``N`` (a single grid when undivided)."""
    try:
        if cfg.layout == "mixed":
            return mixed_layout(cfg.a, cfg.b, N)
        whole = build_uniform(cfg.a, cfg.b, N) if cfg.layout == "uniform" else build_chebyshev(cfg.a, cfg.b, N)
        return [whole] if cfg.subdomains == 1 else _split(whole, cfg.subdomains)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _merge(grids: Sequence[Grid1D]) -> Grid1D:
    if len(grids) == 1:
        return grids[0]
    nodes = np.concatenate([g.nodes[:-1] for g in grids] + [grids[-1].nodes[-1:]])
    return Grid1D(nodes, uniform=all(g.uniform for g in grids) and np.allclose(np.diff(nodes), nodes[1] - nodes[0]))


def _spacing_1d(cfg: RunConfig, grids: Sequence[Grid1D], N: int) -> float:
    if cfg.cfl_spacing == "nominal":
        # the first subdomain's cell width
        return (cfg.b - cfg.a) / (4 * N) if cfg.layout == "mixed" else (cfg.b - cfg.a) / N
    widths = np.concatenate([g.widths for g in grids])
    return float(widths.max() if cfg.cfl_spacing == "max" else widths.min())


def _initial_1d(cfg: RunConfig):
    if cfg.initial == "gaussian_1d":
        return (lambda x: ref.gaussian_pulse(x, cfg.a, cfg.b),
                lambda x: np.zeros_like(x),
                lambda x: ref.gaussian_pulse_xx(x, cfg.a, cfg.b))
    if cfg.initial == "zero":
        z = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
        return z, z, z
    raise ConfigError(f"initial condition {cfg.initial!r} is not available in 1D")


def _bc_1d(cfg: RunConfig) -> BCSpec:
    return BCSpec(cfg.bc_left, cfg.bc_right)


def simulate_1d(cfg: RunConfig, N: Optional[int] = None,
                on_step: Optional[Callable[[float, np.ndarray, np.ndarray], None]] = None,
                executor: Optional[Executor] = None):
    """Run the 1D problem of ``cfg``; returns ``(x, u, TimeGrid)`` at ``t_final``.

    ``on_step(t, x, u)`` is called at ``t = 0`` and after every step.
    """
    N = cfg.N if N is None else N
    grids = grids_1d(cfg, N)
    tg = time_grid(cfg, _spacing_1d(cfg, grids, N))
    p = tg.params
    f, g, fxx = _initial_1d(cfg)
    bc = _bc_1d(cfg)
    if len(grids) > 1:
        state = dd_init(grids, f, g, p, stencil=cfg.stencil, f_xx=fxx)
        x, u = gather(state)
        if on_step:
            on_step(0.0, x, u)
        for _ in range(tg.n_steps):
            state = dd_step(state, p, bc, executor=executor)
            x, u = gather(state)
            if on_step:
                on_step(state.t, x, u)
        return x, u, tg
    grid = grids[0]
    x = grid.nodes
    state = init_history(f(x), g(x), p, grid, f_xx=fxx(x))
    if on_step:
        on_step(0.0, x, state.u_curr)
    for _ in range(tg.n_steps):
        state = step(state, grid, p, bc)
        if on_step:
            on_step(state.t, x, state.u_curr)
    return x, state.u_curr, tg


@dataclass(frozen=True)
class DecompResult:
    """Maximum-in-time weighted L2 errors of the three-solution study.

    ``dd``: decomposed versus undivided run, both with outflow ends.
    ``outflow``: undivided outflow run versus the extended-domain run on the
    original interval.  ``total``: extended-domain run versus the exact
    solution.  ``dd_total``: decomposed run versus the exact solution.
    """

    N: int
    dd: float
    outflow: float
    total: float
    dd_total: float
    n_steps: int
    dt: float

    def column(self, name: str) -> float:
        return getattr(self, name)


def _extended_grid(x: np.ndarray, h: float, width: float) -> Tuple[Grid1D, slice]:
    k = int(math.ceil(width / h - 1e-9))
    left = x[0] - h * np.arange(k, 0, -1)
    right = x[-1] + h * np.arange(1, k + 1)
    return build_from_nodes(np.concatenate([left, x, right])), slice(k, k + x.size)


def decomp_compare(cfg: RunConfig, N: Optional[int] = None, executor: Optional[Executor] = None) -> DecompResult:
    """Three-way error study on the 1D Gaussian pulse.

    Runs (i) the decomposed problem with outflow ends, (ii) the undivided
    problem with outflow ends and (iii) the undivided problem on
    ``[a - cT, b + cT]`` with the original interval's nodes extended at the
    first subdomain's spacing, and tracks the three differences.
    """
    if cfg.dimension != 1 or cfg.initial != "gaussian_1d":
        raise ConfigError("decomp_compare needs the 1D Gaussian pulse")
    N = cfg.N if N is None else N
    grids = grids_1d(cfg, N)
    if len(grids) < 2:
        raise ConfigError("decomp_compare needs at least two subdomains")
    tg = time_grid(cfg, _spacing_1d(cfg, grids, N))
    p = tg.params
    f, g, fxx = _initial_1d(cfg)
    out = BCSpec.uniform("outflow")
    dd = dd_init(grids, f, g, p, stencil=cfg.stencil, f_xx=fxx)
    x, _ = gather(dd)
    whole = build_from_nodes(x)
    w = whole.cell_measure()
    mono = init_history(f(x), g(x), p, whole, f_xx=fxx(x))
    h = grids[0].widths[0]
    ext, inner = _extended_grid(x, h, cfg.c * cfg.t_final)
    xe = ext.nodes
    big = init_history(f(xe), g(xe), p, ext, f_xx=fxx(xe))
    wall = BCSpec.uniform("dirichlet")
    errs = np.zeros(4)
    for _ in range(tg.n_steps):
        dd = dd_step(dd, p, out, executor=executor)
        mono = step(mono, whole, p, out)
        big = step(big, ext, p, wall)
        _, u = gather(dd)
        exact = ref.dalembert_gaussian(x, mono.t, cfg.a, cfg.b, cfg.c)
        e = (l2_error(u, mono.u_curr, w), l2_error(mono.u_curr, big.u_curr[inner], w),
             l2_error(big.u_curr[inner], exact, w), l2_error(u, exact, w))
        errs = np.maximum(errs, e)
    return DecompResult(N, *map(float, errs), n_steps=tg.n_steps, dt=tg.dt)


# ---------------------------------------------------------------- 2D


def _geometry(cfg: RunConfig) -> Geometry:
    try:
        if cfg.geometry == "rectangle":
            return Rectangle(cfg.x0, cfg.x1, cfg.y0, cfg.y1, cfg.bc_left, cfg.bc_right, cfg.bc_bottom, cfg.bc_top)
        if cfg.geometry == "circle":
            return Circle(cfg.radius)
        if cfg.geometry == "quarter_circle":
            return QuarterCircle(cfg.radius)
        if cfg.geometry == "double_circle":
            return DoubleCircle(cfg.radius, cfg.gamma)
        return SlitStrip(cfg.aperture, cfg.period, cfg.height, cfg.screen_y)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _spacings(cfg: RunConfig, N: int) -> Tuple[float, float]:
    return cfg.dx / N, cfg.spacing_y / N


def _time_grid_2d(cfg: RunConfig, N: int) -> TimeGrid:
    dx, dy = _spacings(cfg, N)
    h = min(dx, dy) if cfg.cfl_spacing == "min" else max(dx, dy)
    return time_grid(cfg, h)


def config_time_grid(cfg: RunConfig, N: Optional[int] = None) -> TimeGrid:
    """Time step and step count of ``cfg`` at resolution ``N``."""
    N = cfg.N if N is None else N
    if cfg.dimension == 1:
        return time_grid(cfg, _spacing_1d(cfg, grids_1d(cfg, N), N))
    return _time_grid_2d(cfg, N)


def make_domain(cfg: RunConfig, N: int, alpha: float) -> Domain2D:
    dx, dy = _spacings(cfg, N)
    try:
        return build_lines(_geometry(cfg), dx, dy, alpha)
    except ValueError as exc:
        raise ConfigError(f"cannot mesh {cfg.geometry} at N = {N}: {exc}") from None


def _cavity_kind(cfg: RunConfig) -> str:
    sides = {cfg.bc_left, cfg.bc_right, cfg.bc_bottom, cfg.bc_top}
    if len(sides) != 1 or not sides <= {"dirichlet", "neumann"}:
        raise ConfigError("cavity_mode needs all four sides Dirichlet or all Neumann")
    return sides.pop()


def exact_2d(cfg: RunConfig) -> Optional[Callable[[np.ndarray, np.ndarray, float], np.ndarray]]:
    """The analytic solution of ``cfg``'s initial value problem, if there is one."""
    if cfg.initial == "cavity_mode":
        kind = _cavity_kind(cfg)
        box = (cfg.x0, cfg.x1, cfg.y0, cfg.y1)
        return lambda x, y, t: ref.cavity_mode(x, y, t, kind, cfg.mode_m, cfg.mode_n, box, cfg.c)
    if cfg.initial == "bessel_mode":
        return lambda x, y, t: ref.bessel_mode(x, y, t, cfg.radius, cfg.c)
    if cfg.initial == "zero":
        return None if cfg.source != "none" else (lambda x, y, t: np.zeros_like(x))
    return None


def _line_sources(cfg: RunConfig):
    if cfg.source == "none":
        return ()
    omega = cfg.source_omega
    if omega is None:
        omega = 2.0 * math.pi * cfg.c / cfg.aperture
    return (LineSource(cfg.source_y, lambda t: math.sin(omega * t), lambda t: omega * math.cos(omega * t)),)


def _initial_2d(cfg: RunConfig, d: Domain2D, p: SchemeParams) -> ADIState:
    exact = exact_2d(cfg)
    start = cfg.start
    if start == "auto":
        start = "exact" if exact is not None else "taylor"
    if start == "exact":
        if exact is None:
            raise ConfigError("start = exact needs an analytic solution")
        return ADIState(exact(d.x, d.y, 0.0), exact(d.x, d.y, -p.dt))
    zero = np.zeros(d.n_nodes)
    if cfg.initial == "double_circle_bump":
        f, lap = ref.double_circle_bump(d.x, d.y, cfg.gamma, cfg.bump_radius)
        return init_state(d, f, zero, p, lap_f=lap)
    if cfg.initial == "cavity_mode":
        f = exact(d.x, d.y, 0.0)
        factor = ref.cavity_laplacian_factor(cfg.mode_m, cfg.mode_n, cfg.x1 - cfg.x0, cfg.y1 - cfg.y0)
        return init_state(d, f, zero, p, lap_f=factor * f)
    if cfg.initial == "bessel_mode":
        f = exact(d.x, d.y, 0.0)
        return init_state(d, f, zero, p, lap_f=-(ref.Z20 / cfg.radius) ** 2 * f)
    return init_state(d, zero, zero, p, lap_f=zero)


@dataclass
class Run2D:
    domain: Domain2D
    time: TimeGrid
    state: ADIState
    window: Dict[int, np.ndarray] = field(default_factory=dict)


def simulate_2d(cfg: RunConfig, N: Optional[int] = None,
                on_step: Optional[Callable[[ADIState, Domain2D], None]] = None,
                keep_window: bool = False) -> Run2D:
    """Run the 2D problem of ``cfg`` to ``t_final``.

    ``on_step(state, domain)`` is called at ``t = 0`` and after every step;
    ``keep_window`` stores the field at every step inside the error window.
    """
    N = cfg.N if N is None else N
    tg = _time_grid_2d(cfg, N)
    p = tg.params
    d = make_domain(cfg, N, p.alpha)
    state = _initial_2d(cfg, d, p)
    sources = _line_sources(cfg)
    run = Run2D(d, tg, state)
    if on_step:
        on_step(state, d)
    for _ in range(tg.n_steps):
        state = step2d(state, d, p, line_sources=sources)
        if keep_window and _in_window(cfg, state.t):
            run.window[state.n] = state.u_curr.copy()
        if on_step:
            on_step(state, d)
    run.state = state
    return run


def boundary_points(d: Domain2D) -> Tuple[np.ndarray, np.ndarray]:
    """Dirichlet line endpoints (held at zero), without duplicates."""
    pts = []
    for fam in (d.x_lines, d.y_lines):
        mask = fam.node_field < 0
        if not np.any(mask):
            continue
        counts = np.diff(fam.plan.starts)
        coord = np.repeat(fam.coords, counts)[mask]
        along = fam.plan.positions[mask]
        pts.append(np.column_stack([along, coord] if fam.axis == "x" else [coord, along]))
    if not pts:
        return np.zeros(0), np.zeros(0)
    allp = np.unique(np.round(np.vstack(pts), 13), axis=0)
    return allp[:, 0], allp[:, 1]


def error_2d(cfg: RunConfig, N: Optional[int] = None) -> float:
    """Maximum over the error window of the RMS error against the exact solution."""
    exact = exact_2d(cfg)
    if exact is None:
        raise ConfigError(f"{cfg.initial} has no analytic reference")
    worst = 0.0

    def track(state, d):
        nonlocal worst
        if state.n > 0 and _in_window(cfg, state.t):
            worst = max(worst, l2_error(state.u_curr, exact(d.x, d.y, state.t)))

    simulate_2d(cfg, N, on_step=track)
    return worst


def _self_reference_errors(cfg: RunConfig, levels: Sequence[int]) -> List[float]:
    if cfg.fit_dt:
        raise ConfigError("a self reference needs fit_dt = false so time levels nest")
    R = cfg.reference_N
    if any(R % n for n in levels) or R <= max(levels):
        raise ConfigError("reference_N must be a multiple of every level and finer than all of them")
    fine = simulate_2d(cfg, R, keep_window=True)
    key = {tuple(k): i for i, k in enumerate(fine.domain.ij)}
    errors = []
    for n in levels:
        run = simulate_2d(cfg, n, keep_window=True)
        r = R // n
        idx = np.array([key.get((i * r, j * r), -1) for i, j in run.domain.ij])
        ok = idx >= 0
        errs = [l2_error(u[ok], fine.window[k * r][idx[ok]]) for k, u in run.window.items() if k * r in fine.window]
        if not errs:
            raise ConfigError("error window contains no common time levels")
        errors.append(max(errs))
    return errors


def full_circle_difference(cfg: RunConfig, N: Optional[int] = None) -> float:
    """Quadrant RMS difference between the quarter-circle run and the full-circle run.

    Both runs share the mesh spacing and time step; the maximum is taken
    over the error window.
    """
    if cfg.geometry != "quarter_circle":
        raise ConfigError("full_circle comparison needs the quarter circle")
    N = cfg.N if N is None else N
    full_cfg = cfg.with_updates(geometry="circle", reference="auto")
    tg = _time_grid_2d(cfg, N)
    p = tg.params
    dq, df = make_domain(cfg, N, p.alpha), make_domain(full_cfg, N, p.alpha)
    sq, sf = _initial_2d(cfg, dq, p), _initial_2d(full_cfg, df, p)
    key = {tuple(k): i for i, k in enumerate(df.ij)}
    idx = np.array([key[tuple(k)] for k in dq.ij])
    worst = 0.0
    for _ in range(tg.n_steps):
        sq, sf = step2d(sq, dq, p), step2d(sf, df, p)
        if _in_window(cfg, sq.t):
            worst = max(worst, l2_error(sq.u_curr, sf.u_curr[idx]))
    return worst


def _ref_kind(cfg: RunConfig) -> str:
    if cfg.reference != "auto":
        return cfg.reference
    if cfg.dimension == 1:
        return "analytic"
    return "analytic" if exact_2d(cfg) is not None else "self"


def refine(cfg: RunConfig, levels: Sequence[int], executor: Optional[Executor] = None) -> RefinementReport:
    """Errors at each resolution in ``levels`` and their observed orders.

    1D runs with at least two subdomains report the ``cfg.report`` column of
    :func:`decomp_compare`; other 1D runs are measured against the free-space
    solution.  2D runs use the analytic solution, a finer self reference or
    (for the quarter circle) the full-circle run.
    """
    levels = [int(n) for n in levels]
    if not levels or any(n < 1 for n in levels) or sorted(levels) != levels:
        raise ConfigError("levels must be increasing positive integers")
    t0 = time.perf_counter()
    kind = _ref_kind(cfg)
    if cfg.dimension == 1:
        if kind not in ("analytic",) or cfg.initial != "gaussian_1d":
            raise ConfigError("1D refinement compares the Gaussian pulse with its exact solution")
        if len(grids_1d(cfg, levels[0])) > 1:
            errors = [decomp_compare(cfg, n, executor).column(cfg.report) for n in levels]
            label = cfg.report
        else:
            errors = [_error_1d(cfg, n) for n in levels]
            label = "total"
    elif kind == "analytic":
        errors = [error_2d(cfg, n) for n in levels]
        label = "analytic"
    elif kind == "self":
        errors = _self_reference_errors(cfg, levels)
        label = f"self reference N={cfg.reference_N}"
    elif kind == "full_circle":
        errors = [full_circle_difference(cfg, n) for n in levels]
        label = "full circle"
    else:
        raise ConfigError("reference = none leaves nothing to refine against")
    return RefinementReport(levels, errors, {
        "name": cfg.name, "config": cfg.digest(), "error": label,
        "runtime_s": f"{time.perf_counter() - t0:.2f}",
    })


def _error_1d(cfg: RunConfig, N: int) -> float:
    worst = 0.0
    grids = grids_1d(cfg, N)
    w = _merge(grids).cell_measure()

    def track(t, x, u):
        nonlocal worst
        if t > 0 and _in_window(cfg, t):
            worst = max(worst, l2_error(u, ref.dalembert_gaussian(x, t, cfg.a, cfg.b, cfg.c), w))

    simulate_1d(cfg, N, on_step=track)
    return worst


def slit_energy(cfg: RunConfig, N: Optional[int] = None):
    """Discrete energy ``sum u^2 dx dy`` after every step of the slit run.

    Returns ``(times, energy, period)`` with ``period`` that of the source.
    """
    if cfg.geometry != "slit_strip" or cfg.source == "none":
        raise ConfigError("slit_energy needs the slit strip with a source")
    times, energy = [], []

    def track(state, d):
        if state.n > 0:
            times.append(state.t)
            energy.append(float(np.sum(state.u_curr**2)) * d.dx * d.dy)

    simulate_2d(cfg, N, on_step=track)
    omega = cfg.source_omega or 2.0 * math.pi * cfg.c / cfg.aperture
    return np.array(times), np.array(energy), 2.0 * math.pi / omega


def period_means(times, energy, period: float) -> np.ndarray:
    """Mean energy over each complete source period."""
    k = np.floor(np.asarray(times) / period + 1e-9).astype(int)
    n_full = int(np.floor(times[-1] / period + 1e-9))
    return np.array([energy[(k == i)].mean() for i in range(n_full) if np.any(k == i)])
