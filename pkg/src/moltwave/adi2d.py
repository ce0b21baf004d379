"""Alternating-direction solver for the 2D wave equation.

The 2D modified Helmholtz operator is factored into one-dimensional
operators along mesh lines,

    L_x L_y [u^{n+1} + (beta^2 - 2) u^n + u^{n-1}] = beta^2 u^n + (c dt)^2 S^n,

and inverted line by line: ``W = L_x^{-1}[rhs]`` on every x-line, then
``Z = L_y^{-1}[W]`` on every y-line.  Each inversion is a 1D fast
convolution closed with the boundary conditions at the line ends.  The
result of the x-y ordering is averaged with the y-x ordering.

Lines are built from a :class:`~moltwave.geometry.Geometry`: each line holds
the Cartesian nodes of the domain it crosses plus its two intersection
points with the boundary, which need not lie on the Cartesian mesh.  Field
values live on the Cartesian nodes shared by both line families; Dirichlet
intersection points are held at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from .bc1d import end_row, solve_rows
from .conv1d import LinePlan
from .geometry import Geometry
from .kernelweights import SchemeParams, outflow_weights
from .mesh1d import stencil_table

__all__ = [
    "LineFamily",
    "Domain2D",
    "ADIState",
    "LineSource",
    "build_lines",
    "invert_helmholtz_line",
    "bc_for_line",
    "init_state",
    "step2d",
    "run2d",
    "rms",
]

_TOL = 1e-9


@dataclass
class LineFamily:
    """All lines of one direction, batched into a single :class:`LinePlan`.

    ``node_field[k]`` is the field index of line node ``k`` or -1 for a
    Dirichlet boundary point; ``field_pos[f]`` is the line node holding
    field node ``f``.
    """

    axis: str
    coords: NDArray[np.float64]
    plan: LinePlan
    node_field: NDArray[np.int64]
    field_pos: NDArray[np.int64]
    kind_lo: NDArray
    kind_hi: NDArray
    d2: sp.csr_matrix = field(repr=False)
    ea: NDArray[np.float64] = field(init=False, repr=False)
    eb: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        self.ea, self.eb = self.plan.homogeneous()
        self._known = self.node_field >= 0
        self._known_idx = self.node_field[self._known]
        self.first = self.plan.starts[:-1]
        self.last = self.plan.starts[1:] - 1
        self.periodic = (self.kind_lo == "periodic") & (self.kind_hi == "periodic")
        self.has_outflow = bool(np.any(self.kind_lo == "outflow") or np.any(self.kind_hi == "outflow"))
        # line nodes feeding the ghosts: periodic ends wrap, Neumann ends mirror
        nl = self.kind_lo == "neumann"
        nh = self.kind_hi == "neumann"
        self._ghost_lo = np.where(self.periodic, self.last - 1, np.where(nl, self.first + 1, -1))
        self._ghost_hi = np.where(self.periodic, self.first + 1, np.where(nh, self.last - 1, -1))
        self.has_ghosts = bool(np.any(self._ghost_lo >= 0) or np.any(self._ghost_hi >= 0))
        # field nodes at the two ends of a periodic line are the same point
        seam = self.periodic & (self.node_field[self.first] >= 0) & (self.node_field[self.last] >= 0)
        self.seam = (self.node_field[self.first[seam]], self.node_field[self.last[seam]])

    @property
    def n_lines(self) -> int:
        return self.plan.n_lines

    def gather(self, values) -> NDArray[np.float64]:
        out = np.zeros(self.plan.n_nodes)
        out[self._known] = values[self._known_idx]
        return out

    def scatter(self, line_values) -> NDArray[np.float64]:
        return line_values[self.field_pos]

    def ghost_values(self, line_values):
        """Values beyond the line ends for the centred end stencils (or ``None``)."""
        if not self.has_ghosts:
            return None
        v = np.append(line_values, 0.0)
        return v[self._ghost_lo], v[self._ghost_hi]

    def identify_seams(self, values) -> None:
        """Average the two copies of every periodic seam node in place."""
        lo, hi = self.seam
        if lo.size:
            values[lo] = values[hi] = 0.5 * (values[lo] + values[hi])

    def end_values(self, values):
        """Field values at the first and last node of every line (0 at Dirichlet points)."""
        g = self.gather(values)
        return g[self.first], g[self.last]


@dataclass
class Domain2D:
    """Cartesian field nodes of a geometry and its two line families."""

    geometry: Geometry
    dx: float
    dy: float
    ij: NDArray[np.int64]
    x: NDArray[np.float64]
    y: NDArray[np.float64]
    x_lines: LineFamily
    y_lines: LineFamily

    @property
    def n_nodes(self) -> int:
        return self.x.size

    def laplacian(self, u) -> NDArray[np.float64]:
        """Stencil Laplacian at the field nodes (boundary points taken as 0)."""
        fx, fy = self.x_lines, self.y_lines
        return fx.scatter(fx.d2 @ fx.gather(u)) + fy.scatter(fy.d2 @ fy.gather(u))

    def node_weights(self) -> NDArray[np.float64]:
        return np.full(self.n_nodes, self.dx * self.dy)


def _on_grid(v: float, h: float) -> Optional[int]:
    k = round(v / h)
    return int(k) if abs(v - k * h) <= _TOL * h else None


def _candidates(geom: Geometry, axis: str, h_along: float, h_across: float, lo_idx: int, hi_idx: int):
    """Line layouts ``(coord_index, lo, hi, kind_lo, kind_hi, keys)`` before field filtering."""
    rows = []
    for j in range(lo_idx, hi_idx + 1):
        coord = j * h_across
        for lo, hi, k_lo, k_hi in geom.intervals(axis, coord):
            i0 = math.ceil(lo / h_along - _TOL)
            i1 = math.floor(hi / h_along + _TOL)
            keys = []
            for i in range(i0, i1 + 1):
                p = i * h_along
                at_lo = abs(p - lo) <= _TOL * h_along
                at_hi = abs(p - hi) <= _TOL * h_along
                if at_lo and k_lo == "dirichlet" or at_hi and k_hi == "dirichlet":
                    continue
                keys.append(i)
            for kind, end in ((k_lo, lo), (k_hi, hi)):
                if kind != "dirichlet" and _on_grid(end, h_along) is None:
                    raise ValueError(f"{kind} boundary at {end} is not aligned with the mesh")
            rows.append((j, lo, hi, k_lo, k_hi, keys))
    return rows


def _d2_matrix(lines_x, n_total, uniform=False):
    rows, cols, vals = [], [], []
    start = 0
    for x in lines_x:
        off, w, scale = stencil_table(x, uniform)
        r = np.repeat(np.arange(x.size), 4) + start
        rows.append(r)
        cols.append(off.ravel() + start)
        vals.append((w / scale[:, None] ** 2).ravel())
        start += x.size
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n_total, n_total))


def _family(axis, layouts, key_of, h_along, alpha, n_field):
    coords, lines, node_field, kinds_lo, kinds_hi, halos = [], [], [], [], [], []
    for coord, lo, hi, k_lo, k_hi, along, keys in layouts:
        xs, fs = [], []
        if k_lo == "dirichlet":
            xs.append(lo)
            fs.append(-1)
        for a, k in zip(along, keys):
            if k in key_of:
                xs.append(a * h_along)
                fs.append(key_of[k])
        if k_hi == "dirichlet":
            xs.append(hi)
            fs.append(-1)
        if all(f < 0 for f in fs):
            continue
        if len(xs) < 3:
            raise ValueError(f"line at {coord} has only {len(xs)} nodes; refine the mesh")
        xs = np.asarray(xs, dtype=float)
        # non-Dirichlet ends are mesh nodes; place them exactly on the boundary
        if k_lo != "dirichlet":
            xs[0] = lo
        if k_hi != "dirichlet":
            xs[-1] = hi
        coords.append(coord)
        lines.append(xs)
        node_field.append(fs)
        kinds_lo.append(k_lo)
        kinds_hi.append(k_hi)
        h = np.diff(xs)
        if k_lo == "periodic":
            halos.append((h[-1], h[0]))
        else:
            halos.append((h[0] if k_lo == "neumann" else None, h[-1] if k_hi == "neumann" else None))
    plan = LinePlan(lines, alpha, halos=halos)
    nf = np.concatenate([np.asarray(f, dtype=np.int64) for f in node_field])
    field_pos = np.full(n_field, -1, dtype=np.int64)
    known = np.nonzero(nf >= 0)[0]
    field_pos[nf[known]] = known
    if np.any(field_pos < 0):
        raise ValueError(f"some field nodes are not covered by the {axis}-lines")
    d2 = _d2_matrix(lines, plan.n_nodes)
    return LineFamily(axis=axis, coords=np.asarray(coords), plan=plan, node_field=nf, field_pos=field_pos,
                      kind_lo=np.asarray(kinds_lo), kind_hi=np.asarray(kinds_hi), d2=d2)


def build_lines(geom: Geometry, dx: float, dy: float, alpha: float) -> Domain2D:
    """Lay a Cartesian mesh with spacings ``dx``, ``dy`` over ``geom``.

    Mesh nodes sit at ``(i dx, j dy)``.  A node carries an unknown when it
    lies inside the domain, or on a non-Dirichlet boundary, as seen from
    both its row and its column; the few nodes that pass only one test
    (within rounding of the boundary) are left out of both families.
    """
    if not (dx > 0 and dy > 0):
        raise ValueError("dx and dy must be positive")
    x0, x1, y0, y1 = geom.bounding_box()
    ilo, ihi = math.floor(x0 / dx) - 1, math.ceil(x1 / dx) + 1
    jlo, jhi = math.floor(y0 / dy) - 1, math.ceil(y1 / dy) + 1
    rows = _candidates(geom, "x", dx, dy, jlo, jhi)
    cols = _candidates(geom, "y", dy, dx, ilo, ihi)
    from_rows = {(i, j) for j, *_rest, along in rows for i in along}
    from_cols = {(i, j) for i, *_rest, along in cols for j in along}
    both = from_rows & from_cols
    ij = np.array(sorted(both, key=lambda k: (k[1], k[0])), dtype=np.int64).reshape(-1, 2)
    if ij.size == 0:
        raise ValueError("the mesh has no interior nodes in this geometry")
    key_of = {(int(i), int(j)): n for n, (i, j) in enumerate(ij)}
    n = len(ij)
    row_layouts = [(j * dy, lo, hi, klo, khi, along, [(i, j) for i in along])
                   for j, lo, hi, klo, khi, along in rows]
    col_layouts = [(i * dx, lo, hi, klo, khi, along, [(i, j) for j in along])
                   for i, lo, hi, klo, khi, along in cols]
    xf = _family("x", row_layouts, key_of, dx, alpha, n)
    yf = _family("y", col_layouts, key_of, dy, alpha, n)
    return Domain2D(geometry=geom, dx=dx, dy=dy, ij=ij, x=ij[:, 0] * dx, y=ij[:, 1] * dy,
                    x_lines=xf, y_lines=yf)


def bc_for_line(domain: Domain2D, axis: str, line: int) -> Tuple[str, str]:
    """Boundary kinds at the two ends of one line."""
    fam = domain.x_lines if axis == "x" else domain.y_lines
    return str(fam.kind_lo[line]), str(fam.kind_hi[line])


@dataclass(frozen=True)
class LineSource:
    """Soft source along the row ``y = y0``: ``u(x, y0, t) = sigma(t)``.

    Enters as ``S = (2/c) sigma'(t) delta(y - y0)`` and is integrated exactly
    on the y-lines.  The row must be covered by periodic x-lines, on which
    an x-independent term is inverted exactly.
    """

    y0: float
    sigma: Callable[[float], float]
    dsigma: Optional[Callable[[float], float]] = None

    def strength(self, t: float, dt: float, c: float) -> float:
        if self.dsigma is not None:
            d = self.dsigma(t)
        else:
            d = (self.sigma(t + dt) - self.sigma(t - dt)) / (2.0 * dt)
        return 2.0 / c * d


@dataclass
class ADIState:
    u_curr: NDArray[np.float64]
    u_prev: NDArray[np.float64]
    t: float = 0.0
    n: int = 0
    history: Dict[str, Tuple[NDArray[np.float64], NDArray[np.float64]]] = field(default_factory=dict)


def _closure(fam: LineFamily, I_a, I_b, params: SchemeParams, u_lo=None, u_hi=None, hist=None):
    """Homogeneous-data closure of every line of ``fam`` at once."""
    mu = fam.plan.mu
    A = np.zeros(fam.n_lines)
    B = np.zeros(fam.n_lines)
    per = fam.periodic
    if np.any(per):
        A[per] = I_b[per] / (1.0 - mu[per])
        B[per] = I_a[per] / (1.0 - mu[per])
    rest = ~per
    if not np.any(rest):
        return A, B
    ow = outflow_weights(params.beta) if fam.has_outflow else None
    rows = []
    for side, kinds, I_end, u_end, h in (("left", fam.kind_lo, I_a, u_lo, None if hist is None else hist[0]),
                                         ("right", fam.kind_hi, I_b, u_hi, None if hist is None else hist[1])):
        cA = np.zeros(fam.n_lines)
        cB = np.zeros(fam.n_lines)
        r = np.zeros(fam.n_lines)
        for kind in ("dirichlet", "neumann", "outflow"):
            m = rest & (kinds == kind)
            if not np.any(m):
                continue
            extra = {}
            if kind == "outflow":
                extra = dict(u_hist=(u_end[0][m], u_end[1][m]), hist=h[m], ow=ow)
            a_, b_, r_ = end_row(kind, side, I_end[m], mu[m], params, **extra)
            cA[m], cB[m], r[m] = a_, b_, r_
        rows.append((cA[rest], cB[rest], r[rest]))
    A[rest], B[rest] = solve_rows(*rows)
    return A, B


def _sweep(fam: LineFamily, f_field, sign: float, params: SchemeParams, state: ADIState, key: str,
           extra_I=None):
    """``L^{-1}[f]`` on every line of ``fam``.

    The inversion is written as ``-sign * beta^2/2 (I[v] + A e_a + B e_b)``
    with ``v = sign f / beta^2``, so that for ``sign = -1`` it has exactly the
    form of the 1D update and the outflow closure applies unchanged.
    ``extra_I`` is an exact particular integral of ``v`` added at the nodes.
    """
    b2 = params.beta**2
    v = fam.gather(f_field) * (sign / b2)
    I = fam.plan.convolve(v, fam.ghost_values(v)).I
    if extra_I is not None:
        I = I + extra_I
    I_a, I_b = I[fam.first], I[fam.last]
    u_lo = u_hi = hist = None
    if fam.has_outflow:
        lo_n, hi_n = fam.end_values(state.u_curr)
        lo_p, hi_p = fam.end_values(state.u_prev)
        u_lo, u_hi = (lo_n, lo_p), (hi_n, hi_p)
        hist = state.history.get(key)
        if hist is None:
            hist = (np.zeros(fam.n_lines), np.zeros(fam.n_lines))
    A, B = _closure(fam, I_a, I_b, params, u_lo, u_hi, hist)
    if fam.has_outflow:
        state.history[key] = (A, B)
    line = fam.plan.starts
    n_per = np.diff(line)
    q = 0.5 * b2 * (I + np.repeat(A, n_per) * fam.ea + np.repeat(B, n_per) * fam.eb)
    return fam.scatter(-sign * q)


def invert_helmholtz_line(rhs, nodes, alpha: float, kinds=("dirichlet", "dirichlet")):
    """Solve ``(1/alpha^2) w'' - w = rhs`` on one line with homogeneous end conditions.

    Returns ``w = -(I[rhs] + A e^{-alpha (x - a)} + B e^{-alpha (b - x)}) / 2``.
    """
    x = np.asarray(nodes, dtype=float)
    h = np.diff(x)
    if kinds[0] == "periodic":
        halo = (h[-1], h[0])
    else:
        halo = (h[0] if kinds[0] == "neumann" else None, h[-1] if kinds[1] == "neumann" else None)
    plan = LinePlan([x], alpha, halos=[halo])
    fam = LineFamily(axis="x", coords=np.zeros(1), plan=plan,
                     node_field=np.arange(plan.n_nodes), field_pos=np.arange(plan.n_nodes),
                     kind_lo=np.array([kinds[0]]), kind_hi=np.array([kinds[1]]),
                     d2=sp.csr_matrix((plan.n_nodes, plan.n_nodes)))
    if fam.has_outflow:
        raise ValueError("outflow needs time history; use the stepper")
    rhs = np.asarray(rhs, dtype=float)
    I = plan.convolve(rhs, fam.ghost_values(rhs)).I
    A, B = _closure(fam, I[fam.first], I[fam.last], SchemeParams(2.0, 1.0, 2.0 / alpha))
    return -0.5 * (I + A[0] * fam.ea + B[0] * fam.eb)


def _line_source_I(fam: LineFamily, sources, t, params: SchemeParams):
    """Exact ``I[v]`` on the y-lines of the line sources' share of ``v``.

    In the x-y ordering the source reaches the y-lines through ``W`` as
    ``-(c dt)^2 S`` and enters ``v = -W / beta^2``; in the y-x ordering it
    enters ``v = rhs / beta^2`` directly.  Both give
    ``I[v] = (c dt / beta) s exp(-alpha |y - y0|)``.
    """
    if not sources:
        return None
    alpha = params.alpha
    coef = params.c * params.dt / params.beta
    pos = fam.plan.positions
    counts = np.diff(fam.plan.starts)
    lo = np.repeat(fam.plan.a, counts)
    hi = np.repeat(fam.plan.b, counts)
    out = np.zeros_like(pos)
    for src in sources:
        s = src.strength(t, params.dt, params.c)
        inside = (lo <= src.y0) & (src.y0 <= hi)
        out += np.where(inside, coef * s * np.exp(-alpha * np.abs(pos - src.y0)), 0.0)
    return out


def init_state(domain: Domain2D, f, g, params: SchemeParams, lap_f=None, source=None) -> ADIState:
    """Second-order start from ``u = f``, ``u_t = g`` sampled at the field nodes."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (domain.n_nodes,) or g.shape != (domain.n_nodes,):
        raise ValueError("initial data must be sampled at the field nodes")
    lap = domain.laplacian(f) if lap_f is None else np.asarray(lap_f, dtype=float)
    s0 = 0.0 if source is None else source(domain.x, domain.y, 0.0)
    dt, c = params.dt, params.c
    u_prev = f - dt * g + 0.5 * dt**2 * c**2 * (lap + s0)
    return ADIState(u_curr=f.copy(), u_prev=u_prev)


def step2d(state: ADIState, domain: Domain2D, params: SchemeParams, source=None,
           line_sources=(), orderings=("xy", "yx")) -> ADIState:
    """One symmetrized ADI step.

    ``source(x, y, t)`` is a smooth source sampled at the nodes and
    ``line_sources`` a sequence of :class:`LineSource`.
    """
    b2 = params.beta**2
    u, u_prev = state.u_curr, state.u_prev
    rhs = b2 * u
    if source is not None:
        rhs = rhs + (params.c * params.dt) ** 2 * source(domain.x, domain.y, state.t)
    fx, fy = domain.x_lines, domain.y_lines
    Z = np.zeros_like(u)
    for order in orderings:
        if order == "xy":
            W = _sweep(fx, rhs, 1.0, params, state, "xy:x")
            ext = _line_source_I(fy, line_sources, state.t, params)
            Z += _sweep(fy, W, -1.0, params, state, "xy:y", ext)
        elif order == "yx":
            ext = _line_source_I(fy, line_sources, state.t, params)
            W = _sweep(fy, rhs, 1.0, params, state, "yx:y", ext)
            Z += _sweep(fx, W, -1.0, params, state, "yx:x")
        else:
            raise ValueError(f"unknown sweep ordering {order!r}")
    Z /= len(orderings)
    u_next = Z - u_prev - (b2 - 2.0) * u
    # without this the seam difference is invisible to the periodic closure
    # and grows linearly
    fx.identify_seams(u_next)
    fy.identify_seams(u_next)
    if not np.all(np.isfinite(u_next)):
        raise FloatingPointError(f"non-finite solution at step {state.n + 1}")
    return ADIState(u_curr=u_next, u_prev=u, t=(state.n + 1) * params.dt, n=state.n + 1,
                    history=state.history)


def run2d(state: ADIState, domain: Domain2D, params: SchemeParams, n_steps: int, source=None,
          line_sources=(), callback=None) -> ADIState:
    for _ in range(int(n_steps)):
        state = step2d(state, domain, params, source, line_sources)
        if callback is not None:
            callback(state)
    return state


def rms(e) -> float:
    """Root mean square over the Cartesian field nodes."""
    e = np.asarray(e, dtype=float)
    return float(np.sqrt(np.mean(e * e)))
