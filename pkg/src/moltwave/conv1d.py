"""O(N) convolution with the two-sided exponential kernel.

For a line ``a = x_0 < ... < x_N = b`` the particular solution

    I[u](x_j) = alpha * int_a^b u(y) exp(-alpha |x_j - y|) dy

is split into left and right characteristics that obey one-way
recurrences,

    IL_j = d_j IL_{j-1} + JL_j,        IR_j = d_{j+1} IR_{j+1} + JR_j,

where ``JL_j``, ``JR_j`` are one-cell integrals of a quadratic interpolant
(the compact Simpson rule).  Each sweep is a sequential scan.

:class:`LinePlan` precomputes the per-cell weights and per-node stencils for
any number of lines stored back to back in one array, so the same kernel
drives single 1D grids, subdomains and the 2D line families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numpy.typing import NDArray

from .kernelweights import simpson_weights_array
from .mesh1d import Grid1D, stencil_table

__all__ = [
    "ConvResult",
    "LinePlan",
    "plan_for_grid",
    "local_integrals",
    "fast_convolve",
    "assemble",
    "homogeneous_profiles",
]


@dataclass(frozen=True)
class ConvResult:
    """Particular solution and its two characteristics at the nodes."""

    I: NDArray[np.float64]
    IL: NDArray[np.float64]
    IR: NDArray[np.float64]


@numba.njit(cache=True, nogil=True, parallel=True)
def _scan_lines(store, starts, d, P, Q, st_idx, st_w, fL, fR, IL, IR):
    # Node j of line l lives at store[j + 2*l + 1]; the slots on either side
    # of each line hold optional halo values.
    n_lines = starts.size - 1
    for line in numba.prange(n_lines):
        s = starts[line]
        e = starts[line + 1]
        off = 2 * line + 1
        cs = s - line
        IL[s] = 0.0
        for j in range(s + 1, e):
            c = cs + (j - s) - 1
            upp = 0.0
            for k in range(4):
                upp += st_w[j, k] * store[st_idx[j, k]]
            IL[j] = d[c] * IL[j - 1] + (P[c] * store[j + off] + Q[c] * store[j - 1 + off] + fL[j] * upp)
        IR[e - 1] = 0.0
        for j in range(e - 2, s - 1, -1):
            c = cs + (j - s)
            upp = 0.0
            for k in range(4):
                upp += st_w[j, k] * store[st_idx[j, k]]
            IR[j] = d[c] * IR[j + 1] + (P[c] * store[j + off] + Q[c] * store[j + 1 + off] + fR[j] * upp)


@numba.njit(cache=True, nogil=True, parallel=True)
def _local_lines(store, starts, P, Q, st_idx, st_w, fL, fR, JL, JR):
    n_lines = starts.size - 1
    for line in numba.prange(n_lines):
        s = starts[line]
        e = starts[line + 1]
        off = 2 * line + 1
        cs = s - line
        for j in range(s, e):
            upp = 0.0
            for k in range(4):
                upp += st_w[j, k] * store[st_idx[j, k]]
            if j > s:
                c = cs + (j - s) - 1
                JL[j] = P[c] * store[j + off] + Q[c] * store[j - 1 + off] + fL[j] * upp
            else:
                JL[j] = 0.0
            if j < e - 1:
                c = cs + (j - s)
                JR[j] = P[c] * store[j + off] + Q[c] * store[j + 1 + off] + fR[j] * upp
            else:
                JR[j] = 0.0


class LinePlan:
    """Weights for convolving many lines stored contiguously.

    Parameters
    ----------
    lines : sequence of 1D arrays
        Increasing node positions of each line (at least 3 nodes each).
    alpha : float
        Modified Helmholtz parameter.
    uniform : sequence of bool, optional
        Lines known to be uniform use the exact integer stencils.
    halos : sequence of (float or None, float or None), optional
        Width of a neighbouring cell beyond each end of a line.  An end with
        a halo uses a centred stencil reaching one node past the line, whose
        value is passed to :meth:`convolve`.  Domain decomposition uses this
        so that subdomain sweeps reproduce the monolithic stencils.
    """

    def __init__(self, lines, alpha: float, uniform=None, halos=None):
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.alpha = float(alpha)
        n_lines = len(lines)
        uniform = [False] * n_lines if uniform is None else list(uniform)
        halos = [(None, None)] * n_lines if halos is None else list(halos)

        starts = [0]
        positions, st_idx, st_w, fL, fR = [], [], [], [], []
        for line, (x, unif, (hl, hr)) in enumerate(zip(lines, uniform, halos)):
            x = np.asarray(x, dtype=float)
            n = x.size
            if n < 3:
                raise ValueError("every line needs at least 3 nodes")
            ext = x
            shift = 0
            if hl is not None:
                ext = np.concatenate(([x[0] - hl], ext))
                shift = 1
                unif = unif and bool(np.isclose(hl, x[1] - x[0], rtol=1e-12, atol=0))
            if hr is not None:
                ext = np.concatenate((ext, [x[-1] + hr]))
                unif = unif and bool(np.isclose(hr, x[-1] - x[-2], rtol=1e-12, atol=0))
            off, w, scale = stencil_table(ext, uniform=unif)
            off, w, scale = off[shift:shift + n], w[shift:shift + n], scale[shift:shift + n]
            h = np.diff(x)
            _, _, _, R = simpson_weights_array(self.alpha * h)
            left = np.zeros(n)
            right = np.zeros(n)
            if unif:
                left[1:] = R
                right[:-1] = R
            else:
                left[1:] = R * (h / scale[1:]) ** 2
                right[:-1] = R * (h / scale[:-1]) ** 2
            # storage slot of ext index i is starts[line] + 2*line + i + (1 - shift)
            st_idx.append(off + starts[-1] + 2 * line + 1 - shift)
            st_w.append(w)
            fL.append(left)
            fR.append(right)
            positions.append(x)
            starts.append(starts[-1] + n)

        self.n_lines = n_lines
        self.starts = np.asarray(starts, dtype=np.int64)
        self.positions = np.concatenate(positions)
        self.widths = np.concatenate([np.diff(x) for x in positions])
        self.d, self.P, self.Q, self.R = simpson_weights_array(self.alpha * self.widths)
        self.st_idx = np.ascontiguousarray(np.concatenate(st_idx))
        self.st_w = np.ascontiguousarray(np.concatenate(st_w))
        self.fL = np.concatenate(fL)
        self.fR = np.concatenate(fR)
        line_of_node = np.repeat(np.arange(n_lines), np.diff(self.starts))
        self._slot = np.arange(self.n_nodes) + 2 * line_of_node + 1
        self._left_halo = np.array([k for k, (hl, _) in enumerate(halos) if hl is not None], dtype=np.int64)
        self._right_halo = np.array([k for k, (_, hr) in enumerate(halos) if hr is not None], dtype=np.int64)

        first = self.starts[:-1]
        last = self.starts[1:] - 1
        self.a = self.positions[first]
        self.b = self.positions[last]
        self.mu = np.exp(-self.alpha * (self.b - self.a))

    @property
    def n_nodes(self) -> int:
        return int(self.starts[-1])

    def _store(self, u, halo_values):
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n_nodes,):
            raise ValueError(f"expected {self.n_nodes} node values, got shape {u.shape}")
        store = np.zeros(self.n_nodes + 2 * self.n_lines)
        store[self._slot] = u
        if halo_values is None:
            return store
        if isinstance(halo_values, tuple) and len(halo_values) == 2 and isinstance(halo_values[0], np.ndarray):
            left, right = halo_values
        else:
            left = np.array([0.0 if lv is None else lv for lv, _ in halo_values])
            right = np.array([0.0 if rv is None else rv for _, rv in halo_values])
        lh, rh = self._left_halo, self._right_halo
        store[self.starts[lh] + 2 * lh] = left[lh]
        store[self.starts[rh + 1] + 2 * rh + 1] = right[rh]
        return store

    def convolve(self, u, halo_values=None) -> ConvResult:
        """Particular solution of every line for node values ``u``.

        ``halo_values`` gives the values beyond the line ends for plans built
        with halos: a per-line sequence of ``(left, right)`` pairs or a pair
        of arrays with one entry per line.  Entries at ends without a halo
        are ignored.
        """
        store = self._store(u, halo_values)
        IL = np.empty(self.n_nodes)
        IR = np.empty(self.n_nodes)
        _scan_lines(store, self.starts, self.d, self.P, self.Q, self.st_idx, self.st_w,
                    self.fL, self.fR, IL, IR)
        return ConvResult(I=IL + IR, IL=IL, IR=IR)

    def local_integrals(self, u, halo_values=None):
        """One-cell integrals ``(JL, JR)``; ``JL`` at first and ``JR`` at last node are 0."""
        store = self._store(u, halo_values)
        JL = np.empty(self.n_nodes)
        JR = np.empty(self.n_nodes)
        _local_lines(store, self.starts, self.P, self.Q, self.st_idx, self.st_w, self.fL, self.fR, JL, JR)
        return JL, JR

    def homogeneous(self):
        """``exp(-alpha (x - a))`` and ``exp(-alpha (b - x))`` at every node."""
        line_of_node = np.repeat(np.arange(self.n_lines), np.diff(self.starts))
        x = self.positions
        ea = np.exp(-self.alpha * (x - self.a[line_of_node]))
        eb = np.exp(-self.alpha * (self.b[line_of_node] - x))
        return ea, eb


def plan_for_grid(grid: Grid1D, alpha: float, halo=(None, None)) -> LinePlan:
    """Single-line plan for ``grid``, cached on the grid per ``(alpha, halo)``."""
    key = (float(alpha), halo)
    cache = grid.__dict__.setdefault("_plans", {})
    plan = cache.get(key)
    if plan is None:
        plan = LinePlan([grid.nodes], alpha, uniform=[grid.uniform], halos=[halo])
        cache[key] = plan
    return plan


def local_integrals(u, grid: Grid1D, alpha: float):
    """One-cell Simpson integrals ``(JL, JR)`` at every node of ``grid``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return plan_for_grid(grid, alpha).local_integrals(u)


def fast_convolve(u, grid: Grid1D, alpha: float, halo=(None, None), halo_values=None) -> ConvResult:
    """``I[u]`` at the nodes of ``grid`` in O(N) operations."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    plan = plan_for_grid(grid, alpha, halo)
    return plan.convolve(u, None if halo_values is None else [halo_values])


def homogeneous_profiles(grid: Grid1D, alpha: float):
    x = grid.nodes
    return np.exp(-alpha * (x - grid.a)), np.exp(-alpha * (grid.b - x))


def assemble(conv: ConvResult, A: float, B: float, grid: Grid1D, alpha: float):
    """``w = I + A exp(-alpha (x - a)) + B exp(-alpha (b - x))``."""
    I = np.asarray(conv.I)
    if I.shape != grid.nodes.shape:
        raise ValueError("convolution and grid sizes differ")
    ea, eb = homogeneous_profiles(grid, alpha)
    return I + A * ea + B * eb
