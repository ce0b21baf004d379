"""One-dimensional partitions and second-derivative stencils.

A :class:`Grid1D` is an increasing node set ``x_0 = a < ... < x_N = b``.
Each node carries a stencil approximating ``h^2 u''`` which the compact
Simpson rule contracts with its ``R`` weight.  The same node value of
``u''`` is used on both sides of the node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Grid1D",
    "D2Stencil",
    "build_uniform",
    "build_chebyshev",
    "build_from_nodes",
    "d2_stencil",
    "d2_weights",
    "ONE_SIDED_RATIO",
]

#: Interior nodes whose two neighbouring cells differ in width by more than
#: this factor use a one-sided three-point stencil towards the wider cell.
ONE_SIDED_RATIO = 0.2

_UNIFORM_INTERIOR = np.array([1.0, -2.0, 1.0])
_UNIFORM_BOUNDARY = np.array([2.0, -5.0, 4.0, -1.0])


@dataclass(frozen=True)
class Grid1D:
    """Ordered partition of ``[a, b]``."""

    nodes: NDArray[np.float64]
    uniform: bool = False
    widths: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a grid needs at least two nodes")
        widths = np.diff(nodes)
        if np.any(~(widths > 0)):
            raise ValueError("grid nodes must be strictly increasing")
        nodes.flags.writeable = False
        widths.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "widths", widths)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    @property
    def h_max(self) -> float:
        return float(self.widths.max())

    def cell_measure(self) -> NDArray[np.float64]:
        """Trapezoid weights; they sum to ``b - a``."""
        w = np.zeros_like(self.nodes)
        w[:-1] += 0.5 * self.widths
        w[1:] += 0.5 * self.widths
        return w


@dataclass(frozen=True)
class D2Stencil:
    """``sum(weights * u[offsets]) ~ scale**2 * u''`` at one node."""

    offsets: NDArray[np.int64]
    weights: NDArray[np.float64]
    scale: float

    def apply(self, u) -> float:
        return float(np.dot(self.weights, np.asarray(u)[self.offsets]))


def _check_interval(a, b, n):
    if not b > a:
        raise ValueError(f"need b > a, got a={a}, b={b}")
    if int(n) != n or n < 3:
        raise ValueError(f"need at least 3 cells, got N={n}")


def build_uniform(a: float, b: float, N: int) -> Grid1D:
    """``N`` equal cells on ``[a, b]``."""
    _check_interval(a, b, N)
    nodes = a + (b - a) * np.arange(N + 1) / N
    nodes[-1] = b
    return Grid1D(nodes, uniform=True)


def build_chebyshev(a: float, b: float, N: int, variant: Literal["half", "full"] = "full") -> Grid1D:
    """Cosine-clustered grid with ``N`` cells.

    ``half`` places ``a + (b - a) cos(j pi / 2N)``, clustering at ``b``;
    ``full`` places the Chebyshev-Lobatto points mapped onto ``[a, b]``,
    clustering at both ends.
    """
    _check_interval(a, b, N)
    j = np.arange(N + 1)
    if variant == "half":
        nodes = a + (b - a) * np.cos(j * np.pi / (2 * N))
    elif variant == "full":
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(j * np.pi / N)
    else:
        raise ValueError(f"unknown Chebyshev variant {variant!r}")
    nodes = np.sort(nodes)
    nodes[0], nodes[-1] = a, b
    return Grid1D(nodes)


def build_from_nodes(nodes) -> Grid1D:
    """Wrap an arbitrary increasing node array (at least 3 nodes)."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size < 3:
        raise ValueError("a grid needs at least 3 nodes for its stencils")
    return Grid1D(nodes)


def _three_point(x0, x1, x2):
    # second derivative of the quadratic through three points
    return (2.0 / ((x0 - x1) * (x0 - x2)),
            2.0 / ((x1 - x0) * (x1 - x2)),
            2.0 / ((x2 - x0) * (x2 - x1)))


def _four_point_at_first(x):
    # second derivative at x[0] of the cubic through x[0..3]; x has shape (4, m)
    w = []
    for k in range(4):
        others = [i for i in range(4) if i != k]
        num = 2.0 * sum(x[0] - x[r] for r in others)
        den = np.prod([x[k] - x[i] for i in others], axis=0)
        w.append(num / den)
    return w


def stencil_table(x: NDArray[np.float64], uniform: bool = False):
    """Second-derivative stencils for every node of the increasing array ``x``.

    Returns ``(offsets, weights, scale)`` with shapes ``(n, 4)``, ``(n, 4)``
    and ``(n,)``; row ``j`` satisfies
    ``weights[j] . u[offsets[j]] ~ scale[j]**2 * u''(x_j)``.  Unused slots
    carry zero weight.  End nodes use four-point one-sided stencils and
    interior nodes three points, centred unless the two adjacent cells
    differ in width by more than ``1 / ONE_SIDED_RATIO``.  A three-node
    array uses its single quadratic everywhere.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 3:
        raise ValueError("second-derivative stencils need at least 3 nodes")
    offsets = np.zeros((n, 4), dtype=np.int64)
    weights = np.zeros((n, 4))
    scale = np.zeros(n)
    if n == 3:
        # one quadratic serves every node
        offsets[:, :3] = np.arange(3)
        offsets[:, 3] = np.arange(3)
        scale[:] = 0.5 * (x[2] - x[0])
        if uniform:
            weights[:, :3] = (1.0, -2.0, 1.0)
        else:
            weights[:, :3] = np.array(_three_point(x[0], x[1], x[2])) * scale[0] ** 2
        return offsets, weights, scale

    j = np.arange(1, n - 1)
    hl = x[j] - x[j - 1]
    hr = x[j + 1] - x[j]
    lo = j - 1
    if not uniform:
        skewed = np.minimum(hl, hr) < ONE_SIDED_RATIO * np.maximum(hl, hr)
        right = skewed & (hr > hl) & (j + 2 < n)
        left = skewed & (hl > hr) & (j >= 2)
        lo = np.where(right, j, np.where(left, j - 2, j - 1))
    offsets[1:-1, :3] = lo[:, None] + np.arange(3)
    offsets[1:-1, 3] = j
    x0, x1, x2 = x[lo], x[lo + 1], x[lo + 2]
    scale[1:-1] = 0.5 * (x2 - x0)
    if uniform:
        weights[1:-1, :3] = (1.0, -2.0, 1.0)
    else:
        w0, w1, w2 = _three_point(x0, x1, x2)
        s2 = scale[1:-1] ** 2
        weights[1:-1, 0] = w0 * s2
        weights[1:-1, 1] = w1 * s2
        weights[1:-1, 2] = w2 * s2

    offsets[0] = np.arange(4)
    offsets[-1] = np.arange(n - 1, n - 5, -1)
    for row in (0, n - 1):
        pts = x[offsets[row]]
        scale[row] = abs(pts[1] - pts[0])
        if uniform:
            weights[row] = _UNIFORM_BOUNDARY
        else:
            w = _four_point_at_first(pts[:, None])
            weights[row] = np.array([wk[0] for wk in w]) * scale[row] ** 2
    return offsets, weights, scale


def d2_weights(x: NDArray[np.float64], j: int, uniform: bool = False):
    """Stencil row ``j`` of :func:`stencil_table`, with unused slots dropped."""
    n = len(x)
    if n < 3:
        raise ValueError("second-derivative stencils need at least 3 nodes")
    if not 0 <= j < n:
        raise IndexError(f"node index {j} out of range for {n} nodes")
    offsets, weights, scale = stencil_table(x, uniform)
    keep = 4 if j in (0, n - 1) and n > 3 else 3
    return offsets[j, :keep].copy(), weights[j, :keep].copy(), float(scale[j])


def d2_stencil(grid: Grid1D, j: int) -> D2Stencil:
    """Stencil approximating ``h^2 u''`` at node ``j`` of ``grid``."""
    offsets, w, scale = d2_weights(grid.nodes, j, uniform=grid.uniform)
    return D2Stencil(offsets=offsets, weights=w, scale=float(scale))


def max_width_ratio(grid: Grid1D) -> float:
    """Largest ratio of neighbouring cell widths (diagnostic)."""
    h = grid.widths
    r = h[1:] / h[:-1]
    return float(np.max(np.maximum(r, 1.0 / r))) if r.size else 1.0
