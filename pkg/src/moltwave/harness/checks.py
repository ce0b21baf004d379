"""Fast invariant suite behind ``moltwave check``.

Each check returns ``(passed, detail)``.  Oracles are independent of the
code under test: adaptive quadrature for weights and convolutions, an
undivided run for domain decomposition, and exact symmetries in 2D.
"""

from __future__ import annotations

import decimal
import math
import tempfile
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
from scipy.integrate import quad

from ..adi2d import build_lines, init_state, step2d
from ..bc1d import BCSpec
from ..conv1d import fast_convolve
from ..ddecomp import dd_init, dd_run, gather, split_grid
from ..geometry import Circle, Rectangle
from ..kernelweights import SchemeParams, outflow_weights, simpson_weights
from ..kernelweights import _series_pqr
from ..mesh1d import build_chebyshev, build_uniform
from ..stepper1d import amplification_check, init_history, run
from .norms import l2_error
from .output import read_snapshot, snapshot_norm, write_snapshot

__all__ = ["CHECKS", "run_checks", "quad_pqr", "closed_pqr_exact", "quad_gammas", "quad_convolution"]

Result = Tuple[bool, str]


def quad_pqr(nu: float):
    """``P``, ``Q``, ``R`` of one cell by adaptive quadrature."""
    k = lambda z: nu * math.exp(-nu * z)  # noqa: E731
    P = quad(lambda z: (1.0 - z) * k(z), 0.0, 1.0, epsabs=0, epsrel=1e-13)[0]
    Q = quad(lambda z: z * k(z), 0.0, 1.0, epsabs=0, epsrel=1e-13)[0]
    R = -0.5 * quad(lambda z: z * (1.0 - z) * k(z), 0.0, 1.0, epsabs=0, epsrel=1e-13)[0]
    return P, Q, R


def closed_pqr_exact(nu: float):
    """Closed-form ``P``, ``Q``, ``R`` in 40-digit decimal arithmetic.

    In double precision the closed forms cancel badly for small ``nu``;
    extra digits make them a reference for the series branch.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        n = decimal.Decimal(nu)
        d = (-n).exp()
        P = 1 - (1 - d) / n
        Q = -d + (1 - d) / n
        R = (1 - d) / (n * n) - (1 + d) / (2 * n)
        return float(P), float(Q), float(R)


def quad_gammas(beta: float):
    """Outflow weights: the quadratic through ``u^{n+1}, u^n, u^{n-1}`` at
    ``z = -1, 0, 1`` integrated against ``beta exp(-beta z)`` on ``[0, 1]``."""
    basis = (lambda z: 0.5 * z * (z - 1.0), lambda z: 1.0 - z * z, lambda z: 0.5 * z * (z + 1.0))
    return tuple(quad(lambda z: L(z) * beta * math.exp(-beta * z), 0.0, 1.0, epsabs=0, epsrel=1e-13)[0]
                 for L in basis)


def quad_convolution(f: Callable[[float], float], x: float, a: float, b: float, alpha: float) -> float:
    """``alpha * int_a^b f(y) exp(-alpha |x - y|) dy`` split at ``x``."""
    g = lambda y: f(y) * alpha * math.exp(-alpha * abs(x - y))  # noqa: E731
    left = quad(g, a, x, epsabs=1e-14, epsrel=1e-13, limit=200)[0] if x > a else 0.0
    right = quad(g, x, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0] if x < b else 0.0
    return left + right


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def check_weights() -> Result:
    worst = 0.0
    for nu in (0.2, 1.0, 2.0, 10.0, 50.0):
        w = simpson_weights(nu)
        worst = max(worst, _rel((w.P, w.Q, w.R), quad_pqr(nu)))
        ow = outflow_weights(nu)
        worst = max(worst, _rel((ow.gamma0, ow.gamma1, ow.gamma2), quad_gammas(nu)))
    return worst <= 1e-12, f"max relative error {worst:.2e}"


def check_series_branch() -> Result:
    gap = _rel([v[0] for v in _series_pqr(np.array([1e-3]))], closed_pqr_exact(1e-3))
    return gap <= 1e-10, f"series vs closed form at nu=1e-3: {gap:.2e}"


def check_polynomials() -> Result:
    worst = 0.0
    alpha = 7.0
    for grid in (build_uniform(0.0, 1.0, 32), build_chebyshev(0.0, 1.0, 32)):
        for deg in range(3):
            f = lambda y, d=deg: y**d  # noqa: E731
            I = fast_convolve(f(grid.nodes), grid, alpha).I
            exact = [quad_convolution(f, x, 0.0, 1.0, alpha) for x in grid.nodes]
            worst = max(worst, float(np.max(np.abs(I - exact)) / np.max(np.abs(exact))))
    return worst <= 1e-10, f"max relative error {worst:.2e}"


def check_dd_exact() -> Result:
    grid = build_uniform(-1.0, 1.0, 200)
    p = SchemeParams.from_cfl(1.0, grid.h_max)
    f = lambda x: np.exp(-36.0 * x * x)  # noqa: E731
    g = lambda x: np.zeros_like(x)  # noqa: E731
    worst = 0.0
    for cuts in ([100], [50, 100, 150]):
        for kind in ("dirichlet", "outflow"):
            bc = BCSpec.uniform(kind)
            mono = run(init_history(f(grid.nodes), g(grid.nodes), p, grid), grid, p, bc, 100)
            dd = dd_run(dd_init(split_grid(grid, cuts), f, g, p), p, bc, 100)
            worst = max(worst, float(np.max(np.abs(gather(dd)[1] - mono.u_curr))))
    return worst <= 1e-11, f"max node difference {worst:.2e}"


def check_amplification() -> Result:
    p = SchemeParams(beta=2.0, c=1.0, dt=1.0)
    worst = max(abs(abs(r) - 1.0) for w in np.linspace(0.0, 100.0, 401) for r in amplification_check(w, p))
    return worst <= 1e-12, f"max ||rho| - 1| = {worst:.2e}"


def check_neumann_constant() -> Result:
    g = Rectangle(left="neumann", right="neumann", bottom="neumann", top="neumann")
    p = SchemeParams.from_cfl(2.0, 1 / 20)
    d = build_lines(g, 1 / 20, 1 / 20, p.alpha)
    s = init_state(d, np.full(d.n_nodes, 0.7), np.zeros(d.n_nodes), p)
    for _ in range(20):
        s = step2d(s, d, p)
    dev = float(np.max(np.abs(s.u_curr - 0.7)))
    return dev <= 1e-11, f"max deviation from the constant {dev:.2e}"


def check_symmetry() -> Result:
    p = SchemeParams.from_cfl(2.0, 1 / 24)
    d = build_lines(Circle(1.0), 1 / 24, 1 / 24, p.alpha)
    f = np.exp(-8.0 * ((d.x - 0.2) ** 2 + (d.y + 0.1) ** 2)) + np.exp(-8.0 * ((d.y - 0.2) ** 2 + (d.x + 0.1) ** 2))
    s = init_state(d, f, np.zeros(d.n_nodes), p)
    for _ in range(10):
        s = step2d(s, d, p)
    key = {tuple(k): i for i, k in enumerate(d.ij)}
    swap = np.array([key[(j, i)] for i, j in d.ij])
    asym = float(np.max(np.abs(s.u_curr - s.u_curr[swap])))
    return asym <= 1e-12, f"max |u(x,y) - u(y,x)| = {asym:.2e}"


def check_snapshot_roundtrip() -> Result:
    x = np.linspace(0.0, 1.0, 57)
    u = np.sin(7.3 * x) / 3.0
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "snap.csv"
        logged = snapshot_norm({"x": x, "u": u})
        write_snapshot(path, u, x, meta={"l2_norm": repr(logged)})
        back = read_snapshot(path)
    gap = abs(snapshot_norm(back) - logged)
    return gap <= 1e-12 and l2_error(back["u"], u) == 0.0, f"norm gap {gap:.1e}"


CHECKS: List[Tuple[str, Callable[[], Result]]] = [
    ("weights match quadrature", check_weights),
    ("small-nu series branch", check_series_branch),
    ("quadratics convolved exactly", check_polynomials),
    ("decomposition reproduces undivided run", check_dd_exact),
    ("amplification roots on unit circle", check_amplification),
    ("Neumann rectangle keeps constants", check_neumann_constant),
    ("x-y symmetric data stays symmetric", check_symmetry),
    ("snapshot round trip", check_snapshot_roundtrip),
]


def run_checks(echo=print) -> bool:
    ok_all = True
    for name, fn in CHECKS:
        ok, detail = fn()
        ok_all &= ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
