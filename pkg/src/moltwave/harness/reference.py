"""Closed-form solutions and initial data for the benchmark problems."""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from scipy.special import j0, jn_zeros

__all__ = [
    "Z20",
    "gaussian_pulse",
    "gaussian_pulse_xx",
    "dalembert_gaussian",
    "cavity_frequency",
    "cavity_mode",
    "cavity_laplacian_factor",
    "bessel_mode",
    "double_circle_bump",
    "reference_solution",
]

# second positive zero of J0
Z20 = float(jn_zeros(0, 2)[1])


def gaussian_pulse(x, a: float = -1.0, b: float = 1.0):
    """``exp(-36 ((2x - b - a) / (b - a))^2)``, centred on ``[a, b]``."""
    s = (2.0 * np.asarray(x, dtype=float) - b - a) / (b - a)
    return np.exp(-36.0 * s * s)


def gaussian_pulse_xx(x, a: float = -1.0, b: float = 1.0):
    s = (2.0 * np.asarray(x, dtype=float) - b - a) / (b - a)
    k = 2.0 / (b - a)
    return (72.0 * 72.0 * s * s - 72.0) * k * k * np.exp(-36.0 * s * s)


def dalembert_gaussian(x, t: float, a: float = -1.0, b: float = 1.0, c: float = 1.0):
    """Free-space solution ``(f(x - ct) + f(x + ct)) / 2`` with zero initial velocity."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (gaussian_pulse(x - c * t, a, b) + gaussian_pulse(x + c * t, a, b))


def _wavenumbers(m: int, n: int, Lx: float, Ly: float) -> Tuple[float, float]:
    return (2 * m + 1) * math.pi / Lx, (2 * n + 1) * math.pi / Ly


def cavity_frequency(m: int, n: int, Lx: float = 1.0, Ly: float = 1.0, c: float = 1.0) -> float:
    kx, ky = _wavenumbers(m, n, Lx, Ly)
    return c * math.hypot(kx, ky)


def cavity_laplacian_factor(m: int, n: int, Lx: float = 1.0, Ly: float = 1.0) -> float:
    """``-(kx^2 + ky^2)``: the mode is an eigenfunction of the Laplacian."""
    kx, ky = _wavenumbers(m, n, Lx, Ly)
    return -(kx * kx + ky * ky)


def cavity_mode(x, y, t: float, kind: str = "dirichlet", m: int = 0, n: int = 0,
                box=(-0.5, 0.5, -0.5, 0.5), c: float = 1.0):
    """Standing mode of a rectangular cavity centred in ``box``.

    Dirichlet walls carry ``cos(kx x) cos(ky y)``; Neumann walls
    ``sin(kx x) sin(ky y)``, with ``x``, ``y`` measured from the centre.
    """
    x0, x1, y0, y1 = box
    Lx, Ly = x1 - x0, y1 - y0
    kx, ky = _wavenumbers(m, n, Lx, Ly)
    X = np.asarray(x, dtype=float) - 0.5 * (x0 + x1)
    Y = np.asarray(y, dtype=float) - 0.5 * (y0 + y1)
    if kind == "dirichlet":
        shape = np.cos(kx * X) * np.cos(ky * Y)
    elif kind == "neumann":
        shape = np.sin(kx * X) * np.sin(ky * Y)
    else:
        raise ValueError(f"cavity kind must be 'dirichlet' or 'neumann', got {kind!r}")
    return shape * math.cos(cavity_frequency(m, n, Lx, Ly, c) * t)


def bessel_mode(x, y, t: float, R: float = 1.0, c: float = 1.0):
    """Radial mode ``J0(z20 r / R) cos(z20 c t / R)`` of a disc."""
    r = np.hypot(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return j0(Z20 * r / R) * math.cos(Z20 * c * t / R)


def double_circle_bump(x, y, gamma: float = 0.2, rho=None):
    """Opposite ``cos^6`` bumps at ``(-gamma, 0)`` and ``(gamma, 0)`` and their Laplacian.

    Each bump is ``cos^6(pi/2 (r/rho)^2)`` for ``r < rho`` with
    ``rho = 0.8 gamma`` by default; the left one is negated.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho = 0.8 * gamma if rho is None else rho
    u = np.zeros(np.broadcast(x, y).shape)
    lap = np.zeros_like(u)
    for cx, sign in ((-gamma, -1.0), (gamma, 1.0)):
        r = np.hypot(x - cx, y)
        m = r < rho
        th = 0.5 * math.pi * (r[m] / rho) ** 2
        cs, sn = np.cos(th), np.sin(th)
        th_r = math.pi * r[m] / rho**2
        th_rr = math.pi / rho**2
        f_rr = 30.0 * cs**4 * sn**2 * th_r**2 - 6.0 * cs**6 * th_r**2 - 6.0 * cs**5 * sn * th_rr
        u[m] += sign * cs**6
        # f_r / r is regular at r = 0 because th_r / r is constant
        lap[m] += sign * (f_rr - 6.0 * cs**5 * sn * math.pi / rho**2)
    return u, lap


def reference_solution(kind: str, point, t: float, **params):
    """Evaluate a named exact solution at ``point`` (``x`` or ``(x, y)``).

    Kinds are ``dalembert_gaussian``, ``cavity_dirichlet``,
    ``cavity_neumann`` and ``bessel_j0``; ``params`` are forwarded (for
    example ``m``, ``n``, ``box``, ``R``, ``c``).
    """
    if kind == "dalembert_gaussian":
        return dalembert_gaussian(point, t, **params)
    if kind in ("cavity_dirichlet", "cavity_neumann"):
        x, y = point
        return cavity_mode(x, y, t, kind=kind.split("_")[1], **params)
    if kind == "bessel_j0":
        x, y = point
        return bessel_mode(x, y, t, **params)
    raise ValueError(f"unknown reference solution {kind!r}")
