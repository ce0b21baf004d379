"""Discrete error norms and observed orders."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

__all__ = ["l2_error", "observed_orders"]


def l2_error(numeric, reference=None, weights: Optional[np.ndarray] = None) -> float:
    """Weighted discrete L2 norm of ``numeric - reference``.

    ``sqrt(sum(e_j^2 w_j) / sum(w_j))`` with ``w`` the local cell measure;
    equal weights (the default) give the root mean square.
    """
    e = np.asarray(numeric, dtype=float)
    if reference is not None:
        e = e - np.asarray(reference, dtype=float)
    if e.size == 0:
        raise ValueError("cannot take the norm of an empty field")
    if weights is None:
        return float(np.sqrt(np.mean(e * e)))
    w = np.asarray(weights, dtype=float)
    if w.shape != e.shape:
        raise ValueError("weights must match the field shape")
    if np.any(w < 0) or not w.sum() > 0:
        raise ValueError("weights must be non-negative with a positive sum")
    return float(np.sqrt(np.sum(e * e * w) / np.sum(w)))


def observed_orders(resolutions: Sequence[float], errors: Sequence[float]):
    """``log(e_{i-1} / e_i) / log(r_i / r_{i-1})``; the first entry is NaN."""
    out = [math.nan]
    for (r0, e0), (r1, e1) in zip(zip(resolutions, errors), list(zip(resolutions, errors))[1:]):
        if e0 > 0 and e1 > 0 and r1 != r0:
            out.append(math.log(e0 / e1) / math.log(r1 / r0))
        else:
            out.append(math.nan)
    return out
