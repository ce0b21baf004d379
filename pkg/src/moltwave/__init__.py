"""Method of lines transpose solvers for the wave equation.

The semi-discrete equation at each time step is a modified Helmholtz
problem, inverted with an O(N) exponential convolution in 1D and with
alternating-direction line sweeps in 2D.
"""

import numba

# OpenMP first: it tolerates kernels launched from several Python threads.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

from .kernelweights import SchemeParams, outflow_weights, simpson_weights  # noqa: E402
from .mesh1d import Grid1D, build_chebyshev, build_from_nodes, build_uniform  # noqa: E402
from .conv1d import LinePlan, fast_convolve  # noqa: E402
from .bc1d import BCSpec, OutflowState  # noqa: E402
from .stepper1d import SourceSpec, WaveState1D, init_history, run, step  # noqa: E402
from .ddecomp import dd_init, dd_run, dd_step, gather, split_grid  # noqa: E402
from .geometry import make_geometry  # noqa: E402
from .adi2d import ADIState, Domain2D, build_lines, init_state, step2d  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "SchemeParams",
    "outflow_weights",
    "simpson_weights",
    "Grid1D",
    "build_uniform",
    "build_chebyshev",
    "build_from_nodes",
    "LinePlan",
    "fast_convolve",
    "BCSpec",
    "OutflowState",
    "SourceSpec",
    "WaveState1D",
    "init_history",
    "step",
    "run",
    "dd_init",
    "dd_step",
    "dd_run",
    "gather",
    "split_grid",
    "make_geometry",
    "ADIState",
    "Domain2D",
    "build_lines",
    "init_state",
    "step2d",
]
