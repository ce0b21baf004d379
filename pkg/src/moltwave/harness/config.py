"""Run configuration read from flat ``key = value`` text.

One assignment per line; ``#`` starts a comment; blank lines are ignored.
Keys are the field names of :class:`RunConfig`.  Tuples are written as
comma-separated lists, booleans as ``true``/``false``.

Example
-------
::

    # Gaussian pulse through four subdomains with outflow ends
    dimension = 1
    layout = mixed
    N = 40
    cfl = 1.0
    t_final = 2.0
    bc_left = outflow
    bc_right = outflow
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union, get_args, get_origin, get_type_hints

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config"]

GEOMETRIES_1D = ("interval",)
GEOMETRIES_2D = ("rectangle", "circle", "double_circle", "quarter_circle", "slit_strip")
LAYOUTS = ("uniform", "chebyshev", "mixed")
INITIALS = ("gaussian_1d", "cavity_mode", "bessel_mode", "double_circle_bump", "zero")
STARTS = ("auto", "exact", "taylor")
SPACINGS = ("max", "min", "nominal")
REFERENCES = ("auto", "analytic", "self", "full_circle", "none")
SOURCES = ("none", "line_sine")
REPORT_COLUMNS = ("total", "dd", "outflow", "dd_total")
BC_NAMES = ("dirichlet", "neumann", "periodic", "outflow")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one experiment.

    Resolution is a single integer ``N``.  In 1D it counts cells (of the
    first subdomain for ``layout = mixed``); in 2D the mesh spacings are
    ``dx / N`` and ``dy / N``.
    """

    name: str = "run"
    dimension: int = 1
    geometry: str = "interval"
    # 1D
    a: float = -1.0
    b: float = 1.0
    layout: str = "uniform"
    subdomains: int = 1
    stencil: str = "local"
    bc_left: str = "outflow"
    bc_right: str = "outflow"
    # 2D
    x0: float = -0.5
    x1: float = 0.5
    y0: float = -0.5
    y1: float = 0.5
    bc_bottom: str = "dirichlet"
    bc_top: str = "dirichlet"
    radius: float = 1.0
    gamma: float = 0.2
    aperture: float = 0.1
    period: float = 1.0
    height: float = 1.0
    screen_y: float = 0.0
    dx: float = 1.0
    dy: Optional[float] = None
    # scheme
    beta: float = 2.0
    c: float = 1.0
    cfl: float = 1.0
    cfl_spacing: str = "max"
    N: int = 40
    t_final: float = 1.0
    fit_dt: bool = True
    # data
    initial: str = "gaussian_1d"
    mode_m: int = 0
    mode_n: int = 0
    bump_radius: Optional[float] = None
    start: str = "auto"
    source: str = "none"
    source_y: float = 0.25
    source_omega: Optional[float] = None
    # errors and output
    reference: str = "auto"
    reference_N: int = 8
    report: str = "total"
    error_t_min: float = 0.0
    error_t_max: Optional[float] = None
    snapshot_times: Tuple[float, ...] = field(default_factory=tuple)
    output_dir: str = "."

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.dimension}")
        allowed = GEOMETRIES_1D if self.dimension == 1 else GEOMETRIES_2D
        if self.geometry not in allowed:
            raise ConfigError(f"geometry {self.geometry!r} is not valid in {self.dimension}D; expected {allowed}")
        for key, options in (("layout", LAYOUTS), ("initial", INITIALS), ("start", STARTS),
                             ("cfl_spacing", SPACINGS), ("reference", REFERENCES), ("source", SOURCES),
                             ("report", REPORT_COLUMNS), ("stencil", ("halo", "local"))):
            if getattr(self, key) not in options:
                raise ConfigError(f"{key} must be one of {options}, got {getattr(self, key)!r}")
        for key in ("bc_left", "bc_right", "bc_bottom", "bc_top"):
            if getattr(self, key) not in BC_NAMES:
                raise ConfigError(f"{key} must be one of {BC_NAMES}, got {getattr(self, key)!r}")
        if not (self.cfl > 0 and math.isfinite(self.cfl)):
            raise ConfigError("cfl must be positive")
        if not self.c > 0:
            raise ConfigError("wave speed c must be positive")
        if not self.beta > 0:
            raise ConfigError("beta must be positive")
        if not self.t_final > 0:
            raise ConfigError("t_final must be positive")
        if self.N < 1 or self.reference_N < 1:
            raise ConfigError("resolutions must be positive integers")
        if self.dimension == 1:
            if not self.b > self.a:
                raise ConfigError("interval needs b > a")
            if self.subdomains < 1:
                raise ConfigError("subdomains must be at least 1")
            if self.layout == "mixed" and self.subdomains not in (1, 4):
                raise ConfigError("the mixed layout has exactly four subdomains")
            if (self.bc_left == "periodic") != (self.bc_right == "periodic"):
                raise ConfigError("periodic ends come in pairs")
        if self.initial == "gaussian_1d" and self.dimension != 1:
            raise ConfigError("gaussian_1d is a 1D initial condition")
        if self.initial in ("cavity_mode",) and self.geometry != "rectangle":
            raise ConfigError("cavity_mode needs a rectangle")
        if self.initial == "bessel_mode" and self.geometry not in ("circle", "quarter_circle"):
            raise ConfigError("bessel_mode needs a circle or quarter circle")
        if self.initial == "double_circle_bump" and self.geometry != "double_circle":
            raise ConfigError("double_circle_bump needs the double circle")
        if self.reference == "full_circle" and self.geometry != "quarter_circle":
            raise ConfigError("full_circle reference applies to the quarter circle only")
        if self.error_t_max is not None and self.error_t_max < self.error_t_min:
            raise ConfigError("error window is empty")
        if any(t < 0 or t > self.t_final + 1e-12 for t in self.snapshot_times):
            raise ConfigError("snapshot times must lie in [0, t_final]")

    @property
    def spacing_y(self) -> float:
        return self.dx if self.dy is None else self.dy

    def with_updates(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        """Short hash identifying the configuration in reports."""
        text = "\n".join(f"{f.name}={getattr(self, f.name)!r}" for f in dataclasses.fields(self))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def _base_type(tp):
    if get_origin(tp) is Union:
        args = [a for a in get_args(tp) if a is not type(None)]
        return args[0], True
    return tp, False


def _convert(key: str, raw: str, tp):
    base, optional = _base_type(tp)
    text = raw.strip()
    if optional and text.lower() in ("none", ""):
        return None
    try:
        if base is bool:
            low = text.lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(text)
            return low in ("true", "yes", "1")
        if base is int:
            return int(text)
        if base is float:
            return float(text)
        if get_origin(base) is tuple:
            return tuple(float(p) for p in text.split(",") if p.strip())
        return text
    except ValueError:
        raise ConfigError(f"cannot read {key} = {raw!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse flat ``key = value`` text into a :class:`RunConfig`."""
    hints = get_type_hints(RunConfig)
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in hints:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, hints[key])
    return RunConfig(**values)


def load_config(path: Union[str, Path]) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)
