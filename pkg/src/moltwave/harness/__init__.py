"""Configuration, reference solutions, error norms and experiment drivers."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .norms import l2_error, observed_orders
from .output import RefinementReport, read_report, read_snapshot, write_report, write_snapshot
from .reference import reference_solution
from .studies import decomp_compare, refine

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "l2_error",
    "observed_orders",
    "RefinementReport",
    "read_report",
    "read_snapshot",
    "write_report",
    "write_snapshot",
    "reference_solution",
    "decomp_compare",
    "refine",
]
