"""Command line interface.

::

    moltwave [--threads K] run <config>
    moltwave [--threads K] refine <config> --levels 20 40 80
    moltwave [--threads K] decomp <config> [--levels ...]
    moltwave check

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from pathlib import Path
from typing import List, Optional

import numba
import numpy as np

from .checks import run_checks
from .config import ConfigError, RunConfig, load_config
from .norms import l2_error
from .output import RefinementReport, snapshot_norm, write_report, write_snapshot
from .studies import (boundary_points, config_time_grid, decomp_compare, exact_2d, refine, simulate_1d,
                      simulate_2d)

__all__ = ["main", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERIC"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moltwave", description="Method of lines transpose wave solver")
    p.add_argument("--threads", type=int, default=None, metavar="K", help="cap on worker threads")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one configuration and write snapshots")
    r.add_argument("config")
    f = sub.add_parser("refine", help="refinement study; writes resolution,error,order")
    f.add_argument("config")
    f.add_argument("--levels", type=int, nargs="+", required=True)
    f.add_argument("--out", default=None, help="report path (default <output_dir>/<name>_refine.csv)")
    d = sub.add_parser("decomp", help="three-way decomposition/outflow/total errors in 1D")
    d.add_argument("config")
    d.add_argument("--levels", type=int, nargs="+", default=None)
    sub.add_parser("check", help="run the built-in invariant suite")
    return p


def _snapshot_steps(cfg: RunConfig, dt: float):
    return {int(round(t / dt)): t for t in cfg.snapshot_times}


def _write(cfg: RunConfig, step: int, t: float, u, x, y=None) -> Path:
    out = Path(cfg.output_dir) / f"{cfg.name}_n{step:06d}.csv"
    data = {"x": x, "u": u} if y is None else {"x": x, "y": y, "u": u}
    meta = {"config": cfg.digest(), "t": repr(t), "step": step, "l2_norm": repr(snapshot_norm(data))}
    return write_snapshot(out, u, x, y, meta)


def _cmd_run(cfg: RunConfig, executor) -> int:
    written: List[Path] = []
    wanted = _snapshot_steps(cfg, config_time_grid(cfg).dt)
    if cfg.dimension == 1:
        count = [0]

        def on_step_1d(t, x, u):
            if count[0] in wanted:
                written.append(_write(cfg, count[0], t, u, x))
            count[0] += 1

        x, u, tg = simulate_1d(cfg, on_step=on_step_1d, executor=executor)
        print(f"{cfg.name}: {tg.n_steps} steps of dt={tg.dt:.6g}, {x.size} nodes, "
              f"max|u|={np.max(np.abs(u)):.6g}")
    else:
        exact = exact_2d(cfg)
        worst = [0.0]

        def on_step_2d(s, d):
            if s.n in wanted:
                bx, by = boundary_points(d)
                written.append(_write(cfg, s.n, s.t, np.concatenate([s.u_curr, np.zeros(bx.size)]),
                                      np.concatenate([d.x, bx]), np.concatenate([d.y, by])))
            if exact is not None and s.n > 0:
                worst[0] = max(worst[0], l2_error(s.u_curr, exact(d.x, d.y, s.t)))

        res = simulate_2d(cfg, on_step=on_step_2d)
        msg = (f"{cfg.name}: {res.time.n_steps} steps of dt={res.time.dt:.6g}, {res.domain.n_nodes} nodes, "
               f"max|u|={np.max(np.abs(res.state.u_curr)):.6g}")
        if exact is not None:
            msg += f", max L2 error {worst[0]:.6e}"
        print(msg)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_refine(cfg: RunConfig, levels, out: Optional[str], executor) -> int:
    report = refine(cfg, levels, executor)
    path = Path(out) if out else Path(cfg.output_dir) / f"{cfg.name}_refine.csv"
    write_report(path, report)
    print(report.format())
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_decomp(cfg: RunConfig, levels, executor) -> int:
    levels = levels or [cfg.N]
    results = [decomp_compare(cfg, n, executor) for n in levels]
    print("     N    dd error   outflow error   total error   dd vs exact")
    for r in results:
        print(f"{r.N:>6d}  {r.dd:10.4e}  {r.outflow:14.4e}  {r.total:12.4e}  {r.dd_total:12.4e}")
    for column in ("dd", "outflow", "total", "dd_total"):
        rep = RefinementReport(levels, [r.column(column) for r in results],
                               {"name": cfg.name, "config": cfg.digest(), "error": column})
        path = write_report(Path(cfg.output_dir) / f"{cfg.name}_decomp_{column}.csv", rep)
        print(f"wrote {path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be at least 1")
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
        if args.command == "check":
            return EXIT_OK if run_checks() else EXIT_NUMERIC
        cfg = load_config(args.config)
        with ExitStack() as stack:
            # blow-ups are reported through FloatingPointError below
            stack.enter_context(np.errstate(over="ignore", invalid="ignore"))
            executor = None
            if cfg.dimension == 1 and args.threads and args.threads > 1:
                executor = stack.enter_context(ThreadPoolExecutor(max_workers=args.threads))
            if args.command == "run":
                return _cmd_run(cfg, executor)
            if args.command == "refine":
                return _cmd_refine(cfg, args.levels, args.out, executor)
            return _cmd_decomp(cfg, args.levels, executor)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
