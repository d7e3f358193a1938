"""Command-line entry point: ``simulate``, ``compare`` and ``validate``.

Exit codes: 0 success, 1 runtime or IO failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, RunConfig, format_config, parse_config, with_overrides
from .control import CONTROLLERS, ControllerSpec
from .plant import Unreachable
from .sim import COLUMNS, Metrics, RunError, SimLog, SimulationDiverged, compare, metrics

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
TABLE_COLUMNS = ("controller", "e1_rms", "e2_rms", "eps_rms")


def fmt_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def write_log_csv(log: SimLog, path) -> None:
    lines = [",".join(COLUMNS)]
    lines.extend(",".join(fmt_float(x) for x in row) for row in log.data.tolist())
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_table_csv(rows: Sequence[tuple[str, Metrics]], path) -> None:
    lines = [",".join(TABLE_COLUMNS)]
    for label, m in rows:
        lines.append(",".join([label, fmt_float(m.e1_rms), fmt_float(m.e2_rms),
                               fmt_float(m.eps_rms)]))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_metrics_csv(label: str, planning: str, m: Metrics, path) -> None:
    rt = "" if m.reaching_time is None else fmt_float(m.reaching_time)
    lines = ["controller,planning,e1_rms,e2_rms,eps_rms,reaching_time",
             ",".join([label, planning, fmt_float(m.e1_rms), fmt_float(m.e2_rms),
                       fmt_float(m.eps_rms), rt])]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def format_table(rows: Sequence[tuple[str, Metrics]], title: str) -> str:
    out = [title, f"{'controller':<12} {'e1_rms':>12} {'e2_rms':>12} {'eps_rms':>12}"]
    for label, m in rows:
        out.append(f"{label:<12} {m.e1_rms:12.6g} {m.e2_rms:12.6g} {m.eps_rms:12.6g}")
    return "\n".join(out)


def _out_paths(out: str) -> tuple[Path, Path]:
    base = out[:-4] if out.endswith(".csv") else out
    return Path(base + ".csv"), Path(base + ".metrics.csv")


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load(path: str, allow_paper_exponents: bool = False) -> RunConfig:
    return parse_config(path, allow_paper_exponents)


def cmd_simulate(cfg: RunConfig, controller: Optional[str], planning: Optional[str],
                 out: str, allow_paper_exponents: bool = False) -> int:
    try:
        cfg = with_overrides(cfg, controller, planning, allow_paper_exponents)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    csv_path, metrics_path = _out_paths(out)
    scenario = cfg.scenario()
    spec = cfg.controller
    try:
        log = scenario.run(spec)
    except (SimulationDiverged, Unreachable) as exc:
        _err(f"{spec.label}: {exc}")
        return EXIT_RUNTIME
    m = metrics(log)
    try:
        write_log_csv(log, csv_path)
        write_metrics_csv(spec.label, cfg.sim.planning, m, metrics_path)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_RUNTIME
    rt = "none" if m.reaching_time is None else f"{m.reaching_time:.6g} s"
    print(f"{spec.label} (planning={cfg.sim.planning}): e1_rms={m.e1_rms:.6g} rad  "
          f"e2_rms={m.e2_rms:.6g} rad  eps_rms={m.eps_rms:.6g} m  reaching_time={rt}")
    print(f"wrote {csv_path} ({len(log)} rows) and {metrics_path}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, out_dir: str, workers: int = 1) -> int:
    d = Path(out_dir)
    try:
        d.mkdir(exist_ok=True)
    except OSError as exc:
        _err(f"cannot create output directory: {exc}")
        return EXIT_RUNTIME
    specs = [ControllerSpec(kind, cfg.controller.pid, cfg.controller.sliding,
                            cfg.controller.ccc, cfg.controller.k_bound) for kind in CONTROLLERS]
    for planning, table_name, title in (("none", "table1.csv", "Table 1 (planning=none)"),
                                         ("parabolic", "table2.csv",
                                          "Table 2 (planning=parabolic)")):
        try:
            rows, logs = compare(cfg.scenario(planning), specs, workers, keep_logs=True)
        except RunError as exc:
            _err(str(exc))
            return EXIT_RUNTIME
        try:
            for spec, log in zip(specs, logs):
                write_log_csv(log, d / f"{spec.kind}_{planning}.csv")
            write_table_csv(rows, d / table_name)
        except OSError as exc:
            _err(f"cannot write output: {exc}")
            return EXIT_RUNTIME
        print(format_table(rows, title))
        print()
    print(f"wrote 8 time series, table1.csv and table2.csv to {d}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    sys.stdout.write(format_config(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="contour-smc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one controller and export its time series")
    s.add_argument("--config", required=True, metavar="FILE")
    s.add_argument("--controller", choices=CONTROLLERS,
                   help="overrides [controller] kind from the config")
    s.add_argument("--planning", choices=("none", "parabolic"),
                   help="overrides [path] planning from the config")
    s.add_argument("--out", required=True, metavar="PATH",
                   help="writes PATH.csv and PATH.metrics.csv (a trailing .csv is dropped)")
    s.add_argument("--allow-paper-exponents", action="store_true",
                   help="accept alpha/beta outside (1, 2)")

    c = sub.add_parser("compare", help="run all four controllers under both planning modes")
    c.add_argument("--config", required=True, metavar="FILE")
    c.add_argument("--out-dir", required=True, metavar="DIR")
    c.add_argument("--workers", type=int, default=1, help="parallel runs (default 1)")

    v = sub.add_parser("validate", help="print the effective config without running")
    v.add_argument("--config", required=True, metavar="FILE")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    allow = getattr(args, "allow_paper_exponents", False)
    try:
        cfg = _load(args.config, allow)
    except ConfigError as exc:
        _err(f"{args.config}: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _err(f"cannot read config: {exc}")
        return EXIT_RUNTIME
    if args.command == "simulate":
        return cmd_simulate(cfg, args.controller, args.planning, args.out, allow)
    if args.command == "compare":
        if args.workers < 1:
            _err("--workers must be at least 1")
            return EXIT_USAGE
        return cmd_compare(cfg, args.out_dir, args.workers)
    return cmd_validate(cfg)


if __name__ == "__main__":
    sys.exit(main())
