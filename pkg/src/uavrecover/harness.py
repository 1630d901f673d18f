"""Command line entry point: single scenarios, density sweeps, CSV/JSON output.

    uavrecover sweep --trials 15 --out results.csv --summary-out summary.csv
    uavrecover run --nodes 30 --seed 42 --algo c3run --trace trace.json

Exit status is 0 on success, 1 for configuration errors and 2 when a
topology could not be generated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence, Union

from .model import LinkParams
from .simulator import (
    ALGORITHMS,
    DEFAULT_SWEEPS,
    TopologyGenerationError,
    make_scenario,
    seed_for,
    simulate,
)

log = logging.getLogger(__name__)

RESULT_FIELDS = ("algo", "n_nodes", "trial", "seed", "success", "nodes_moved",
                 "total_distance_m", "recovery_ticks")
SUMMARY_FIELDS = ("algo", "n_nodes", "mean_nodes_moved", "mean_distance_m", "mean_ticks",
                  "success_ratio")

EXIT_OK, EXIT_CONFIG, EXIT_GENERATION = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    densities: tuple[int, ...] = (20, 25, 30, 35, 40, 45, 50)
    trials: int = 15
    algorithms: tuple[str, ...] = ("c3run", "rim", "ledir", "ccbridges")
    area: float = 300.0
    range: float = 50.0
    speed: float = 1.0
    tick: float = 1.0
    max_ticks: int = 10_000
    alpha: float = 2.0
    power: float = 1.0
    noise: float = 1.0
    seed: int = 1
    out: Optional[str] = None
    format: str = "csv"
    summary_out: Optional[str] = None
    trace: Optional[str] = None
    detection_delay: int = 0
    figures: Optional[str] = None
    jobs: int = 1
    placement: str = "mcmc"
    sweeps: int = DEFAULT_SWEEPS
    check_invariants: bool = False

    def validate(self) -> "SweepConfig":
        if not self.densities:
            raise ConfigError("--densities: at least one density is required")
        if any(n < 2 for n in self.densities):
            raise ConfigError("--densities/--nodes: every density must be >= 2")
        if self.trials < 1:
            raise ConfigError("--trials: must be >= 1")
        for name in ("area", "range", "speed", "tick", "alpha", "power", "noise"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"--{name}: must be positive, got {getattr(self, name)}")
        if self.max_ticks < 1:
            raise ConfigError("--max-ticks: must be >= 1")
        if self.detection_delay < 0:
            raise ConfigError("--detection-delay: must be >= 0")
        if self.jobs < 1:
            raise ConfigError("--jobs: must be >= 1")
        if self.sweeps < 0:
            raise ConfigError("--sweeps: must be >= 0")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"--format: expected csv or json, got {self.format!r}")
        if self.placement not in ("mcmc", "sequential", "rejection"):
            raise ConfigError(f"--placement: unknown method {self.placement!r}")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown or not self.algorithms:
            raise ConfigError(f"--algo: unknown algorithm(s) {unknown}; "
                              f"choose from {', '.join(sorted(ALGORITHMS))}")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("--seed: must be a 64-bit unsigned integer")
        return self

    def link_params(self) -> LinkParams:
        return LinkParams.from_range(self.range, self.power, self.noise, self.alpha)


@dataclass(frozen=True)
class ResultRow:
    algo: str
    n_nodes: int
    trial: int
    seed: int
    success: int
    nodes_moved: int
    total_distance_m: float
    recovery_ticks: int
    status: str = field(default="ok", compare=False)

    def sort_key(self):
        return self.algo, self.n_nodes, self.trial


@dataclass(frozen=True)
class SummaryRow:
    algo: str
    n_nodes: int
    mean_nodes_moved: float
    mean_distance_m: float
    mean_ticks: float
    success_ratio: float


# -- configuration ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{message}\n{self.format_usage().strip()}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_flags(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, metavar="FILE", help="JSON file of SweepConfig fields")
    p.add_argument("--nodes", type=int, default=S, help="single density (node count)")
    p.add_argument("--densities", type=_int_list, default=S, help="e.g. 20,30,40")
    p.add_argument("--trials", type=int, default=S)
    p.add_argument("--algo", action="append", default=S, choices=sorted(ALGORITHMS),
                   help="repeatable; default all four")
    p.add_argument("--area", type=float, default=S, help="square side in metres")
    p.add_argument("--range", type=float, default=S, help="direct-link range in metres")
    p.add_argument("--speed", type=float, default=S, help="m/s")
    p.add_argument("--tick", type=float, default=S, help="seconds per tick")
    p.add_argument("--max-ticks", type=int, default=S)
    p.add_argument("--alpha", type=float, default=S, help="path-loss exponent")
    p.add_argument("--power", type=float, default=S)
    p.add_argument("--noise", type=float, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--out", default=S, help="results file (default stdout)")
    p.add_argument("--format", default=S, choices=("csv", "json"))
    p.add_argument("--trace", default=S, help="per-tick trace JSON (run only)")
    p.add_argument("--summary-out", default=S, help="per-density summary CSV")
    p.add_argument("--detection-delay", type=int, default=S, help="ticks charged per failure")
    p.add_argument("--figures", default=S, metavar="DIR", help="render summary plots here")
    p.add_argument("--jobs", type=int, default=S, help="worker processes")
    p.add_argument("--placement", default=S, choices=("mcmc", "sequential", "rejection"))
    p.add_argument("--sweeps", type=int, default=S, help="MCMC sweeps per topology")
    p.add_argument("--check-invariants", action="store_true", default=S)


def _flag_parser(prog: str = "uavrecover") -> _Parser:
    p = _Parser(prog=prog, allow_abbrev=False)
    _add_flags(p)
    return p


_FIELD_NAMES = {f.name for f in fields(SweepConfig)}


def _coerce(values: dict, source: str) -> dict:
    out = {}
    for key, value in values.items():
        name = key.replace("-", "_")
        if name == "algo":
            name = "algorithms"
        if name == "nodes":
            name, value = "densities", [value]
        if name not in _FIELD_NAMES:
            raise ConfigError(f"{source}: unknown setting {key!r}")
        if name in ("densities", "algorithms"):
            value = tuple(value) if isinstance(value, (list, tuple)) else (value,)
        out[name] = value
    return out


def load_config_file(path: Union[str, Path]) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config: {path} is not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"--config: {path} must hold a JSON object")
    return data


def parse_config(argv: Sequence[str] = (), config_file: Optional[Union[str, Path]] = None
                 ) -> SweepConfig:
    """Build a SweepConfig: defaults < config file < command-line flags."""
    ns = vars(_flag_parser().parse_args(list(argv)))
    if "nodes" in ns and "densities" in ns:
        raise ConfigError("--nodes and --densities are mutually exclusive")
    config_file = ns.pop("config", config_file)
    merged: dict = {}
    if config_file is not None:
        file_values = load_config_file(config_file)
        if "nodes" in file_values and "densities" in file_values:
            raise ConfigError(f"{config_file}: 'nodes' and 'densities' are mutually exclusive")
        merged.update(_coerce(file_values, str(config_file)))
    merged.update(_coerce(ns, "command line"))
    try:
        cfg = replace(SweepConfig(), **merged)
        return cfg.validate()
    except TypeError as exc:
        raise ConfigError(f"bad setting type: {exc}") from None


# -- execution --------------------------------------------------------------

def _run_cell(cfg: SweepConfig, n: int, trial: int, seed: int) -> list[ResultRow]:
    try:
        scenario = make_scenario(n, seed, cfg.link_params(), cfg.area, cfg.power, cfg.speed,
                                 cfg.tick, cfg.max_ticks, cfg.detection_delay,
                                 method=cfg.placement, sweeps=cfg.sweeps)
    except TopologyGenerationError as exc:
        log.warning("n=%d trial=%d: %s", n, trial, exc)
        return [ResultRow(a, n, trial, seed, 0, 0, 0.0, 0, status="generation_failed")
                for a in cfg.algorithms]
    rows = []
    for algo in cfg.algorithms:
        rep = simulate(scenario, algo, check_invariants=cfg.check_invariants,
                       record_trace=False)
        rows.append(ResultRow(algo, n, trial, seed, int(rep.success), rep.nodes_moved,
                              rep.total_distance, rep.recovery_ticks))
    return rows


def _run_cell_star(args):
    return _run_cell(*args)


def run_sweep(config: SweepConfig) -> list[ResultRow]:
    """Every algorithm on the same scenario per (density, trial) cell."""
    cells = [(config, n, t, seed_for(config.seed, n, t))
             for n in config.densities for t in range(config.trials)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_run_cell_star, cells))
    else:
        chunks = []
        for cell in cells:
            chunks.append(_run_cell(*cell))
            log.info("n=%d trial=%d done", cell[1], cell[2])
    return sorted((r for chunk in chunks for r in chunk), key=ResultRow.sort_key)


def summarize(rows: Iterable[ResultRow]) -> list[SummaryRow]:
    groups: dict[tuple[str, int], list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.algo, r.n_nodes), []).append(r)
    out = []
    for (algo, n), rs in sorted(groups.items()):
        k = len(rs)
        out.append(SummaryRow(
            algo, n,
            sum(r.nodes_moved for r in rs) / k,
            sum(r.total_distance_m for r in rs) / k,
            sum(r.recovery_ticks for r in rs) / k,
            sum(r.success for r in rs) / k,
        ))
    return out


# -- output -----------------------------------------------------------------

def _cell(value) -> str:
    return f"{value:.6f}" if isinstance(value, float) else str(value)


def _json_value(value):
    return float(f"{value:.6f}") if isinstance(value, float) else value


def _records(rows, names):
    return [[getattr(r, k) for k in names] for r in rows]


def _emit(text: str, destination: Union[str, Path, IO[str], None]):
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {destination}: {exc.strerror}") from exc


def render_table(rows, names, fmt: str = "csv") -> str:
    if fmt == "json":
        data = [{k: _json_value(v) for k, v in zip(names, rec)} for rec in _records(rows, names)]
        return json.dumps(data, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for rec in _records(rows, names):
        w.writerow([_cell(v) for v in rec])
    return buf.getvalue()


def write_results(rows: Sequence[ResultRow], fmt: str = "csv",
                  destination: Union[str, Path, IO[str], None] = None):
    _emit(render_table(rows, RESULT_FIELDS, fmt), destination)


def write_summary(summary: Sequence[SummaryRow],
                  destination: Union[str, Path, IO[str], None] = None):
    _emit(render_table(summary, SUMMARY_FIELDS, "csv"), destination)


def write_trace(traces: dict, destination: Union[str, Path]):
    payload = {algo: {"success": rep.success, "bridges": [list(b) for b in rep.bridges],
                      "ticks": [t.as_dict() for t in rep.trace]}
               for algo, rep in traces.items()}
    _emit(json.dumps(payload, indent=1) + "\n", destination)


# -- commands ---------------------------------------------------------------

def cmd_run(cfg: SweepConfig) -> int:
    """One scenario; ``--seed`` is used directly as the scenario seed."""
    if len(cfg.densities) != 1:
        raise ConfigError("run: give exactly one density with --nodes")
    n = cfg.densities[0]
    try:
        scenario = make_scenario(n, cfg.seed, cfg.link_params(), cfg.area, cfg.power,
                                 cfg.speed, cfg.tick, cfg.max_ticks, cfg.detection_delay,
                                 method=cfg.placement, sweeps=cfg.sweeps)
    except TopologyGenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    rows, reports = [], {}
    for algo in cfg.algorithms:
        rep = simulate(scenario, algo, check_invariants=cfg.check_invariants)
        reports[algo] = rep
        rows.append(ResultRow(algo, n, 0, cfg.seed, int(rep.success), rep.nodes_moved,
                              rep.total_distance, rep.recovery_ticks))
    rows.sort(key=ResultRow.sort_key)
    write_results(rows, cfg.format, cfg.out)
    if cfg.trace:
        write_trace(reports, cfg.trace)
    return EXIT_OK


def cmd_sweep(cfg: SweepConfig) -> int:
    if cfg.trace:
        raise ConfigError("--trace is only supported by the run command")
    rows = run_sweep(cfg)
    write_results(rows, cfg.format, cfg.out)
    summary = summarize(rows)
    if cfg.summary_out:
        write_summary(summary, cfg.summary_out)
    if cfg.figures:
        from .plots import render_figures

        render_figures(summary, cfg.figures)
    failed = sum(r.status != "ok" for r in rows)
    if failed:
        print(f"error: {failed} row(s) without a generated topology", file=sys.stderr)
        return EXIT_GENERATION
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    commands = {"run": cmd_run, "sweep": cmd_sweep}
    if not argv or argv[0] in ("-h", "--help"):
        print(f"usage: uavrecover {{run,sweep}} [flags]\n\n{__doc__}")
        _flag_parser("uavrecover {run,sweep}").print_help()
        return EXIT_OK if argv else EXIT_CONFIG
    command, rest = argv[0], argv[1:]
    if command not in commands:
        print(f"error: unknown command {command!r}; expected run or sweep", file=sys.stderr)
        return EXIT_CONFIG
    if "-h" in rest or "--help" in rest:
        _flag_parser(f"uavrecover {command}").print_help()
        return EXIT_OK
    try:
        cfg = parse_config(rest)
        return commands[command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
