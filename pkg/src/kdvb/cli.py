"""Command-line driver: config parsing, runs, lambda sweeps and CSV output.

Usage::

    kdvb solve  run.cfg [--output-dir DIR]
    kdvb sweep  run.cfg --lambda 0,-1,-0.5 [--output-dir DIR] [--jobs N]

A config file holds ``key=value`` lines; ``#`` starts a comment and blank
lines are ignored. Recognised keys:

``scenario`` (required)
    ``example1`` or ``example2``.
``lambda``
    Extension parameter of the basis (default 0).
``h``, ``dt``, ``theta``, ``stop_time``, ``threshold``
    Overrides of the scenario defaults.
``record_times``
    Comma-separated snapshot times; the last one is the stop time.
``boundary``
    ``default`` (the scenario's own), ``neumann3``, ``neumann``,
    ``exact-neumann`` or ``exact-dirichlet`` (the last two need an exact
    solution, i.e. ``example1``).
``output_dir``
    Where CSV files go (default ``output``).

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .boundary import exact_dirichlet_closure, exact_neumann_closure, neumann_closure, well_posed_neumann_closure
from .diagnostics import conserved_quantities, find_peaks, linf_error
from .discretization import nodal_values
from .scenarios import (
    SCENARIOS,
    Scenario,
    exact_traveling_wave,
    exact_traveling_wave_dx,
    exact_traveling_wave_dxx,
    make_scenario,
    simulate,
)
from .stepper import SolverError, step_counts

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

PROFILE_HEADER = ("x", "U", "V")
DIAGNOSTICS_HEADER = ("t", "linf", "c1", "c2", "c3", "c4", "peaks")
SWEEP_HEADER = ("lambda",) + DIAGNOSTICS_HEADER

_FLOAT_KEYS = ("lambda", "h", "dt", "theta", "stop_time", "threshold")
_KNOWN_KEYS = ("scenario", "record_times", "boundary", "output_dir") + _FLOAT_KEYS
_BOUNDARIES = ("default", "neumann3", "neumann", "exact-neumann", "exact-dirichlet")


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending line number."""


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """A validated run description.

    ``overrides`` only holds keys present in the file; everything else
    comes from the scenario constructor. ``lines`` maps each key to the line
    it was read from so later checks can point at it.
    """

    scenario: str
    lam: float = 0.0
    overrides: dict = dataclasses.field(default_factory=dict)
    output_dir: Path = Path("output")
    boundary: str = "default"
    lines: dict = dataclasses.field(default_factory=dict)

    def with_lambda(self, lam: float) -> RunConfig:
        return dataclasses.replace(self, lam=float(lam))

    def with_output_dir(self, path) -> RunConfig:
        return dataclasses.replace(self, output_dir=Path(path))


def format_number(x: float) -> str:
    """Scientific notation with 17 significant digits, enough to round-trip any double."""
    return "%.16e" % x


def _where(lines: dict, key: str) -> str:
    return f"line {lines[key]}" if key in lines else "config"


def _parse_float(value: str, key: str, lineno: int) -> float:
    try:
        v = float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} must be a number, got {value!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"line {lineno}: {key} must be finite, got {value!r}")
    return v


def parse_config(text: str) -> RunConfig:
    """Parse and validate a ``key=value`` config document.

    Raises
    ------
    ConfigError
        For a malformed line, unknown or repeated key, non-numeric value,
        missing ``scenario`` or a violated constraint (e.g. ``h`` not
        dividing the interval). Messages start with ``line <n>:``.
    """
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}; known keys are {', '.join(_KNOWN_KEYS)}")
        if key in raw:
            raise ConfigError(f"line {lineno}: {key!r} already set on line {lines[key]}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = value
        lines[key] = lineno

    if "scenario" not in raw:
        raise ConfigError("config: missing required key 'scenario'")
    if raw["scenario"] not in SCENARIOS:
        raise ConfigError(f"line {lines['scenario']}: unknown scenario {raw['scenario']!r}; expected one of {SCENARIOS}")

    values = {k: _parse_float(raw[k], k, lines[k]) for k in _FLOAT_KEYS if k in raw}
    overrides = {k: v for k, v in values.items() if k != "lambda"}
    if "record_times" in raw:
        parts = [p.strip() for p in raw["record_times"].split(",")]
        overrides["record_times"] = tuple(_parse_float(p, "record_times", lines["record_times"]) for p in parts)

    boundary = raw.get("boundary", "default")
    if boundary not in _BOUNDARIES:
        raise ConfigError(f"{_where(lines, 'boundary')}: unknown boundary {boundary!r}; expected one of {_BOUNDARIES}")

    config = RunConfig(
        scenario=raw["scenario"],
        lam=values.get("lambda", 0.0),
        overrides=overrides,
        output_dir=Path(raw.get("output_dir", "output")),
        boundary=boundary,
        lines=lines,
    )
    build_scenario(config)
    return config


def build_scenario(config: RunConfig) -> Scenario:
    """Scenario with the config's overrides applied and checked.

    Raises
    ------
    ConfigError
        If an override violates a constraint.
    """
    ov = dict(config.overrides)
    lines = config.lines
    records = ov.pop("record_times", None)
    kwargs = {k: ov[k] for k in ("h", "dt", "theta") if k in ov}
    if records is not None:
        if "stop_time" in ov and ov["stop_time"] != records[-1]:
            raise ConfigError(
                f"{_where(lines, 'stop_time')}: stop_time={ov['stop_time']} disagrees with the last record time {records[-1]}"
            )
        kwargs["stop_time"] = records[-1]
    elif "stop_time" in ov:
        kwargs["stop_time"] = ov["stop_time"]

    for key in ("h", "dt"):
        if key in kwargs and not kwargs[key] > 0:
            raise ConfigError(f"{_where(lines, key)}: {key} must be positive")
    if "theta" in kwargs and kwargs["theta"] < 0:
        raise ConfigError(f"{_where(lines, 'theta')}: theta must be non-negative")
    if "stop_time" in kwargs and kwargs["stop_time"] < 0:
        raise ConfigError(f"{_where(lines, 'stop_time')}: stop_time must be non-negative")
    threshold = ov.get("threshold")
    if threshold is not None and not threshold > 0:
        raise ConfigError(f"{_where(lines, 'threshold')}: threshold must be positive")

    try:
        scenario = make_scenario(config.scenario, **kwargs)
    except ValueError as exc:
        key = "h" if "h" in kwargs else "scenario"
        raise ConfigError(f"{_where(lines, key)}: {exc}") from None

    changes = {}
    if records is not None:
        changes["record_times"] = tuple(records)
    if threshold is not None:
        changes["threshold"] = threshold
    if config.boundary != "default":
        changes["closure"], changes["fit_with_closure"] = _closure_factory(config, scenario)
    if changes:
        scenario = dataclasses.replace(scenario, **changes)

    try:
        step_counts(scenario.params, 0.0, scenario.record_times)
    except ValueError as exc:
        key = "record_times" if records is not None else ("stop_time" if "stop_time" in lines else "dt")
        raise ConfigError(f"{_where(lines, key)}: {exc}") from None
    if scenario.record_times[0] < 0:
        raise ConfigError(f"{_where(lines, 'record_times')}: record times must be non-negative")
    return scenario


def _closure_factory(config: RunConfig, scenario: Scenario):
    name = config.boundary
    if name == "neumann":
        return (lambda table, params: neumann_closure()), False
    if name == "neumann3":
        return (lambda table, params: well_posed_neumann_closure(params.mu)), False
    if scenario.exact is None:
        raise ConfigError(f"{_where(config.lines, 'boundary')}: boundary {name!r} needs an exact solution")
    a, b = scenario.interval
    theta, mu = scenario.params.theta, scenario.params.mu
    u = lambda x, t: exact_traveling_wave(x, t, theta, mu)  # noqa: E731
    ux = lambda x, t: exact_traveling_wave_dx(x, t, theta, mu)  # noqa: E731
    uxx = lambda x, t: exact_traveling_wave_dxx(x, t, theta, mu)  # noqa: E731
    if name == "exact-neumann":
        return (lambda table, params: exact_neumann_closure(table, ux, uxx, a, b, params.mu)), True
    # nodal interpolation already matches Dirichlet data; its relations would duplicate those rows
    return (lambda table, params: exact_dirichlet_closure(table, u, ux, a, b)), False


def _time_label(t: float) -> str:
    return format(t, ".6f").rstrip("0").rstrip(".")


def _diagnostic_rows(config: RunConfig):
    """March one configuration; yield ``(t, state, sim, row, n_peaks)`` per record time."""
    scenario = build_scenario(config)
    sim = simulate(scenario, config.lam)
    for t, state in sim.snapshots:
        cq = conserved_quantities(state, sim.table, sim.grid, scenario.params)
        peaks = find_peaks(state, sim.table, sim.grid, scenario.threshold)
        linf = "" if scenario.exact is None else format_number(linf_error(state, sim.table, sim.grid, scenario.exact, t))
        peak_field = ";".join(f"{format_number(p.position)}:{format_number(p.height)}" for p in peaks)
        row = [format_number(t), linf, *(format_number(c) for c in cq), peak_field]
        yield t, state, sim, row, len(peaks)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def run(config: RunConfig, echo: bool = True) -> dict:
    """Execute one run and write its CSV files into ``config.output_dir``.

    Writes ``profile_t<time>.csv`` (``x,U,V``) per record time and
    ``diagnostics.csv`` (``t,linf,c1,c2,c3,c4,peaks``).

    Returns
    -------
    dict
        ``files`` (written paths) and ``rows`` (diagnostics rows as strings).

    Raises
    ------
    SolverError
        If a time step fails.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, rows = [], []
    for t, state, sim, row, n_peaks in _diagnostic_rows(config):
        nv = nodal_values(state, sim.table, sim.grid)
        profile = out / f"profile_t{_time_label(t)}.csv"
        _write_csv(profile, PROFILE_HEADER,
                   ([format_number(x), format_number(u), format_number(v)] for x, u, v in zip(sim.grid.nodes, nv.U, nv.V)))
        files.append(profile)
        rows.append(row)
        if echo:
            linf = f" linf={row[1]}" if row[1] else ""
            print(f"lambda={config.lam:g} t={t:g}{linf} c1={row[2]} c2={row[3]} c3={row[4]} c4={row[5]} peaks={n_peaks}")
    diag = out / "diagnostics.csv"
    _write_csv(diag, DIAGNOSTICS_HEADER, rows)
    files.append(diag)
    return {"files": files, "rows": rows}


def _run_quiet(config: RunConfig) -> list:
    return run(config, echo=False)["rows"]


def sweep_lambda(config: RunConfig, lambdas: Sequence[float], jobs: int = 1) -> Path:
    """Run ``config`` once per lambda and write ``sweep.csv``.

    Each run writes its own files under ``<output_dir>/lambda_<value>``.
    Rows of the comparison file follow the order of ``lambdas`` whatever
    order the runs finish in.
    """
    if not lambdas:
        raise ConfigError("sweep: at least one lambda value is required")
    out = Path(config.output_dir)
    configs = [config.with_lambda(lam).with_output_dir(out / f"lambda_{lam:g}") for lam in lambdas]
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_quiet, configs))
    else:
        results = [_run_quiet(c) for c in configs]

    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    rows = []
    for lam, block in zip(lambdas, results):
        for row in block:
            rows.append([format_number(lam), *row])
            print(f"lambda={lam:g} t={float(row[0]):g} c1={row[2]} c2={row[3]} c3={row[4]} c4={row[5]}")
    _write_csv(path, SWEEP_HEADER, rows)
    return path


def _parse_lambdas(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--lambda: expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"--lambda: expected comma-separated finite numbers, got {text!r}")
    return vals


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kdvb", description="KdV-Burgers collocation solver")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one configuration")
    p_solve.add_argument("config", type=Path)
    p_solve.add_argument("--output-dir", type=Path)

    p_sweep = sub.add_parser("sweep", help="run one configuration for several lambda values")
    p_sweep.add_argument("config", type=Path)
    p_sweep.add_argument("--lambda", dest="lambdas", required=True, help="comma-separated values, e.g. 0,-1,-0.5")
    p_sweep.add_argument("--output-dir", type=Path)
    p_sweep.add_argument("--jobs", type=int, default=1, help="number of runs to execute concurrently")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        config = parse_config(text)
        if args.output_dir is not None:
            config = config.with_output_dir(args.output_dir)
        if args.command == "solve":
            run(config)
        else:
            sweep_lambda(config, _parse_lambdas(args.lambdas), jobs=max(1, args.jobs))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
