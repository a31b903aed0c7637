"""
Command-line interface.

    vacuumprobe photons --ratio 0.5 --truncation 10000
    vacuumprobe shift --omega1 400THz --ratio 1e-3 --nu 1000THz --linewidth 10MHz
    vacuumprobe sweep --axis detuning --ratio 1e-3 --delta-grid -0.2:0.05:51 --output out --format csv,json,svg

All modules run in natural units with omega1 = 1; conversion happens here.
Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

from . import dynamics, modes, switching
from .config import (
    COMMAND_PARAMS,
    COMMANDS,
    FORMATS,
    Grid,
    RunConfig,
    UsageError,
    build_config,
    load_config_file,
)
from .errors import VacuumProbeError
from .results import SweepResult
from .serialization import IoError, OutputRecord, provenance, to_json, write_outputs

__all__ = ["build_parser", "parse_config", "run", "main", "worker_count"]

THREADS_ENV = "VACUUMPROBE_THREADS"

_DESCRIPTIONS = {
    "bogoliubov": "tabulate alpha/beta coefficients of sub-cavity mode j against global modes",
    "photons": "vacuum photon number of a left sub-cavity mode",
    "shift": "vacuum frequency shift delta_R = omega1 * sum |beta_1n|^2",
    "dynamics": "control-atom transition probability P_R(t)",
    "sweep": "P_R versus detuning, or photon number versus length ratio",
    "reflectivity": "particle content versus effective mirror reflectivity",
    "intensity": "cavity intensity comb versus pump frequency",
}


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(1, min(8, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    """Evaluate fn over items with results kept in index order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=argparse.SUPPRESS, metavar="PATH",
                   help="JSON parameter file; command-line flags override its values")
    p.add_argument("--output", default=argparse.SUPPRESS, metavar="PATH",
                   help="output path stem; one file per format. Without it the JSON record goes to stdout")
    p.add_argument("--format", default=argparse.SUPPRESS, metavar="LIST",
                   help=f"comma-separated subset of {','.join(FORMATS)} (default: json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vacuumprobe",
        description="Vacuum particle content of a divided cavity and the resulting control-atom dynamics.",
        epilog=f"Frequencies: bare numbers are angular, in the units of omega1; SI suffixes "
               f"(Hz..PHz) denote cyclic frequencies. {THREADS_ENV} caps the sweep worker count.",
    )
    _add_io_flags(parser)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name, help=_DESCRIPTIONS[name], description=_DESCRIPTIONS[name])
        _add_io_flags(p)
        for param in COMMAND_PARAMS[name]:
            kwargs: dict[str, Any] = {"dest": param.name, "default": argparse.SUPPRESS,
                                      "help": param.help_text()}
            if param.kind == "bool":
                kwargs["action"] = argparse.BooleanOptionalAction
            else:
                kwargs["metavar"] = param.name.upper()
                if param.choices:
                    kwargs["choices"] = param.choices
                    kwargs.pop("metavar")
            p.add_argument(param.flag, **kwargs)
    return parser


def parse_config(args: Sequence[str]) -> RunConfig:
    """Parse argv (without the program name) into a validated RunConfig."""
    parser = build_parser()
    ns = vars(parser.parse_args(list(args)))
    command = ns.pop("command", None)
    cfg_path = ns.pop("config", None)
    output = ns.pop("output", None)
    formats = ns.pop("format", None)
    cfg = load_config_file(cfg_path) if cfg_path else None
    return build_config(command, ns, formats, output, cfg)


def _grid(g: Grid, scale: Callable[[Any], float] = float) -> np.ndarray:
    return np.linspace(scale(g.start), scale(g.stop), g.count)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Grid):
        return {"start": _jsonable(value.start), "stop": _jsonable(value.stop), "count": value.count}
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], bool):
        return {"value": value[0], "si_seconds": value[1]}
    return value


class _Units:
    """Conversion to natural units, omega1 -> 1."""

    def __init__(self, omega1: float):
        if not omega1 > 0:
            raise UsageError(f"--omega1 must be positive, got {omega1}")
        self.omega1 = omega1

    def freq(self, f: float) -> float:
        return f / self.omega1

    def time(self, t) -> float:
        value, _ = t
        return value * self.omega1


def _geometry(ratio: float) -> modes.CavityGeometry:
    return modes.CavityGeometry(ratio, omega1=1.0)


def _run_bogoliubov(p: dict, natural: dict, workers: int):
    a, j, N = p["ratio"], p["mode"], p["truncation"]
    if N < 1 or j < 1:
        raise UsageError("--mode and --truncation must be >= 1")
    n = np.arange(1, N + 1)
    obs = {
        f"{k.value}_{s.value}": modes.bogoliubov_matrix(s, k, j, n, a)
        for s in modes.Side for k in modes.Kind
    }
    return {"sweep": SweepResult("n", n, obs, {"ratio": a, "j": j}).to_dict()}


def _run_photons(p: dict, natural: dict, workers: int):
    rep = modes.subcavity_photon_number(p["mode"], p["ratio"], p["truncation"])
    return {"scalars": {
        "photon_number": rep.total,
        "partial_sum": rep.value,
        "tail_estimate": rep.tail,
        "partial_sum_half_truncation": rep.half_value,
        "relative_change_on_doubling": rep.relative_change,
        "truncation": rep.truncation,
    }}


def _run_shift(p: dict, natural: dict, workers: int):
    rep = modes.subcavity_photon_number(1, p["ratio"], p["truncation"])
    shift = p["omega1"] * rep.total
    scalars = {
        "photon_number": rep.total,
        "relative_change_on_doubling": rep.relative_change,
        "delta_R_over_omega1": rep.total,
        "delta_R": shift,
        "delta_R_cyclic": shift / (2.0 * math.pi),
    }
    if p["nu"] is not None:
        scalars["delta_R_over_nu"] = shift / p["nu"]
    if p["linewidth"] is not None:
        scalars["delta_R_over_linewidth"] = shift / p["linewidth"] if p["linewidth"] > 0 else math.inf
    return {"scalars": scalars}


def _state(ratio: float, N: int, cutoff: int):
    table = modes.bogoliubov_table(_geometry(ratio), N, 1)
    return table, dynamics.reduced_vacuum_state(table, cutoff)


def _run_dynamics(p: dict, natural: dict, workers: int):
    g, delta, t = natural["coupling"], natural["detuning"], natural["t_grid"]
    drive = dynamics.QubitDrive.from_detuning(delta, g)
    model = p["model"]
    if model == "rabi":
        shift = modes.subcavity_photon_number(1, p["ratio"], p["truncation"]).total
        res = dynamics.rabi_evolve(drive, shift, t)
    elif model == "perturbative":
        _, state = _state(p["ratio"], p["truncation"], p["fock_cutoff"])
        prob = dynamics.pr_perturbative(drive, state, 1.0, t, p["method"])
        res = SweepResult("t", t, {"P_R": np.atleast_1d(prob)},
                          {"model": "perturbative", "method": p["method"]})
    else:
        M = p["global_modes"]
        table = modes.bogoliubov_table(_geometry(p["ratio"]), M, 1)
        res = dynamics.fock_oracle_evolve(
            table, drive, M, p["cutoff"], t,
            counter_rotating=p["counter_rotating"], global_free=p["global_free"],
        )
    return {"sweep": res.to_dict()}


def _run_sweep(p: dict, natural: dict, workers: int):
    if p["axis"] == "detuning":
        if p["ratio"] is None:
            raise UsageError("missing required parameter --ratio for the detuning axis")
        if p["delta_grid"] is None:
            raise UsageError("missing required parameter --delta-grid for the detuning axis")
        deltas = natural["delta_grid"]
        _, state = _state(p["ratio"], p["truncation"], p["fock_cutoff"])
        drive = dynamics.QubitDrive.from_detuning(0.0, natural["coupling"])
        mapper = lambda fn, xs: _pmap(fn, list(xs), workers)  # noqa: E731
        res = dynamics.detuning_sweep(drive, state, 1.0, natural["time"], deltas, mapper=mapper)
        return {"sweep": res.to_dict()}
    if p["ratio_grid"] is None:
        raise UsageError("missing required parameter --ratio-grid for the ratio axis")
    ratios = _grid(p["ratio_grid"])
    reports = _pmap(lambda a: modes.subcavity_photon_number(1, a, p["truncation"]), list(ratios), workers)
    obs = {
        "photon_number": [r.total for r in reports],
        "partial_sum": [r.value for r in reports],
        "tail_estimate": [r.tail for r in reports],
    }
    return {"sweep": SweepResult("ratio", ratios, obs, {"truncation": p["truncation"]}).to_dict()}


def _run_reflectivity(p: dict, natural: dict, workers: int):
    reffs = _grid(p["reff_grid"])
    if np.any(reffs <= 0) or np.any(reffs >= 1):
        raise UsageError("--reff-grid values must lie strictly inside (0, 1)")

    def point(r):
        return switching.particle_number_imperfect(
            p["mode"], r, p["truncation"], p["reference"], p["halfwidth"]
        )

    values = _pmap(point, list(reffs), workers)
    lams = [switching.lambda_for_reflectivity(r) for r in reffs]
    res = SweepResult("r_eff", reffs, {"particle_number": values, "lambda": lams},
                      {"mode": p["mode"], "reference": p["reference"]})
    return {"sweep": res.to_dict()}


def _run_intensity(p: dict, natural: dict, workers: int):
    pumps = natural["pump_grid"]
    vals = dynamics.cavity_intensity(pumps, 1.0, p["finesse"], p["attenuation"], p["c_r_sq"], p["i0"])
    res = SweepResult("pump_frequency", pumps, {"intensity": np.atleast_1d(vals)},
                      {"finesse": p["finesse"], "attenuation": p["attenuation"]})
    return {"sweep": res.to_dict()}


_RUNNERS = {
    "bogoliubov": _run_bogoliubov,
    "photons": _run_photons,
    "shift": _run_shift,
    "dynamics": _run_dynamics,
    "sweep": _run_sweep,
    "reflectivity": _run_reflectivity,
    "intensity": _run_intensity,
}


def _natural(config: RunConfig) -> dict:
    """Natural-unit values of every dimensional parameter the command consumes."""
    p = config.parameters
    units = _Units(p.get("omega1", 1.0))
    out = {}
    for param in COMMAND_PARAMS[config.command]:
        v = p[param.name]
        if v is None:
            continue
        if param.kind == "frequency" and param.name != "omega1":
            out[param.name] = units.freq(v)
        elif param.kind == "time":
            out[param.name] = units.time(v)
        elif param.kind == "frequency_grid":
            out[param.name] = _grid(v, units.freq)
        elif param.kind == "time_grid":
            out[param.name] = _grid(v, units.time)
    return out


def run(config: RunConfig, workers: int | None = None) -> OutputRecord:
    """Execute a validated configuration and return its output record."""
    workers = worker_count() if workers is None else workers
    natural = _natural(config)
    results = _RUNNERS[config.command](config.parameters, natural, workers)
    inputs = {k: _jsonable(v) for k, v in config.parameters.items()}
    inputs["natural_units"] = {
        k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in natural.items()
    }
    return OutputRecord(
        command=config.command,
        inputs=inputs,
        results=results,
        provenance=provenance(),
    )


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(argv)
        workers = worker_count()
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"vacuumprobe: error: {exc}", file=sys.stderr)
        return 2
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            record = run(config, workers)
        for w in caught:
            print(f"vacuumprobe: warning: {w.category.__name__}: {w.message}", file=sys.stderr)
        if config.output_path:
            write_outputs(record, config.output_path, config.output_formats)
        else:
            sys.stdout.write(to_json(record))
    except UsageError as exc:
        print(f"vacuumprobe: error: {exc}", file=sys.stderr)
        return 2
    except (VacuumProbeError, ArithmeticError, ValueError, IoError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "command": config.command}
        print(json.dumps(diag), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
