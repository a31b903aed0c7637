"""
Run configuration: parameter tables, unit parsing and validation.

Frequencies given as bare numbers are angular frequencies in the same units
as ``omega1`` (natural units when omega1 is left at 1).  A value with an SI
suffix such as ``400THz`` or ``10 MHz`` is a cyclic frequency in Hz and is
converted to rad/s.  Times with a suffix (fs, ps, ns, us, ms, s) are in
seconds; bare times are in the units conjugate to omega1.  Lengths accept
m, mm, um and nm.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, ValidationError, create_model

__all__ = [
    "COMMANDS",
    "FORMATS",
    "Param",
    "COMMAND_PARAMS",
    "RunConfig",
    "UsageError",
    "parse_frequency",
    "parse_time",
    "parse_length",
    "parse_grid",
    "load_config_file",
    "build_config",
]

COMMANDS = ("bogoliubov", "photons", "shift", "dynamics", "sweep", "reflectivity", "intensity")
FORMATS = ("csv", "json", "svg")


class UsageError(ValueError):
    """Invalid or incomplete command-line / config-file input (exit code 2)."""


_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12, "phz": 1e15}
_TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15}
_LENGTH_UNITS = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}


def _split_unit(text: Any, what: str) -> tuple[float, str]:
    if isinstance(text, bool):
        raise ValueError(f"expected a {what}, got a boolean")
    if isinstance(text, (int, float)):
        return float(text), ""
    m = re.fullmatch(rf"\s*({_NUMBER})\s*([A-Za-z]*)\s*", str(text))
    if not m:
        raise ValueError(f"cannot parse {what} {text!r}")
    return float(m.group(1)), m.group(2)


def _finite(x: float, text: Any) -> float:
    if not math.isfinite(x):
        raise ValueError(f"value {text!r} is not finite")
    return x


def parse_frequency(text: Any) -> float:
    """Angular frequency; SI-suffixed values are cyclic Hz and get a factor 2 pi."""
    value, unit = _split_unit(text, "frequency")
    if not unit:
        return _finite(value, text)
    try:
        scale = _FREQ_UNITS[unit.lower()]
    except KeyError:
        raise ValueError(f"unknown frequency unit {unit!r} (use Hz, kHz, MHz, GHz, THz, PHz)") from None
    return _finite(2.0 * math.pi * value * scale, text)


def parse_time(text: Any) -> tuple[float, bool]:
    """(value, is_si): SI-suffixed values are converted to seconds."""
    value, unit = _split_unit(text, "time")
    if not unit:
        return _finite(value, text), False
    try:
        return _finite(value * _TIME_UNITS[unit.lower()], text), True
    except KeyError:
        raise ValueError(f"unknown time unit {unit!r} (use fs, ps, ns, us, ms, s)") from None


def parse_length(text: Any) -> float:
    value, unit = _split_unit(text, "length")
    if not unit:
        return _finite(value, text)
    try:
        return _finite(value * _LENGTH_UNITS[unit.lower()], text)
    except KeyError:
        raise ValueError(f"unknown length unit {unit!r} (use m, mm, um, nm)") from None


@dataclass(frozen=True)
class Grid:
    start: Any
    stop: Any
    count: int


def parse_grid(text: Any) -> Grid:
    """``start:stop:count`` (or a 3-element list) with count >= 1."""
    if isinstance(text, Grid):
        return text
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"grid {text!r} must have the form start:stop:count")
    try:
        count = float(parts[2])
    except (TypeError, ValueError):
        raise ValueError(f"grid count {parts[2]!r} is not a number") from None
    if count != int(count) or count < 1:
        raise ValueError(f"grid {text!r} needs a positive integer count (an empty grid is not allowed)")
    return Grid(parts[0], parts[1], int(count))


def _int(text: Any) -> int:
    if isinstance(text, bool):
        raise ValueError("expected an integer, got a boolean")
    try:
        x = float(text)
    except (TypeError, ValueError):
        raise ValueError(f"expected an integer, got {text!r}") from None
    if x != int(x):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(x)


def _float(text: Any) -> float:
    if isinstance(text, bool):
        raise ValueError("expected a number, got a boolean")
    try:
        return _finite(float(text), text)
    except (TypeError, ValueError):
        raise ValueError(f"expected a number, got {text!r}") from None


def _bool(text: Any) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _grid_of(parse):
    def inner(text):
        g = parse_grid(text)
        return Grid(parse(g.start), parse(g.stop), g.count)
    return inner


def _time_grid(text):
    g = parse_grid(text)
    (lo, si_lo), (hi, si_hi) = parse_time(g.start), parse_time(g.stop)
    if si_lo != si_hi:
        raise ValueError("grid endpoints must both carry a time unit or both be bare")
    return Grid((lo, si_lo), (hi, si_hi), g.count)


_TYPES = {
    "float": Annotated[float, BeforeValidator(_float)],
    "int": Annotated[int, BeforeValidator(_int)],
    "bool": Annotated[bool, BeforeValidator(_bool)],
    "str": str,
    "frequency": Annotated[float, BeforeValidator(parse_frequency)],
    "time": Annotated[tuple, BeforeValidator(parse_time)],
    "length": Annotated[float, BeforeValidator(parse_length)],
    "grid": Annotated[Grid, BeforeValidator(_grid_of(_float))],
    "frequency_grid": Annotated[Grid, BeforeValidator(_grid_of(parse_frequency))],
    "time_grid": Annotated[Grid, BeforeValidator(_time_grid)],
}

_UNIT_NOTE = {
    "frequency": "angular frequency; bare = units of omega1, or cyclic with SI suffix e.g. 400THz",
    "time": "bare = units of 1/omega1, or with suffix fs/ps/ns/us/ms/s",
    "length": "bare = arbitrary length unit, or with suffix m/mm/um/nm",
    "grid": "start:stop:count",
    "frequency_grid": "start:stop:count of frequencies (same units as a frequency)",
    "time_grid": "start:stop:count of times (same units as a time)",
}


@dataclass(frozen=True)
class Param:
    name: str
    kind: str
    default: Any
    help: str
    choices: tuple = ()
    required: bool = False
    check: tuple | None = None  # (predicate, description of the valid range)

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")

    def annotation(self):
        if self.choices:
            return Literal[self.choices]
        return _TYPES[self.kind]

    def help_text(self) -> str:
        note = _UNIT_NOTE.get(self.kind)
        text = self.help + (f" [{note}]" if note else "")
        if self.required:
            return text + " (required)"
        if self.default is not None:
            return text + f" (default: {self.default})"
        return text


_POSITIVE = (lambda v: v > 0, "must be positive")
_AT_LEAST_ONE = (lambda v: v >= 1, "must be >= 1")
_NON_NEGATIVE = (lambda v: v >= 0, "must be >= 0")
_UNIT_OPEN = (lambda v: 0 < v < 1, "must satisfy 0 < value < 1")

_GEOMETRY = (
    Param("ratio", "float", None, "sub-cavity length ratio a = r/L, 0 < a < 1", required=True,
          check=_UNIT_OPEN),
    Param("omega1", "frequency", 1.0, "fundamental sub-cavity frequency; sets the natural unit",
          check=_POSITIVE),
)
_LENGTHS = (
    Param("sub_length", "length", None, "sub-cavity length r; with --length replaces --ratio",
          check=_POSITIVE),
    Param("length", "length", None, "global cavity length L; with --sub-length replaces --ratio",
          check=_POSITIVE),
)
_TRUNCATION = Param("truncation", "int", 10_000, "number of global modes N kept in mode sums",
                    check=_AT_LEAST_ONE)

COMMAND_PARAMS: dict[str, tuple[Param, ...]] = {
    "bogoliubov": (
        _GEOMETRY[0],
        *_LENGTHS,
        Param("mode", "int", 1, "sub-cavity mode index j", check=_AT_LEAST_ONE),
        Param("truncation", "int", 20, "largest global mode index n tabulated", check=_AT_LEAST_ONE),
    ),
    "photons": (
        _GEOMETRY[0],
        *_LENGTHS,
        Param("mode", "int", 1, "sub-cavity mode index j", check=_AT_LEAST_ONE),
        _TRUNCATION,
    ),
    "shift": (
        *_GEOMETRY,
        *_LENGTHS,
        _TRUNCATION,
        Param("nu", "frequency", None, "control-atom transition frequency (optional)", check=_POSITIVE),
        Param("linewidth", "frequency", None, "control-atom linewidth gamma (optional)", check=_NON_NEGATIVE),
    ),
    "dynamics": (
        *_GEOMETRY,
        *_LENGTHS,
        Param("model", "str", "rabi", "evolution model", choices=("rabi", "perturbative", "oracle")),
        Param("method", "str", "gaussian_exact", "perturbative method",
              choices=("delta_r_approx", "gaussian_exact")),
        Param("coupling", "frequency", None, "drive coupling g", required=True, check=_NON_NEGATIVE),
        Param("detuning", "frequency", 0.0, "drive detuning delta = nu - omega_D"),
        Param("t_grid", "time_grid", None, "evaluation times", required=True),
        _TRUNCATION,
        Param("fock_cutoff", "int", 40, "photon-number cutoff of the reduced vacuum state", check=_AT_LEAST_ONE),
        Param("global_modes", "int", 3, "oracle: number of global modes kept", check=_AT_LEAST_ONE),
        Param("cutoff", "int", 6, "oracle: photons per global mode", check=_AT_LEAST_ONE),
        Param("counter_rotating", "bool", True, "oracle: keep counter-rotating terms"),
        Param("global_free", "bool", True, "oracle: include the free global-mode Hamiltonian"),
    ),
    "sweep": (
        Param("axis", "str", None, "sweep axis", choices=("detuning", "ratio"), required=True),
        Param("ratio", "float", None, "length ratio a (detuning axis)", check=_UNIT_OPEN),
        _GEOMETRY[1],
        Param("delta_grid", "frequency_grid", None, "detuning grid (detuning axis)"),
        Param("ratio_grid", "grid", None, "length-ratio grid (ratio axis)"),
        Param("time", "time", 0.5, "interaction time t (detuning axis)"),
        Param("coupling", "frequency", 1e-3, "drive coupling g (detuning axis)", check=_NON_NEGATIVE),
        _TRUNCATION,
        Param("fock_cutoff", "int", 40, "photon-number cutoff of the reduced vacuum state", check=_AT_LEAST_ONE),
    ),
    "reflectivity": (
        Param("reff_grid", "grid", None, "effective reflectivity grid inside (0, 1)", required=True),
        Param("mode", "int", 1, "sub-cavity mode index m", check=_AT_LEAST_ONE),
        Param("truncation", "int", 512, "number of switched modes summed", check=_AT_LEAST_ONE),
        Param("halfwidth", "float", 1.0, "cavity parameter a (walls at -a/2, a/2)", check=_POSITIVE),
        Param("reference", "str", "vacuum", "subtract the unswitched overlaps or not",
              choices=("vacuum", "none")),
    ),
    "intensity": (
        Param("pump_grid", "frequency_grid", None, "pump frequency grid", required=True),
        _GEOMETRY[1],
        Param("finesse", "float", 100.0, "cavity finesse F", check=_POSITIVE),
        Param("attenuation", "float", 0.0, "mirror attenuation r_att, 0 <= r_att < 1", check=(lambda v: 0 <= v < 1, "must satisfy 0 <= value < 1")),
        Param("c_r_sq", "float", 1.0, "reflective-branch weight |c_R|^2 in [0, 1]", check=(lambda v: 0 <= v <= 1, "must lie in [0, 1]")),
        Param("i0", "float", 1.0, "input intensity I0"),
    ),
}


def _params_model(command: str):
    fields = {}
    for p in COMMAND_PARAMS[command]:
        fields[p.name] = (p.annotation() | None, None)
    return create_model(f"{command.title()}Parameters", __config__=ConfigDict(extra="forbid"), **fields)


_PARAM_MODELS = {c: _params_model(c) for c in COMMANDS}


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Literal[COMMANDS]
    parameters: dict[str, Any]
    output_path: str | None = None
    output_formats: tuple[Literal[FORMATS], ...] = ("json",)

    def value(self, name: str):
        return self.parameters[name]


@dataclass(frozen=True)
class ConfigFile:
    data: dict
    text: str
    path: str

    def line_of(self, key: str) -> int | None:
        pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
        for i, line in enumerate(self.text.splitlines(), start=1):
            if pattern.search(line):
                return i
        return None


def load_config_file(path: str) -> ConfigFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}:1: top level must be a JSON object")
    allowed = {"command", "parameters", "output_path", "output_formats"}
    for key in data:
        if key not in allowed:
            where = ConfigFile(data, text, path).line_of(key)
            raise UsageError(f"{path}:{where}: unknown top-level key {key!r} (allowed: {sorted(allowed)})")
    if "parameters" in data and not isinstance(data["parameters"], dict):
        where = ConfigFile(data, text, path).line_of("parameters")
        raise UsageError(f"{path}:{where}: 'parameters' must be an object")
    return ConfigFile(data, text, path)


def _location(name: str, cfg: ConfigFile | None, from_file: set) -> str:
    flag = "--" + name.replace("_", "-")
    if cfg is not None and name in from_file:
        line = cfg.line_of(name)
        return f"{cfg.path}:{line}: parameter {name!r}" if line else f"{cfg.path}: parameter {name!r}"
    return flag


def build_config(command: str | None, flags: dict, formats: str | None, output: str | None,
                 cfg: ConfigFile | None = None) -> RunConfig:
    """Merge config-file values with flags (flags win) and validate everything."""
    file_data = cfg.data if cfg else {}
    if command is None:
        command = file_data.get("command")
    if command is None:
        raise UsageError("no command given (on the command line or in the config file)")
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    if cfg and "command" in file_data and file_data["command"] != command:
        raise UsageError(
            f"{cfg.path}:{cfg.line_of('command')}: config command {file_data['command']!r} "
            f"does not match {command!r}"
        )
    file_params = dict(file_data.get("parameters", {}))
    merged = {**file_params, **flags}
    from_file = set(file_params) - set(flags)

    model = _PARAM_MODELS[command]
    try:
        validated = model(**merged)
    except ValidationError as exc:
        messages = []
        for err in exc.errors():
            name = str(err["loc"][0]) if err["loc"] else "?"
            where = _location(name, cfg, from_file)
            if err["type"] == "extra_forbidden":
                messages.append(f"{where}: unknown parameter for {command!r}")
            else:
                msg = err["msg"].removeprefix("Value error, ")
                messages.append(f"{where}: {msg}")
        raise UsageError("; ".join(messages)) from None

    params = {}
    names = {p.name for p in COMMAND_PARAMS[command]}
    for p in COMMAND_PARAMS[command]:
        value = getattr(validated, p.name)
        if p.name == "ratio" and value is None and "sub_length" in names:
            sub, total = validated.sub_length, validated.length
            if sub is not None and total is not None:
                value = sub / total
            elif sub is not None or total is not None:
                raise UsageError("--sub-length and --length must be given together")
        if value is None:
            if p.name == "ratio" and "sub_length" in names:
                raise UsageError(f"missing required parameter --ratio (or --sub-length with --length) for {command!r}")
            if p.required:
                raise UsageError(f"missing required parameter {p.flag} for {command!r}")
            value = p.default
        if p.kind == "time" and isinstance(value, (int, float)):
            value = (float(value), False)
        if p.check is not None and value is not None and not p.check[0](value):
            where = _location(p.name, cfg, from_file)
            raise UsageError(f"{where}: {p.check[1]}, got {value}")
        params[p.name] = value

    if formats is None:
        fmts = file_data.get("output_formats", ["json"])
    else:
        fmts = [f.strip() for f in formats.split(",") if f.strip()]
    if isinstance(fmts, str):
        fmts = [fmts]
    bad = [f for f in fmts if f not in FORMATS]
    if bad or not fmts:
        raise UsageError(f"--format must be a comma-separated subset of {','.join(FORMATS)}; got {fmts}")
    out = output if output is not None else file_data.get("output_path")
    return RunConfig(
        command=command,
        parameters=params,
        output_path=out,
        output_formats=tuple(dict.fromkeys(fmts)),
    )
