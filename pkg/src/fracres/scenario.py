"""Scenario files: ``key = value`` lines, ``#`` comments, lists as ``[a, b, c]``.

Example::

    # three-site chain at the fractional resonance
    L = 3
    drive = fractional
    kappa_hz = [11.9e3, 24.39e3, 33.33e3]

Unknown keys, malformed values and violated invariants raise
:class:`ScenarioError` naming the key and line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .basis import BasisMap, Sector, StateVector, enumerate_basis
from .evolution import Schedule
from .operators import LatticeParams, NoiseParams

DEFAULT_KAPPA_HZ = (11.9e3, 24.39e3, 33.33e3)
DEFAULT_GAMMA_HZ = (13.89e3, 31.25e3, 83.33e3)

Drive = Union[str, float]


class ScenarioError(ValueError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class ScenarioConfig:
    L: int
    n_max: Optional[int] = None
    U_over_J0: float = 40.0
    J0_hz: float = 11.5e6
    omega_hz: float = 0.0
    drive: Drive = "fractional"
    open_system: bool = True
    kappa_hz: Optional[Tuple[float, ...]] = None
    gamma_hz: Optional[Tuple[float, ...]] = None
    initial: Union[str, Tuple[int, ...]] = "unit_filling"
    t_final_periods: float = 50.0
    dt_periods: float = 1 / 256
    output_stride: int = 16
    m_max: int = 3
    static_hopping: bool = False
    record_configs: bool = False
    reduce_basis: bool = True

    # derived quantities -------------------------------------------------

    @property
    def initial_config(self) -> Tuple[int, ...]:
        if self.initial == "unit_filling":
            return (1,) * self.L
        return tuple(self.initial)

    @property
    def particle_number(self) -> int:
        return sum(self.initial_config)

    @property
    def cutoff(self) -> int:
        return self.particle_number if self.n_max is None else self.n_max

    @property
    def drive_ratio(self) -> float:
        """Omega / U."""
        if self.drive == "integer":
            return 1.0
        if self.drive == "fractional":
            return 0.5
        return float(self.drive)

    def lattice_params(self) -> LatticeParams:
        J0 = 2 * math.pi * self.J0_hz
        U = self.U_over_J0 * J0
        return LatticeParams(L=self.L, n_max=self.cutoff, U=U, J0=J0,
                             Omega_drive=self.drive_ratio * U,
                             omega=2 * math.pi * self.omega_hz,
                             static_hopping=self.static_hopping)

    def noise_params(self) -> NoiseParams:
        return NoiseParams(self._rates(self.kappa_hz, DEFAULT_KAPPA_HZ),
                           self._rates(self.gamma_hz, DEFAULT_GAMMA_HZ))

    def _rates(self, given, default) -> Tuple[float, ...]:
        if given is not None:
            return tuple(given)
        # default rates cover levels 1..3; higher levels reuse the top rate
        n = self.cutoff
        return tuple(default[min(i, len(default) - 1)] for i in range(n))

    def schedule(self) -> Schedule:
        return Schedule(self.t_final_periods, self.dt_periods, self.output_stride)

    def closed_basis(self) -> BasisMap:
        return enumerate_basis(self.L, self.cutoff, Sector.fixed_n(self.particle_number))

    def full_basis(self) -> BasisMap:
        return enumerate_basis(self.L, self.cutoff, Sector.full())

    def open_basis(self) -> BasisMap:
        if self.reduce_basis:
            return enumerate_basis(self.L, self.cutoff, Sector.at_most_n(self.particle_number))
        return self.full_basis()

    def initial_state(self, basis: BasisMap) -> StateVector:
        return StateVector.basis_state(basis, self.initial_config)

    def validate(self) -> "ScenarioConfig":
        def bad(key, msg):
            raise ScenarioError(msg, key)

        if self.L < 1:
            bad("L", f"must be >= 1, got {self.L}")
        if self.n_max is not None and self.n_max < 0:
            bad("n_max", f"must be >= 0, got {self.n_max}")
        if not self.U_over_J0 > 0:
            bad("U_over_J0", "must be > 0")
        if not self.J0_hz > 0:
            bad("J0_hz", "must be > 0 (U is expressed in units of J0)")
        if not self.omega_hz >= 0:
            bad("omega_hz", "must be >= 0")
        if isinstance(self.drive, str):
            if self.drive not in ("integer", "fractional"):
                bad("drive", f"expected integer, fractional or a number Omega/U, got {self.drive!r}")
        elif not self.drive > 0:
            bad("drive", "Omega/U must be > 0")
        if self.initial != "unit_filling":
            if len(self.initial) != self.L:
                bad("initial", f"needs {self.L} occupations, got {len(self.initial)}")
            if any(n < 0 for n in self.initial):
                bad("initial", "occupations must be >= 0")
        if any(n > self.cutoff for n in self.initial_config):
            bad("n_max", f"initial configuration {self.initial_config} exceeds n_max = {self.cutoff}")
        for key, rates in (("kappa_hz", self.kappa_hz), ("gamma_hz", self.gamma_hz)):
            if rates is None:
                continue
            if len(rates) != self.cutoff:
                bad(key, f"needs one rate per level 1..n_max ({self.cutoff}), got {len(rates)}")
            if any(not r >= 0 for r in rates):
                bad(key, "rates must be >= 0")
        if not self.dt_periods > 0:
            bad("dt_periods", "must be > 0")
        if not self.t_final_periods >= self.dt_periods:
            bad("t_final_periods", "must be >= dt_periods")
        if self.output_stride < 1:
            bad("output_stride", "must be >= 1")
        if self.m_max < 1:
            bad("m_max", "must be >= 1")
        return self


FIELD_HELP = {
    "L": "number of lattice sites (required)",
    "n_max": "per-site occupation cutoff; defaults to the initial particle number",
    "U_over_J0": "on-site interaction in units of the bare hopping",
    "J0_hz": "bare hopping J0 / 2pi in Hz",
    "omega_hz": "single-site frequency / 2pi in Hz (0 = rotating frame)",
    "drive": "integer (Omega = U), fractional (Omega = U/2) or a number Omega/U",
    "open_system": "true: Lindblad run, false: Schrodinger run",
    "kappa_hz": "decay rates kappa_{n,n-1}, n = 1..n_max, in 1/s (auto = default rates)",
    "gamma_hz": "dephasing rates gamma_{n-1,n}, n = 1..n_max, in 1/s (auto = default rates)",
    "initial": "unit_filling or an occupation list such as [1, 0, 2]",
    "t_final_periods": "run length in drive periods T = 2pi/Omega",
    "dt_periods": "RK4 step in drive periods",
    "output_stride": "steps between recorded samples",
    "m_max": "highest resonance order reported",
    "static_hopping": "use constant J0 instead of J0 cos(Omega t)",
    "record_configs": "add one cfg_<occupations> column per configuration",
    "reduce_basis": "integrate open runs on the reachable sum(n) <= N block",
}

_REQUIRED = ("L",)
_FIELD_NAMES = tuple(f.name for f in fields(ScenarioConfig))
_KIND = {
    "L": "int", "n_max": "int_or_none", "U_over_J0": "float", "J0_hz": "float", "omega_hz": "float",
    "drive": "drive", "open_system": "bool", "kappa_hz": "float_list", "gamma_hz": "float_list",
    "initial": "initial", "t_final_periods": "float", "dt_periods": "float", "output_stride": "int",
    "m_max": "int", "static_hopping": "bool", "record_configs": "bool", "reduce_basis": "bool",
}

_FRACTION = re.compile(r"^\s*([-+0-9.eE]+)\s*/\s*([-+0-9.eE]+)\s*$")


def _parse_float(text: str) -> float:
    m = _FRACTION.match(text)
    if m:
        return float(m.group(1)) / float(m.group(2))
    return float(text)


def _parse_int(text: str) -> int:
    if not re.fullmatch(r"[-+]?\d+", text.strip()):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(text)


def _parse_list(text: str) -> List[str]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"expected a list like [a, b], got {text!r}")
    body = text[1:-1].strip()
    return [item.strip() for item in body.split(",")] if body else []


def _parse_value(key: str, text: str):
    kind = _KIND[key]
    text = text.strip()
    if kind == "int":
        return _parse_int(text)
    if kind == "int_or_none":
        return None if text == "auto" else _parse_int(text)
    if kind == "float":
        return _parse_float(text)
    if kind == "bool":
        if text.lower() in ("true", "yes", "1"):
            return True
        if text.lower() in ("false", "no", "0"):
            return False
        raise ValueError(f"expected true or false, got {text!r}")
    if kind == "float_list":
        if text == "auto":
            return None
        return tuple(_parse_float(item) for item in _parse_list(text))
    if kind == "drive":
        if text in ("integer", "fractional"):
            return text
        return _parse_float(text)
    if kind == "initial":
        if text == "unit_filling":
            return text
        return tuple(_parse_int(item) for item in _parse_list(text))
    raise AssertionError(kind)


def parse_scenario_text(text: str) -> ScenarioConfig:
    values: Dict[str, object] = {}
    lines: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_NAMES:
            raise ScenarioError("unknown key", key, lineno)
        if key in values:
            raise ScenarioError(f"duplicate key (first set on line {lines[key]})", key, lineno)
        try:
            values[key] = _parse_value(key, value)
        except ValueError as exc:
            raise ScenarioError(str(exc), key, lineno) from None
        lines[key] = lineno
    for key in _REQUIRED:
        if key not in values:
            raise ScenarioError("missing required key", key)
    config = ScenarioConfig(**values)
    try:
        return config.validate()
    except ScenarioError as exc:
        raise ScenarioError(str(exc).split(": ", 1)[-1], exc.key, lines.get(exc.key)) from None


def shipped_scenarios() -> List[str]:
    root = resources.files("fracres") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".txt"))


def resolve_scenario_path(name_or_path: str) -> Path:
    """A filesystem path, or the name of a bundled scenario such as ``fig2_integer``."""
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = resources.files("fracres") / "scenarios" / f"{name_or_path}.txt"
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no scenario file or bundled scenario named {name_or_path!r}")


def parse_scenario(path) -> ScenarioConfig:
    path = resolve_scenario_path(str(path))
    return parse_scenario_text(Path(path).read_text(encoding="utf-8"))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)


def format_scenario(config: ScenarioConfig) -> str:
    """Serialize every field; parsing the result gives back an equal config."""
    return "".join(f"{name} = {_format_value(getattr(config, name))}\n" for name in _FIELD_NAMES)


def defaults_help() -> str:
    defaults = ScenarioConfig(L=1)
    rows = []
    for name in _FIELD_NAMES:
        default = "(required)" if name in _REQUIRED else _format_value(getattr(defaults, name))
        if name in ("kappa_hz", "gamma_hz") and getattr(defaults, name) is None:
            rates = DEFAULT_KAPPA_HZ if name == "kappa_hz" else DEFAULT_GAMMA_HZ
            default = f"{_format_value(rates)} padded to n_max"
        rows.append(f"  {name:<16} {default:<38} {FIELD_HELP[name]}")
    return "scenario keys (key = value):\n" + "\n".join(rows)
