"""``key = value`` configuration files and two-qubit state files."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import NoiseParams
from .model import (
    DEFAULT_OMEGA_EV,
    EV,
    NM,
    CLOSED_FORM_SOURCE,
    InvalidGeometryError,
    InvalidParameterError,
    ModelParams,
    jz_from_geometry,
    omega_from_field,
)
from .qmat import InvalidInputError, InvalidStateError, check_state
from .sweep import AXIS_NAMES, Axis, ConfigError, SweepSpec

FLOAT_KEYS = {
    "omega_ev", "Omega_ev", "field_v_per_m", "dipole_e_nm", "dipole_angle_rad", "jz_ev",
    "separation_nm", "theta_rad", "lambda_ev", "temperature_k", "a", "tau", "nu",
}
STR_KEYS = {"state_source", "discord_method", "dipolar_variant", "output", "axis1", "axis2"}
BOOL_KEYS = {"renormalize"}

DEFAULTS = {
    "omega_ev": DEFAULT_OMEGA_EV,
    "lambda_ev": 0.0,
    "temperature_k": 25.0,
    "a": 0.9,
    "tau": 5.0,
    "nu": 0.0,
    "dipole_e_nm": 1.0,
    "dipole_angle_rad": 0.0,
    "state_source": CLOSED_FORM_SOURCE,
    "discord_method": "x-formula",
    "dipolar_variant": "printed",
    "renormalize": True,
}


def _parse_bool(key: str, raw: str) -> bool:
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in FLOAT_KEYS:
            try:
                value = float(raw)
            except ValueError:
                raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
            if not math.isfinite(value):
                raise ConfigError(f"{key}: value must be finite")
            cfg[key] = value
        elif key in BOOL_KEYS:
            cfg[key] = _parse_bool(key, raw)
        elif key in STR_KEYS:
            cfg[key] = raw
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    noise: NoiseParams
    nu: float
    state_source: str
    discord_method: str
    renormalize: bool


def build_run_config(cfg: dict) -> RunConfig:
    """Turn parsed keys into model and noise parameters."""
    c = {**DEFAULTS, **cfg}
    dipole = c["dipole_e_nm"] * EV * NM
    if "Omega_ev" in cfg and "field_v_per_m" in cfg:
        raise ConfigError("give either Omega_ev or field_v_per_m, not both")
    if "field_v_per_m" in cfg:
        try:
            Omega = omega_from_field(dipole, c["field_v_per_m"], c["dipole_angle_rad"])
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None
    else:
        Omega = c.get("Omega_ev", 0.0) * EV
    if "jz_ev" in cfg and "separation_nm" in cfg:
        raise ConfigError("give either jz_ev or separation_nm/theta_rad, not both")
    if "separation_nm" in cfg:
        try:
            jz = jz_from_geometry(dipole, c["separation_nm"] * NM, c.get("theta_rad", 0.0),
                                  c["dipolar_variant"])
        except (InvalidGeometryError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    else:
        jz = c.get("jz_ev", 0.0) * EV
    try:
        params = ModelParams(c["omega_ev"] * EV, Omega, jz, c["lambda_ev"] * EV, c["temperature_k"])
        noise = NoiseParams(c["a"], c["tau"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if c["nu"] < 0:
        raise ConfigError("nu must be non-negative")
    return RunConfig(params, noise, c["nu"], c["state_source"], c["discord_method"], c["renormalize"])


def parse_axis(raw: str) -> Axis:
    """``name, start, stop, count`` or ``name: v1, v2, ...``."""
    try:
        if ":" in raw:
            name, rest = raw.split(":", 1)
            values = tuple(float(v) for v in rest.split(","))
            return Axis(name.strip(), values)
        name, start, stop, count = (s.strip() for s in raw.split(","))
        return Axis.linspace(name, float(start), float(stop), int(count))
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"malformed axis {raw!r}; expected one of {AXIS_NAMES} with "
                          "'name, start, stop, count' or 'name: v1, v2, ...'") from None


def build_sweep_spec(cfg: dict) -> SweepSpec:
    if "axis1" not in cfg:
        raise ConfigError("sweep spec needs an axis1 entry")
    run = build_run_config(cfg)
    axis2 = parse_axis(cfg["axis2"]) if "axis2" in cfg else None
    return SweepSpec(run.params, run.noise, parse_axis(cfg["axis1"]), axis2, run.nu,
                     run.state_source, run.discord_method, run.renormalize, cfg.get("output"))


def format_state(rho) -> str:
    """Four lines of four ``re+imj`` entries."""
    a = np.asarray(rho, dtype=complex)
    return "\n".join(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row) for row in a) + "\n"


def parse_state(text: str) -> np.ndarray:
    """Read 16 whitespace-separated complex entries (row-major); ``#`` lines are skipped."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if len(tokens) != 16:
        raise ConfigError(f"state file needs 16 entries, found {len(tokens)}")
    try:
        values = [complex(t) for t in tokens]
    except ValueError as exc:
        raise ConfigError(f"bad complex entry: {exc}") from None
    rho = np.array(values, dtype=complex).reshape(4, 4)
    try:
        return check_state(rho)
    except (InvalidInputError, InvalidStateError) as exc:
        raise ConfigError(f"invalid state: {exc}") from None
