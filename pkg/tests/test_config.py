import math

import numpy as np
import pytest

from qdcorr.config import (
    build_run_config,
    build_sweep_spec,
    format_state,
    load_config,
    parse_axis,
    parse_config,
    parse_state,
)
from qdcorr.model import EV, CLOSED_FORM_SOURCE, omega_from_field
from qdcorr.sweep import ConfigError

GOOD = """
# figure-1 style point
omega_ev = 0        # detuning frame
field_v_per_m = 25e6
dipole_e_nm = 0.1
jz_ev = 0.004
temperature_k = 25
tau = 2
renormalize = yes
"""


def test_parse_and_build():
    cfg = parse_config(GOOD)
    assert cfg["tau"] == 2.0 and cfg["renormalize"] is True
    run = build_run_config(cfg)
    assert run.params.Omega == pytest.approx(omega_from_field(EV * 1e-10, 25e6))
    assert run.params.Jz == pytest.approx(0.004 * EV)
    assert run.noise.a == 0.9 and run.noise.tau == 2.0
    assert run.state_source == CLOSED_FORM_SOURCE


def test_defaults():
    run = build_run_config({})
    assert run.params.omega == pytest.approx(1.3 * EV)
    assert run.params.temperature == 25.0 and run.nu == 0.0


@pytest.mark.parametrize("text, fragment", [
    ("bogus = 1", "unknown configuration key"),
    ("tau = fast", "expected a number"),
    ("tau = nan", "finite"),
    ("renormalize = maybe", "boolean"),
    ("just text", "key = value"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


@pytest.mark.parametrize("cfg", [
    {"Omega_ev": 0.001, "field_v_per_m": 1e6},
    {"jz_ev": 0.001, "separation_nm": 5.0},
    {"temperature_k": -1.0},
    {"tau": 0.0},
    {"nu": -1.0},
    {"separation_nm": 0.0},
    {"separation_nm": 5.0, "dipolar_variant": "other"},
])
def test_build_errors(cfg):
    with pytest.raises(ConfigError):
        build_run_config(cfg)


def test_geometry_route():
    # theta where the printed angular factor is positive
    run = build_run_config({"separation_nm": 5.0, "theta_rad": math.pi, "dipole_e_nm": 1.0})
    assert run.params.Jz > 0


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "nope.cfg"))


def test_parse_axis_forms():
    ax = parse_axis("T, 10, 20, 3")
    assert ax.name == "T" and ax.values == (10.0, 15.0, 20.0)
    ax = parse_axis("lambda: 0, 0.001, 0.004")
    assert ax.values == (0.0, 0.001, 0.004)
    for bad in ("speed, 0, 1, 3", "T, 1, 0, 3", "T, 0, 1, 1", "T, 0, 1", "nu: 1"):
        with pytest.raises(ConfigError):
            parse_axis(bad)


def test_sweep_spec_requires_axis_and_valid_choices():
    with pytest.raises(ConfigError, match="axis1"):
        build_sweep_spec({})
    with pytest.raises(ConfigError, match="discord_method"):
        build_sweep_spec({"axis1": "nu, 0, 1, 2", "discord_method": "guess"})
    with pytest.raises(ConfigError, match="renormalize"):
        build_sweep_spec({"axis1": "nu, 0, 1, 2", "renormalize": False})


def test_state_roundtrip():
    rng = np.random.default_rng(0)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    back = parse_state("# comment\n" + format_state(rho))
    assert np.array_equal(back, rho)


def test_state_file_errors():
    with pytest.raises(ConfigError, match="16 entries"):
        parse_state("1 0 0")
    with pytest.raises(ConfigError, match="bad complex"):
        parse_state(" ".join(["x"] * 16))
    with pytest.raises(ConfigError, match="invalid state"):
        parse_state(format_state(np.diag([0.5, 0.5, 0.5, 0.5])))
