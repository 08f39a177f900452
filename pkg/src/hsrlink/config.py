"""TOML configuration files for the simulation harness.

Every :class:`~hsrlink.harness.SimConfig` field is addressable through
nested sections (geometry / grid / pilots / taps / estimators / dfo /
sweep); unknown keys anywhere are rejected so typos fail loudly rather
than silently running defaults.
"""

from __future__ import annotations

import math

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .channel import ScenarioGeometry
from .harness import SimConfig
from .ofdm import crs_pilot_pattern, lte10_grid

__all__ = ["ConfigError", "load_config", "config_from_dict", "DEFAULT_CONFIG_TOML"]


class ConfigError(ValueError):
    """A configuration file does not match the expected schema."""


_SCHEMA = {
    "": {"seed", "drops"},
    "geometry": {"ds", "dmin", "speed_kmh", "carrier_ghz"},
    "grid": {"n_fft", "cp_len", "delta_f", "n_rb", "symbols_per_frame"},
    "pilots": {"symbol_indices", "per_rb", "seed"},
    "taps": {"delays", "rician_k_db", "pathloss_exponent"},
    "estimators": {"selected", "block_rb", "ici_noise_inflation"},
    "dfo": {"method", "es_f_max", "es_step", "pair_policy"},
    "sweep": {"snr_db", "position", "sweep_points", "traffic"},
}

DEFAULT_CONFIG_TOML = """\
# Link-level simulation configuration (all values shown are the defaults).
seed = 1
drops = 100

[geometry]
ds = 300.0          # inter-RRH distance (m)
dmin = 2.0          # RRH-to-track distance (m)
speed_kmh = 350.0
carrier_ghz = 2.6

[grid]
n_fft = 1024
cp_len = 72
delta_f = 15000.0
n_rb = 50
symbols_per_frame = 14

[pilots]
symbol_indices = [0, 4, 7, 11]
per_rb = 2          # pilot subcarriers per resource block per pilot symbol
seed = 2024         # fixes the QPSK pilot values

[taps]
delays = [0.0, 4.0] # samples, must stay below cp_len
rician_k_db = 10.0  # use inf for deterministic magnitudes
pathloss_exponent = 2.0

[estimators]
selected = ["linear", "lmmse-legacy", "elmmse-ideal", "elmmse-estimated"]
block_rb = 25       # frequency filter window width in resource blocks
ici_noise_inflation = false

[dfo]
method = "proposed" # or "es"
es_f_max = 900.0
es_step = 2.0
pair_policy = "consecutive"

[sweep]
snr_db = [10.0, 20.0, 30.0]
position = "p3db"   # a track coordinate in meters, "p3db" or "sweep"
sweep_points = 11
traffic = "qam16"   # or "pilots-only"
"""


def _check_keys(section: str, given: dict) -> None:
    allowed = _SCHEMA[section]
    for key, value in given.items():
        if section == "" and isinstance(value, dict):
            if key not in _SCHEMA:
                raise ConfigError(f"unknown section [{key}]")
            _check_keys(key, value)
        elif key not in allowed:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"unknown key {key!r} in {where}")


def config_from_dict(data: dict) -> SimConfig:
    """Build a SimConfig from a parsed configuration mapping."""
    _check_keys("", data)
    geo = data.get("geometry", {})
    geometry = ScenarioGeometry(
        ds=float(geo.get("ds", 300.0)),
        dmin=float(geo.get("dmin", 2.0)),
        speed=float(geo.get("speed_kmh", 350.0)) / 3.6,
        carrier_hz=float(geo.get("carrier_ghz", 2.6)) * 1e9,
    )
    gr = data.get("grid", {})
    grid = lte10_grid(
        n_fft=int(gr.get("n_fft", 1024)),
        cp_len=int(gr.get("cp_len", 72)),
        delta_f=float(gr.get("delta_f", 15e3)),
        n_rb=int(gr.get("n_rb", 50)),
        symbols_per_frame=int(gr.get("symbols_per_frame", 14)),
    )
    pi = data.get("pilots", {})
    pilots = crs_pilot_pattern(
        grid,
        symbol_indices=tuple(pi.get("symbol_indices", (0, 4, 7, 11))),
        per_rb=int(pi.get("per_rb", 2)),
        seed=int(pi.get("seed", 2024)),
    )
    ta = data.get("taps", {})
    es = data.get("estimators", {})
    df = data.get("dfo", {})
    sw = data.get("sweep", {})
    position = sw.get("position", "p3db")
    if not isinstance(position, str):
        position = float(position)
    rician = ta.get("rician_k_db", 10.0)
    rician = math.inf if rician == "inf" else float(rician)
    try:
        return SimConfig(
            geometry=geometry,
            grid=grid,
            pilots=pilots,
            tap_delays=tuple(float(d) for d in ta.get("delays", (0.0, 4.0))),
            rician_k_db=rician,
            pathloss_exponent=float(ta.get("pathloss_exponent", 2.0)),
            estimators=tuple(es.get("selected", list(("linear", "lmmse-legacy", "elmmse-ideal", "elmmse-estimated")))),
            dfo_method=str(df.get("method", "proposed")),
            es_f_max=float(df.get("es_f_max", 900.0)),
            es_step=float(df.get("es_step", 2.0)),
            pair_policy=str(df.get("pair_policy", "consecutive")),
            snr_db=tuple(float(s) for s in sw.get("snr_db", (10.0, 20.0, 30.0))),
            position=position,
            sweep_points=int(sw.get("sweep_points", 11)),
            drops=int(data.get("drops", 100)),
            seed=int(data.get("seed", 1)),
            traffic=str(sw.get("traffic", "qam16")),
            block_rb=int(es.get("block_rb", 25)),
            ici_noise_inflation=bool(es.get("ici_noise_inflation", False)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> SimConfig:
    """Load and validate a TOML configuration file."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from exc
    return config_from_dict(data)
