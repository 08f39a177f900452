"""Link-level OFDM simulator and channel-estimation library for the
two-tap high-speed-rail scenario.

Layers, bottom up: :mod:`~hsrlink.numerics` (kernels and dense solves),
:mod:`~hsrlink.channel` (geometry, Doppler, fading/ICI decomposition),
:mod:`~hsrlink.ofdm` (grid, pilots, QAM, AWGN, LS observations),
:mod:`~hsrlink.dfo` (multi-path Doppler estimation and its grid-search
baseline), :mod:`~hsrlink.chanest` (correlation models, Wiener/LMMSE and
linear interpolation) and :mod:`~hsrlink.harness` (seeded Monte Carlo
sweeps, metrics, CSV).
"""

from .channel import (
    ChannelRealization,
    ScenarioGeometry,
    TapState,
    max_dfo,
    sir_db,
    tap_dfos_at,
    tap_powers_at,
)
from .chanest import (
    hsr_correlation_model,
    legacy_correlation_model,
    linear_interp_estimate,
    lmmse_estimate,
)
from .config import load_config
from .dfo import (
    build_delay_basis,
    es_estimate,
    estimate_dfos,
    multiplication_count,
    separate_taps,
)
from .harness import (
    MetricsRecord,
    SimConfig,
    default_config,
    find_p3db,
    run_drop,
    sweep,
    throughput_proxy,
    write_csv,
)
from .ofdm import PilotPattern, ResourceGrid, crs_pilot_pattern, lte10_grid

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "MetricsRecord",
    "PilotPattern",
    "ResourceGrid",
    "ScenarioGeometry",
    "SimConfig",
    "TapState",
    "build_delay_basis",
    "crs_pilot_pattern",
    "default_config",
    "es_estimate",
    "estimate_dfos",
    "find_p3db",
    "hsr_correlation_model",
    "legacy_correlation_model",
    "linear_interp_estimate",
    "lmmse_estimate",
    "load_config",
    "lte10_grid",
    "max_dfo",
    "multiplication_count",
    "run_drop",
    "separate_taps",
    "sir_db",
    "sweep",
    "tap_dfos_at",
    "tap_powers_at",
    "throughput_proxy",
    "write_csv",
    "__version__",
]
