"""Two-tap high-speed-rail channel model.

A train UE on a straight track receives the same cell signal from the two
nearest remote radio heads (RRH1 at track coordinate 0, RRH2 at ``ds``).
Each propagation path is one tap with its own Doppler frequency offset
(DFO), relative power, integer-sample delay and Rician fading gain.  Because
the track runs very close to the RRH line (``dmin`` of a few meters), the
per-tap DFOs sit near +/- the maximum Doppler for most of the span.

The module provides both an exact time-domain application of the channel
and the analytic per-subcarrier decomposition of the demodulated signal
into a multiplicative fading coefficient plus inter-carrier interference
(ICI), so the two routes can be checked against each other.

Sign convention (test-locked): a tap's DFO is positive while the UE
approaches its RRH.  Between the RRHs the tap behind the train contributes
negative DFO and the tap ahead positive.

Time convention: phases are referenced so that the first body sample of
OFDM symbol 0 sits at t = 0.  Feed :func:`apply_channel_time_domain` a
frame whose first sample is the cyclic prefix of symbol 0 together with
``t0 = frame_start_time(grid)`` and the demodulated grid matches
:func:`analytic_freq_response` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import dirichlet_kernel

__all__ = [
    "SPEED_OF_LIGHT",
    "ScenarioGeometry",
    "TapState",
    "ChannelRealization",
    "max_dfo",
    "tap_dfos_at",
    "tap_powers_at",
    "draw_tap_gains",
    "apply_channel_time_domain",
    "frame_start_time",
    "analytic_freq_response",
    "fading_matrix",
    "ici_term",
    "sir_db",
]

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ScenarioGeometry:
    """Track/RRH layout and kinematics.

    ``ds``       distance between two neighbouring RRHs (m)
    ``dmin``     perpendicular distance from an RRH to the track (m)
    ``speed``    train speed (m/s)
    ``carrier_hz`` carrier frequency (Hz)
    ``rrh_count``  RRHs sharing one cell identity
    ``c``        propagation speed (m/s)
    """

    ds: float = 300.0
    dmin: float = 2.0
    speed: float = 350.0 / 3.6
    carrier_hz: float = 2.6e9
    rrh_count: int = 2
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.ds <= 0 or self.dmin <= 0:
            raise ValueError("ds and dmin must be positive")
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.rrh_count < 2:
            raise ValueError("rrh_count must be >= 2")


@dataclass(frozen=True)
class TapState:
    """One propagation tap: complex gain, delay, DFO and Rician K."""

    amplitude: complex
    delay_samples: float
    dfo_hz: float
    rician_k: float = np.inf

    def __post_init__(self):
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        if self.delay_samples < 0:
            raise ValueError("delay_samples must be >= 0")
        if self.rician_k < 0:
            raise ValueError("rician_k must be >= 0")


@dataclass(frozen=True)
class ChannelRealization:
    """Taps drawn for one simulation drop, with the seed that produced them."""

    taps: tuple[TapState, ...]
    seed: int = 0

    def __post_init__(self):
        if len(self.taps) < 1:
            raise ValueError("at least one tap required")


def max_dfo(geometry: ScenarioGeometry) -> float:
    """Maximum Doppler frequency offset v * fc / c in Hz."""
    return geometry.speed * geometry.carrier_hz / geometry.c


def tap_dfos_at(x: float, geometry: ScenarioGeometry) -> tuple[float, float]:
    """Per-tap DFO (Hz) for a UE at track coordinate ``x`` in [0, ds].

    The DFO of tap q is f_D * cos(theta_q) with theta_q the angle between
    the direction of travel (+x) and the UE->RRH_q line, so the magnitude
    never exceeds the maximum DFO.
    """
    if not 0 <= x <= geometry.ds:
        raise ValueError("position must lie within [0, ds]")
    fd = max_dfo(geometry)
    d0 = np.hypot(x, geometry.dmin)
    d1 = np.hypot(geometry.ds - x, geometry.dmin)
    f0 = fd * (-x) / d0
    f1 = fd * (geometry.ds - x) / d1
    return float(f0), float(f1)


def tap_powers_at(
    x: float, geometry: ScenarioGeometry, pathloss_exponent: float = 2.0
) -> tuple[float, float]:
    """Relative tap powers ~ distance^(-exponent), normalized to sum to 1."""
    if not 0 <= x <= geometry.ds:
        raise ValueError("position must lie within [0, ds]")
    if pathloss_exponent < 2:
        raise ValueError("pathloss_exponent must be >= 2")
    d0 = np.hypot(x, geometry.dmin)
    d1 = np.hypot(geometry.ds - x, geometry.dmin)
    p0 = d0**-pathloss_exponent
    p1 = d1**-pathloss_exponent
    total = p0 + p1
    return float(p0 / total), float(p1 / total)


def draw_tap_gains(
    powers,
    delays_samples,
    dfos_hz,
    rician_k: float,
    rng: np.random.Generator,
) -> tuple[TapState, ...]:
    """Draw Rician tap gains with the given mean powers.

    Each gain is sqrt(p) * [sqrt(K/(K+1)) e^{j phi} + sqrt(1/(K+1)) g]
    with phi uniform on [0, 2 pi) and g circular complex Gaussian of unit
    variance, so E|gain|^2 = p.  ``rician_k`` may be ``inf`` (deterministic
    magnitude, random phase), which the oracle tests rely on.
    """
    taps = []
    for p, delay, dfo in zip(powers, delays_samples, dfos_hz):
        phi = rng.uniform(0.0, 2.0 * np.pi)
        los = np.exp(1j * phi)
        if np.isinf(rician_k):
            gain = np.sqrt(p) * los
        else:
            diffuse = (rng.normal() + 1j * rng.normal()) / np.sqrt(2.0)
            gain = np.sqrt(p) * (
                np.sqrt(rician_k / (rician_k + 1.0)) * los
                + np.sqrt(1.0 / (rician_k + 1.0)) * diffuse
            )
        taps.append(TapState(complex(gain), float(delay), float(dfo), rician_k))
    return tuple(taps)


def frame_start_time(grid) -> float:
    """t0 that puts the first body sample of symbol 0 at t = 0."""
    return -grid.cp_len * grid.ts


def apply_channel_time_domain(
    samples: np.ndarray,
    taps,
    t0: float,
    ts: float,
    cp_len: int | None = None,
) -> np.ndarray:
    """Apply the multi-tap Doppler channel to a sample stream.

    out[n] = sum_q amp_q * in[n - delay_q] * exp(j 2 pi f_q (t0 + n ts))

    Delays must be integer sample counts; samples before the stream start
    are taken as zero.  When ``cp_len`` is given, any delay reaching it is
    rejected (inter-symbol interference is not modeled).
    """
    samples = np.asarray(samples, dtype=np.complex128)
    out = np.zeros_like(samples)
    n_idx = np.arange(samples.size)
    for tap in taps:
        delay = tap.delay_samples
        d = int(round(delay))
        if abs(delay - d) > 1e-9:
            raise ValueError(f"tap delay {delay} is not an integer sample count")
        if cp_len is not None and d >= cp_len:
            raise ValueError(
                f"tap delay {d} reaches the cyclic prefix length {cp_len}"
            )
        if d == 0:
            shifted = samples
        else:
            shifted = np.concatenate([np.zeros(d, dtype=np.complex128), samples[:-d]])
        phase = np.exp(2j * np.pi * tap.dfo_hz * (t0 + n_idx * ts))
        out += tap.amplitude * shifted * phase
    return out


def _normalized_dfo(tap: TapState, grid) -> float:
    return tap.dfo_hz / grid.delta_f


def _symbol_phase(tap: TapState, l: int, grid) -> complex:
    f_norm = _normalized_dfo(tap, grid)
    return np.exp(
        2j * np.pi / grid.n_fft * f_norm * l * (grid.n_fft + grid.cp_len)
    )


def analytic_freq_response(k: int, l: int, taps, grid):
    """Multiplicative fading coefficient at subcarrier ``k``, symbol ``l``.

    Returns ``(fading, per_tap)`` where ``per_tap[q]`` is tap q's summand
    (attenuated gain, delay phase at ``k`` and the per-symbol Doppler phase
    progression) and ``fading = sum(per_tap)``.
    """
    per_tap = np.empty(len(taps), dtype=np.complex128)
    for q, tap in enumerate(taps):
        f_norm = _normalized_dfo(tap, grid)
        a_q = (
            tap.amplitude
            / grid.n_fft
            * dirichlet_kernel(-f_norm, grid.n_fft)
            * np.exp(-2j * np.pi / grid.n_fft * tap.delay_samples * k)
        )
        per_tap[q] = a_q * _symbol_phase(tap, l, grid)
    return complex(per_tap.sum()), per_tap


def fading_matrix(taps, grid) -> np.ndarray:
    """Fading coefficients for all used subcarriers and all symbols.

    Vectorized form of :func:`analytic_freq_response`, shape
    (len(grid.used_subcarriers), grid.symbols_per_frame).
    """
    k = np.asarray(grid.used_subcarriers)
    l = np.arange(grid.symbols_per_frame)
    h = np.zeros((k.size, l.size), dtype=np.complex128)
    for tap in taps:
        f_norm = _normalized_dfo(tap, grid)
        gain = tap.amplitude / grid.n_fft * dirichlet_kernel(-f_norm, grid.n_fft)
        delay_phase = np.exp(-2j * np.pi / grid.n_fft * tap.delay_samples * k)
        symbol_phase = np.exp(
            2j * np.pi / grid.n_fft * f_norm * l * (grid.n_fft + grid.cp_len)
        )
        h += gain * np.outer(delay_phase, symbol_phase)
    return h


def ici_term(k: int, l: int, taps, data_symbols: np.ndarray, grid) -> complex:
    """Inter-carrier interference leaking into subcarrier ``k`` at symbol ``l``.

    ``data_symbols`` is the full length-N frequency grid of symbol ``l``
    (zeros on silent bins).  Each source bin i != k contributes through the
    kernel G(k - i - F_q), with the delay phase taken at the source bin --
    the exact DFT identity for a delayed, Doppler-shifted waveform.
    """
    data_symbols = np.asarray(data_symbols, dtype=np.complex128)
    if data_symbols.size != grid.n_fft:
        raise ValueError("data_symbols must cover the full FFT grid")
    i = np.arange(grid.n_fft)
    mask = i != k
    total = 0.0 + 0.0j
    for tap in taps:
        f_norm = _normalized_dfo(tap, grid)
        leak = (
            tap.amplitude
            / grid.n_fft
            * dirichlet_kernel(k - i[mask] - f_norm, grid.n_fft)
            * np.exp(-2j * np.pi / grid.n_fft * tap.delay_samples * i[mask])
        )
        total += _symbol_phase(tap, l, grid) * np.sum(data_symbols[mask] * leak)
    return complex(total)


def sir_db(taps, grid, used_subcarriers: int | None = None) -> float:
    """Signal-to-ICI power ratio (dB) on a centered subcarrier.

    Valid for the zero-delay simplification: all tap delays must be 0.
    The interference sum runs over ``used_subcarriers`` bins (default: the
    full FFT grid) around the centered target bin.
    """
    for tap in taps:
        if tap.delay_samples != 0:
            raise ValueError("sir_db assumes zero tap delays")
    n_used = grid.n_fft if used_subcarriers is None else int(used_subcarriers)
    if not 2 <= n_used <= grid.n_fft:
        raise ValueError("used_subcarriers must be in [2, n_fft]")
    k = n_used // 2
    offsets = k - np.arange(n_used)  # k - i for i in the used range

    signal = 0.0
    interference = 0.0
    for tap in taps:
        f_norm = _normalized_dfo(tap, grid)
        g = np.abs(dirichlet_kernel(offsets - f_norm, grid.n_fft)) ** 2
        weight = np.abs(tap.amplitude) ** 2
        signal += weight * g[k]  # offsets[k] == 0: the G(-F_q) term
        interference += weight * (np.sum(g) - g[k])
    if interference == 0.0:
        return np.inf
    return float(10.0 * np.log10(signal / interference))
