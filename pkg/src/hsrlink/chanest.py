"""Channel correlation models and pilot-based channel estimators.

Two correlation variants drive the Wiener filtering:

* ``hsr`` -- the two-tap model's own second-order statistics: per-tap
  powers attenuated by |G(-F_q)|^2/N^2, delay phases across subcarriers and
  per-tap Doppler phasors across symbols.  Parameterized by per-tap DFOs,
  either genie-provided or estimated.
* ``legacy`` -- the conventional isotropic-scattering assumptions: a
  power-delay frequency correlation without Doppler attenuation and the
  Jakes time correlation J0(2 pi l f_D T) driven only by the maximum DFO.

Filters interpolate from the pilot lattice to the full grid through the
cross-correlation form W = R_tp (R_pp + noise_ratio I)^(-1), which reduces
to pure pilot smoothing when targets coincide with pilots.  Frequency
filtering runs in windowed blocks (default 25 resource blocks wide, i.e.
two windows across the 10 MHz band) so a solve never exceeds the pilot
count per window; filtering order is frequency first, then time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import bessel_j0, dirichlet_kernel, regularized_hermitian_solve

__all__ = [
    "CorrelationModel",
    "WienerFilters",
    "ChannelEstimate",
    "hsr_correlation_model",
    "legacy_correlation_model",
    "corr_freq_hsr",
    "corr_time_hsr",
    "corr_freq_legacy",
    "corr_time_legacy",
    "build_wiener",
    "design_filters",
    "lmmse_estimate",
    "linear_interp_estimate",
]


@dataclass(frozen=True, eq=False)
class CorrelationModel:
    """Second-order channel statistics for one estimator variant."""

    variant: str  # "hsr" or "legacy"
    powers: np.ndarray  # per-tap mean power E|gain|^2
    delays: np.ndarray  # per-tap delay in samples
    dfos_hz: np.ndarray  # per-tap DFO (hsr variant)
    max_dfo_hz: float  # Jakes parameter (legacy variant)
    n_fft: int
    cp_len: int
    delta_f: float

    def __post_init__(self):
        if self.variant not in ("hsr", "legacy"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if np.any(np.asarray(self.powers) < 0):
            raise ValueError("tap powers must be >= 0")

    @property
    def symbol_duration(self) -> float:
        return (self.n_fft + self.cp_len) / (self.n_fft * self.delta_f)


def hsr_correlation_model(powers, delays, dfos_hz, grid) -> CorrelationModel:
    """Model matched to the two-tap channel, parameterized by per-tap DFOs."""
    return CorrelationModel(
        "hsr",
        np.asarray(powers, dtype=float),
        np.asarray(delays, dtype=float),
        np.asarray(dfos_hz, dtype=float),
        0.0,
        grid.n_fft,
        grid.cp_len,
        grid.delta_f,
    )


def legacy_correlation_model(powers, delays, max_dfo_hz: float, grid) -> CorrelationModel:
    """Conventional model: correct power/delay profile, Jakes time spread."""
    return CorrelationModel(
        "legacy",
        np.asarray(powers, dtype=float),
        np.asarray(delays, dtype=float),
        np.zeros(len(list(powers))),
        float(max_dfo_hz),
        grid.n_fft,
        grid.cp_len,
        grid.delta_f,
    )


def _require_variant(model: CorrelationModel, variant: str) -> None:
    if model.variant != variant:
        raise ValueError(f"correlation model is {model.variant!r}, needs {variant!r}")


def corr_freq_hsr(dk, model: CorrelationModel):
    """Subcarrier-lag correlation of the fading coefficient (hsr model)."""
    _require_variant(model, "hsr")
    dk = np.asarray(dk, dtype=float)
    out = np.zeros(dk.shape, dtype=np.complex128)
    for p, tau, f in zip(model.powers, model.delays, model.dfos_hz):
        g = np.abs(dirichlet_kernel(-f / model.delta_f, model.n_fft)) ** 2
        out += p * g / model.n_fft**2 * np.exp(-2j * np.pi / model.n_fft * tau * dk)
    return complex(out) if out.ndim == 0 else out


def corr_time_hsr(dl, model: CorrelationModel):
    """Symbol-lag correlation of the fading coefficient (hsr model)."""
    _require_variant(model, "hsr")
    dl = np.asarray(dl, dtype=float)
    out = np.zeros(dl.shape, dtype=np.complex128)
    for p, f in zip(model.powers, model.dfos_hz):
        g = np.abs(dirichlet_kernel(-f / model.delta_f, model.n_fft)) ** 2
        out += p * g / model.n_fft**2 * np.exp(
            2j * np.pi * f * dl * model.symbol_duration
        )
    return complex(out) if out.ndim == 0 else out


def corr_freq_legacy(dk, model: CorrelationModel):
    """Power-delay frequency correlation without Doppler attenuation."""
    _require_variant(model, "legacy")
    dk = np.asarray(dk, dtype=float)
    out = np.zeros(dk.shape, dtype=np.complex128)
    for p, tau in zip(model.powers, model.delays):
        # Delay in seconds is tau * Ts, so k*delta_f*tau_s = k*tau/N.
        out += p * np.exp(-2j * np.pi * dk * tau / model.n_fft)
    return complex(out) if out.ndim == 0 else out


def corr_time_legacy(dl, model: CorrelationModel):
    """Jakes symbol-lag correlation J0(2 pi l f_D T)."""
    _require_variant(model, "legacy")
    dl = np.asarray(dl, dtype=float)
    return bessel_j0(2.0 * np.pi * dl * model.max_dfo_hz * model.symbol_duration)


def build_wiener(targets, pilots, corr, noise_ratio: float) -> np.ndarray:
    """Wiener interpolation matrix W = R_tp (R_pp + noise_ratio I)^(-1).

    ``corr`` maps an index lag to the (conjugate-symmetric) correlation;
    ``targets`` and ``pilots`` are index lists in the same units.  With
    targets equal to pilots and zero noise the result is the identity.
    """
    targets = np.asarray(targets, dtype=float)
    pilots = np.asarray(pilots, dtype=float)
    if noise_ratio < 0:
        raise ValueError("noise_ratio must be >= 0")
    r_tp = np.asarray(corr(targets[:, None] - pilots[None, :]), dtype=np.complex128)
    r_pp = np.asarray(corr(pilots[:, None] - pilots[None, :]), dtype=np.complex128)
    w_h = regularized_hermitian_solve(r_pp, noise_ratio, r_tp.conj().T)
    return w_h.conj().T


@dataclass(frozen=True, eq=False)
class WienerFilters:
    """Separable frequency/time interpolation filters for one pilot lattice.

    ``w_freq[b]`` interpolates block b's pilot subcarriers to all of its
    used subcarriers; ``w_time`` interpolates the pilot symbols to every
    symbol of the frame.
    """

    w_freq: tuple[np.ndarray, ...]
    block_slices: tuple[slice, ...]
    block_pilot_rows: tuple[np.ndarray, ...]
    w_time: np.ndarray
    noise_ratio: float


def design_filters(
    model: CorrelationModel,
    pilots,
    grid,
    noise_bin_variance: float,
    block_rb: int = 25,
    ici_power: float = 0.0,
) -> WienerFilters:
    """Build the separable Wiener filters for a pilot lattice.

    ``noise_bin_variance`` is the per-bin noise power on the LS estimates;
    ``ici_power`` optionally inflates it with a leakage power term (off by
    default).  Frequency filters are built per ``block_rb``-wide window and
    cached by the window's internal lattice pattern.
    """
    if model.variant == "hsr":
        corr_f = lambda lag: corr_freq_hsr(lag, model)  # noqa: E731
        corr_t = lambda lag: corr_time_hsr(lag, model)  # noqa: E731
    else:
        corr_f = lambda lag: corr_freq_legacy(lag, model)  # noqa: E731
        corr_t = lambda lag: corr_time_legacy(lag, model)  # noqa: E731

    mean_pilot_energy = float(np.mean(np.abs(pilots.values) ** 2))
    noise_ratio = (noise_bin_variance + ici_power) / mean_pilot_energy

    block_size = 12 * block_rb
    if grid.n_used % block_size:
        raise ValueError("used band must divide into whole filter blocks")
    pilot_rows_all = grid.used_positions(pilots.subcarrier_indices)

    w_freq: list[np.ndarray] = []
    slices: list[slice] = []
    pilot_rows: list[np.ndarray] = []
    cache: dict[tuple, np.ndarray] = {}
    for start in range(0, grid.n_used, block_size):
        block = slice(start, start + block_size)
        in_block = (pilot_rows_all >= start) & (pilot_rows_all < block.stop)
        rows = pilot_rows_all[in_block] - start
        if rows.size < 2:
            raise ValueError("each filter block needs at least two pilots")
        target_bins = grid.used_subcarriers[block]
        pilot_bins = grid.used_subcarriers[pilot_rows_all[in_block]]
        key = (
            tuple((target_bins - target_bins[0]).tolist()),
            tuple((pilot_bins - target_bins[0]).tolist()),
        )
        if key not in cache:
            cache[key] = build_wiener(target_bins, pilot_bins, corr_f, noise_ratio)
        w_freq.append(cache[key])
        slices.append(block)
        pilot_rows.append(rows)

    w_time = build_wiener(
        np.arange(grid.symbols_per_frame), list(pilots.symbol_indices), corr_t, noise_ratio
    )
    return WienerFilters(
        tuple(w_freq), tuple(slices), tuple(pilot_rows), w_time, noise_ratio
    )


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    """Full-grid channel estimate (used subcarriers x symbols)."""

    h: np.ndarray
    method: str


def lmmse_estimate(h_p: np.ndarray, filters: WienerFilters) -> ChannelEstimate:
    """Separable LMMSE smoothing of the LS pilot observations.

    Frequency first: each pilot symbol's observations are interpolated to
    every used subcarrier block by block; then per subcarrier the pilot
    symbols are interpolated across the whole frame.
    """
    h_p = np.asarray(h_p, dtype=np.complex128)
    n_pilot_syms = filters.w_time.shape[1]
    if h_p.shape[1] != n_pilot_syms:
        raise ValueError("H_p column count does not match the time filter")
    n_used = filters.block_slices[-1].stop
    freq_stage = np.empty((n_used, n_pilot_syms), dtype=np.complex128)
    row_base = 0
    for w, block, rows in zip(
        filters.w_freq, filters.block_slices, filters.block_pilot_rows
    ):
        freq_stage[block] = w @ h_p[row_base : row_base + rows.size]
        row_base += rows.size
    if row_base != h_p.shape[0]:
        raise ValueError("H_p row count does not match the frequency filters")
    full = freq_stage @ filters.w_time.T
    return ChannelEstimate(full, "lmmse")


def _interp_with_slope_extrapolation(x_new, x_ref, y_ref):
    """1-D linear interpolation, extending the edge segments outward."""
    y = np.interp(x_new, x_ref, y_ref.real) + 1j * np.interp(x_new, x_ref, y_ref.imag)
    left = x_new < x_ref[0]
    if np.any(left):
        slope = (y_ref[1] - y_ref[0]) / (x_ref[1] - x_ref[0])
        y[left] = y_ref[0] + slope * (x_new[left] - x_ref[0])
    right = x_new > x_ref[-1]
    if np.any(right):
        slope = (y_ref[-1] - y_ref[-2]) / (x_ref[-1] - x_ref[-2])
        y[right] = y_ref[-1] + slope * (x_new[right] - x_ref[-1])
    return y


def linear_interp_estimate(h_p: np.ndarray, pilots, grid) -> ChannelEstimate:
    """Baseline: linear interpolation across subcarriers, then symbols."""
    h_p = np.asarray(h_p, dtype=np.complex128)
    if pilots.n_subcarriers < 2 or pilots.n_symbols < 2:
        raise ValueError("need at least two pilots per dimension")
    pilot_bins = pilots.subcarrier_indices.astype(float)
    target_bins = grid.used_subcarriers.astype(float)
    freq_stage = np.empty((grid.n_used, pilots.n_symbols), dtype=np.complex128)
    for i in range(pilots.n_symbols):
        freq_stage[:, i] = _interp_with_slope_extrapolation(
            target_bins, pilot_bins, h_p[:, i]
        )
    pilot_syms = np.asarray(pilots.symbol_indices, dtype=float)
    all_syms = np.arange(grid.symbols_per_frame, dtype=float)
    full = np.empty((grid.n_used, grid.symbols_per_frame), dtype=np.complex128)
    for row in range(grid.n_used):
        full[row] = _interp_with_slope_extrapolation(
            all_syms, pilot_syms, freq_stage[row]
        )
    return ChannelEstimate(full, "linear")
