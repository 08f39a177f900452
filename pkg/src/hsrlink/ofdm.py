"""OFDM transmit/receive chain.

Resource grid numerology, a CRS-like pilot lattice, Gray-mapped 16QAM,
IDFT modulation with cyclic prefix, AWGN insertion calibrated to the
per-used-subcarrier SNR, and least-squares channel observations at the
pilot positions.

Grid arrays are indexed (used-subcarrier position, OFDM symbol); the
``used_subcarriers`` field maps positions to FFT bin indices, which is the
index the channel's delay/ICI phases run over.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import dft, idft

__all__ = [
    "ResourceGrid",
    "PilotPattern",
    "Frame",
    "lte10_grid",
    "crs_pilot_pattern",
    "qam16_map",
    "qam16_demap",
    "build_frame",
    "modulate",
    "demodulate",
    "add_awgn",
    "noise_bin_variance",
    "ls_estimate",
]

# 16QAM Gray layout per rail: bit pair (b0, b1) indexes [+1, +3, -1, -3].
_QAM16_LEVELS = np.array([1.0, 3.0, -1.0, -3.0])
_QAM16_SCALE = 1.0 / np.sqrt(10.0)  # unit average constellation energy


@dataclass(frozen=True, eq=False)
class ResourceGrid:
    """OFDM numerology: FFT size, CP, spacing and the active band."""

    n_fft: int
    cp_len: int
    delta_f: float
    used_subcarriers: np.ndarray
    symbols_per_frame: int

    def __post_init__(self):
        if self.n_fft < 2 or self.n_fft & (self.n_fft - 1):
            raise ValueError("n_fft must be a power of two")
        if not 0 < self.cp_len < self.n_fft:
            raise ValueError("cp_len must lie in (0, n_fft)")
        if self.delta_f <= 0:
            raise ValueError("delta_f must be positive")
        used = np.asarray(self.used_subcarriers, dtype=np.int64)
        if used.size == 0 or used.min() < 0 or used.max() >= self.n_fft:
            raise ValueError("used_subcarriers must lie within [0, n_fft)")
        if np.any(np.diff(used) <= 0):
            raise ValueError("used_subcarriers must be strictly increasing")
        if self.symbols_per_frame < 1:
            raise ValueError("symbols_per_frame must be >= 1")
        object.__setattr__(self, "used_subcarriers", used)

    @property
    def ts(self) -> float:
        """Sample period 1 / (N * delta_f) in seconds."""
        return 1.0 / (self.n_fft * self.delta_f)

    @property
    def symbol_duration(self) -> float:
        """OFDM symbol duration including CP, (N + N_CP) * Ts."""
        return (self.n_fft + self.cp_len) * self.ts

    @property
    def samples_per_symbol(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def n_used(self) -> int:
        return int(self.used_subcarriers.size)

    def used_positions(self, bins) -> np.ndarray:
        """Positions of FFT ``bins`` inside the used-subcarrier array."""
        bins = np.asarray(bins)
        pos = np.searchsorted(self.used_subcarriers, bins)
        ok = (pos < self.n_used) & (self.used_subcarriers[np.minimum(pos, self.n_used - 1)] == bins)
        if not np.all(ok):
            raise ValueError("bin index outside the used band")
        return pos


def lte10_grid(
    n_fft: int = 1024,
    cp_len: int = 72,
    delta_f: float = 15e3,
    n_rb: int = 50,
    symbols_per_frame: int = 14,
) -> ResourceGrid:
    """10 MHz-class numerology: 1024-FFT, 15 kHz spacing, 50 RB = 600 used
    subcarriers in a centered contiguous block, uniform 72-sample CP."""
    n_used = 12 * n_rb
    if n_used > n_fft:
        raise ValueError("used band exceeds FFT size")
    start = (n_fft - n_used) // 2
    used = np.arange(start, start + n_used)
    return ResourceGrid(n_fft, cp_len, delta_f, used, symbols_per_frame)


@dataclass(frozen=True, eq=False)
class PilotPattern:
    """Pilot lattice: the same ``m`` subcarriers on each of ``n`` symbols.

    ``values[p, i]`` is the known symbol on subcarrier ``subcarrier_indices[p]``
    during OFDM symbol ``symbol_indices[i]``.
    """

    symbol_indices: tuple[int, ...]
    subcarrier_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.symbol_indices) < 2:
            raise ValueError("need pilots on at least two OFDM symbols")
        subs = np.asarray(self.subcarrier_indices, dtype=np.int64)
        if subs.size < 2:
            raise ValueError("need at least two pilot subcarriers")
        if np.any(np.diff(subs) <= 0):
            raise ValueError("pilot subcarriers must be strictly increasing")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (subs.size, len(self.symbol_indices)):
            raise ValueError("values must be (m, n) for m subcarriers, n symbols")
        object.__setattr__(self, "subcarrier_indices", subs)
        object.__setattr__(self, "values", vals)

    @property
    def n_subcarriers(self) -> int:
        return int(self.subcarrier_indices.size)

    @property
    def n_symbols(self) -> int:
        return len(self.symbol_indices)


def crs_pilot_pattern(
    grid: ResourceGrid,
    symbol_indices: tuple[int, ...] = (0, 4, 7, 11),
    per_rb: int = 2,
    seed: int = 2024,
) -> PilotPattern:
    """CRS-like lattice: ``per_rb`` pilot subcarriers per 12-subcarrier RB
    on each pilot symbol, with fixed constant-modulus QPSK pilot values."""
    if grid.n_used % 12:
        raise ValueError("used band must be a whole number of RBs")
    if 12 % per_rb:
        raise ValueError("per_rb must divide 12")
    for l in symbol_indices:
        if not 0 <= l < grid.symbols_per_frame:
            raise ValueError("pilot symbol index outside the frame")
    spacing = 12 // per_rb
    offsets = np.arange(0, 12, spacing)
    n_rb = grid.n_used // 12
    positions = (12 * np.arange(n_rb)[:, None] + offsets[None, :]).ravel()
    bins = grid.used_subcarriers[positions]

    rng = np.random.default_rng(seed)
    quadrant = rng.integers(0, 4, size=(bins.size, len(symbol_indices)))
    values = np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * quadrant))
    return PilotPattern(tuple(symbol_indices), bins, values)


@dataclass(eq=False)
class Frame:
    """One transmit frame: grid of symbols plus the payload bits they carry."""

    tx_grid: np.ndarray  # (n_used, symbols_per_frame) complex
    payload_bits: np.ndarray  # bits mapped onto the data positions
    data_mask: np.ndarray = field(repr=False)  # True where tx_grid carries data


def qam16_map(bits: np.ndarray) -> np.ndarray:
    """Gray-mapped 16QAM with unit average energy.

    Nibble (b0 b1 b2 b3): (b0, b1) selects the in-phase level, (b2, b3) the
    quadrature level, levels ordered so adjacent amplitudes differ in one
    bit.  Nibble 0000 maps to (1 + j)/sqrt(10).
    """
    bits = np.asarray(bits).astype(np.int64).ravel()
    if bits.size % 4:
        raise ValueError("bit count must be a multiple of 4")
    nibbles = bits.reshape(-1, 4)
    re = _QAM16_LEVELS[2 * nibbles[:, 0] + nibbles[:, 1]]
    im = _QAM16_LEVELS[2 * nibbles[:, 2] + nibbles[:, 3]]
    return (re + 1j * im) * _QAM16_SCALE


def qam16_demap(symbols: np.ndarray) -> np.ndarray:
    """Hard-decision demap: nearest constellation point, inverse Gray."""
    symbols = np.asarray(symbols, dtype=np.complex128).ravel() / _QAM16_SCALE
    bits = np.empty((symbols.size, 4), dtype=np.int64)
    for col, comp in ((0, symbols.real), (2, symbols.imag)):
        bits[:, col] = comp < 0
        bits[:, col + 1] = np.abs(comp) > 2
    return bits.ravel()


def build_frame(
    grid: ResourceGrid, pilots: PilotPattern, rng: np.random.Generator
) -> Frame:
    """Random 16QAM payload on every non-pilot position, pilots inserted."""
    tx = np.zeros((grid.n_used, grid.symbols_per_frame), dtype=np.complex128)
    data_mask = np.ones_like(tx, dtype=bool)

    pilot_pos = grid.used_positions(pilots.subcarrier_indices)
    for i, l in enumerate(pilots.symbol_indices):
        tx[pilot_pos, l] = pilots.values[:, i]
        data_mask[pilot_pos, l] = False

    n_data = int(data_mask.sum())
    payload = rng.integers(0, 2, size=4 * n_data)
    tx[data_mask] = qam16_map(payload)
    return Frame(tx, payload, data_mask)


def modulate(tx_grid: np.ndarray, grid: ResourceGrid) -> np.ndarray:
    """IDFT each symbol onto the full FFT grid and prepend the cyclic prefix.

    Returns the concatenated sample stream, symbols_per_frame blocks of
    (n_fft + cp_len) samples.
    """
    tx_grid = np.asarray(tx_grid, dtype=np.complex128)
    if tx_grid.shape != (grid.n_used, grid.symbols_per_frame):
        raise ValueError("tx_grid shape does not match the resource grid")
    out = np.empty(grid.symbols_per_frame * grid.samples_per_symbol, dtype=np.complex128)
    spectrum = np.zeros(grid.n_fft, dtype=np.complex128)
    for l in range(grid.symbols_per_frame):
        spectrum[:] = 0.0
        spectrum[grid.used_subcarriers] = tx_grid[:, l]
        body = idft(spectrum)
        start = l * grid.samples_per_symbol
        out[start : start + grid.cp_len] = body[-grid.cp_len :]
        out[start + grid.cp_len : start + grid.samples_per_symbol] = body
    return out


def demodulate(samples: np.ndarray, grid: ResourceGrid) -> np.ndarray:
    """Strip CPs, DFT each body, return the used-subcarrier grid."""
    samples = np.asarray(samples, dtype=np.complex128)
    expected = grid.symbols_per_frame * grid.samples_per_symbol
    if samples.size != expected:
        raise ValueError(
            f"expected {expected} samples for {grid.symbols_per_frame} symbols, "
            f"got {samples.size}"
        )
    rx = np.empty((grid.n_used, grid.symbols_per_frame), dtype=np.complex128)
    for l in range(grid.symbols_per_frame):
        start = l * grid.samples_per_symbol + grid.cp_len
        spectrum = dft(samples[start : start + grid.n_fft])
        rx[:, l] = spectrum[grid.used_subcarriers]
    return rx


def noise_bin_variance(snr_db: float, signal_power_ref: float) -> float:
    """Frequency-domain noise variance per bin for a target per-bin SNR."""
    if np.isinf(snr_db):
        return 0.0
    return signal_power_ref / 10.0 ** (snr_db / 10.0)


def add_awgn(
    samples: np.ndarray,
    snr_db: float,
    signal_power_ref: float,
    rng: np.random.Generator,
    n_fft: int,
) -> np.ndarray:
    """Add circular complex Gaussian noise to a sample stream.

    ``signal_power_ref`` is the mean received signal power per used
    subcarrier bin (after the unscaled DFT).  The time-domain noise
    variance is chosen so the per-bin SNR equals ``snr_db``; a DFT of
    length ``n_fft`` amplifies white noise power by exactly N.
    ``snr_db = inf`` bypasses the channel noise entirely.
    """
    if np.isinf(snr_db):
        return np.array(samples, dtype=np.complex128)
    samples = np.asarray(samples, dtype=np.complex128)
    sigma2_time = noise_bin_variance(snr_db, signal_power_ref) / n_fft
    noise = np.sqrt(sigma2_time / 2.0) * (
        rng.normal(size=samples.size) + 1j * rng.normal(size=samples.size)
    )
    return samples + noise


def ls_estimate(
    rx_grid: np.ndarray, pilots: PilotPattern, grid: ResourceGrid
) -> np.ndarray:
    """Least-squares channel observations H_p at the pilot lattice.

    Divides each received pilot by its known transmit value; returns an
    (m, n) matrix whose column i holds the observations of pilot symbol
    ``symbol_indices[i]``.
    """
    if np.any(pilots.values == 0):
        raise ValueError("pilot values must be nonzero")
    pilot_pos = grid.used_positions(pilots.subcarrier_indices)
    cols = [
        rx_grid[pilot_pos, l] / pilots.values[:, i]
        for i, l in enumerate(pilots.symbol_indices)
    ]
    return np.stack(cols, axis=1)
