"""Multi-path Doppler frequency offset estimation.

The two taps overlap on every subcarrier, but their distinct delays give
them distinct phase signatures across the pilot subcarriers.  Stacking
those signatures as columns of a delay basis lets a least-squares solve
separate the per-tap components on each pilot-bearing OFDM symbol; the
per-symbol phase progression of each separated component then yields the
tap's DFO from the angle of a ratio between two pilot symbols, averaged
over symbol pairs.

An exhaustive grid-search baseline over the two DFOs and multiplication
counters for both methods are included for complexity comparisons: the
closed-form path costs 10*m*n complex multiplications per block against
m*f_max*(8n+6)/step for the grid search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import IdentifiabilityError, pseudo_inverse

__all__ = [
    "EstimationError",
    "OpCounter",
    "DelayBasis",
    "TapSeparation",
    "DfoEstimate",
    "build_delay_basis",
    "separate_taps",
    "estimate_dfos",
    "es_estimate",
    "multiplication_count",
]

_BASIS_COND_LIMIT = 1e6


class EstimationError(RuntimeError):
    """No usable pilot-symbol pair was left to form a DFO estimate."""


@dataclass
class OpCounter:
    """Caller-owned complex-multiplication tally.

    Pass one instance through the estimation calls to measure the actual
    multiply count of this implementation; divisions count as one multiply.
    """

    complex_mults: int = 0

    def add(self, n: int) -> None:
        self.complex_mults += int(n)


@dataclass(frozen=True, eq=False)
class DelayBasis:
    """Per-tap delay phase signatures across the pilot subcarriers."""

    matrix: np.ndarray  # (m, Q) complex
    delays: tuple[float, ...]
    subcarriers: np.ndarray
    n_fft: int
    condition: float


@dataclass(frozen=True, eq=False)
class TapSeparation:
    """Separated per-tap components, one column per pilot symbol."""

    z: np.ndarray  # (Q, n) complex


@dataclass(frozen=True, eq=False)
class DfoEstimate:
    """Per-tap DFO estimate with its raw per-pair values.

    ``f_hat[q]`` is the mean of the per-pair estimates for tap q;
    ``alias_bound`` is the largest unambiguous |DFO| for the pair spacing
    used (estimates of larger offsets wrap modulo 2*alias_bound).
    """

    f_hat: np.ndarray
    per_pair: tuple[tuple[int, int, np.ndarray], ...]
    alias_bound: float


def build_delay_basis(delays, subcarriers, n_fft: int) -> DelayBasis:
    """Matrix of exp(-j*2*pi*delay_q*k_p/N) signatures, one column per tap.

    Raises :class:`IdentifiabilityError` when the columns are too close to
    dependent (equal or aliased delays) for a stable separation.
    """
    delays = tuple(float(d) for d in delays)
    subcarriers = np.asarray(subcarriers, dtype=np.int64)
    m, q = subcarriers.size, len(delays)
    if m < q:
        raise ValueError(f"need at least {q} pilot subcarriers, got {m}")
    matrix = np.exp(
        -2j * np.pi / n_fft * np.outer(subcarriers, np.asarray(delays))
    )
    condition = float(np.linalg.cond(matrix))
    if condition > _BASIS_COND_LIMIT:
        raise IdentifiabilityError(
            f"delay basis condition {condition:.3g} exceeds {_BASIS_COND_LIMIT:g}; "
            f"delays {delays} are equal or aliased over the pilot lattice"
        )
    return DelayBasis(matrix, delays, subcarriers, n_fft, condition)


def separate_taps(
    h_p: np.ndarray, basis: DelayBasis, ops: OpCounter | None = None
) -> TapSeparation:
    """Least-squares tap separation Z = pinv(D) @ H_p.

    With noiseless observations that follow the delay-basis model the
    separation is exact; white noise on H_p lands on Z shaped by the rows
    of the pseudo-inverse.
    """
    h_p = np.asarray(h_p, dtype=np.complex128)
    m, q = basis.matrix.shape
    if h_p.shape[0] != m:
        raise ValueError("H_p row count does not match the pilot subcarriers")
    pinv = pseudo_inverse(basis.matrix)
    if ops is not None:
        # Gram (m*Q^2) + small inverse (~Q^3) + projector (Q^2*m) + apply (Q*m*n).
        n = h_p.shape[1]
        ops.add(m * q * q + q**3 + q * q * m + q * m * n)
    return TapSeparation(pinv @ h_p)


def _select_pairs(n: int, pair_policy: str) -> list[tuple[int, int]]:
    if pair_policy == "consecutive":
        return [(i, i + 1) for i in range(n - 1)]
    if pair_policy == "all":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    raise ValueError(f"unknown pair_policy {pair_policy!r}")


def estimate_dfos(
    sep: TapSeparation,
    pilots,
    grid,
    pair_policy: str = "consecutive",
    ops: OpCounter | None = None,
) -> DfoEstimate:
    """Phase-ratio DFO estimation from separated tap components.

    For a pilot-symbol pair (i, j) each tap's component rotates by
    2*pi*f*(N+N_CP)*(l_j-l_i)*Ts, so

        f_q = angle(Z_q[j] / Z_q[i]) * N * delta_f / (2 pi (N+N_CP) (l_j-l_i))

    The final estimate averages the per-pair values.  Pairs touching a
    zero component are skipped; if every pair is skipped an
    :class:`EstimationError` is raised.
    """
    z = sep.z
    n_taps, n = z.shape
    if n < 2:
        raise ValueError("need pilots on at least two OFDM symbols")
    symbols = pilots.symbol_indices
    pairs = _select_pairs(n, pair_policy)

    scale = grid.n_fft * grid.delta_f / (2.0 * np.pi * (grid.n_fft + grid.cp_len))
    per_pair = []
    for i, j in pairs:
        if np.any(z[:, i] == 0) or np.any(z[:, j] == 0):
            continue
        spacing = symbols[j] - symbols[i]
        f_pair = np.angle(z[:, j] / z[:, i]) * scale / spacing
        if ops is not None:
            ops.add(2 * n_taps)  # one division + one scaling per tap
        per_pair.append((i, j, f_pair))
    if not per_pair:
        raise EstimationError("all pilot-symbol pairs skipped (zero components)")

    min_spacing = min(symbols[j] - symbols[i] for i, j, _ in per_pair)
    alias_bound = grid.n_fft * grid.delta_f / (
        2.0 * (grid.n_fft + grid.cp_len) * min_spacing
    )
    f_hat = np.mean([f for _, _, f in per_pair], axis=0)
    return DfoEstimate(f_hat, tuple(per_pair), float(alias_bound))


def es_estimate(
    h_p: np.ndarray,
    delays,
    f_max: float,
    step: float,
    grid,
    pilots,
    ops: OpCounter | None = None,
) -> np.ndarray:
    """Exhaustive grid search over the two tap DFOs.

    Candidates run over [-f_max, f_max]^2 with the given step; for each
    candidate pair the per-tap complex amplitudes are fit by least squares
    and the residual against the pilot observations scored.  Returns the
    arg-min grid point, so the noiseless accuracy is bounded by step/2 per
    axis.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    h_p = np.asarray(h_p, dtype=np.complex128)
    if len(delays) != 2:
        raise ValueError("the grid search is defined for two taps")
    basis = build_delay_basis(delays, pilots.subcarrier_indices, grid.n_fft)
    d = basis.matrix
    m, n = h_p.shape

    n_freq = int(round(2.0 * f_max / step)) + 1
    freqs = -f_max + step * np.arange(n_freq)
    l_idx = np.asarray(pilots.symbol_indices, dtype=np.float64)
    omega = 2.0 * np.pi * grid.symbol_duration  # rad per Hz per symbol index

    # Per-candidate phasor tables. E[f, i] = exp(j w f l_i).
    e_table = np.exp(1j * omega * np.outer(freqs, l_idx))
    # Projections of the observations onto each delay signature.
    p_proj = d.conj().T @ h_p  # (2, n)
    c0 = e_table.conj() @ p_proj[0]  # (F,)
    c1 = e_table.conj() @ p_proj[1]
    # Symbol-phasor Gram factor depends only on the frequency difference.
    diff = step * np.arange(-(n_freq - 1), n_freq)
    s_diff = np.exp(1j * omega * np.outer(diff, l_idx)).sum(axis=1)

    d00 = float(np.real(d[:, 0].conj() @ d[:, 0]))
    d11 = float(np.real(d[:, 1].conj() @ d[:, 1]))
    d01 = complex(d[:, 0].conj() @ d[:, 1])
    g00 = d00 * n
    g11 = d11 * n

    idx = np.arange(n_freq)
    g01 = d01 * s_diff[idx[None, :] - idx[:, None] + n_freq - 1]  # (F0, F1)
    cross = np.conj(c0)[:, None] * c1[None, :] * g01
    det = g00 * g11 - np.abs(g01) ** 2
    explained = (
        g11 * (np.abs(c0) ** 2)[:, None]
        + g00 * (np.abs(c1) ** 2)[None, :]
        - 2.0 * cross.real
    ) / det

    if ops is not None:
        # Projections + per-frequency correlations + per-candidate scoring.
        ops.add(2 * m * n + 2 * n_freq * n + 6 * n_freq * n_freq)

    i0, i1 = np.unravel_index(np.argmax(explained), explained.shape)
    return np.array([freqs[i0], freqs[i1]])


def multiplication_count(
    method: str,
    m: int,
    n: int,
    f_max: float | None = None,
    step: float | None = None,
):
    """Nominal complex-multiplication counts for the two DFO estimators.

    ``proposed`` costs 10*m*n; ``es`` costs m*f_max*(8n+6)/step.  Integral
    results are returned as int.
    """
    if m < 0 or n < 0:
        raise ValueError("m and n must be non-negative")
    if method == "proposed":
        return 10 * m * n
    if method == "es":
        if f_max is None or step is None:
            raise ValueError("es count needs f_max and step")
        if f_max <= 0 or step <= 0:
            raise ValueError("f_max and step must be positive")
        count = m * f_max * (8 * n + 6) / step
        return int(count) if float(count).is_integer() else count
    raise ValueError(f"unknown method {method!r}")
