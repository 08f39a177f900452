"""Tests for the two-tap HSR channel model.

The load-bearing check is the oracle equivalence: the demodulated output
of the exact time-domain channel must equal the analytic fading + ICI
decomposition to 1e-9 relative at small FFT sizes.
"""

import numpy as np
import pytest
from scipy import stats

from hsrlink.channel import (
    ChannelRealization,
    ScenarioGeometry,
    TapState,
    analytic_freq_response,
    apply_channel_time_domain,
    draw_tap_gains,
    fading_matrix,
    frame_start_time,
    ici_term,
    max_dfo,
    sir_db,
    tap_dfos_at,
    tap_powers_at,
)
from hsrlink.numerics import dirichlet_kernel
from hsrlink.ofdm import ResourceGrid, demodulate, lte10_grid, modulate


def small_grid(n_fft=16, cp_len=4, symbols=4):
    """All-subcarriers-used toy grid for exact decomposition checks."""
    return ResourceGrid(n_fft, cp_len, 15e3, np.arange(n_fft), symbols)


def received_grid_analytic(tx_grid, taps, grid):
    """Per-cell evaluation of fading * x + ICI (independent of the DFT path)."""
    rx = np.empty_like(tx_grid)
    for l in range(grid.symbols_per_frame):
        spectrum = np.zeros(grid.n_fft, dtype=np.complex128)
        spectrum[grid.used_subcarriers] = tx_grid[:, l]
        for pos, k in enumerate(grid.used_subcarriers):
            fading, _ = analytic_freq_response(int(k), l, taps, grid)
            rx[pos, l] = fading * tx_grid[pos, l] + ici_term(
                int(k), l, taps, spectrum, grid
            )
    return rx


# ─────────────────────────────────────────────────────────────────────────────
# Geometry
# ─────────────────────────────────────────────────────────────────────────────


class TestGeometry:
    def test_max_dfo_at_table_parameters(self):
        geom = ScenarioGeometry(speed=350 / 3.6, carrier_hz=2.6e9)
        assert 840.0 <= max_dfo(geom) <= 844.0

    def test_max_dfo_zero_speed(self):
        assert max_dfo(ScenarioGeometry(speed=0.0)) == 0.0

    def test_max_dfo_linear_in_speed(self):
        a = max_dfo(ScenarioGeometry(speed=50.0))
        b = max_dfo(ScenarioGeometry(speed=100.0))
        assert b == pytest.approx(2 * a)

    def test_dfos_mirror_at_midpoint(self):
        geom = ScenarioGeometry()
        f0, f1 = tap_dfos_at(geom.ds / 2, geom)
        assert f0 == pytest.approx(-f1)
        assert f0 < 0 < f1

    def test_dfo_head_on_limit(self):
        geom = ScenarioGeometry(ds=300.0, dmin=2.0)
        _, f1 = tap_dfos_at(1.0, geom)  # almost the full span to RRH2
        assert f1 == pytest.approx(max_dfo(geom), rel=1e-4)

    def test_dfos_exceed_800hz_between_rrhs(self):
        geom = ScenarioGeometry(ds=300.0, dmin=2.0, speed=350 / 3.6, carrier_hz=2.6e9)
        f0, f1 = tap_dfos_at(75.0, geom)
        assert abs(f0) > 800.0 and abs(f1) > 800.0

    def test_dfo_magnitudes_bounded(self):
        geom = ScenarioGeometry()
        fd = max_dfo(geom)
        for x in np.linspace(0, geom.ds, 31):
            f0, f1 = tap_dfos_at(x, geom)
            assert abs(f0) <= fd + 1e-9 and abs(f1) <= fd + 1e-9

    def test_dfo_mirror_symmetry(self):
        geom = ScenarioGeometry()
        for x in np.linspace(1.0, geom.ds - 1.0, 7):
            f = tap_dfos_at(x, geom)
            g = tap_dfos_at(geom.ds - x, geom)
            assert f[0] == pytest.approx(-g[1]) and f[1] == pytest.approx(-g[0])

    def test_powers_equal_at_midpoint(self):
        geom = ScenarioGeometry()
        p0, p1 = tap_powers_at(geom.ds / 2, geom)
        assert p0 == pytest.approx(0.5) and p1 == pytest.approx(0.5)

    def test_power_ratio_follows_distances(self):
        geom = ScenarioGeometry()
        x = 80.0
        p0, p1 = tap_powers_at(x, geom, pathloss_exponent=2.0)
        d0 = np.hypot(x, geom.dmin)
        d1 = np.hypot(geom.ds - x, geom.dmin)
        assert p0 / p1 == pytest.approx((d1 / d0) ** 2)


# ─────────────────────────────────────────────────────────────────────────────
# Time-domain channel vs analytic decomposition
# ─────────────────────────────────────────────────────────────────────────────


class TestTimeDomainChannel:
    def test_identity_tap(self):
        grid = small_grid()
        rng = np.random.default_rng(1)
        tx = rng.normal(size=(grid.n_used, grid.symbols_per_frame)) + 0j
        samples = modulate(tx, grid)
        taps = [TapState(1.0 + 0j, 0, 0.0)]
        out = apply_channel_time_domain(samples, taps, frame_start_time(grid), grid.ts)
        np.testing.assert_allclose(out, samples, atol=1e-15)
        np.testing.assert_allclose(demodulate(out, grid), tx, atol=1e-12)

    def test_delay_beyond_cp_rejected(self):
        grid = small_grid()
        samples = np.zeros(grid.samples_per_symbol, dtype=complex)
        taps = [TapState(1.0 + 0j, grid.cp_len, 0.0)]
        with pytest.raises(ValueError):
            apply_channel_time_domain(
                samples, taps, 0.0, grid.ts, cp_len=grid.cp_len
            )

    def test_fractional_delay_rejected(self):
        grid = small_grid()
        samples = np.zeros(grid.samples_per_symbol, dtype=complex)
        with pytest.raises(ValueError):
            apply_channel_time_domain(
                samples, [TapState(1.0 + 0j, 1.5, 0.0)], 0.0, grid.ts
            )

    def test_full_subcarrier_offset_is_circular_shift(self):
        """DFO of exactly one subcarrier spacing shifts the grid by one bin."""
        grid = ResourceGrid(64, 8, 15e3, np.arange(64), 3)
        rng = np.random.default_rng(7)
        tx = rng.normal(size=(64, 3)) + 1j * rng.normal(size=(64, 3))
        taps = [TapState(1.0 + 0j, 0, grid.delta_f)]
        rx = demodulate(
            apply_channel_time_domain(
                modulate(tx, grid), taps, frame_start_time(grid), grid.ts
            ),
            grid,
        )
        for l in range(3):
            phase = np.exp(2j * np.pi / 64 * l * (64 + 8))
            np.testing.assert_allclose(
                rx[:, l], np.roll(tx[:, l], 1) * phase, atol=1e-9
            )

    @pytest.mark.parametrize("case", range(10))
    def test_two_tap_oracle_equivalence_n16(self, case):
        """Demodulated time-domain output == fading*x + ICI, to 1e-9."""
        grid = small_grid()
        rng = np.random.default_rng(100 + case)
        delays = rng.choice(grid.cp_len, size=2, replace=False)
        taps = [
            TapState(
                complex(rng.normal(), rng.normal()),
                int(d),
                rng.uniform(-0.5, 0.5) * grid.delta_f,
            )
            for d in delays
        ]
        tx = rng.normal(size=(grid.n_used, grid.symbols_per_frame)) + 1j * rng.normal(
            size=(grid.n_used, grid.symbols_per_frame)
        )
        rx_sim = demodulate(
            apply_channel_time_domain(
                modulate(tx, grid), taps, frame_start_time(grid), grid.ts
            ),
            grid,
        )
        rx_ana = received_grid_analytic(tx, taps, grid)
        scale = np.max(np.abs(rx_ana))
        assert np.max(np.abs(rx_sim - rx_ana)) / scale < 1e-9


# ─────────────────────────────────────────────────────────────────────────────
# Analytic response pieces
# ─────────────────────────────────────────────────────────────────────────────


class TestAnalyticResponse:
    def test_unit_static_tap(self):
        grid = small_grid()
        fading, per_tap = analytic_freq_response(3, 2, [TapState(1.0 + 0j, 0, 0.0)], grid)
        assert fading == pytest.approx(1.0 + 0j)
        assert per_tap[0] == pytest.approx(1.0 + 0j)

    def test_delay_phase_slope(self):
        grid = small_grid(n_fft=64, cp_len=8)
        taps = [TapState(1.0 + 0j, 4, 0.0)]
        vals = [analytic_freq_response(k, 0, taps, grid)[0] for k in range(8)]
        expected = np.exp(-2j * np.pi / 64 * 4 * np.arange(8))
        np.testing.assert_allclose(vals, expected, atol=1e-12)

    def test_fading_matrix_matches_pointwise(self):
        grid = small_grid()
        rng = np.random.default_rng(9)
        taps = [
            TapState(complex(rng.normal(), rng.normal()), 0, 400.0),
            TapState(complex(rng.normal(), rng.normal()), 3, -700.0),
        ]
        h = fading_matrix(taps, grid)
        for pos, k in enumerate(grid.used_subcarriers):
            for l in range(grid.symbols_per_frame):
                expected, _ = analytic_freq_response(int(k), l, taps, grid)
                assert h[pos, l] == pytest.approx(expected, abs=1e-12)

    def test_ici_vanishes_without_doppler(self):
        grid = small_grid()
        taps = [TapState(0.7 + 0.2j, 0, 0.0), TapState(0.3 - 0.1j, 2, 0.0)]
        data = np.ones(grid.n_fft, dtype=complex)
        assert abs(ici_term(5, 1, taps, data, grid)) < 1e-12

    def test_single_interferer(self):
        grid = small_grid()
        taps = [TapState(0.8 + 0j, 1, 600.0)]
        data = np.zeros(grid.n_fft, dtype=complex)
        data[2] = 1.5 - 0.5j
        k, l = 6, 2
        f_norm = 600.0 / grid.delta_f
        expected = (
            data[2]
            * taps[0].amplitude
            / grid.n_fft
            * dirichlet_kernel(k - 2 - f_norm, grid.n_fft)
            * np.exp(-2j * np.pi / grid.n_fft * taps[0].delay_samples * 2)
            * np.exp(2j * np.pi / grid.n_fft * f_norm * l * (grid.n_fft + grid.cp_len))
        )
        assert ici_term(k, l, taps, data, grid) == pytest.approx(expected)

    def test_energy_split_conserves_power(self):
        """Mean of |fading|^2 + sum |ICI leaks|^2 over phase draws equals the
        transmitted power through a unit-power channel (within 1%)."""
        grid = small_grid()
        rng = np.random.default_rng(42)
        powers = np.array([0.6, 0.4])
        delays = [0, 3]
        f_norms = [0.31, -0.22]
        k = 8

        # Per-tap deterministic coefficients: fading gain and leak vector.
        fade = np.empty(2, dtype=complex)
        leaks = np.empty((2, grid.n_fft - 1), dtype=complex)
        others = np.array([i for i in range(grid.n_fft) if i != k])
        for q in range(2):
            fade[q] = (
                np.sqrt(powers[q])
                / grid.n_fft
                * dirichlet_kernel(-f_norms[q], grid.n_fft)
                * np.exp(-2j * np.pi / grid.n_fft * delays[q] * k)
            )
            leaks[q] = (
                np.sqrt(powers[q])
                / grid.n_fft
                * dirichlet_kernel(k - others - f_norms[q], grid.n_fft)
                * np.exp(-2j * np.pi / grid.n_fft * delays[q] * others)
            )

        draws = 20000
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(draws, 2)))
        fading_power = np.abs(phases @ fade) ** 2
        leak_power = np.sum(np.abs(phases @ leaks) ** 2, axis=1)
        total = np.mean(fading_power + leak_power)
        assert total == pytest.approx(1.0, rel=0.01)


# ─────────────────────────────────────────────────────────────────────────────
# SIR
# ─────────────────────────────────────────────────────────────────────────────


class TestSir:
    def test_no_doppler_is_infinite(self):
        grid = lte10_grid()
        taps = [TapState(0.7 + 0j, 0, 0.0), TapState(0.7j, 0, 0.0)]
        assert sir_db(taps, grid) == np.inf

    def test_between_rrhs_near_20db(self):
        grid = lte10_grid()
        amp = np.sqrt(0.5)
        taps = [TapState(amp + 0j, 0, -842.0), TapState(amp + 0j, 0, 842.0)]
        assert sir_db(taps, grid) == pytest.approx(20.0, abs=3.0)

    def test_monotone_decreasing_in_offset(self):
        grid = lte10_grid()
        values = []
        for f_norm in np.linspace(0.05, 0.45, 9):
            f = f_norm * grid.delta_f
            taps = [TapState(1.0 + 0j, 0, f), TapState(1.0 + 0j, 0, -f)]
            values.append(sir_db(taps, grid))
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_invariant_to_common_power_scaling(self):
        grid = lte10_grid()
        taps = [TapState(0.5 + 0j, 0, 500.0), TapState(0.9j, 0, -300.0)]
        scaled = [TapState(3 * t.amplitude, 0, t.dfo_hz) for t in taps]
        assert sir_db(taps, grid) == pytest.approx(sir_db(scaled, grid), rel=1e-12)

    def test_nonzero_delay_rejected(self):
        grid = lte10_grid()
        with pytest.raises(ValueError):
            sir_db([TapState(1.0 + 0j, 2, 100.0)], grid)


# ─────────────────────────────────────────────────────────────────────────────
# Rician gain draws
# ─────────────────────────────────────────────────────────────────────────────


class TestChannelRealization:
    def test_carries_taps_and_seed(self):
        taps = (TapState(1.0 + 0j, 0, 100.0), TapState(0.5 + 0j, 4, -100.0))
        real = ChannelRealization(taps, seed=7)
        assert real.taps == taps and real.seed == 7

    def test_needs_at_least_one_tap(self):
        with pytest.raises(ValueError):
            ChannelRealization(())


class TestDrawTapGains:
    def test_infinite_k_fixes_magnitude(self):
        rng = np.random.default_rng(0)
        taps = draw_tap_gains([0.7, 0.3], [0, 4], [100.0, -100.0], np.inf, rng)
        assert abs(taps[0].amplitude) == pytest.approx(np.sqrt(0.7))
        assert abs(taps[1].amplitude) == pytest.approx(np.sqrt(0.3))

    def test_rayleigh_power_moment(self):
        """K = 0 draws have E|gain|^2 = p within 1% over 1e5 draws."""
        rng = np.random.default_rng(21)
        p = 0.6
        gains = np.array(
            [
                draw_tap_gains([p], [0], [0.0], 0.0, rng)[0].amplitude
                for _ in range(100_000)
            ]
        )
        assert np.mean(np.abs(gains) ** 2) == pytest.approx(p, rel=0.01)

    def test_phase_uniformity(self):
        """Kolmogorov-Smirnov on the phase at the 1% level, 1e5 draws."""
        rng = np.random.default_rng(33)
        gains = np.array(
            [
                draw_tap_gains([1.0], [0], [0.0], 10.0, rng)[0].amplitude
                for _ in range(100_000)
            ]
        )
        u = (np.angle(gains) + np.pi) / (2 * np.pi)
        result = stats.kstest(u, "uniform")
        assert result.pvalue > 0.01

    def test_seeded_draws_reproducible(self):
        a = draw_tap_gains([0.5, 0.5], [0, 4], [10.0, -10.0], 10.0, np.random.default_rng(5))
        b = draw_tap_gains([0.5, 0.5], [0, 4], [10.0, -10.0], 10.0, np.random.default_rng(5))
        assert a == b
