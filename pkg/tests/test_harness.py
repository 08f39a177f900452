"""Tests for the Monte Carlo harness: positions, metrics, sweep mechanics,
configuration files and the CLI."""

import subprocess
import sys

import numpy as np
import pytest

from hsrlink.channel import ScenarioGeometry, tap_powers_at
from hsrlink.config import (
    DEFAULT_CONFIG_TOML,
    ConfigError,
    config_from_dict,
    load_config,
)
from hsrlink.harness import (
    CSV_COLUMNS,
    default_config,
    find_p3db,
    records_to_csv,
    run_drop,
    sweep,
    throughput_proxy,
    write_csv,
)

GEOM = ScenarioGeometry()


class TestFindP3db:
    def test_postcondition_ratio(self):
        x = find_p3db(GEOM)
        p0, p1 = tap_powers_at(x, GEOM)
        assert 1.999 <= p0 / p1 <= 2.001

    def test_against_grid_scan(self):
        """Brute-force scan oracle: densest grid point closest to ratio 2."""
        xs = np.linspace(1e-3, GEOM.ds / 2, 200_001)
        p = np.array([tap_powers_at(x, GEOM) for x in xs])
        scan = xs[np.argmin(np.abs(p[:, 0] / p[:, 1] - 2.0))]
        assert find_p3db(GEOM) == pytest.approx(scan, abs=2e-3)

    def test_mirror_position_halves_ratio(self):
        x = find_p3db(GEOM)
        p0, p1 = tap_powers_at(GEOM.ds - x, GEOM)
        assert p0 / p1 == pytest.approx(0.5, abs=1e-3)


class TestThroughputProxy:
    def test_all_blocks_clean(self):
        assert throughput_proxy([False] * 10) == 4.0

    def test_all_blocks_errored(self):
        assert throughput_proxy([True] * 10) == 0.0

    def test_half_errored(self):
        assert throughput_proxy([True] * 5 + [False] * 5) == 2.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            throughput_proxy([])


class TestRunDrop:
    def test_static_noiseless_near_rrh_is_error_free(self):
        """Dominant single tap, no motion, no noise: every estimator decodes
        the frame perfectly."""
        cfg = default_config(
            geometry=ScenarioGeometry(speed=0.0), rician_k_db=np.inf, snr_db=(np.inf,)
        )
        res = run_drop(cfg, np.inf, 0.01, (1, np.inf, 0.01, 0))
        for name in cfg.estimators:
            metrics = res["estimators"][name]
            assert metrics["ber"] == 0.0
            assert metrics["tp"] == 4.0

    def test_deterministic_under_seed(self):
        cfg = default_config(drops=1)
        a = run_drop(cfg, 20.0, 100.0, (7, 20.0, 100.0, 3))
        b = run_drop(cfg, 20.0, 100.0, (7, 20.0, 100.0, 3))
        assert a["dfo_rel_err"] == b["dfo_rel_err"]
        for name in cfg.estimators:
            assert a["estimators"][name] == b["estimators"][name]

    def test_estimated_tracks_ideal_at_30db(self):
        """Estimated-DFO smoothing stays within 1 dB of the genie filters."""
        cfg = default_config()
        x = find_p3db(cfg.geometry)
        gaps = []
        for d in range(20):
            res = run_drop(cfg, 30.0, x, (1, 30.0, x, d))
            est = res["estimators"]["elmmse-estimated"]["mse"]
            ideal = res["estimators"]["elmmse-ideal"]["mse"]
            gaps.append(10 * np.log10(est / ideal))
        assert np.median(gaps) < 1.0

    def test_pilots_only_mode_has_no_data_metrics(self):
        cfg = default_config(traffic="pilots-only", estimators=("linear",))
        res = run_drop(cfg, 30.0, 100.0, (1, 30.0, 100.0, 0))
        metrics = res["estimators"]["linear"]
        assert np.isnan(metrics["ber"]) and np.isnan(metrics["tp"])
        assert np.isfinite(metrics["mse"])
        assert res["dfo_rel_err"] < 0.05


class TestSweep:
    def test_single_cell_matches_run_drop(self):
        cfg = default_config(drops=1, snr_db=(15.0,), position=120.0, estimators=("linear",))
        [record] = sweep(cfg)
        drop = run_drop(cfg, 15.0, 120.0, (cfg.seed, 15.0, 120.0, 0))
        assert record.mse_db == pytest.approx(
            10 * np.log10(drop["estimators"]["linear"]["mse"])
        )
        assert record.ber == pytest.approx(drop["estimators"]["linear"]["ber"])
        assert record.drops_used == 1

    def test_mse_averages_in_linear_domain(self):
        cfg = default_config(drops=2, snr_db=(15.0,), position=120.0, estimators=("linear",))
        [record] = sweep(cfg, keep_drops=True)
        per_drop = record.drop_detail["mse"]
        assert record.mse_db == pytest.approx(10 * np.log10(np.mean(per_drop)))

    def test_grid_covers_cartesian_product(self):
        cfg = default_config(
            drops=1, snr_db=(10.0, 20.0), position="sweep", sweep_points=3,
            estimators=("linear", "lmmse-legacy"),
        )
        records = sweep(cfg)
        assert len(records) == 2 * 3 * 2
        keys = {(r.snr_db, r.position_m, r.estimator) for r in records}
        assert len(keys) == len(records)

    def test_csv_round_trip_deterministic(self, tmp_path):
        cfg = default_config(drops=2, snr_db=(10.0,), estimators=("linear",))
        path_a, path_b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(sweep(cfg), path_a)
        write_csv(sweep(cfg), path_b)
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_csv_schema(self):
        cfg = default_config(drops=1, snr_db=(10.0,), estimators=("linear",))
        text = records_to_csv(sweep(cfg))
        header, row = text.strip().split("\n")
        assert header == ",".join(CSV_COLUMNS)
        fields = row.split(",")
        assert len(fields) == len(CSV_COLUMNS)
        assert fields[2] == "linear" and fields[3] == "proposed"
        # numeric fields are limited to 9 significant digits
        for field in (fields[0], fields[1], fields[4]):
            mantissa = field.split("e")[0].lstrip("-").replace(".", "").lstrip("0")
            assert len(mantissa) <= 9


class TestConfigFiles:
    def test_default_toml_parses_to_default_config(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text(DEFAULT_CONFIG_TOML)
        config = load_config(path)
        reference = default_config()
        assert config.snr_db == reference.snr_db
        assert config.drops == reference.drops
        assert config.block_rb == reference.block_rb
        assert config.grid.n_fft == reference.grid.n_fft
        np.testing.assert_array_equal(
            config.pilots.values, reference.pilots.values
        )

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            config_from_dict({"geometry": {"ds": 300.0, "dz": 1.0}})

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            config_from_dict({"antenna": {"count": 2}})

    def test_every_field_addressable(self):
        config = config_from_dict(
            {
                "seed": 9,
                "drops": 3,
                "geometry": {"ds": 200.0, "dmin": 5.0, "speed_kmh": 100.0, "carrier_ghz": 2.0},
                "grid": {"n_fft": 512, "cp_len": 36, "delta_f": 15e3, "n_rb": 25, "symbols_per_frame": 14},
                "pilots": {"symbol_indices": [0, 7], "per_rb": 2, "seed": 5},
                "taps": {"delays": [0.0, 6.0], "rician_k_db": "inf", "pathloss_exponent": 3.0},
                "estimators": {"selected": ["linear"], "block_rb": 5, "ici_noise_inflation": True},
                "dfo": {"method": "es", "es_f_max": 500.0, "es_step": 4.0, "pair_policy": "all"},
                "sweep": {"snr_db": [5.0], "position": 42.0, "sweep_points": 2, "traffic": "pilots-only"},
            }
        )
        assert config.seed == 9 and config.drops == 3
        assert config.geometry.ds == 200.0 and config.geometry.speed == pytest.approx(100 / 3.6)
        assert config.grid.n_fft == 512 and config.grid.n_used == 300
        assert config.pilots.n_symbols == 2
        assert config.tap_delays == (0.0, 6.0) and np.isinf(config.rician_k_db)
        assert config.estimators == ("linear",) and config.block_rb == 5
        assert config.dfo_method == "es" and config.es_step == 4.0
        assert config.position == 42.0 and config.traffic == "pilots-only"

    def test_invalid_field_value_reported(self):
        with pytest.raises(ConfigError):
            config_from_dict({"sweep": {"position": "everywhere"}})


class TestCli:
    def run_cli(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "hsrlink.cli", *args],
            capture_output=True,
            text=True,
        )

    def test_complexity_values(self):
        out = self.run_cli("complexity", "--m", "2", "--n", "4")
        assert out.returncode == 0
        assert "80" in out.stdout and "34200" in out.stdout and "427.5" in out.stdout

    def test_sir_between_rrhs(self):
        out = self.run_cli("sir", "--position", "150")
        assert out.returncode == 0
        value = float(out.stdout.rsplit(":", 1)[1].replace("dB", ""))
        assert 17.0 <= value <= 23.0

    def test_simulate_writes_csv(self, tmp_path):
        config = tmp_path / "tiny.toml"
        config.write_text(
            'drops = 1\n[sweep]\nsnr_db = [10.0]\nposition = 100.0\n'
            '[estimators]\nselected = ["linear"]\n'
        )
        out_csv = tmp_path / "out.csv"
        result = self.run_cli(
            "simulate", "--config", str(config), "--out", str(out_csv)
        )
        assert result.returncode == 0, result.stderr
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2

    def test_simulate_overrides(self, tmp_path):
        out_csv = tmp_path / "out.csv"
        result = self.run_cli(
            "simulate", "--out", str(out_csv), "--drops", "1",
            "--snr", "10:20:10", "--position", "90", "--estimators", "linear",
        )
        assert result.returncode == 0, result.stderr
        lines = out_csv.read_text().strip().split("\n")
        assert len(lines) == 3  # header + 2 SNR cells

    def test_bad_config_reports_error(self, tmp_path):
        config = tmp_path / "bad.toml"
        config.write_text("[nonsense]\nkey = 1\n")
        result = self.run_cli("simulate", "--config", str(config), "--out", "x.csv")
        assert result.returncode == 2
        assert "configuration error" in result.stderr

    def test_print_config_is_loadable(self, tmp_path):
        out = self.run_cli("print-config")
        assert out.returncode == 0
        path = tmp_path / "default.toml"
        path.write_text(out.stdout)
        load_config(path)
