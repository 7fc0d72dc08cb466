import numpy as np
import pytest

from xnetsim import sim
from xnetsim.errors import ConfigError, EmptyData, IoError, ParseError


def small_config(**over):
    base = dict(
        scheme="alamouti",
        constellation="qpsk",
        snr_db=(6.0, 10.0),
        seed=7,
        min_codeword_errors=25,
        max_trials=2000,
        batch_size=250,
    )
    base.update(over)
    return sim.SimConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            small_config(snr_db=())
        with pytest.raises(ConfigError):
            small_config(min_codeword_errors=0)
        with pytest.raises(ConfigError):
            small_config(batch_size=0)
        with pytest.raises(ConfigError):
            small_config(batch_size=5000)  # exceeds max_trials
        with pytest.raises(ConfigError):
            small_config(workers=0)

    def test_from_toml(self, tmp_path):
        p = tmp_path / "ok.toml"
        p.write_text(
            'scheme = "alamouti"\nconstellation = "qpsk"\nsnr_db = [8.0, 12.0]\nseed = 3\n'
        )
        cfg = sim.SimConfig.from_toml(str(p))
        assert cfg.scheme == "alamouti"
        assert cfg.snr_db == (8.0, 12.0)
        assert cfg.seed == 3
        assert cfg.workers == 1  # default

    def test_from_toml_rejects_unknown_key(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text('scheme = "alamouti"\nconstellation = "qpsk"\nsnr_db = [8.0]\nsrn = 1\n')
        with pytest.raises(ConfigError, match="unknown config keys"):
            sim.SimConfig.from_toml(str(p))

    def test_from_toml_missing_keys(self, tmp_path):
        p = tmp_path / "missing.toml"
        p.write_text('scheme = "alamouti"\n')
        with pytest.raises(ConfigError, match="missing config keys"):
            sim.SimConfig.from_toml(str(p))

    def test_from_toml_bad_syntax(self, tmp_path):
        p = tmp_path / "syntax.toml"
        p.write_text("scheme = [unterminated\n")
        with pytest.raises(ConfigError, match="invalid TOML"):
            sim.SimConfig.from_toml(str(p))

    def test_from_toml_scalar_snr(self, tmp_path):
        p = tmp_path / "scalar.toml"
        p.write_text('scheme = "alamouti"\nconstellation = "qpsk"\nsnr_db = 8.0\n')
        with pytest.raises(ConfigError, match="list"):
            sim.SimConfig.from_toml(str(p))

    def test_missing_file(self):
        with pytest.raises(IoError):
            sim.SimConfig.from_toml("/nonexistent/config.toml")


class TestPointResult:
    def test_rates(self):
        p = sim.PointResult(10.0, trials=500, bits_sent=8000, bit_errors=16,
                            codeword_errors=10, capped=False)
        assert p.ber == 16 / 8000
        # four codewords are decoded per trial
        assert p.cwer == 10 / 2000

    def test_empty_guards(self):
        p = sim.PointResult(10.0, 0, 0, 0, 0, capped=True)
        assert p.ber == 0.0 and p.cwer == 0.0


class TestSweepDeterminism:
    def test_worker_count_invariance(self, tmp_path):
        # the per-trial seed path makes the counters a pure function of
        # (config minus workers); CSV bytes must match
        cfg1 = small_config(workers=1)
        cfg3 = small_config(workers=3)
        out1, out3 = tmp_path / "w1.csv", tmp_path / "w3.csv"
        sim.write_csv(str(out1), sim.run_sweep(cfg1))
        sim.write_csv(str(out3), sim.run_sweep(cfg3))
        assert out1.read_bytes() == out3.read_bytes()

    def test_batch_size_invariance_when_capped(self):
        # with the error target out of reach every point runs exactly
        # max_trials trials, so batch partitioning cannot matter
        base = dict(min_codeword_errors=10**9, max_trials=1000, snr_db=(8.0,))
        a = sim.run_sweep(small_config(batch_size=125, **base)).points[0]
        b = sim.run_sweep(small_config(batch_size=500, **base)).points[0]
        assert a.capped and b.capped
        assert a.trials == b.trials == 1000
        assert (a.bit_errors, a.codeword_errors) == (b.bit_errors, b.codeword_errors)

    def test_repeat_run_identical(self):
        r1 = sim.run_sweep(small_config())
        r2 = sim.run_sweep(small_config())
        for p1, p2 in zip(r1.points, r2.points):
            assert (p1.trials, p1.bit_errors, p1.codeword_errors) == (
                p2.trials, p2.bit_errors, p2.codeword_errors)


class TestSweepBehavior:
    def test_noiseless_run_has_zero_errors(self):
        cfg = small_config(noise=False, min_codeword_errors=1, max_trials=300,
                           batch_size=300, snr_db=(0.0,))
        res = sim.run_sweep(cfg)
        p = res.points[0]
        assert p.capped  # no errors can ever accumulate
        assert p.bit_errors == 0 and p.codeword_errors == 0
        assert p.trials == 300

    def test_early_stop_before_cap(self):
        cfg = small_config(snr_db=(0.0,), min_codeword_errors=5,
                           max_trials=100000, batch_size=200)
        p = sim.run_sweep(cfg).points[0]
        assert not p.capped
        assert p.codeword_errors >= 5
        assert p.trials < 100000
        assert p.trials % 200 == 0  # stops on a batch boundary

    def test_on_point_callback_order(self):
        seen = []
        cfg = small_config(min_codeword_errors=1, max_trials=250, batch_size=250)
        sim.run_sweep(cfg, on_point=lambda p: seen.append(p.snr_db))
        assert seen == [6.0, 10.0]

    def test_errors_decrease_with_snr(self):
        cfg = small_config(snr_db=(2.0, 20.0), min_codeword_errors=10**9,
                           max_trials=1500, batch_size=250)
        res = sim.run_sweep(cfg)
        assert res.points[0].bit_errors > res.points[1].bit_errors
        assert res.m == 2
        assert res.any_capped


class TestCsv:
    def sweep(self):
        return sim.run_sweep(small_config(min_codeword_errors=5, max_trials=500,
                                          batch_size=250, snr_db=(4.0, 8.0)))

    def test_round_trip(self, tmp_path):
        sw = self.sweep()
        path = tmp_path / "out.csv"
        sim.write_csv(str(path), sw)
        meta, cols = sim.read_csv(str(path))
        assert meta["scheme"] == "alamouti"
        assert int(meta["m"]) == 2
        # repr round-trip keeps floats exact
        assert float(meta["theta"]) == sw.config.theta
        assert float(meta["phi"]) == sw.phi
        assert np.array_equal(cols["snr_db"], [4.0, 8.0])
        for i, p in enumerate(sw.points):
            assert cols["trials"][i] == p.trials
            assert cols["bit_errors"][i] == p.bit_errors
            assert cols["ber"][i] == p.ber

    def test_numpy_scalars_in_config_round_trip(self, tmp_path):
        # np.arange / np.arctan inputs must not leak "np.float64(...)"
        # into the file; everything is coerced to plain float up front
        cfg = small_config(min_codeword_errors=5, max_trials=500, batch_size=250,
                           snr_db=tuple(np.arange(4.0, 9.0, 4.0)),
                           scheme="lowdelay3", constellation="qpsk-rot")
        sw = sim.run_sweep(cfg)
        assert all(type(s) is float for s in cfg.snr_db)
        path = tmp_path / "out.csv"
        sim.write_csv(str(path), sw)
        assert "np.float64" not in path.read_text()
        meta, cols = sim.read_csv(str(path))
        assert float(meta["phi"]) == sw.phi
        assert np.array_equal(cols["snr_db"], [4.0, 8.0])

    def test_read_rejects_bad_header(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text("# scheme=x\nsnr,stuff\n1,2\n")
        with pytest.raises(ParseError, match="line 2"):
            sim.read_csv(str(p))

    def test_read_rejects_short_row(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text(",".join(sim.CSV_COLUMNS) + "\n1.0,2,3\n")
        with pytest.raises(ParseError, match="line 2: expected 7 fields"):
            sim.read_csv(str(p))

    def test_read_rejects_non_numeric(self, tmp_path):
        p = tmp_path / "n.csv"
        p.write_text(",".join(sim.CSV_COLUMNS) + "\n1.0,x,3,4,5,6,7\n")
        with pytest.raises(ParseError, match="line 2"):
            sim.read_csv(str(p))

    def test_empty_data(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("# scheme=alamouti\n" + ",".join(sim.CSV_COLUMNS) + "\n")
        with pytest.raises(EmptyData):
            sim.read_csv(str(p))

    def test_missing_file(self):
        with pytest.raises(IoError):
            sim.read_csv("/nonexistent/x.csv")

    def test_blank_lines_tolerated(self, tmp_path):
        sw = self.sweep()
        path = tmp_path / "b.csv"
        sim.write_csv(str(path), sw)
        padded = path.read_text().replace("\n#", "\n\n#", 1)
        path.write_text(padded)
        meta, cols = sim.read_csv(str(path))
        assert len(cols["snr_db"]) == 2


def test_unknown_scheme_rejected():
    from xnetsim.errors import UnsupportedSize

    with pytest.raises(UnsupportedSize, match="unknown code name"):
        sim.run_sweep(small_config(scheme="no-such-code"))
