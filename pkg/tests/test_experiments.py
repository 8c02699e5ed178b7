import json
import math

import pytest

from regmax.experiments import (
    DEFAULT_TOLERANCES,
    ExperimentConfig,
    coefficients_summary,
    load_config,
    run_coupling_experiment,
    run_experiment,
    run_gumbel_experiment,
    run_local_limit_experiment,
    run_oracle_validation,
)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="unknown experiment kind"):
            ExperimentConfig(kind="nope", n=21)
        with pytest.raises(ValueError, match="lam"):
            ExperimentConfig(kind="gumbel", n=21, lam=0.05)
        with pytest.raises(ValueError, match="samples"):
            ExperimentConfig(kind="gumbel", n=21, samples=0)
        with pytest.raises(ValueError, match="workers"):
            ExperimentConfig(kind="gumbel", n=21, workers=0)
        with pytest.raises(ValueError, match="distinct vertices"):
            ExperimentConfig(kind="coupling", n=21, i=3, j=3)
        with pytest.raises(ValueError, match="distinct vertices"):
            ExperimentConfig(kind="coupling", n=21, i=0, j=21)
        # sampling kinds need a realizable degree; d = 3.5 at n=8 is not
        with pytest.raises(ValueError, match="non-integer degree"):
            ExperimentConfig(kind="gumbel", n=8, lam=0.5)
        ExperimentConfig(kind="oracle-validation", n=8)  # never samples at (n, lam)

    def test_from_dict_degree_wins(self):
        cfg = ExperimentConfig.from_dict({"kind": "gumbel", "n": 21, "d": 10, "lam": 0.9})
        assert cfg.lam == 0.5
        with pytest.raises(ValueError, match="also needs 'n'"):
            ExperimentConfig.from_dict({"kind": "gumbel", "d": 10})
        with pytest.raises(ValueError, match="unknown config keys"):
            ExperimentConfig.from_dict({"kind": "gumbel", "n": 21, "bogus": 1})

    def test_to_dict_round_trip(self):
        cfg = ExperimentConfig(kind="gumbel", n=21, lam=0.5, samples=10)
        d = cfg.to_dict()
        assert d["d"] == 10
        assert d["tolerances"] == DEFAULT_TOLERANCES["gumbel"]
        # oracle-validation has no degree to report
        assert ExperimentConfig(kind="oracle-validation", n=8).to_dict()["d"] is None

    def test_tolerances_replace_wholesale(self):
        cfg = ExperimentConfig(kind="gumbel", n=21, tolerances={"abs_corr": 0.5})
        assert cfg.effective_tolerances() == {"abs_corr": 0.5}

    def test_load_config_precedence(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"kind": "local-limit", "n": 21, "d": 10, "seed": 3}))
        cfg = load_config(path, {"samples": 50, "seed": None})
        assert (cfg.kind, cfg.n, cfg.lam, cfg.samples, cfg.seed) == (
            "local-limit",
            21,
            0.5,
            50,
            3,
        )
        # a density override discards the file-level degree
        cfg = load_config(path, {"lam": 0.3, "n": 21})
        assert cfg.lam == 0.3
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2]")
        with pytest.raises(ValueError, match="JSON object"):
            load_config(bad, {})


class TestReports:
    def test_gumbel_smoke_and_determinism(self):
        cfg = ExperimentConfig(kind="gumbel", n=21, lam=0.5, samples=40, seed=11, workers=2)
        rep = run_gumbel_experiment(cfg)
        again = run_experiment(cfg)
        assert rep.to_json() == again.to_json()
        assert rep.csv_text() == again.csv_text()
        assert len(rep.records) == 40
        rec = rep.records[0]
        assert set(rec) == {"sample", "x_max", "x_min", "x_12", "scaled_max", "scaled_min"}
        stats = rep.summary["stats"]
        for key in (
            "ks_gumbel_max",
            "ks_gumbel_min",
            "ks_surrogate_max",
            "abs_corr",
            "concentration_freq",
            "f_diff_abs",
        ):
            assert math.isfinite(stats[key])
        assert set(rep.summary["checks"]) == set(DEFAULT_TOLERANCES["gumbel"])

    def test_local_limit_exact_consistent_with_records(self):
        cfg = ExperimentConfig(kind="local-limit", n=8, lam=4 / 7, exact=True)
        rep = run_local_limit_experiment(cfg)
        lo, hi = rep.summary["window"]
        emp = {r["h"]: r["empirical"] for r in rep.records}
        binom = {r["h"]: r["binom"] for r in rep.records}
        tv = 0.5 * sum(abs(emp.get(h, 0.0) - binom[h]) for h in range(lo, hi + 1))
        assert rep.summary["stats"]["tv_binom_window"] == pytest.approx(tv, abs=1e-12)
        assert rep.summary["n_samples"] == 19355
        # at n=8 the central-window TV honestly exceeds the asymptotic gate
        assert not rep.passed

    def test_local_limit_exact_cap(self):
        with pytest.raises(ValueError, match="exact mode"):
            run_local_limit_experiment(
                ExperimentConfig(kind="local-limit", n=41, lam=0.5, exact=True)
            )

    def test_local_limit_mc(self):
        cfg = ExperimentConfig(kind="local-limit", n=21, lam=0.5, samples=60, seed=4)
        rep = run_local_limit_experiment(cfg)
        assert len(rep.records) == 60
        assert rep.summary["n_samples"] == 60
        assert rep.summary["stats"]["mean"] == pytest.approx(
            sum(r["x_12"] for r in rep.records) / 60
        )

    def test_coupling_smoke(self):
        cfg = ExperimentConfig(
            kind="coupling",
            n=21,
            lam=0.5,
            samples=4,
            seed=5,
            h_offset=3,
            burn_in=800,
            thinning=40,
        )
        rep = run_coupling_experiment(cfg)
        assert len(rep.records) == 4
        assert rep.summary["h_start"] == 5 and rep.summary["h_target"] == 8
        assert rep.summary["stats"]["degree_violations"] == 0.0
        for rec in rep.records:
            hist = rec["w_label_histogram_summary"]
            if hist:
                for part in hist.split(";"):
                    w, c = part.split(":")
                    assert 0 <= int(w) < 21 and int(c) >= 1
        assert 0 <= rep.summary["w_label_max_freq"] <= 1

    def test_coupling_offset_cap(self):
        cfg = ExperimentConfig(kind="coupling", n=21, lam=0.5, samples=1, h_offset=11)
        with pytest.raises(ValueError, match="h_offset"):
            run_coupling_experiment(cfg)

    def test_oracle_validation_all_green(self):
        cfg = ExperimentConfig(kind="oracle-validation", n=8, samples=800, seed=3)
        rep = run_oracle_validation(cfg)
        assert rep.passed
        by_check = {r["check"]: r for r in rep.records}
        assert by_check["count_6_3"]["observed"] == 70
        assert by_check["mckay_monotone"]["ok"] == 1
        # boolean gates are hard-wired, not tunable
        assert rep.summary["checks"]["identity"]["pass"]

    def test_lower_bound_checks_use_ge(self):
        cfg = ExperimentConfig(kind="oracle-validation", n=8, samples=800, seed=3)
        rep = run_oracle_validation(cfg)
        assert rep.summary["checks"]["chi2_p_min"]["op"] == ">="
        assert rep.summary["checks"]["local_limit_nonedge_max"]["op"] == "<="

    def test_write_layout(self, tmp_path):
        cfg = ExperimentConfig(kind="local-limit", n=8, lam=4 / 7, exact=True)
        rep = run_local_limit_experiment(cfg)
        csv_path, json_path = rep.write(tmp_path / "out")
        assert csv_path.name == "records.csv" and json_path.name == "summary.json"
        assert csv_path.read_text().splitlines()[0] == "# schema_version=1"
        doc = json.loads(json_path.read_text())
        assert doc["schema_version"] == 1
        assert doc["kind"] == "local-limit"
        # canonical serialization: keys sorted, no whitespace
        assert json_path.read_text() == rep.to_json()


def test_coefficients_summary_smoke():
    doc = coefficients_summary(10, 3, -5.0, -5.0, 400, seed=2)
    assert set(doc) == {"phi", "delta1", "delta2", "bound", "skipped_events", "n_samples"}
    assert doc["n_samples"] == 400
    assert doc["bound"] >= 0
    with pytest.raises(ValueError, match="no event"):
        coefficients_summary(10, 3, 1e9, -1e9, 50, seed=2)
