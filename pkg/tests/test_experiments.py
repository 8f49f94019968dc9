"""Monte Carlo experiment runners: determinism, schema, and detectable signal.

The calibration bands at full replicate count live in test_acceptance; these
tests run small and fast and pin structure, reproducibility, and direction.
"""

import csv
import json

import numpy as np
import pytest

from netacorr import InputError, TransmissionConfig, generate_random_network
from netacorr.experiments import (
    DEFAULT_CORR_SETTINGS,
    run_correlation_distribution,
    run_coverage_experiment,
    run_degree_confounding_experiment,
    run_gls_correction_experiment,
    run_spurious_regression_experiment,
    write_report,
)

NET = generate_random_network(60, model="erdos-renyi", p=0.08, seed=3)


def test_coverage_experiment_schema_and_determinism():
    a = run_coverage_experiment(NET, kappa_list=(0, 3), reps=40, seed=1, m=99)
    b = run_coverage_experiment(NET, kappa_list=(0, 3), reps=40, seed=1, m=99)
    assert a.rows == b.rows
    assert a.replicates == b.replicates
    assert a.name == "coverage"
    assert [row["kappa"] for row in a.rows] == [0, 3]
    assert all(0.0 <= row["coverage"] <= 1.0 for row in a.rows)
    assert all(row["reps"] == 40 for row in a.rows)
    assert len(a.replicates) == 2 * 40
    assert a.config["m"] == 99 and a.config["a"] == 0.5


def test_coverage_experiment_threads_do_not_change_results():
    a = run_coverage_experiment(NET, kappa_list=(0, 2), reps=30, seed=4, m=99, threads=1)
    b = run_coverage_experiment(NET, kappa_list=(0, 2), reps=30, seed=4, m=99, threads=3)
    assert a.rows == b.rows


def test_coverage_rows_do_not_depend_on_which_kappas_ride_along():
    # each horizon regenerates its trajectory from the same per-replicate
    # stream, so a kappa row is identical whether or not others were requested
    both = run_coverage_experiment(NET, kappa_list=(0, 2), reps=25, seed=7, m=99)
    solo = run_coverage_experiment(NET, kappa_list=(2,), reps=25, seed=7, m=99)
    assert both.rows[1] == solo.rows[0]


def test_coverage_signal_direction():
    rep = run_coverage_experiment(NET, kappa_list=(0, 3), reps=60, seed=2, m=99)
    k0, k3 = rep.rows
    assert k3["coverage"] < k0["coverage"]
    assert k3["mean_se"] < k0["mean_se"]
    assert k3["sd_estimates"] > k0["sd_estimates"]
    assert k3["reject_y"] > k0["reject_y"]


def test_spurious_experiment_baseline_and_inflation():
    rep = run_spurious_regression_experiment(NET, kappa_list=(0, 3), reps=60,
                                             seed=0, m=99)
    rows = {row["kappa"]: row for row in rep.rows}
    assert set(rows) == {0, 3, "permuted"}
    assert rows[3]["sd_estimates"] > 1.2 * rows["permuted"]["sd_estimates"]
    assert rows["permuted"]["reject_x"] > 0.8  # X itself stays transmitted
    assert rows["permuted"]["reject_resid"] < 0.3
    assert rows[3]["reject_slope"] == 1.0 - rows[3]["coverage"]


def test_spurious_without_baseline():
    rep = run_spurious_regression_experiment(NET, kappa_list=(1,), reps=10, seed=0,
                                             m=49, include_permuted_baseline=False)
    assert [row["kappa"] for row in rep.rows] == [1]
    with pytest.raises(InputError):
        run_spurious_regression_experiment(NET, kappa_list=(), reps=10, seed=0)


def test_degree_experiment_confounding_direction():
    unc = run_degree_confounding_experiment(NET, effect_sizes=(0.0, 1.0), reps=60,
                                            seed=1, m=99, control_degree=False)
    con = run_degree_confounding_experiment(NET, effect_sizes=(0.0, 1.0), reps=60,
                                            seed=1, m=99, control_degree=True)
    u0, u1 = unc.rows
    c1 = con.rows[1]
    assert u1["bias"] > 0.1  # displaced upward by the shared degree cause
    assert abs(c1["bias"]) < abs(u1["bias"]) / 3.0
    assert u0["coverage"] >= 0.85  # b=0 is a null configuration
    assert u1["controlled"] == 0 and c1["controlled"] == 1
    assert u1["mc_se_mean_estimate"] == pytest.approx(
        u1["sd_estimates"] / np.sqrt(60), abs=1e-12
    )
    # Y is drawn once per run, so its dependence flag is constant per row
    assert u0["reject_y"] in (0.0, 1.0)


def test_gls_experiment_grid_and_determinism():
    a = run_gls_correction_experiment(NET, kappa_list=(1, 3), lambdas=(0.0, 0.5),
                                      reps=40, seed=2)
    b = run_gls_correction_experiment(NET, kappa_list=(1, 3), lambdas=(0.0, 0.5),
                                      reps=40, seed=2)
    assert a.rows == b.rows
    assert [(row["kappa"], row["lambda"]) for row in a.rows] == [
        (1, 0.0), (1, 0.5), (3, 0.0), (3, 0.5)
    ]
    assert all(row["estimator"] == "lmm" for row in a.rows)


def test_gls_experiment_estimator_gls_runs():
    rep = run_gls_correction_experiment(NET, kappa_list=(2,), lambdas=(0.0,),
                                        reps=30, seed=3, estimator="gls")
    assert rep.rows[0]["coverage"] >= 0.8  # true covariance: near-nominal


def test_gls_experiment_validation():
    with pytest.raises(InputError):
        run_gls_correction_experiment(NET, estimator="ridge", reps=10, seed=0)
    with pytest.raises(InputError):
        run_gls_correction_experiment(NET, kinship="identity", reps=10, seed=0)
    with pytest.raises(InputError):
        run_gls_correction_experiment(NET, lambdas=(1.5,), reps=10, seed=0)


def test_gls_experiment_adjacency_kinship_runs():
    rep = run_gls_correction_experiment(NET, kappa_list=(1,), lambdas=(0.0,),
                                        reps=20, seed=4, kinship="adjacency")
    assert 0.0 <= rep.rows[0]["coverage"] <= 1.0


def test_correlation_distribution_default_settings():
    rep = run_correlation_distribution(NET, reps=100, seed=0)
    labels = [row["label"] for row in rep.rows]
    assert labels == [lab for lab, _ in DEFAULT_CORR_SETTINGS]
    iid = rep.rows[0]
    assert iid["a"] is None and iid["sigma"] is None and iid["kappa"] is None
    assert abs(iid["corr_mean"]) < 0.05
    small = rep.rows[-1]
    assert small["frac_abs_gt_half"] > 0.5
    assert len(rep.replicates) == 4 * 100


def test_correlation_distribution_sigma_list_and_tuples():
    rep = run_correlation_distribution(
        NET,
        settings=[0.1, ("slow", TransmissionConfig(a=0.5, sigma=0.2, kappa=2))],
        reps=20, seed=0,
    )
    labels = [row["label"] for row in rep.rows]
    assert labels == ["iid", "sigma=0.1", "slow"]
    with pytest.raises(InputError):
        run_correlation_distribution(NET, settings=["fast"], reps=20, seed=0)
    with pytest.raises(InputError):
        run_correlation_distribution(NET, settings=[-0.5], reps=20, seed=0)


def test_experiment_rep_and_seed_validation():
    with pytest.raises(InputError):
        run_coverage_experiment(NET, reps=1, seed=0)
    with pytest.raises(InputError):
        run_coverage_experiment(NET, reps=10, seed=-3)


def test_write_report_csv_round_trip(tmp_path):
    rep = run_coverage_experiment(NET, kappa_list=(0,), reps=10, seed=0, m=49)
    paths = write_report(rep, tmp_path, fmt="csv")
    assert [p.split("/")[-1] for p in paths] == [
        "coverage_report.csv", "coverage_replicates.csv"
    ]
    with open(paths[0]) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["kappa"] == "0"
    assert float(rows[0]["coverage"]) == rep.rows[0]["coverage"]
    with open(paths[1]) as fh:
        reps_rows = list(csv.DictReader(fh))
    assert len(reps_rows) == 10


def test_write_report_json_round_trip(tmp_path):
    rep = run_correlation_distribution(NET, reps=20, seed=0)
    paths = write_report(rep, tmp_path, fmt="json")
    assert len(paths) == 1
    with open(paths[0]) as fh:
        doc = json.load(fh)
    assert doc["schema_version"] == 1
    assert doc["tool"] == "netacorr"
    assert doc["name"] == "correlation-distribution"
    assert doc["rows"] == rep.rows
    assert doc["config"]["n"] == NET.n
    # None fields must survive the trip as JSON null
    assert doc["rows"][0]["a"] is None
    with pytest.raises(InputError):
        write_report(rep, tmp_path, fmt="yaml")
