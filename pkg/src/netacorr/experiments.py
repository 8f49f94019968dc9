"""Monte Carlo experiments quantifying what network dependence does to
naive estimators, and what corrections recover.

Every experiment returns an ExperimentReport: summary rows (one per
setting), the per-replicate records behind them, and an echo of the full
configuration. Replicate r of experiment E under master seed s draws from
streams seeded SeedSequence((E, s, r, tag)), so runs are reproducible,
replicates are independent, and the same replicate shares its noise across
settings (common random numbers). For the transmission process that means
horizon kappa consumes a prefix of the draws of horizon kappa' > kappa,
which makes monotone comparisons across kappa far less noisy.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .deptest import PermutationConfig, permutation_test
from .errors import InputError
from .graph import adjacency_weights
from .inference import gls, lmm_fit, mean_ci_naive, ols
from .simulate import (
    ConfoundConfig,
    TransmissionConfig,
    degree_confounded_covariate,
    direct_transmission,
    standardized_degrees,
    transmission_covariance,
)

__all__ = [
    "ExperimentReport",
    "run_correlation_distribution",
    "run_coverage_experiment",
    "run_spurious_regression_experiment",
    "run_degree_confounding_experiment",
    "run_gls_correction_experiment",
    "write_report",
    "EXPERIMENT_NAMES",
]

# Leading stream tags, one per experiment, so experiments never share draws.
_CORR, _COVER, _SPUR, _DEGREE, _GLSEXP = 1, 2, 3, 4, 5

EXPERIMENT_NAMES = (
    "correlation-distribution",
    "coverage",
    "spurious-regression",
    "degree-confounding",
    "gls-correction",
)

# Named (a, sigma, kappa) settings for the correlation-distribution runs.
# The error scale controls how completely transmission wipes out the iid
# start; the small-error setting runs long enough that node values collapse
# onto the slowest network mode and pairwise correlations pile up near +-1.
DEFAULT_CORR_SETTINGS = (
    ("iid", None),
    ("large-error", TransmissionConfig(a=0.9, sigma=0.05, kappa=10)),
    ("moderate-error", TransmissionConfig(a=0.9, sigma=0.01, kappa=10)),
    ("small-error", TransmissionConfig(a=0.9, sigma=0.0, kappa=50)),
)


@dataclass
class ExperimentReport:
    name: str
    reps: int
    seed: int
    config: dict
    rows: list
    replicates: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "schema_version": 1,
            "tool": "netacorr",
            "version": __version__,
            "name": self.name,
            "reps": self.reps,
            "seed": self.seed,
            "config": self.config,
            "rows": self.rows,
            "replicates": self.replicates,
        }


def write_report(report, directory, fmt="csv"):
    """Write a report under ``directory``; returns the list of paths written.

    fmt "csv" writes <name>_report.csv (summary rows) and
    <name>_replicates.csv; fmt "json" writes a single <name>_report.json
    carrying rows, replicates and configuration.
    """
    import os

    os.makedirs(directory, exist_ok=True)
    base = report.name
    if fmt == "csv":
        paths = []
        for suffix, rows in (("report", report.rows), ("replicates", report.replicates)):
            path = os.path.join(directory, f"{base}_{suffix}.csv")
            _write_rows_csv(path, rows)
            paths.append(path)
        return paths
    if fmt == "json":
        path = os.path.join(directory, f"{base}_report.json")
        with open(path, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2, sort_keys=False)
            fh.write("\n")
        return [path]
    raise InputError(f"unknown report format {fmt!r}; choose csv or json")


def _write_rows_csv(path, rows):
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})


def run_correlation_distribution(net, settings=None, reps=500, seed=0, threads=1):
    """Distribution of the Pearson correlation of two independent fields.

    Each replicate draws two mutually independent outcome vectors on the
    same network under each setting and records their sample correlation.
    With iid data the correlations concentrate near 0 at scale 1/sqrt(n-1);
    under strong transmission they spread out and, in the near-noiseless
    long-horizon regime, pile up near -1 and +1 even though the fields
    never interact.

    settings may be None (the named defaults), a list of sigma floats
    (each becomes a=0.9, kappa=10 transmission), or (label, cfg) pairs
    with cfg a TransmissionConfig or None for the iid baseline.
    """
    _check_reps(reps, seed)
    labelled = _corr_settings(settings)
    n = net.n

    def one_rep(r):
        out = []
        for label, cfg in labelled:
            rng = _rng(_CORR, seed, r, 0)
            if cfg is None:
                x = rng.standard_normal(n)
                y = rng.standard_normal(n)
            else:
                x = direct_transmission(net, cfg, rng=rng)
                y = direct_transmission(net, cfg, rng=rng)
            out.append(_pearson(x, y))
        return out

    per_rep = _map_reps(one_rep, reps, threads)
    corrs = np.asarray(per_rep)  # (reps, n_settings)

    rows = []
    replicates = []
    for j, (label, cfg) in enumerate(labelled):
        c = corrs[:, j]
        rows.append({
            "label": label,
            "a": None if cfg is None else cfg.a,
            "sigma": None if cfg is None else cfg.sigma,
            "kappa": None if cfg is None else cfg.kappa,
            "corr_mean": float(c.mean()),
            "corr_sd": float(c.std(ddof=1)),
            "frac_abs_gt_half": float(np.mean(np.abs(c) > 0.5)),
            "reps": reps,
        })
        replicates.extend(
            {"label": label, "rep": r, "corr": float(c[r])} for r in range(reps)
        )
    config = {
        "n": net.n,
        "settings": [
            {"label": lab, "config": None if cfg is None else vars(cfg)}
            for lab, cfg in labelled
        ],
        "threads": threads,
    }
    return ExperimentReport(
        name="correlation-distribution", reps=reps, seed=seed,
        config=config, rows=rows, replicates=replicates,
    )


def run_coverage_experiment(net, kappa_list=(0, 1, 2, 3), reps=500, seed=0,
                            a=0.5, sigma=0.5, level=0.95, alpha=0.05,
                            m=500, threads=1):
    """Coverage of the naive iid mean interval as transmission deepens.

    The process mean is 0 at every horizon, so the nominal-level interval
    from mean_ci_naive should cover 0 about level of the time; dependence
    shrinks the reported SE relative to the true sampling spread of the
    mean and coverage decays with kappa. Also records the rejection rate
    of the permutation dependence test on the same data.
    """
    _check_reps(reps, seed)
    w = adjacency_weights(net)

    def one_rep(r):
        test_seed = _seed_int(_COVER, seed, r, 1)
        out = []
        for kappa in kappa_list:
            cfg = TransmissionConfig(a=a, sigma=sigma, kappa=kappa)
            y = direct_transmission(net, cfg, rng=_rng(_COVER, seed, r, 0))
            est = mean_ci_naive(y, level=level)
            res = permutation_test(y, w, PermutationConfig(m=m, seed=test_seed))
            out.append((est.mean, est.se,
                        float(est.ci[0] <= 0.0 <= est.ci[1]),
                        float(res.p_perm <= alpha)))
        return out

    per_rep = np.asarray(_map_reps(one_rep, reps, threads))  # (reps, nk, 4)

    rows = []
    replicates = []
    for j, kappa in enumerate(kappa_list):
        means = per_rep[:, j, 0]
        ses = per_rep[:, j, 1]
        covered = per_rep[:, j, 2]
        rejects = per_rep[:, j, 3]
        rows.append({
            "kappa": kappa,
            "coverage": float(covered.mean()),
            "bias": float(means.mean()),
            "mean_abs_error": float(np.abs(means).mean()),
            "mean_se": float(ses.mean()),
            "sd_estimates": float(means.std(ddof=1)),
            "reject_y": float(rejects.mean()),
            "reps": reps,
        })
        replicates.extend(
            {
                "kappa": kappa, "rep": r,
                "estimate": float(means[r]), "se": float(ses[r]),
                "covered": int(covered[r]), "reject_y": int(rejects[r]),
            }
            for r in range(reps)
        )
    config = {"n": net.n, "a": a, "sigma": sigma, "kappa_list": list(kappa_list),
              "level": level, "alpha": alpha, "m": m, "threads": threads}
    return ExperimentReport(name="coverage", reps=reps, seed=seed,
                            config=config, rows=rows, replicates=replicates)


def run_spurious_regression_experiment(net, kappa_list=(0, 1, 2, 3), reps=500,
                                       seed=0, a=0.7, sigma=0.05, level=0.95,
                                       alpha=0.05, m=500,
                                       include_permuted_baseline=True, threads=1):
    """Regression of one independently transmitted field on another.

    X and Y never interact, so the true slope is 0 at every horizon. As
    kappa grows both fields align with the same slow network modes and the
    OLS slope spreads out while its reported SE barely moves: the classic
    spurious-regression picture. The permuted baseline re-runs the kappa =
    max(kappa_list) regression after randomly relabelling Y, which breaks
    the network alignment and restores honest behaviour; its residual
    dependence test should reject at about the nominal rate.
    """
    _check_reps(reps, seed)
    if not kappa_list:
        raise InputError("kappa_list must not be empty")
    w = adjacency_weights(net)
    n = net.n
    kmax = max(kappa_list)
    labels = list(kappa_list) + (["permuted"] if include_permuted_baseline else [])

    def one_rep(r):
        seeds = {tag: _seed_int(_SPUR, seed, r, tag) for tag in (2, 3, 4, 6, 7, 8)}
        out = []
        xk = yk = None
        for kappa in kappa_list:
            cfgx = TransmissionConfig(a=a, sigma=sigma, kappa=kappa)
            x = direct_transmission(net, cfgx, rng=_rng(_SPUR, seed, r, 0))
            y = direct_transmission(net, cfgx, rng=_rng(_SPUR, seed, r, 1))
            if kappa == kmax:
                xk, yk = x, y
            out.append(_spurious_cells(x, y, w, m, seeds[2], seeds[3], seeds[4],
                                       level, alpha))
        if include_permuted_baseline:
            perm = _rng(_SPUR, seed, r, 5).permutation(n)
            out.append(_spurious_cells(xk, yk[perm], w, m, seeds[6], seeds[7],
                                       seeds[8], level, alpha))
        return out

    per_rep = np.asarray(_map_reps(one_rep, reps, threads))  # (reps, labels, 6)

    rows = []
    replicates = []
    for j, label in enumerate(labels):
        slopes = per_rep[:, j, 0]
        ses = per_rep[:, j, 1]
        covered = per_rep[:, j, 2]
        rej_x = per_rep[:, j, 3]
        rej_y = per_rep[:, j, 4]
        rej_res = per_rep[:, j, 5]
        rows.append({
            "kappa": label,
            "coverage": float(covered.mean()),
            "bias": float(slopes.mean()),
            "mean_abs_error": float(np.abs(slopes).mean()),
            "mean_se": float(ses.mean()),
            "sd_estimates": float(slopes.std(ddof=1)),
            "reject_slope": float(1.0 - covered.mean()),
            "reject_x": float(rej_x.mean()),
            "reject_y": float(rej_y.mean()),
            "reject_resid": float(rej_res.mean()),
            "reps": reps,
        })
        replicates.extend(
            {
                "kappa": label, "rep": r, "slope": float(slopes[r]),
                "se": float(ses[r]), "covered": int(covered[r]),
                "reject_x": int(rej_x[r]), "reject_y": int(rej_y[r]),
                "reject_resid": int(rej_res[r]),
            }
            for r in range(reps)
        )
    config = {"n": net.n, "a": a, "sigma": sigma, "kappa_list": list(kappa_list),
              "include_permuted_baseline": include_permuted_baseline,
              "level": level, "alpha": alpha, "m": m, "threads": threads}
    return ExperimentReport(name="spurious-regression", reps=reps, seed=seed,
                            config=config, rows=rows, replicates=replicates)


def _spurious_cells(x, y, w, m, sx, sy, sr, level, alpha):
    design = np.column_stack([np.ones(len(x)), x])
    fit = ols(y, design, level=level)
    slope, se = float(fit.beta[1]), float(fit.se[1])
    covered = float(fit.ci[1, 0] <= 0.0 <= fit.ci[1, 1])
    px = permutation_test(x, w, PermutationConfig(m=m, seed=sx)).p_perm
    py = permutation_test(y, w, PermutationConfig(m=m, seed=sy)).p_perm
    pr = permutation_test(fit.residuals, w, PermutationConfig(m=m, seed=sr)).p_perm
    return (slope, se, covered,
            float(px <= alpha), float(py <= alpha), float(pr <= alpha))


def run_degree_confounding_experiment(net, effect_sizes=(0.0, 1.0), reps=500,
                                      seed=0, outcome_effect=0.5, noise=1.0,
                                      control_degree=False, level=0.95,
                                      alpha=0.05, m=500, threads=1):
    """Degree as a common cause of covariate and outcome.

    The outcome Y = outcome_effect * zdeg + eta is synthesized once per run
    and held fixed; each replicate redraws the covariate
    x = b * zdeg + noise * eps. The true effect of x on Y is 0 by
    construction, so an uncontrolled regression with b != 0 shows the
    classic omitted-variable displacement, while adding zdeg to the design
    (control_degree=True) restores centering and coverage.
    """
    _check_reps(reps, seed)
    w = adjacency_weights(net)
    n = net.n
    zdeg = standardized_degrees(net)
    rng_y = _rng(_DEGREE, seed, 0, 0)
    y = outcome_effect * zdeg + rng_y.standard_normal(n)
    res_y = permutation_test(y, w, PermutationConfig(m=m, seed=_seed_int(_DEGREE, seed, 0, 1)))
    reject_y = float(res_y.p_perm <= alpha)

    def one_rep(r):
        out = []
        for b in effect_sizes:
            cfg = ConfoundConfig(b=b, noise=noise)
            x = degree_confounded_covariate(net, cfg, rng=_rng(_DEGREE, seed, r, 2))
            cols = [np.ones(n), x] + ([zdeg] if control_degree else [])
            fit = ols(y, np.column_stack(cols), level=level)
            slope, se = float(fit.beta[1]), float(fit.se[1])
            covered = float(fit.ci[1, 0] <= 0.0 <= fit.ci[1, 1])
            px = permutation_test(x, w, PermutationConfig(m=m, seed=_seed_int(_DEGREE, seed, r, 3))).p_perm
            pr = permutation_test(fit.residuals, w, PermutationConfig(m=m, seed=_seed_int(_DEGREE, seed, r, 4))).p_perm
            out.append((slope, se, covered, float(px <= alpha), float(pr <= alpha)))
        return out

    per_rep = np.asarray(_map_reps(one_rep, reps, threads))

    rows = []
    replicates = []
    for j, b in enumerate(effect_sizes):
        slopes = per_rep[:, j, 0]
        ses = per_rep[:, j, 1]
        covered = per_rep[:, j, 2]
        rej_x = per_rep[:, j, 3]
        rej_res = per_rep[:, j, 4]
        rows.append({
            "b": b,
            "controlled": int(control_degree),
            "coverage": float(covered.mean()),
            "bias": float(slopes.mean()),
            "mean_abs_error": float(np.abs(slopes).mean()),
            "mean_estimate": float(slopes.mean()),
            "sd_estimates": float(slopes.std(ddof=1)),
            "mc_se_mean_estimate": float(slopes.std(ddof=1) / np.sqrt(reps)),
            "mean_se": float(ses.mean()),
            "reject_y": reject_y,
            "reject_x": float(rej_x.mean()),
            "reject_resid": float(rej_res.mean()),
            "reps": reps,
        })
        replicates.extend(
            {
                "b": b, "rep": r, "slope": float(slopes[r]), "se": float(ses[r]),
                "covered": int(covered[r]), "reject_x": int(rej_x[r]),
                "reject_resid": int(rej_res[r]),
            }
            for r in range(reps)
        )
    config = {"n": net.n, "effect_sizes": list(effect_sizes),
              "outcome_effect": outcome_effect, "noise": noise,
              "control_degree": control_degree, "level": level,
              "alpha": alpha, "m": m, "threads": threads}
    return ExperimentReport(name="degree-confounding", reps=reps, seed=seed,
                            config=config, rows=rows, replicates=replicates)


def run_gls_correction_experiment(net, kappa_list=(1, 2, 3),
                                  lambdas=(0.0, 0.1, 0.25, 0.5), reps=500,
                                  seed=0, a=0.7, sigma=0.05, estimator="lmm",
                                  kinship="transmission", level=0.95,
                                  threads=1):
    """Dependence-aware regression under a (possibly misspecified) covariance.

    Replays the spurious-regression design but fits the slope with an
    estimator that is told the error covariance: the exact transmission
    covariance Sigma(kappa) blended toward its own diagonal,

        K_lambda = (1 - lambda) * Sigma + lambda * diag(Sigma),

    so lambda = 0 is the truth and larger lambda discards more of the
    dependence structure. estimator "lmm" fits the mixed model with K as
    the similarity matrix (adaptive rescaling); "gls" plugs K in as the
    known covariance. kinship "adjacency" swaps Sigma for a PSD-clipped,
    diagonal-normalized adjacency matrix, a structure-only analogue with
    no exactness guarantee.
    """
    _check_reps(reps, seed)
    if estimator not in ("lmm", "gls"):
        raise InputError(f"estimator must be 'lmm' or 'gls', got {estimator!r}")
    if kinship not in ("transmission", "adjacency"):
        raise InputError(f"kinship must be 'transmission' or 'adjacency', got {kinship!r}")
    for lam in lambdas:
        if not (0.0 <= lam <= 1.0):
            raise InputError(f"lambda values must be in [0, 1], got {lam!r}")
    n = net.n

    base_by_kappa = {}
    for kappa in kappa_list:
        if kinship == "transmission":
            base_by_kappa[kappa] = transmission_covariance(net, a, sigma, kappa)
        else:
            base_by_kappa[kappa] = _clipped_adjacency_kinship(net)

    def one_rep(r):
        out = []
        for kappa in kappa_list:
            cfg = TransmissionConfig(a=a, sigma=sigma, kappa=kappa)
            x = direct_transmission(net, cfg, rng=_rng(_GLSEXP, seed, r, 0))
            y = direct_transmission(net, cfg, rng=_rng(_GLSEXP, seed, r, 1))
            design = np.column_stack([np.ones(n), x])
            base = base_by_kappa[kappa]
            dbase = np.diag(np.diag(base))
            for lam in lambdas:
                k = (1.0 - lam) * base + lam * dbase
                if estimator == "gls":
                    fit = gls(y, design, k, level=level)
                    slope, se = float(fit.beta[1]), float(fit.se[1])
                    lo_ci, hi_ci = float(fit.ci[1, 0]), float(fit.ci[1, 1])
                else:
                    fit = lmm_fit(y, design, k)
                    slope, se = float(fit.beta[1]), float(fit.se[1])
                    z = _z_quantile(level)
                    lo_ci, hi_ci = slope - z * se, slope + z * se
                out.append((slope, se, float(lo_ci <= 0.0 <= hi_ci)))
        return out

    per_rep = np.asarray(_map_reps(one_rep, reps, threads))
    cells = [(kappa, lam) for kappa in kappa_list for lam in lambdas]

    rows = []
    replicates = []
    for j, (kappa, lam) in enumerate(cells):
        slopes = per_rep[:, j, 0]
        ses = per_rep[:, j, 1]
        covered = per_rep[:, j, 2]
        rows.append({
            "kappa": kappa,
            "lambda": lam,
            "estimator": estimator,
            "coverage": float(covered.mean()),
            "bias": float(slopes.mean()),
            "mean_abs_error": float(np.abs(slopes).mean()),
            "mean_se": float(ses.mean()),
            "sd_estimates": float(slopes.std(ddof=1)),
            "reps": reps,
        })
        replicates.extend(
            {
                "kappa": kappa, "lambda": lam, "rep": r,
                "slope": float(slopes[r]), "se": float(ses[r]),
                "covered": int(covered[r]),
            }
            for r in range(reps)
        )
    config = {"n": net.n, "a": a, "sigma": sigma, "kappa_list": list(kappa_list),
              "lambdas": list(lambdas), "estimator": estimator,
              "kinship": kinship, "level": level, "threads": threads}
    return ExperimentReport(name="gls-correction", reps=reps, seed=seed,
                            config=config, rows=rows, replicates=replicates)


def _clipped_adjacency_kinship(net):
    w = adjacency_weights(net)
    lam, u = np.linalg.eigh(w)
    lam = np.clip(lam, 0.0, None)
    k = (u * lam) @ u.T
    k = (k + k.T) / 2.0
    d = np.diagonal(k).mean()
    return k / d


def _corr_settings(settings):
    if settings is None:
        return list(DEFAULT_CORR_SETTINGS)
    out = [("iid", None)]
    for s in settings:
        if isinstance(s, tuple) and len(s) == 2:
            label, cfg = s
            if cfg is not None and not isinstance(cfg, TransmissionConfig):
                raise InputError(f"setting {label!r} must map to a TransmissionConfig or None")
            if cfg is None and label == "iid":
                continue  # baseline is always present
            out.append((str(label), cfg))
        elif isinstance(s, (int, float)) and not isinstance(s, bool):
            if s < 0:
                raise InputError(f"sigma must be >= 0, got {s!r}")
            out.append((f"sigma={s:g}", TransmissionConfig(a=0.9, sigma=float(s), kappa=10)))
        else:
            raise InputError(f"bad correlation setting {s!r}")
    return out


def _pearson(x, y):
    dx = x - x.mean()
    dy = y - y.mean()
    return float((dx @ dy) / np.sqrt((dx @ dx) * (dy @ dy)))


def _z_quantile(level):
    from scipy import stats

    return float(stats.norm.ppf(0.5 + level / 2.0))


def _rng(exp, seed, rep, tag):
    return np.random.default_rng(np.random.SeedSequence((exp, seed, rep, tag)))


def _seed_int(exp, seed, rep, tag):
    return int(np.random.SeedSequence((exp, seed, rep, tag)).generate_state(1, np.uint64)[0])


def _map_reps(fn, reps, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(reps)))
    return [fn(r) for r in range(reps)]


def _check_reps(reps, seed):
    if not isinstance(reps, int) or reps < 2:
        raise InputError(f"reps must be an integer >= 2, got {reps!r}")
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InputError(f"seed must be a non-negative integer, got {seed!r}")
