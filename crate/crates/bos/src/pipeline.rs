//! The computations behind each command, producing plain records.

use std::collections::HashSet;

use num_complex::Complex64;
use serde::Serialize;

use bos_core::analysis::{build_cross_report, decay_slope, default_fit_range, CrossReport};
use bos_core::eigen::{balance, eigen_all_with, filter_stable, Boundary, EigenOptions, EigenPair};
use bos_core::heun::connection_at;
use bos_core::recurrence::{find_real_roots, ShootingOptions};
use bos_core::sturm_liouville::{assemble, lambda_from_mu, sl_spectrum};
use bos_core::{build_truncated, heun_parameters, Precision};

use crate::config::{CliError, RunConfig};
use crate::output::Record;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub index: usize,
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub residual: Option<f64>,
    pub stable: bool,
    pub decay_slope: Option<f64>,
}

impl Record for SpectrumRow {
    const HEADER: &'static [&'static str] =
        &["epsilon", "N", "index", "re_lambda", "im_lambda", "residual", "stable", "decay_slope"];
}

/// Eigenpairs of the `N` section with vectors, stability judged against the
/// `2N` section when `filter` is set, decay slopes over the default window.
pub fn matrix_pairs(
    epsilon: f64,
    n: usize,
    boundary: Boundary,
    precision: Precision,
    filter: bool,
    tol: f64,
) -> Result<Vec<EigenPair>, CliError> {
    let opts = EigenOptions { precision, boundary, ..EigenOptions::default() };
    let wrap = |e: bos_core::Error| match CliError::from(e) {
        CliError::Numerical { message, row, .. } => CliError::numerical(message, epsilon, row),
        other => other,
    };
    let small =
        eigen_all_with(&balance(&build_truncated(epsilon, n)?), true, &opts).map_err(wrap)?;
    let mut pairs = small.pairs.clone();
    if filter {
        let large =
            eigen_all_with(&balance(&build_truncated(epsilon, 2 * n)?), false, &opts).map_err(wrap)?;
        let stable: HashSet<(u64, u64)> = filter_stable(&small, &large, tol)
            .iter()
            .map(|p| (p.lambda.re.to_bits(), p.lambda.im.to_bits()))
            .collect();
        for p in pairs.iter_mut() {
            p.stable = stable.contains(&(p.lambda.re.to_bits(), p.lambda.im.to_bits()));
        }
    }
    let range = default_fit_range(n);
    for p in pairs.iter_mut() {
        if !p.vector.is_empty() {
            p.decay_slope = decay_slope(&p.vector, range).ok();
        }
    }
    Ok(pairs)
}

pub fn spectrum_rows(epsilon: f64, cfg: &RunConfig) -> Result<Vec<SpectrumRow>, CliError> {
    let pairs = matrix_pairs(epsilon, cfg.size, cfg.boundary, cfg.precision, cfg.filter, cfg.tol)?;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(i, p)| SpectrumRow {
            epsilon,
            n: cfg.size,
            index: i + 1,
            re_lambda: p.lambda.re,
            im_lambda: p.lambda.im,
            residual: p.residual,
            stable: p.stable,
            decay_slope: p.decay_slope,
        })
        .collect())
}

/// One line of a cross report. Matched rows carry `k`; eigenvalues found by
/// another route but by no matrix eigenvalue come after them with only that
/// route's column filled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossRecord {
    pub epsilon: f64,
    pub k: Option<usize>,
    pub route: &'static str,
    pub lambda_matrix_re: Option<f64>,
    pub lambda_matrix_im: Option<f64>,
    pub lambda_shooting: Option<f64>,
    pub lambda_sl: Option<f64>,
    pub connection_ratio: Option<f64>,
    pub decay_slope: Option<f64>,
    pub discrepancy: Option<f64>,
}

impl Record for CrossRecord {
    const HEADER: &'static [&'static str] = &[
        "epsilon",
        "k",
        "route",
        "lambda_matrix_re",
        "lambda_matrix_im",
        "lambda_shooting",
        "lambda_sl",
        "connection_ratio",
        "decay_slope",
        "discrepancy",
    ];
}

#[derive(Clone, Debug)]
pub struct CrossOutcome {
    pub report: CrossReport,
    pub records: Vec<CrossRecord>,
    /// First failing row (1-based) and the reason.
    pub failure: Option<(Option<usize>, String)>,
}

/// Runs all four routes at one `ε` and compares the `count` smallest stable
/// matrix eigenvalues.
pub fn crosscheck(epsilon: f64, cfg: &RunConfig) -> Result<CrossOutcome, CliError> {
    let pairs = matrix_pairs(epsilon, cfg.size, Boundary::Asymptotic, cfg.precision, true, cfg.tol)?;
    let stable: Vec<EigenPair> =
        pairs.into_iter().filter(|p| p.stable).take(cfg.count).collect();

    let top = stable.last().map_or(1.0, |p| p.lambda.re);
    let (lo, hi) = (0.05, 1.02 * top + 1.0);
    let seeds = ((hi - lo) * 10.0).ceil() as usize + 2;
    let shoot_opts = ShootingOptions { precision: cfg.precision, ..ShootingOptions::default() };
    let shooting = find_real_roots(epsilon, lo, hi, seeds, &shoot_opts)
        .map_err(|e| with_eps(e, epsilon))?;

    let sys = assemble(epsilon, cfg.galerkin).map_err(|e| with_eps(e, epsilon))?;
    let sl: Vec<f64> = sl_spectrum(&sys, cfg.galerkin.min(cfg.count + 5))
        .map_err(|e| with_eps(e, epsilon))?
        .into_iter()
        .map(|mu| lambda_from_mu(epsilon, mu))
        .filter(|l| *l <= hi)
        .collect();

    let mut connection = Vec::with_capacity(stable.len());
    for p in &stable {
        let params = heun_parameters(epsilon, Complex64::new(p.lambda.re, 0.0))?;
        let fit = connection_at(&params).map_err(|e| with_eps(e, epsilon))?;
        connection.push((p.lambda.re, fit.ratio()));
    }

    let report = build_cross_report(epsilon, &stable, &shooting, &sl, &connection);
    let mut records: Vec<CrossRecord> = report
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| CrossRecord {
            epsilon,
            k: Some(i + 1),
            route: "all",
            lambda_matrix_re: Some(r.lambda_matrix.re),
            lambda_matrix_im: Some(r.lambda_matrix.im),
            lambda_shooting: r.lambda_shooting,
            lambda_sl: r.lambda_sl,
            connection_ratio: r.connection,
            decay_slope: r.decay_slope,
            discrepancy: Some(r.discrepancy),
        })
        .collect();
    for u in &report.unmatched {
        let mut rec = CrossRecord {
            epsilon,
            k: None,
            route: u.route.name(),
            lambda_matrix_re: None,
            lambda_matrix_im: None,
            lambda_shooting: None,
            lambda_sl: None,
            connection_ratio: None,
            decay_slope: None,
            discrepancy: None,
        };
        match u.route {
            bos_core::analysis::Route::Shooting => rec.lambda_shooting = Some(u.lambda),
            bos_core::analysis::Route::SturmLiouville => rec.lambda_sl = Some(u.lambda),
            _ => rec.lambda_matrix_re = Some(u.lambda),
        }
        records.push(rec);
    }

    let failure = judge(&report, cfg);
    Ok(CrossOutcome { report, records, failure })
}

fn judge(report: &CrossReport, cfg: &RunConfig) -> Option<(Option<usize>, String)> {
    for (i, r) in report.rows.iter().enumerate() {
        let k = i + 1;
        if r.lambda_shooting.is_none() || r.lambda_sl.is_none() {
            return Some((Some(k), format!("row {k}: no shooting or Sturm-Liouville match")));
        }
        if !(r.discrepancy <= cfg.gate) {
            return Some((Some(k), format!("row {k}: discrepancy {:e} above gate {:e}", r.discrepancy, cfg.gate)));
        }
        if !(r.lambda_matrix.im.abs() <= cfg.gate) {
            return Some((Some(k), format!("row {k}: |Im lambda| {:e} above gate {:e}", r.lambda_matrix.im.abs(), cfg.gate)));
        }
    }
    if report.rows.len() < cfg.count {
        return Some((None, format!("only {} stable eigenvalues, {} requested", report.rows.len(), cfg.count)));
    }
    None
}

fn with_eps(e: bos_core::Error, epsilon: f64) -> CliError {
    match CliError::from(e) {
        CliError::Numerical { message, row, .. } => CliError::numerical(message, epsilon, row),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub epsilon: f64,
    pub k: usize,
    pub re_lambda: f64,
    pub im_lambda: f64,
}

impl Record for AggregateRow {
    const HEADER: &'static [&'static str] = &["epsilon", "k", "re_lambda", "im_lambda"];
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatusRow {
    pub epsilon: f64,
    pub status: &'static str,
    pub stable_count: usize,
    pub message: String,
}

impl Record for StatusRow {
    const HEADER: &'static [&'static str] = &["epsilon", "status", "stable_count", "message"];
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub spectra: Vec<SpectrumRow>,
    pub aggregate: Vec<AggregateRow>,
    pub status: Vec<StatusRow>,
}

impl SweepOutcome {
    pub fn failed(&self) -> bool {
        self.status.iter().any(|s| s.status != "ok")
    }
}

/// Spectra for every `ε`, run concurrently and assembled in ascending `ε`.
pub fn sweep(cfg: &RunConfig) -> SweepOutcome {
    let mut eps = cfg.epsilons.clone();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let results: Vec<Result<Vec<SpectrumRow>, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> =
            eps.iter().map(|&e| s.spawn(move || spectrum_rows(e, cfg))).collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| {
                    Err(CliError::Numerical { message: "worker panicked".into(), epsilon: None, row: None })
                })
            })
            .collect()
    });
    let mut out = SweepOutcome::default();
    for (&e, r) in eps.iter().zip(results) {
        match r {
            Ok(rows) => {
                let stable: Vec<&SpectrumRow> = rows.iter().filter(|r| r.stable || !cfg.filter).collect();
                for (k, r) in stable.iter().enumerate() {
                    out.aggregate.push(AggregateRow {
                        epsilon: e,
                        k: k + 1,
                        re_lambda: r.re_lambda,
                        im_lambda: r.im_lambda,
                    });
                }
                out.status.push(StatusRow { epsilon: e, status: "ok", stable_count: stable.len(), message: String::new() });
                out.spectra.extend(rows);
            }
            Err(err) => out.status.push(StatusRow {
                epsilon: e,
                status: "error",
                stable_count: 0,
                message: err.to_string(),
            }),
        }
    }
    out
}
