//! Coupled-path Monte Carlo error estimation and convergence-rate fitting.
//!
//! The strong error at level `N` is proxied by the mean absolute difference
//! between the level-`N` and level-`2N` approximations driven by the *same*
//! Brownian path:
//!
//! ```text
//! err_v(N) = (1/M) sum_i |vhat_T^(N) - vhat_T^(2N)|_i,    err_x analogous.
//! ```
//!
//! Each path draws its fine (level `2N`) grid from a counter-based stream
//! keyed on `(master_seed, N, path)` and obtains the coarse grid by exact
//! coarsening, never by an independent draw. Decay rates are the slopes of
//! least-squares fits of `log2 err` against `log2 N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cir::SchemeSpec;
use crate::error::{Error, Result};
use crate::heston::joint_terminal;
use crate::model::Model;
use crate::rng::{derive_seed, gaussian_increments, IncrementGrid, SeedSpec};

/// One Monte Carlo error measurement at a single `(scheme, model, N, M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub scheme: String,
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub err_v: f64,
    pub se_v: f64,
    pub err_x: f64,
    pub se_x: f64,
    pub seed: u64,
}

/// Least-squares estimate of the decay rate over a log2 error table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    /// Positive decay rate (the negated regression slope).
    pub slope: f64,
    pub intercept: f64,
    /// The `N` values that entered the fit.
    pub fit_range: Vec<usize>,
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
}

/// Which error column a rate fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    Cir,
    Heston,
}

impl FitTarget {
    pub fn label(self) -> &'static str {
        match self {
            FitTarget::Cir => "cir",
            FitTarget::Heston => "heston",
        }
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = (ss / (m - 1.0)).sqrt();
    (mean, sd / m.sqrt())
}

/// Generates the coupled (fine, coarse) grid pair for every path and applies
/// `eval` to it. `eval` returns one `(|dv|, |dx|)` entry per output column;
/// rows come back in path order regardless of scheduling.
fn coupled_rows<F>(
    n: usize,
    m: usize,
    horizon: f64,
    row_seed: u64,
    eval: F,
) -> Vec<Vec<(f64, f64)>>
where
    F: Fn(&IncrementGrid, &IncrementGrid) -> Vec<(f64, f64)> + Sync,
{
    (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let seed = SeedSpec { master_seed: row_seed, path_index: i };
            let fine = gaussian_increments(&seed, 2 * n, horizon).expect("2N >= 2 steps");
            let coarse = fine.coarsen().expect("even level");
            eval(&coarse, &fine)
        })
        .collect()
}

/// Per-path coupled differences for a set of schemes sharing one Brownian
/// path per `(row_seed, path)`: returns `diffs[path][scheme] = (|dv|, |dx|)`.
fn coupled_diffs(
    schemes: &[SchemeSpec],
    model: &Model,
    n: usize,
    m: usize,
    row_seed: u64,
) -> Vec<Vec<(f64, f64)>> {
    let p = &model.params;
    coupled_rows(n, m, p.horizon, row_seed, |coarse, fine| {
        schemes
            .iter()
            .map(|s| {
                let tf = joint_terminal(s, p, fine);
                let tc = joint_terminal(s, p, coarse);
                ((tc.v_hat - tf.v_hat).abs(), (tc.x_hat - tf.x_hat).abs())
            })
            .collect()
    })
}

fn check_row_inputs(n: usize, m: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if m < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: m });
    }
    Ok(())
}

/// Runs the coupled estimator for several schemes on shared Brownian paths.
///
/// Record `j` is identical to `estimate_errors(&schemes[j], ...)`: the grids
/// are keyed by `(master_seed, N, path)` only, so sharing them across
/// schemes changes nothing except the amount of work.
pub fn estimate_errors_multi(
    schemes: &[SchemeSpec],
    model: &Model,
    n: usize,
    m: usize,
    master_seed: u64,
) -> Result<Vec<ErrorRecord>> {
    check_row_inputs(n, m)?;
    let diffs = coupled_diffs(schemes, model, n, m, derive_seed(master_seed, n as u64));
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(j, scheme)| {
            let dv: Vec<f64> = diffs.iter().map(|row| row[j].0).collect();
            let dx: Vec<f64> = diffs.iter().map(|row| row[j].1).collect();
            let (err_v, se_v) = mean_and_se(&dv);
            let (err_x, se_x) = mean_and_se(&dx);
            ErrorRecord {
                scheme: scheme.label(),
                model: model.name.clone(),
                n,
                m,
                err_v,
                se_v,
                err_x,
                se_x,
                seed: master_seed,
            }
        })
        .collect())
}

/// Coupled error estimate for one scheme at one level.
pub fn estimate_errors(
    scheme: &SchemeSpec,
    model: &Model,
    n: usize,
    m: usize,
    master_seed: u64,
) -> Result<ErrorRecord> {
    Ok(estimate_errors_multi(std::slice::from_ref(scheme), model, n, m, master_seed)?
        .pop()
        .expect("one scheme in, one record out"))
}

fn warn_on_large_steps(model: &Model, n_list: &[usize]) {
    let p = &model.params;
    if let Some(&bad) = n_list.iter().find(|&&n| p.horizon / n as f64 > 0.5 / p.kappa) {
        log::warn!(
            "model {}: step size T/{bad} exceeds 1/(2 kappa); the schemes stay well defined \
             but the drift can overshoot at this resolution",
            model.name
        );
    }
}

/// Error table over a list of levels, one fresh set of Brownian paths per
/// level, all derived from the same master seed.
pub fn error_table(
    scheme: &SchemeSpec,
    model: &Model,
    n_list: &[usize],
    m: usize,
    master_seed: u64,
) -> Result<Vec<ErrorRecord>> {
    warn_on_large_steps(model, n_list);
    n_list
        .iter()
        .map(|&n| estimate_errors(scheme, model, n, m, master_seed))
        .collect()
}

/// Error tables for several schemes at once, sharing the per-level Brownian
/// paths. Returns `tables[scheme][row]`, rows in `n_list` order.
pub fn error_table_multi(
    schemes: &[SchemeSpec],
    model: &Model,
    n_list: &[usize],
    m: usize,
    master_seed: u64,
) -> Result<Vec<Vec<ErrorRecord>>> {
    warn_on_large_steps(model, n_list);
    let mut tables = vec![Vec::with_capacity(n_list.len()); schemes.len()];
    for &n in n_list {
        for (j, rec) in estimate_errors_multi(schemes, model, n, m, master_seed)?
            .into_iter()
            .enumerate()
        {
            tables[j].push(rec);
        }
    }
    Ok(tables)
}

/// Ordinary least squares of `log2 err` on `log2 N` over the records with
/// `fit_min <= N <= fit_max`. The slope is reported as a positive decay
/// rate. Records with zero error are excluded with a warning.
pub fn fit_rate(
    table: &[ErrorRecord],
    target: FitTarget,
    fit_min: usize,
    fit_max: usize,
) -> Result<RateEstimate> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut fit_range = Vec::new();
    for rec in table {
        if rec.n < fit_min || rec.n > fit_max {
            continue;
        }
        let err = match target {
            FitTarget::Cir => rec.err_v,
            FitTarget::Heston => rec.err_x,
        };
        if err == 0.0 {
            log::warn!("excluding zero {} error at N={} from the rate fit", target.label(), rec.n);
            continue;
        }
        pts.push(((rec.n as f64).log2(), err.log2()));
        fit_range.push(rec.n);
    }
    if pts.len() < 2 {
        return Err(Error::TooFewFitPoints(pts.len()));
    }
    let nf = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope_raw = sxy / sxx;
    let intercept = ybar - slope_raw * xbar;
    let residual_norm = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope_raw * p.0);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(RateEstimate { slope: -slope_raw, intercept, fit_range, residual_norm })
}

/// Monte Carlo estimate of `E[max_k W_{t_k}]` for a standard Brownian motion
/// on `[0, 1]` with `N` steps. Returns `(estimate, standard_error)`.
pub fn bm_max_calibration(n: usize, m: usize, master_seed: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    if m < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: m });
    }
    let row_seed = derive_seed(master_seed, n as u64);
    let maxima: Vec<f64> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let seed = SeedSpec { master_seed: row_seed, path_index: i };
            let grid = gaussian_increments(&seed, n, 1.0).expect("n >= 1");
            let mut w = 0.0;
            let mut max = 0.0f64; // W_0 = 0 is part of the grid
            for &dw in &grid.dw {
                w += dw;
                max = max.max(w);
            }
            max
        })
        .collect();
    Ok(mean_and_se(&maxima))
}

/// Fraction of the coupled paths (either resolution) whose raw variance
/// iterate ever went negative. Uses the same path keying as
/// [`estimate_errors`], so it describes exactly those simulations.
pub fn coupled_negative_fraction(
    scheme: &SchemeSpec,
    model: &Model,
    n: usize,
    m: usize,
    master_seed: u64,
) -> Result<f64> {
    check_row_inputs(n, m)?;
    let p = &model.params;
    let row_seed = derive_seed(master_seed, n as u64);
    let count: usize = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let seed = SeedSpec { master_seed: row_seed, path_index: i };
            let fine = gaussian_increments(&seed, 2 * n, p.horizon).expect("2N >= 2 steps");
            let coarse = fine.coarsen().expect("even level");
            let tf = joint_terminal(scheme, p, &fine);
            let tc = joint_terminal(scheme, p, &coarse);
            usize::from(tf.went_negative || tc.went_negative)
        })
        .sum();
    Ok(count as f64 / m as f64)
}

/// Sample moments of the terminal state `(vhat_T, xhat_T)` over `M`
/// independent paths at level `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalMoments {
    pub mean_v: f64,
    pub se_v: f64,
    pub mean_x: f64,
    pub se_x: f64,
}

pub fn sample_terminal_moments(
    scheme: &SchemeSpec,
    model: &Model,
    n: usize,
    m: usize,
    master_seed: u64,
) -> Result<TerminalMoments> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    if m < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: m });
    }
    let p = &model.params;
    let row_seed = derive_seed(master_seed, n as u64);
    let terminals: Vec<(f64, f64)> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let seed = SeedSpec { master_seed: row_seed, path_index: i };
            let grid = gaussian_increments(&seed, n, p.horizon).expect("n >= 1");
            let t = joint_terminal(scheme, p, &grid);
            (t.v_hat, t.x_hat)
        })
        .collect();
    let vs: Vec<f64> = terminals.iter().map(|t| t.0).collect();
    let xs: Vec<f64> = terminals.iter().map(|t| t.1).collect();
    let (mean_v, se_v) = mean_and_se(&vs);
    let (mean_x, se_x) = mean_and_se(&xs);
    Ok(TerminalMoments { mean_v, se_v, mean_x, se_x })
}
