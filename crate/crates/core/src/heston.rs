//! Euler discretization of the log-price, coupled to a CIR variance scheme.
//!
//! ```text
//! xhat[k+1] = xhat[k] + (mu - vhat[k]/2) dt + sqrt(vhat[k]) (rho dW[k] + sqrt(1-rho^2) dB[k])
//! ```
//!
//! The diffusion coefficient always uses the fixed variance `vhat >= 0` at
//! the left endpoint of the step, so no square root of a negative number can
//! occur. Paths live in log space; `exp` is applied only inside payoff
//! evaluation.

use crate::cir::{cir_path, cir_step, CirPath, SchemeSpec};
use crate::model::ModelParams;
use crate::rng::{correlated_increment, IncrementGrid};

/// A variance path and the log-price path driven by it.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPath {
    pub cir: CirPath,
    pub x_hat: Vec<f64>,
}

/// One explicit Euler step of the log-price.
#[inline]
pub fn logprice_step(
    x: f64,
    v_hat: f64,
    dt: f64,
    dw: f64,
    db: f64,
    p: &ModelParams,
) -> f64 {
    assert!(v_hat >= 0.0, "logprice_step requires a nonnegative variance, got {v_hat}");
    x + (p.mu - 0.5 * v_hat) * dt + v_hat.sqrt() * correlated_increment(dw, db, p.rho)
}

/// Runs the CIR scheme over the grid, then folds the log-price over the same
/// increments using the variance at the left endpoint of each step.
pub fn joint_path(scheme: &SchemeSpec, p: &ModelParams, grid: &IncrementGrid) -> JointPath {
    debug_assert!(
        (grid.dt - p.horizon / grid.level as f64).abs() <= 1e-12 * grid.dt.abs(),
        "grid step does not match the model horizon"
    );
    let cir = cir_path(scheme, p, grid);
    let mut x_hat = Vec::with_capacity(grid.level + 1);
    let mut x = p.x0();
    x_hat.push(x);
    for k in 0..grid.level {
        x = logprice_step(x, cir.v_hat[k], grid.dt, grid.dw[k], grid.db[k], p);
        x_hat.push(x);
    }
    JointPath { cir, x_hat }
}

/// Terminal state of a joint simulation, without materializing the paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalValues {
    pub v_hat: f64,
    pub x_hat: f64,
    /// Whether the raw variance iterate dipped below zero at any step.
    pub went_negative: bool,
}

/// Same recursion as [`joint_path`] but keeps only terminal values; used by
/// the error estimators where per-path memory must stay flat.
pub fn joint_terminal(scheme: &SchemeSpec, p: &ModelParams, grid: &IncrementGrid) -> TerminalValues {
    let mut v_bar = p.v0;
    let mut v_hat = p.v0;
    let mut x = p.x0();
    let mut went_negative = false;
    for k in 0..grid.level {
        x = logprice_step(x, v_hat, grid.dt, grid.dw[k], grid.db[k], p);
        let (nb, nh) = cir_step(scheme, v_bar, grid.dt, grid.dw[k], p);
        v_bar = nb;
        v_hat = nh;
        went_negative |= v_bar < 0.0;
    }
    TerminalValues { v_hat, x_hat: x, went_negative }
}
