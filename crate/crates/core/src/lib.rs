//! Monte Carlo engine for Euler-type discretizations of the CIR variance
//! process and the log-Heston SDE.
//!
//! The crate provides:
//!
//! - the five classic Euler variants for the square-root process (absorption,
//!   symmetrization, Higham-Mao, partial and full truncation), expressed as
//!   fix-function triples over one generic recursion ([`cir`]);
//! - the coupled log-price Euler discretization ([`heston`]);
//! - deterministic, counter-based Brownian increments with exact dyadic
//!   coarsening, so coarse and fine paths share one Brownian motion ([`rng`]);
//! - coupled-path strong-error estimation and log-log rate fitting
//!   ([`convergence`]);
//! - lookback/Asian/terminal payoffs on piecewise-constant paths and coupled
//!   bias curves ([`payoff`]);
//! - closed-form oracles for validation ([`reference`]) and CSV reporting
//!   ([`report`]).
//!
//! Everything is reproducible: results are pure functions of the master seed
//! and run parameters, independent of thread count.

pub mod cir;
pub mod convergence;
pub mod error;
pub mod heston;
pub mod model;
pub mod payoff;
pub mod reference;
pub mod report;
pub mod rng;

pub use cir::{cir_path, cir_step, CirPath, FixFn, SchemeCase, SchemeSpec};
pub use convergence::{
    bm_max_calibration, coupled_negative_fraction, error_table, error_table_multi,
    estimate_errors, estimate_errors_multi, fit_rate, sample_terminal_moments, ErrorRecord,
    FitTarget, RateEstimate, TerminalMoments,
};
pub use error::{Error, ParamError, Result};
pub use heston::{joint_path, joint_terminal, logprice_step, JointPath, TerminalValues};
pub use model::{builtin_model, feller_index, Model, ModelParams, BUILTIN_MODEL_IDS};
pub use payoff::{bias_curve, evaluate_payoff, BiasPoint, BiasRun, Payoff};
pub use reference::{
    bm_max_gap_asymptotic, bm_max_mean_exact, cir_mean_exact, cir_variance_exact,
    logprice_mean_exact, ZETA_HALF_ABS,
};
pub use report::{plot_rows, BiasRecord, PlotRow, RateRow};
pub use rng::{
    correlated_increment, derive_seed, gaussian_increment_at, gaussian_increments, IncrementGrid,
    SeedSpec, Stream,
};
