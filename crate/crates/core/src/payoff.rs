//! Path-functional payoffs on the piecewise-constant extension of the
//! discrete log-price, and coupled bias measurement across grid levels.
//!
//! A discrete path `xhat[0..=N]` is read as the piecewise-constant function
//! holding `xhat[k]` on `[t_k, t_{k+1})` and `xhat[N]` at `T`. The running
//! supremum therefore is the maximum over all N+1 grid values, while the
//! time integral is the left-endpoint Riemann sum over the first N values.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cir::SchemeSpec;
use crate::error::{Error, Result};
use crate::heston::joint_path;
use crate::model::Model;
use crate::rng::{derive_seed, gaussian_increments, SeedSpec};

/// Payoff functional evaluated on a log-price path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payoff {
    /// `[K - sup_t exp(X_t)]^+`
    LookbackPut { strike: f64 },
    /// `[K - (1/T) int_0^T exp(X_t) dt]^+`
    AsianPut { strike: f64 },
    /// The terminal log-price itself (no strike).
    Terminal,
}

impl Payoff {
    pub fn label(&self) -> &'static str {
        match self {
            Payoff::LookbackPut { .. } => "lookback-put",
            Payoff::AsianPut { .. } => "asian-put",
            Payoff::Terminal => "terminal",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Payoff::LookbackPut { strike } | Payoff::AsianPut { strike } => {
                if !(*strike > 0.0 && strike.is_finite()) {
                    return Err(Error::Params(crate::error::ParamError {
                        issues: vec!["strike must be positive".to_string()],
                    }));
                }
            }
            Payoff::Terminal => {}
        }
        Ok(())
    }
}

/// Evaluates the payoff on the piecewise-constant path model.
///
/// Lookback: max over grid values `k = 0..=N`. Asian: left-endpoint Riemann
/// sum `(1/N) sum_{k<N} exp(xhat[k])`. Terminal: `xhat[N]`.
pub fn evaluate_payoff(pay: &Payoff, x_path: &[f64]) -> f64 {
    assert!(x_path.len() >= 2, "payoff needs a path with at least one step");
    let n = x_path.len() - 1;
    match pay {
        Payoff::LookbackPut { strike } => {
            let max_price = x_path.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x.exp()));
            (strike - max_price).max(0.0)
        }
        Payoff::AsianPut { strike } => {
            let avg = x_path[..n].iter().map(|x| x.exp()).sum::<f64>() / n as f64;
            (strike - avg).max(0.0)
        }
        Payoff::Terminal => x_path[n],
    }
}

/// One point of a bias curve: the coupled estimate of
/// `E[G at reference level] - E[G at level N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub bias: f64,
    pub se: f64,
}

/// Resolution and size limits for a bias run. The reference level is
/// `2 * n_max`; requested levels must stay at or below `n_max / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasRun {
    pub n_max: usize,
    /// Refuse runs with `n_max * paths` above this product.
    pub product_cap: u128,
}

impl Default for BiasRun {
    fn default() -> Self {
        BiasRun { n_max: 1 << 12, product_cap: (1 << 12) * 10_000 }
    }
}

/// Measures the payoff bias of level-`N` simulation against the finest
/// computed level, on coupled paths: one fine grid per path, coarsened
/// down through every requested level so all levels share one Brownian
/// path. The bias at the true limit is unavailable in closed form; the
/// finest level stands in for it, preserving the observable decay.
pub fn bias_curve(
    scheme: &SchemeSpec,
    model: &Model,
    pay: &Payoff,
    n_list: &[usize],
    m: usize,
    master_seed: u64,
    run: &BiasRun,
) -> Result<Vec<BiasPoint>> {
    pay.validate()?;
    if n_list.is_empty() {
        return Ok(Vec::new());
    }
    if !run.n_max.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(run.n_max));
    }
    for &n in n_list {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if n > run.n_max / 2 {
            return Err(Error::LevelAboveReference { level: n, max: run.n_max / 2 });
        }
    }
    let product = run.n_max as u128 * m as u128;
    if product > run.product_cap {
        return Err(Error::ProductCapExceeded { product, cap: run.product_cap });
    }
    if m < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: m });
    }
    bias_against_reference(scheme, model, pay, n_list, m, master_seed, 2 * run.n_max)
}

/// Core of [`bias_curve`] with an explicit reference level; also used to
/// check that comparing a level against itself yields exactly zero.
fn bias_against_reference(
    scheme: &SchemeSpec,
    model: &Model,
    pay: &Payoff,
    n_list: &[usize],
    m: usize,
    master_seed: u64,
    n_ref: usize,
) -> Result<Vec<BiasPoint>> {
    let p = &model.params;
    let levels: BTreeSet<usize> = n_list.iter().copied().collect();
    let row_seed = derive_seed(master_seed, n_ref as u64);
    // diffs[path][j] = G(reference) - G(level_j), levels in ascending order.
    let diffs: Vec<Vec<f64>> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let seed = SeedSpec { master_seed: row_seed, path_index: i };
            let mut grid = gaussian_increments(&seed, n_ref, p.horizon).expect("n_ref >= 1");
            let g_ref = evaluate_payoff(pay, &joint_path(scheme, p, &grid).x_hat);
            let mut by_level = vec![0.0; levels.len()];
            let min_level = *levels.first().expect("nonempty");
            while grid.level > min_level {
                grid = grid.coarsen().expect("power-of-two chain");
                if let Some(j) = levels.iter().position(|&l| l == grid.level) {
                    by_level[j] = g_ref - evaluate_payoff(pay, &joint_path(scheme, p, &grid).x_hat);
                }
            }
            if levels.contains(&n_ref) {
                // Degenerate self-comparison: difference is identically zero.
                let j = levels.iter().position(|&l| l == n_ref).expect("present");
                by_level[j] = 0.0;
            }
            by_level
        })
        .collect();
    let ordered: Vec<usize> = levels.into_iter().collect();
    let points = n_list
        .iter()
        .map(|&n| {
            let j = ordered.iter().position(|&l| l == n).expect("requested level present");
            let column: Vec<f64> = diffs.iter().map(|row| row[j]).collect();
            let mf = m as f64;
            let mean = column.iter().sum::<f64>() / mf;
            let ss: f64 = column.iter().map(|x| (x - mean) * (x - mean)).sum();
            let se = (ss / (mf - 1.0)).sqrt() / mf.sqrt();
            BiasPoint { n, bias: mean, se }
        })
        .collect();
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_core::RngCore;

    #[test]
    fn payoff_hand_values() {
        let ln100 = 100f64.ln();
        let flat = vec![ln100; 9];
        assert_eq!(evaluate_payoff(&Payoff::LookbackPut { strike: 90.0 }, &flat), 0.0);
        assert!(
            (evaluate_payoff(&Payoff::AsianPut { strike: 110.0 }, &flat) - 10.0).abs() < 1e-12
        );

        let spike = vec![0.0, 2f64.ln(), 0.0];
        assert!(
            (evaluate_payoff(&Payoff::LookbackPut { strike: 3.0 }, &spike) - 1.0).abs() < 1e-12
        );
        assert!(
            (evaluate_payoff(&Payoff::AsianPut { strike: 3.0 }, &spike) - 1.5).abs() < 1e-12
        );

        assert_eq!(evaluate_payoff(&Payoff::Terminal, &[1.0, 2.0, -0.5]), -0.5);
    }

    #[test]
    fn puts_are_nonnegative_and_bounded_by_strike() {
        let mut rng = ChaCha8Rng::from_seed([3u8; 32]);
        let mut uniform = |lo: f64, hi: f64| {
            lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let len = 2 + (uniform(0.0, 30.0) as usize);
            let path: Vec<f64> = (0..len).map(|_| uniform(-2.0, 6.0)).collect();
            let k = uniform(0.1, 300.0);
            for pay in [Payoff::LookbackPut { strike: k }, Payoff::AsianPut { strike: k }] {
                let g = evaluate_payoff(&pay, &path);
                assert!(g >= 0.0);
                assert!(g <= k);
            }
        }
    }

    #[test]
    fn payoffs_are_lipschitz_in_the_price_sup_norm() {
        // |G(y) - G(z)| <= sup_k |exp(y_k) - exp(z_k)| for both puts, over
        // 10^3 random path pairs.
        let mut rng = ChaCha8Rng::from_seed([9u8; 32]);
        let mut uniform = |lo: f64, hi: f64| {
            lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let len = 2 + (uniform(0.0, 20.0) as usize);
            let y: Vec<f64> = (0..len).map(|_| uniform(-1.0, 5.0)).collect();
            let z: Vec<f64> = y.iter().map(|&v| v + uniform(-0.3, 0.3)).collect();
            let sup = y
                .iter()
                .zip(&z)
                .map(|(a, b)| (a.exp() - b.exp()).abs())
                .fold(0.0f64, f64::max);
            let k = uniform(1.0, 200.0);
            for pay in [Payoff::LookbackPut { strike: k }, Payoff::AsianPut { strike: k }] {
                let gy = evaluate_payoff(&pay, &y);
                let gz = evaluate_payoff(&pay, &z);
                assert!(
                    (gy - gz).abs() <= sup + 1e-12,
                    "{}: |{gy} - {gz}| > {sup}",
                    pay.label()
                );
            }
        }
    }

    #[test]
    fn strike_must_be_positive() {
        assert!(Payoff::LookbackPut { strike: 0.0 }.validate().is_err());
        assert!(Payoff::AsianPut { strike: -1.0 }.validate().is_err());
        assert!(Payoff::Terminal.validate().is_ok());
        assert!(Payoff::LookbackPut { strike: 90.0 }.validate().is_ok());
    }

    #[test]
    fn empty_level_list_gives_empty_curve() {
        let model = Model::builtin(1).unwrap();
        let s = SchemeSpec::full_truncation();
        let curve = bias_curve(
            &s,
            &model,
            &Payoff::Terminal,
            &[],
            100,
            0,
            &BiasRun::default(),
        )
        .unwrap();
        assert!(curve.is_empty());
    }

    #[test]
    fn self_comparison_is_exactly_zero() {
        let model = Model::builtin(5).unwrap();
        let s = SchemeSpec::symmetrized();
        let pts = bias_against_reference(
            &s,
            &model,
            &Payoff::LookbackPut { strike: 110.0 },
            &[64],
            50,
            21,
            64,
        )
        .unwrap();
        assert_eq!(pts[0].bias, 0.0);
        assert_eq!(pts[0].se, 0.0);
    }

    #[test]
    fn level_and_cap_guards() {
        let model = Model::builtin(1).unwrap();
        let s = SchemeSpec::full_truncation();
        let run = BiasRun { n_max: 256, product_cap: 256 * 10_000 };
        // Level above n_max / 2.
        assert!(matches!(
            bias_curve(&s, &model, &Payoff::Terminal, &[256], 100, 0, &run),
            Err(Error::LevelAboveReference { level: 256, max: 128 })
        ));
        // Not a power of two.
        assert!(matches!(
            bias_curve(&s, &model, &Payoff::Terminal, &[100], 100, 0, &run),
            Err(Error::NotPowerOfTwo(100))
        ));
        // Product cap.
        let tight = BiasRun { n_max: 256, product_cap: 100 };
        assert!(matches!(
            bias_curve(&s, &model, &Payoff::Terminal, &[64], 100, 0, &tight),
            Err(Error::ProductCapExceeded { .. })
        ));
    }

    #[test]
    fn bias_points_are_coupled_and_deterministic() {
        let model = Model::builtin(1).unwrap();
        let s = SchemeSpec::full_truncation();
        let run = BiasRun { n_max: 64, product_cap: 64 * 10_000 };
        let pay = Payoff::AsianPut { strike: 110.0 };
        let a = bias_curve(&s, &model, &pay, &[8, 16, 32], 1000, 5, &run).unwrap();
        let b = bias_curve(&s, &model, &pay, &[8, 16, 32], 1000, 5, &run).unwrap();
        assert_eq!(a, b);
        // The spread of the coupled differences shrinks toward the
        // reference level: sd scales like N^{-1/2}, so se(8)/se(32) is
        // near 2 and well separated from equality.
        let ratio = a[0].se / a[2].se;
        assert!((1.3..=3.0).contains(&ratio), "se ratio {ratio}, curve {a:?}");
    }
}
