//! Heston model parameters and the built-in benchmark parameter sets.
//!
//! The variance follows a CIR process
//! `dV = kappa (theta - V) dt + sigma sqrt(V) dW` and the log-price follows
//! `dX = (mu - V/2) dt + sqrt(V) (rho dW + sqrt(1 - rho^2) dB)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParamError, Result};

/// Full parameter set for the log-Heston SDE.
///
/// `horizon` is the simulation end time `T`; the initial log-price
/// `x0 = ln(s0)` is derived, not stored, so `s0` stays the single source
/// of truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Initial variance, > 0.
    pub v0: f64,
    /// Mean-reversion speed, > 0.
    pub kappa: f64,
    /// Long-run variance, > 0.
    pub theta: f64,
    /// Volatility of variance, > 0.
    pub sigma: f64,
    /// Correlation between the variance and price drivers, in [-1, 1].
    pub rho: f64,
    /// Drift rate of the price.
    pub mu: f64,
    /// Initial price, > 0.
    pub s0: f64,
    /// Time horizon, > 0.
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl ModelParams {
    /// Initial log-price.
    pub fn x0(&self) -> f64 {
        self.s0.ln()
    }

    /// Feller index `2 kappa theta / sigma^2`. Values >= 1 mean the CIR
    /// process stays strictly positive.
    pub fn feller_index(&self) -> f64 {
        2.0 * self.kappa * self.theta / (self.sigma * self.sigma)
    }

    /// Checks every invariant and reports all violations, not just the first.
    pub fn validate(&self) -> std::result::Result<(), ParamError> {
        let mut issues = Vec::new();
        let mut pos = |name: &str, x: f64| {
            if !(x > 0.0 && x.is_finite()) {
                issues.push(format!("{name} must be positive"));
            }
        };
        pos("v0", self.v0);
        pos("kappa", self.kappa);
        pos("theta", self.theta);
        pos("sigma", self.sigma);
        pos("s0", self.s0);
        pos("T", self.horizon);
        if !(self.rho >= -1.0 && self.rho <= 1.0) {
            issues.push("rho out of range".to_string());
        }
        if !self.mu.is_finite() {
            issues.push("mu must be finite".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ParamError { issues })
        }
    }
}

/// Feller index of the CIR process, `2 kappa theta / sigma^2`.
pub fn feller_index(p: &ModelParams) -> f64 {
    p.feller_index()
}

/// The five benchmark parameter sets, with `T = 1` and `s0 = 100`.
///
/// Their Feller indices span 0.36 to 5.2, covering both the `nu > 1`
/// regime (ids 1-3) and the low-index regime (ids 4, 5).
pub fn builtin_model(id: u32) -> Result<ModelParams> {
    let (v0, kappa, theta, sigma, rho, mu) = match id {
        1 => (0.04, 5.0, 0.04, 0.61, -0.7, 0.0319),
        2 => (0.0457, 5.07, 0.0457, 0.48, -0.767, 0.0),
        3 => (0.04, 2.6, 0.04, 0.2, -0.6, 0.0),
        4 => (0.010201, 6.21, 0.019, 0.61, -0.7, 0.0319),
        5 => (0.09, 2.0, 0.09, 1.0, -0.3, 0.05),
        _ => return Err(Error::UnknownModel(id)),
    };
    Ok(ModelParams {
        v0,
        kappa,
        theta,
        sigma,
        rho,
        mu,
        s0: 100.0,
        horizon: 1.0,
    })
}

/// Ids of the built-in models.
pub const BUILTIN_MODEL_IDS: [u32; 5] = [1, 2, 3, 4, 5];

/// A parameter set together with the label used in reports and CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub params: ModelParams,
}

impl Model {
    /// Built-in model by id; the label is the id itself.
    pub fn builtin(id: u32) -> Result<Self> {
        Ok(Model {
            name: id.to_string(),
            params: builtin_model(id)?,
        })
    }

    /// User-supplied parameters under a custom label.
    pub fn custom(name: impl Into<String>, params: ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Model {
            name: name.into(),
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_to(x: f64, digits: i32) -> f64 {
        let p = 10f64.powi(digits);
        (x * p).round() / p
    }

    #[test]
    fn feller_index_matches_benchmark_values() {
        // nu column as printed for the five parameter sets, with the
        // number of digits each is printed to.
        let printed = [(1, 1.075, 3), (2, 2.0113, 4), (3, 5.2, 1), (4, 0.63, 2), (5, 0.36, 2)];
        for (id, nu, digits) in printed {
            let p = builtin_model(id).unwrap();
            assert_eq!(round_to(p.feller_index(), digits), nu, "model {id}");
        }
    }

    #[test]
    fn feller_index_examples() {
        let p1 = builtin_model(1).unwrap();
        assert!((p1.feller_index() - 1.075).abs() < 5e-4, "1.075 to 4 significant figures");
        let p3 = builtin_model(3).unwrap();
        assert!((p3.feller_index() - 5.2).abs() < 1e-12);
        let p5 = builtin_model(5).unwrap();
        assert!((p5.feller_index() - 0.36).abs() < 1e-12);
    }

    #[test]
    fn builtin_rows() {
        let p = builtin_model(1).unwrap();
        assert_eq!(
            (p.v0, p.kappa, p.theta, p.sigma, p.rho, p.mu),
            (0.04, 5.0, 0.04, 0.61, -0.7, 0.0319)
        );
        assert_eq!((p.s0, p.horizon), (100.0, 1.0));

        let p = builtin_model(4).unwrap();
        assert_eq!(
            (p.v0, p.kappa, p.theta, p.sigma, p.rho, p.mu),
            (0.010201, 6.21, 0.019, 0.61, -0.7, 0.0319)
        );

        assert!(matches!(builtin_model(6), Err(Error::UnknownModel(6))));
        assert!(matches!(builtin_model(0), Err(Error::UnknownModel(0))));
    }

    #[test]
    fn validate_accepts_all_builtins() {
        for id in BUILTIN_MODEL_IDS {
            builtin_model(id).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn validate_reports_every_violation() {
        let mut p = builtin_model(2).unwrap();
        p.sigma = 0.0;
        p.rho = 1.5;
        let err = p.validate().unwrap_err();
        assert!(err.issues.iter().any(|m| m == "sigma must be positive"));
        assert!(err.issues.iter().any(|m| m == "rho out of range"));
        assert_eq!(err.issues.len(), 2);
    }

    #[test]
    fn validate_is_total_on_nonfinite_input() {
        let p = ModelParams {
            v0: f64::NAN,
            kappa: f64::INFINITY,
            theta: -1.0,
            sigma: 0.5,
            rho: f64::NAN,
            mu: f64::NAN,
            s0: 100.0,
            horizon: 1.0,
        };
        let err = p.validate().unwrap_err();
        assert!(err.issues.len() >= 4);
    }

    #[test]
    fn x0_is_derived_from_s0() {
        let p = builtin_model(1).unwrap();
        assert_eq!(p.x0(), 100f64.ln());
        assert!(p.x0().is_finite());
    }
}
