//! Euler-type schemes for the CIR variance process.
//!
//! All five classic explicit Euler variants fit one recursion built from
//! three "fix" functions applied to the previous iterate:
//!
//! ```text
//! vbar[k+1] = f1(vbar[k]) + kappa (theta - f2(vbar[k])) dt + sigma sqrt(f3(vbar[k])) dW[k]
//! vhat[k+1] = f3(vbar[k+1])
//! ```
//!
//! with `vhat[0] = vbar[0] = v0`. The fix functions keep the square-root
//! argument nonnegative; which positions they occupy distinguishes the
//! schemes (see [`SchemeSpec`]).

use std::fmt;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rng::IncrementGrid;

/// The admissible fixes: identity, positive part, or absolute value.
///
/// Naming note: the traditional short labels are `id`, `abs` and `sym`,
/// where `abs(x) = max(x, 0)` is the positive part and `sym(x) = |x|` is the
/// absolute value. The enum uses unambiguous names; the short labels remain
/// available as aliases in [`FixFn::from_alias`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixFn {
    Identity,
    PositivePart,
    AbsoluteValue,
}

impl FixFn {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            FixFn::Identity => x,
            FixFn::PositivePart => x.max(0.0),
            FixFn::AbsoluteValue => x.abs(),
        }
    }

    /// Parses `id` / `abs` / `sym` and the descriptive long names.
    pub fn from_alias(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "id" | "identity" => Ok(FixFn::Identity),
            "abs" | "positive-part" | "pos" => Ok(FixFn::PositivePart),
            "sym" | "absolute-value" => Ok(FixFn::AbsoluteValue),
            other => Err(Error::UnknownFixFn(other.to_string())),
        }
    }

    pub fn alias(self) -> &'static str {
        match self {
            FixFn::Identity => "id",
            FixFn::PositivePart => "abs",
            FixFn::AbsoluteValue => "sym",
        }
    }

    fn maps_to_nonnegative(self) -> bool {
        !matches!(self, FixFn::Identity)
    }
}

impl fmt::Display for FixFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.alias())
    }
}

/// Which admissible family a scheme belongs to.
///
/// Case I keeps the raw iterate and fixes only the coefficients
/// (`f1 = id`, `f3` nonnegative); Case II re-fixes the iterate after every
/// step (`f1 = f2 = f3` nonnegative).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeCase {
    I,
    II,
}

/// A fix-function triple `(f1, f2, f3)` defining one Euler scheme.
///
/// Construction goes through [`SchemeSpec::new`] or the named constructors,
/// so every value satisfies Case I or Case II.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    f1: FixFn,
    f2: FixFn,
    f3: FixFn,
    name: Option<&'static str>,
}

impl SchemeSpec {
    /// Validates and builds a scheme from an explicit triple.
    pub fn new(f1: FixFn, f2: FixFn, f3: FixFn) -> Result<Self> {
        let case_i = f1 == FixFn::Identity && f3.maps_to_nonnegative();
        let case_ii = f1 == f2 && f2 == f3 && f1.maps_to_nonnegative();
        if !(case_i || case_ii) {
            return Err(Error::InvalidSchemeTriple(format!("({f1},{f2},{f3})")));
        }
        let name = NAMED
            .iter()
            .find(|(_, g1, g2, g3)| (f1, f2, f3) == (*g1, *g2, *g3))
            .map(|(n, ..)| *n);
        Ok(SchemeSpec { f1, f2, f3, name })
    }

    /// Euler with absorption: `(x+, x+, x+)`.
    pub fn absorption() -> Self {
        Self::new(FixFn::PositivePart, FixFn::PositivePart, FixFn::PositivePart).unwrap()
    }

    /// Symmetrized Euler: `(|x|, |x|, |x|)`.
    pub fn symmetrized() -> Self {
        Self::new(FixFn::AbsoluteValue, FixFn::AbsoluteValue, FixFn::AbsoluteValue).unwrap()
    }

    /// Higham-Mao: `(x, x, |x|)`.
    pub fn higham_mao() -> Self {
        Self::new(FixFn::Identity, FixFn::Identity, FixFn::AbsoluteValue).unwrap()
    }

    /// Partial truncation: `(x, x, x+)`.
    pub fn partial_truncation() -> Self {
        Self::new(FixFn::Identity, FixFn::Identity, FixFn::PositivePart).unwrap()
    }

    /// Full truncation: `(x, x+, x+)`.
    pub fn full_truncation() -> Self {
        Self::new(FixFn::Identity, FixFn::PositivePart, FixFn::PositivePart).unwrap()
    }

    /// The five named schemes in registry order: AE, SE, HM, PTE, FTE.
    pub fn all_named() -> Vec<SchemeSpec> {
        vec![
            Self::absorption(),
            Self::symmetrized(),
            Self::higham_mao(),
            Self::partial_truncation(),
            Self::full_truncation(),
        ]
    }

    /// Looks up a scheme by name (`AE`, `SE`, `HM`, `PTE`, `FTE`) or parses
    /// an explicit `f1,f2,f3` triple such as `id,abs,abs`.
    pub fn from_name(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.contains(',') {
            let parts: Vec<&str> = trimmed.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::UnknownScheme(s.to_string()));
            }
            return Self::new(
                FixFn::from_alias(parts[0])?,
                FixFn::from_alias(parts[1])?,
                FixFn::from_alias(parts[2])?,
            );
        }
        match trimmed.to_ascii_uppercase().as_str() {
            "AE" => Ok(Self::absorption()),
            "SE" => Ok(Self::symmetrized()),
            "HM" => Ok(Self::higham_mao()),
            "PTE" => Ok(Self::partial_truncation()),
            "FTE" => Ok(Self::full_truncation()),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }

    pub fn f1(&self) -> FixFn {
        self.f1
    }

    pub fn f2(&self) -> FixFn {
        self.f2
    }

    pub fn f3(&self) -> FixFn {
        self.f3
    }

    pub fn case(&self) -> SchemeCase {
        if self.f1 == FixFn::Identity {
            SchemeCase::I
        } else {
            SchemeCase::II
        }
    }

    /// Short name if this is one of the five named schemes, otherwise the
    /// triple rendered as `f1-f2-f3`.
    pub fn label(&self) -> String {
        match self.name {
            Some(n) => n.to_string(),
            None => format!("{}-{}-{}", self.f1, self.f2, self.f3),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

const NAMED: [(&str, FixFn, FixFn, FixFn); 5] = [
    ("AE", FixFn::PositivePart, FixFn::PositivePart, FixFn::PositivePart),
    ("SE", FixFn::AbsoluteValue, FixFn::AbsoluteValue, FixFn::AbsoluteValue),
    ("HM", FixFn::Identity, FixFn::Identity, FixFn::AbsoluteValue),
    ("PTE", FixFn::Identity, FixFn::Identity, FixFn::PositivePart),
    ("FTE", FixFn::Identity, FixFn::PositivePart, FixFn::PositivePart),
];

/// Discretized variance path: `v_bar` holds the raw iterates, `v_hat` the
/// fixed (nonnegative) values the scheme outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CirPath {
    pub v_bar: Vec<f64>,
    pub v_hat: Vec<f64>,
    pub scheme: SchemeSpec,
}

/// One step of the generic Euler recursion. Returns `(vbar_next, vhat_next)`.
///
/// The square-root argument is `f3(vbar)`, never the raw iterate, so a
/// negative `vbar` is legal input for Case I schemes.
#[inline]
pub fn cir_step(
    scheme: &SchemeSpec,
    v_bar: f64,
    dt: f64,
    dw: f64,
    p: &ModelParams,
) -> (f64, f64) {
    let drift = p.kappa * (p.theta - scheme.f2.apply(v_bar));
    let diffusion = p.sigma * scheme.f3.apply(v_bar).sqrt();
    let next = scheme.f1.apply(v_bar) + drift * dt + diffusion * dw;
    (next, scheme.f3.apply(next))
}

/// Iterates [`cir_step`] over a whole increment grid, starting at `v0`.
pub fn cir_path(scheme: &SchemeSpec, p: &ModelParams, grid: &IncrementGrid) -> CirPath {
    let n = grid.level;
    let mut v_bar = Vec::with_capacity(n + 1);
    let mut v_hat = Vec::with_capacity(n + 1);
    v_bar.push(p.v0);
    v_hat.push(p.v0);
    let mut cur = p.v0;
    for k in 0..n {
        let (nb, nh) = cir_step(scheme, cur, grid.dt, grid.dw[k], p);
        v_bar.push(nb);
        v_hat.push(nh);
        cur = nb;
    }
    CirPath { v_bar, v_hat, scheme: scheme.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_model;
    use crate::rng::{gaussian_increments, SeedSpec};

    fn params_m1() -> ModelParams {
        builtin_model(1).unwrap()
    }

    #[test]
    fn fix_apply_definitions() {
        assert_eq!(FixFn::PositivePart.apply(-0.3), 0.0);
        assert_eq!(FixFn::AbsoluteValue.apply(-0.3), 0.3);
        assert_eq!(FixFn::Identity.apply(0.7), 0.7);
        assert_eq!(FixFn::PositivePart.apply(0.7), 0.7);
        assert_eq!(FixFn::AbsoluteValue.apply(0.7), 0.7);
    }

    #[test]
    fn registry_matches_table() {
        let want = [
            ("AE", "abs", "abs", "abs"),
            ("SE", "sym", "sym", "sym"),
            ("HM", "id", "id", "sym"),
            ("PTE", "id", "id", "abs"),
            ("FTE", "id", "abs", "abs"),
        ];
        for (scheme, (name, f1, f2, f3)) in SchemeSpec::all_named().iter().zip(want) {
            assert_eq!(scheme.label(), name);
            assert_eq!(scheme.f1().alias(), f1);
            assert_eq!(scheme.f2().alias(), f2);
            assert_eq!(scheme.f3().alias(), f3);
        }
    }

    #[test]
    fn from_name_accepts_names_and_triples() {
        assert_eq!(SchemeSpec::from_name("fte").unwrap(), SchemeSpec::full_truncation());
        assert_eq!(SchemeSpec::from_name("id,abs,abs").unwrap(), SchemeSpec::full_truncation());
        assert_eq!(SchemeSpec::from_name("sym,sym,sym").unwrap(), SchemeSpec::symmetrized());
        assert!(SchemeSpec::from_name("euler").is_err());
        // f1 = abs with mixed others is neither Case I nor Case II.
        assert!(SchemeSpec::from_name("abs,id,abs").is_err());
        // f3 = id never appears in either case.
        assert!(SchemeSpec::from_name("id,id,id").is_err());
    }

    #[test]
    fn every_registry_scheme_is_case_i_or_ii() {
        for s in SchemeSpec::all_named() {
            match s.case() {
                SchemeCase::I => {
                    assert_eq!(s.f1(), FixFn::Identity);
                    assert!(s.f3() != FixFn::Identity);
                }
                SchemeCase::II => {
                    assert_eq!(s.f1(), s.f2());
                    assert_eq!(s.f2(), s.f3());
                    assert!(s.f1() != FixFn::Identity);
                }
            }
        }
    }

    #[test]
    fn cir_step_hand_values() {
        let p = params_m1();
        let fte = SchemeSpec::full_truncation();

        // From v = 0.04 (= theta): zero drift, diffusion 0.61 * 0.2 * 0.02.
        let (vb, vh) = cir_step(&fte, 0.04, 0.01, 0.02, &p);
        assert!((vb - 0.04244).abs() < 1e-15);
        assert_eq!(vb, vh);

        // Negative iterate, FTE: f2 clamps the drift argument to 0.
        let (vb, vh) = cir_step(&fte, -0.01, 0.01, 0.0, &p);
        assert!((vb - (-0.008)).abs() < 1e-15);
        assert_eq!(vh, 0.0);

        // Negative iterate, HM: f2 = id keeps -0.01 in the drift.
        let hm = SchemeSpec::higham_mao();
        let (vb, vh) = cir_step(&hm, -0.01, 0.01, 0.0, &p);
        assert!((vb - (-0.0075)).abs() < 1e-15);
        assert!((vh - 0.0075).abs() < 1e-15);

        // SE with a large negative shock.
        let se = SchemeSpec::symmetrized();
        let (vb, vh) = cir_step(&se, 0.04, 0.01, -0.5, &p);
        assert!((vb - (-0.021)).abs() < 1e-15);
        assert!((vh - 0.021).abs() < 1e-15);
    }

    #[test]
    fn drift_fixed_point() {
        // v0 = theta and zero noise hold every scheme constant at theta.
        let p = params_m1();
        let grid = IncrementGrid { level: 64, dt: p.horizon / 64.0, dw: vec![0.0; 64], db: vec![0.0; 64] };
        for scheme in SchemeSpec::all_named() {
            let path = cir_path(&scheme, &p, &grid);
            assert!(path.v_hat.iter().all(|&v| v == p.theta), "{scheme}");
            assert!(path.v_bar.iter().all(|&v| v == p.theta), "{scheme}");
        }
    }

    #[test]
    fn tiny_sigma_approaches_deterministic_euler() {
        // With sigma ~ 1e-300 the noise term is O(1e-300); the path must
        // match the deterministic recursion v <- v + kappa (theta - v) dt.
        let mut p = params_m1();
        p.sigma = 1e-300;
        p.v0 = 0.02;
        let seed = SeedSpec { master_seed: 4, path_index: 2 };
        let grid = gaussian_increments(&seed, 128, p.horizon).unwrap();
        for scheme in SchemeSpec::all_named() {
            let path = cir_path(&scheme, &p, &grid);
            let mut v = p.v0;
            for k in 0..grid.level {
                v = v + p.kappa * (p.theta - v) * grid.dt;
                assert!((path.v_hat[k + 1] - v).abs() < 1e-12, "{scheme} step {k}");
            }
        }
    }

    #[test]
    fn vhat_is_nonnegative_and_consistent() {
        let p = builtin_model(5).unwrap(); // lowest Feller index: negativity likely
        for ms in 0..20 {
            let seed = SeedSpec { master_seed: ms, path_index: 0 };
            let grid = gaussian_increments(&seed, 64, p.horizon).unwrap();
            for scheme in SchemeSpec::all_named() {
                let path = cir_path(&scheme, &p, &grid);
                assert_eq!(path.v_hat.len(), grid.level + 1);
                assert_eq!(path.v_hat[0], p.v0);
                assert_eq!(path.v_bar[0], p.v0);
                for k in 1..path.v_hat.len() {
                    assert!(path.v_hat[k] >= 0.0);
                    assert_eq!(path.v_hat[k], scheme.f3().apply(path.v_bar[k]));
                }
            }
        }
    }

    #[test]
    fn schemes_agree_on_the_positive_orbit() {
        // Whenever the raw iterates stay nonnegative, all fixes are the
        // identity there and the five schemes produce bit-identical paths.
        let p = builtin_model(3).unwrap(); // nu = 5.2 keeps paths positive
        let schemes = SchemeSpec::all_named();
        let mut checked = 0;
        for ms in 0..50 {
            let seed = SeedSpec { master_seed: ms, path_index: 1 };
            let grid = gaussian_increments(&seed, 256, p.horizon).unwrap();
            let reference = cir_path(&schemes[0], &p, &grid);
            if reference.v_bar.iter().any(|&v| v < 0.0) {
                continue;
            }
            checked += 1;
            for scheme in &schemes[1..] {
                let path = cir_path(scheme, &p, &grid);
                assert_eq!(path.v_bar, reference.v_bar, "{scheme}");
                assert_eq!(path.v_hat, reference.v_hat, "{scheme}");
            }
        }
        assert!(checked > 40, "positive orbit should dominate at nu = 5.2");
    }

    #[test]
    fn case_ii_self_consistency() {
        // SE and AE written in their one-line forms: vhat[k+1] = |z| resp.
        // z+ with z = vhat[k] + kappa (theta - vhat[k]) dt + sigma sqrt(vhat[k]) dW.
        let p = builtin_model(5).unwrap();
        let seed = SeedSpec { master_seed: 77, path_index: 0 };
        let grid = gaussian_increments(&seed, 128, p.horizon).unwrap();
        for (scheme, fix) in [
            (SchemeSpec::symmetrized(), FixFn::AbsoluteValue),
            (SchemeSpec::absorption(), FixFn::PositivePart),
        ] {
            let path = cir_path(&scheme, &p, &grid);
            let mut vhat = p.v0;
            for k in 0..grid.level {
                let z = vhat + p.kappa * (p.theta - vhat) * grid.dt
                    + p.sigma * vhat.sqrt() * grid.dw[k];
                vhat = fix.apply(z);
                assert_eq!(path.v_hat[k + 1], vhat, "{scheme} step {k}");
            }
        }
    }

    #[test]
    fn one_step_mean_is_drift_exact() {
        // Averaging the step over many Gaussian draws reproduces the Euler
        // drift: E[vbar'] = vbar + kappa (theta - vbar) dt.
        let p = params_m1();
        let dt = 0.01;
        let v = 0.03;
        let m = 100_000usize;
        for scheme in SchemeSpec::all_named() {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for i in 0..m {
                let seed = SeedSpec { master_seed: 2024, path_index: i as u64 };
                let g = gaussian_increments(&seed, 1, dt).unwrap();
                let (vb, _) = cir_step(&scheme, v, dt, g.dw[0], &p);
                sum += vb;
                sumsq += vb * vb;
            }
            let mf = m as f64;
            let mean = sum / mf;
            let sd = (sumsq / mf - mean * mean).sqrt();
            let se = sd / mf.sqrt();
            let want = v + p.kappa * (p.theta - v) * dt;
            assert!((mean - want).abs() < 4.0 * se, "{scheme}: mean {mean} want {want} se {se}");
        }
    }
}
