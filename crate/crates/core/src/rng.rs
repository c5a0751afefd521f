//! Deterministic, path-indexed Gaussian increment generation on dyadic grids.
//!
//! Increments are produced by a counter-based construction: ChaCha8 keyed on
//! the master seed, with one cipher stream per path and a fixed word layout
//! per (Brownian stream, step). Any single increment is therefore computable
//! without generating its predecessors, and distinct paths can be generated
//! concurrently with bit-identical results to sequential execution.
//!
//! Coarse grids are never drawn independently: [`IncrementGrid::coarsen`]
//! sums adjacent fine increments (fixed left-then-right order), so coarse and
//! fine discretizations are driven by the same Brownian path.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Identifies one path within a reproducible experiment.
///
/// `(master_seed, path_index)` uniquely determines the entire `(W, B)`
/// increment stream for the path at any grid level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub path_index: u64,
}

/// The two independent Brownian drivers: `W` moves the variance, `B` is the
/// orthogonal component mixed into the price by the correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    W,
    B,
}

/// Brownian increments for one path on an equidistant grid of `level` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementGrid {
    /// Number of steps `N`.
    pub level: usize,
    /// Step size `T / N`.
    pub dt: f64,
    /// Increments of `W`, each `N(0, dt)`.
    pub dw: Vec<f64>,
    /// Increments of `B`, each `N(0, dt)`.
    pub db: Vec<f64>,
}

impl IncrementGrid {
    /// Halves the resolution by summing adjacent increments.
    ///
    /// `out.dw[k] = dw[2k] + dw[2k+1]`, same for `db`; the addition order is
    /// fixed so repeated coarsening is bit-reproducible.
    pub fn coarsen(&self) -> Result<IncrementGrid> {
        if self.level == 0 || !self.level.is_multiple_of(2) {
            return Err(Error::OddLevel(self.level));
        }
        let half = self.level / 2;
        let sum_pairs = |xs: &[f64]| (0..half).map(|k| xs[2 * k] + xs[2 * k + 1]).collect();
        Ok(IncrementGrid {
            level: half,
            dt: 2.0 * self.dt,
            dw: sum_pairs(&self.dw),
            db: sum_pairs(&self.db),
        })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes an experiment-level tag (e.g. the grid level) into a master seed so
/// that different table rows draw fresh, independent Brownian paths.
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(tag))
}

fn chacha_key(master_seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut s = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    key
}

fn path_rng(seed: &SeedSpec) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(chacha_key(seed.master_seed));
    rng.set_stream(seed.path_index);
    rng
}

/// Maps a raw 64-bit word to the open interval (0, 1).
#[inline]
fn unit_open(u: u64) -> f64 {
    ((u >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn standard_normal(u: u64) -> f64 {
    // Inverse-CDF transform: monotone in u and stream-stable.
    Normal::standard().inverse_cdf(unit_open(u))
}

/// Draws the full increment grid for one path: `N` steps over `[0, horizon]`,
/// all increments `N(0, horizon/N)`, `W` and `B` from separated positions of
/// the same counter stream.
pub fn gaussian_increments(seed: &SeedSpec, n: usize, horizon: f64) -> Result<IncrementGrid> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    let dt = horizon / n as f64;
    let scale = dt.sqrt();
    let mut rng = path_rng(seed);
    let mut dw = Vec::with_capacity(n);
    let mut db = Vec::with_capacity(n);
    for _ in 0..n {
        dw.push(scale * standard_normal(rng.next_u64()));
        db.push(scale * standard_normal(rng.next_u64()));
    }
    Ok(IncrementGrid { level: n, dt, dw, db })
}

/// Random access to a single increment of [`gaussian_increments`] output:
/// step `k` of the given stream, without generating predecessors.
pub fn gaussian_increment_at(
    seed: &SeedSpec,
    n: usize,
    horizon: f64,
    stream: Stream,
    k: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    assert!(k < n, "step index {k} out of range for level {n}");
    let dt = horizon / n as f64;
    let mut rng = path_rng(seed);
    // u64 draw index within the stream: W at 2k, B at 2k+1; one u64 is two
    // 32-bit cipher words.
    let offset = match stream {
        Stream::W => 0,
        Stream::B => 1,
    };
    rng.set_word_pos(2 * (2 * k as u128 + offset));
    Ok(dt.sqrt() * standard_normal(rng.next_u64()))
}

/// Combines the two drivers into the price-side Brownian increment
/// `rho * dW + sqrt(1 - rho^2) * dB`.
#[inline]
pub fn correlated_increment(dw: f64, db: f64, rho: f64) -> f64 {
    rho * dw + (1.0 - rho * rho).sqrt() * db
}
