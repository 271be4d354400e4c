//! Seeded random stream shared by every stochastic component of a run.
//!
//! A run owns exactly one stream. Draws are consumed in a fixed order so a
//! run replays bit-for-bit from its seed:
//!
//! * swarm initialisation: per particle, `N` position draws then `N`
//!   velocity draws;
//! * each PSO iteration: per particle, per dimension, the `R1` draw then the
//!   `R2` draw;
//! * uniform random search: per slot, `N` position draws;
//! * power-law random search: per slot, one step-length draw then `N`
//!   standard-normal direction draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw in `[low, high)`.
    #[inline]
    pub fn uniform_in(&mut self, low: f64, high: f64) -> f64 {
        let value = low + (high - low) * self.uniform();
        // rounding can land exactly on `high` for wide intervals
        if value >= high {
            low.max(high - (high - low) * f64::EPSILON)
        } else {
            value
        }
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

/// `n` independent uniform components in `[low, high)`.
pub fn uniform_vector(rng: &mut RngStream, n: usize, low: f64, high: f64) -> Result<Vec<f64>> {
    if low >= high || !low.is_finite() || !high.is_finite() {
        return Err(Error::Argument(format!(
            "uniform_vector requires finite low < high, got [{low}, {high})"
        )));
    }
    Ok((0..n).map(|_| rng.uniform_in(low, high)).collect())
}
