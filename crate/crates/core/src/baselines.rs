//! Random-search baselines: uniform sampling of the region, and greedy
//! per-slot search with power-law distributed step lengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::rng::RngStream;

/// Step lengths with density proportional to `L^-exponent` on `[min_step, max_step]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSampler {
    exponent: f64,
    min_step: f64,
    max_step: f64,
}

impl PowerLawSampler {
    pub fn new(exponent: f64, min_step: f64, max_step: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 1.0) {
            return Err(Error::Argument(format!(
                "power-law exponent must exceed 1, got {exponent}"
            )));
        }
        if !(min_step > 0.0 && min_step < max_step && max_step.is_finite()) {
            return Err(Error::Argument(format!(
                "power-law range must satisfy 0 < min < max, got [{min_step}, {max_step}]"
            )));
        }
        Ok(Self {
            exponent,
            min_step,
            max_step,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn min_step(&self) -> f64 {
        self.min_step
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    /// Inverse of [`Self::cdf`] at `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let k = 1.0 - self.exponent;
        let lo = self.min_step.powf(k);
        let hi = self.max_step.powf(k);
        (lo + u * (hi - lo))
            .powf(1.0 / k)
            .clamp(self.min_step, self.max_step)
    }

    pub fn cdf(&self, length: f64) -> f64 {
        if length <= self.min_step {
            return 0.0;
        }
        if length >= self.max_step {
            return 1.0;
        }
        let k = 1.0 - self.exponent;
        let lo = self.min_step.powf(k);
        (length.powf(k) - lo) / (self.max_step.powf(k) - lo)
    }
}

pub fn powerlaw_step_length(sampler: &PowerLawSampler, rng: &mut RngStream) -> f64 {
    sampler.quantile(rng.uniform())
}

/// Isotropic unit vector from normalised standard-normal draws.
pub fn random_unit_vector(rng: &mut RngStream, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Shared state of both baselines: one slot per "particle", each holding the
/// best point it has seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSearchState {
    /// Best point of each slot.
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    /// Most recent candidate minus the slot's position before the draw.
    pub displacements: Vec<Vec<f64>>,
    pub global_best_position: Vec<f64>,
    pub global_best_fitness: f64,
    pub iteration: u64,
}

impl RandomSearchState {
    /// Uniform initial points, one per slot.
    pub fn initialize(objective: &Objective, slots: usize, rng: &mut RngStream) -> Self {
        let positions: Vec<Vec<f64>> = (0..slots).map(|_| sample_region(objective, rng)).collect();
        let fitness: Vec<f64> = positions.iter().map(|p| objective.evaluate(p)).collect();
        let mut state = Self {
            displacements: vec![vec![0.0; objective.dimension]; slots],
            positions,
            fitness,
            global_best_position: Vec::new(),
            global_best_fitness: f64::INFINITY,
            iteration: 0,
        };
        state.refresh_global_best();
        state
    }

    fn refresh_global_best(&mut self) -> bool {
        let mut improved = false;
        for (p, &f) in self.positions.iter().zip(&self.fitness) {
            if f < self.global_best_fitness {
                self.global_best_fitness = f;
                self.global_best_position.clone_from(p);
                improved = true;
            }
        }
        improved
    }

    fn offer(&mut self, slot: usize, candidate: Vec<f64>, objective: &Objective) -> f64 {
        let f = objective.evaluate(&candidate);
        self.displacements[slot] = candidate
            .iter()
            .zip(&self.positions[slot])
            .map(|(c, p)| c - p)
            .collect();
        if f < self.fitness[slot] {
            self.fitness[slot] = f;
            self.positions[slot] = candidate;
        }
        f
    }
}

fn sample_region(objective: &Objective, rng: &mut RngStream) -> Vec<f64> {
    objective
        .region_low
        .iter()
        .zip(&objective.region_high)
        .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
        .collect()
}

/// Draws one fresh uniform point per slot; returns every evaluated fitness
/// in draw order. The global best and iteration counter are updated.
pub fn uniform_search_step(
    state: &mut RandomSearchState,
    objective: &Objective,
    rng: &mut RngStream,
) -> Vec<f64> {
    let evaluations = (0..state.positions.len())
        .map(|slot| {
            let candidate = sample_region(objective, rng);
            state.offer(slot, candidate, objective)
        })
        .collect();
    state.refresh_global_best();
    state.iteration += 1;
    evaluations
}

/// Moves each slot's best point by a power-law length in a random direction
/// and keeps the candidate only if it is strictly better.
pub fn powerlaw_search_step(
    state: &mut RandomSearchState,
    sampler: &PowerLawSampler,
    objective: &Objective,
    rng: &mut RngStream,
) -> Vec<f64> {
    let evaluations = (0..state.positions.len())
        .map(|slot| {
            let length = powerlaw_step_length(sampler, rng);
            let direction = random_unit_vector(rng, objective.dimension);
            let candidate: Vec<f64> = state.positions[slot]
                .iter()
                .zip(&direction)
                .map(|(p, u)| p + length * u)
                .collect();
            state.offer(slot, candidate, objective)
        })
        .collect();
    state.refresh_global_best();
    state.iteration += 1;
    evaluations
}
