//! Diversity metrics and the feedback controller of the critical swarm.
//!
//! Each iteration the swarm moves as plain PSO with its current parameters,
//! the chosen diversity metric is measured, and its change drives one shared
//! additive update of `omega`, `alpha1` and `alpha2`:
//!
//! ```text
//! dS          = S(t+1) - S(t)
//! f(dS)       = tanh(-dS / (2 sigma))
//! theta(t+1)  = theta(t) - eps * f(dS)
//! ```
//!
//! No clamping is applied to the parameters or velocities.

use serde::{Deserialize, Serialize};

use crate::config::{FeedbackSign, MetricKind, PsoParams};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::pso::{pso_step, PsoVariant};
use crate::rng::RngStream;
use crate::swarm::SwarmState;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn mean_velocity_norm<'a>(velocities: impl ExactSizeIterator<Item = &'a [f64]>) -> f64 {
    let n = velocities.len() as f64;
    velocities.map(norm).sum::<f64>() / n
}

pub fn centroid(positions: &[&[f64]]) -> Vec<f64> {
    let dim = positions.first().map_or(0, |p| p.len());
    let mut c = vec![0.0; dim];
    for p in positions {
        for (ci, xi) in c.iter_mut().zip(p.iter()) {
            *ci += xi;
        }
    }
    let n = positions.len() as f64;
    c.iter_mut().for_each(|ci| *ci /= n);
    c
}

/// Mean Euclidean distance of the particles from their centroid.
pub fn mean_centroid_distance(positions: &[&[f64]]) -> f64 {
    let c = centroid(positions);
    positions.iter().map(|p| distance(p, &c)).sum::<f64>() / positions.len() as f64
}

/// Mean distance over all unordered pairs; zero for a single particle.
pub fn mean_interparticle_distance(positions: &[&[f64]]) -> f64 {
    let n = positions.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += distance(positions[i], positions[j]);
        }
    }
    total / (n * (n - 1) / 2) as f64
}

/// Metric on an arbitrary population, used by the random-search baselines too.
pub fn population_metric(positions: &[&[f64]], velocities: &[&[f64]], metric: MetricKind) -> f64 {
    match metric {
        MetricKind::VelocityNorm => mean_velocity_norm(velocities.iter().copied()),
        MetricKind::CentroidDistance => mean_centroid_distance(positions),
        MetricKind::InterparticleDistance => mean_interparticle_distance(positions),
    }
}

pub fn swarm_metric(swarm: &SwarmState, metric: MetricKind) -> Result<f64> {
    if swarm.particles.is_empty() {
        return Err(Error::Argument("swarm metric of an empty swarm".into()));
    }
    let positions: Vec<&[f64]> = swarm.positions().collect();
    let velocities: Vec<&[f64]> = swarm.velocities().collect();
    Ok(population_metric(&positions, &velocities, metric))
}

pub fn metric_delta(current: f64, previous: f64) -> f64 {
    current - previous
}

/// `tanh(-dS / (2 sigma))`, in `[-1, 1]`.
pub fn squash(delta_s: f64, sigma: f64) -> Result<f64> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::Argument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(squash_unchecked(delta_s, sigma))
}

#[inline]
fn squash_unchecked(delta_s: f64, sigma: f64) -> f64 {
    (-delta_s / (2.0 * sigma)).tanh()
}

/// Applies `theta - eps * f(dS)` to all three parameters.
pub fn update_params(
    params: PsoParams,
    delta_s: f64,
    epsilon: f64,
    sigma: f64,
) -> Result<PsoParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(params.shifted(-epsilon * squash(delta_s, sigma)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub epsilon: f64,
    pub sigma: f64,
    pub previous_metric: f64,
    pub sign: FeedbackSign,
}

impl ControllerState {
    /// Validates the gains and seeds `previous_metric` from the initial swarm.
    pub fn new(
        epsilon: f64,
        sigma: f64,
        sign: FeedbackSign,
        swarm: &SwarmState,
        metric: MetricKind,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Argument(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Argument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            epsilon,
            sigma,
            previous_metric: swarm_metric(swarm, metric)?,
            sign,
        })
    }

    /// Parameter increment for a metric change.
    pub fn increment(&self, delta_s: f64) -> f64 {
        let step = -self.epsilon * squash_unchecked(delta_s, self.sigma);
        match self.sign {
            FeedbackSign::AsPrinted => step,
            FeedbackSign::Inverted => -step,
        }
    }
}

/// One critical-swarm iteration; returns the new metric value.
pub fn crips_step(
    swarm: &mut SwarmState,
    objective: &Objective,
    controller: &mut ControllerState,
    metric: MetricKind,
    rng: &mut RngStream,
) -> f64 {
    pso_step(swarm, objective, &PsoVariant::Standard, rng);
    let current = swarm_metric(swarm, metric).expect("swarm is non-empty after initialisation");
    let delta = metric_delta(current, controller.previous_metric);
    swarm.params = swarm.params.shifted(controller.increment(delta));
    controller.previous_metric = current;
    current
}
