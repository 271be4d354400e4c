//! Velocity and position updates of global-best PSO and its fixed-rule variants.

use serde::{Deserialize, Serialize};

use crate::config::{BestUpdate, PsoParams};
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::swarm::{ParticleState, SwarmState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PsoVariant {
    /// Fixed parameters, no velocity limit.
    Standard,
    /// Each velocity component is clamped to `[-vmax, vmax]` before the move.
    Vmax { vmax: f64 },
    /// Inertia decreases linearly from `omega_start` to `omega_end` over the run.
    LinearDescent {
        omega_start: f64,
        omega_end: f64,
        max_iterations: u64,
    },
}

/// `v' = omega v + alpha1 R1 (p - x) + alpha2 R2 (g - x)` with component-wise
/// uniform factors; per dimension the `R1` draw precedes the `R2` draw.
pub fn velocity_update(
    particle: &ParticleState,
    global_best: &[f64],
    params: &PsoParams,
    rng: &mut RngStream,
) -> Vec<f64> {
    particle
        .velocity
        .iter()
        .zip(&particle.position)
        .zip(particle.personal_best_position.iter().zip(global_best))
        .map(|((&v, &x), (&p, &g))| {
            let r1 = rng.uniform();
            let r2 = rng.uniform();
            params.omega * v + params.alpha1 * r1 * (p - x) + params.alpha2 * r2 * (g - x)
        })
        .collect()
}

pub fn position_update(position: &[f64], velocity: &[f64]) -> Vec<f64> {
    debug_assert_eq!(position.len(), velocity.len());
    position.iter().zip(velocity).map(|(x, v)| x + v).collect()
}

/// Component-wise clamp into `[-vmax, vmax]`.
pub fn clamp_velocity(velocity: &[f64], vmax: f64) -> Vec<f64> {
    velocity.iter().map(|v| v.clamp(-vmax, vmax)).collect()
}

pub fn linear_descent_omega(
    iteration: u64,
    max_iterations: u64,
    omega_start: f64,
    omega_end: f64,
) -> f64 {
    let progress = iteration.min(max_iterations) as f64 / max_iterations as f64;
    omega_start + (omega_end - omega_start) * progress
}

/// Advances the swarm by one iteration.
///
/// Every particle's velocity and position are updated using the global best
/// from the end of the previous iteration. With [`BestUpdate::Synchronous`]
/// all particles move first and the bests are refreshed afterwards; with
/// [`BestUpdate::Asynchronous`] each particle is evaluated right after it
/// moves and later particles already see the improved global best. The
/// random draw order is identical in both modes.
pub fn pso_step(
    swarm: &mut SwarmState,
    objective: &Objective,
    variant: &PsoVariant,
    rng: &mut RngStream,
) {
    if let PsoVariant::LinearDescent {
        omega_start,
        omega_end,
        max_iterations,
    } = *variant
    {
        swarm.params.omega =
            linear_descent_omega(swarm.iteration, max_iterations, omega_start, omega_end);
    }
    let params = swarm.params;
    let asynchronous = swarm.best_update == BestUpdate::Asynchronous;

    for i in 0..swarm.particles.len() {
        let particle = &swarm.particles[i];
        let mut velocity = velocity_update(particle, &swarm.global_best_position, &params, rng);
        if let PsoVariant::Vmax { vmax } = *variant {
            velocity = clamp_velocity(&velocity, vmax);
        }
        let position = position_update(&particle.position, &velocity);
        let particle = &mut swarm.particles[i];
        particle.velocity = velocity;
        particle.position = position;
        if asynchronous {
            particle.fitness = objective.evaluate(&particle.position);
            if particle.refresh_personal_best()
                && particle.personal_best_fitness < swarm.global_best_fitness
            {
                swarm.global_best_fitness = particle.personal_best_fitness;
                swarm
                    .global_best_position
                    .clone_from(&particle.personal_best_position);
            }
        }
    }

    if asynchronous {
        // keep the lowest-index tie rule
        swarm.refresh_global_best();
    } else {
        for particle in &mut swarm.particles {
            particle.fitness = objective.evaluate(&particle.position);
            particle.refresh_personal_best();
        }
        swarm.refresh_global_best();
    }
    swarm.iteration += 1;
}
