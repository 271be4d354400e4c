use serde::{Deserialize, Serialize};

use crate::config::{BestUpdate, PsoParams, RunConfig};
use crate::error::Result;
use crate::objectives::Objective;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Fitness at `position`.
    pub fitness: f64,
    pub personal_best_position: Vec<f64>,
    pub personal_best_fitness: f64,
}

impl ParticleState {
    /// Adopts the current position as personal best if strictly better.
    pub fn refresh_personal_best(&mut self) -> bool {
        if self.fitness < self.personal_best_fitness {
            self.personal_best_fitness = self.fitness;
            self.personal_best_position.clone_from(&self.position);
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub particles: Vec<ParticleState>,
    pub global_best_position: Vec<f64>,
    pub global_best_fitness: f64,
    pub params: PsoParams,
    pub iteration: u64,
    pub best_update: BestUpdate,
}

impl SwarmState {
    /// Places `particle_count` particles uniformly in the objective's region.
    ///
    /// Velocity components start uniform in `±velocity_fraction * width` of the
    /// matching axis. Draw order per particle: all position components, then all
    /// velocity components.
    pub fn initialize(
        objective: &Objective,
        particle_count: usize,
        params: PsoParams,
        velocity_fraction: f64,
        best_update: BestUpdate,
        rng: &mut RngStream,
    ) -> Self {
        let bounds: Vec<(f64, f64)> = objective
            .region_low
            .iter()
            .copied()
            .zip(objective.region_high.iter().copied())
            .collect();
        let particles: Vec<ParticleState> = (0..particle_count)
            .map(|_| {
                let position: Vec<f64> = bounds
                    .iter()
                    .map(|&(lo, hi)| rng.uniform_in(lo, hi))
                    .collect();
                let velocity: Vec<f64> = bounds
                    .iter()
                    .map(|&(lo, hi)| (2.0 * rng.uniform() - 1.0) * velocity_fraction * (hi - lo))
                    .collect();
                let fitness = objective.evaluate(&position);
                ParticleState {
                    personal_best_position: position.clone(),
                    personal_best_fitness: fitness,
                    position,
                    velocity,
                    fitness,
                }
            })
            .collect();
        let mut swarm = SwarmState {
            particles,
            global_best_position: Vec::new(),
            global_best_fitness: f64::INFINITY,
            params,
            iteration: 0,
            best_update,
        };
        swarm.refresh_global_best();
        swarm
    }

    pub fn dimension(&self) -> usize {
        self.global_best_position.len()
    }

    /// Index of the best personal best; the lowest index wins exact ties.
    pub fn best_particle(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.particles.iter().enumerate() {
            match best {
                Some((_, f)) if p.personal_best_fitness >= f => {}
                _ => best = Some((i, p.personal_best_fitness)),
            }
        }
        best.map(|(i, _)| i)
    }

    /// Recomputes the global best from the personal bests.
    pub fn refresh_global_best(&mut self) {
        if let Some(i) = self.best_particle() {
            let p = &self.particles[i];
            self.global_best_fitness = p.personal_best_fitness;
            self.global_best_position
                .clone_from(&p.personal_best_position);
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = &[f64]> {
        self.particles.iter().map(|p| p.position.as_slice())
    }

    pub fn velocities(&self) -> impl Iterator<Item = &[f64]> {
        self.particles.iter().map(|p| p.velocity.as_slice())
    }

    pub fn is_finite(&self) -> bool {
        self.particles
            .iter()
            .all(|p| p.position.iter().chain(&p.velocity).all(|v| v.is_finite()))
    }
}

/// Builds the objective named in `config` and a freshly initialised swarm on it.
pub fn initialize_swarm(config: &RunConfig, rng: &mut RngStream) -> Result<SwarmState> {
    let objective = config.objective()?;
    Ok(SwarmState::initialize(
        &objective,
        config.particle_count,
        config.initial_params,
        config.velocity_init_fraction,
        config.best_update,
        rng,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Algorithm;

    fn config(dimension: usize, particle_count: usize) -> RunConfig {
        RunConfig {
            dimension,
            particle_count,
            ..RunConfig::new(Algorithm::Crips)
        }
    }

    #[test]
    fn single_particle_in_region() {
        for seed in 0..50 {
            let s = initialize_swarm(&config(1, 1), &mut RngStream::new(seed)).unwrap();
            let x = s.particles[0].position[0];
            assert!((-500.0..=500.0).contains(&x));
            assert!(s.particles[0].velocity[0].abs() <= 100.0);
        }
    }

    #[test]
    fn shape_and_bests() {
        let s = initialize_swarm(&config(20, 25), &mut RngStream::new(7)).unwrap();
        assert_eq!(s.particles.len(), 25);
        assert!(s
            .particles
            .iter()
            .all(|p| p.position.len() == 20 && p.velocity.len() == 20));
        for p in &s.particles {
            assert_eq!(p.personal_best_position, p.position);
            assert_eq!(p.personal_best_fitness, schwefel_of(&p.position));
        }
        let min = s
            .particles
            .iter()
            .map(|p| p.personal_best_fitness)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(s.global_best_fitness, min);
        assert_eq!(s.iteration, 0);
    }

    fn schwefel_of(x: &[f64]) -> f64 {
        crate::objectives::schwefel(x)
    }

    #[test]
    fn replay_is_bit_identical() {
        let a = initialize_swarm(&config(20, 25), &mut RngStream::new(99)).unwrap();
        let b = initialize_swarm(&config(20, 25), &mut RngStream::new(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_objective() {
        let mut c = config(2, 2);
        c.objective_name = "rosenbrock".into();
        assert!(initialize_swarm(&c, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn lowest_index_wins_ties() {
        let mut s = initialize_swarm(&config(2, 3), &mut RngStream::new(1)).unwrap();
        for p in &mut s.particles {
            p.personal_best_fitness = 1.0;
        }
        s.particles[2].personal_best_position = vec![9.0, 9.0];
        s.refresh_global_best();
        assert_eq!(s.best_particle(), Some(0));
        assert_eq!(
            s.global_best_position,
            s.particles[0].personal_best_position
        );
    }
}
