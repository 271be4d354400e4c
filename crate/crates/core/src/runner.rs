//! Drives one seeded run of any algorithm and records its trace.

use crate::analysis::{ImprovementEvent, RunTrace, TraceRecord};
use crate::baselines::{
    powerlaw_search_step, uniform_search_step, PowerLawSampler, RandomSearchState,
};
use crate::config::{Algorithm, RunConfig};
use crate::crips::{crips_step, population_metric, swarm_metric, ControllerState};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::pso::{pso_step, PsoVariant};
use crate::rng::RngStream;
use crate::swarm::SwarmState;

enum Engine {
    Swarm {
        swarm: SwarmState,
        variant: PsoVariant,
        controller: Option<ControllerState>,
    },
    Uniform(RandomSearchState),
    PowerLaw(RandomSearchState, PowerLawSampler),
}

/// A run in progress. Exposed so callers can observe the state between
/// iterations; [`run`] covers the common case.
pub struct Run {
    config: RunConfig,
    objective: Objective,
    rng: RngStream,
    engine: Engine,
    trace: RunTrace,
    finished: bool,
}

impl Run {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let objective = config.objective()?;
        let mut rng = RngStream::new(config.seed);
        let engine = match config.algorithm {
            Algorithm::RandUniform => Engine::Uniform(RandomSearchState::initialize(
                &objective,
                config.particle_count,
                &mut rng,
            )),
            Algorithm::RandPowerlaw => {
                let sampler = PowerLawSampler::new(
                    config.powerlaw_exponent,
                    config.powerlaw_min_step,
                    config.resolved_powerlaw_max_step(&objective),
                )
                .map_err(|e| Error::config("powerlaw_exponent", e.to_string()))?;
                Engine::PowerLaw(
                    RandomSearchState::initialize(&objective, config.particle_count, &mut rng),
                    sampler,
                )
            }
            algorithm => {
                let swarm = SwarmState::initialize(
                    &objective,
                    config.particle_count,
                    config.initial_params,
                    config.velocity_init_fraction,
                    config.best_update,
                    &mut rng,
                );
                let variant = match algorithm {
                    Algorithm::PsoVmax => PsoVariant::Vmax {
                        vmax: config.vmax.expect("validated"),
                    },
                    Algorithm::PsoLd => PsoVariant::LinearDescent {
                        omega_start: config.omega_start.expect("validated"),
                        omega_end: config.omega_end.expect("validated"),
                        max_iterations: config.max_iterations,
                    },
                    _ => PsoVariant::Standard,
                };
                let controller = (algorithm == Algorithm::Crips)
                    .then(|| {
                        ControllerState::new(
                            config.epsilon,
                            config.resolved_sigma(&objective),
                            config.feedback_sign,
                            &swarm,
                            config.metric,
                        )
                    })
                    .transpose()
                    .map_err(|e| Error::config("epsilon", e.to_string()))?;
                Engine::Swarm {
                    swarm,
                    variant,
                    controller,
                }
            }
        };
        Ok(Self {
            trace: RunTrace {
                config: config.clone(),
                records: Vec::with_capacity(config.max_iterations.min(1 << 20) as usize),
                improvement_events: Vec::new(),
            },
            config: config.clone(),
            objective,
            rng,
            engine,
            finished: false,
        })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    /// The swarm, for PSO-family runs.
    pub fn swarm(&self) -> Option<&SwarmState> {
        match &self.engine {
            Engine::Swarm { swarm, .. } => Some(swarm),
            _ => None,
        }
    }

    pub fn global_best_fitness(&self) -> f64 {
        match &self.engine {
            Engine::Swarm { swarm, .. } => swarm.global_best_fitness,
            Engine::Uniform(s) | Engine::PowerLaw(s, _) => s.global_best_fitness,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Performs one iteration and appends its record. Returns `false` once
    /// the goal or the iteration budget has been reached, or when a swarm
    /// update overflows. An overflowing iteration is discarded and the swarm
    /// keeps its last finite state.
    pub fn step(&mut self) -> bool {
        if self.finished {
            return false;
        }
        let metric_kind = self.config.metric;
        let (iteration, best, metric, params) = match &mut self.engine {
            Engine::Swarm {
                swarm,
                variant,
                controller,
            } => {
                let saved = (swarm.clone(), controller.clone());
                let metric = match controller {
                    Some(c) => crips_step(swarm, &self.objective, c, metric_kind, &mut self.rng),
                    None => {
                        pso_step(swarm, &self.objective, variant, &mut self.rng);
                        swarm_metric(swarm, metric_kind).expect("non-empty swarm")
                    }
                };
                if !(swarm.is_finite() && metric.is_finite() && swarm.params.is_finite()) {
                    // overflowed; keep the last finite state and end the run
                    (*swarm, *controller) = saved;
                    self.finished = true;
                    return false;
                }
                (
                    swarm.iteration,
                    swarm.global_best_fitness,
                    metric,
                    swarm.params,
                )
            }
            Engine::Uniform(state) => {
                uniform_search_step(state, &self.objective, &mut self.rng);
                let m = state_metric(state, metric_kind);
                (
                    state.iteration,
                    state.global_best_fitness,
                    m,
                    self.config.initial_params,
                )
            }
            Engine::PowerLaw(state, sampler) => {
                powerlaw_search_step(state, sampler, &self.objective, &mut self.rng);
                let m = state_metric(state, metric_kind);
                (
                    state.iteration,
                    state.global_best_fitness,
                    m,
                    self.config.initial_params,
                )
            }
        };
        if let Some(last) = self.trace.records.last() {
            if best < last.best_fitness {
                self.trace.improvement_events.push(ImprovementEvent {
                    iteration,
                    best_fitness: best,
                });
            }
        }
        self.trace.records.push(TraceRecord {
            iteration,
            best_fitness: best,
            metric,
            omega: params.omega,
            alpha1: params.alpha1,
            alpha2: params.alpha2,
        });
        self.finished =
            best < self.config.goal_tolerance || iteration >= self.config.max_iterations;
        !self.finished
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn into_trace(self) -> RunTrace {
        self.trace
    }
}

fn state_metric(state: &RandomSearchState, kind: crate::config::MetricKind) -> f64 {
    let positions: Vec<&[f64]> = state.positions.iter().map(Vec::as_slice).collect();
    let displacements: Vec<&[f64]> = state.displacements.iter().map(Vec::as_slice).collect();
    population_metric(&positions, &displacements, kind)
}

/// Runs `config` to completion (goal reached or iteration budget spent).
pub fn run(config: &RunConfig) -> Result<RunTrace> {
    let mut r = Run::new(config)?;
    while r.step() {}
    Ok(r.into_trace())
}
