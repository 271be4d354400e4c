//! Run configuration shared by every algorithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{build_objective, Objective, ObjectiveOptions};

/// Inertia weight and the two attraction coefficients of the velocity update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub omega: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl PsoParams {
    pub const fn new(omega: f64, alpha1: f64, alpha2: f64) -> Self {
        Self {
            omega,
            alpha1,
            alpha2,
        }
    }

    /// Starting point of the critical swarm and of the fixed-parameter PSO baseline.
    pub const CRIPS_DEFAULT: PsoParams = PsoParams::new(0.815, 1.0, 1.0);

    pub fn is_finite(&self) -> bool {
        self.omega.is_finite() && self.alpha1.is_finite() && self.alpha2.is_finite()
    }

    /// Adds the same increment to all three parameters.
    pub fn shifted(self, delta: f64) -> Self {
        Self {
            omega: self.omega + delta,
            alpha1: self.alpha1 + delta,
            alpha2: self.alpha2 + delta,
        }
    }
}

impl Default for PsoParams {
    fn default() -> Self {
        Self::CRIPS_DEFAULT
    }
}

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                let lowered = s.trim().to_ascii_lowercase().replace('-', "_");
                match lowered.as_str() {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown value `{s}` (expected one of {})",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

keyword_enum! {
    Algorithm {
        Pso => "pso",
        PsoVmax => "pso_vmax",
        PsoLd => "pso_ld",
        Crips => "crips",
        RandUniform => "rand_uniform",
        RandPowerlaw => "rand_powerlaw",
    }
}

keyword_enum! {
    /// Scalar summary of swarm spread.
    MetricKind {
        VelocityNorm => "velocity_norm",
        CentroidDistance => "centroid_distance",
        InterparticleDistance => "interparticle_distance",
    }
}

keyword_enum! {
    /// Direction of the parameter feedback.
    ///
    /// `AsPrinted` applies `theta - eps * tanh(-dS / 2 sigma)`, which raises the
    /// parameters while the swarm expands. `Inverted` applies the opposite
    /// increment.
    FeedbackSign {
        AsPrinted => "as_printed",
        Inverted => "inverted",
    }
}

keyword_enum! {
    /// When personal and global bests are refreshed within an iteration.
    BestUpdate {
        Synchronous => "synchronous",
        Asynchronous => "asynchronous",
    }
}

pub const DEFAULT_EPSILON: f64 = 0.15;
pub const DEFAULT_VMAX: f64 = 50.0;
pub const DEFAULT_OMEGA_START: f64 = 0.7;
pub const DEFAULT_OMEGA_END: f64 = 0.4;
pub const LINEAR_DESCENT_ALPHA: f64 = 2.0;
pub const DEFAULT_GOAL_TOLERANCE: f64 = 0.001;
pub const DEFAULT_VELOCITY_INIT_FRACTION: f64 = 0.1;
pub const DEFAULT_POWERLAW_EXPONENT: f64 = 2.0;
pub const DEFAULT_POWERLAW_MIN_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub dimension: usize,
    pub particle_count: usize,
    pub max_iterations: u64,
    pub seed: u64,
    pub objective_name: String,
    pub objective_options: ObjectiveOptions,
    pub initial_params: PsoParams,
    pub epsilon: f64,
    pub metric: MetricKind,
    /// `None` means a fifth of the widest region axis.
    pub sigma: Option<f64>,
    pub vmax: Option<f64>,
    pub omega_start: Option<f64>,
    pub omega_end: Option<f64>,
    /// The run stops once the global best drops below this value.
    pub goal_tolerance: f64,
    /// Initial velocity components are uniform in `±fraction * width`.
    pub velocity_init_fraction: f64,
    pub feedback_sign: FeedbackSign,
    pub best_update: BestUpdate,
    pub powerlaw_exponent: f64,
    pub powerlaw_min_step: f64,
    /// `None` means the region diagonal.
    pub powerlaw_max_step: Option<f64>,
}

impl RunConfig {
    /// Defaults for `algorithm`: 20-D Schwefel, 25 particles, 50 000 iterations.
    pub fn new(algorithm: Algorithm) -> Self {
        let initial_params = match algorithm {
            Algorithm::PsoLd => PsoParams::new(
                DEFAULT_OMEGA_START,
                LINEAR_DESCENT_ALPHA,
                LINEAR_DESCENT_ALPHA,
            ),
            _ => PsoParams::CRIPS_DEFAULT,
        };
        Self {
            algorithm,
            dimension: 20,
            particle_count: 25,
            max_iterations: 50_000,
            seed: 0,
            objective_name: "schwefel".to_owned(),
            objective_options: ObjectiveOptions::default(),
            initial_params,
            epsilon: DEFAULT_EPSILON,
            metric: MetricKind::VelocityNorm,
            sigma: None,
            vmax: (algorithm == Algorithm::PsoVmax).then_some(DEFAULT_VMAX),
            omega_start: (algorithm == Algorithm::PsoLd).then_some(DEFAULT_OMEGA_START),
            omega_end: (algorithm == Algorithm::PsoLd).then_some(DEFAULT_OMEGA_END),
            goal_tolerance: DEFAULT_GOAL_TOLERANCE,
            velocity_init_fraction: DEFAULT_VELOCITY_INIT_FRACTION,
            feedback_sign: FeedbackSign::AsPrinted,
            best_update: BestUpdate::Synchronous,
            powerlaw_exponent: DEFAULT_POWERLAW_EXPONENT,
            powerlaw_min_step: DEFAULT_POWERLAW_MIN_STEP,
            powerlaw_max_step: None,
        }
    }

    pub fn objective(&self) -> Result<Objective> {
        build_objective(
            &self.objective_name,
            self.dimension,
            &self.objective_options,
        )
    }

    pub fn resolved_sigma(&self, objective: &Objective) -> f64 {
        self.sigma.unwrap_or_else(|| objective.max_width() / 5.0)
    }

    pub fn resolved_powerlaw_max_step(&self, objective: &Objective) -> f64 {
        self.powerlaw_max_step
            .unwrap_or_else(|| objective.diagonal())
    }

    /// Checks every field constraint and that the objective exists.
    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, value: f64) -> Result<()> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    key,
                    format!("must be finite and positive, got {value}"),
                ))
            }
        }

        if self.dimension == 0 {
            return Err(Error::config("dims", "must be positive"));
        }
        if self.particle_count == 0 {
            return Err(Error::config("particles", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("iterations", "must be positive"));
        }
        if !self.initial_params.is_finite() {
            return Err(Error::config("omega", "initial parameters must be finite"));
        }
        if self.algorithm == Algorithm::Crips && !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config(
                "epsilon",
                format!("must lie in (0, 1), got {}", self.epsilon),
            ));
        }
        if let Some(sigma) = self.sigma {
            positive("sigma", sigma)?;
        }
        if self.algorithm == Algorithm::PsoVmax {
            match self.vmax {
                Some(v) => positive("vmax", v)?,
                None => return Err(Error::config("vmax", "required for pso_vmax")),
            }
        }
        if self.algorithm == Algorithm::PsoLd {
            let (start, end) = match (self.omega_start, self.omega_end) {
                (Some(s), Some(e)) => (s, e),
                _ => return Err(Error::config("omega_start", "required for pso_ld")),
            };
            if !(start.is_finite() && end.is_finite() && start >= end) {
                return Err(Error::config(
                    "omega_end",
                    format!("linear descent needs omega_start >= omega_end, got {start} -> {end}"),
                ));
            }
        }
        if !self.goal_tolerance.is_finite() {
            return Err(Error::config("goal_tolerance", "must be finite"));
        }
        if !(self.velocity_init_fraction.is_finite() && self.velocity_init_fraction >= 0.0) {
            return Err(Error::config(
                "velocity_init_fraction",
                "must be finite and non-negative",
            ));
        }
        if !(self.powerlaw_exponent.is_finite() && self.powerlaw_exponent > 1.0) {
            return Err(Error::config("powerlaw_exponent", "must be finite and > 1"));
        }
        positive("powerlaw_min_step", self.powerlaw_min_step)?;
        let objective = self.objective()?;
        let max_step = self.resolved_powerlaw_max_step(&objective);
        if !(max_step.is_finite() && max_step > self.powerlaw_min_step) {
            return Err(Error::config(
                "powerlaw_max_step",
                "must be finite and exceed powerlaw_min_step",
            ));
        }
        Ok(())
    }
}
