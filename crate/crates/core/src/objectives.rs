//! Benchmark objectives with a region of interest and a constant penalty
//! outside it, so particles can roam without boundary handling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHWEFEL_CONSTANT: f64 = 418.9829;
pub const SCHWEFEL_OPTIMUM: f64 = 420.9687;
pub const SCHWEFEL_HALF_WIDTH: f64 = 500.0;
/// Per-dimension fitness outside the Schwefel box.
pub const SCHWEFEL_PENALTY: f64 = 500.0;

pub const GRIEWANK_HALF_WIDTH: f64 = 600.0;
pub const GRIEWANK_PENALTY: f64 = 700.0;
pub const DEFAULT_GRIEWANK_SHIFT: f64 = 60.0;

/// Names accepted by [`lookup_objective`].
pub const REGISTRY: [&str; 3] = ["schwefel", "griewank", "shifted_griewank"];

fn in_box(x: &[f64], low: f64, high: f64) -> bool {
    x.iter().all(|&xi| (low..=high).contains(&xi))
}

/// Schwefel function on `[-500, 500]^N`, `500 N` outside.
pub fn schwefel(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if !in_box(x, -SCHWEFEL_HALF_WIDTH, SCHWEFEL_HALF_WIDTH) {
        return SCHWEFEL_PENALTY * n;
    }
    SCHWEFEL_CONSTANT * n - x.iter().map(|&xi| xi * xi.abs().sqrt().sin()).sum::<f64>()
}

fn griewank_core(x: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        sum += xi * xi / 4000.0;
        prod *= (xi / ((i + 1) as f64).sqrt()).cos();
    }
    1.0 + sum - prod
}

/// Griewank function on `[-600, 600]^N`, `700 N` outside.
pub fn griewank(x: &[f64]) -> f64 {
    griewank_with_penalty(x, GRIEWANK_PENALTY)
}

fn griewank_with_penalty(x: &[f64], penalty: f64) -> f64 {
    if !in_box(x, -GRIEWANK_HALF_WIDTH, GRIEWANK_HALF_WIDTH) {
        return penalty * x.len() as f64;
    }
    griewank_core(x)
}

/// Griewank translated so its optimum sits at `shift`; the penalty box moves with it.
pub fn shifted_griewank(x: &[f64], shift: &[f64]) -> Result<f64> {
    if x.len() != shift.len() {
        return Err(Error::Argument(format!(
            "shift has {} components, point has {}",
            shift.len(),
            x.len()
        )));
    }
    let moved: Vec<f64> = x.iter().zip(shift).map(|(a, s)| a - s).collect();
    Ok(griewank(&moved))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObjectiveKind {
    Schwefel,
    Griewank,
    ShiftedGriewank { shift: Vec<f64> },
}

/// Tunables that the registry otherwise fills with defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveOptions {
    /// Per-dimension penalty for both Griewank variants.
    pub griewank_penalty: f64,
    /// Optimum location for `shifted_griewank`. `None` puts it at 60 in every dimension.
    pub shift: Option<Vec<f64>>,
}

impl Default for ObjectiveOptions {
    fn default() -> Self {
        Self {
            griewank_penalty: GRIEWANK_PENALTY,
            shift: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub name: String,
    pub dimension: usize,
    pub region_low: Vec<f64>,
    pub region_high: Vec<f64>,
    pub kind: ObjectiveKind,
    /// Per-dimension out-of-region fitness.
    pub penalty: f64,
    pub known_optimum_position: Option<Vec<f64>>,
    pub known_optimum_value: Option<f64>,
}

impl Objective {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        match &self.kind {
            ObjectiveKind::Schwefel => schwefel(x),
            ObjectiveKind::Griewank => griewank_with_penalty(x, self.penalty),
            ObjectiveKind::ShiftedGriewank { shift } => {
                let moved: Vec<f64> = x.iter().zip(shift).map(|(a, s)| a - s).collect();
                griewank_with_penalty(&moved, self.penalty)
            }
        }
    }

    pub fn in_region(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.region_low.iter().zip(&self.region_high))
            .all(|(&xi, (&lo, &hi))| (lo..=hi).contains(&xi))
    }

    /// Largest extent of the region along a single axis.
    pub fn max_width(&self) -> f64 {
        self.region_low
            .iter()
            .zip(&self.region_high)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }

    /// Length of the region's main diagonal.
    pub fn diagonal(&self) -> f64 {
        self.region_low
            .iter()
            .zip(&self.region_high)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn lookup_objective(name: &str, dimension: usize) -> Result<Objective> {
    build_objective(name, dimension, &ObjectiveOptions::default())
}

pub fn build_objective(
    name: &str,
    dimension: usize,
    options: &ObjectiveOptions,
) -> Result<Objective> {
    if dimension == 0 {
        return Err(Error::config("dims", "dimension must be positive"));
    }
    let uniform = |v: f64| vec![v; dimension];
    let objective = match name {
        "schwefel" => {
            let optimum = uniform(SCHWEFEL_OPTIMUM);
            let value = schwefel(&optimum);
            Objective {
                name: name.to_owned(),
                dimension,
                region_low: uniform(-SCHWEFEL_HALF_WIDTH),
                region_high: uniform(SCHWEFEL_HALF_WIDTH),
                kind: ObjectiveKind::Schwefel,
                penalty: SCHWEFEL_PENALTY,
                known_optimum_position: Some(optimum),
                known_optimum_value: Some(value),
            }
        }
        "griewank" => Objective {
            name: name.to_owned(),
            dimension,
            region_low: uniform(-GRIEWANK_HALF_WIDTH),
            region_high: uniform(GRIEWANK_HALF_WIDTH),
            kind: ObjectiveKind::Griewank,
            penalty: options.griewank_penalty,
            known_optimum_position: Some(uniform(0.0)),
            known_optimum_value: Some(0.0),
        },
        "shifted_griewank" => {
            let shift = match &options.shift {
                Some(s) if s.len() == dimension => s.clone(),
                Some(s) if s.len() == 1 => uniform(s[0]),
                Some(s) => {
                    return Err(Error::config(
                        "shift",
                        format!("expected 1 or {dimension} components, got {}", s.len()),
                    ))
                }
                None => uniform(DEFAULT_GRIEWANK_SHIFT),
            };
            if shift.iter().any(|s| !s.is_finite()) {
                return Err(Error::config("shift", "components must be finite"));
            }
            Objective {
                name: name.to_owned(),
                dimension,
                region_low: shift.iter().map(|s| s - GRIEWANK_HALF_WIDTH).collect(),
                region_high: shift.iter().map(|s| s + GRIEWANK_HALF_WIDTH).collect(),
                known_optimum_position: Some(shift.clone()),
                known_optimum_value: Some(0.0),
                kind: ObjectiveKind::ShiftedGriewank { shift },
                penalty: options.griewank_penalty,
            }
        }
        other => {
            return Err(Error::config(
                "function",
                format!("unknown objective `{other}` (expected one of {REGISTRY:?})"),
            ))
        }
    };
    if !(objective.penalty.is_finite() && objective.penalty > 0.0) {
        return Err(Error::config(
            "griewank_penalty",
            "must be finite and positive",
        ));
    }
    Ok(objective)
}
