//! Run traces, improvement events, swarm-size change statistics and
//! power-law fits on log-binned histograms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, MetricKind, RunConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub best_fitness: f64,
    pub metric: f64,
    pub omega: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovementEvent {
    pub iteration: u64,
    pub best_fitness: f64,
}

/// Everything recorded about one run: one record per completed iteration,
/// starting at iteration 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: RunConfig,
    pub records: Vec<TraceRecord>,
    pub improvement_events: Vec<ImprovementEvent>,
}

impl RunTrace {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn algorithm(&self) -> Algorithm {
        self.config.algorithm
    }

    pub fn metric(&self) -> MetricKind {
        self.config.metric
    }

    pub fn final_best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best_fitness)
    }

    /// Global best after `iteration`, or the final value if the run stopped earlier.
    pub fn best_at(&self, iteration: u64) -> Option<f64> {
        self.records
            .iter()
            .take_while(|r| r.iteration <= iteration)
            .last()
            .or(self.records.last())
            .map(|r| r.best_fitness)
    }

    /// True when the run ended before its budget without reaching the goal,
    /// which only happens when a swarm update overflowed.
    pub fn diverged(&self) -> bool {
        match self.records.last() {
            Some(r) => {
                r.iteration < self.config.max_iterations
                    && (r.best_fitness >= self.config.goal_tolerance || r.best_fitness.is_nan())
            }
            None => self.config.max_iterations > 0,
        }
    }

    /// Improvement events at or after `iteration`.
    pub fn events_from(&self, iteration: u64) -> usize {
        self.improvement_events
            .iter()
            .filter(|e| e.iteration >= iteration)
            .count()
    }
}

/// One event per strict decrease of the recorded global best. The first
/// record has no predecessor and never counts.
pub fn extract_improvement_events(trace: &RunTrace) -> Vec<ImprovementEvent> {
    trace
        .records
        .windows(2)
        .filter(|w| w[1].best_fitness < w[0].best_fitness)
        .map(|w| ImprovementEvent {
            iteration: w[1].iteration,
            best_fitness: w[1].best_fitness,
        })
        .collect()
}

/// Absolute iteration-to-iteration changes of the mean centroid distance.
pub fn size_change_series(trace: &RunTrace) -> Result<Vec<f64>> {
    if trace.metric() != MetricKind::CentroidDistance {
        return Err(Error::Analysis(format!(
            "swarm-size changes need a centroid_distance trace, this one recorded {}",
            trace.metric()
        )));
    }
    if trace.records.len() < 2 {
        return Err(Error::Analysis("need at least two records".into()));
    }
    Ok(trace
        .records
        .windows(2)
        .map(|w| (w[1].metric - w[0].metric).abs())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Log-log slope; negative for a decaying law.
    pub exponent: f64,
    pub prefactor: f64,
    pub fit_range: (f64, f64),
    /// Bins used in the regression.
    pub points: usize,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramFit {
    /// `bins + 1` geometrically spaced edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values above the last edge.
    pub overshoot_count: u64,
    /// Values below the first edge, zeros included.
    pub discard_count: u64,
    pub fit: Option<PowerLawFit>,
}

impl HistogramFit {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Geometric centre of bin `i`.
    pub fn center(&self, i: usize) -> f64 {
        (self.bin_edges[i] * self.bin_edges[i + 1]).sqrt()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    /// Counts per unit of the binned quantity.
    pub fn density(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.width(i)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overshoot_count + self.discard_count
    }

    /// Range between the centres of the second and the second-to-last
    /// nonempty bins.
    pub fn default_fit_range(&self) -> Option<(f64, f64)> {
        let nonempty: Vec<usize> = (0..self.bins()).filter(|&i| self.counts[i] > 0).collect();
        if nonempty.len() < 3 {
            return None;
        }
        Some((
            self.center(nonempty[1]),
            self.center(nonempty[nonempty.len() - 2]),
        ))
    }

    /// Total count of the bins reaching into the top decade below the upper edge.
    pub fn top_decade_count(&self) -> u64 {
        let high = *self.bin_edges.last().unwrap_or(&0.0);
        (0..self.bins())
            .filter(|&i| self.bin_edges[i + 1] > high / 10.0)
            .map(|i| self.counts[i])
            .sum()
    }
}

/// Histogram with `bins` geometric bins on `[low, high]`.
pub fn log_binned_histogram(
    values: &[f64],
    bins: usize,
    low: f64,
    high: f64,
) -> Result<HistogramFit> {
    if !(low > 0.0 && low.is_finite()) {
        return Err(Error::Argument(format!(
            "log bins need a positive lower edge, got {low}"
        )));
    }
    if !(high > low && high.is_finite()) {
        return Err(Error::Argument(format!(
            "upper edge {high} must exceed lower edge {low}"
        )));
    }
    if bins == 0 {
        return Err(Error::Argument("need at least one bin".into()));
    }
    let ratio = (high / low).ln();
    let mut bin_edges: Vec<f64> = (0..=bins)
        .map(|k| low * (ratio * k as f64 / bins as f64).exp())
        .collect();
    bin_edges[0] = low;
    bin_edges[bins] = high;

    let mut counts = vec![0u64; bins];
    let mut overshoot_count = 0;
    let mut discard_count = 0;
    for &v in values {
        if v.is_nan() || v < low {
            discard_count += 1;
        } else if v > high {
            overshoot_count += 1;
        } else {
            let mut i = (((v / low).ln() / ratio) * bins as f64).floor() as usize;
            i = i.min(bins - 1);
            // correct for rounding in the logarithm
            while i > 0 && v < bin_edges[i] {
                i -= 1;
            }
            while i + 1 < bins && v >= bin_edges[i + 1] {
                i += 1;
            }
            counts[i] += 1;
        }
    }
    Ok(HistogramFit {
        bin_edges,
        counts,
        overshoot_count,
        discard_count,
        fit: None,
    })
}

/// Ordinary least squares `y = slope x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

/// Least-squares line through `(ln centre, ln density)` of the nonempty bins
/// whose centres lie in `fit_range`.
pub fn fit_powerlaw(hist: &HistogramFit, fit_range: (f64, f64)) -> Result<PowerLawFit> {
    let (lo, hi) = fit_range;
    // relative slack so range ends taken from bin centres are included
    let tol = 1e-9;
    let points: Vec<(f64, f64)> = (0..hist.bins())
        .filter(|&i| hist.counts[i] > 0)
        .filter(|&i| {
            let c = hist.center(i);
            c >= lo * (1.0 - tol) && c <= hi * (1.0 + tol)
        })
        .map(|i| (hist.center(i).ln(), hist.density(i).ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "{} nonempty bins in [{lo}, {hi}], need at least 3",
            points.len()
        )));
    }
    let (slope, intercept, residual) = least_squares(&points)?;
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        fit_range,
        points: points.len(),
        residual,
    })
}

/// Histogram of swarm-size changes with a fit over the default range when
/// enough bins are populated.
pub fn analyze_size_changes(
    trace: &RunTrace,
    bins: usize,
    low: f64,
    high: f64,
) -> Result<HistogramFit> {
    let series = size_change_series(trace)?;
    let mut hist = log_binned_histogram(&series, bins, low, high)?;
    hist.fit = hist
        .default_fit_range()
        .and_then(|range| fit_powerlaw(&hist, range).ok());
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear-interpolation quantiles of a non-empty sample.
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("quantiles of an empty sample".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (sorted.len() - 1) as f64;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if i + 1 < sorted.len() {
                sorted[i] + frac * (sorted[i + 1] - sorted[i])
            } else {
                sorted[i]
            }
        };
        Ok(Self {
            min: sorted[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub iteration: u64,
    pub best: Quantiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub final_best: Quantiles,
    pub snapshots: Vec<SnapshotSummary>,
    pub improvement_events: usize,
    pub diverged_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithms: Vec<AlgorithmSummary>,
}

impl RunSummary {
    pub fn get(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }
}

/// Per-algorithm statistics of the final global best and of the global best
/// at each snapshot iteration.
pub fn summarize_runs(traces: &[RunTrace], snapshot_iterations: &[u64]) -> Result<RunSummary> {
    if traces.is_empty() {
        return Err(Error::Argument("no traces to summarise".into()));
    }
    let mut groups: BTreeMap<Algorithm, Vec<&RunTrace>> = BTreeMap::new();
    for t in traces {
        groups.entry(t.algorithm()).or_default().push(t);
    }
    let algorithms = groups
        .into_iter()
        .map(|(algorithm, group)| {
            let finals: Vec<f64> = group.iter().filter_map(|t| t.final_best()).collect();
            let snapshots = snapshot_iterations
                .iter()
                .map(|&iteration| {
                    let values: Vec<f64> =
                        group.iter().filter_map(|t| t.best_at(iteration)).collect();
                    Ok(SnapshotSummary {
                        iteration,
                        best: Quantiles::of(&values)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AlgorithmSummary {
                algorithm,
                runs: group.len(),
                final_best: Quantiles::of(&finals)?,
                snapshots,
                improvement_events: group.iter().map(|t| t.improvement_events.len()).sum(),
                diverged_runs: group.iter().filter(|t| t.diverged()).count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunSummary { algorithms })
}
