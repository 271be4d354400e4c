//! Batch experiments: configuration parsing, seeded repetitions and the
//! on-disk trace, event, histogram and summary files.
//!
//! Configuration is a flat `key = value` text format. Blank lines and lines
//! starting with `#` are ignored. List values are comma separated.
//!
//! ```text
//! algorithm = pso, crips
//! function  = schwefel
//! dims      = 20
//! runs      = 20
//! snapshot  = 1000
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    analyze_size_changes, summarize_runs, HistogramFit, ImprovementEvent, RunSummary, RunTrace,
    TraceRecord,
};
use crate::config::{Algorithm, BestUpdate, FeedbackSign, MetricKind, RunConfig};
use crate::error::{Error, Result};
use crate::runner::run;

/// Every key accepted in a configuration file or as a command-line override.
pub const KEYS: &[&str] = &[
    "algorithm",
    "function",
    "dims",
    "particles",
    "iterations",
    "runs",
    "seed",
    "epsilon",
    "metric",
    "sigma",
    "vmax",
    "out",
    "snapshot",
    "omega",
    "alpha1",
    "alpha2",
    "omega_start",
    "omega_end",
    "goal_tolerance",
    "velocity_init_fraction",
    "feedback_sign",
    "best_update",
    "shift",
    "griewank_penalty",
    "powerlaw_exponent",
    "powerlaw_min_step",
    "powerlaw_max_step",
    "histogram_bins",
    "histogram_low",
    "histogram_high",
];

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSettings {
    pub bins: usize,
    pub low: f64,
    pub high: f64,
}

impl Default for HistogramSettings {
    fn default() -> Self {
        Self {
            bins: 40,
            low: 1e-2,
            high: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// One configuration per algorithm; seeds are assigned per repetition.
    pub runs: Vec<RunConfig>,
    pub repetitions: u64,
    /// Repetition `r` runs with seed `base_seed + r`.
    pub base_seed: u64,
    pub output_directory: PathBuf,
    pub snapshot_iterations: Vec<u64>,
    pub histogram: HistogramSettings,
}

impl ExperimentSpec {
    /// Every (configuration, repetition) pair with its seed filled in.
    pub fn expanded_runs(&self) -> Vec<(u64, RunConfig)> {
        self.runs
            .iter()
            .flat_map(|c| {
                (0..self.repetitions).map(move |r| {
                    let mut config = c.clone();
                    config.seed = self.base_seed.wrapping_add(r);
                    (r, config)
                })
            })
            .collect()
    }

    /// Builds a validated experiment from `(key, value)` pairs. Later pairs win.
    pub fn from_entries<K: AsRef<str>, V: AsRef<str>>(entries: &[(K, V)]) -> Result<Self> {
        let mut map: Vec<(&str, &str)> = Vec::new();
        for (k, v) in entries {
            let (k, v) = (k.as_ref().trim(), v.as_ref().trim());
            if !KEYS.contains(&k) {
                return Err(Error::config(k, "unknown key"));
            }
            map.retain(|(existing, _)| *existing != k);
            map.push((k, v));
        }
        let get = |key: &str| map.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);

        let algorithms: Vec<Algorithm> = parse_list(
            "algorithm",
            get("algorithm").ok_or_else(|| Error::config("algorithm", "missing required key"))?,
        )?;
        if algorithms.is_empty() {
            return Err(Error::config("algorithm", "no algorithm given"));
        }

        let mut runs = Vec::with_capacity(algorithms.len());
        for algorithm in algorithms {
            let mut c = RunConfig::new(algorithm);
            if let Some(v) = get("function") {
                c.objective_name = v.to_ascii_lowercase();
            }
            set(&mut c.dimension, "dims", get("dims"))?;
            set(&mut c.particle_count, "particles", get("particles"))?;
            set(&mut c.max_iterations, "iterations", get("iterations"))?;
            set(&mut c.epsilon, "epsilon", get("epsilon"))?;
            set(&mut c.metric, "metric", get("metric"))?;
            set_opt(&mut c.sigma, "sigma", get("sigma"))?;
            set_opt(&mut c.vmax, "vmax", get("vmax"))?;
            set(&mut c.initial_params.omega, "omega", get("omega"))?;
            set(&mut c.initial_params.alpha1, "alpha1", get("alpha1"))?;
            set(&mut c.initial_params.alpha2, "alpha2", get("alpha2"))?;
            set_opt(&mut c.omega_start, "omega_start", get("omega_start"))?;
            set_opt(&mut c.omega_end, "omega_end", get("omega_end"))?;
            set(
                &mut c.goal_tolerance,
                "goal_tolerance",
                get("goal_tolerance"),
            )?;
            set(
                &mut c.velocity_init_fraction,
                "velocity_init_fraction",
                get("velocity_init_fraction"),
            )?;
            set::<FeedbackSign>(&mut c.feedback_sign, "feedback_sign", get("feedback_sign"))?;
            set::<BestUpdate>(&mut c.best_update, "best_update", get("best_update"))?;
            set(
                &mut c.objective_options.griewank_penalty,
                "griewank_penalty",
                get("griewank_penalty"),
            )?;
            if let Some(v) = get("shift") {
                c.objective_options.shift = Some(parse_list("shift", v)?);
            }
            set(
                &mut c.powerlaw_exponent,
                "powerlaw_exponent",
                get("powerlaw_exponent"),
            )?;
            set(
                &mut c.powerlaw_min_step,
                "powerlaw_min_step",
                get("powerlaw_min_step"),
            )?;
            set_opt(
                &mut c.powerlaw_max_step,
                "powerlaw_max_step",
                get("powerlaw_max_step"),
            )?;
            c.validate()?;
            runs.push(c);
        }

        let mut spec = ExperimentSpec {
            runs,
            repetitions: 20,
            base_seed: 0,
            output_directory: PathBuf::from("results"),
            snapshot_iterations: Vec::new(),
            histogram: HistogramSettings::default(),
        };
        set(&mut spec.repetitions, "runs", get("runs"))?;
        if spec.repetitions == 0 {
            return Err(Error::config("runs", "must be positive"));
        }
        set(&mut spec.base_seed, "seed", get("seed"))?;
        if let Some(v) = get("out") {
            if v.is_empty() {
                return Err(Error::config("out", "empty path"));
            }
            spec.output_directory = PathBuf::from(v);
        }
        if let Some(v) = get("snapshot") {
            spec.snapshot_iterations = parse_list("snapshot", v)?;
        }
        set(
            &mut spec.histogram.bins,
            "histogram_bins",
            get("histogram_bins"),
        )?;
        set(
            &mut spec.histogram.low,
            "histogram_low",
            get("histogram_low"),
        )?;
        set(
            &mut spec.histogram.high,
            "histogram_high",
            get("histogram_high"),
        )?;
        let h = spec.histogram;
        if h.bins == 0 {
            return Err(Error::config("histogram_bins", "must be positive"));
        }
        if !(h.low > 0.0 && h.high > h.low && h.high.is_finite()) {
            return Err(Error::config(
                "histogram_low",
                "need 0 < histogram_low < histogram_high",
            ));
        }
        Ok(spec)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn set<T: FromStr>(slot: &mut T, key: &str, value: Option<&str>) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = value {
        *slot = parse_value(key, v)?;
    }
    Ok(())
}

/// `none` clears an optional value.
fn set_opt<T: FromStr>(slot: &mut Option<T>, key: &str, value: Option<&str>) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    match value {
        Some(v) if v.eq_ignore_ascii_case("none") => *slot = None,
        Some(v) => *slot = Some(parse_value(key, v)?),
        None => {}
    }
    Ok(())
}

/// Splits configuration text into `(key, value)` pairs without interpreting them.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .map(|(n, line)| (n, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(n, line)| {
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::config(line, format!("line {} is not `key = value`", n + 1))
            })?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_owned()))
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    ExperimentSpec::from_entries(&parse_entries(text)?)
}

/// File stem shared by all outputs of one run.
pub fn run_stem(algorithm: Algorithm, repetition: u64) -> String {
    format!("{algorithm}_run{repetition:03}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_owned(),
            message: format!("{other:?}"),
        },
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_err(path, e)))
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub const TRACE_HEADER: [&str; 6] = [
    "iteration",
    "best_fitness",
    "metric",
    "omega",
    "alpha1",
    "alpha2",
];
pub const EVENTS_HEADER: [&str; 2] = ["iteration", "best_fitness"];

/// Writes `<stem>.csv`, `<stem>_events.csv` and `<stem>_config.json` into `dir`.
pub fn write_trace(dir: &Path, stem: &str, trace: &RunTrace) -> Result<()> {
    write_csv(
        &dir.join(format!("{stem}.csv")),
        &trace.records,
        &TRACE_HEADER,
    )?;
    write_csv(
        &dir.join(format!("{stem}_events.csv")),
        &trace.improvement_events,
        &EVENTS_HEADER,
    )?;
    write_json(&dir.join(format!("{stem}_config.json")), &trace.config)
}

pub fn read_trace(dir: &Path, stem: &str) -> Result<RunTrace> {
    let config: RunConfig = read_json(&dir.join(format!("{stem}_config.json")))?;
    let records: Vec<TraceRecord> = read_csv(&dir.join(format!("{stem}.csv")))?;
    let improvement_events: Vec<ImprovementEvent> =
        read_csv(&dir.join(format!("{stem}_events.csv")))?;
    Ok(RunTrace {
        config,
        records,
        improvement_events,
    })
}

/// Reads a bare trace CSV. The config is a default one carrying `metric`.
pub fn read_trace_csv(path: &Path, metric: MetricKind) -> Result<RunTrace> {
    let records: Vec<TraceRecord> = read_csv(path)?;
    let mut trace = RunTrace {
        config: RunConfig {
            metric,
            ..RunConfig::new(Algorithm::Crips)
        },
        records,
        improvement_events: Vec::new(),
    };
    trace.improvement_events = crate::analysis::extract_improvement_events(&trace);
    Ok(trace)
}

/// Every trace in `dir`, ordered by file stem.
pub fn load_traces(dir: &Path) -> Result<Vec<RunTrace>> {
    let mut stems: Vec<String> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|entry| entry.ok())
        .filter_map(|entry| {
            entry
                .file_name()
                .to_str()
                .and_then(|n| n.strip_suffix("_config.json"))
                .map(str::to_owned)
        })
        .collect();
    stems.sort();
    stems.iter().map(|s| read_trace(dir, s)).collect()
}

pub fn read_summary(dir: &Path) -> Result<RunSummary> {
    read_json(&dir.join(SUMMARY_FILE))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub traces: Vec<RunTrace>,
    pub summary: RunSummary,
    /// Histograms for centroid-distance runs, keyed by file stem.
    pub histograms: Vec<(String, HistogramFit)>,
}

/// Runs every repetition of every configured algorithm and persists the
/// results. Repetitions run in parallel; file contents depend only on the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let dir = &spec.output_directory;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let results: Vec<(RunTrace, Option<(String, HistogramFit)>)> = spec
        .expanded_runs()
        .into_par_iter()
        .map(|(repetition, config)| {
            let trace = run(&config)?;
            let stem = run_stem(config.algorithm, repetition);
            write_trace(dir, &stem, &trace)?;
            let histogram =
                if config.metric == MetricKind::CentroidDistance && trace.records.len() >= 2 {
                    let h = spec.histogram;
                    let hist = analyze_size_changes(&trace, h.bins, h.low, h.high)?;
                    write_json(&dir.join(format!("{stem}_histogram.json")), &hist)?;
                    Some((stem, hist))
                } else {
                    None
                };
            Ok((trace, histogram))
        })
        .collect::<Result<_>>()?;
    let (traces, histograms): (Vec<RunTrace>, Vec<_>) = results.into_iter().unzip();
    let summary = summarize_runs(&traces, &spec.snapshot_iterations)?;
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    Ok(ExperimentOutcome {
        traces,
        summary,
        histograms: histograms.into_iter().flatten().collect(),
    })
}
