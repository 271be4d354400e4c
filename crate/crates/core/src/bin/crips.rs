use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crips_core::analysis::analyze_size_changes;
use crips_core::experiment::{
    parse_entries, read_trace_csv, run_experiment, ExperimentSpec, HistogramSettings,
};
use crips_core::{Error, MetricKind};

/// Critical particle swarm experiments.
///
/// Options mirror the configuration file keys; command-line values win over
/// the file. Exit status: 0 success, 2 configuration error, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "crips", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated: pso, pso_vmax, pso_ld, crips, rand_uniform, rand_powerlaw.
    #[arg(long)]
    algorithm: Option<String>,
    /// schwefel, griewank or shifted_griewank.
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    particles: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    /// Repetitions per algorithm.
    #[arg(long)]
    runs: Option<String>,
    /// Base seed; repetition r uses seed + r.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// velocity_norm, centroid_distance or interparticle_distance.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    vmax: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Comma-separated iterations at which the summary records the global best.
    #[arg(long)]
    snapshot: Option<String>,
    /// Any other configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    extra: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Histogram and power-law fit of swarm-size changes in a trace CSV
    /// recorded with the centroid_distance metric. Prints JSON.
    Analyze {
        trace: PathBuf,
        #[arg(long, default_value_t = HistogramSettings::default().bins)]
        bins: usize,
        #[arg(long, default_value_t = HistogramSettings::default().low)]
        low: f64,
        #[arg(long, default_value_t = HistogramSettings::default().high)]
        high: f64,
    },
}

impl Cli {
    fn entries(&self) -> Result<Vec<(String, String)>, Error> {
        let mut entries = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                parse_entries(&text)?
            }
            None => Vec::new(),
        };
        let flags = [
            ("algorithm", &self.algorithm),
            ("function", &self.function),
            ("dims", &self.dims),
            ("particles", &self.particles),
            ("iterations", &self.iterations),
            ("runs", &self.runs),
            ("seed", &self.seed),
            ("epsilon", &self.epsilon),
            ("metric", &self.metric),
            ("sigma", &self.sigma),
            ("vmax", &self.vmax),
            ("out", &self.out),
            ("snapshot", &self.snapshot),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                entries.push((key.to_owned(), v.clone()));
            }
        }
        for kv in &self.extra {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
                key: kv.clone(),
                message: "expected KEY=VALUE".into(),
            })?;
            entries.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        Ok(entries)
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(Command::Analyze {
        trace,
        bins,
        low,
        high,
    }) = &cli.command
    {
        let trace = read_trace_csv(trace, MetricKind::CentroidDistance)?;
        let hist = analyze_size_changes(&trace, *bins, *low, *high)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&hist).expect("histogram serialises")
        );
        return Ok(());
    }
    let spec = ExperimentSpec::from_entries(&cli.entries()?)?;
    let outcome = run_experiment(&spec)?;
    for a in &outcome.summary.algorithms {
        let q = a.final_best;
        println!(
            "{:<14} runs={:<3} final best: min={:.6} median={:.6} max={:.6} events={} diverged={}",
            a.algorithm.as_str(),
            a.runs,
            q.min,
            q.median,
            q.max,
            a.improvement_events,
            a.diverged_runs
        );
        for s in &a.snapshots {
            println!("{:<14} @{:<8} median={:.6}", "", s.iteration, s.best.median);
        }
    }
    println!("wrote {}", spec.output_directory.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
