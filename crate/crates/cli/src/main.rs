//! `psra` command-line driver.
//!
//! Every subcommand prints a JSON document to stdout on success. Failures
//! print `{"error": <kind>, "message": <text>}` to stderr and exit nonzero.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use psra::analytics::{rebin, DistanceReport};
use psra::experiments::{
    replication_arrivals, run_covariance_check, run_model_grid, run_poisson_limit, run_robustness, run_single,
    CovarianceCheckConfig, ExperimentConfig, PoissonLimitConfig, RobustnessConfig,
};
use psra::ingestion::{
    filter_records, parse_flights, queue_time_distribution, queue_times, validate_windows, write_queue_times,
    DailyWindow, HEATHROW_ENTRY_POINTS, HEATHROW_SERVICE_MINUTES,
};
use psra::EmpiricalDistribution;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "psra",
    version,
    about = "Pre-scheduled random arrivals: queue experiments and data reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; without it the result is printed to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one model and write its trace, arrivals and distributions
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Model name from the configuration (default: the first model)
        #[arg(long)]
        model: Option<String>,
        /// Wait histogram bin width in service times
        #[arg(long)]
        bin_width: Option<f64>,
    },
    /// Simulate the model grid, optionally scoring each model against a reference
    Grid {
        #[command(flatten)]
        common: Common,
        /// Reference distribution (JSON or CSV) on the configured bin grid
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Wait histogram bin width in service times
        #[arg(long)]
        bin_width: Option<f64>,
    },
    /// Compare wait distributions across delay families at a fixed spread
    Robustness {
        #[command(flatten)]
        common: Common,
        /// Wait histogram bin width in service times
        #[arg(long)]
        bin_width: Option<f64>,
    },
    /// Distance of the slot-count law from Poisson along a spread ladder
    PoissonLimit {
        #[command(flatten)]
        common: Common,
    },
    /// Analytic against simulated slot covariance
    Covariance {
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a flight CSV to queue times and their distribution
    Ingest {
        /// CSV with columns flight_id,entry_point,entry_epoch,landing_epoch
        input: PathBuf,
        /// TOML with windows, entry_points, service_minutes, bin_width
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; without it the queue times are printed to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bin width in service times
        #[arg(long)]
        bin_width: Option<f64>,
    },
    /// Distances between two distribution files
    Compare {
        /// Model distribution (JSON or CSV)
        model: PathBuf,
        /// Reference distribution (JSON or CSV)
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Coarsen both distributions to this uniform width first
        #[arg(long)]
        bin_width: Option<f64>,
    },
}

struct Failure {
    kind: String,
    message: String,
}

impl From<psra::Error> for Failure {
    fn from(e: psra::Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            kind: kind.into(),
            message: message.into(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Ingestion settings; every field may be omitted.
#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct IngestConfig {
    windows: Vec<String>,
    entry_points: Vec<String>,
    service_minutes: f64,
    bin_width: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            windows: vec!["06:00-10:30".into(), "16:00-20:00".into()],
            entry_points: HEATHROW_ENTRY_POINTS.iter().map(|s| s.to_string()).collect(),
            service_minutes: HEATHROW_SERVICE_MINUTES,
            bin_width: 1.0,
        }
    }
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new("io", format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::new("config", format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| psra::Error::io(dir, e).into())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(psra::Error::from)?;
    fs::write(path, text + "\n").map_err(|e| psra::Error::io(path, e).into())
}

fn written(out: &Path) -> CliResult<Value> {
    let mut files: Vec<String> = fs::read_dir(out)
        .map_err(|e| psra::Error::io(out, e))?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.sort();
    Ok(json!({ "out": out, "files": files }))
}

fn experiment_config(common: &Common, bin_width: Option<f64>) -> CliResult<ExperimentConfig> {
    let mut cfg: ExperimentConfig = load_config(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(w) = bin_width {
        cfg.bin_width = w;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    Ok(cfg)
}

fn simulate(common: &Common, model: Option<&str>, bin_width: Option<f64>) -> CliResult<Value> {
    let cfg = experiment_config(common, bin_width)?;
    let spec = match model {
        Some(name) => cfg.models.iter().find(|m| m.name == name).ok_or_else(|| {
            Failure::new(
                "invalid_parameter",
                format!("no model named `{name}` in the configuration"),
            )
        })?,
        None => cfg
            .models
            .first()
            .ok_or_else(|| Failure::new("invalid_parameter", "the configuration lists no models"))?,
    };
    let (result, trace) = run_single(&cfg, spec)?;
    let summary = json!({ "config": cfg, "settings": cfg.settings(), "result": result });
    let Some(out) = cfg.output_dir.as_deref() else {
        return Ok(summary);
    };
    create_dir(out)?;
    replication_arrivals(&cfg, spec, 0)?.save_csv(&out.join("arrivals.csv"))?;
    trace.save_csv(&out.join("trace.csv"))?;
    result.wait_distribution.save_csv(&out.join("wait.csv"))?;
    result.wait_distribution.save_json(&out.join("wait.json"))?;
    result
        .queue_length_distribution
        .save_csv(&out.join("queue_length.csv"))?;
    write_json(&out.join("summary.json"), &summary)?;
    written(out)
}

fn grid(common: &Common, reference: Option<&Path>, bin_width: Option<f64>) -> CliResult<Value> {
    let cfg = experiment_config(common, bin_width)?;
    let reference = reference.map(EmpiricalDistribution::load).transpose()?;
    let result = run_model_grid(&cfg, reference.as_ref())?;
    match cfg.output_dir.as_deref() {
        Some(out) => {
            result.write(out)?;
            written(out)
        }
        None => Ok(serde_json::to_value(&result).map_err(psra::Error::from)?),
    }
}

fn robustness(common: &Common, bin_width: Option<f64>) -> CliResult<Value> {
    let mut cfg: RobustnessConfig = load_config(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(w) = bin_width {
        cfg.bin_width = w;
    }
    let result = run_robustness(&cfg)?;
    match common.out.as_deref() {
        Some(out) => {
            result.write(out)?;
            written(out)
        }
        None => Ok(serde_json::to_value(&result).map_err(psra::Error::from)?),
    }
}

fn poisson_limit(common: &Common) -> CliResult<Value> {
    let mut cfg: PoissonLimitConfig = load_config(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    let result = run_poisson_limit(&cfg)?;
    match common.out.as_deref() {
        Some(out) => {
            result.write(out)?;
            written(out)
        }
        None => Ok(serde_json::to_value(&result).map_err(psra::Error::from)?),
    }
}

fn covariance(common: &Common) -> CliResult<Value> {
    let mut cfg: CovarianceCheckConfig = load_config(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    let result = run_covariance_check(&cfg)?;
    match common.out.as_deref() {
        Some(out) => {
            result.write(out)?;
            written(out)
        }
        None => Ok(serde_json::to_value(&result).map_err(psra::Error::from)?),
    }
}

fn ingest(input: &Path, config: Option<&Path>, out: Option<&Path>, bin_width: Option<f64>) -> CliResult<Value> {
    let mut cfg: IngestConfig = load_config(config)?;
    if let Some(w) = bin_width {
        cfg.bin_width = w;
    }
    let windows: Vec<DailyWindow> = cfg
        .windows
        .iter()
        .map(|w| DailyWindow::parse(w))
        .collect::<psra::Result<_>>()?;
    validate_windows(&windows)?;

    let parsed = parse_flights(input)?;
    for e in &parsed.errors {
        eprintln!(
            "{}",
            json!({ "warning": "skipped_row", "line": e.line, "message": e.message })
        );
    }
    let kept = filter_records(&parsed.records, &windows, &cfg.entry_points);
    let samples = queue_times(&kept);
    let summary = json!({
        "input": input,
        "rows": parsed.records.len() + parsed.errors.len(),
        "parsed": parsed.records.len(),
        "skipped": parsed.errors,
        "retained": kept.len(),
        "windows": cfg.windows,
        "entry_points": cfg.entry_points,
        "service_minutes": cfg.service_minutes,
        "bin_width": cfg.bin_width,
    });
    let Some(out) = out else {
        let stdout = std::io::stdout();
        write_queue_times(&samples, stdout.lock())?;
        return Ok(Value::Null);
    };
    create_dir(out)?;
    let path = out.join("queue_times.csv");
    let file = fs::File::create(&path).map_err(|e| psra::Error::io(&path, e))?;
    write_queue_times(&samples, std::io::BufWriter::new(file))?;
    if !samples.is_empty() {
        let dist = queue_time_distribution(&samples, cfg.service_minutes, cfg.bin_width)?;
        dist.save_csv(&out.join("queue_time_distribution.csv"))?;
        dist.save_json(&out.join("queue_time_distribution.json"))?;
    }
    write_json(&out.join("ingest.json"), &summary)?;
    written(out)
}

/// Uniform grid of width `w` from 0 covering `d`.
fn coarsen(d: &EmpiricalDistribution, w: f64) -> CliResult<EmpiricalDistribution> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Failure::new(
            "invalid_parameter",
            format!("bin_width must be > 0, got {w}"),
        ));
    }
    let last = *d.bin_edges().last().expect("at least two edges");
    let bins = (last / w - 1e-9).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=bins).map(|k| k as f64 * w).collect();
    Ok(rebin(d, &edges)?)
}

fn compare(model: &Path, reference: &Path, out: Option<&Path>, bin_width: Option<f64>) -> CliResult<Value> {
    let mut p = EmpiricalDistribution::load(model)?;
    let mut q = EmpiricalDistribution::load(reference)?;
    if let Some(w) = bin_width {
        p = coarsen(&p, w)?;
        q = coarsen(&q, w)?;
    }
    let name = model
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = DistanceReport::compare(name, &p, &q)?;
    if let Some(out) = out {
        create_dir(out)?;
        write_json(&out.join("distance.json"), &report)?;
    }
    Ok(serde_json::to_value(&report).map_err(psra::Error::from)?)
}

fn run(cli: Cli) -> CliResult<Value> {
    match &cli.command {
        Command::Simulate {
            common,
            model,
            bin_width,
        } => simulate(common, model.as_deref(), *bin_width),
        Command::Grid {
            common,
            reference,
            bin_width,
        } => grid(common, reference.as_deref(), *bin_width),
        Command::Robustness { common, bin_width } => robustness(common, *bin_width),
        Command::PoissonLimit { common } => poisson_limit(common),
        Command::Covariance { common } => covariance(common),
        Command::Ingest {
            input,
            config,
            out,
            bin_width,
        } => ingest(input, config.as_deref(), out.as_deref(), *bin_width),
        Command::Compare {
            model,
            reference,
            out,
            bin_width,
        } => compare(model, reference, out.as_deref(), *bin_width),
    }
}

fn fail(f: Failure, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            return fail(Failure::new("usage", text.trim().trim_start_matches("error: ")), 2);
        }
    };
    match run(cli) {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            // a closed pipe downstream is not a failure of the run
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(f) => fail(f, 1),
    }
}
