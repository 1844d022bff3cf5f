use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carpe_core::sim::Scenario;
use carpe_core::{generate, EngineConfig, ScenarioConfig};
use carpe_harness::config::{load_engine_config, load_scenario_config};
use carpe_harness::damping::compare_damping;
use carpe_harness::run::write_decisions;
use carpe_harness::{
    emit_report, read_stream, run, sweep, write_stream, HarnessError, InitialBinding, OutputFormat, Result,
    RunMetrics, RunOutcome,
};
use clap::{Parser, Subcommand, ValueEnum};

/// Continuous adaptive person re-identification: simulate, run, evaluate.
#[derive(Debug, Parser)]
#[command(name = "carpe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Jsonl => OutputFormat::Jsonl,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a detection stream from a scenario config (lab-default when omitted).
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Stream file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Follow one person through a stream; writes decisions and metrics.jsonl into --out.
    Run {
        #[arg(long)]
        stream: PathBuf,
        /// Engine config; defaults sized to the stream when omitted.
        #[arg(long)]
        engine: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        person: usize,
        /// Track ID to bind on frame 0; defaults to the person's own.
        #[arg(long)]
        track_id: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// One run per person visible on frame 0; writes per-person decisions and metrics.jsonl into --out.
    Sweep {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        engine: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Damped versus plain-EMA threshold traces for one person.
    CompareDamping {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        engine: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        person: usize,
        /// Trace file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Aggregate metrics.jsonl files into report.csv, summary.txt and SVG plots.
    Report {
        #[arg(long = "metrics", required = true, num_args = 1..)]
        metrics: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Skip the SVG plots.
        #[arg(long)]
        no_plots: bool,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io { path: dir.into(), source: e })?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| HarnessError::Io { path: path.into(), source: e })
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| HarnessError::Io { path: path.into(), source: e })
}

fn open_stream(path: &Path) -> Result<Scenario> {
    let file = File::open(path).map_err(|e| HarnessError::Io { path: path.into(), source: e })?;
    read_stream(BufReader::new(file))
}

fn engine_config(path: Option<&Path>, scenario: &Scenario) -> Result<EngineConfig> {
    match path {
        Some(p) => load_engine_config(p),
        None => Ok(EngineConfig::with_dim(scenario.config.feature_dim)),
    }
}

fn write_metrics(path: &Path, outcomes: &[RunOutcome]) -> Result<()> {
    write_file(path, |w| {
        for o in outcomes {
            serde_json::to_writer(&mut *w, &o.metrics)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

fn read_metrics(path: &Path) -> Result<Vec<RunMetrics>> {
    let file = File::open(path).map_err(|e| HarnessError::Io { path: path.into(), source: e })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::Io { path: path.into(), source: e })?;
        if line.trim().is_empty() {
            continue;
        }
        let m = serde_json::from_str(&line)
            .map_err(|e| HarnessError::Validation(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(m);
    }
    Ok(out)
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { config, seed, out } => {
            let mut c = match config {
                Some(p) => load_scenario_config(&p)?,
                None => ScenarioConfig::lab_default(seed.unwrap_or(0)),
            };
            if let Some(s) = seed {
                c.seed = s;
            }
            let scenario = generate(&c)?;
            write_file(&out, |w| write_stream(&scenario, w))
        }
        Command::Run { stream, engine, person, track_id, out, format } => {
            let scenario = open_stream(&stream)?;
            let cfg = engine_config(engine.as_deref(), &scenario)?;
            let binding = match track_id {
                Some(track_id) => InitialBinding { person_id: person, track_id },
                None => InitialBinding::at_start(&scenario, person)?,
            };
            let outcome = run(&scenario, &cfg, binding)?;
            let dpath = out.join(format!("decisions.{}", format.ext()));
            write_file(&dpath, |w| write_decisions(&outcome.decisions, format.into(), w))?;
            write_metrics(&out.join("metrics.jsonl"), std::slice::from_ref(&outcome))
        }
        Command::Sweep { stream, engine, out, format } => {
            let scenario = open_stream(&stream)?;
            let cfg = engine_config(engine.as_deref(), &scenario)?;
            let outcomes = sweep(&scenario, &cfg)?;
            for o in &outcomes {
                let p = out.join(format!("decisions_person{}.{}", o.metrics.target_person, format.ext()));
                write_file(&p, |w| write_decisions(&o.decisions, format.into(), w))?;
            }
            write_metrics(&out.join("metrics.jsonl"), &outcomes)
        }
        Command::CompareDamping { stream, engine, person, out, format } => {
            let scenario = open_stream(&stream)?;
            let cfg = engine_config(engine.as_deref(), &scenario)?;
            let binding = InitialBinding::at_start(&scenario, person)?;
            let trace = compare_damping(&scenario, &cfg, binding)?;
            write_file(&out, |w| match format {
                Format::Csv => trace.write_csv(w),
                Format::Jsonl => trace.write_jsonl(w),
            })
        }
        Command::Report { metrics, out, no_plots } => {
            let mut all = Vec::new();
            for p in &metrics {
                all.extend(read_metrics(p)?);
            }
            emit_report(&all)?.write_to(&out, !no_plots)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("carpe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
