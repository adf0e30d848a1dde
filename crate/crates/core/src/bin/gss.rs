use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gss::graph::Graph;
use gss::harness::commands::{self, Overrides, SearchConfig, StationaryConfig};
use gss::harness::config::GraphSpec;
use gss::harness::{ExperimentConfig, RunReport};
use gss::{Error, Result};

#[derive(Parser)]
#[command(name = "gss", version, about = "Graph spatial sampling with lagged Metropolis-Hastings walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo replicates; overrides the config.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and iterated stationary node laws of a walk.
    Stationary {
        /// 1-based edge-list file (instead of --config).
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
        /// Comma-separated preference weights, normalized.
        #[arg(long, value_delimiter = ',')]
        u: Option<Vec<f64>>,
        /// Preference u_h ∝ 1/(d_h + r).
        #[arg(long)]
        calibrate: bool,
    },
    /// Runs an experiment configuration and writes the report CSV.
    Simulate,
    /// Runs a bundled table configuration and checks its targets.
    Reproduce {
        #[arg(value_parser = ["t1", "t2"])]
        table: String,
    },
    /// Searches candidate cycles for the smallest design measure.
    DesignSearch,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn usage(message: &str) -> Error {
    Error::Config { path: "arguments".into(), message: message.into() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { path: path.display().to_string(), message: e.to_string() })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Config { path: e.path().to_string(), message: e.inner().to_string() })
}

fn write_report(report: &RunReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => report.write_csv(BufWriter::new(File::create(p)?)),
        None => report.write_csv(io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let overrides = Overrides { seed: cli.seed, reps: cli.reps, out: cli.out.clone() };
    match cli.command {
        Command::Stationary { graph, r, w, u, calibrate } => {
            let cfg = match (&cli.config, graph) {
                (Some(c), None) => read_json::<StationaryConfig>(c)?,
                (None, Some(path)) => StationaryConfig { graph: GraphSpec::EdgeList { path }, r, w, u, calibrate },
                _ => return Err(usage("stationary needs exactly one of --config or --graph")),
            };
            let summary = commands::stationary(&cfg)?;
            print!("{}", summary.render());
            if let Some(p) = &cli.out {
                summary.write_csv(BufWriter::new(File::create(p)?))?;
            }
        }
        Command::Simulate => {
            let path = cli.config.as_ref().ok_or_else(|| usage("simulate needs --config"))?;
            let cfg = ExperimentConfig::from_path(path)?;
            let report = commands::simulate(cfg.clone(), &overrides)?;
            write_report(&report, overrides.out.as_deref().or(cfg.run.out.as_deref()))?;
        }
        Command::Reproduce { table } => {
            let (report, checks) = commands::reproduce(&table, &overrides)?;
            let mut stdout = io::stdout().lock();
            for measure in ["re", "pr_n1", "essb"] {
                if report.rows.iter().any(|r| r.measure == measure) {
                    writeln!(stdout, "{}", report.table(measure))?;
                }
            }
            for c in &checks {
                writeln!(stdout, "{}", c.line())?;
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            writeln!(stdout, "{} checks, {} failed", checks.len(), failed)?;
            if let Some(p) = &cli.out {
                report.write_csv(BufWriter::new(File::create(p)?))?;
            }
            commands::reproduction_status(&checks)?;
        }
        Command::DesignSearch => {
            let path = cli.config.as_ref().ok_or_else(|| usage("design-search needs --config"))?;
            let cfg: SearchConfig = read_json(path)?;
            let result = commands::search(&cfg, cli.seed)?;
            eprint!("{}", result.render());
            write_graph(&result.outcome.best, cli.out.as_deref())?;
        }
    }
    Ok(())
}

fn write_graph(g: &Graph, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => g.write_edge_list(BufWriter::new(File::create(p)?)),
        None => g.write_edge_list(io::stdout().lock()),
    }
}
