//! `multiplex`: run, verify and inspect multiplex Kuramoto scenarios.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use multiplex_core::experiments::{
    build_graphs, builtin_scenarios, load_scenario, run_scenario, verify_propositions, write_atomic, ScenarioConfig,
};
use multiplex_core::Error;
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "multiplex", version, about = "Multiplex Kuramoto scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct Overrides {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Time step.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long = "t-end", allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Record every k-th step.
    #[arg(long = "record-every")]
    record_every: Option<usize>,
}

impl Overrides {
    fn apply(&self, mut cfg: ScenarioConfig) -> Result<ScenarioConfig, Error> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(r) = self.record_every {
            cfg.record_every = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios (builtin names or JSON config paths).
    Run {
        #[arg(required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory; each scenario writes into <out>/<name>/.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Scenarios to run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check the composition identities for one scenario.
    Verify {
        target: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the builtin scenarios as JSON.
    ListScenarios,
    /// Print the intra- and inter-layer adjacency matrices of a scenario.
    DumpGraph {
        target: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write intra.csv and inter.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Core(Error),
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Core(e) => {
                let mut v = json!({ "error": e.kind(), "message": e.to_string() });
                if let Error::Config { field, .. } = e {
                    v["field"] = json!(field);
                }
                v
            }
            Failure::Verification(msg) => json!({ "error": "verification_failed", "message": msg }),
            Failure::Usage(msg) => json!({ "error": "usage", "message": msg }),
        }
    }
}

fn print_json(v: &serde_json::Value) {
    print_text(&serde_json::to_string_pretty(v).expect("json values serialize"));
}

// a closed pipe (e.g. `| head`) is not an error
fn print_text(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn run(targets: &[String], overrides: &Overrides, out: &Path, jobs: usize) -> Result<(), Failure> {
    if jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let configs = targets
        .iter()
        .map(|t| overrides.apply(load_scenario(t)?))
        .collect::<Result<Vec<_>, Error>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let results: Vec<_> = pool.install(|| configs.par_iter().map(|c| run_scenario(c, out)).collect());
    let mut summary = Vec::with_capacity(results.len());
    for (cfg, res) in configs.iter().zip(results) {
        let art = res?;
        summary.push(json!({ "scenario": cfg.name, "artifacts": art }));
    }
    print_json(&json!(summary));
    Ok(())
}

fn verify(target: &str, overrides: &Overrides) -> Result<(), Failure> {
    let cfg = overrides.apply(load_scenario(target)?)?;
    let report = verify_propositions(&cfg)?;
    print_text(&report.to_json()?);
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.status == multiplex_core::experiments::CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        Err(Failure::Verification(format!("{}: failed {}", cfg.name, failed.join(", "))))
    }
}

fn list_scenarios() {
    let rows: Vec<_> = builtin_scenarios()
        .iter()
        .map(|c| serde_json::to_value(c).expect("configs serialize"))
        .collect();
    print_json(&json!(rows));
}

fn dump_graph(target: &str, seed: Option<u64>, out: Option<&Path>) -> Result<(), Failure> {
    let overrides = Overrides {
        seed,
        ..Overrides::default()
    };
    let cfg = overrides.apply(load_scenario(target)?)?;
    let (intra, inter) = build_graphs(&cfg)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        write_atomic(&dir.join("intra.csv"), |w| intra.write_csv(w))?;
        write_atomic(&dir.join("inter.csv"), |w| inter.write_csv(w))?;
    }
    print_json(&json!({
        "scenario": cfg.name,
        "seed": cfg.seed,
        "intra": intra,
        "inter": inter,
    }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let f = Failure::Usage(e.to_string().trim_end().to_owned());
            eprintln!("{}", f.to_json());
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };

    let outcome = match &cli.command {
        Command::Run {
            targets,
            overrides,
            out,
            jobs,
        } => run(targets, overrides, out, *jobs),
        Command::Verify { target, overrides } => verify(target, overrides),
        Command::ListScenarios => {
            list_scenarios();
            Ok(())
        }
        Command::DumpGraph { target, seed, out } => dump_graph(target, *seed, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(match f {
                Failure::Verification(_) => 3,
                Failure::Usage(_) => 2,
                Failure::Core(_) => 1,
            })
        }
    }
}
