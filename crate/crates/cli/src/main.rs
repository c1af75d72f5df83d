use std::path::PathBuf;
use std::process::ExitCode;

use ccl_core::scenario::{builtin, catalog, run_scenario, RunOptions, ScenarioConfig, ScenarioError, Stage};
use clap::{Args, Parser, Subcommand};

/// Build and certify bicombings on finite truncations.
#[derive(Parser, Debug)]
#[command(name = "ccl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the space and write its interchange file.
    Build(RunArgs),
    /// Build the space and run every check and probe.
    Certify(RunArgs),
    /// Run the probes only.
    Probe(RunArgs),
    /// List the built-in scenarios.
    List,
    /// Print the description and config of a scenario.
    Describe {
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Built-in scenario name.
    scenario: Option<String>,
    /// Scenario config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "ccl-out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the truncation radius.
    #[arg(long)]
    radius: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "CCL_JOBS", default_value_t = 0)]
    jobs: usize,
}

fn load(scenario: Option<&str>, config: Option<&PathBuf>) -> Result<ScenarioConfig, ScenarioError> {
    match (scenario, config) {
        (Some(_), Some(_)) => Err(ScenarioError::Config("give a scenario name or --config, not both".into())),
        (None, None) => Err(ScenarioError::Config("give a scenario name or --config".into())),
        (Some(name), None) => builtin(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_toml(&text)
        }
    }
}

fn run(stage: Stage, args: RunArgs) -> Result<ExitCode, ScenarioError> {
    let cfg = load(args.scenario.as_deref(), args.config.as_ref())?;
    let opts = RunOptions { stage, seed: args.seed, radius: args.radius, jobs: args.jobs, out_dir: Some(args.out_dir) };
    let outcome = run_scenario(&cfg, &opts)?;
    let report = &outcome.report;
    if let Some(s) = &report.space {
        println!(
            "{}: {} space, {} vertices, {} edges, core {}",
            report.scenario, s.kind, s.vertices, s.edges, s.core_size
        );
    }
    for c in report.checks.iter().chain(&report.probes) {
        let verdict = if c.passed { "ok" } else { "FAILED" };
        match (&c.error, &c.witness_file) {
            (Some(e), _) => println!("  {:<22} {verdict} ({e})", c.name),
            (None, Some(w)) => println!("  {:<22} {verdict} (witness {w})", c.name),
            (None, None) => println!("  {:<22} {verdict}", c.name),
        }
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn describe(scenario: Option<String>, config: Option<PathBuf>) -> Result<ExitCode, ScenarioError> {
    let cfg = load(scenario.as_deref(), config.as_ref())?;
    cfg.validate()?;
    println!("{}\n", cfg.name);
    if !cfg.description.is_empty() {
        println!("{}\n", cfg.description.trim());
    }
    print!("{}", cfg.to_toml());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => run(Stage::Build, a),
        Command::Certify(a) => run(Stage::Certify, a),
        Command::Probe(a) => run(Stage::Probe, a),
        Command::List => {
            for e in catalog() {
                println!("{:<20} {}", e.name, e.summary);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Describe { scenario, config } => describe(scenario, config),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ccl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
