use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use stable_pgf_cli::experiments::ALL;
use stable_pgf_cli::output::write_atomic;
use stable_pgf_cli::params::parse_override;
use stable_pgf_cli::{describe, execute, find, CliError, ExperimentConfig, Outcome, SCHEMA_VERSION};

// stdout may be a closed pipe (`| head`); dropping the line beats a panic
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "stable-pgf", version, about = "Experiments on stable and t-stable generating functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct RunArgs {
    /// JSON config: {name?, params, seed?, tol?, output?}
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter override, repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the experiment's pass threshold
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// List experiment names
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print an experiment's parameter schema as JSON
    Describe { name: String },
    /// Run one experiment
    Run {
        /// Experiment name (may come from the config file instead)
        name: Option<String>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Run every experiment with its defaults
    Suite {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.tol.is_some() {
        cfg.tol = args.tol;
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    Ok(cfg)
}

fn write_outputs(dir: &std::path::Path, name: &str, doc: &Value, outcome: &Outcome) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("json");
    text.push('\n');
    write_atomic(dir, &format!("{name}.json"), &text)?;
    for (file, contents) in &outcome.csv {
        write_atomic(dir, file, contents)?;
    }
    Ok(())
}

fn run_one(name: Option<String>, args: RunArgs) -> Result<bool, CliError> {
    let cfg = load_config(&args)?;
    let name = match (name, &cfg.name) {
        (Some(n), Some(c)) if &n != c => return Err(CliError::Config(format!("name `{n}` conflicts with config `{c}`"))),
        (Some(n), _) => n,
        (None, Some(c)) => c.clone(),
        (None, None) => return Err(CliError::Config("no experiment name given".into())),
    };
    let e = find(&name)?;
    let overrides = args.params.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    let (doc, outcome) = execute(e, &cfg, &overrides)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    write_outputs(&dir, e.name, &doc, &outcome)?;
    for c in &outcome.checks {
        say!("{} {}: {} (value {}, threshold {})", if c.passed { "PASS" } else { "FAIL" }, e.name, c.name, c.value, c.threshold);
    }
    Ok(outcome.passed())
}

fn run_suite(out: Option<PathBuf>, seed: Option<u64>) -> Result<bool, CliError> {
    let dir = out.unwrap_or_else(|| PathBuf::from("out"));
    let cfg = ExperimentConfig { seed, ..Default::default() };
    let mut summary = vec![];
    let mut all = true;
    for e in &ALL {
        let (passed, error) = match execute(e, &cfg, &[]) {
            Ok((doc, outcome)) => {
                write_outputs(&dir, e.name, &doc, &outcome)?;
                (outcome.passed(), None)
            }
            Err(err) => (false, Some(err.to_string())),
        };
        all &= passed;
        say!("{} {}{}", if passed { "PASS" } else { "FAIL" }, e.name, error.as_deref().map(|m| format!(": {m}")).unwrap_or_default());
        summary.push(json!({"experiment": e.name, "passed": passed, "error": error}));
    }
    let doc = json!({"schema_version": SCHEMA_VERSION, "passed": all, "experiments": summary});
    write_atomic(&dir, "suite.json", &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    Ok(all)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::List { json } => {
            if json {
                let names: Vec<&str> = ALL.iter().map(|e| e.name).collect();
                say!("{}", serde_json::to_string(&names).expect("json"));
            } else {
                for e in &ALL {
                    say!("{}", e.name);
                }
            }
            Ok(true)
        }
        Command::Describe { name } => find(&name).map(|e| {
            say!("{}", serde_json::to_string_pretty(&describe(e)).expect("json"));
            true
        }),
        Command::Run { name, args } => run_one(name, args),
        Command::Suite { out, seed } => run_suite(out, seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
