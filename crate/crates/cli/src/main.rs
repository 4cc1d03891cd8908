//! Command-line front end: scenario verification, built-in examples, and
//! an expression evaluator.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails
//! (the report is still written), 2 for schema/parse/usage errors.

mod report;
mod runner;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use contact_maxwell::{parse, Point64};

use scenario::{builtin, Scenario, BUILTINS};

#[derive(Parser)]
#[command(
    name = "contact-maxwell",
    version,
    about = "Certify that contact forms on a 3-dimensional chart induce time-harmonic Maxwell solutions",
    long_about = "Loads a JSON scenario (a 1-form, a metric, a frequency and a list of checks),\n\
                  audits the requested identities on a seeded sample cloud, and writes a\n\
                  machine-readable report. Runs are deterministic for a fixed seed."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks declared in a scenario file or built-in scenario
    Verify(VerifyArgs),
    /// List the built-in example scenarios
    Examples,
    /// Evaluate a scalar expression at a point
    Eval(EvalArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to a scenario JSON file, or the name of a built-in scenario
    scenario: String,
    /// Override the scenario's sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Override the scenario's sampler seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the JSON report to this file (stdout always receives it)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Expression text, e.g. "cos(2*z)"
    #[arg(long)]
    expr: String,
    /// Evaluation point as three comma-separated reals, e.g. "0,0,0"
    #[arg(long)]
    at: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(&args),
        Command::Examples => cmd_examples(),
        Command::Eval(args) => cmd_eval(&args),
    };
    match code {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario_text(spec: &str) -> anyhow::Result<String> {
    let path = Path::new(spec);
    if path.exists() {
        return fs::read_to_string(path).with_context(|| format!("reading {}", path.display()));
    }
    if let Some(b) = builtin(spec) {
        return Ok(b.json.to_string());
    }
    Err(anyhow!(
        "`{spec}` is neither a readable file nor a built-in scenario (see `contact-maxwell examples`)"
    ))
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let text = load_scenario_text(&args.scenario)?;
    let mut raw: Scenario =
        serde_json::from_str(&text).map_err(|e| anyhow!("invalid scenario JSON: {e}"))?;
    if let Some(samples) = args.samples {
        raw.samples = samples;
    }
    if let Some(seed) = args.seed {
        raw.seed = seed;
    }
    if let Some(tol) = args.tol {
        raw.tol = tol;
    }
    if let Some(desc) = &raw.description {
        eprintln!("{}: {desc}", raw.name);
    }
    let compiled = raw.compile().map_err(|e| anyhow!("{e}"))?;

    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let outcome = runner::run_scenario(&compiled, timestamp);

    for (name, check) in &outcome.report.checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        match &check.error {
            Some(msg) => eprintln!("check {name}: {status} ({msg})"),
            None => {
                let worst = check
                    .residuals
                    .values()
                    .fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                if worst.is_finite() {
                    eprintln!("check {name}: {status} (worst residual {worst:.3e})");
                } else {
                    eprintln!("check {name}: {status}");
                }
            }
        }
    }

    let json = serde_json::to_string_pretty(&outcome.report)?;
    println!("{json}");
    if let Some(out) = &args.out {
        fs::write(out, format!("{json}\n")).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(ExitCode::from(if outcome.all_pass { 0 } else { 1 }))
}

fn cmd_examples() -> anyhow::Result<ExitCode> {
    for b in &BUILTINS {
        let expectation = if b.expect_pass {
            "expected exit 0"
        } else {
            "expected exit 1"
        };
        println!("{} — {} ({expectation})", b.name, b.summary);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: &EvalArgs) -> anyhow::Result<ExitCode> {
    let expr = parse::<f64>(&args.expr).map_err(|e| anyhow!("{e}"))?;
    let coords: Vec<f64> = args
        .at
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid coordinate `{part}` in --at (expected x,y,z)"))
        })
        .collect::<Result<_, _>>()?;
    let [x, y, z]: [f64; 3] = coords
        .try_into()
        .map_err(|_| anyhow!("--at expects exactly three comma-separated coordinates"))?;
    let value = expr
        .evaluate(&Point64::new(x, y, z))
        .map_err(|e| anyhow!("{e}"))?;
    // 17 significant digits: enough to reconstruct the exact f64
    println!("{value:.16e}");
    Ok(ExitCode::SUCCESS)
}
