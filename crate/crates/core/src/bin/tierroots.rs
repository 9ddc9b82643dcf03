use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tierroots::io::{emit_svg, parse_input, run_pipeline, to_json, AnalysisReport, Options};
use tierroots::selftest;

#[derive(Parser)]
#[command(name = "tierroots", version, about = "Root tiers, cells and rough factorisation of sparse polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline report
    Analyze(Common),
    /// Height estimates and tiers
    Heights(Common),
    /// Oracle roots and their checks
    Roots(Common),
    /// Rough factorisation and its error statistics
    Factor(Common),
    /// Cell covering and its verification
    Cover(Common),
    /// Oscillatory-integral bounds with the input as the phase derivative
    Osc(Common),
    /// Run the acceptance criteria
    Selftest {
        /// Only criteria whose name contains one of these
        filter: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Input JSON document; stdin when absent
    input: Option<PathBuf>,
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long = "epsilon-f")]
    epsilon_f: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write an SVG root plot here
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
    /// Add the oscillatory section
    #[arg(long)]
    osc: bool,
}

fn read_input(path: &Option<PathBuf>) -> Result<String, String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            Ok(s)
        }
    }
}

fn section(report: &AnalysisReport, keys: &[&str]) -> Value {
    let full = serde_json::to_value(report).expect("report serialises");
    let mut out = json!({ "schema": report.schema });
    for k in keys {
        out[*k] = full[*k].clone();
    }
    out["failures"] = full["failures"].clone();
    out
}

fn emit(text: &str, path: &Option<PathBuf>) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
                _ => Ok(()),
            }
        }
    }
}

fn analyze(cmd: &Command, c: &Common) -> Result<bool, String> {
    let (poly, mut opts): (_, Options) = parse_input(&read_input(&c.input)?).map_err(|e| e.to_string())?;
    if let Some(s) = c.separation {
        opts.separation = s;
    }
    if let Some(e) = c.epsilon_f {
        opts.epsilon_f = Some(e);
    }
    if let Some(e) = c.epsilon {
        opts.epsilon = e;
    }
    opts.oscillatory |= c.osc || matches!(cmd, Command::Osc(_));
    let report = match run_pipeline(&poly, &opts) {
        Ok(r) => r,
        Err(f) => {
            if let Some(partial) = &f.partial {
                if let Ok(text) = to_json(partial.as_ref()) {
                    let _ = emit(&text, &c.json);
                }
            }
            return Err(f.to_string());
        }
    };
    let text = match cmd {
        Command::Analyze(_) => to_json(&report),
        Command::Heights(_) => to_json(&section(&report, &["input", "zero_roots", "index", "heights", "newton_polygon_agrees", "tiers", "refinement"])),
        Command::Roots(_) => to_json(&section(&report, &["input", "zero_roots", "oracle", "assignment", "tier_residuals", "clusters"])),
        Command::Factor(_) => to_json(&section(&report, &["input", "tiers", "factorization"])),
        Command::Cover(_) => to_json(&section(&report, &["input", "tiers", "covering"])),
        Command::Osc(_) => to_json(&section(&report, &["input", "oscillatory"])),
        Command::Selftest { .. } => unreachable!(),
    }
    .map_err(|e| e.to_string())?;
    emit(&text, &c.json)?;
    if let Some(p) = &c.svg {
        fs::write(p, emit_svg(&report)).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    for f in &report.failures {
        eprintln!("verification failure: {f}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Selftest { filter } => {
            let results = selftest::run_with(filter, |r| println!("{r}"));
            Ok(results.iter().all(|r| r.pass))
        }
        Command::Analyze(c)
        | Command::Heights(c)
        | Command::Roots(c)
        | Command::Factor(c)
        | Command::Cover(c)
        | Command::Osc(c) => analyze(&cli.command, c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
