// Full analysis from a JSON document: report to stdout, plot to roots.svg.
//
//   cargo run --example pipeline
//   cargo run --example pipeline -- input.json out.svg

use std::fs;

use tierroots::io::{emit_svg, parse_input, run_pipeline, to_json};

const DEMO: &str = r#"{
  "exponents": [0, 1, 2],
  "coefficients": [1.0, 101.0, 100.0],
  "options": { "separation": 10, "epsilon_f": 2.5e-3 }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => fs::read_to_string(path)?,
        None => DEMO.to_string(),
    };
    let svg_path = args.next().unwrap_or_else(|| "roots.svg".into());

    let (poly, opts) = parse_input(&text)?;
    let report = run_pipeline(&poly, &opts)?;
    println!("{}", to_json(&report)?);
    fs::write(&svg_path, emit_svg(&report))?;
    eprintln!("{} failures, plot written to {svg_path}", report.failures.len());
    Ok(())
}
