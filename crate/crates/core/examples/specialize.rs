//! The full pipeline: analysis with specialized definitions, residual code,
//! and an oracle comparison on sampled queries.
//!
//! ```text
//! cargo run --example specialize [FILE] [PRESET]
//! ```

use aispec::config::{run, CheckConfig, Preset, RunConfig};
use aispec::frontend::parse_program;

fn main() {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => std::fs::read_to_string(path).expect("readable program"),
        None => include_str!("../corpus/running.pl").to_string(),
    };
    let preset: Preset = args.next().map(|p| p.parse().expect("preset name")).unwrap_or(Preset::Full);
    let unit = parse_program(&text).expect("program parses");
    let mut cfg = RunConfig::from_preset(preset);
    cfg.check = Some(CheckConfig::default());
    print!("{}", cfg.describe());
    let out = run(&unit, &cfg).expect("analysis");
    println!();
    print!("{}", out.residual.to_source());
    for w in &out.residual.warnings {
        println!("% warning: {}", w);
    }
    println!("\n{}", out.summary);
    println!("{}", out.oracle.expect("requested"));
}
