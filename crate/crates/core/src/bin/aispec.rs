use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use aispec::config::{run, CheckConfig, DomainKind, ParamName, Preset, RunConfig, Widen};
use aispec::engine::EngineKind;
use aispec::frontend::{parse_exec_table, parse_program};
use aispec::global::GeneralizeStrategy;
use aispec::unfold::UnfoldStrategy;

/// Specializes a logic program while analysing it.
#[derive(Parser, Debug)]
#[command(name = "aispec", version)]
struct Args {
    /// Program to specialize; its `:- entry` declarations give the queries.
    input: Option<PathBuf>,
    #[arg(long, value_parser = |s: &str| s.parse::<Preset>())]
    preset: Option<Preset>,
    #[arg(long, value_parser = |s: &str| s.parse::<DomainKind>())]
    domain: Option<DomainKind>,
    #[arg(long, value_parser = UnfoldStrategy::parse_param)]
    unfold: Option<UnfoldStrategy>,
    #[arg(long, value_parser = GeneralizeStrategy::parse_param)]
    generalize: Option<GeneralizeStrategy>,
    #[arg(long, value_parser = |s: &str| s.parse::<Widen>())]
    widen: Option<Widen>,
    #[arg(long, value_parser = EngineKind::parse_param)]
    engine: Option<EngineKind>,
    /// Residual program output; stdout when absent.
    #[arg(short = 'o')]
    output: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Compare original and residual answers on N sampled queries.
    #[arg(long, value_name = "N")]
    check: Option<usize>,
    #[arg(long, value_name = "D", default_value_t = 400)]
    depth: usize,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Additional abstract executability rules.
    #[arg(long, value_name = "FILE")]
    exec_table: Option<PathBuf>,
    /// Allow selecting an atom right of a blocked one.
    #[arg(long)]
    non_leftmost: bool,
    #[arg(long)]
    trace: bool,
    /// Print the resolved parameters and exit.
    #[arg(long)]
    print_config: bool,
}

fn config(args: &Args) -> RunConfig {
    let mut cfg = args.preset.map(RunConfig::from_preset).unwrap_or_default();
    let p = &mut cfg.params;
    p.domain = args.domain.unwrap_or(p.domain);
    p.unfold = args.unfold.unwrap_or(p.unfold);
    p.generalize = args.generalize.unwrap_or(p.generalize);
    p.widen = args.widen.unwrap_or(p.widen);
    p.engine = args.engine.unwrap_or(p.engine);
    cfg.non_leftmost = args.non_leftmost;
    cfg.trace = args.trace;
    cfg.check = args.check.map(|samples| CheckConfig { samples, depth: args.depth, seed: args.seed, ..CheckConfig::default() });
    cfg
}

fn write_or_print(path: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {}", p.display(), e)),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = config(&args);
    if args.print_config {
        print!("{}", cfg.describe());
        return ExitCode::SUCCESS;
    }
    let Some(input) = &args.input else {
        eprintln!("error: no input program");
        return ExitCode::from(1);
    };
    let parsed = std::fs::read_to_string(input)
        .map_err(|e| format!("{}: {}", input.display(), e))
        .and_then(|text| parse_program(&text).map_err(|e| format!("{}: {}", input.display(), e)));
    let mut unit = match parsed {
        Ok(u) => u,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    if let Some(path) = &args.exec_table {
        let table = std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| parse_exec_table(&t).map_err(|e| e.to_string()));
        match table {
            Ok(mut entries) => unit.exec_entries.append(&mut entries),
            Err(e) => {
                eprintln!("error: {}: {}", path.display(), e);
                return ExitCode::from(1);
            }
        }
    }
    for w in &unit.warnings {
        eprintln!("warning: {}", w);
    }
    let out = match run(&unit, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("internal error: {}", e);
            return ExitCode::from(2);
        }
    };
    for line in &out.trace {
        eprintln!("{}", line);
    }
    for w in &out.residual.warnings {
        eprintln!("warning: {}", w);
    }
    let writes = [(&args.output, out.residual.to_source()), (&args.dot, out.dot.clone()), (&args.json, out.json.clone())];
    for (i, (path, text)) in writes.iter().enumerate() {
        if i > 0 && path.is_none() {
            continue;
        }
        if let Err(e) = write_or_print(path, text) {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    }
    eprintln!("{}", out.summary);
    if let Some(report) = &out.oracle {
        eprintln!("{}", report);
        if !report.ok() {
            return ExitCode::from(3);
        }
    }
    ExitCode::SUCCESS
}
