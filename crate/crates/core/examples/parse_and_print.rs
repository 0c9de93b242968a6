//! Reads a program with `:- entry` declarations and prints it back, once
//! with source variable names and once in the canonical form used by the
//! residual code generator.
//!
//! ```text
//! cargo run --example parse_and_print [FILE]
//! ```

use aispec::frontend::{parse_program, print_program, print_unit};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable program"),
        None => include_str!("../corpus/running.pl").to_string(),
    };
    let unit = match parse_program(&text) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("{}", e);
            std::process::exit(1);
        }
    };
    for w in &unit.warnings {
        eprintln!("warning: {}", w);
    }
    println!("% as written");
    print!("{}", print_unit(&unit));
    println!("\n% canonical");
    print!("{}", print_program(&unit.program));
    println!("\n% predicates");
    for p in unit.program.predicates() {
        println!("{} ({} clauses)", p, unit.program.clauses_for(p).count());
    }
}
