//! Inspects the tables left by the analysis of the running example: answer
//! patterns, dependency arcs, generalizations and specializations, then
//! renders the analysis graph and the JSON dump.

use aispec::codegen::{dump_tables, export_dot};
use aispec::config::{analyze, Preset, RunConfig};
use aispec::domain::{AbstractAtom, ShFr};
use aispec::engine::Resume;
use aispec::frontend::parse_program;

fn main() {
    let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
    let a = analyze::<ShFr>(&unit, &RunConfig::from_preset(Preset::Full)).unwrap();

    println!("answers ({} updates):", a.updates);
    for k in &a.at_order {
        let success = AbstractAtom { atom: k.atom.clone(), cp: a.at[k].clone() };
        println!("    {}  ->  {}", k.render(), success.render());
        for d in &a.dt[k] {
            match &d.resume {
                Resume::Entry => println!("        called from an entry"),
                Resume::Literal { node, k, i, .. } => println!("        called at ({},{}) of {}", k, i, node.atom),
            }
        }
    }
    println!("generalizations:");
    for (call, general) in &a.global.gt {
        println!("    {}  ->  {}", call.render(), general.render());
    }
    println!("specializations:");
    for key in &a.global.st_order {
        let e = &a.global.st[key];
        println!("    {}  ~>  {}  clauses {:?}", key.render(), e.link, e.clauses);
    }
    println!("\n{}", export_dot(&a));
    println!("{}", dump_tables(&a));
}
