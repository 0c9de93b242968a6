//! Local control: unfolds abstract atoms of the running example under the
//! three strategies and prints the resultants.

use aispec::domain::{AbstractAtom, AbstractDomain, ShFr};
use aispec::frontend::{entry_to_abstract_atom, parse_goal, parse_program, ExecTable};
use aispec::term::{clause_to_string, Clause, Namer};
use aispec::unfold::{aunfold, UnfoldConfig, UnfoldStrategy};

fn show(strategy: UnfoldStrategy, call: &AbstractAtom<ShFr>, unit: &aispec::frontend::SourceUnit) {
    let cfg = UnfoldConfig { strategy, ..UnfoldConfig::default() };
    let table = ExecTable::with_user(unit.exec_entries.clone());
    println!("{} under {:?}:", call.render(), strategy);
    for r in aunfold(&unit.program, call, &cfg, &table).expect("unfolding stays within the fuse") {
        let c = Clause { number: 0, head: r.head, body: r.body };
        println!("    {}", clause_to_string(&c, &mut Namer::new()));
    }
}

fn main() {
    let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
    let entry: AbstractAtom<ShFr> = entry_to_abstract_atom(&unit.entries[0]).unwrap();

    let (goal, _) = parse_goal("formula(s(s(s(s(C)))), A)").unwrap();
    let vars = goal[0].vars();
    let cp = ShFr::from_modes(&vars, &vars[..1], &vars[1..]).unwrap();
    let formula = AbstractAtom::new(goal[0].clone(), cp);

    for s in [UnfoldStrategy::HomEmb, UnfoldStrategy::OneStep, UnfoldStrategy::DeriveThenAexec] {
        show(s, &entry, &unit);
    }
    show(UnfoldStrategy::HomEmb, &formula, &unit);
}
