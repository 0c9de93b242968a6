//! Global control building blocks: embedding, msg and the generalization
//! strategies applied against a specialization table.

use aispec::domain::{AbstractAtom, AbstractDomain, ShFr};
use aispec::frontend::{parse_goal, ExecTable};
use aispec::generalize::{homeomorphic_embeds, msg};
use aispec::global::{GeneralizeStrategy, GlobalTables};
use aispec::term::{Namer, Program, Term};
use aispec::unfold::UnfoldConfig;

fn atom(text: &str) -> AbstractAtom<ShFr> {
    let (goal, _) = parse_goal(text).unwrap();
    let vars = goal[0].vars();
    AbstractAtom::new(goal[0].clone(), ShFr::top(&vars))
}

fn main() {
    let zero = Term::constant("0");
    let two = Term::app("s", vec![Term::app("s", vec![zero.clone()])]);
    println!("0 embeds in s(s(0)): {}", homeomorphic_embeds(&zero, &two));
    println!("s(s(0)) embeds in 0: {}", homeomorphic_embeds(&two, &zero));

    let g = msg(&two, &Term::app("s", vec![zero]));
    println!("msg(s(s(0)), s(0)) = {}", aispec::term::term_to_string(&g.term, &mut Namer::new()));

    let program = aispec::frontend::parse_program("p(s(X)) :- p(X).\np(0).").unwrap().program;
    let mut tables: GlobalTables<ShFr> = GlobalTables::new();
    let mut scratch: Program = program.clone();
    let cfg = UnfoldConfig::default();
    let table = ExecTable::default();
    let first = atom("p(s(X))");
    tables
        .specialized_definition(&mut scratch, &first, GeneralizeStrategy::HomEmbMsg, &cfg, &table, true)
        .unwrap();
    let call = atom("p(s(s(Y)))");
    for s in [GeneralizeStrategy::Id, GeneralizeStrategy::BaseForm, GeneralizeStrategy::HomEmbMsg] {
        println!("{:?}: {} -> {}", s, call.render(), tables.ageneralize(&call, s).render());
    }
}
