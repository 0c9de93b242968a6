//! The depth-bounded SLD interpreter used as an oracle, and the sampler
//! that draws queries satisfying an entry declaration.

use aispec::frontend::{parse_goal, parse_program};
use aispec::interp::{show, solve, Sampler};

fn main() {
    let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
    for q in ["main(s(s(s(0))), R)", "main(s(s(s(s(s(0))))), R)", "tw(X, s(s(0)))", "main(0, R)"] {
        let (goal, _) = parse_goal(q).unwrap();
        let r = solve(&unit.program, &goal[0], 400);
        let answers: Vec<String> = r.answers.iter().map(|t| show(&t.apply_atom(&goal[0]))).collect();
        println!("{:<28} {:?}  complete: {}", q, answers, r.complete());
    }
    let mut sampler = Sampler::new(&unit.program, 1, 5);
    println!("sampled entry queries:");
    for _ in 0..5 {
        let (_, q) = sampler.query(&unit.entries[0]);
        let r = solve(&unit.program, &q, 400);
        println!("    {:<40} {} answers", show(&q), r.answers.len());
    }
}
