//! Depth-bounded leftmost SLD interpreter and entry-driven query sampling,
//! used as a test oracle.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::frontend::{EntryDecl, Property};
use crate::subst::{canonical_renaming, mgu_atoms, Subst};
use crate::term::{atom_to_string, Atom, Namer, PredKey, Program, Symbol, Term, Var};

/// Resolution steps allowed for one query before it counts as cut off.
pub const STEP_BUDGET: usize = 200_000;

#[derive(Clone, Debug, Default)]
pub struct SldResult {
    /// Computed answers restricted to the query variables, in SLD order.
    pub answers: Vec<Subst>,
    /// Number of branches cut by the depth bound or the step budget.
    pub cut_branches: usize,
    /// Called predicates without a definition (other than mode tests).
    pub undefined: BTreeSet<PredKey>,
}

impl SldResult {
    pub fn complete(&self) -> bool {
        self.cut_branches == 0
    }

    /// Answers as a multiset of bindings of `vars`, up to variable names.
    /// Keyed by the bindings rather than the query atom so that a query and
    /// its renamed residual counterpart compare directly.
    pub fn multiset(&self, vars: &[Var]) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for theta in &self.answers {
            let tuple = Atom::new("answer", vars.iter().map(|v| theta.apply(&Term::Var(*v))).collect());
            let map = canonical_renaming(&tuple.vars());
            let canon = tuple.rename(&mut |v| map[&v]);
            let text = atom_to_string(&canon, &mut Namer::new());
            *out.entry(text["answer".len()..].to_string()).or_insert(0) += 1;
        }
        out
    }
}

struct Node {
    goal: Vec<Atom>,
    args: Vec<Term>,
    depth: usize,
}

/// Leftmost SLD resolution with occurs check. `depth` bounds the number of
/// resolution steps on each branch; mode tests count as steps too.
pub fn solve(program: &Program, query: &Atom, depth: usize) -> SldResult {
    let qvars = query.vars();
    let mut result = SldResult::default();
    let mut stack =
        vec![Node { goal: vec![query.clone()], args: qvars.iter().map(|v| Term::Var(*v)).collect(), depth: 0 }];
    let mut steps = 0;
    while let Some(node) = stack.pop() {
        let Some((first, rest)) = node.goal.split_first() else {
            result.answers.push(Subst::from_pairs(
                qvars.iter().zip(&node.args).filter(|(v, t)| t.as_var() != Some(**v)).map(|(v, t)| (*v, t.clone())),
            ));
            continue;
        };
        steps += 1;
        if node.depth >= depth || steps > STEP_BUDGET {
            result.cut_branches += 1;
            continue;
        }
        let next = node.depth + 1;
        match (first.pred.as_ref(), first.arity()) {
            ("ground", 1) | ("var", 1) => {
                let holds = if first.pred.as_ref() == "ground" {
                    first.args[0].is_ground()
                } else {
                    first.args[0].as_var().is_some()
                };
                if holds {
                    stack.push(Node { goal: rest.to_vec(), args: node.args, depth: next });
                }
                continue;
            }
            ("true", 0) => {
                stack.push(Node { goal: rest.to_vec(), args: node.args, depth: next });
                continue;
            }
            _ => {}
        }
        let key = first.key();
        if !program.defines(&key) {
            result.undefined.insert(key);
            continue;
        }
        let mut children = Vec::new();
        for clause in program.clauses_for(&key) {
            let (c, _) = clause.rename_apart();
            if let Some(mgu) = mgu_atoms(first, &c.head) {
                let mut goal = mgu.apply_goal(&c.body);
                goal.extend(mgu.apply_goal(rest));
                let args = node.args.iter().map(|t| mgu.apply(t)).collect();
                children.push(Node { goal, args, depth: next });
            }
        }
        stack.extend(children.into_iter().rev());
    }
    result
}

/// Size-bounded random terms over a program's function symbols.
pub struct Sampler {
    rng: StdRng,
    constants: Vec<Symbol>,
    functors: Vec<(Symbol, usize)>,
    max_depth: usize,
}

impl Sampler {
    pub fn new(program: &Program, seed: u64, max_depth: usize) -> Sampler {
        let sig = program.signature();
        let mut constants: Vec<Symbol> = sig.iter().filter(|(_, n)| *n == 0).map(|(f, _)| f.clone()).collect();
        if constants.is_empty() {
            constants.push(crate::term::sym("a"));
        }
        let functors = sig.into_iter().filter(|(_, n)| *n > 0).collect();
        Sampler { rng: StdRng::seed_from_u64(seed), constants, functors, max_depth }
    }

    pub fn ground_term(&mut self) -> Term {
        self.term_at(self.max_depth)
    }

    fn term_at(&mut self, depth: usize) -> Term {
        let total = self.constants.len() + self.functors.len();
        let pick = if depth == 0 { self.rng.gen_range(0..self.constants.len()) } else { self.rng.gen_range(0..total) };
        if pick < self.constants.len() {
            return Term::constant(&self.constants[pick]);
        }
        let (f, n) = self.functors[pick - self.constants.len()].clone();
        let args = (0..n).map(|_| self.term_at(depth - 1)).collect();
        Term::app(&f, args)
    }

    /// An instance of the entry atom satisfying its properties: `ground`
    /// variables get random ground terms, `var` variables stay distinct
    /// variables, and the remaining ones get either.
    pub fn query(&mut self, entry: &EntryDecl) -> (Subst, Atom) {
        let mut pairs = Vec::new();
        for v in entry.atom.vars() {
            let prop = entry.props.iter().find(|(_, w)| *w == v).map(|(p, _)| *p);
            let ground = match prop {
                Some(Property::Ground) => true,
                Some(Property::Var) => false,
                None => self.rng.gen_bool(0.5),
            };
            if ground {
                pairs.push((v, self.ground_term()));
            }
        }
        let sigma = Subst::from_pairs(pairs);
        let q = sigma.apply_atom(&entry.atom);
        (sigma, q)
    }
}

/// Query text for diagnostics.
pub fn show(a: &Atom) -> String {
    atom_to_string(a, &mut Namer::new())
}

/// Composition of the sampled instantiation and a computed answer,
/// restricted to the entry variables.
pub fn success_on_entry(sigma: &Subst, theta: &Subst, entry_vars: &[Var]) -> Subst {
    sigma.compose(theta).restrict(entry_vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_goal, parse_program};
    use crate::term::peano;

    fn running() -> Program {
        parse_program(include_str!("../corpus/running.pl")).unwrap().program
    }

    #[test]
    fn main_of_three_is_zero() {
        let q = Atom::new("main", vec![peano(3, Term::constant("0")), Term::Var(Var::fresh())]);
        let r = solve(&running(), &q, 400);
        assert!(r.complete());
        assert_eq!(r.multiset(&q.vars()).into_iter().collect::<Vec<_>>(), vec![("(0)".to_string(), 1)]);
    }

    #[test]
    fn main_of_five_is_eight() {
        // (5-2)*2 = 6, then (6-2)*2 = 8.
        let q = Atom::new("main", vec![peano(5, Term::constant("0")), Term::Var(Var::fresh())]);
        let r = solve(&running(), &q, 400);
        let expected = "(s(s(s(s(s(s(s(s(0)))))))))".to_string();
        assert_eq!(r.multiset(&q.vars()).into_iter().collect::<Vec<_>>(), vec![(expected, 1)]);
    }

    #[test]
    fn no_matching_clause_gives_nothing() {
        let p = parse_program("p(a).").unwrap().program;
        let (goal, _) = parse_goal("p(b)").unwrap();
        let r = solve(&p, &goal[0], 10);
        assert!(r.answers.is_empty() && r.complete());
    }

    #[test]
    fn depth_bound_cuts_branches() {
        let p = parse_program("loop(X) :- loop(X).").unwrap().program;
        let (goal, _) = parse_goal("loop(a)").unwrap();
        let r = solve(&p, &goal[0], 50);
        assert_eq!(r.cut_branches, 1);
        assert!(r.answers.is_empty());
    }

    #[test]
    fn sampled_queries_respect_entry() {
        let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
        let e = &unit.entries[0];
        let mut s = Sampler::new(&unit.program, 7, 5);
        for _ in 0..20 {
            let (sigma, q) = s.query(e);
            for v in e.ground_vars() {
                assert!(sigma.apply(&Term::Var(v)).is_ground());
            }
            for v in e.free_vars() {
                assert!(sigma.apply(&Term::Var(v)).as_var().is_some());
            }
            assert_eq!(q.pred.as_ref(), "main");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
        let a: Vec<String> = {
            let mut s = Sampler::new(&unit.program, 42, 6);
            (0..10).map(|_| show(&s.query(&unit.entries[0]).1)).collect()
        };
        let mut s = Sampler::new(&unit.program, 42, 6);
        let b: Vec<String> = (0..10).map(|_| show(&s.query(&unit.entries[0]).1)).collect();
        assert_eq!(a, b);
    }
}
