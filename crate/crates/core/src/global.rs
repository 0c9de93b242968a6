//! Global control: generalization of call patterns, the generalization and
//! specialization tables, fresh-name filtering and head renaming.

use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{atranslate, sorted, abstract_atom_leq, AbstractAtom, AbstractDomain};
use crate::frontend::ExecTable;
use crate::generalize::{atom_embeds, msg_atoms};
use crate::subst::{canonical_renaming, match_atom, mgu_atoms};
use crate::term::{sym, Atom, Program, RuleNo, Term, Var};
use crate::unfold::{UnfoldConfig, UnfoldError, Unfolder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneralizeStrategy {
    Id,
    HomEmbMsg,
    BaseForm,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GlobalError {
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error("{0} is not an instance of {1}")]
    BrokenChain(String, String),
    #[error("generalization of {0} is not above it")]
    NotAbove(String),
}

/// A specialization table entry `A':CP' ↝ A''` with the rule numbers of the
/// specialized definition. Stored over canonical variables.
#[derive(Clone, Debug)]
pub struct SpecEntry<D> {
    pub key: AbstractAtom<D>,
    pub link: Atom,
    pub clauses: Vec<RuleNo>,
}

/// Run-scoped global control state.
#[derive(Clone, Debug)]
pub struct GlobalTables<D> {
    /// `A:CP ↝ A':CP'`, both sides canonical.
    pub gt: BTreeMap<AbstractAtom<D>, AbstractAtom<D>>,
    pub st: BTreeMap<AbstractAtom<D>, SpecEntry<D>>,
    /// Insertion order of ST keys.
    pub st_order: Vec<AbstractAtom<D>>,
    pub trace: Vec<String>,
    counter: usize,
    used_names: BTreeSet<String>,
}

impl<D: AbstractDomain> Default for GlobalTables<D> {
    fn default() -> Self {
        GlobalTables {
            gt: BTreeMap::new(),
            st: BTreeMap::new(),
            st_order: Vec::new(),
            trace: Vec::new(),
            counter: 0,
            used_names: BTreeSet::new(),
        }
    }
}

/// `ren(A, {B/B'})`: `θ(B')` for the matcher `θ` of `B` onto `A`.
pub fn ren(a: &Atom, b: &Atom, b2: &Atom) -> Result<Atom, GlobalError> {
    let theta = match_atom(b, a)
        .or_else(|| mgu_atoms(&a.with_pred(&b.pred), b))
        .ok_or_else(|| GlobalError::BrokenChain(a.to_string(), b.to_string()))?;
    Ok(theta.apply_atom(b2))
}

/// Translates a description of `from` onto the variables of `onto`, which
/// must generalize `from.atom` and share no variables with it.
fn project_onto<D: AbstractDomain>(from: &AbstractAtom<D>, onto: &Atom) -> D {
    atranslate(from, onto, &sorted(onto.vars()))
}

fn base_form<D: AbstractDomain>(call: &AbstractAtom<D>) -> AbstractAtom<D> {
    let vars: Vec<Var> = call.atom.args.iter().map(|_| Var::fresh()).collect();
    let atom = Atom { pred: call.atom.pred.clone(), args: vars.iter().map(|v| Term::Var(*v)).collect() };
    let cp = project_onto(call, &atom);
    AbstractAtom::new(atom, cp)
}

impl<D: AbstractDomain> GlobalTables<D> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Looks up the ST entry of a key and expresses its link atom over the
    /// variables of `key`.
    pub fn lookup(&self, key: &AbstractAtom<D>) -> Option<(Atom, &SpecEntry<D>)> {
        let canon = key.canonical();
        let entry = self.st.get(&canon)?;
        let back: BTreeMap<Var, Var> =
            canonical_renaming(&key.atom.vars()).into_iter().map(|(v, c)| (c, v)).collect();
        let link = entry.link.rename(&mut |v| *back.get(&v).unwrap_or(&v));
        Some((link, entry))
    }

    pub fn generalization_of(&self, call: &AbstractAtom<D>) -> Option<&AbstractAtom<D>> {
        self.gt.get(&call.canonical())
    }

    /// Result satisfies `call ⊑ result`.
    pub fn ageneralize(&self, call: &AbstractAtom<D>, strategy: GeneralizeStrategy) -> AbstractAtom<D> {
        match strategy {
            GeneralizeStrategy::Id => call.clone(),
            GeneralizeStrategy::BaseForm => base_form(call),
            GeneralizeStrategy::HomEmbMsg => {
                let mut cur = call.clone();
                loop {
                    let canon = cur.canonical();
                    if self.st.contains_key(&canon) {
                        return cur;
                    }
                    let found = self.st_order.iter().find(|k| {
                        k.atom.pred == cur.atom.pred && k.atom.arity() == cur.atom.arity() && atom_embeds(&k.atom, &cur.atom)
                    });
                    let b = match found {
                        None => return cur,
                        Some(b) => b.rename_apart(),
                    };
                    let (m, _, _) = msg_atoms(&cur.atom, &b.atom).expect("same predicate");
                    let cp = project_onto(&cur, &m).lub(&project_onto(&b, &m));
                    let next = AbstractAtom::new(m, cp);
                    if next.canonical() == canon {
                        return cur;
                    }
                    cur = next;
                }
            }
        }
    }

    /// `sp_<pred>_<n>`, applied to the variables of `a` in first-occurrence
    /// order, or to all arguments for entry atoms.
    pub fn new_filter(&mut self, a: &Atom, keep_args: bool) -> Atom {
        let name = loop {
            self.counter += 1;
            let n = format!("sp_{}_{}", a.pred, self.counter);
            if self.used_names.insert(n.clone()) {
                break n;
            }
        };
        let args = if keep_args { a.args.clone() } else { a.vars().into_iter().map(Term::Var).collect() };
        Atom { pred: sym(&name), args }
    }

    /// Reserves predicate names of the source program so fresh names avoid them.
    pub fn reserve_names(&mut self, p: &Program) {
        for k in p.predicates() {
            self.used_names.insert(k.name.to_string());
        }
    }

    /// Generalizes, records the GT entry and, for a new ST key, unfolds and
    /// appends the renamed resultants to `program`. Returns `(A', A'')`.
    #[allow(clippy::too_many_arguments)]
    pub fn specialized_definition(
        &mut self,
        program: &mut Program,
        call: &AbstractAtom<D>,
        strategy: GeneralizeStrategy,
        ucfg: &UnfoldConfig,
        table: &ExecTable,
        is_entry: bool,
    ) -> Result<(AbstractAtom<D>, Atom), GlobalError> {
        let general = self.ageneralize(call, strategy);
        if !abstract_atom_leq(call, &general) {
            return Err(GlobalError::NotAbove(call.render()));
        }
        self.gt.insert(call.canonical(), general.canonical());
        if let Some((link, _)) = self.lookup(&general) {
            return Ok((general, link));
        }
        let mut unfolder = Unfolder::new(program, table, ucfg);
        let resultants = unfolder.aunfold(&general)?;
        self.trace.append(&mut unfolder.trace);
        let link = self.new_filter(&general.atom, is_entry);
        let mut clauses = Vec::new();
        for r in resultants {
            let head = ren(&r.head, &general.atom, &link)?;
            clauses.push(program.add_clause(head, r.body));
        }
        let canon_map = canonical_renaming(&general.atom.vars());
        let key = general.canonical();
        let entry = SpecEntry {
            key: key.clone(),
            link: link.rename(&mut |v| *canon_map.get(&v).unwrap_or(&v)),
            clauses,
        };
        self.st.insert(key.clone(), entry);
        self.st_order.push(key);
        Ok((general, link))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Pd, ShFr};
    use crate::frontend::parse_program;
    use crate::term::{clause_to_string, peano, Namer};

    fn zero() -> Term {
        Term::constant("0")
    }

    #[test]
    fn filter_keeps_variables_once() {
        let mut t = GlobalTables::<ShFr>::new();
        let (x, x2) = (Var::fresh(), Var::fresh());
        let a = Atom::new("formula", vec![peano(4, Term::Var(x)), Term::Var(x2)]);
        let f = t.new_filter(&a, false);
        assert!(f.pred.starts_with("sp_formula_"));
        assert_eq!(f.args, vec![Term::Var(x), Term::Var(x2)]);
        let g = t.new_filter(&Atom::new("two", vec![peano(2, zero())]), false);
        assert_eq!(g.arity(), 0);
        assert_ne!(f.pred, g.pred);
        let h = t.new_filter(&Atom::new("p", vec![Term::Var(x), Term::Var(x)]), false);
        assert_eq!(h.args, vec![Term::Var(x)]);
    }

    #[test]
    fn ren_examples() {
        let (x, x2) = (Var::fresh(), Var::fresh());
        let b = Atom::new("formula", vec![peano(4, Term::Var(x)), Term::Var(x2)]);
        let b2 = Atom::new("sp_formula", vec![Term::Var(x), Term::Var(x2)]);
        let a = Atom::new("formula", vec![peano(4, zero()), peano(4, zero())]);
        assert_eq!(ren(&a, &b, &b2).unwrap(), Atom::new("sp_formula", vec![zero(), peano(4, zero())]));
        assert_eq!(ren(&b, &b, &b2).unwrap(), b2);
        assert!(ren(&Atom::new("formula", vec![zero(), zero()]), &b, &b2).is_err());
    }

    #[test]
    fn base_form_keeps_argument_modes() {
        let t = GlobalTables::<ShFr>::new();
        let (x, x2) = (Var::fresh(), Var::fresh());
        let atom = Atom::new("formula", vec![peano(4, Term::Var(x)), Term::Var(x2)]);
        let cp = ShFr::from_modes(&sorted(atom.vars()), &[x], &[x2]).unwrap();
        let call = AbstractAtom::new(atom, cp);
        let g = t.ageneralize(&call, GeneralizeStrategy::BaseForm);
        let vs: Vec<Var> = g.atom.args.iter().map(|a| a.as_var().unwrap()).collect();
        assert!(g.cp.entails_ground(vs[0]));
        assert!(g.cp.entails_free(vs[1]));
        assert!(abstract_atom_leq(&call, &g));
    }

    #[test]
    fn msg_generalization_against_table() {
        let mut t = GlobalTables::<Pd>::new();
        let p = parse_program("p(0).\np(s(X)) :- p(X).").unwrap().program;
        let mut p = p;
        let (x, y) = (Var::fresh(), Var::fresh());
        let first = AbstractAtom::new(Atom::new("p", vec![peano(1, Term::Var(x))]), Pd::top(&[x]));
        let (ucfg, table) = (UnfoldConfig::default(), ExecTable::default());
        t.specialized_definition(&mut p, &first, GeneralizeStrategy::HomEmbMsg, &ucfg, &table, false).unwrap();
        let second = AbstractAtom::new(Atom::new("p", vec![peano(2, Term::Var(y))]), Pd::top(&[y]));
        let g = t.ageneralize(&second, GeneralizeStrategy::HomEmbMsg);
        let z = g.atom.args[0].args()[0].as_var().expect("p(s(Z))");
        assert_eq!(g.atom, Atom::new("p", vec![peano(1, Term::Var(z))]));
        assert!(t.ageneralize(&first, GeneralizeStrategy::Id).is_variant_of(&first));
    }

    #[test]
    fn specialized_definition_memoizes() {
        let text = include_str!("../corpus/running.pl");
        let mut p = parse_program(text).unwrap().program;
        let mut t = GlobalTables::<ShFr>::new();
        t.reserve_names(&p);
        let (b, c) = (Var::fresh(), Var::fresh());
        let atom = Atom::new("tw", vec![Term::Var(b), Term::Var(c)]);
        let call = AbstractAtom::new(atom, ShFr::from_modes(&sorted(vec![b, c]), &[b], &[c]).unwrap());
        let (ucfg, table) = (UnfoldConfig::default(), ExecTable::default());
        let before = p.len();
        let (_, link) = t.specialized_definition(&mut p, &call, GeneralizeStrategy::Id, &ucfg, &table, false).unwrap();
        assert_eq!(p.len(), before + 2);
        let shown: Vec<String> =
            p.clauses()[before..].iter().map(|c| clause_to_string(c, &mut Namer::new())).collect();
        let name = link.pred.to_string();
        assert_eq!(
            shown,
            vec![format!("{}(0,0).", name), format!("{}(s(A),s(s(B))) :- tw(A,B).", name)]
        );
        let again = call.rename_apart();
        let (_, link2) = t.specialized_definition(&mut p, &again, GeneralizeStrategy::Id, &ucfg, &table, false).unwrap();
        assert_eq!(p.len(), before + 2);
        assert_eq!(link2.pred, link.pred);
        assert_eq!(t.st.len(), 1);
    }
}
