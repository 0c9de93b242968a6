//! Substitutions, unification with occurs check, one-way matching and
//! variant canonicalization.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::term::{Atom, Clause, Term, Var};

/// Finite map from variables to terms, kept idempotent: no bound variable
/// occurs in any range term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Subst {
        Subst { map: pairs.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = Var> + '_ {
        self.map.keys().copied()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply(t)).collect() }
    }

    pub fn apply_goal(&self, g: &[Atom]) -> Vec<Atom> {
        g.iter().map(|a| self.apply_atom(a)).collect()
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause { number: c.number, head: self.apply_atom(&c.head), body: self.apply_goal(&c.body) }
    }

    /// Adds `v ↦ t`, keeping the substitution idempotent. `t` must already be
    /// fully dereferenced and must not contain `v`.
    fn bind(&mut self, v: Var, t: Term) {
        let single = Subst::from_pairs([(v, t.clone())]);
        for range in self.map.values_mut() {
            if range.occurs(v) {
                *range = single.apply(range);
            }
        }
        self.map.insert(v, t);
    }

    /// Composition `self` then `other`: applying the result equals applying
    /// `self` and then `other`.
    pub fn compose(&self, other: &Subst) -> Subst {
        let mut map: BTreeMap<Var, Term> =
            self.map.iter().map(|(v, t)| (*v, other.apply(t))).collect();
        for (v, t) in &other.map {
            map.entry(*v).or_insert_with(|| t.clone());
        }
        map.retain(|v, t| t.as_var() != Some(*v));
        Subst { map }
    }

    /// Restriction to the given variables.
    pub fn restrict(&self, vars: &[Var]) -> Subst {
        Subst { map: self.map.iter().filter(|(v, _)| vars.contains(v)).map(|(v, t)| (*v, t.clone())).collect() }
    }
}

/// Extends `s` to also unify `a` and `b`. Returns `false` on clash or
/// occurs-check failure (in which case `s` is left in an unspecified state).
pub fn unify_into(s: &mut Subst, a: &Term, b: &Term) -> bool {
    // Subterms of the inputs are borrowed; dereferenced bindings are cloned
    // once and then taken apart by value, so no subterm is copied twice.
    let mut stack: Vec<(Cow<Term>, Cow<Term>)> = vec![(Cow::Borrowed(a), Cow::Borrowed(b))];
    while let Some((x, y)) = stack.pop() {
        let x = deref(s, x);
        let y = deref(s, y);
        match (x.as_ref(), y.as_ref()) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                let t = s.apply(t);
                if t.occurs(*v) {
                    return false;
                }
                s.bind(*v, t);
            }
            (Term::Const(c), Term::Const(d)) => {
                if c != d {
                    return false;
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                let left = split(x);
                let right = split(y);
                stack.extend(left.into_iter().zip(right));
            }
            _ => return false,
        }
    }
    true
}

/// One level of dereferencing suffices as `s` is idempotent.
fn deref<'a>(s: &Subst, t: Cow<'a, Term>) -> Cow<'a, Term> {
    match t.as_ref() {
        Term::Var(v) => match s.map.get(v) {
            Some(r) => Cow::Owned(r.clone()),
            None => t,
        },
        _ => t,
    }
}

fn split(t: Cow<Term>) -> Vec<Cow<Term>> {
    match t {
        Cow::Borrowed(t) => t.args().iter().map(Cow::Borrowed).collect(),
        Cow::Owned(Term::App(_, xs)) => xs.into_iter().map(Cow::Owned).collect(),
        Cow::Owned(_) => Vec::new(),
    }
}

/// Most general unifier in idempotent form, with occurs check.
pub fn mgu(a: &Term, b: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    unify_into(&mut s, a, b).then_some(s)
}

pub fn mgu_atoms(a: &Atom, b: &Atom) -> Option<Subst> {
    if a.pred != b.pred || a.arity() != b.arity() {
        return None;
    }
    mgu(&a.to_term(), &b.to_term())
}

/// Unifies argument lists pairwise, ignoring predicate symbols.
pub fn mgu_args(a: &[Term], b: &[Term]) -> Option<Subst> {
    if a.len() != b.len() {
        return None;
    }
    let mut s = Subst::new();
    for (x, y) in a.iter().zip(b) {
        if !unify_into(&mut s, x, y) {
            return None;
        }
    }
    Some(s)
}

/// One-way matching: a substitution `θ` over `vars(pattern)` with
/// `θ(pattern) = target`. Variables of `target` are treated as constants, so
/// the two sides may share variable ids.
pub fn match_term(pattern: &Term, target: &Term) -> Option<Subst> {
    let mut map: BTreeMap<Var, Term> = BTreeMap::new();
    if match_into(&mut map, pattern, target) {
        Some(Subst { map })
    } else {
        None
    }
}

fn match_into(map: &mut BTreeMap<Var, Term>, p: &Term, t: &Term) -> bool {
    match (p, t) {
        (Term::Var(v), _) => match map.get(v) {
            Some(bound) => bound == t,
            None => {
                map.insert(*v, t.clone());
                true
            }
        },
        (Term::Const(c), Term::Const(d)) => c == d,
        (Term::App(f, ps), Term::App(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(a, b)| match_into(map, a, b))
        }
        _ => false,
    }
}

pub fn match_atom(pattern: &Atom, target: &Atom) -> Option<Subst> {
    if pattern.pred != target.pred || pattern.arity() != target.arity() {
        return None;
    }
    match_term(&pattern.to_term(), &target.to_term())
}

/// `specific` is an instance of `general`.
pub fn is_instance(specific: &Term, general: &Term) -> bool {
    match_term(general, specific).is_some()
}

pub fn is_variant(a: &Term, b: &Term) -> bool {
    match match_term(a, b) {
        Some(s) => {
            // a bijective variable renaming
            let mut seen = Vec::new();
            s.iter().all(|(_, t)| match t {
                Term::Var(w) if !seen.contains(w) => {
                    seen.push(*w);
                    true
                }
                _ => false,
            })
        }
        None => false,
    }
}

pub fn is_strict_instance(specific: &Term, general: &Term) -> bool {
    is_instance(specific, general) && !is_instance(general, specific)
}

/// Renames the variables of `vars` (in order) to canonical ids `0..n`.
pub fn canonical_renaming(vars: &[Var]) -> BTreeMap<Var, Var> {
    vars.iter().enumerate().map(|(i, v)| (*v, Var::canonical(i))).collect()
}
