//! Abstract domains over variable scopes, and abstract atoms.

mod pd;
mod shfr;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

pub use pd::Pd;
pub use shfr::ShFr;

use crate::subst::{canonical_renaming, mgu, mgu_args, Subst};
use crate::term::{atom_to_string, Atom, Namer, Term, Var};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("variable outside the description scope: {0}")]
    Scope(String),
}

/// A description of a set of concrete substitutions over an ordered scope.
///
/// Values are kept in canonical form, so `Eq`/`Ord` on values over the same
/// scope coincide with equality of descriptions.
pub trait AbstractDomain: Clone + Eq + Ord + Hash + Debug + Send + Sync + 'static {
    const NAME: &'static str;
    /// Descriptions stay valid under further instantiation.
    const DOWNWARDS_CLOSED: bool;

    fn bottom(scope: &[Var]) -> Self;
    fn top(scope: &[Var]) -> Self;
    fn is_bottom(&self) -> bool;
    /// Sorted by variable id.
    fn scope(&self) -> &[Var];

    /// Projection onto `vars`; variables outside the scope are ignored.
    fn restrict(&self, vars: &[Var]) -> Self;
    /// Adds the new variables of `vars` as free and independent.
    fn extend(&self, vars: &[Var]) -> Self;
    /// Adds the bindings of an idempotent mgu one at a time. Variables of
    /// `theta` must be in scope.
    fn apply_mgu(&self, theta: &Subst) -> Self;
    fn conj(&self, other: &Self) -> Self;
    fn lub(&self, other: &Self) -> Self;
    fn leq(&self, other: &Self) -> bool;
    /// Renames scope variables; unmapped ones are kept.
    fn rename(&self, map: &BTreeMap<Var, Var>) -> Self;

    /// `ground` variables ground, `free` variables free and unaliased, the
    /// rest of the scope unknown.
    fn from_modes(scope: &[Var], ground: &[Var], free: &[Var]) -> Result<Self, DomainError>;
    fn entails_ground(&self, v: Var) -> bool;
    fn entails_free(&self, v: Var) -> bool;

    /// Conjoins the success description `success` of a call over `lvars`
    /// with `self`, the description just before the call.
    fn combine_success(&self, lvars: &[Var], success: &Self) -> Self;
    /// Success of `ground(t)` with `vars(t) = vars`.
    fn assume_ground(&self, vars: &[Var]) -> Self;
    /// Success of `var(X)`.
    fn assume_free(&self, v: Var) -> Self;
    /// Success of a call about which nothing is known.
    fn unknown_call(&self, vars: &[Var]) -> Self;

    /// Concretization membership: the substitution `sigma`, read as the
    /// current bindings of the scope variables, is described by `self`.
    fn satisfies(&self, sigma: &Subst) -> bool;

    /// `{X/G,Y/V,Z/A}`: ground, free, neither.
    fn render(&self, namer: &mut Namer) -> String;
    fn to_json(&self, namer: &mut Namer) -> serde_json::Value;

    /// Adds the equation `a = b`; bottom when it has no unifier.
    fn unify(&self, a: &Term, b: &Term) -> Self {
        match mgu(a, b) {
            None => Self::bottom(self.scope()),
            Some(theta) => self.apply_mgu(&theta),
        }
    }

    /// Unifies the argument lists; predicate symbols are not compared.
    fn unify_atoms(&self, a: &Atom, b: &Atom) -> Self {
        match mgu_args(&a.args, &b.args) {
            None => Self::bottom(self.scope()),
            Some(theta) => self.apply_mgu(&theta),
        }
    }
}

/// An atom with a description over exactly its variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractAtom<D> {
    pub atom: Atom,
    pub cp: D,
}

impl<D: AbstractDomain> AbstractAtom<D> {
    pub fn new(atom: Atom, cp: D) -> AbstractAtom<D> {
        debug_assert_eq!(sorted(atom.vars()), cp.scope().to_vec());
        AbstractAtom { atom, cp }
    }

    /// Variant key: variables renumbered canonically in first-occurrence order.
    pub fn canonical(&self) -> AbstractAtom<D> {
        let map = canonical_renaming(&self.atom.vars());
        self.rename(&map)
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> AbstractAtom<D> {
        AbstractAtom {
            atom: self.atom.rename(&mut |v| *map.get(&v).unwrap_or(&v)),
            cp: self.cp.rename(map),
        }
    }

    /// A variant with fresh variables.
    pub fn rename_apart(&self) -> AbstractAtom<D> {
        let map: BTreeMap<Var, Var> = self.atom.vars().into_iter().map(|v| (v, Var::fresh())).collect();
        self.rename(&map)
    }

    pub fn is_variant_of(&self, other: &AbstractAtom<D>) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn render(&self) -> String {
        let mut namer = Namer::new();
        let atom = atom_to_string(&self.atom, &mut namer);
        format!("{}:{}", atom, self.cp.render(&mut namer))
    }
}

pub fn sorted(mut vars: Vec<Var>) -> Vec<Var> {
    vars.sort();
    vars.dedup();
    vars
}

/// Adapts `call` to a clause whose head is `head` and whose variables are
/// `clause_vars`: extend, unify the arguments, project. The clause must be
/// renamed apart from the call. Predicates are not compared.
pub fn atranslate<D: AbstractDomain>(call: &AbstractAtom<D>, head: &Atom, clause_vars: &[Var]) -> D {
    let ext = call.cp.extend(clause_vars);
    ext.unify_atoms(&call.atom, head).restrict(clause_vars)
}

/// `A1:CP1 ⊑ A2:CP2`: `A1` is an instance of `A2` and every concretization of
/// the left side is one of the right side.
pub fn abstract_atom_leq<D: AbstractDomain>(a1: &AbstractAtom<D>, a2: &AbstractAtom<D>) -> bool {
    if a1.atom.pred != a2.atom.pred || a1.atom.arity() != a2.atom.arity() {
        return false;
    }
    let a2 = a2.rename_apart();
    if crate::subst::match_atom(&a2.atom, &a1.atom).is_none() {
        return false;
    }
    let image = atranslate(a1, &a2.atom, &a2.atom.vars());
    image.leq(&a2.cp)
}

/// Call widening: the identity, as both domains are finite.
pub fn widen_call<D: AbstractDomain>(call: &AbstractAtom<D>) -> AbstractAtom<D> {
    call.clone()
}
