//! Answer and dependency tables.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::domain::{AbstractAtom, AbstractDomain};
use crate::subst::canonical_renaming;
use crate::term::{Atom, Clause, RuleNo, Var};

/// Where a dependent computation resumes: literal `i` of a clause instance,
/// or nowhere for an initial query.
#[derive(Clone, Debug)]
pub enum Resume<D> {
    Entry,
    Literal {
        /// The OR-node whose clause contains the literal.
        node: AbstractAtom<D>,
        /// Call atom translated onto the specialized definition; shares
        /// variables with `node`'s call atom but not with `clause`.
        link: Atom,
        clause: Rc<Clause>,
        /// Identifies the clause instance across re-runs.
        instance: usize,
        /// Description over `vars(clause)` just before the literal.
        cp: D,
        k: RuleNo,
        i: usize,
    },
}

#[derive(Clone, Debug)]
pub struct DependencyEntry<D> {
    pub resume: Resume<D>,
}

impl<D> DependencyEntry<D> {
    pub fn entry() -> Self {
        DependencyEntry { resume: Resume::Entry }
    }

    pub fn is_entry(&self) -> bool {
        matches!(self.resume, Resume::Entry)
    }

    /// `(instance, i)` for literal dependencies.
    pub fn coords(&self) -> Option<(usize, usize)> {
        match &self.resume {
            Resume::Entry => None,
            Resume::Literal { instance, i, .. } => Some((*instance, *i)),
        }
    }
}

/// How a body literal is resolved in the residual program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiteralResolution<D> {
    /// An abstract atom, in canonical form, that was processed as a call.
    Call(AbstractAtom<D>),
    External,
}

/// A canonical key together with the renaming back to the caller's variables.
pub struct Keyed<D> {
    pub key: AbstractAtom<D>,
    pub back: BTreeMap<Var, Var>,
}

impl<D: AbstractDomain> Keyed<D> {
    pub fn of(a: &AbstractAtom<D>) -> Keyed<D> {
        let map = canonical_renaming(&a.atom.vars());
        let back = map.iter().map(|(v, c)| (*c, *v)).collect();
        Keyed { key: a.rename(&map), back }
    }

    pub fn restore(&self, d: &D) -> D {
        d.rename(&self.back)
    }
}
