//! Abstract executability table: `T : Guard ~> T'` entries describing when an
//! external predicate call can be replaced by `true`, `false` or a simpler atom.

use std::collections::BTreeSet;

use crate::subst::{match_atom, Subst};
use crate::term::{Atom, PredKey, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Ground,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replacement {
    True,
    False,
    Atom(Atom),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecEntry {
    pub pattern: Atom,
    pub guard: Vec<(Var, Mode)>,
    pub replacement: Replacement,
}

impl ExecEntry {
    pub fn new(pattern: Atom, guard: Vec<(Var, Mode)>, replacement: Replacement) -> Result<ExecEntry, String> {
        let vars = pattern.vars();
        let mut seen = BTreeSet::new();
        for (v, _) in &guard {
            if !vars.contains(v) {
                return Err(format!("guard variable does not occur in {}", pattern));
            }
            if !seen.insert(*v) {
                return Err(format!("two guards on one variable in {}", pattern));
            }
        }
        if let Replacement::Atom(a) = &replacement {
            if a.vars().iter().any(|v| !vars.contains(v)) {
                return Err(format!("replacement {} introduces new variables", a));
            }
        }
        Ok(ExecEntry { pattern, guard, replacement })
    }

    /// Matches the pattern against `atom`; on success returns the matcher and
    /// the guard requirements expressed on the matched argument terms.
    pub fn instantiate(&self, atom: &Atom) -> Option<(Subst, Vec<(Term, Mode)>)> {
        let theta = match_atom(&self.pattern, atom)?;
        let reqs = self.guard.iter().map(|(v, m)| (theta.apply(&Term::Var(*v)), *m)).collect();
        Some((theta, reqs))
    }

    pub fn replacement_for(&self, theta: &Subst) -> Replacement {
        match &self.replacement {
            Replacement::Atom(a) => Replacement::Atom(theta.apply_atom(a)),
            r => r.clone(),
        }
    }
}

/// Default entries for the mode tests, followed by user entries which shadow
/// them when both match.
#[derive(Clone, Debug)]
pub struct ExecTable {
    user: Vec<ExecEntry>,
    defaults: Vec<ExecEntry>,
}

impl Default for ExecTable {
    fn default() -> Self {
        ExecTable { user: Vec::new(), defaults: default_exec_table() }
    }
}

impl ExecTable {
    pub fn with_user(user: Vec<ExecEntry>) -> ExecTable {
        ExecTable { user, defaults: default_exec_table() }
    }

    pub fn entries(&self) -> impl Iterator<Item = &ExecEntry> {
        self.user.iter().chain(&self.defaults)
    }

    pub fn entries_for<'a>(&'a self, atom: &'a Atom) -> impl Iterator<Item = &'a ExecEntry> + 'a {
        self.entries().filter(move |e| e.pattern.pred == atom.pred && e.pattern.arity() == atom.arity())
    }

    pub fn is_external(&self, pred: &PredKey) -> bool {
        self.entries().any(|e| e.pattern.key() == *pred)
    }
}

fn mode_entry(pred: &str, mode: Mode, replacement: Replacement) -> ExecEntry {
    let x = Var::fresh();
    ExecEntry { pattern: Atom::new(pred, vec![Term::Var(x)]), guard: vec![(x, mode)], replacement }
}

/// `ground(X):{X/G} ~> true`, `ground(X):{X/V} ~> false`,
/// `var(X):{X/V} ~> true`, `var(X):{X/G} ~> false`.
pub fn default_exec_table() -> Vec<ExecEntry> {
    vec![
        mode_entry("ground", Mode::Ground, Replacement::True),
        mode_entry("ground", Mode::Free, Replacement::False),
        mode_entry("var", Mode::Free, Replacement::True),
        mode_entry("var", Mode::Ground, Replacement::False),
    ]
}

/// The built-in mode tests understood by the reference interpreter and the
/// analyzer.
pub fn is_mode_test(atom: &Atom) -> bool {
    atom.arity() == 1 && matches!(atom.pred.as_ref(), "ground" | "var")
}
