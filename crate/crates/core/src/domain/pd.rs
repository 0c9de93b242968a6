//! The single-valued domain of classical partial deduction: every
//! description is top, except bottom for definitely failing unifications.

use std::collections::BTreeMap;

use serde_json::json;

use super::{sorted, AbstractDomain, DomainError};
use crate::subst::Subst;
use crate::term::{Namer, Var};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pd {
    scope: Vec<Var>,
    bottom: bool,
}

impl Pd {
    fn with(scope: &[Var], bottom: bool) -> Pd {
        Pd { scope: sorted(scope.to_vec()), bottom }
    }

    fn same(&self, bottom: bool) -> Pd {
        Pd { scope: self.scope.clone(), bottom: self.bottom || bottom }
    }
}

impl AbstractDomain for Pd {
    const NAME: &'static str = "pd";
    const DOWNWARDS_CLOSED: bool = true;

    fn bottom(scope: &[Var]) -> Self {
        Pd::with(scope, true)
    }

    fn top(scope: &[Var]) -> Self {
        Pd::with(scope, false)
    }

    fn is_bottom(&self) -> bool {
        self.bottom
    }

    fn scope(&self) -> &[Var] {
        &self.scope
    }

    fn restrict(&self, vars: &[Var]) -> Self {
        let scope: Vec<Var> = vars.iter().copied().filter(|v| self.scope.contains(v)).collect();
        Pd::with(&scope, self.bottom)
    }

    fn extend(&self, vars: &[Var]) -> Self {
        let mut scope = self.scope.clone();
        scope.extend(vars.iter().copied());
        Pd::with(&scope, self.bottom)
    }

    fn apply_mgu(&self, _theta: &Subst) -> Self {
        self.clone()
    }

    fn conj(&self, other: &Self) -> Self {
        self.same(other.bottom)
    }

    fn lub(&self, other: &Self) -> Self {
        Pd { scope: self.scope.clone(), bottom: self.bottom && other.bottom }
    }

    fn leq(&self, other: &Self) -> bool {
        self.bottom || !other.bottom
    }

    fn rename(&self, map: &BTreeMap<Var, Var>) -> Self {
        let scope: Vec<Var> = self.scope.iter().map(|v| *map.get(v).unwrap_or(v)).collect();
        Pd::with(&scope, self.bottom)
    }

    /// Properties carry no information here.
    fn from_modes(scope: &[Var], ground: &[Var], free: &[Var]) -> Result<Self, DomainError> {
        if let Some(v) = ground.iter().chain(free).find(|v| !scope.contains(v)) {
            return Err(DomainError::Scope(format!("{:?}", v)));
        }
        Ok(Pd::top(scope))
    }

    fn entails_ground(&self, _v: Var) -> bool {
        self.bottom
    }

    fn entails_free(&self, _v: Var) -> bool {
        self.bottom
    }

    fn combine_success(&self, _lvars: &[Var], success: &Self) -> Self {
        self.same(success.bottom)
    }

    fn assume_ground(&self, _vars: &[Var]) -> Self {
        self.clone()
    }

    fn assume_free(&self, _v: Var) -> Self {
        self.clone()
    }

    fn unknown_call(&self, _vars: &[Var]) -> Self {
        self.clone()
    }

    fn satisfies(&self, _sigma: &Subst) -> bool {
        !self.bottom
    }

    fn render(&self, _namer: &mut Namer) -> String {
        if self.bottom { "bottom" } else { "top" }.to_string()
    }

    fn to_json(&self, namer: &mut Namer) -> serde_json::Value {
        let scope: Vec<String> = self.scope.iter().map(|v| namer.name(*v)).collect();
        json!({ "scope": scope, "bottom": self.bottom })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    #[test]
    fn single_value() {
        let x = Var::fresh();
        let t = Pd::top(&[x]);
        assert_eq!(t.restrict(&[]), Pd::top(&[]));
        assert_eq!(t.lub(&Pd::bottom(&[x])), t);
        assert!(t.unify(&Term::constant("a"), &Term::constant("b")).is_bottom());
        assert!(!t.unify(&Term::Var(x), &Term::constant("b")).is_bottom());
        assert_eq!(Pd::from_modes(&[x], &[x], &[]).unwrap(), t);
    }
}
