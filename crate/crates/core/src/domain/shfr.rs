//! Set sharing with freeness.
//!
//! A value is either bottom or a pair `(SH, FR)`: `SH` holds the possible
//! sharing groups (sets of scope variables whose bindings may share a
//! variable) and `FR` the definitely free variables. A scope variable in no
//! group is ground.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use super::{sorted, AbstractDomain, DomainError};
use crate::subst::Subst;
use crate::term::{Namer, Term, Var};

type Group = BTreeSet<Var>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShFr {
    scope: Vec<Var>,
    value: Option<Payload>,
}

/// Invariants: groups are nonempty subsets of the scope; every free variable
/// occurs in some group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Payload {
    sh: BTreeSet<Group>,
    fr: BTreeSet<Var>,
}

impl Payload {
    fn covered(&self) -> BTreeSet<Var> {
        self.sh.iter().flatten().copied().collect()
    }

    /// Drops free variables that became ground; `None` if that contradicts.
    fn normalize(mut self, strict: bool) -> Option<Payload> {
        let covered = self.covered();
        if strict && !self.fr.is_subset(&covered) {
            return None;
        }
        self.fr.retain(|v| covered.contains(v));
        Some(self)
    }
}

fn star(groups: &[Group]) -> BTreeSet<Group> {
    let mut out: BTreeSet<Group> = groups.iter().cloned().collect();
    loop {
        let mut added = Vec::new();
        for a in &out {
            for b in &out {
                let u: Group = a.union(b).copied().collect();
                if !out.contains(&u) {
                    added.push(u);
                }
            }
        }
        if added.is_empty() {
            return out;
        }
        out.extend(added);
    }
}

fn bin(xs: &BTreeSet<Group>, ys: &BTreeSet<Group>) -> BTreeSet<Group> {
    let mut out = BTreeSet::new();
    for a in xs {
        for b in ys {
            out.insert(a.union(b).copied().collect());
        }
    }
    out
}

fn nonempty_subsets(vars: &[Var]) -> BTreeSet<Group> {
    assert!(vars.len() < 20, "sharing top over {} variables is too large", vars.len());
    (1u32..(1 << vars.len()))
        .map(|mask| vars.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| *v).collect())
        .collect()
}

impl ShFr {
    fn with(scope: &[Var], value: Option<Payload>) -> ShFr {
        ShFr { scope: sorted(scope.to_vec()), value }
    }

    /// Raw constructor for tests and table loading. Returns `None` if the
    /// components break the representation invariants.
    pub fn from_parts(scope: &[Var], sh: Vec<Vec<Var>>, fr: Vec<Var>) -> Option<ShFr> {
        let scope = sorted(scope.to_vec());
        let sh: BTreeSet<Group> = sh.into_iter().map(|g| g.into_iter().collect::<Group>()).collect();
        let fr: BTreeSet<Var> = fr.into_iter().collect();
        if sh.iter().any(|g| g.is_empty() || g.iter().any(|v| !scope.contains(v))) {
            return None;
        }
        let p = Payload { sh, fr };
        if !p.fr.is_subset(&p.covered()) {
            return None;
        }
        Some(ShFr { scope, value: Some(p) })
    }

    pub fn sharing(&self) -> Option<&BTreeSet<BTreeSet<Var>>> {
        self.value.as_ref().map(|p| &p.sh)
    }

    pub fn free(&self) -> Option<&BTreeSet<Var>> {
        self.value.as_ref().map(|p| &p.fr)
    }

    fn map(&self, f: impl FnOnce(&Payload) -> Option<Payload>) -> ShFr {
        ShFr { scope: self.scope.clone(), value: self.value.as_ref().and_then(f) }
    }

    /// One binding `x = t` of an idempotent mgu.
    fn amgu(p: &Payload, x: Var, t: &Term) -> Option<Payload> {
        let vt = t.vars();
        let meets_t = |g: &Group| vt.iter().any(|v| g.contains(v));
        let rel_x: Vec<Group> = p.sh.iter().filter(|g| g.contains(&x)).cloned().collect();
        let rel_t: Vec<Group> = p.sh.iter().filter(|g| meets_t(g)).cloned().collect();
        let mut sh: BTreeSet<Group> = p.sh.iter().filter(|g| !g.contains(&x) && !meets_t(g)).cloned().collect();
        let x_free = p.fr.contains(&x);
        let t_free_var = t.as_var().map_or(false, |y| p.fr.contains(&y));
        if !vt.is_empty() {
            // a free side is bound to one variable, so its groups need no closure
            let linear = x_free || t_free_var;
            let close = |gs: &[Group]| if linear { gs.iter().cloned().collect() } else { star(gs) };
            sh.extend(bin(&close(&rel_x), &close(&rel_t)));
        }

        let vars_of = |gs: &[Group]| -> BTreeSet<Var> { gs.iter().flatten().copied().collect() };
        let mut fr = p.fr.clone();
        if x_free && t_free_var {
            // aliasing two free variables keeps everything free
        } else if x_free {
            fr = &fr - &vars_of(&rel_x);
        } else if t_free_var {
            fr = &fr - &vars_of(&rel_t);
        } else {
            fr = &(&fr - &vars_of(&rel_x)) - &vars_of(&rel_t);
        }
        Payload { sh, fr }.normalize(false)
    }
}

impl AbstractDomain for ShFr {
    const NAME: &'static str = "shfr";
    const DOWNWARDS_CLOSED: bool = false;

    fn bottom(scope: &[Var]) -> Self {
        ShFr::with(scope, None)
    }

    fn top(scope: &[Var]) -> Self {
        let scope = sorted(scope.to_vec());
        let sh = nonempty_subsets(&scope);
        ShFr { scope, value: Some(Payload { sh, fr: BTreeSet::new() }) }
    }

    fn is_bottom(&self) -> bool {
        self.value.is_none()
    }

    fn scope(&self) -> &[Var] {
        &self.scope
    }

    fn restrict(&self, vars: &[Var]) -> Self {
        let keep: BTreeSet<Var> = vars.iter().copied().filter(|v| self.scope.contains(v)).collect();
        let scope: Vec<Var> = keep.iter().copied().collect();
        ShFr {
            scope,
            value: self.value.as_ref().map(|p| Payload {
                sh: p
                    .sh
                    .iter()
                    .map(|g| g.intersection(&keep).copied().collect::<Group>())
                    .filter(|g| !g.is_empty())
                    .collect(),
                fr: p.fr.intersection(&keep).copied().collect(),
            }),
        }
    }

    fn extend(&self, vars: &[Var]) -> Self {
        let new: Vec<Var> = sorted(vars.iter().copied().filter(|v| !self.scope.contains(v)).collect());
        let mut scope = self.scope.clone();
        scope.extend(&new);
        let value = self.value.as_ref().map(|p| {
            let mut p = p.clone();
            for v in &new {
                p.sh.insert(BTreeSet::from([*v]));
                p.fr.insert(*v);
            }
            p
        });
        ShFr::with(&scope, value)
    }

    fn apply_mgu(&self, theta: &Subst) -> Self {
        let mut cur = self.value.clone();
        for (x, t) in theta.iter() {
            debug_assert!(self.scope.contains(x) && t.vars().iter().all(|v| self.scope.contains(v)));
            cur = match cur {
                Some(p) => ShFr::amgu(&p, *x, t),
                None => None,
            };
        }
        ShFr { scope: self.scope.clone(), value: cur }
    }

    fn conj(&self, other: &Self) -> Self {
        debug_assert_eq!(self.scope, other.scope);
        match (&self.value, &other.value) {
            (Some(a), Some(b)) => {
                let p = Payload {
                    sh: a.sh.intersection(&b.sh).cloned().collect(),
                    fr: a.fr.union(&b.fr).copied().collect(),
                };
                ShFr { scope: self.scope.clone(), value: p.normalize(true) }
            }
            _ => ShFr::bottom(&self.scope),
        }
    }

    fn lub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.scope, other.scope);
        match (&self.value, &other.value) {
            (Some(a), Some(b)) => ShFr {
                scope: self.scope.clone(),
                value: Some(Payload {
                    sh: a.sh.union(&b.sh).cloned().collect(),
                    fr: a.fr.intersection(&b.fr).copied().collect(),
                }),
            },
            (None, _) => other.clone(),
            (_, None) => self.clone(),
        }
    }

    fn leq(&self, other: &Self) -> bool {
        match (&self.value, &other.value) {
            (None, _) => true,
            (_, None) => false,
            (Some(a), Some(b)) => a.sh.is_subset(&b.sh) && a.fr.is_superset(&b.fr),
        }
    }

    fn rename(&self, map: &BTreeMap<Var, Var>) -> Self {
        let r = |v: &Var| *map.get(v).unwrap_or(v);
        let scope: Vec<Var> = self.scope.iter().map(r).collect();
        ShFr::with(
            &scope,
            self.value.as_ref().map(|p| Payload {
                sh: p.sh.iter().map(|g| g.iter().map(r).collect()).collect(),
                fr: p.fr.iter().map(r).collect(),
            }),
        )
    }

    fn from_modes(scope: &[Var], ground: &[Var], free: &[Var]) -> Result<Self, DomainError> {
        if let Some(v) = ground.iter().chain(free).find(|v| !scope.contains(v)) {
            return Err(DomainError::Scope(format!("{:?}", v)));
        }
        let unknown: Vec<Var> =
            sorted(scope.iter().copied().filter(|v| !ground.contains(v) && !free.contains(v)).collect());
        let mut sh = nonempty_subsets(&unknown);
        for v in free {
            sh.insert(BTreeSet::from([*v]));
        }
        Ok(ShFr::with(scope, Some(Payload { sh, fr: free.iter().copied().collect() })))
    }

    fn entails_ground(&self, v: Var) -> bool {
        match &self.value {
            None => true,
            Some(p) => self.scope.contains(&v) && !p.sh.iter().any(|g| g.contains(&v)),
        }
    }

    fn entails_free(&self, v: Var) -> bool {
        match &self.value {
            None => true,
            Some(p) => p.fr.contains(&v),
        }
    }

    fn combine_success(&self, lvars: &[Var], success: &Self) -> Self {
        let (call, succ) = match (&self.value, &success.value) {
            (Some(c), Some(s)) => (c, s),
            _ => return ShFr::bottom(&self.scope),
        };
        let lv: BTreeSet<Var> = lvars.iter().copied().collect();
        let mut sh: BTreeSet<Group> = call.sh.iter().filter(|g| g.is_disjoint(&lv)).cloned().collect();
        for g in &succ.sh {
            let cand: Vec<&Group> = call
                .sh
                .iter()
                .filter(|c| {
                    let proj: Group = c.intersection(&lv).copied().collect();
                    !proj.is_empty() && proj.is_subset(g)
                })
                .collect();
            assert!(cand.len() < 20, "too many sharing groups to combine");
            for mask in 1u32..(1 << cand.len()) {
                let u: Group =
                    cand.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).flat_map(|(_, c)| c.iter().copied()).collect();
                let proj: Group = u.intersection(&lv).copied().collect();
                if proj == *g {
                    sh.insert(u);
                }
            }
        }
        let mut fr: BTreeSet<Var> = succ.fr.iter().copied().filter(|v| lv.contains(v)).collect();
        for x in call.fr.iter().filter(|x| !lv.contains(x)) {
            let blocked = call.sh.iter().filter(|g| g.contains(x)).flatten().any(|y| lv.contains(y) && !succ.fr.contains(y));
            if !blocked {
                fr.insert(*x);
            }
        }
        ShFr { scope: self.scope.clone(), value: Payload { sh, fr }.normalize(true) }
    }

    fn assume_ground(&self, vars: &[Var]) -> Self {
        self.map(|p| {
            Payload { sh: p.sh.iter().filter(|g| vars.iter().all(|v| !g.contains(v))).cloned().collect(), fr: p.fr.clone() }
                .normalize(true)
        })
    }

    fn assume_free(&self, v: Var) -> Self {
        self.map(|p| {
            let mut p = p.clone();
            p.fr.insert(v);
            p.normalize(true)
        })
    }

    fn unknown_call(&self, vars: &[Var]) -> Self {
        self.map(|p| {
            let (rel, irr): (Vec<Group>, Vec<Group>) =
                p.sh.iter().cloned().partition(|g| vars.iter().any(|v| g.contains(v)));
            let touched: BTreeSet<Var> = rel.iter().flatten().copied().collect();
            let mut sh: BTreeSet<Group> = irr.into_iter().collect();
            sh.extend(star(&rel));
            Some(Payload { sh, fr: &p.fr - &touched })
        })
    }

    fn satisfies(&self, sigma: &Subst) -> bool {
        let p = match &self.value {
            None => return false,
            Some(p) => p,
        };
        let values: Vec<(Var, Term)> = self.scope.iter().map(|v| (*v, sigma.apply(&Term::Var(*v)))).collect();
        for (v, t) in &values {
            if p.fr.contains(v) && t.as_var().is_none() {
                return false;
            }
        }
        let mut occ: BTreeMap<Var, Group> = BTreeMap::new();
        for (v, t) in &values {
            for w in t.vars() {
                occ.entry(w).or_default().insert(*v);
            }
        }
        occ.values().all(|g| p.sh.contains(g))
    }

    fn render(&self, namer: &mut Namer) -> String {
        let p = match &self.value {
            None => return "bottom".to_string(),
            Some(p) => p,
        };
        let covered = p.covered();
        let items: Vec<String> = self
            .scope
            .iter()
            .map(|v| {
                let mode = if !covered.contains(v) {
                    "G"
                } else if p.fr.contains(v) {
                    "V"
                } else {
                    "A"
                };
                format!("{}/{}", namer.name(*v), mode)
            })
            .collect();
        format!("{{{}}}", items.join(","))
    }

    fn to_json(&self, namer: &mut Namer) -> serde_json::Value {
        let scope: Vec<String> = self.scope.iter().map(|v| namer.name(*v)).collect();
        match &self.value {
            None => json!({ "scope": scope, "bottom": true }),
            Some(p) => {
                let sh: Vec<Vec<String>> = p.sh.iter().map(|g| g.iter().map(|v| namer.name(*v)).collect()).collect();
                let fr: Vec<String> = p.fr.iter().map(|v| namer.name(*v)).collect();
                json!({ "scope": scope, "sharing": sh, "free": fr, "mode": self.render(namer) })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(n: usize) -> Vec<Var> {
        (0..n).map(|_| Var::fresh()).collect()
    }

    fn set(vs: &[Var]) -> Group {
        vs.iter().copied().collect()
    }

    #[test]
    fn restrict_projects_groups() {
        let v = vars(3);
        let (x, y, z) = (v[0], v[1], v[2]);
        let d = ShFr::from_parts(&v, vec![vec![x, y], vec![z]], vec![z]).unwrap();
        let r = d.restrict(&[x, z]);
        assert_eq!(r.sharing().unwrap(), &BTreeSet::from([set(&[x]), set(&[z])]));
        assert_eq!(r.free().unwrap(), &set(&[z]));
        assert_eq!(d.restrict(&v), d);
    }

    #[test]
    fn bind_free_to_compound() {
        let v = vars(3);
        let (x, y, z) = (v[0], v[1], v[2]);
        let d = ShFr::from_modes(&v, &[], &v).unwrap();
        let r = d.unify(&Term::Var(x), &Term::app("f", vec![Term::Var(y), Term::Var(z)]));
        assert_eq!(r.sharing().unwrap(), &BTreeSet::from([set(&[x, y]), set(&[x, z])]));
        assert_eq!(r.free().unwrap(), &set(&[y, z]));
    }

    #[test]
    fn bind_to_constant_grounds() {
        let x = Var::fresh();
        let d = ShFr::from_modes(&[x], &[], &[x]).unwrap();
        let r = d.unify(&Term::Var(x), &Term::constant("a"));
        assert!(r.sharing().unwrap().is_empty());
        assert!(r.free().unwrap().is_empty());
        assert!(r.entails_ground(x));
    }

    #[test]
    fn lub_of_ground_and_free_is_unknown() {
        let x = Var::fresh();
        let g = ShFr::from_modes(&[x], &[x], &[]).unwrap();
        let f = ShFr::from_modes(&[x], &[], &[x]).unwrap();
        let u = g.lub(&f);
        assert!(!u.entails_ground(x) && !u.entails_free(x));
        assert_eq!(u.render(&mut Namer::new()), "{A/A}");
    }

    #[test]
    fn extend_then_restrict_is_identity() {
        let v = vars(2);
        let d = ShFr::top(&v);
        let w = Var::fresh();
        let e = d.extend(&[w]);
        assert!(e.entails_free(w));
        assert_eq!(e.restrict(&v), d);
    }

    #[test]
    fn units_and_absorbers() {
        let v = vars(2);
        let d = ShFr::from_modes(&v, &[v[0]], &[v[1]]).unwrap();
        let (top, bot) = (ShFr::top(&v), ShFr::bottom(&v));
        assert_eq!(d.conj(&top), d);
        assert!(d.conj(&bot).is_bottom());
        assert_eq!(d.lub(&bot), d);
        assert_eq!(d.lub(&d), d);
    }

    #[test]
    fn sharing_witness_needs_group() {
        let v = vars(2);
        let (x, y) = (v[0], v[1]);
        let z = Var::fresh();
        let sigma = Subst::from_pairs([
            (x, Term::app("f", vec![Term::Var(z)])),
            (y, Term::app("g", vec![Term::Var(z)])),
        ]);
        let indep = ShFr::from_parts(&v, vec![vec![x], vec![y]], vec![]).unwrap();
        let shared = ShFr::from_parts(&v, vec![vec![x, y]], vec![]).unwrap();
        assert!(!indep.satisfies(&sigma));
        assert!(shared.satisfies(&sigma));
        let ground = ShFr::from_modes(&[x], &[x], &[]).unwrap();
        assert!(ground.satisfies(&Subst::from_pairs([(x, Term::app("s", vec![Term::constant("0")]))])));
        assert!(!ground.satisfies(&Subst::new()));
    }

    #[test]
    fn entry_description() {
        let v = vars(2);
        let (l, r) = (v[0], v[1]);
        let d = ShFr::from_modes(&v, &[l], &[r]).unwrap();
        assert_eq!(d.sharing().unwrap(), &BTreeSet::from([set(&[r])]));
        assert_eq!(d.free().unwrap(), &set(&[r]));
        assert_eq!(ShFr::from_modes(&v, &[], &[]).unwrap(), ShFr::top(&v));
    }

    #[test]
    fn success_propagates_groundness() {
        // tw(B,C) called with B ground, C free; succeeds with both ground
        let v = vars(3);
        let (a, b, c) = (v[0], v[1], v[2]);
        let before = ShFr::from_modes(&v, &[b], &[a, c]).unwrap();
        let lv = sorted(vec![b, c]);
        let succ = ShFr::from_modes(&lv, &lv, &[]).unwrap();
        let after = before.combine_success(&lv, &succ);
        assert!(after.entails_ground(b) && after.entails_ground(c));
        assert!(after.entails_free(a));
    }

    #[test]
    fn success_may_alias_free_variables() {
        // p(X,Y) called with both free may return them aliased
        let v = vars(3);
        let (x, y, z) = (v[0], v[1], v[2]);
        let before = ShFr::from_parts(&v, vec![vec![x], vec![y, z]], vec![x, y, z]).unwrap();
        let lv = sorted(vec![x, y]);
        let succ = ShFr::from_parts(&lv, vec![vec![x, y]], vec![x, y]).unwrap();
        let after = before.combine_success(&lv, &succ);
        assert_eq!(after.sharing().unwrap(), &BTreeSet::from([set(&[x, y, z])]));
        assert_eq!(after.free().unwrap(), &set(&[x, y, z]));
    }

    #[test]
    fn mode_tests() {
        let x = Var::fresh();
        let free = ShFr::from_modes(&[x], &[], &[x]).unwrap();
        assert!(free.assume_ground(&[x]).is_bottom());
        let unknown = ShFr::top(&[x]);
        assert!(unknown.assume_ground(&[x]).entails_ground(x));
        assert!(unknown.assume_free(x).entails_free(x));
        let ground = ShFr::from_modes(&[x], &[x], &[]).unwrap();
        assert!(ground.assume_free(x).is_bottom());
    }
}
