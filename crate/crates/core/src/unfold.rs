//! SLD resolution with abstract substitutions: derivation steps, abstract
//! execution of external predicates, embedding-based local control and
//! resultant extraction.

use std::rc::Rc;

use crate::domain::{AbstractAtom, AbstractDomain};
use crate::frontend::{ExecTable, Mode, Replacement};
use crate::generalize::atom_embeds;
use crate::subst::{mgu_args, Subst};
use crate::term::{goal_vars, Atom, Clause, Namer, Program, RuleNo, Term};

/// Hard bound on the number of steps of a single tree.
pub const UNFOLD_FUSE: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnfoldStrategy {
    HomEmb,
    OneStep,
    DeriveThenAexec,
}

#[derive(Clone, Debug)]
pub struct UnfoldConfig {
    pub strategy: UnfoldStrategy,
    /// Permit selecting an atom right of a blocked one when everything to
    /// its left is pure.
    pub non_leftmost: bool,
    pub trace: bool,
}

impl Default for UnfoldConfig {
    fn default() -> Self {
        UnfoldConfig { strategy: UnfoldStrategy::HomEmb, non_leftmost: false, trace: false }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum UnfoldError {
    #[error("unfolding of {0} exceeded {UNFOLD_FUSE} steps")]
    Fuse(String),
}

/// A goal literal together with the atoms selected on its path from the root.
#[derive(Clone, Debug)]
pub struct Literal {
    pub atom: Atom,
    pub ancestors: Rc<Vec<Atom>>,
    /// Clause position the literal was copied from.
    pub origin: Option<(RuleNo, usize)>,
}

/// Invariant: `cp` is over exactly the variables of `goal`.
#[derive(Clone, Debug)]
pub struct AbstractGoal<D> {
    pub goal: Vec<Literal>,
    pub cp: D,
    pub theta: Subst,
}

impl<D: AbstractDomain> AbstractGoal<D> {
    pub fn root(call: &AbstractAtom<D>) -> AbstractGoal<D> {
        AbstractGoal {
            goal: vec![Literal { atom: call.atom.clone(), ancestors: Rc::new(Vec::new()), origin: None }],
            cp: call.cp.clone(),
            theta: Subst::new(),
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.goal.iter().map(|l| l.atom.clone()).collect()
    }
}

/// `θ(A) ← G` with the description reached at the leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resultant<D> {
    pub head: Atom,
    pub body: Vec<Atom>,
    pub cp: D,
}

/// Outcome of one derivation step against one clause.
pub enum Step<D> {
    Derived(AbstractGoal<D>),
    Blocked,
}

/// Resolves literal `r` of `g` with `clause`, which must be renamed apart.
pub fn derive_step<D: AbstractDomain>(g: &AbstractGoal<D>, r: usize, clause: &Clause) -> Step<D> {
    let selected = &g.goal[r];
    let theta = match mgu_args(&selected.atom.args, &clause.head.args) {
        Some(t) if selected.atom.pred == clause.head.pred => t,
        _ => return Step::Blocked,
    };
    let cp_u = g.cp.extend(&clause.vars()).apply_mgu(&theta);
    if cp_u.is_bottom() {
        return Step::Blocked;
    }
    let mut ancestors = (*selected.ancestors).clone();
    ancestors.push(selected.atom.clone());
    let ancestors = Rc::new(ancestors);
    let mut goal = Vec::with_capacity(g.goal.len() + clause.body.len());
    let apply = |l: &Literal| Literal { atom: theta.apply_atom(&l.atom), ..l.clone() };
    goal.extend(g.goal[..r].iter().map(apply));
    goal.extend(clause.body.iter().enumerate().map(|(i, b)| Literal {
        atom: theta.apply_atom(b),
        ancestors: ancestors.clone(),
        origin: Some((clause.number, i + 1)),
    }));
    goal.extend(g.goal[r + 1..].iter().map(apply));
    let vars = goal_vars(&goal.iter().map(|l| l.atom.clone()).collect::<Vec<_>>());
    Step::Derived(AbstractGoal { goal, cp: cp_u.restrict(&vars), theta: g.theta.compose(&theta) })
}

/// Whether `cp` guarantees `t` has the given mode.
pub fn entails_mode<D: AbstractDomain>(cp: &D, t: &Term, mode: Mode) -> bool {
    match mode {
        Mode::Ground => t.is_ground() || t.vars().iter().all(|v| cp.entails_ground(*v)),
        Mode::Free => t.as_var().map_or(false, |v| cp.entails_free(v)),
    }
}

/// The replacement for `atom` under `cp`, if some table entry applies.
pub fn exec_lookup<D: AbstractDomain>(table: &ExecTable, atom: &Atom, cp: &D) -> Option<Replacement> {
    table.entries_for(atom).find_map(|e| {
        let (theta, reqs) = e.instantiate(atom)?;
        reqs.iter().all(|(t, m)| entails_mode(cp, t, *m)).then(|| e.replacement_for(&theta))
    })
}

pub enum Exec<D> {
    Executed(AbstractGoal<D>),
    Failed,
    NotApplicable,
}

pub fn abstract_execute<D: AbstractDomain>(g: &AbstractGoal<D>, r: usize, table: &ExecTable) -> Exec<D> {
    let lit = &g.goal[r];
    match exec_lookup(table, &lit.atom, &g.cp) {
        None => Exec::NotApplicable,
        Some(Replacement::False) => Exec::Failed,
        Some(rep) => {
            let mut goal = g.goal.clone();
            match rep {
                Replacement::Atom(a) => goal[r].atom = a,
                _ => {
                    goal.remove(r);
                }
            }
            let vars = goal_vars(&goal.iter().map(|l| l.atom.clone()).collect::<Vec<_>>());
            Exec::Executed(AbstractGoal { goal, cp: g.cp.restrict(&vars), theta: g.theta.clone() })
        }
    }
}

/// Stop iff an ancestor of the same predicate embeds into the candidate.
/// Variants count as embedded.
pub fn stop_criterion(ancestors: &[Atom], candidate: &Atom) -> bool {
    ancestors.iter().any(|a| atom_embeds(a, candidate))
}

/// What to do with a goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Execute(usize),
    Derive(usize),
}

pub struct Unfolder<'a, D> {
    pub program: &'a Program,
    pub table: &'a ExecTable,
    pub cfg: &'a UnfoldConfig,
    pub trace: Vec<String>,
    steps: usize,
    _d: std::marker::PhantomData<D>,
}

impl<'a, D: AbstractDomain> Unfolder<'a, D> {
    pub fn new(program: &'a Program, table: &'a ExecTable, cfg: &'a UnfoldConfig) -> Self {
        Unfolder { program, table, cfg, trace: Vec::new(), steps: 0, _d: std::marker::PhantomData }
    }

    fn is_external(&self, a: &Atom) -> bool {
        self.table.is_external(&a.key())
    }

    fn executable(&self, g: &AbstractGoal<D>, r: usize) -> bool {
        exec_lookup(self.table, &g.goal[r].atom, &g.cp).is_some()
    }

    fn derivable(&self, g: &AbstractGoal<D>, r: usize) -> bool {
        let lit = &g.goal[r];
        !self.is_external(&lit.atom) && !stop_criterion(&lit.ancestors, &lit.atom)
    }

    /// Leftmost by default. Abstract execution off the leftmost position
    /// only for downwards-closed domains.
    pub fn select_atom(&self, g: &AbstractGoal<D>) -> Option<Selection> {
        if g.goal.is_empty() {
            return None;
        }
        if self.executable(g, 0) {
            return Some(Selection::Execute(0));
        }
        if self.derivable(g, 0) {
            return Some(Selection::Derive(0));
        }
        if !self.cfg.non_leftmost {
            return None;
        }
        for r in 1..g.goal.len() {
            if self.is_external(&g.goal[r - 1].atom) {
                return None;
            }
            if D::DOWNWARDS_CLOSED && self.executable(g, r) {
                return Some(Selection::Execute(r));
            }
            if self.derivable(g, r) {
                return Some(Selection::Derive(r));
            }
        }
        None
    }

    fn log(&mut self, kind: &str, g: &AbstractGoal<D>, r: usize) {
        if !self.cfg.trace {
            return;
        }
        let lit = &g.goal[r];
        let mut namer = Namer::new();
        let pos = lit.origin.map_or("-".to_string(), |(k, i)| format!("({},{})", k, i));
        let atom = crate::term::atom_to_string(&lit.atom, &mut namer);
        let cp = g.cp.render(&mut namer);
        self.trace.push(format!("{} {} {} {}", kind, pos, atom, cp));
    }

    fn tick(&mut self, root: &Atom) -> Result<(), UnfoldError> {
        self.steps += 1;
        if self.steps > UNFOLD_FUSE {
            return Err(UnfoldError::Fuse(root.to_string()));
        }
        Ok(())
    }

    /// Children of `g` obtained by resolving literal `r` with every clause.
    fn expand(&mut self, g: &AbstractGoal<D>, r: usize) -> Vec<AbstractGoal<D>> {
        self.log("derive", g, r);
        let key = g.goal[r].atom.key();
        let mut out = Vec::new();
        for c in self.program.clauses_for(&key) {
            let (c, _) = c.rename_apart();
            match derive_step(g, r, &c) {
                Step::Derived(child) => out.push(child),
                Step::Blocked => {
                    if self.cfg.trace {
                        self.trace.push(format!("prune clause {} at {}", c.number, g.goal[r].atom));
                    }
                }
            }
        }
        out
    }

    fn leaf(&self, root: &Atom, g: AbstractGoal<D>) -> Resultant<D> {
        Resultant { head: g.theta.apply_atom(root), body: g.atoms(), cp: g.cp }
    }

    /// Exhaustive leftmost abstract execution; `None` if the goal fails.
    fn exec_leftmost(&mut self, mut g: AbstractGoal<D>) -> Option<AbstractGoal<D>> {
        while !g.goal.is_empty() {
            match abstract_execute(&g, 0, self.table) {
                Exec::Executed(next) => {
                    self.log("exec", &g, 0);
                    g = next;
                }
                Exec::Failed => {
                    self.log("fail", &g, 0);
                    return None;
                }
                Exec::NotApplicable => break,
            }
        }
        Some(g)
    }

    pub fn aunfold(&mut self, call: &AbstractAtom<D>) -> Result<Vec<Resultant<D>>, UnfoldError> {
        let root = AbstractGoal::root(call);
        let head = &call.atom;
        if call.cp.is_bottom() {
            return Ok(Vec::new());
        }
        match self.cfg.strategy {
            UnfoldStrategy::OneStep => Ok(self.expand(&root, 0).into_iter().map(|g| self.leaf(head, g)).collect()),
            UnfoldStrategy::DeriveThenAexec => {
                let mut out = Vec::new();
                for g in self.expand(&root, 0) {
                    self.tick(head)?;
                    if let Some(g) = self.exec_leftmost(g) {
                        out.push(self.leaf(head, g));
                    }
                }
                Ok(out)
            }
            UnfoldStrategy::HomEmb => {
                let mut out = Vec::new();
                // depth-first, clause order preserved
                let mut stack = vec![root];
                while let Some(g) = stack.pop() {
                    self.tick(head)?;
                    let sel = self.select_atom(&g);
                    match sel {
                        None => {
                            if !g.goal.is_empty() {
                                self.log("stop", &g, 0);
                            }
                            out.push(self.leaf(head, g));
                        }
                        Some(Selection::Execute(r)) => match abstract_execute(&g, r, self.table) {
                            Exec::Executed(next) => {
                                self.log("exec", &g, r);
                                stack.push(next);
                            }
                            Exec::Failed => self.log("fail", &g, r),
                            Exec::NotApplicable => unreachable!("selection checked applicability"),
                        },
                        Some(Selection::Derive(r)) => {
                            let children = self.expand(&g, r);
                            stack.extend(children.into_iter().rev());
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Convenience wrapper around [`Unfolder::aunfold`].
pub fn aunfold<D: AbstractDomain>(
    program: &Program,
    call: &AbstractAtom<D>,
    cfg: &UnfoldConfig,
    table: &ExecTable,
) -> Result<Vec<Resultant<D>>, UnfoldError> {
    Unfolder::new(program, table, cfg).aunfold(call)
}
