//! The two top-level algorithms: abstract partial deduction, which passes
//! the clause-entry description to every body literal, and abstract
//! interpretation with specialized definitions, which propagates success
//! descriptions left to right and re-runs dependent clause suffixes until
//! a fixpoint is reached.

mod tables;

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

pub use tables::{DependencyEntry, Keyed, LiteralResolution, Resume};

use crate::domain::{atranslate, sorted, widen_call, AbstractAtom, AbstractDomain};
use crate::frontend::ExecTable;
use crate::global::{ren, GeneralizeStrategy, GlobalError, GlobalTables};
use crate::term::{Atom, Clause, Program, RuleNo};
use crate::unfold::UnfoldConfig;

/// Bound on dependency re-runs in one analysis.
pub const UPDATE_FUSE: usize = 1_000_000;

/// Bound on distinct call patterns. Reached when generalization does not
/// keep the set of specialized atoms finite, e.g. `id` on an accumulating
/// parameter. Kept low because expansion recurses once per new call.
pub const CALL_FUSE: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EngineKind {
    Analyze,
    Apd,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub engine: EngineKind,
    pub generalize: GeneralizeStrategy,
    pub unfold: UnfoldConfig,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Global(#[from] GlobalError),
    #[error("more than {UPDATE_FUSE} dependency updates")]
    Fuse,
    #[error("more than {CALL_FUSE} call patterns; the generalization strategy does not terminate here")]
    CallFuse,
    #[error("missing table entry for {0}")]
    Missing(String),
}

/// Engine state; after [`Analysis::run`] it holds the final tables.
#[derive(Clone, Debug)]
pub struct Analysis<D> {
    pub cfg: EngineConfig,
    pub table: ExecTable,
    /// The source program extended with the specialized definitions.
    pub program: Program,
    pub global: GlobalTables<D>,
    /// Answer table over canonical keys.
    pub at: BTreeMap<AbstractAtom<D>, D>,
    pub at_order: Vec<AbstractAtom<D>>,
    pub dt: BTreeMap<AbstractAtom<D>, Vec<DependencyEntry<D>>>,
    /// Canonical call keys reached at each body position.
    pub reached: BTreeMap<(RuleNo, usize), BTreeSet<AbstractAtom<D>>>,
    pub externals: BTreeSet<(RuleNo, usize)>,
    /// Merged call keys for positions reached with several descriptions.
    pub merged: BTreeMap<(RuleNo, usize), AbstractAtom<D>>,
    /// Entry calls and their canonical keys.
    pub entries: Vec<(AbstractAtom<D>, AbstractAtom<D>)>,
    visited: BTreeSet<AbstractAtom<D>>,
    pub updates: usize,
    pub non_monotone: usize,
    next_instance: usize,
}

fn builtin_success<D: AbstractDomain>(cp: &D, lit: &Atom) -> D {
    match (lit.pred.as_ref(), lit.arity()) {
        ("ground", 1) => cp.assume_ground(&lit.vars()),
        ("var", 1) => match lit.args[0].as_var() {
            Some(v) => cp.assume_free(v),
            None => D::bottom(cp.scope()),
        },
        _ => cp.unknown_call(&lit.vars()),
    }
}

impl<D: AbstractDomain> Analysis<D> {
    pub fn new(program: Program, table: ExecTable, cfg: EngineConfig) -> Analysis<D> {
        let mut global = GlobalTables::new();
        global.reserve_names(&program);
        Analysis {
            cfg,
            table,
            program,
            global,
            at: BTreeMap::new(),
            at_order: Vec::new(),
            dt: BTreeMap::new(),
            reached: BTreeMap::new(),
            externals: BTreeSet::new(),
            merged: BTreeMap::new(),
            entries: Vec::new(),
            visited: BTreeSet::new(),
            updates: 0,
            non_monotone: 0,
            next_instance: 0,
        }
    }

    /// Processes every entry, then resolves positions reached with several
    /// call descriptions through their lub.
    pub fn run(&mut self, entries: &[AbstractAtom<D>]) -> Result<(), EngineError> {
        for e in entries {
            let key = Keyed::of(&widen_call(e)).key;
            self.entries.push((e.clone(), key));
            self.process_call_pattern(e, DependencyEntry::entry(), true)?;
        }
        loop {
            let mut pending = Vec::new();
            for (pos, keys) in &self.reached {
                if keys.len() < 2 {
                    continue;
                }
                let mut it = keys.iter();
                let first = it.next().expect("nonempty").clone();
                let merged = it.fold(first, |acc, k| AbstractAtom { atom: acc.atom, cp: acc.cp.lub(&k.cp) });
                if self.merged.get(pos) != Some(&merged) {
                    pending.push((*pos, merged));
                }
            }
            if pending.is_empty() {
                return Ok(());
            }
            for (pos, merged) in pending {
                self.merged.insert(pos, merged.clone());
                self.process_call_pattern(&merged, DependencyEntry::entry(), false)?;
            }
        }
    }

    fn is_external(&self, a: &Atom) -> bool {
        self.table.is_external(&a.key())
    }

    /// Returns the current answer for `call`, over the variables of `call`.
    pub fn process_call_pattern(
        &mut self,
        call: &AbstractAtom<D>,
        parent: DependencyEntry<D>,
        is_entry: bool,
    ) -> Result<D, EngineError> {
        let keyed = Keyed::of(&widen_call(call));
        let key = keyed.key.clone();
        match self.cfg.engine {
            EngineKind::Apd => {
                if self.visited.insert(key.clone()) {
                    if self.visited.len() > CALL_FUSE {
                        return Err(EngineError::CallFuse);
                    }
                    self.global.specialized_definition(
                        &mut self.program,
                        &key,
                        self.cfg.generalize,
                        &self.cfg.unfold,
                        &self.table,
                        is_entry,
                    )?;
                    self.expand_node(&key)?;
                }
                Ok(D::top(call.cp.scope()))
            }
            EngineKind::Analyze => {
                if !self.at.contains_key(&key) {
                    if self.at.len() >= CALL_FUSE {
                        return Err(EngineError::CallFuse);
                    }
                    self.at.insert(key.clone(), D::bottom(key.cp.scope()));
                    self.at_order.push(key.clone());
                    self.dt.insert(key.clone(), Vec::new());
                    self.global.specialized_definition(
                        &mut self.program,
                        &key,
                        self.cfg.generalize,
                        &self.cfg.unfold,
                        &self.table,
                        is_entry,
                    )?;
                    self.expand_node(&key)?;
                }
                let deps = self.dt.get_mut(&key).expect("inserted with the answer");
                if let Some(c) = parent.coords() {
                    deps.retain(|d| d.coords() != Some(c));
                }
                deps.push(parent);
                Ok(keyed.restore(&self.at[&key]))
            }
        }
    }

    /// Processes every specialized clause of an already specialized key.
    fn expand_node(&mut self, key: &AbstractAtom<D>) -> Result<(), EngineError> {
        let general = self.global.generalization_of(key).ok_or_else(|| EngineError::Missing(key.render()))?.clone();
        let (link2, entry) = self.global.lookup(&general).ok_or_else(|| EngineError::Missing(general.render()))?;
        let clauses = entry.clauses.clone();
        let link = ren(&key.atom, &general.atom, &link2)?;
        let link_call = AbstractAtom { atom: link.clone(), cp: key.cp.clone() };
        for k in clauses {
            let clause = Rc::new(self.program.clause(k).expect("specialized clause").rename_apart().0);
            let cp = atranslate(&link_call, &clause.head, &sorted(clause.vars()));
            self.next_instance += 1;
            let instance = self.next_instance;
            self.process_clause(key, &link, clause, instance, cp, 1)?;
        }
        Ok(())
    }

    /// Processes the suffix of `clause` from literal `i` under `cp`.
    fn process_clause(
        &mut self,
        node: &AbstractAtom<D>,
        link: &Atom,
        clause: Rc<Clause>,
        instance: usize,
        cp: D,
        i: usize,
    ) -> Result<(), EngineError> {
        if cp.is_bottom() {
            return Ok(());
        }
        if i > clause.body.len() {
            if self.cfg.engine == EngineKind::Apd {
                return Ok(());
            }
            let head = AbstractAtom { atom: clause.head.clone(), cp: cp.restrict(&clause.head.vars()) };
            let ap1 = atranslate(&head, link, &sorted(link.vars()));
            let ap2 = self.at[node].clone();
            let ap3 = ap1.lub(&ap2);
            if ap3 != ap2 {
                if !ap2.leq(&ap3) {
                    self.non_monotone += 1;
                }
                self.at.insert(node.clone(), ap3);
                let deps = self.dt[node].clone();
                self.process_update(deps)?;
            }
            return Ok(());
        }
        let lit = clause.body[i - 1].clone();
        let k = clause.number;
        if self.is_external(&lit) {
            self.externals.insert((k, i));
            let next = if self.cfg.engine == EngineKind::Apd { cp } else { builtin_success(&cp, &lit) };
            return self.process_clause(node, link, clause, instance, next, i + 1);
        }
        let lv = sorted(lit.vars());
        let call = AbstractAtom::new(lit, cp.restrict(&lv));
        self.reached.entry((k, i)).or_default().insert(Keyed::of(&widen_call(&call)).key);
        match self.cfg.engine {
            EngineKind::Apd => {
                self.process_call_pattern(&call, DependencyEntry::entry(), false)?;
                self.process_clause(node, link, clause, instance, cp, i + 1)
            }
            EngineKind::Analyze => {
                let dep = DependencyEntry {
                    resume: Resume::Literal {
                        node: node.clone(),
                        link: link.clone(),
                        clause: clause.clone(),
                        instance,
                        cp: cp.clone(),
                        k,
                        i,
                    },
                };
                let ap0 = self.process_call_pattern(&call, dep, false)?;
                let next = cp.combine_success(&lv, &ap0);
                self.process_clause(node, link, clause, instance, next, i + 1)
            }
        }
    }

    /// Re-runs the clause suffixes that depend on an answer that grew.
    fn process_update(&mut self, deps: Vec<DependencyEntry<D>>) -> Result<(), EngineError> {
        for d in deps {
            if let Resume::Literal { node, link, clause, instance, cp, i, .. } = d.resume {
                self.updates += 1;
                if self.updates > UPDATE_FUSE {
                    return Err(EngineError::Fuse);
                }
                self.remove_previous_deps(instance, i);
                self.process_clause(&node, &link, clause, instance, cp, i)?;
            }
        }
        Ok(())
    }

    /// Drops the arcs of a clause instance from literal `i` onwards.
    fn remove_previous_deps(&mut self, instance: usize, i: usize) {
        for deps in self.dt.values_mut() {
            deps.retain(|d| !matches!(d.coords(), Some((n, j)) if n == instance && j >= i));
        }
    }

    /// The call key used for the literal at `(k, i)` in the residual program.
    pub fn resolution(&self, k: RuleNo, i: usize) -> Option<LiteralResolution<D>> {
        if self.externals.contains(&(k, i)) {
            return Some(LiteralResolution::External);
        }
        if let Some(m) = self.merged.get(&(k, i)) {
            return Some(LiteralResolution::Call(m.clone()));
        }
        let keys = self.reached.get(&(k, i))?;
        keys.iter().next().map(|key| LiteralResolution::Call(key.clone()))
    }

    /// The answer stored for a call, over the variables of `call`.
    pub fn answer(&self, call: &AbstractAtom<D>) -> Option<D> {
        let keyed = Keyed::of(call);
        self.at.get(&keyed.key).map(|d| keyed.restore(d))
    }

    /// Re-processing every clause of every answer-table key changes nothing.
    pub fn is_fixpoint(&self) -> Result<bool, EngineError> {
        let mut copy = self.clone();
        for key in &self.at_order {
            copy.expand_node(key)?;
        }
        Ok(copy.at == self.at)
    }
}

/// Runs the configured engine from the given entries.
pub fn run_engine<D: AbstractDomain>(
    program: &Program,
    entries: &[AbstractAtom<D>],
    table: &ExecTable,
    cfg: &EngineConfig,
) -> Result<Analysis<D>, EngineError> {
    let mut a = Analysis::new(program.clone(), table.clone(), cfg.clone());
    a.run(entries)?;
    Ok(a)
}
