//! Framework parameters, presets and the end-to-end pipeline.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::codegen::{dump_tables, export_dot, generate, ResidualProgram};
use crate::domain::{AbstractAtom, AbstractDomain, DomainError, Pd, ShFr};
use crate::engine::{run_engine, Analysis, EngineConfig, EngineError, EngineKind};
use crate::frontend::{entry_to_abstract_atom, ExecTable, SourceUnit};
use crate::global::GeneralizeStrategy;
use crate::interp::{show, solve, success_on_entry, Sampler};
use crate::term::{Atom, Program};
use crate::unfold::{UnfoldConfig, UnfoldStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Shfr,
    Pd,
}

/// Call widening; only the identity is provided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Widen {
    Id,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    PolyvariantAi,
    AbstractSpec,
    ClassicalPd,
    Full,
}

macro_rules! names {
    ($ty:ty { $($variant:path => $name:literal),* $(,)? }) => {
        impl $ty {
            pub const NAMES: &'static [&'static str] = &[$($name),*];
            pub fn name(self) -> &'static str {
                match self { $($variant => $name),* }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok($variant),)*
                    _ => Err(format!("expected one of {}", Self::NAMES.join(", "))),
                }
            }
        }
    };
}

names!(DomainKind { DomainKind::Shfr => "shfr", DomainKind::Pd => "pd" });
names!(Widen { Widen::Id => "id" });
names!(Preset {
    Preset::PolyvariantAi => "polyvariant-ai",
    Preset::AbstractSpec => "abstract-spec",
    Preset::ClassicalPd => "classical-pd",
    Preset::Full => "full",
});

/// Names for the strategy enums owned by other modules.
pub trait ParamName: Sized + Copy {
    fn param_name(self) -> &'static str;
    fn parse_param(s: &str) -> Result<Self, String>;
}

impl ParamName for UnfoldStrategy {
    fn param_name(self) -> &'static str {
        match self {
            UnfoldStrategy::HomEmb => "hom-emb",
            UnfoldStrategy::OneStep => "one-step",
            UnfoldStrategy::DeriveThenAexec => "derive-then-aexec",
        }
    }
    fn parse_param(s: &str) -> Result<Self, String> {
        [UnfoldStrategy::HomEmb, UnfoldStrategy::OneStep, UnfoldStrategy::DeriveThenAexec]
            .into_iter()
            .find(|x| x.param_name() == s)
            .ok_or_else(|| "expected one of hom-emb, one-step, derive-then-aexec".to_string())
    }
}

impl ParamName for GeneralizeStrategy {
    fn param_name(self) -> &'static str {
        match self {
            GeneralizeStrategy::Id => "id",
            GeneralizeStrategy::HomEmbMsg => "hom-emb-msg",
            GeneralizeStrategy::BaseForm => "base-form",
        }
    }
    fn parse_param(s: &str) -> Result<Self, String> {
        [GeneralizeStrategy::Id, GeneralizeStrategy::HomEmbMsg, GeneralizeStrategy::BaseForm]
            .into_iter()
            .find(|x| x.param_name() == s)
            .ok_or_else(|| "expected one of id, hom-emb-msg, base-form".to_string())
    }
}

impl ParamName for EngineKind {
    fn param_name(self) -> &'static str {
        match self {
            EngineKind::Analyze => "analyze",
            EngineKind::Apd => "apd",
        }
    }
    fn parse_param(s: &str) -> Result<Self, String> {
        [EngineKind::Analyze, EngineKind::Apd]
            .into_iter()
            .find(|x| x.param_name() == s)
            .ok_or_else(|| "expected one of analyze, apd".to_string())
    }
}

/// The five framework parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub domain: DomainKind,
    pub unfold: UnfoldStrategy,
    pub generalize: GeneralizeStrategy,
    pub widen: Widen,
    pub engine: EngineKind,
}

impl Default for Params {
    fn default() -> Self {
        Preset::Full.params()
    }
}

impl Preset {
    pub fn params(self) -> Params {
        use DomainKind::*;
        use EngineKind::*;
        use GeneralizeStrategy as G;
        use UnfoldStrategy as U;
        let (domain, unfold, generalize, engine) = match self {
            Preset::PolyvariantAi => (Shfr, U::OneStep, G::BaseForm, Analyze),
            Preset::AbstractSpec => (Shfr, U::DeriveThenAexec, G::BaseForm, Analyze),
            Preset::ClassicalPd => (Pd, U::HomEmb, G::HomEmbMsg, Apd),
            Preset::Full => (Shfr, U::HomEmb, G::Id, Analyze),
        };
        Params { domain, unfold, generalize, widen: Widen::Id, engine }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    /// Depth bound of sampled ground terms.
    pub term_depth: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { samples: 100, depth: 400, seed: 0, term_depth: 6 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub params: Params,
    pub non_leftmost: bool,
    pub trace: bool,
    pub check: Option<CheckConfig>,
}

impl RunConfig {
    pub fn from_preset(p: Preset) -> RunConfig {
        RunConfig { preset: Some(p), params: p.params(), ..RunConfig::default() }
    }

    /// The resolved parameter tuple, one `key: value` line each.
    pub fn describe(&self) -> String {
        let p = &self.params;
        format!(
            "preset: {}\ndomain: {}\nunfold: {}\ngeneralize: {}\nwiden: {}\nengine: {}\nnon-leftmost: {}\n",
            self.preset.map(|p| p.name()).unwrap_or("none"),
            p.domain,
            p.unfold.param_name(),
            p.generalize.param_name(),
            p.widen,
            p.engine.param_name(),
            self.non_leftmost,
        )
    }

    fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            engine: self.params.engine,
            generalize: self.params.generalize,
            unfold: UnfoldConfig { strategy: self.params.unfold, non_leftmost: self.non_leftmost, trace: self.trace },
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("entry: {0}")]
    Entry(#[from] DomainError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub answers: usize,
    pub specializations: usize,
    pub generalizations: usize,
    pub updates: usize,
    pub residual_clauses: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "answers: {}\nspecializations: {}\nupdates: {}\nresidual clauses: {}\ntime: {:.3}s",
            self.answers,
            self.specializations,
            self.updates,
            self.residual_clauses,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub queries: usize,
    /// Queries whose interpretation was cut on either side.
    pub skipped: usize,
    pub mismatches: Vec<String>,
    /// Concrete successes outside the analysed answer pattern.
    pub unsound: Vec<String>,
    /// Calls in the residual program to undefined predicates.
    pub not_closed: Vec<String>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.unsound.is_empty() && self.not_closed.is_empty()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "oracle: {} queries, {} skipped, {} mismatches, {} unsound, {} not closed",
            self.queries,
            self.skipped,
            self.mismatches.len(),
            self.unsound.len(),
            self.not_closed.len()
        )?;
        for m in self.mismatches.iter().chain(&self.unsound).chain(&self.not_closed).take(10) {
            write!(f, "\n  {}", m)?;
        }
        Ok(())
    }
}

/// Everything one run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub residual: ResidualProgram,
    pub dot: String,
    pub json: String,
    pub summary: Summary,
    pub oracle: Option<OracleReport>,
    pub trace: Vec<String>,
    /// Rendered answer table rows `^CP atom ^AP`.
    pub answers: Vec<String>,
}

/// Runs the configured engine on every entry of `unit`.
pub fn run(unit: &SourceUnit, cfg: &RunConfig) -> Result<RunOutput, RunError> {
    match cfg.params.domain {
        DomainKind::Shfr => run_with::<ShFr>(unit, cfg),
        DomainKind::Pd => run_with::<Pd>(unit, cfg),
    }
}

/// The engine state behind [`run`], for callers that inspect the tables.
pub fn analyze<D: AbstractDomain>(unit: &SourceUnit, cfg: &RunConfig) -> Result<Analysis<D>, RunError> {
    let entries: Vec<AbstractAtom<D>> =
        unit.entries.iter().map(entry_to_abstract_atom).collect::<Result<_, _>>()?;
    let table = ExecTable::with_user(unit.exec_entries.clone());
    Ok(run_engine(&unit.program, &entries, &table, &cfg.engine_config())?)
}

fn run_with<D: AbstractDomain>(unit: &SourceUnit, cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let a = analyze::<D>(unit, cfg)?;
    let residual = generate(&a, &unit.entries)?;
    let elapsed = start.elapsed();
    let summary = Summary {
        answers: a.at.len(),
        specializations: a.global.st.len(),
        generalizations: a.global.gt.len(),
        updates: a.updates,
        residual_clauses: residual.clauses.len(),
        elapsed,
    };
    let answers = a
        .at_order
        .iter()
        .map(|k| {
            let mut namer = crate::term::Namer::new();
            let atom = crate::term::atom_to_string(&k.atom, &mut namer);
            format!("^{} {} ^{}", k.cp.render(&mut namer), atom, a.at[k].render(&mut namer))
        })
        .collect();
    let oracle = cfg.check.map(|c| oracle_check(unit, &a, &residual, &c));
    let mut trace = a.global.trace.clone();
    if !cfg.trace {
        trace.clear();
    }
    Ok(RunOutput { dot: export_dot(&a), json: dump_tables(&a), residual, summary, oracle, trace, answers })
}

/// Residual clauses as a program.
pub fn residual_program(r: &ResidualProgram) -> Program {
    let mut p = Program::new();
    for c in &r.clauses {
        p.add_clause(c.head.clone(), c.body.clone());
    }
    p
}

/// Compares original and residual answers on sampled entry queries, checks
/// that the analysed answer patterns cover the concrete successes, and that
/// the residual program only calls what it defines.
pub fn oracle_check<D: AbstractDomain>(
    unit: &SourceUnit,
    a: &Analysis<D>,
    residual: &ResidualProgram,
    c: &CheckConfig,
) -> OracleReport {
    let mut report = OracleReport::default();
    let rprog = residual_program(residual);
    let mut sampler = Sampler::new(&unit.program, c.seed, c.term_depth);
    for (i, decl) in unit.entries.iter().enumerate() {
        let call: Option<&Atom> = residual.entries.iter().find(|(d, _)| d.atom == decl.atom).map(|(_, call)| call);
        let pattern = a.entries.get(i).and_then(|(e, _)| a.answer(e));
        let vars = decl.atom.vars();
        for _ in 0..c.samples {
            report.queries += 1;
            let (sigma, query) = sampler.query(decl);
            let original = solve(&unit.program, &query, c.depth);
            let spec = call.map(|call| solve(&rprog, &sigma.apply_atom(call), c.depth));
            if let Some(r) = &spec {
                for k in &r.undefined {
                    report.not_closed.push(format!("{}: calls undefined {}", show(&query), k));
                }
            }
            if !original.complete() || spec.as_ref().map_or(false, |r| !r.complete()) {
                report.skipped += 1;
                continue;
            }
            let expected = original.multiset(&vars);
            let got = spec.map(|r| r.multiset(&vars)).unwrap_or_default();
            if expected != got {
                report.mismatches.push(format!("{}: {:?} vs {:?}", show(&query), expected, got));
            }
            if let Some(p) = &pattern {
                for theta in &original.answers {
                    let s = success_on_entry(&sigma, theta, &vars);
                    if !p.satisfies(&s) {
                        report.unsound.push(format!("{}: success {:?} outside answer", show(&query), s));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    #[test]
    fn presets_expand_to_fixed_tuples() {
        assert_eq!(
            RunConfig::from_preset(Preset::ClassicalPd).describe(),
            "preset: classical-pd\ndomain: pd\nunfold: hom-emb\ngeneralize: hom-emb-msg\nwiden: id\nengine: apd\nnon-leftmost: false\n"
        );
        let p = Preset::PolyvariantAi.params();
        assert_eq!((p.domain, p.unfold, p.generalize), (DomainKind::Shfr, UnfoldStrategy::OneStep, GeneralizeStrategy::BaseForm));
        assert_eq!(Preset::AbstractSpec.params().unfold, UnfoldStrategy::DeriveThenAexec);
        assert_eq!(Preset::Full.params().generalize, GeneralizeStrategy::Id);
    }

    #[test]
    fn names_round_trip() {
        for n in Preset::NAMES {
            assert_eq!(n.parse::<Preset>().unwrap().name(), *n);
        }
        assert_eq!(UnfoldStrategy::parse_param("one-step"), Ok(UnfoldStrategy::OneStep));
        assert!("nope".parse::<DomainKind>().is_err());
    }

    #[test]
    fn full_run_summary_matches_dump() {
        let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
        let mut cfg = RunConfig::from_preset(Preset::Full);
        cfg.check = Some(CheckConfig { samples: 20, ..CheckConfig::default() });
        let out = run(&unit, &cfg).unwrap();
        assert_eq!(out.summary.answers, 3);
        assert_eq!(out.summary.updates, 0);
        let dump: crate::codegen::TableDump = serde_json::from_str(&out.json).unwrap();
        assert_eq!(dump.answers.len(), out.summary.answers);
        assert_eq!(dump.spec.len(), out.summary.specializations);
        let report = out.oracle.unwrap();
        assert!(report.ok(), "{}", report);
    }
}
