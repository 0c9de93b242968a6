//! Reading and writing the Prolog-subset source format.

mod exec_table;
mod parser;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use exec_table::{default_exec_table, is_mode_test, ExecEntry, ExecTable, Mode, Replacement};
pub use parser::{parse_exec_table, parse_goal, parse_program};

use crate::domain::{AbstractAtom, AbstractDomain, DomainError};
use crate::term::{atom_to_string, clause_to_string, Atom, Namer, PredKey, Program, RuleNo, Var};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid entry declaration: {0}")]
    Entry(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Ground,
    Var,
}

/// `:- entry Atom : (ground(X), var(Y)).`
#[derive(Clone, Debug)]
pub struct EntryDecl {
    pub atom: Atom,
    pub props: Vec<(Property, Var)>,
    pub names: HashMap<Var, String>,
}

impl EntryDecl {
    pub fn new(atom: Atom, props: Vec<(Property, Var)>, names: HashMap<Var, String>) -> Result<EntryDecl, ParseError> {
        let vars = atom.vars();
        let mut seen = BTreeSet::new();
        for (_, v) in &props {
            if !vars.contains(v) {
                return Err(ParseError::Entry(format!("property variable does not occur in {}", atom)));
            }
            if !seen.insert(*v) {
                return Err(ParseError::Entry(format!("more than one property for a variable of {}", atom)));
            }
        }
        Ok(EntryDecl { atom, props, names })
    }

    pub fn ground_vars(&self) -> Vec<Var> {
        self.props.iter().filter(|(p, _)| *p == Property::Ground).map(|(_, v)| *v).collect()
    }

    pub fn free_vars(&self) -> Vec<Var> {
        self.props.iter().filter(|(p, _)| *p == Property::Var).map(|(_, v)| *v).collect()
    }

    pub fn render(&self) -> String {
        let mut namer = Namer::with_names(self.names.clone());
        let mut s = format!(":- entry {}", atom_to_string(&self.atom, &mut namer));
        if !self.props.is_empty() {
            let props: Vec<String> = self
                .props
                .iter()
                .map(|(p, v)| {
                    let name = namer.name(*v);
                    match p {
                        Property::Ground => format!("ground({})", name),
                        Property::Var => format!("var({})", name),
                    }
                })
                .collect();
            s.push_str(&format!(" : ({})", props.join(", ")));
        }
        s.push('.');
        s
    }
}

/// A parsed source file.
#[derive(Clone, Debug, Default)]
pub struct SourceUnit {
    pub module: Option<String>,
    /// Informative only; analysis is driven by the entry declarations.
    pub exports: Vec<PredKey>,
    pub program: Program,
    pub entries: Vec<EntryDecl>,
    pub exec_entries: Vec<ExecEntry>,
    /// Source variable names per rule number.
    pub var_names: BTreeMap<RuleNo, HashMap<Var, String>>,
    pub warnings: Vec<String>,
}

/// Description of an entry: ground-declared variables ground, var-declared
/// ones free and unaliased, the rest unknown.
pub fn entry_to_abstract_atom<D: AbstractDomain>(e: &EntryDecl) -> Result<AbstractAtom<D>, DomainError> {
    let scope = e.atom.vars();
    let cp = D::from_modes(&scope, &e.ground_vars(), &e.free_vars())?;
    Ok(AbstractAtom::new(e.atom.clone(), cp))
}

/// One clause per line; facts end in `.` directly after the head.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for c in p.clauses() {
        out.push_str(&clause_to_string(c, &mut Namer::new()));
        out.push('\n');
    }
    out
}

/// Like [`print_program`] but keeps source variable names and directives.
pub fn print_unit(unit: &SourceUnit) -> String {
    let mut out = String::new();
    if let Some(m) = &unit.module {
        let exports: Vec<String> = unit.exports.iter().map(|k| k.to_string()).collect();
        out.push_str(&format!(":- module({}, [{}]).\n", m, exports.join(", ")));
    }
    for e in &unit.entries {
        out.push_str(&e.render());
        out.push('\n');
    }
    for c in unit.program.clauses() {
        let names = unit.var_names.get(&c.number).cloned().unwrap_or_default();
        out.push_str(&clause_to_string(c, &mut Namer::with_names(names)));
        out.push('\n');
    }
    out
}
