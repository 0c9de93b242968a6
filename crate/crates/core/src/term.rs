//! Concrete term language: variables, terms, atoms, clauses and programs.
//!
//! Variables carry globally unique integer ids handed out by [`Var::fresh`].
//! Printable names are reconstructed at output time (see [`Namer`]).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

pub type Symbol = Arc<str>;

/// Ids below this bound are reserved for canonical (variant-key) numbering.
pub const CANONICAL_LIMIT: u32 = 1 << 16;

static NEXT_VAR: AtomicU32 = AtomicU32::new(CANONICAL_LIMIT);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u32);

impl Var {
    pub fn fresh() -> Var {
        Var(NEXT_VAR.fetch_add(1, Ordering::Relaxed))
    }

    /// The `i`-th canonical variable, used only inside variant keys.
    pub fn canonical(i: usize) -> Var {
        assert!((i as u32) < CANONICAL_LIMIT, "too many variables in a key");
        Var(i as u32)
    }
}

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Var),
    Const(Symbol),
    /// Compound term; the argument list is never empty.
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(sym(name))
    }

    /// Builds `f(args)`, collapsing to a constant when `args` is empty.
    pub fn app(f: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Const(sym(f))
        } else {
            Term::App(sym(f), args)
        }
    }

    pub fn functor(&self) -> Option<(&Symbol, usize)> {
        match self {
            Term::Var(_) => None,
            Term::Const(c) => Some((c, 0)),
            Term::App(f, args) => Some((f, args.len())),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn rename(&self, f: &mut impl FnMut(Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(*v)),
            Term::Const(_) => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.rename(f)).collect()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PredKey {
    pub name: Symbol,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: sym(pred), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> PredKey {
        PredKey { name: self.pred.clone(), arity: self.args.len() }
    }

    /// The atom viewed as a term, so term-level algorithms apply to it.
    pub fn to_term(&self) -> Term {
        if self.args.is_empty() {
            Term::Const(self.pred.clone())
        } else {
            Term::App(self.pred.clone(), self.args.clone())
        }
    }

    pub fn from_term(t: &Term) -> Option<Atom> {
        match t {
            Term::Var(_) => None,
            Term::Const(c) => Some(Atom { pred: c.clone(), args: Vec::new() }),
            Term::App(f, args) => Some(Atom { pred: f.clone(), args: args.clone() }),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn rename(&self, f: &mut impl FnMut(Var) -> Var) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.rename(f)).collect() }
    }

    pub fn with_pred(&self, pred: &Symbol) -> Atom {
        Atom { pred: pred.clone(), args: self.args.clone() }
    }
}

pub fn goal_vars(goal: &[Atom]) -> Vec<Var> {
    let mut out = Vec::new();
    goal.iter().for_each(|a| a.collect_vars(&mut out));
    out
}

/// Rule number; clauses are numbered from 1 in source order.
pub type RuleNo = usize;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub number: RuleNo,
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = self.head.vars();
        self.body.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn rename(&self, f: &mut impl FnMut(Var) -> Var) -> Clause {
        Clause {
            number: self.number,
            head: self.head.rename(f),
            body: self.body.iter().map(|a| a.rename(f)).collect(),
        }
    }

    /// A variant of the clause with every variable replaced by a fresh one.
    /// Fresh ids never collide with any existing variable, so the result is
    /// disjoint from every scope.
    pub fn rename_apart(&self) -> (Clause, BTreeMap<Var, Var>) {
        let mut map = BTreeMap::new();
        let renamed = self.rename(&mut |v| *map.entry(v).or_insert_with(Var::fresh));
        (renamed, map)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("no literal at position ({0},{1})")]
    UnknownPosition(RuleNo, usize),
}

/// Clause store addressed by rule number. Extending it never renumbers
/// existing clauses.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: BTreeMap<PredKey, Vec<RuleNo>>,
}

impl Program {
    pub fn new() -> Program {
        Program::default()
    }

    pub fn add_clause(&mut self, head: Atom, body: Vec<Atom>) -> RuleNo {
        let number = self.clauses.len() + 1;
        self.index.entry(head.key()).or_default().push(number);
        self.clauses.push(Clause { number, head, body });
        number
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, k: RuleNo) -> Option<&Clause> {
        k.checked_sub(1).and_then(|i| self.clauses.get(i))
    }

    pub fn clauses_for<'a>(&'a self, pred: &PredKey) -> impl Iterator<Item = &'a Clause> + 'a {
        self.index
            .get(pred)
            .into_iter()
            .flatten()
            .map(move |&k| &self.clauses[k - 1])
    }

    pub fn defines(&self, pred: &PredKey) -> bool {
        self.index.contains_key(pred)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.index.keys()
    }

    /// The goal suffix of clause `k` starting at body position `i` (1-based).
    /// `i = len + 1` yields the empty goal.
    pub fn get_body(&self, k: RuleNo, i: usize) -> Result<&[Atom], ProgramError> {
        let clause = self.clause(k).ok_or(ProgramError::UnknownPosition(k, i))?;
        if i == 0 || i > clause.body.len() + 1 {
            return Err(ProgramError::UnknownPosition(k, i));
        }
        Ok(&clause.body[i - 1..])
    }

    /// Function and constant symbols occurring in argument positions.
    pub fn signature(&self) -> BTreeSet<(Symbol, usize)> {
        fn walk(t: &Term, out: &mut BTreeSet<(Symbol, usize)>) {
            if let Some((f, n)) = t.functor() {
                out.insert((f.clone(), n));
                t.args().iter().for_each(|a| walk(a, out));
            }
        }
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            for a in std::iter::once(&c.head).chain(&c.body) {
                a.args.iter().for_each(|t| walk(t, &mut out));
            }
        }
        out
    }
}

/// Assigns readable names (`A`, `B`, ..., `Z`, `A1`, ...) to variables in
/// order of first request.
#[derive(Default, Debug, Clone)]
pub struct Namer {
    names: HashMap<Var, String>,
    fixed: HashMap<Var, String>,
}

impl Namer {
    pub fn new() -> Namer {
        Namer::default()
    }

    /// Uses the given source names where known, falling back to generated ones.
    pub fn with_names(fixed: HashMap<Var, String>) -> Namer {
        Namer { names: HashMap::new(), fixed }
    }

    pub fn name(&mut self, v: Var) -> String {
        if let Some(n) = self.fixed.get(&v) {
            return n.clone();
        }
        let next = self.names.len();
        self.names.entry(v).or_insert_with(|| generated_name(next)).clone()
    }
}

fn generated_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{}{}", letter, i / 26)
    }
}

pub fn is_list_cons(f: &str, arity: usize) -> bool {
    f == "." && arity == 2
}

pub fn write_term(t: &Term, namer: &mut Namer, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(&namer.name(*v)),
        Term::Const(c) => write_symbol(c, out),
        Term::App(f, args) if is_list_cons(f, args.len()) => {
            out.push('[');
            write_term(&args[0], namer, out);
            let mut tail = &args[1];
            loop {
                match tail {
                    Term::App(g, rest) if is_list_cons(g, rest.len()) => {
                        out.push(',');
                        write_term(&rest[0], namer, out);
                        tail = &rest[1];
                    }
                    Term::Const(c) if &**c == "[]" => break,
                    other => {
                        out.push('|');
                        write_term(other, namer, out);
                        break;
                    }
                }
            }
            out.push(']');
        }
        Term::App(f, args) => {
            write_symbol(f, out);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(a, namer, out);
            }
            out.push(')');
        }
    }
}

fn write_symbol(s: &str, out: &mut String) {
    let plain = s == "[]"
        || s.chars().all(|c| c.is_ascii_digit())
        || (s.starts_with(|c: char| c.is_ascii_lowercase())
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
    if plain {
        out.push_str(s);
    } else {
        out.push('\'');
        for c in s.chars() {
            if c == '\'' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('\'');
    }
}

pub fn write_atom(a: &Atom, namer: &mut Namer, out: &mut String) {
    write_term(&a.to_term(), namer, out)
}

pub fn term_to_string(t: &Term, namer: &mut Namer) -> String {
    let mut s = String::new();
    write_term(t, namer, &mut s);
    s
}

pub fn atom_to_string(a: &Atom, namer: &mut Namer) -> String {
    let mut s = String::new();
    write_atom(a, namer, &mut s);
    s
}

pub fn clause_to_string(c: &Clause, namer: &mut Namer) -> String {
    let mut s = String::new();
    write_atom(&c.head, namer, &mut s);
    if !c.body.is_empty() {
        s.push_str(" :- ");
        for (i, a) in c.body.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            write_atom(a, namer, &mut s);
        }
    }
    s.push('.');
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&term_to_string(self, &mut Namer::new()))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&atom_to_string(self, &mut Namer::new()))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&clause_to_string(self, &mut Namer::new()))
    }
}

/// Peano numeral `s^n(base)`.
pub fn peano(n: usize, base: Term) -> Term {
    (0..n).fold(base, |t, _| Term::App(sym("s"), vec![t]))
}
