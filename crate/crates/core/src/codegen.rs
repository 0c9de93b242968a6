//! Residual program generation and table export.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{AbstractAtom, AbstractDomain};
use crate::engine::{Analysis, EngineError, LiteralResolution, Resume};
use crate::frontend::EntryDecl;
use crate::global::ren;
use crate::subst::{canonical_renaming, match_atom};
use crate::term::{atom_to_string, clause_to_string, sym, Atom, Clause, Namer, PredKey, Symbol};

/// The specialized program with its entry declarations.
#[derive(Clone, Debug, Default)]
pub struct ResidualProgram {
    pub clauses: Vec<Clause>,
    /// Original entry declaration and the renamed call replacing its atom.
    pub entries: Vec<(EntryDecl, Atom)>,
    pub warnings: Vec<String>,
}

impl ResidualProgram {
    pub fn predicates(&self) -> BTreeSet<PredKey> {
        self.clauses.iter().map(|c| c.head.key()).collect()
    }

    /// Source text with regenerated entry declarations.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for (decl, call) in &self.entries {
            let renamed = EntryDecl { atom: call.clone(), props: decl.props.clone(), names: decl.names.clone() };
            out.push_str(&renamed.render());
            out.push('\n');
        }
        if !self.entries.is_empty() {
            out.push('\n');
        }
        for c in &self.clauses {
            out.push_str(&clause_to_string(c, &mut Namer::new()));
            out.push('\n');
        }
        out
    }
}

struct Renamer<'a, D> {
    a: &'a Analysis<D>,
}

impl<'a, D: AbstractDomain> Renamer<'a, D> {
    /// `(ST key, renamed literal)` for a call key reached at some literal.
    fn through_tables(&self, lit: &Atom, key: &AbstractAtom<D>) -> Result<(AbstractAtom<D>, Atom), EngineError> {
        let general = self.a.global.generalization_of(key).ok_or_else(|| EngineError::Missing(key.render()))?;
        let (link, _) = self.a.global.lookup(general).ok_or_else(|| EngineError::Missing(general.render()))?;
        Ok((general.clone(), ren(lit, &general.atom, &link)?))
    }

    /// Some specialization covering `lit` whatever its call description.
    fn covering(&self, lit: &Atom) -> Option<(AbstractAtom<D>, Atom)> {
        self.a.global.st_order.iter().find_map(|k| {
            match_atom(&k.atom, lit)?;
            let (link, _) = self.a.global.lookup(k)?;
            Some((k.clone(), ren(lit, &k.atom, &link).ok()?))
        })
    }
}

/// Renames body literals through the tables, keeps only the definitions
/// reachable from the entries and merges equivalent definitions.
pub fn generate<D: AbstractDomain>(a: &Analysis<D>, decls: &[EntryDecl]) -> Result<ResidualProgram, EngineError> {
    let r = Renamer { a };
    let mut out = ResidualProgram::default();
    let mut queue: Vec<AbstractAtom<D>> = Vec::new();
    let mut seen: BTreeSet<AbstractAtom<D>> = BTreeSet::new();
    for (i, (entry, key)) in a.entries.iter().enumerate() {
        let (st_key, call) = r.through_tables(&entry.atom, key)?;
        if let Some(decl) = decls.get(i) {
            out.entries.push((decl.clone(), call));
        }
        if seen.insert(st_key.clone()) {
            queue.push(st_key);
        }
    }
    let mut emitted: BTreeMap<AbstractAtom<D>, Vec<Clause>> = BTreeMap::new();
    while let Some(st_key) = queue.pop() {
        let entry = &a.global.st[&st_key];
        let mut clauses = Vec::new();
        'clauses: for &k in &entry.clauses {
            let c = a.program.clause(k).expect("specialized clause");
            let mut body = Vec::new();
            for (i, lit) in c.body.iter().enumerate() {
                let pos = (k, i + 1);
                let resolved = match a.resolution(k, i + 1) {
                    Some(LiteralResolution::External) => None,
                    _ if a.table.is_external(&lit.key()) => None,
                    Some(LiteralResolution::Call(key)) => Some(r.through_tables(lit, &key)?),
                    None => match r.covering(lit) {
                        Some(found) => Some(found),
                        None => {
                            out.warnings.push(format!(
                                "clause {} dropped: literal {} at ({},{}) is never reached",
                                k, lit, pos.0, pos.1
                            ));
                            continue 'clauses;
                        }
                    },
                };
                match resolved {
                    None => body.push(lit.clone()),
                    Some((next, renamed)) => {
                        body.push(renamed);
                        if seen.insert(next.clone()) {
                            queue.push(next);
                        }
                    }
                }
            }
            clauses.push(Clause { number: 0, head: c.head.clone(), body });
        }
        emitted.insert(st_key, clauses);
    }
    if emitted.is_empty() {
        out.warnings.push("no clause is reachable from the entries".to_string());
    }
    let mut ordered: Vec<Clause> = Vec::new();
    let mut origin: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    for key in &a.global.st_order {
        if let Some(cs) = emitted.get(key) {
            origin.insert(a.global.st[key].link.pred.clone(), key.atom.pred.clone());
            ordered.extend(cs.iter().cloned());
        }
    }
    let merge = merge_equivalent(&ordered);
    let reserved: BTreeSet<String> = a.program.predicates().map(|k| k.name.to_string()).collect();
    let names = short_names(&ordered, &merge, &origin, &reserved);
    let rename = |atom: &Atom| -> Atom {
        match merge.get(&atom.pred) {
            Some(rep) => atom.with_pred(names.get(rep).unwrap_or(rep)),
            None => atom.clone(),
        }
    };
    let mut n = 0;
    for c in ordered {
        if merge.get(&c.head.pred) != Some(&c.head.pred) {
            continue;
        }
        n += 1;
        out.clauses.push(Clause { number: n, head: rename(&c.head), body: c.body.iter().map(&rename).collect() });
    }
    for (_, call) in out.entries.iter_mut() {
        *call = rename(call);
    }
    Ok(out)
}

/// Coarsest partition of the defined predicates such that predicates in one
/// block have the same clauses up to variable names and block membership of
/// the called predicates. Maps each predicate to its block representative
/// (first in clause order).
fn merge_equivalent(clauses: &[Clause]) -> BTreeMap<Symbol, Symbol> {
    let mut preds: Vec<Symbol> = Vec::new();
    let mut defs: HashMap<Symbol, Vec<&Clause>> = HashMap::new();
    for c in clauses {
        if !defs.contains_key(&c.head.pred) {
            preds.push(c.head.pred.clone());
        }
        defs.entry(c.head.pred.clone()).or_default().push(c);
    }
    let mut block: HashMap<Symbol, usize> = preds.iter().map(|p| (p.clone(), defs[p][0].head.arity())).collect();
    let mut count = 0;
    loop {
        let mut sigs: BTreeMap<(usize, Vec<String>), usize> = BTreeMap::new();
        let mut next: HashMap<Symbol, usize> = HashMap::new();
        for p in &preds {
            let sig: Vec<String> = defs[p]
                .iter()
                .map(|c| {
                    let map = canonical_renaming(&c.vars());
                    let c = c.rename(&mut |v| map[&v]);
                    let mut namer = Namer::new();
                    let head: Vec<String> =
                        c.head.args.iter().map(|t| crate::term::term_to_string(t, &mut namer)).collect();
                    let body: Vec<String> = c
                        .body
                        .iter()
                        .map(|b| {
                            let name = match block.get(&b.pred) {
                                Some(id) => format!("#{}", id),
                                None => b.pred.to_string(),
                            };
                            atom_to_string(&b.with_pred(&sym(&name)), &mut namer)
                        })
                        .collect();
                    format!("{} :- {}", head.join(","), body.join(","))
                })
                .collect();
            let fresh = sigs.len();
            let id = *sigs.entry((block[p], sig)).or_insert(fresh);
            next.insert(p.clone(), id);
        }
        let n = sigs.len();
        block = next;
        if n == count {
            break;
        }
        count = n;
    }
    let mut rep: HashMap<usize, Symbol> = HashMap::new();
    preds
        .iter()
        .map(|p| {
            let r = rep.entry(block[p]).or_insert_with(|| p.clone()).clone();
            (p.clone(), r)
        })
        .collect()
}

/// Drops the numeric suffix of `sp_<pred>_<n>` when only one surviving
/// definition comes from `<pred>`.
fn short_names(
    clauses: &[Clause],
    merge: &BTreeMap<Symbol, Symbol>,
    origin: &BTreeMap<Symbol, Symbol>,
    reserved: &BTreeSet<String>,
) -> BTreeMap<Symbol, Symbol> {
    let survivors: BTreeSet<&Symbol> = clauses.iter().map(|c| &c.head.pred).filter(|p| merge.get(*p) == Some(*p)).collect();
    let mut by_origin: BTreeMap<&Symbol, Vec<&Symbol>> = BTreeMap::new();
    for p in &survivors {
        if let Some(o) = origin.get(*p) {
            by_origin.entry(o).or_default().push(p);
        }
    }
    let mut out = BTreeMap::new();
    for (o, ps) in by_origin {
        let short = format!("sp_{}", o);
        if ps.len() == 1 && !reserved.contains(&short) {
            out.insert(ps[0].clone(), sym(&short));
        }
    }
    out
}

fn node_label<D: AbstractDomain>(key: &AbstractAtom<D>, ap: &D) -> String {
    let mut namer = Namer::new();
    let atom = atom_to_string(&key.atom, &mut namer);
    format!("^{} {} ^{}", key.cp.render(&mut namer), atom, ap.render(&mut namer))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The analysis graph: OR-nodes for answer-table keys, AND-nodes for their
/// specialized clauses, and arcs from literals to the OR-node they call.
/// Arcs to an OR-node expanded elsewhere are dashed and marked `share`.
pub fn export_dot<D: AbstractDomain>(a: &Analysis<D>) -> String {
    let mut out = String::from("digraph analysis {\n  node [fontname=\"monospace\"];\n");
    let index: BTreeMap<&AbstractAtom<D>, usize> = a.at_order.iter().enumerate().map(|(i, k)| (k, i)).collect();
    for (i, key) in a.at_order.iter().enumerate() {
        let _ = writeln!(out, "  or{} [shape=ellipse, label=\"{}\"];", i, escape(&node_label(key, &a.at[key])));
    }
    let mut expanded: BTreeSet<usize> = BTreeSet::new();
    for (i, (_, key)) in a.entries.iter().enumerate() {
        if let Some(&n) = index.get(key) {
            let _ = writeln!(out, "  entry{} [shape=point];", i);
            let _ = writeln!(out, "  entry{} -> or{};", i, n);
            expanded.insert(n);
        }
    }
    for (i, key) in a.at_order.iter().enumerate() {
        let clauses = a
            .global
            .generalization_of(key)
            .and_then(|g| a.global.lookup(g))
            .map(|(_, e)| e.clauses.clone())
            .unwrap_or_default();
        for k in clauses {
            let c = a.program.clause(k).expect("specialized clause");
            let _ = writeln!(
                out,
                "  and{}_{} [shape=box, label=\"{}\"];",
                i,
                k,
                escape(&clause_to_string(c, &mut Namer::new()))
            );
            let _ = writeln!(out, "  or{} -> and{}_{};", i, i, k);
            for j in 1..=c.body.len() {
                if let Some(LiteralResolution::Call(target)) = a.resolution(k, j) {
                    let keys = a.reached.get(&(k, j)).cloned().unwrap_or_default();
                    let mut targets: Vec<AbstractAtom<D>> = keys.into_iter().collect();
                    if targets.len() > 1 {
                        targets = vec![target];
                    }
                    for t in targets {
                        if let Some(&n) = index.get(&t) {
                            if expanded.insert(n) {
                                let _ = writeln!(out, "  and{}_{} -> or{} [label=\"{},{}\"];", i, k, n, k, j);
                            } else {
                                let _ = writeln!(
                                    out,
                                    "  and{}_{} -> or{} [style=dashed, label=\"share {},{}\"];",
                                    i, k, n, k, j
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerRow {
    pub atom: String,
    pub cp: String,
    pub ap: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepRow {
    pub atom: String,
    pub cp: String,
    /// `None` for initial queries.
    pub from: Option<DepSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepSource {
    pub node: String,
    pub clause: usize,
    pub literal: usize,
    pub cp: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenRow {
    pub atom: String,
    pub cp: String,
    pub general: String,
    pub general_cp: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecRow {
    pub atom: String,
    pub cp: String,
    pub link: String,
    pub clauses: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDump {
    pub answers: Vec<AnswerRow>,
    pub deps: Vec<DepRow>,
    pub gen: Vec<GenRow>,
    pub spec: Vec<SpecRow>,
}

fn render_pair<D: AbstractDomain>(k: &AbstractAtom<D>, extra: Option<&D>) -> (String, String, Option<String>) {
    let mut namer = Namer::new();
    let atom = atom_to_string(&k.atom, &mut namer);
    let cp = k.cp.render(&mut namer);
    let e = extra.map(|d| d.render(&mut namer));
    (atom, cp, e)
}

pub fn table_dump<D: AbstractDomain>(a: &Analysis<D>) -> TableDump {
    let mut dump = TableDump::default();
    for k in &a.at_order {
        let (atom, cp, ap) = render_pair(k, Some(&a.at[k]));
        dump.answers.push(AnswerRow { atom, cp, ap: ap.unwrap_or_default() });
    }
    for k in &a.at_order {
        for d in &a.dt[k] {
            let (atom, cp, _) = render_pair(k, None);
            let from = match &d.resume {
                Resume::Entry => None,
                Resume::Literal { node, clause, cp: before, k: rule, i, .. } => {
                    let mut namer = Namer::new();
                    let node_s = node.render();
                    let _ = atom_to_string(&clause.head, &mut namer);
                    Some(DepSource { node: node_s, clause: *rule, literal: *i, cp: before.render(&mut namer) })
                }
            };
            dump.deps.push(DepRow { atom, cp, from });
        }
    }
    for (k, g) in &a.global.gt {
        let (atom, cp, _) = render_pair(k, None);
        let (general, general_cp, _) = render_pair(g, None);
        dump.gen.push(GenRow { atom, cp, general, general_cp });
    }
    for k in &a.global.st_order {
        let e = &a.global.st[k];
        let mut namer = Namer::new();
        let atom = atom_to_string(&k.atom, &mut namer);
        let cp = k.cp.render(&mut namer);
        let link = atom_to_string(&e.link, &mut namer);
        dump.spec.push(SpecRow { atom, cp, link, clauses: e.clauses.clone() });
    }
    dump
}

/// JSON with the fixed key order `answers`, `deps`, `gen`, `spec`.
pub fn dump_tables<D: AbstractDomain>(a: &Analysis<D>) -> String {
    serde_json::to_string_pretty(&table_dump(a)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ShFr;
    use crate::engine::{run_engine, EngineConfig, EngineKind};
    use crate::frontend::{entry_to_abstract_atom, parse_program, ExecTable};
    use crate::global::GeneralizeStrategy;
    use crate::unfold::UnfoldConfig;

    fn full() -> (Analysis<ShFr>, Vec<EntryDecl>) {
        let unit = parse_program(include_str!("../corpus/running.pl")).unwrap();
        let entries: Vec<AbstractAtom<ShFr>> =
            unit.entries.iter().map(|e| entry_to_abstract_atom(e).unwrap()).collect();
        let cfg = EngineConfig {
            engine: EngineKind::Analyze,
            generalize: GeneralizeStrategy::Id,
            unfold: UnfoldConfig::default(),
        };
        (run_engine(&unit.program, &entries, &ExecTable::default(), &cfg).unwrap(), unit.entries)
    }

    #[test]
    fn running_example_residual() {
        let (a, decls) = full();
        let r = generate(&a, &decls).unwrap();
        let text: Vec<String> = r.clauses.iter().map(|c| clause_to_string(c, &mut Namer::new())).collect();
        assert_eq!(
            text,
            vec![
                "sp_main(s(s(s(0))),0).",
                "sp_main(s(s(s(s(A)))),B) :- sp_tw(A,C), sp_formula(C,B).",
                "sp_tw(0,0).",
                "sp_tw(s(A),s(s(B))) :- sp_tw(A,B).",
                "sp_formula(0,s(s(s(s(0))))).",
                "sp_formula(s(A),s(s(s(s(s(s(B))))))) :- sp_tw(A,B).",
            ]
        );
        assert!(r.to_source().starts_with(":- entry sp_main(s(s(s(L))),R) : (ground(L), var(R)).\n"));
    }

    #[test]
    fn dot_shares_tw_node() {
        let (a, _) = full();
        let dot = export_dot(&a);
        assert_eq!(dot.matches("shape=ellipse").count(), 3);
        let tw = a.at_order.iter().position(|k| k.atom.pred.as_ref() == "tw").unwrap();
        let shares = dot.lines().filter(|l| l.contains(&format!("-> or{} [style=dashed", tw))).count();
        assert_eq!(shares, 2);
        assert!(dot.contains("{A/G,B/V}") && dot.contains("{A/G,B/G}"));
    }

    #[test]
    fn dump_round_trips() {
        let (a, _) = full();
        let text = dump_tables(&a);
        let back: TableDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back, table_dump(&a));
        assert_eq!(back.answers.len(), 3);
    }

    #[test]
    fn merging_collapses_identical_versions() {
        let p = parse_program("a(X) :- b(X).\nb(0).\nc(X) :- d(X).\nd(0).").unwrap().program;
        let m = merge_equivalent(p.clauses());
        assert_eq!(m[&sym("c")], sym("a"));
        assert_eq!(m[&sym("d")], sym("b"));
        assert_eq!(m[&sym("a")], sym("a"));
    }
}
