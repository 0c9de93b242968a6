#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use aispec::frontend::{parse_program, SourceUnit};
use aispec::term::{clause_to_string, sym, Clause, Namer};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus() -> Vec<(String, SourceUnit)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().map_or(false, |x| x == "pl"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, parse_program(&text).unwrap())
        })
        .collect()
}

pub fn load(name: &str) -> SourceUnit {
    let text = std::fs::read_to_string(corpus_dir().join(name)).unwrap();
    parse_program(&text).unwrap()
}

/// `sp_foo_3` and `sp_foo` become `foo`; other names are kept.
pub fn base_name(p: &str) -> String {
    let Some(rest) = p.strip_prefix("sp_") else { return p.to_string() };
    match rest.rfind('_') {
        Some(i) if rest[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < rest.len() => rest[..i].to_string(),
        _ => rest.to_string(),
    }
}

/// Clause texts with predicate names mapped through `base_name` and
/// variables named by first occurrence, sorted.
pub fn structural(clauses: &[Clause]) -> Vec<String> {
    let mut out: Vec<String> = clauses
        .iter()
        .map(|c| {
            let map = |a: &aispec::term::Atom| a.with_pred(&sym(&base_name(&a.pred)));
            let c = Clause { number: 0, head: map(&c.head), body: c.body.iter().map(map).collect() };
            clause_to_string(&c, &mut Namer::new())
        })
        .collect();
    out.sort();
    out
}

/// Counts of clauses per base predicate name.
pub fn shape(clauses: &[Clause]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for c in clauses {
        *m.entry(base_name(&c.head.pred)).or_insert(0) += 1;
    }
    m
}
