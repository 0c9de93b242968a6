//! Tokenizer and recursive-descent parser for the Prolog subset: clauses with
//! `,` conjunction, lists, `%` and `/* */` comments, and the `:- module`,
//! `:- entry` and `:- exec` directives.

use std::collections::HashMap;

use super::exec_table::{ExecEntry, Mode, Replacement};
use super::{EntryDecl, ParseError, Property, SourceUnit};
use crate::term::{sym, Atom, PredKey, Term, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Var(String),
    Int(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Bar,
    Comma,
    End,
    Neck,
    Colon,
    Arrow,
    Slash,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let err = |msg: &str| ParseError::Syntax { line: l0, col: c0, msg: msg.to_string() };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col, 2);
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                advance(&mut i, &mut line, &mut col, 1);
            }
            if i >= chars.len() {
                return Err(err("unterminated block comment"));
            }
            advance(&mut i, &mut line, &mut col, 2);
            continue;
        }
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if c.is_ascii_uppercase() || c == '_' {
                (Tok::Var(word), j - i)
            } else {
                (Tok::Name(word), j - i)
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            (Tok::Int(chars[i..j].iter().collect()), j - i)
        } else if c == '\'' {
            let mut j = i + 1;
            let mut name = String::new();
            loop {
                match chars.get(j) {
                    None => return Err(err("unterminated quoted atom")),
                    Some('\\') => {
                        name.push(*chars.get(j + 1).ok_or_else(|| err("bad escape"))?);
                        j += 2;
                    }
                    Some('\'') => {
                        j += 1;
                        break;
                    }
                    Some(&ch) => {
                        name.push(ch);
                        j += 1;
                    }
                }
            }
            (Tok::Name(name), j - i)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                (':', Some('-')) => (Tok::Neck, 2),
                ('~', Some('>')) => (Tok::Arrow, 2),
                (':', _) => (Tok::Colon, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                ('|', _) => (Tok::Bar, 1),
                ('/', _) => (Tok::Slash, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', n) if n.map_or(true, |n| n.is_whitespace() || n == '%') => (Tok::End, 1),
                _ => return Err(err(&format!("unexpected character '{}'", c))),
            }
        };
        out.push(Token { tok, line: l0, col: c0 });
        advance(&mut i, &mut line, &mut col, len);
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Variable scope of one clause or directive.
#[derive(Default)]
pub(crate) struct VarScope {
    by_name: HashMap<String, Var>,
    pub(crate) names: HashMap<Var, String>,
}

impl VarScope {
    fn get(&mut self, name: &str) -> Var {
        if name == "_" {
            return Var::fresh();
        }
        if let Some(v) = self.by_name.get(name) {
            return *v;
        }
        let v = Var::fresh();
        self.by_name.insert(name.to_string(), v);
        self.names.insert(v, name.to_string());
        v
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {:?}", what, self.peek())))
        }
    }

    fn term(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        let lhs = self.primary(scope)?;
        if *self.peek() == Tok::Slash {
            self.next();
            let rhs = self.primary(scope)?;
            return Ok(Term::app("/", vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn primary(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        match self.next() {
            Tok::Var(name) => Ok(Term::Var(scope.get(&name))),
            Tok::Int(n) => Ok(Term::Const(sym(&n))),
            Tok::Name(name) => {
                if *self.peek() == Tok::LParen {
                    self.next();
                    let args = self.arglist(scope)?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Term::app(&name, args))
                } else {
                    Ok(Term::Const(sym(&name)))
                }
            }
            Tok::LBrack => {
                if *self.peek() == Tok::RBrack {
                    self.next();
                    return Ok(Term::constant("[]"));
                }
                let items = self.arglist(scope)?;
                let tail = if *self.peek() == Tok::Bar {
                    self.next();
                    self.term(scope)?
                } else {
                    Term::constant("[]")
                };
                self.expect(Tok::RBrack, "']'")?;
                Ok(items.into_iter().rev().fold(tail, |t, h| Term::app(".", vec![h, t])))
            }
            Tok::LParen => {
                let t = self.term(scope)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            other => {
                self.pos -= 1;
                Err(self.error(format!("expected a term, found {:?}", other)))
            }
        }
    }

    fn arglist(&mut self, scope: &mut VarScope) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term(scope)?];
        while *self.peek() == Tok::Comma {
            self.next();
            args.push(self.term(scope)?);
        }
        Ok(args)
    }

    fn atom(&mut self, scope: &mut VarScope) -> Result<Atom, ParseError> {
        let t = self.term(scope)?;
        Atom::from_term(&t).ok_or_else(|| self.error("a variable cannot be used as a goal"))
    }

    /// Comma-separated atoms, optionally wrapped in parentheses.
    fn conjunction(&mut self, scope: &mut VarScope) -> Result<Vec<Atom>, ParseError> {
        let wrapped = *self.peek() == Tok::LParen;
        if wrapped {
            self.next();
        }
        let mut goals = vec![self.atom(scope)?];
        while *self.peek() == Tok::Comma {
            self.next();
            goals.push(self.atom(scope)?);
        }
        if wrapped {
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(goals)
    }

    fn skip_to_end(&mut self) {
        while !matches!(self.peek(), Tok::End | Tok::Eof) {
            self.next();
        }
        if *self.peek() == Tok::End {
            self.next();
        }
    }
}

fn parse_exec_entry_tokens(
    p: &mut Parser,
    scope: &mut VarScope,
) -> Result<ExecEntry, ParseError> {
    let pattern = p.atom(scope)?;
    let mut guard = Vec::new();
    if *p.peek() == Tok::Colon {
        p.next();
        for g in p.conjunction(scope)? {
            let mode = match (g.pred.as_ref(), g.args.as_slice()) {
                ("true", []) => continue,
                ("g", [Term::Var(v)]) => (*v, Mode::Ground),
                ("f", [Term::Var(v)]) => (*v, Mode::Free),
                _ => return Err(p.error(format!("unsupported guard {}", g))),
            };
            guard.push(mode);
        }
    }
    p.expect(Tok::Arrow, "'~>'")?;
    let rep = p.atom(scope)?;
    let replacement = match (rep.pred.as_ref(), rep.arity()) {
        ("true", 0) => Replacement::True,
        ("false", 0) | ("fail", 0) => Replacement::False,
        _ => Replacement::Atom(rep),
    };
    ExecEntry::new(pattern, guard, replacement).map_err(|m| p.error(m))
}

pub fn parse_program(text: &str) -> Result<SourceUnit, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let mut unit = SourceUnit::default();
    while *p.peek() != Tok::Eof {
        let mut scope = VarScope::default();
        if *p.peek() == Tok::Neck {
            p.next();
            directive(&mut p, &mut scope, &mut unit)?;
            continue;
        }
        let head = p.atom(&mut scope)?;
        let body = if *p.peek() == Tok::Neck {
            p.next();
            p.conjunction(&mut scope)?
        } else {
            Vec::new()
        };
        p.expect(Tok::End, "'.' ending the clause")?;
        let body = body.into_iter().filter(|a| !(a.pred.as_ref() == "true" && a.arity() == 0)).collect();
        let k = unit.program.add_clause(head, body);
        unit.var_names.insert(k, scope.names);
    }
    for e in &unit.entries {
        let key = e.atom.key();
        if !unit.program.defines(&key) && !unit.exports.contains(&key) {
            return Err(ParseError::Entry(format!("entry predicate {} is not defined", key)));
        }
    }
    Ok(unit)
}

fn directive(p: &mut Parser, scope: &mut VarScope, unit: &mut SourceUnit) -> Result<(), ParseError> {
    let keyword = match (p.peek().clone(), p.peek_at(1).clone()) {
        (Tok::Name(n), next) if next != Tok::LParen => Some(n),
        _ => None,
    };
    match keyword.as_deref() {
        Some("entry") => {
            p.next();
            let atom = p.atom(scope)?;
            let mut props = Vec::new();
            if *p.peek() == Tok::Colon {
                p.next();
                for g in p.conjunction(scope)? {
                    let prop = match (g.pred.as_ref(), g.args.as_slice()) {
                        ("ground", [Term::Var(v)]) => (Property::Ground, *v),
                        ("var", [Term::Var(v)]) => (Property::Var, *v),
                        ("true", []) => continue,
                        _ => {
                            return Err(ParseError::Entry(format!(
                                "unsupported entry property {} (only ground/1 and var/1 on variables)",
                                g
                            )))
                        }
                    };
                    props.push(prop);
                }
            }
            p.expect(Tok::End, "'.' ending the entry declaration")?;
            let entry = EntryDecl::new(atom, props, scope.names.clone())?;
            unit.entries.push(entry);
        }
        Some("exec") => {
            p.next();
            let e = parse_exec_entry_tokens(p, scope)?;
            p.expect(Tok::End, "'.'")?;
            unit.exec_entries.push(e);
        }
        _ => {
            let start = p.pos;
            let t = p.term(scope);
            match t {
                Ok(Term::App(f, args)) if f.as_ref() == "module" && !args.is_empty() && *p.peek() == Tok::End => {
                    p.next();
                    unit.module = match &args[0] {
                        Term::Const(c) => Some(c.to_string()),
                        _ => None,
                    };
                    if let Some(exports) = args.get(1) {
                        unit.exports = export_list(exports);
                    }
                }
                _ => {
                    let tok = &p.toks[start];
                    unit.warnings.push(format!(
                        "{}:{}: unknown declaration skipped",
                        tok.line, tok.col
                    ));
                    p.pos = start;
                    p.skip_to_end();
                }
            }
        }
    }
    Ok(())
}

fn export_list(t: &Term) -> Vec<PredKey> {
    let mut out = Vec::new();
    let mut cur = t;
    while let Term::App(f, args) = cur {
        if f.as_ref() != "." || args.len() != 2 {
            break;
        }
        if let Term::App(slash, pa) = &args[0] {
            if slash.as_ref() == "/" && pa.len() == 2 {
                if let (Term::Const(n), Term::Const(a)) = (&pa[0], &pa[1]) {
                    if let Ok(arity) = a.parse() {
                        out.push(PredKey { name: n.clone(), arity });
                    }
                }
            }
        }
        cur = &args[1];
    }
    out
}

/// Parses an exec-table file: one `Pattern : Guard ~> Replacement.` per entry.
pub fn parse_exec_table(text: &str) -> Result<Vec<ExecEntry>, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        let mut scope = VarScope::default();
        out.push(parse_exec_entry_tokens(&mut p, &mut scope)?);
        p.expect(Tok::End, "'.'")?;
    }
    Ok(out)
}

/// Parses a single goal such as `main(s(0),R)`; returns the atoms and the
/// variable names used.
pub fn parse_goal(text: &str) -> Result<(Vec<Atom>, HashMap<Var, String>), ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let mut scope = VarScope::default();
    let goal = p.conjunction(&mut scope)?;
    if *p.peek() == Tok::End {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error("trailing input after goal"));
    }
    Ok((goal, scope.names))
}
