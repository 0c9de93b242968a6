//! Most specific generalization and homeomorphic embedding.

use std::collections::HashMap;

use crate::subst::Subst;
use crate::term::{Atom, Term, Var};

/// Anti-unifier of two terms together with the substitutions mapping it back
/// onto each input.
#[derive(Clone, Debug)]
pub struct Generalization {
    pub term: Term,
    pub left: Subst,
    pub right: Subst,
}

/// Most specific generalization. Identical subterms are kept; each distinct
/// pair of mismatching subterms is replaced by one fresh variable, reused
/// wherever the same pair occurs again.
pub fn msg(t1: &Term, t2: &Term) -> Generalization {
    let mut pairs: HashMap<(Term, Term), Var> = HashMap::new();
    let term = anti_unify(t1, t2, &mut pairs);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for ((a, b), v) in pairs {
        left.push((v, a));
        right.push((v, b));
    }
    Generalization { term, left: Subst::from_pairs(left), right: Subst::from_pairs(right) }
}

fn anti_unify(t1: &Term, t2: &Term, pairs: &mut HashMap<(Term, Term), Var>) -> Term {
    if t1 == t2 {
        return t1.clone();
    }
    match (t1, t2) {
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            Term::App(f.clone(), xs.iter().zip(ys).map(|(a, b)| anti_unify(a, b, pairs)).collect())
        }
        _ => Term::Var(*pairs.entry((t1.clone(), t2.clone())).or_insert_with(Var::fresh)),
    }
}

/// msg on atoms; `None` when the predicates differ.
pub fn msg_atoms(a: &Atom, b: &Atom) -> Option<(Atom, Subst, Subst)> {
    if a.pred != b.pred || a.arity() != b.arity() {
        return None;
    }
    let g = msg(&a.to_term(), &b.to_term());
    let atom = Atom::from_term(&g.term).expect("root functor is preserved");
    Some((atom, g.left, g.right))
}

/// `small ⊴ big` under the usual rules: variables embed in variables,
/// diving into an argument of `big`, and coupling of equal functors.
/// Memoized on subterm addresses, so the cost is quadratic in term size.
pub fn homeomorphic_embeds(small: &Term, big: &Term) -> bool {
    Embed::default().embeds(small, big)
}

#[derive(Default)]
struct Embed {
    memo: HashMap<(*const Term, *const Term), bool>,
}

impl Embed {
    fn embeds(&mut self, small: &Term, big: &Term) -> bool {
        match (small, big) {
            (Term::Var(_), Term::Var(_)) => return true,
            (_, Term::Var(_)) => return false,
            _ => {}
        }
        let key = (small as *const Term, big as *const Term);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.couples(small, big) || big.args().iter().any(|b| self.embeds(small, b));
        self.memo.insert(key, r);
        r
    }

    fn couples(&mut self, small: &Term, big: &Term) -> bool {
        match (small, big) {
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| self.embeds(a, b))
            }
            _ => false,
        }
    }
}

/// Embedding on atoms: requires equal predicates (coupling at the root).
pub fn atom_embeds(small: &Atom, big: &Atom) -> bool {
    small.pred == big.pred
        && small.arity() == big.arity()
        && {
            let mut e = Embed::default();
            small.args.iter().zip(&big.args).all(|(a, b)| e.embeds(a, b))
        }
}
