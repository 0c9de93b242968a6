//! Randomized laws for unification, msg, embedding and the sharing-freeness
//! domain, checked against brute force on a small signature.

use proptest::prelude::*;

use aispec::domain::{AbstractDomain, ShFr};
use aispec::generalize::{homeomorphic_embeds, msg};
use aispec::subst::{is_instance, match_term, mgu, Subst};
use aispec::term::{Term, Var};

/// Shared variable pool so that generated terms overlap.
fn pool() -> &'static [Var] {
    use std::sync::OnceLock;
    static POOL: OnceLock<Vec<Var>> = OnceLock::new();
    POOL.get_or_init(|| (0..3).map(|_| Var::fresh()).collect())
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        Just(Term::constant("b")),
        (0..3usize).prop_map(|i| Term::Var(pool()[i])),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("g", vec![x, y])),
        ]
    })
}

/// Ground terms of depth at most 1.
fn small_ground() -> Vec<Term> {
    let consts = [Term::constant("a"), Term::constant("b")];
    let mut out: Vec<Term> = consts.to_vec();
    for c in &consts {
        out.push(Term::app("f", vec![c.clone()]));
        for d in &consts {
            out.push(Term::app("g", vec![c.clone(), d.clone()]));
        }
    }
    out
}

/// Every ground substitution of the pool over `small_ground`.
fn ground_substs() -> Vec<Subst> {
    let g = small_ground();
    let mut out = Vec::new();
    for x in &g {
        for y in &g {
            for z in &g {
                let vs = pool();
                out.push(Subst::from_pairs([(vs[0], x.clone()), (vs[1], y.clone()), (vs[2], z.clone())]));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mgu_unifies_and_is_most_general(s in term(), t in term()) {
        let grounds = ground_substs();
        match mgu(&s, &t) {
            Some(theta) => {
                prop_assert_eq!(theta.apply(&s), theta.apply(&t));
                for (_, r) in theta.iter() {
                    prop_assert_eq!(&theta.apply(r), r);
                }
                for sigma in grounds.iter().filter(|g| g.apply(&s) == g.apply(&t)) {
                    for v in pool() {
                        let x = Term::Var(*v);
                        prop_assert_eq!(sigma.apply(&theta.apply(&x)), sigma.apply(&x));
                    }
                }
            }
            None => {
                prop_assert!(grounds.iter().all(|g| g.apply(&s) != g.apply(&t)));
            }
        }
    }

    #[test]
    fn msg_is_the_most_specific_common_generalization(s in term(), t in term(), h in term()) {
        let g = msg(&s, &t);
        prop_assert_eq!(g.left.apply(&g.term), s.clone());
        prop_assert_eq!(g.right.apply(&g.term), t.clone());
        if is_instance(&s, &h) && is_instance(&t, &h) {
            prop_assert!(is_instance(&g.term, &h));
        }
    }

    #[test]
    fn matching_agrees_with_instance(s in term(), t in term()) {
        if let Some(theta) = match_term(&s, &t) {
            prop_assert_eq!(theta.apply(&s), t);
        }
    }

    #[test]
    fn embedding_is_reflexive_and_transitive(s in term(), t in term(), u in term()) {
        prop_assert!(homeomorphic_embeds(&s, &s));
        prop_assert!(homeomorphic_embeds(&s, &Term::app("f", vec![s.clone()])));
        if homeomorphic_embeds(&s, &t) && homeomorphic_embeds(&t, &u) {
            prop_assert!(homeomorphic_embeds(&s, &u));
        }
    }

    #[test]
    fn embedding_finds_a_pair_in_long_sequences(ts in proptest::collection::vec(term(), 40)) {
        // A finite witness of the well-quasi-order: over this signature and
        // depth, 40 terms always contain an embedded earlier one.
        let found = (0..ts.len()).any(|j| (0..j).any(|i| homeomorphic_embeds(&ts[i], &ts[j])));
        prop_assert!(found);
    }
}

fn shfr_value() -> impl Strategy<Value = ShFr> {
    let scope: Vec<Var> = pool().to_vec();
    (proptest::collection::vec(any::<bool>(), 7), proptest::collection::vec(any::<bool>(), 3)).prop_filter_map(
        "free variables must be covered",
        move |(groups, free)| {
            let sh: Vec<Vec<Var>> = (1u32..8)
                .filter(|m| groups[*m as usize - 1])
                .map(|m| (0..3).filter(|i| m & (1 << i) != 0).map(|i| scope[i]).collect())
                .collect();
            let fr: Vec<Var> = (0..3).filter(|i| free[*i]).map(|i| scope[i]).collect();
            ShFr::from_parts(&scope, sh, fr)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn shfr_lattice(d in shfr_value(), e in shfr_value(), f in shfr_value()) {
        prop_assert_eq!(d.lub(&e), e.lub(&d));
        prop_assert_eq!(d.lub(&e).lub(&f), d.lub(&e.lub(&f)));
        prop_assert!(d.leq(&d.lub(&e)));
        prop_assert!(d.conj(&e).leq(&d) || d.conj(&e).is_bottom());
        if d.leq(&e) {
            prop_assert_eq!(d.lub(&e), e.clone());
        }
    }

    #[test]
    fn shfr_extend_keeps_the_projection(d in shfr_value(), keep in 0..3usize) {
        let scope = d.scope().to_vec();
        let kept: Vec<Var> = scope.iter().copied().take(keep).collect();
        let back = d.restrict(&kept).extend(&scope);
        // Re-added variables come back free and independent, which is not
        // comparable in general; the kept part must agree.
        prop_assert_eq!(back.restrict(&kept), d.restrict(&kept));
    }
}
