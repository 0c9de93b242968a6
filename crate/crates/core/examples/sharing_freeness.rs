//! The sharing-freeness domain on small examples: entry descriptions,
//! abstract unification, projection, join and the concretization test.

use aispec::domain::{AbstractDomain, ShFr};
use aispec::subst::Subst;
use aispec::term::{Namer, Term, Var};

fn main() {
    let (x, y, z) = (Var::fresh(), Var::fresh(), Var::fresh());
    let mut names = std::collections::HashMap::new();
    names.insert(x, "X".to_string());
    names.insert(y, "Y".to_string());
    names.insert(z, "Z".to_string());
    let mut namer = Namer::with_names(names);
    let scope = [x, y, z];

    let free = ShFr::from_modes(&scope, &[], &scope).unwrap();
    println!("all free:            {}", free.render(&mut namer));

    let bound = free.unify(&Term::Var(x), &Term::app("f", vec![Term::Var(y), Term::Var(z)]));
    println!("after X = f(Y,Z):    {}  sharing {:?}", bound.render(&mut namer), bound.sharing().unwrap().len());

    // Y is definitely free here, so ground(Y) cannot succeed.
    println!("then ground(Y):      {}", bound.assume_ground(&[y]).render(&mut namer));
    let unknown = ShFr::top(&scope).unify(&Term::Var(x), &Term::app("f", vec![Term::Var(y), Term::Var(z)]));
    println!("from top, X = f(Y,Z) then ground(Y): {}", unknown.assume_ground(&[y]).render(&mut namer));

    let ground_x = free.unify(&Term::Var(x), &Term::constant("a"));
    println!("after X = a:         {}", ground_x.render(&mut namer));
    println!("join of the two:     {}", bound.lub(&ground_x).render(&mut namer));
    println!("projected on X, Y:   {}", bound.restrict(&[x, y]).render(&mut namer));

    // X = f(W, W) with Y, Z untouched: W is shared by X alone.
    let w = Var::fresh();
    let theta = Subst::from_pairs([(x, Term::app("f", vec![Term::Var(w), Term::Var(w)]))]);
    println!("X = f(W,W) described by top:  {}", ShFr::top(&scope).satisfies(&theta));
    println!("X = f(W,W) described by free: {}", free.satisfies(&theta));
}
