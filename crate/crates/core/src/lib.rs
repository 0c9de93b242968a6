pub mod domain;
pub mod frontend;
pub mod generalize;
pub mod subst;
pub mod term;
pub mod unfold;
pub mod global;
pub mod engine;
pub mod codegen;
pub mod interp;
pub mod config;
