//! Computable positively homogeneous function calculus on vector lattices.
//!
//! The crate makes the calculus `x = (x_1, ..., x_n) |-> Phi_x(f)` executable:
//! lattice-linear terms are rewritten to an exact max-min normal form,
//! general positively homogeneous continuous functions are approximated by
//! certified lattice expressions over a sphere net, and both are applied
//! inside concrete vector lattice models (rational vectors, piecewise linear
//! functions, germs, lexicographic planes). Everything order-theoretic is
//! exact; floating point only enters through transcendental targets and is
//! accounted for by explicit certificate slack.

pub mod approx;
pub mod calculus;
pub mod counterexamples;
pub mod error;
pub mod lp;
pub mod models;
pub mod nf;
pub mod phfn;
pub mod rat;
pub mod sampling;
pub mod sigma;
pub mod sphere;
pub mod term;

pub use error::{Error, Result};
pub use nf::{normalize, normalize_with, LinearForm, MaxMinNF, NormalizeOptions};
pub use rat::Rat;
pub use term::{Term, TermNode};
