pub mod divisor;
pub mod enumerate;
pub mod error;
pub mod poly;
pub mod scalar;
pub mod sexpr;
pub mod signature;
pub mod tree;
pub mod linalg;
pub mod orders;
pub mod rewriting;
pub mod groebner;
pub mod presentation;
pub mod symmetrize;
pub mod catalog;
pub mod freeness;
pub mod reproduce;

pub use scalar::{Coefficient, Fp, Rational};

/// Rational instantiations of the generic core.
pub type RewriterQ = rewriting::Rewriter<Rational>;
pub type PolynomialQ = poly::Polynomial<Rational>;
pub type PresentationQ = presentation::Presentation<Rational>;
pub type MorphismQ = catalog::OperadMorphism<Rational>;

/// Modular instantiations, handy for fast cross-checks of ranks.
pub const CHECK_PRIME: u64 = 1_000_003;
pub type FpCheck = Fp<CHECK_PRIME>;
pub type RewriterFp = rewriting::Rewriter<FpCheck>;
pub type PolynomialFp = poly::Polynomial<FpCheck>;
