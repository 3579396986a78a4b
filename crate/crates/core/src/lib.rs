//! Privileged ERM with zero-one losses on finite domains.
//!
//! The crate covers the whole pipeline: hypotheses and losses ([`hypothesis`],
//! [`loss`]), an exact VC-dimension engine with the derived loss classes
//! ([`vc`]), generators for the explicit classes and distributions used to
//! probe the theory ([`constructions`]), standard and privileged ERM solvers
//! ([`erm`]), the finite-sample generalization bounds and improvement
//! conditions ([`bounds`]), and a seeded Monte Carlo harness ([`sim`]).

pub mod bits;
pub mod bounds;
pub mod constructions;
pub mod domain;
pub mod erm;
pub mod error;
pub mod hypothesis;
pub mod io;
pub mod loss;
pub mod sample;
pub mod sim;
pub mod vc;

pub use bits::Bits;
pub use domain::{FiniteDomain, ProductLayout};
pub use error::{Error, Result};
pub use hypothesis::{Hypothesis, HypothesisClass};
pub use sample::{FiniteDistribution, Triple, TripleSample};
