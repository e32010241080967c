//! Invariants of irreducible plane curve germs in exact rational arithmetic.

pub mod branch;
pub mod closure;
pub mod differentials;
pub mod error;
pub mod harness;
pub(crate) mod json;
pub mod linalg;
pub mod poly;
pub mod semigroup;
pub mod series;

pub use branch::{make_branch, CoefficientChoice, PuiseuxBranch, SemirootSystem};
pub use error::{Error, Result};
pub use poly::PlaneCurvePoly;
pub use semigroup::NumericalSemigroup;
pub use series::{TruncatedSeries, Q};
