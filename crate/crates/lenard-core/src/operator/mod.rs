//! Ordinary differential operators with differential-polynomial coefficients.
//!
//! Operators are kept in right-normal form `Σ_j q_j(x, V, V′, …) dʲ` (all
//! derivatives to the right of coefficients); composition renormalizes
//! immediately via the generalized Leibniz rule. The [`rewriter`] submodule
//! reduces ring elements modulo a stationary constraint and its
//! prolongations, which is how "vanishes for every potential in the family"
//! becomes a decidable check.

mod ops;
pub mod rewriter;

pub use ops::{commutator, op_from_json, op_to_json, DiffOperator};
pub(crate) use ops::binomial;
pub use rewriter::{ConstraintRewriter, RewriteError};
