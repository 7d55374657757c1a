//! Construction and verification of higher-order Lie symmetry operators.
//!
//! A symmetry of the Schrödinger operator `H = −d² + V` at hierarchy level
//! `N` is an ordinary differential operator `Q` of odd order `n = 2N + 1`,
//! normalized to leading coefficient `1`, satisfying
//!
//! ```text
//! [Q, H] = κ H        modulo the stationary constraint G = 0,
//! ```
//!
//! where `G = F_N + Σ_{j<N} C_j F_j + κ_fam (xV′/2 + V)` is a member of the
//! stationary hierarchy (see [`crate::hierarchy`]).
//!
//! Two independent builders produce `Q`:
//!
//! - [`build_q_eps_elimination`] assembles `Q = Σ_j (a_j d + b_j)(−H)^j`
//!   from a chain of first-order pieces (commuting case, `κ = 0`);
//! - [`build_q_recurrence`] solves the descending recurrence for the
//!   coefficients `q_n, …, q_0` of `Q = Σ q_j d^j` directly (any `κ`).
//!
//! Both builders validate themselves against the independent commutator
//! expansion from [`crate::operator`]: they recompute `[Q, H] − κH`, check
//! that every coefficient of `d^{≥1}` vanishes identically, and check that
//! the order-0 coefficient equals the exact multiple
//! [`residual_scale`]`(N) · G` of the constraint. A construction that cannot
//! prove this about its own output is rejected as an internal error rather
//! than returned.
//!
//! # The two meanings of κ
//!
//! The scaling parameter appears in two equivalent normalizations, related
//! by an exact factor:
//!
//! - **commutator form** `κ_com`: the multiple of `H` in `[Q, H] = κ_com H`
//!   (carried by [`SymmetryOperator::kappa`]);
//! - **family form** `κ_fam`: the coefficient of the scaling term
//!   `S = xV′/2 + V` in the constraint `G` (carried by
//!   [`ConstraintSpec::kappa`]).
//!
//! For the normalized builders at level `N` they satisfy
//! `κ_com = (−1)^N · 2 · κ_fam` — see [`kappa_commutator`] /
//! [`kappa_family`]. The first-order dilation symmetry
//! ([`dilation_symmetry`]) is not normalizable to leading coefficient `1`
//! and has its own correspondence, documented there.

mod first_order;
mod recurrence;
mod verify;

pub use first_order::{
    build_first_order, build_q_eps_elimination, coefficients_a, FirstOrderSymmetry,
};
pub use recurrence::build_q_recurrence;
pub use verify::{l_equivalent, verify_commutator};

use num_traits::Zero;
use thiserror::Error;

use crate::hierarchy::ConstraintSpec;
use crate::operator::DiffOperator;
use crate::ring::{rat, RingError};
use crate::{DiffPoly, Rat};

/// Errors from symmetry construction.
#[derive(Debug, Error)]
pub enum SymmetryError {
    /// The builder only supports the commuting case `κ = 0`.
    #[error("the {builder} builder requires κ = 0, got κ = {kappa}")]
    KappaUnsupported {
        /// Name of the rejecting builder.
        builder: &'static str,
        /// The offending family-form κ.
        kappa: Rat,
    },
    /// No normalized symmetry of order 1 exists for `κ ≠ 0`; the dilation
    /// form ([`dilation_symmetry`]) covers that case.
    #[error("no order-1 symmetry with unit leading coefficient exists for κ ≠ 0; use the dilation symmetry")]
    OrderMismatch,
    /// The dilation symmetry is specifically the `κ ≠ 0` case.
    #[error("the dilation symmetry requires κ ≠ 0")]
    ZeroKappaDilation,
    /// An antiderivative demanded by the construction does not exist in the
    /// ring; the specification is inconsistent.
    #[error(transparent)]
    Ring(#[from] RingError),
    /// The builder's self-validation against the independent commutator
    /// expansion failed. Indicates a bug, never user error.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// A constructed symmetry operator together with the data that makes its
/// defining identity checkable: the commutator-form κ and the constraint
/// it holds modulo.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryOperator {
    q: DiffOperator,
    kappa: Rat,
    family: Option<ConstraintSpec>,
    constraint: DiffPoly,
}

impl SymmetryOperator {
    /// Assemble a symmetry claimed for a hierarchy family; the constraint is
    /// the family's residual. No validation happens here — pass the result
    /// to [`verify_commutator`] to check the claim.
    pub fn from_parts(q: DiffOperator, kappa: Rat, family: ConstraintSpec) -> Self {
        let constraint = family.residual();
        SymmetryOperator {
            q,
            kappa,
            family: Some(family),
            constraint,
        }
    }

    /// Assemble a symmetry claimed modulo an arbitrary constraint polynomial
    /// (used by first-order dilations, whose constraint `ξV′ = κV` is not a
    /// hierarchy residual when `c = 0`).
    pub fn from_raw_constraint(q: DiffOperator, kappa: Rat, constraint: DiffPoly) -> Self {
        SymmetryOperator {
            q,
            kappa,
            family: None,
            constraint,
        }
    }

    /// The operator `Q` itself, coefficients in the differential ring.
    pub fn q(&self) -> &DiffOperator {
        &self.q
    }

    /// The commutator-form κ: `[Q, H] = κ H` modulo the constraint.
    pub fn kappa(&self) -> &Rat {
        &self.kappa
    }

    /// The hierarchy family this symmetry belongs to, when it is one.
    pub fn family(&self) -> Option<&ConstraintSpec> {
        self.family.as_ref()
    }

    /// The constraint polynomial the commutator identity holds modulo.
    pub fn constraint(&self) -> &DiffPoly {
        &self.constraint
    }

    /// Order of `Q`. Construction never produces the zero operator.
    pub fn order(&self) -> u32 {
        self.q.order().expect("symmetry operators are nonzero")
    }
}

/// Convert family-form κ (coefficient of the scaling term in the level-`N`
/// constraint) to commutator-form κ (`[Q, H] = κ H`):
/// `κ_com = (−1)^N · 2 · κ_fam`.
pub fn kappa_commutator(level: u32, kappa_family: &Rat) -> Rat {
    let sign = if level.is_multiple_of(2) { rat(2, 1) } else { rat(-2, 1) };
    sign * kappa_family
}

/// Convert commutator-form κ to family-form κ at level `N`:
/// `κ_fam = (−1)^N · κ_com / 2`. Inverse of [`kappa_commutator`].
pub fn kappa_family(level: u32, kappa_commutator: &Rat) -> Rat {
    let sign = if level.is_multiple_of(2) { rat(1, 2) } else { rat(-1, 2) };
    sign * kappa_commutator
}

/// The exact factor `λ_N = (−1)^{N+1} · 2` between the order-0 commutator
/// residual of a normalized level-`N` symmetry and the family constraint:
/// `[Q, H] − κ_com H = λ_N · G · 𝟙`.
pub fn residual_scale(level: u32) -> Rat {
    if level.is_multiple_of(2) {
        rat(-2, 1)
    } else {
        rat(2, 1)
    }
}

/// `H = −d² + V` with the potential left symbolic.
pub(crate) fn h_symbolic() -> DiffOperator {
    DiffOperator::schrodinger(&DiffPoly::v(0))
}

/// The first-order dilation symmetry `Q = (−κx/2 + c) d` with
/// `[Q, H] = κ H` exactly for every potential satisfying
/// `(−κx/2 + c) V′ = κ V` (κ here in commutator form, necessarily ≠ 0).
///
/// The solutions are the shifted inverse squares `V = A (x − 2c/κ)^{−2}`;
/// for `c = 0` this is the pure scaling family `V = A/x²`. For `c ≠ 0` the
/// constraint is the exact multiple `−2c · G` of the level-0 family
/// constraint with `κ_fam = κ_com / (2c)`, and that family is attached to
/// the result; for `c = 0` the constraint `−κ(xV′/2 + V)` is not a
/// hierarchy residual and no family is attached.
pub fn dilation_symmetry(kappa: &Rat, c: &Rat) -> Result<SymmetryOperator, SymmetryError> {
    if kappa.is_zero() {
        return Err(SymmetryError::ZeroKappaDilation);
    }
    let xi = &DiffPoly::x().scale(&(rat(-1, 2) * kappa)) + &DiffPoly::constant(c.clone());
    let q = DiffOperator::single(1, xi.clone());
    // ξV′ − κV: the exact order-0 residual of [Q, H] − κH, doubling as the
    // defining constraint.
    let constraint = &(&xi * &DiffPoly::v(1)) - &DiffPoly::v(0).scale(kappa);
    if c.is_zero() {
        Ok(SymmetryOperator::from_raw_constraint(
            q,
            kappa.clone(),
            constraint,
        ))
    } else {
        let family = ConstraintSpec::new(0, kappa / (c * rat(2, 1)), vec![])
            .expect("level-0 spec takes no constants");
        Ok(SymmetryOperator {
            q,
            kappa: kappa.clone(),
            family: Some(family),
            constraint,
        })
    }
}

/// A named strategy for constructing the level-`N` symmetry operator of a
/// constraint family. The two implementations are mathematically
/// independent, which is what makes their agreement a meaningful check.
pub trait SymmetryBuilder: Sync {
    /// Stable name used by the command-line interface and reports.
    fn name(&self) -> &'static str;

    /// Build the symmetry operator for `spec`, self-validating against the
    /// independent commutator expansion.
    fn build(&self, spec: &ConstraintSpec) -> Result<SymmetryOperator, SymmetryError>;
}

/// Builder that eliminates the first-order chain into powers of `−H`.
/// Commuting case only.
pub struct EpsElimination;

impl SymmetryBuilder for EpsElimination {
    fn name(&self) -> &'static str {
        "eps-elimination"
    }

    fn build(&self, spec: &ConstraintSpec) -> Result<SymmetryOperator, SymmetryError> {
        let first = build_first_order(spec)?;
        build_q_eps_elimination(&first, spec)
    }
}

/// Builder that solves the descending coefficient recurrence. Supports any
/// κ at level ≥ 1 and κ = 0 at level 0.
pub struct CoefficientRecurrence;

impl SymmetryBuilder for CoefficientRecurrence {
    fn name(&self) -> &'static str {
        "coefficient-recurrence"
    }

    fn build(&self, spec: &ConstraintSpec) -> Result<SymmetryOperator, SymmetryError> {
        build_q_recurrence(spec)
    }
}

/// All registered symmetry builders.
pub fn builders() -> Vec<Box<dyn SymmetryBuilder>> {
    vec![Box::new(EpsElimination), Box::new(CoefficientRecurrence)]
}
