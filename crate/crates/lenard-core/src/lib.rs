//! Exact symbolic and numeric engine for the stationary KdV hierarchy and
//! higher-order Lie symmetries of one-dimensional Schrödinger operators
//! `H = -d²/dx² + V(x)`.
//!
//! The crate is organized bottom-up:
//!
//! - [`ring`] — the differential-polynomial ring ℚ[x; V, V′, V″, …] with exact
//!   rational coefficients, total derivative, variational derivative, and an
//!   exactness-deciding antiderivative.
//! - [`operator`] — ordinary differential operators with ring-valued
//!   coefficients: composition, commutators, application to ring elements, and
//!   reduction modulo a stationary constraint.
//! - [`hierarchy`] — the Lenard recursion generating conserved densities `U_j`
//!   and flows `F_j`, with cross-checked dual construction routes.
//! - [`symmetry`] — construction of order-`2N+1` symmetry operators `Q` with
//!   `[Q, H] = κ H`, via two independent builders, plus verification and
//!   operator-equivalence checking.
//! - [`quadrature`] — integration of `Hψ = 0` by quadratures from first-order
//!   symmetries.
//! - [`ode`] — an embedded Dormand–Prince 5(4) integrator used by the numeric
//!   routines.
//! - [`potential`] — concrete potential implementations (closed-form, power
//!   sums with shifts, sampled grids) behind one evaluation interface.
//! - [`catalog`] — a verified catalog of potentials and their hierarchy
//!   membership claims.
//! - [`numeric`] — floating-point laboratory: constraint integration, numeric
//!   commutator checks, and least-squares recovery of hierarchy constants.

pub mod catalog;
pub mod hierarchy;
pub mod numeric;
pub mod ode;
pub mod operator;
pub mod potential;
pub mod quadrature;
pub mod ring;
pub mod symmetry;

pub use ring::{DiffPoly, Rat};
