//! Symbolic verification of the commutator identity and equivalence of
//! symmetry operators modulo polynomials in `H`.

use num_traits::Zero;

use super::{h_symbolic, SymmetryOperator};
use crate::operator::{commutator, DiffOperator};
use crate::{DiffPoly, Rat};

/// Compute `[Q, H] − κH` and reduce it modulo the symmetry's constraint.
/// The result is the zero operator exactly when the claimed identity holds
/// on the constraint's solution family.
///
/// Reduction strategy:
///
/// - when the constraint admits a polynomial solve for its top derivative
///   (every hierarchy family with `N ≥ 1`, and `N = 0` with `κ = 0`), each
///   commutator coefficient is rewritten modulo the constraint and its
///   prolongations — this catches arbitrary combinations of the constraint
///   and its total derivatives;
/// - otherwise (the first-order dilation, whose constraint has a
///   non-constant leading coefficient), a coefficient is cancelled when it
///   is an exact rational multiple of the constraint, which is the full
///   ideal membership that can occur at order 1.
pub fn verify_commutator(sym: &SymmetryOperator) -> DiffOperator {
    let h = h_symbolic();
    let residual = &commutator(sym.q(), &h) - &h.scale(sym.kappa());
    if let Some(rw) = sym.family().and_then(|f| f.rewriter().ok()) {
        return DiffOperator::from_coeffs(residual.coeffs().map(|(j, p)| (j, rw.reduce(p))));
    }
    let g = sym.constraint();
    DiffOperator::from_coeffs(
        residual
            .coeffs()
            .map(|(j, p)| (j, cancel_proportional(p, g))),
    )
}

/// `p` with any exact rational multiple of `g` removed: returns zero when
/// `p = μg`, otherwise `p` unchanged.
fn cancel_proportional(p: &DiffPoly, g: &DiffPoly) -> DiffPoly {
    if p.is_zero() || g.is_zero() {
        return p.clone();
    }
    let probe = g
        .support()
        .into_iter()
        .next()
        .expect("nonzero polynomial has support");
    let mu = p.coefficient(&probe) / g.coefficient(&probe);
    if mu.is_zero() {
        return p.clone();
    }
    if *p == g.scale(&mu) {
        DiffPoly::zero()
    } else {
        p.clone()
    }
}

/// Decide whether two operators differ by a polynomial in `H` with constant
/// coefficients: `a − b = Σ_j γ_j H^j`. Returns the exact `γ_j` (index `j`)
/// when they do, `None` otherwise.
///
/// This is the natural equivalence for symmetry operators — `H`-polynomial
/// tails commute with `H` exactly and act as constants on each solution
/// space of `Hψ = λψ`, so equivalent operators carry the same symmetry
/// content.
pub fn l_equivalent(a: &DiffOperator, b: &DiffOperator) -> Option<Vec<Rat>> {
    let mut delta = a - b;
    let mut gammas: Vec<Rat> = Vec::new();
    while let Some(order) = delta.order() {
        if order % 2 != 0 {
            return None;
        }
        let j = order / 2;
        let lead = delta.coeff(order).as_constant()?;
        // H^j has leading coefficient (−1)^j on d^{2j}.
        let gamma = if j % 2 == 0 { lead } else { -lead };
        delta = &delta - &h_symbolic().pow(j).scale(&gamma);
        if delta.order().is_some_and(|m| m >= order) {
            return None;
        }
        if gammas.len() <= j as usize {
            gammas.resize(j as usize + 1, Rat::zero());
        }
        gammas[j as usize] = gamma;
    }
    Some(gammas)
}
