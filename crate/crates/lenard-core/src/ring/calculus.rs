//! Differential structure of the ring: total derivative, variational
//! derivative, and an exactness-deciding antiderivative.

use super::poly::{DiffPoly, Monomial};
use super::{Rat, RingError};

/// Total derivative `D = ∂/∂x + Σ_k V^{(k+1)} ∂/∂V^{(k)}`.
pub fn total_derivative(p: &DiffPoly) -> DiffPoly {
    let mut out = p.partial_x();
    if let Some(top) = p.max_order() {
        for k in 0..=top {
            let dk = p.partial_jet(k);
            if dk.is_zero() {
                continue;
            }
            out = &out + &(&dk * &DiffPoly::v(k + 1));
        }
    }
    out
}

/// `n`-fold total derivative.
pub fn nth_total_derivative(p: &DiffPoly, n: u32) -> DiffPoly {
    let mut out = p.clone();
    for _ in 0..n {
        out = total_derivative(&out);
    }
    out
}

/// Variational (Euler) derivative `E(p) = Σ_k (−D)^k ∂p/∂V^{(k)}`.
///
/// `E(p) = 0` characterizes total derivatives among `x`-polynomial elements;
/// see [`antiderivative`] for the constructive converse.
pub fn variational_derivative(p: &DiffPoly) -> DiffPoly {
    let mut out = DiffPoly::zero();
    let Some(top) = p.max_order() else {
        return out;
    };
    for k in 0..=top {
        let mut dk = p.partial_jet(k);
        if dk.is_zero() {
            continue;
        }
        dk = nth_total_derivative(&dk, k);
        if k % 2 == 0 {
            out = &out + &dk;
        } else {
            out = &out - &dk;
        }
    }
    out
}

/// Integrate `a` with respect to the jet variable `V^{(k)}` (ordinary
/// polynomial integration in that variable).
fn integrate_in_jet_var(a: &DiffPoly, k: u32) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for (m, c) in a.terms() {
        let e = m.jet_exponent(k);
        let mut jet = m.jet().clone();
        jet.insert(k, e + 1);
        out.add_term(
            Monomial::new(m.xdeg(), jet),
            c / Rat::from_integer((e + 1).into()),
        );
    }
    out
}

/// Constant-free antiderivative: find `q` with `D(q) = p`, or report that no
/// such ring element exists.
///
/// The algorithm strips the jet part order by order. If `p = D(q)` with `q`
/// of top order `K−1`, then `p` is linear in its top variable `V^{(K)}` with
/// coefficient `A = ∂q/∂V^{(K−1)}`; integrating `A` in `V^{(K−1)}` recovers
/// that slice of `q` and strictly lowers the top order of the remainder.
/// A leftover jet part of order zero is never exact, and the pure-`x`
/// remainder integrates by the power rule except for `x⁻¹`.
pub fn antiderivative(p: &DiffPoly) -> Result<DiffPoly, RingError> {
    let mut rem = p.clone();
    let mut acc = DiffPoly::zero();
    loop {
        let jet_part = rem.jet_part();
        if jet_part.is_zero() {
            break;
        }
        let top = jet_part
            .max_order()
            .expect("nonzero jet part has a top order");
        if top == 0 {
            return Err(RingError::NotExact { obstruction: rem });
        }
        let a = rem.partial_jet(top);
        if a.max_exponent_of(top) > 0 {
            // V^{(top)} appears with exponent ≥ 2: cannot be a total derivative.
            return Err(RingError::NotExact { obstruction: rem });
        }
        let q = integrate_in_jet_var(&a, top - 1);
        rem = &rem - &total_derivative(&q);
        acc = &acc + &q;
        debug_assert!(rem.max_order().is_none_or(|k| k < top));
    }
    // Pure-x remainder: power rule, with 1/x the sole obstruction.
    for (m, c) in rem.terms() {
        let deg = m.xdeg();
        if deg == -1 {
            return Err(RingError::NotExact {
                obstruction: DiffPoly::term(m.clone(), c.clone()),
            });
        }
        acc.add_term(
            Monomial::x_pow(deg + 1),
            c / Rat::from_integer((deg + 1).into()),
        );
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::super::{rat, rat_int};
    use super::*;

    fn v(k: u32) -> DiffPoly {
        DiffPoly::v(k)
    }

    #[test]
    fn total_derivative_of_jet_variable() {
        assert_eq!(total_derivative(&v(0)), v(1));
        assert_eq!(total_derivative(&v(3)), v(4));
    }

    #[test]
    fn total_derivative_of_x_powers() {
        assert_eq!(
            total_derivative(&DiffPoly::x_pow(3)),
            DiffPoly::x_pow(2).scale(&rat_int(3))
        );
        assert_eq!(
            total_derivative(&DiffPoly::x_pow(-2)),
            DiffPoly::x_pow(-3).scale(&rat_int(-2))
        );
        assert_eq!(total_derivative(&DiffPoly::from_int(7)), DiffPoly::zero());
    }

    #[test]
    fn total_derivative_is_leibniz() {
        let p = &(&v(0) * &v(1)) + &DiffPoly::x();
        let q = &v(2) - &DiffPoly::x_pow(-1);
        let lhs = total_derivative(&(&p * &q));
        let rhs = &(&total_derivative(&p) * &q) + &(&p * &total_derivative(&q));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn variational_derivative_of_vprime_squared() {
        // E((V')²) = -2 V''
        let p = v(1).pow(2);
        assert_eq!(variational_derivative(&p), v(2).scale(&rat_int(-2)));
    }

    #[test]
    fn variational_derivative_kills_total_derivatives() {
        let q = &(&v(0).pow(2) * &v(2)) + &(&DiffPoly::x_pow(2) * &v(1));
        let p = total_derivative(&q);
        assert!(variational_derivative(&p).is_zero());
    }

    #[test]
    fn antiderivative_basic() {
        // ∫ -V'/2 = -V/2
        let p = v(1).scale(&rat(-1, 2));
        assert_eq!(antiderivative(&p).unwrap(), v(0).scale(&rat(-1, 2)));
        // ∫ -V V'/2 = -V²/4
        let p = (&v(0) * &v(1)).scale(&rat(-1, 2));
        assert_eq!(antiderivative(&p).unwrap(), v(0).pow(2).scale(&rat(-1, 4)));
        // ∫ V' V'' = V'²/2
        let p = &v(1) * &v(2);
        assert_eq!(antiderivative(&p).unwrap(), v(1).pow(2).scale(&rat(1, 2)));
        // ∫ x² = x³/3
        assert_eq!(
            antiderivative(&DiffPoly::x_pow(2)).unwrap(),
            DiffPoly::x_pow(3).scale(&rat(1, 3))
        );
    }

    #[test]
    fn antiderivative_rejects_non_exact() {
        assert!(matches!(
            antiderivative(&v(0)),
            Err(RingError::NotExact { .. })
        ));
        // V'' V: E ≠ 0 route (obstruction found at order 0 after stripping).
        let p = &v(0) * &v(2);
        assert!(antiderivative(&p).is_err());
        // 1/x integrates to a logarithm, which is outside the ring.
        assert!(antiderivative(&DiffPoly::x_pow(-1)).is_err());
        // ...even though its variational derivative vanishes (jet-free term).
        assert!(variational_derivative(&DiffPoly::x_pow(-1)).is_zero());
    }

    #[test]
    fn antiderivative_inverts_total_derivative() {
        // q chosen constant-free; antiderivative is constant-free by construction.
        let q = &(&(&v(0).pow(3) * &v(1)) + &(&DiffPoly::x_pow(2) * &v(2).pow(2)))
            + &DiffPoly::x_pow(-3);
        let p = total_derivative(&q);
        assert_eq!(antiderivative(&p).unwrap(), q);
    }

    #[test]
    fn antiderivative_handles_multistep_top_order() {
        // Summed bracket exactness: -15/2 (V V'' + V'²) + 3 V'' is exact even
        // though its pieces V V'' and V'² are not individually exact.
        let p = &(&(&v(0) * &v(2)) + &v(1).pow(2)).scale(&rat(-15, 2)) + &v(2).scale(&rat_int(3));
        let q = antiderivative(&p).unwrap();
        assert_eq!(total_derivative(&q), p);
        let expected = &(&v(0) * &v(1)).scale(&rat(-15, 2)) + &v(1).scale(&rat_int(3));
        assert_eq!(q, expected);
    }
}
