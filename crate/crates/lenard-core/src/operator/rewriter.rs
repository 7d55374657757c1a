//! Reduction of ring elements modulo a stationary constraint.
//!
//! A constraint `G(V) = 0` of top derivative order `2N+1` with constant
//! leading coefficient is solved for `V^{(2N+1)}`; total differentiation
//! supplies rewrite rules for all higher orders (the prolongations). Reducing
//! an expression with these rules until only orders `≤ 2N` remain yields a
//! canonical normal form, so an expression vanishes for every potential in
//! the constrained family exactly when its normal form is zero.

use std::sync::Mutex;

use thiserror::Error;

use crate::ring::{total_derivative, DiffPoly};

/// Failures when building a rewriter from a constraint polynomial.
#[derive(Debug, Error)]
pub enum RewriteError {
    /// The constraint's top derivative has a non-constant coefficient, so no
    /// polynomial solve exists (this happens for the first-order dilation
    /// constraint, whose leading coefficient is `(κx − 1)/2`).
    #[error("constraint cannot be solved polynomially for V^({top}): leading coefficient {leading} is not a nonzero constant")]
    NonConstantLeading {
        /// Top derivative order of the constraint.
        top: u32,
        /// Its (non-constant or zero) coefficient.
        leading: DiffPoly,
    },
    /// The constraint's top order does not match the requested level
    /// (expected `2N+1`).
    #[error("constraint has top order {found:?}, expected {expected}")]
    WrongTopOrder {
        /// Expected `2N+1`.
        expected: u32,
        /// Actual top order, if any jet variable is present.
        found: Option<u32>,
    },
    /// The top derivative appears nonlinearly.
    #[error("constraint is nonlinear in its top derivative V^({top})")]
    NonlinearTop {
        /// Top derivative order of the constraint.
        top: u32,
    },
}

/// Rewrite system for one constraint: the solved top derivative and its
/// memoized prolongations.
#[derive(Debug)]
pub struct ConstraintRewriter {
    level: u32,
    solved_var: u32,
    /// `rules[m]` expresses `V^{(2N+1+m)}` in orders `≤ 2N`.
    rules: Mutex<Vec<DiffPoly>>,
}

impl ConstraintRewriter {
    /// Solve `g = 0` for its top derivative `V^{(2N+1)}`.
    ///
    /// Requires the top order to be exactly `2N+1`, the top derivative to
    /// occur linearly, and its coefficient to be a nonzero constant.
    pub fn from_constraint(level: u32, g: &DiffPoly) -> Result<Self, RewriteError> {
        let solved_var = 2 * level + 1;
        match g.max_order() {
            Some(top) if top == solved_var => {}
            other => {
                return Err(RewriteError::WrongTopOrder {
                    expected: solved_var,
                    found: other,
                })
            }
        }
        if g.max_exponent_of(solved_var) > 1 {
            return Err(RewriteError::NonlinearTop { top: solved_var });
        }
        let leading = g.partial_jet(solved_var);
        let Some(c) = leading.as_constant().filter(|c| !num_traits::Zero::is_zero(c)) else {
            return Err(RewriteError::NonConstantLeading {
                top: solved_var,
                leading,
            });
        };
        // g = c·V^{(2N+1)} + rest  ⇒  V^{(2N+1)} = −rest/c.
        let rest = g.substitute(solved_var, &DiffPoly::zero());
        let rhs = rest.scale(&(-c.recip()));
        debug_assert!(rhs.max_order().is_none_or(|k| k < solved_var));
        Ok(Self {
            level,
            solved_var,
            rules: Mutex::new(vec![rhs]),
        })
    }

    /// Constraint level `N`.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// The solved derivative order `2N+1`.
    pub fn solved_var(&self) -> u32 {
        self.solved_var
    }

    /// Rewrite rule for `V^{(k)}`, `k ≥ 2N+1`: fully reduced right-hand side.
    ///
    /// Prolongations are generated on demand by total differentiation of the
    /// previous rule followed by one base-rule substitution, so every stored
    /// rule only involves orders `≤ 2N`.
    pub fn rule_for(&self, k: u32) -> DiffPoly {
        assert!(k >= self.solved_var, "no rule below the solved order");
        let m = (k - self.solved_var) as usize;
        let mut rules = self.rules.lock().expect("rewriter mutex poisoned");
        while rules.len() <= m {
            let base = rules[0].clone();
            let prev = rules.last().expect("rules start nonempty");
            let next = total_derivative(prev).substitute(self.solved_var, &base);
            debug_assert!(next.max_order().is_none_or(|o| o < self.solved_var));
            rules.push(next);
        }
        rules[m].clone()
    }

    /// Reduce a ring element to its canonical normal form: substitute rules
    /// for the highest derivative order until only orders `≤ 2N` remain.
    pub fn reduce(&self, p: &DiffPoly) -> DiffPoly {
        let mut out = p.clone();
        while let Some(k) = out.max_order().filter(|&k| k >= self.solved_var) {
            out = out.substitute(k, &self.rule_for(k));
        }
        out
    }
}
