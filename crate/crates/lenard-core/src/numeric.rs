//! Floating-point laboratory: residual evaluation on concrete potentials,
//! ODE generation of constraint solutions, numeric commutator checks, and
//! least-squares fitting of hierarchy constants.
//!
//! Everything here consumes the exact symbolic objects (differential
//! polynomials, operators, constraint specifications) and a [`Potential`],
//! and produces floats. Design rules:
//!
//! - **Determinism.** Per-point sums run over terms in canonical order and
//!   accumulate pairwise ([`pairwise_sum`]), so results are reproducible
//!   and independent of any parallel evaluation order across points.
//! - **Honesty.** [`integrate_constraint`] rechecks its own output by
//!   finite-differencing the *top* derivative out of the integrated state
//!   and re-substituting into the constraint — the check does not reuse
//!   the right-hand side that produced the data. Likewise
//!   [`numeric_commutator_check`] applies `Q∘H`, `H∘Q` through jet
//!   arithmetic on test functions; it never forms the symbolic commutator
//!   (the symbolic route is what it is checking).
//! - **Exact derivatives where possible.** Test functions (polynomials,
//!   Gaussians) differentiate exactly; finite differences enter only
//!   through sampled-grid potentials.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::hierarchy::{lenard_f, scaling_term, ConstraintSpec};
use crate::ode::{self, OdeError, OdeOptions};
use crate::operator::binomial;
use crate::potential::{Potential, SampledGrid};
use crate::ring::nth_total_derivative;
use crate::symmetry::SymmetryOperator;
use crate::{DiffPoly, Rat};

/// Tolerance for the internal re-substitution check in
/// [`integrate_constraint`].
pub const RESIDUAL_RECHECK_TOL: f64 = 1e-7;

/// Conditioning ratio above which [`FitResult::ill_conditioned`] is set.
pub const CONDITIONING_THRESHOLD: f64 = 1e10;

/// Errors from the numeric laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    /// A sample point is outside a potential's domain or hits a pole.
    #[error("potential is singular or undefined at x = {x}")]
    SingularPoint { x: f64 },
    /// The constraint ODE left the admissible region in finite time.
    #[error("solution blew up near x = {x}")]
    Blowup { x: f64 },
    /// The integrated solution failed its independent re-substitution check.
    #[error("re-substituted constraint residual {max:.3e} exceeds {tol:.1e}")]
    ResidualCheck { max: f64, tol: f64 },
    /// Malformed input (sizes, ordering, missing columns).
    #[error("bad input: {0}")]
    BadInput(String),
    /// Integrator failure other than blowup.
    #[error("integration failed: {0}")]
    Integration(OdeError),
}

impl From<OdeError> for NumericError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::Blowup { x } => NumericError::Blowup { x },
            other => NumericError::Integration(other),
        }
    }
}

/// Sum with a fixed pairwise (binary-tree) reduction order.
///
/// The tree depends only on the slice length, so the result is a pure
/// function of the values in order — no accumulation-order sensitivity.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn rat_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational magnitude fits in f64")
}

/// Evaluate a differential polynomial at one point with pairwise term
/// summation. `jet` must cover every derivative order in `p`; conversion
/// from the exact rational coefficients happens per term, at the last step.
pub fn eval_poly_at(p: &DiffPoly, x: f64, jet: &[f64]) -> f64 {
    let terms: Vec<f64> = p
        .terms()
        .map(|(m, c)| {
            let mut t = rat_f64(c);
            if m.xdeg() != 0 {
                t *= x.powi(m.xdeg() as i32);
            }
            for (&k, &e) in m.jet() {
                t *= jet[k as usize].powi(e as i32);
            }
            t
        })
        .collect();
    pairwise_sum(&terms)
}

/// Evaluate `p` on a potential at the given sample points.
pub fn eval_diffpoly(
    p: &DiffPoly,
    pot: &dyn Potential,
    xs: &[f64],
) -> Result<Vec<f64>, NumericError> {
    let order = p.max_order().unwrap_or(0);
    xs.iter()
        .map(|&x| {
            let jet = pot
                .jet(x, order)
                .ok_or(NumericError::SingularPoint { x })?;
            Ok(eval_poly_at(p, x, &jet))
        })
        .collect()
}

/// Split the constraint `G = 0` as `lead·V^{(2N+1)} + rest = 0` and return
/// `(lead, rest)`. `G` is linear in its top derivative, so `lead` is the
/// partial derivative with respect to it and `rest` is `G` with the top
/// derivative set to zero.
fn solved_form(spec: &ConstraintSpec) -> (DiffPoly, DiffPoly, u32) {
    let g = spec.residual();
    let top = 2 * spec.level() + 1;
    let lead = g.partial_jet(top);
    let rest = g.substitute(top, &DiffPoly::zero());
    (lead, rest, top)
}

/// Refinement factor between the caller's sample grid and the internal
/// grid used for the re-substitution check (the finite-difference error of
/// the check shrinks by `REFINE⁴`).
const REFINE: usize = 5;

/// Integrate the constraint as a `(2N+1)`-order ODE for `V` from the jet
/// `init = (V, V′, …, V^{(2N)})` at `x0`, sampling the solution at `xs`
/// (uniformly spaced, ascending; `x0` inside their range).
///
/// The returned grid carries the integrated derivative columns up to
/// `V^{(2N)}` plus one finite-differenced column `V^{(2N+1)}`. The solution
/// is independently rechecked before it is returned: the top derivative is
/// finite-differenced out of the integrated `V^{(2N)}` values — never taken
/// from the right-hand side that produced them — and re-substituted into
/// the constraint, which must stay below [`RESIDUAL_RECHECK_TOL`] at every
/// returned sample. The recheck runs on a [`REFINE`]×-refined copy of the
/// grid so its own stencil error does not mask the comparison.
pub fn integrate_constraint(
    spec: &ConstraintSpec,
    x0: f64,
    init: &[f64],
    xs: &[f64],
) -> Result<SampledGrid, NumericError> {
    let dim = 2 * spec.level() as usize + 1;
    if init.len() != dim {
        return Err(NumericError::BadInput(format!(
            "need {dim} initial jet values, got {}",
            init.len()
        )));
    }
    if xs.len() < 5 {
        return Err(NumericError::BadInput("need at least 5 sample points".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NumericError::BadInput("sample points must ascend".into()));
    }
    let (lead, rest, _top) = solved_form(spec);
    let f = move |x: f64, y: &[f64], dy: &mut [f64]| {
        dy[..y.len() - 1].copy_from_slice(&y[1..]);
        let den = eval_poly_at(&lead, x, y);
        let num = eval_poly_at(&rest, x, y);
        dy[y.len() - 1] = -num / den;
    };
    let opts = OdeOptions::default();

    // Integrate once over the refined grid; the caller's points sit at
    // every REFINE-th node.
    let fine_n = REFINE * (xs.len() - 1) + 1;
    let h = (xs[xs.len() - 1] - xs[0]) / (fine_n as f64 - 1.0);
    let fine: Vec<f64> = (0..fine_n).map(|j| xs[0] + h * j as f64).collect();
    let rows = ode::sample_bidirectional(&f, x0, init, &fine, &opts)?;
    let fine_cols: Vec<Vec<f64>> = (0..dim)
        .map(|k| rows.iter().map(|r| r[k]).collect())
        .collect();
    let fine_grid = SampledGrid::new(
        "recheck grid",
        fine,
        fine_cols.clone(),
        2 * spec.level() + 1,
    )
    .map_err(NumericError::BadInput)?;
    let max = constraint_residual_on_grid(spec, &fine_grid)?;
    if max > RESIDUAL_RECHECK_TOL {
        return Err(NumericError::ResidualCheck {
            max,
            tol: RESIDUAL_RECHECK_TOL,
        });
    }

    let cols: Vec<Vec<f64>> = fine_cols
        .iter()
        .map(|c| c.iter().step_by(REFINE).copied().collect())
        .collect();
    SampledGrid::new(
        format!("integrated level-{} constraint", spec.level()),
        xs.to_vec(),
        cols,
        2 * spec.level() + 1,
    )
    .map_err(NumericError::BadInput)
}

/// Maximum absolute value of the constraint residual `G` re-substituted on
/// a sampled potential. The grid must carry derivative columns up to order
/// `2N+1`; the two points nearest each boundary are skipped (their
/// one-sided difference stencils carry a larger constant).
pub fn constraint_residual_on_grid(
    spec: &ConstraintSpec,
    grid: &SampledGrid,
) -> Result<f64, NumericError> {
    let g = spec.residual();
    let top = 2 * spec.level() + 1;
    if grid.column(top).is_none() {
        return Err(NumericError::BadInput(format!(
            "grid lacks derivative columns up to order {top}"
        )));
    }
    let xs = grid.points();
    let mut max = 0.0f64;
    for (i, &x) in xs.iter().enumerate().skip(2).take(xs.len().saturating_sub(4)) {
        let jet: Vec<f64> = (0..=top).map(|k| grid.column(k).unwrap()[i]).collect();
        max = max.max(eval_poly_at(&g, x, &jet).abs());
    }
    Ok(max)
}

/// A test function with exact derivatives of every order.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `c₀ + c₁x + …` with the given coefficients.
    Polynomial(Vec<f64>),
    /// `exp(−(x − center)²/2)`.
    Gaussian { center: f64 },
}

impl TestFunction {
    /// `(φ, φ′, …, φ^{(order)})` at `x`, differentiated exactly.
    pub fn jet(&self, x: f64, order: u32) -> Vec<f64> {
        let n = order as usize + 1;
        match self {
            TestFunction::Polynomial(coeffs) => {
                let mut out = Vec::with_capacity(n);
                let mut c = coeffs.clone();
                for _ in 0..n {
                    out.push(
                        c.iter()
                            .rev()
                            .fold(0.0, |acc, &ck| acc * x + ck),
                    );
                    // formal derivative of the coefficient list
                    c = c
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, &ck)| k as f64 * ck)
                        .collect();
                }
                out
            }
            TestFunction::Gaussian { center } => {
                let u = x - center;
                let g = (-u * u / 2.0).exp();
                let mut out = vec![g];
                for k in 0..order as usize {
                    // (e^{−u²/2})^{(k+1)} = −(u·g^{(k)} + k·g^{(k−1)})
                    let prev = if k == 0 { 0.0 } else { out[k - 1] };
                    out.push(-(u * out[k] + k as f64 * prev));
                }
                out
            }
        }
    }
}

/// The default test set: low polynomials and two Gaussians, all O(1) on
/// the windows used by the checks.
pub fn standard_test_functions() -> Vec<TestFunction> {
    vec![
        TestFunction::Polynomial(vec![1.0]),
        TestFunction::Polynomial(vec![0.0, 1.0]),
        TestFunction::Polynomial(vec![0.0, 0.0, 0.25]),
        TestFunction::Gaussian { center: 0.0 },
        TestFunction::Gaussian { center: 1.5 },
    ]
}

/// Result of [`numeric_commutator_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorCheck {
    /// `max |([Q,H] − κH)φ|` over test functions and sample points.
    pub max_residual: f64,
    /// `1 + max` magnitude of the intermediate applications, for callers
    /// that want a relative reading.
    pub scale: f64,
}

/// Apply `[Q, H] − κH` to test functions by jet arithmetic and report the
/// worst residual.
///
/// `Q(Hφ)` and `H(Qφ)` are evaluated independently through Leibniz
/// expansions: the coefficients of `Q` and their first two total
/// derivatives are evaluated on the potential, the test function supplies
/// exact derivative jets, and the two applications are subtracted *as
/// numbers*. No symbolic commutator is formed.
pub fn numeric_commutator_check(
    sym: &SymmetryOperator,
    pot: &dyn Potential,
    xs: &[f64],
    testfuncs: &[TestFunction],
) -> Result<CommutatorCheck, NumericError> {
    let q = sym.q();
    let n = q.order().unwrap_or(0);
    let kappa = rat_f64(sym.kappa());

    // Coefficients q_j and their first two total derivatives, as
    // differential polynomials ready for evaluation.
    let qd: Vec<Vec<(u32, DiffPoly)>> = (0..=2u32)
        .map(|i| {
            q.coeffs()
                .map(|(j, c)| (j, nth_total_derivative(c, i)))
                .collect()
        })
        .collect();
    let v_order = qd
        .iter()
        .flatten()
        .filter_map(|(_, p)| p.max_order())
        .max()
        .unwrap_or(0)
        .max(n);

    let mut max_residual = 0.0f64;
    let mut magnitude = 0.0f64;
    for &x in xs {
        let vjet = pot
            .jet(x, v_order)
            .ok_or(NumericError::SingularPoint { x })?;
        // Evaluate D^i(q_j) once per point.
        let qval: Vec<Vec<(u32, f64)>> = qd
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(j, p)| (*j, eval_poly_at(p, x, &vjet)))
                    .collect()
            })
            .collect();
        for tf in testfuncs {
            let phi = tf.jet(x, n + 2);
            // (Hφ)^{(m)} = −φ^{(m+2)} + Σ_i C(m,i) V^{(i)} φ^{(m−i)}
            let h_phi: Vec<f64> = (0..=n as usize)
                .map(|m| {
                    let parts: Vec<f64> = (0..=m)
                        .map(|i| {
                            rat_f64(&binomial(m as u32, i as u32)) * vjet[i] * phi[m - i]
                        })
                        .collect();
                    -phi[m + 2] + pairwise_sum(&parts)
                })
                .collect();
            let q_h_phi = pairwise_sum(
                &qval[0]
                    .iter()
                    .map(|&(j, v)| v * h_phi[j as usize])
                    .collect::<Vec<_>>(),
            );
            // (Qφ)^{(m)} = Σ_j Σ_{i≤m} C(m,i) D^i(q_j) φ^{(j+m−i)}, m ≤ 2
            let mut q_phi = [0.0f64; 3];
            for (m, slot) in q_phi.iter_mut().enumerate() {
                let mut parts = Vec::new();
                for (i, row) in qval[..=m].iter().enumerate() {
                    let w = rat_f64(&binomial(m as u32, i as u32));
                    for &(j, v) in row {
                        parts.push(w * v * phi[j as usize + m - i]);
                    }
                }
                *slot = pairwise_sum(&parts);
            }
            let h_q_phi = -q_phi[2] + vjet[0] * q_phi[0];
            let r = q_h_phi - h_q_phi - kappa * h_phi[0];
            max_residual = max_residual.max(r.abs());
            magnitude = magnitude
                .max(q_h_phi.abs())
                .max(h_q_phi.abs())
                .max((kappa * h_phi[0]).abs());
        }
    }
    Ok(CommutatorCheck {
        max_residual,
        scale: 1.0 + magnitude,
    })
}

/// Result of [`fit_constants`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted `C_0 … C_{N−1}`.
    pub constants: Vec<f64>,
    /// Fitted `κ` when it was requested as an unknown.
    pub kappa: Option<f64>,
    /// Root-mean-square of the constraint residual, recomputed from the
    /// returned constants (never from solver internals).
    pub residual_rms: f64,
    /// Ratio of extreme singular values of the design matrix.
    pub conditioning: f64,
    /// Whether [`conditioning`](FitResult::conditioning) exceeds
    /// [`CONDITIONING_THRESHOLD`].
    pub ill_conditioned: bool,
}

/// Least-squares fit of the hierarchy constants at a given level.
///
/// The constraint is affine in `(C_0, …, C_{N−1})` — and in `κ`, whose
/// column is `xV′/2 + V` — so the fit is linear. Pass `kappa = Some(k)` to
/// fix it, `None` to estimate it. Solved by singular-value decomposition
/// of the design matrix (no normal equations); near-null directions are
/// truncated at relative 1e−12, which sends degenerate unknowns to 0.
pub fn fit_constants(
    level: u32,
    kappa: Option<f64>,
    pot: &dyn Potential,
    xs: &[f64],
) -> Result<FitResult, NumericError> {
    let n = level as usize;
    let unknowns = n + usize::from(kappa.is_none());
    if xs.len() < unknowns + 1 {
        return Err(NumericError::BadInput(format!(
            "need at least {} sample points for {} unknowns",
            unknowns + 1,
            unknowns
        )));
    }
    let flows: Vec<Vec<f64>> = (0..=level)
        .map(|j| eval_diffpoly(&lenard_f(j), pot, xs))
        .collect::<Result<_, _>>()?;
    let scaling = eval_diffpoly(&scaling_term(), pot, xs)?;

    let rows = xs.len();
    let a = nalgebra::DMatrix::from_fn(rows, unknowns, |r, c| {
        if c < n {
            flows[c][r]
        } else {
            scaling[r]
        }
    });
    let b = nalgebra::DVector::from_fn(rows, |r, _| {
        -(flows[n][r] + kappa.unwrap_or(0.0) * scaling[r])
    });
    let svd = a.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let conditioning = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    let sol = svd
        .solve(&b, sigma_max * 1e-12)
        .map_err(|e| NumericError::BadInput(e.to_string()))?;

    let constants: Vec<f64> = sol.iter().take(n).copied().collect();
    let fitted_kappa = kappa.is_none().then(|| sol[n]);
    let k = kappa.or(fitted_kappa).unwrap_or(0.0);

    // Recompute the residual from the returned constants.
    let sq: Vec<f64> = (0..rows)
        .map(|r| {
            let parts: Vec<f64> = (0..n).map(|j| constants[j] * flows[j][r]).collect();
            let g = flows[n][r] + pairwise_sum(&parts) + k * scaling[r];
            g * g
        })
        .collect();
    let residual_rms = (pairwise_sum(&sq) / rows as f64).sqrt();

    Ok(FitResult {
        constants,
        kappa: fitted_kappa,
        residual_rms,
        conditioning,
        ill_conditioned: conditioning > CONDITIONING_THRESHOLD,
    })
}
