//! The Lenard recursion generating the stationary KdV hierarchy.
//!
//! Two recursion operators are implemented and cross-checked:
//!
//! - `𝒫 = −¼D² + V − ½D⁻¹V′·` acts on conserved densities:
//!   `U_{−1} = −1`, `U_j = 𝒫 U_{j−1}`.
//! - `𝓡 = −¼D² + V + ½V′D⁻¹` acts on flows: `F_0 = −V′/2`, `F_j = 𝓡 F_{j−1}`.
//!
//! They are conjugate (`𝓡 = D∘𝒫∘D⁻¹` on nonconstant densities), which makes
//! `F_j = D(U_j)` an exact identity verified term by term — the strongest
//! internal consistency check of the recursion.
//!
//! Sign convention: with the Schrödinger operator fixed as `H = −d² + V`,
//! the commutator algebra forces the `+V` sign in both recursion operators
//! and the seed `U_{−1} = −1` (so that `U_0 = −V/2`, `F_0 = −V′/2`). Some
//! references print the recursion with the opposite sign of `V`; that variant
//! generates the hierarchy of `−V`, whose members do not commute with
//! `−d² + V`. Every operator here is validated against the independent
//! commutator expansion, never by transcription.
//!
//! The stationary hierarchy member at level `N` with family constant vector
//! `C` and scaling parameter `κ` is the constraint
//! `G = F_N + Σ_{j<N} C_j F_j + κ(xV′/2 + V) = 0`.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::operator::{ConstraintRewriter, RewriteError};
use crate::ring::{
    antiderivative, nth_total_derivative, poly_from_json, poly_to_json, rat, total_derivative,
    DiffPoly, Monomial, Rat,
};

/// Errors from hierarchy-level validation.
#[derive(Debug, Error)]
pub enum HierarchyError {
    /// A [`ConstraintSpec`] was built with the wrong number of constants.
    #[error("level {level} needs exactly {level} family constants C_0..C_{}, got {got}", .level.saturating_sub(1))]
    WrongConstantCount {
        /// Constraint level `N`.
        level: u32,
        /// Number of constants supplied.
        got: usize,
    },
    /// A persisted cache failed validation and was rejected.
    #[error("persisted hierarchy cache is invalid: {0}")]
    BadCache(String),
    /// Input/output failure while reading or writing a persisted cache.
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
}

/// Apply the density-side Lenard operator `𝒫 = −¼D² + V − ½D⁻¹V′·`.
///
/// Panics if the antiderivative obstruction fires, which would mean the
/// recursion left the ring — an internal-consistency failure, not an input
/// error.
pub fn lenard_p(u: &DiffPoly) -> DiffPoly {
    let d2 = nth_total_derivative(u, 2).scale(&rat(-1, 4));
    let vu = &DiffPoly::v(0) * u;
    let integrand = &DiffPoly::v(1) * u;
    let integral = antiderivative(&integrand)
        .expect("Lenard density recursion stays exact at every step");
    &(&d2 + &vu) - &integral.scale(&rat(1, 2))
}

/// Apply the flow-side Lenard operator `𝓡 = −¼D² + V + ½V′D⁻¹`.
///
/// Panics under the same internal-consistency contract as [`lenard_p`].
pub fn lenard_r(f: &DiffPoly) -> DiffPoly {
    let d2 = nth_total_derivative(f, 2).scale(&rat(-1, 4));
    let vf = &DiffPoly::v(0) * f;
    let integral =
        antiderivative(f).expect("Lenard flow recursion stays exact at every step");
    &(&d2 + &vf) + &(&DiffPoly::v(1) * &integral).scale(&rat(1, 2))
}

/// Scaling term `S = xV′/2 + V` entering the κ-deformed constraint.
pub fn scaling_term() -> DiffPoly {
    &(&DiffPoly::x() * &DiffPoly::v(1)).scale(&rat(1, 2)) + &DiffPoly::v(0)
}

#[derive(Default)]
struct HierarchyCache {
    /// `us[i]` is `U_{i−1}`; seeded with `U_{−1} = −1`.
    us: Vec<DiffPoly>,
    /// `fs[j]` is `F_j` computed by the independent 𝓡 route.
    fs: Vec<DiffPoly>,
}

impl HierarchyCache {
    fn ensure(&mut self, level: u32) {
        if self.us.is_empty() {
            self.us.push(DiffPoly::from_int(-1));
        }
        if self.fs.is_empty() {
            self.fs.push(DiffPoly::v(1).scale(&rat(-1, 2)));
        }
        while self.us.len() < (level + 2) as usize {
            let next = lenard_p(self.us.last().expect("seeded"));
            self.us.push(next);
        }
        while self.fs.len() < (level + 1) as usize {
            let next = lenard_r(self.fs.last().expect("seeded"));
            self.fs.push(next);
        }
    }
}

fn cache() -> &'static Mutex<HierarchyCache> {
    static CACHE: OnceLock<Mutex<HierarchyCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HierarchyCache::default()))
}

/// Conserved density `U_j` for `j ≥ −1` (`U_{−1} = −1`, `U_0 = −V/2`, …).
pub fn lenard_u(j: i64) -> DiffPoly {
    assert!(j >= -1, "densities are defined for j ≥ −1");
    let mut guard = cache().lock().expect("hierarchy cache poisoned");
    guard.ensure(j.max(0) as u32);
    guard.us[(j + 1) as usize].clone()
}

/// Hierarchy flow `F_j` for `j ≥ 0`, computed by the 𝓡 recursion
/// (`F_0 = −V′/2`, `F_1 = V‴/8 − ¾VV′`, …). Satisfies `F_j = D(U_j)`.
pub fn lenard_f(j: u32) -> DiffPoly {
    let mut guard = cache().lock().expect("hierarchy cache poisoned");
    guard.ensure(j);
    guard.fs[j as usize].clone()
}

/// Verify the conjugation identity at index `j`: `F_j = D(U_j)`, and for
/// `j ≥ 1` additionally `𝓡(D(U_{j−1})) = D(𝒫(U_{j−1}))` with both sides
/// expanded independently. (At `j = 0` the second identity degenerates:
/// `D` annihilates the constant seed, so only `F_0 = D(U_0)` is meaningful.)
pub fn conjugation_check(j: u32) -> bool {
    let route_f = lenard_f(j);
    let route_u = total_derivative(&lenard_u(j.into()));
    if route_f != route_u {
        return false;
    }
    if j == 0 {
        return true;
    }
    let prev = lenard_u(i64::from(j) - 1);
    let lhs = lenard_r(&total_derivative(&prev));
    let rhs = total_derivative(&lenard_p(&prev));
    lhs == rhs
}

/// A stationary-hierarchy membership claim: level `N`, scaling parameter
/// `κ`, family constants `C_0..C_{N−1}`, and the symmetry-side free
/// constants `B_0..B_N` (used by the first-order-symmetry construction;
/// they default to zero and do not enter the constraint).
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSpec {
    level: u32,
    kappa: Rat,
    c: Vec<Rat>,
    b: Vec<Rat>,
}

impl ConstraintSpec {
    /// Build a spec, validating that exactly `N` family constants are given.
    pub fn new(level: u32, kappa: Rat, c: Vec<Rat>) -> Result<Self, HierarchyError> {
        if c.len() != level as usize {
            return Err(HierarchyError::WrongConstantCount {
                level,
                got: c.len(),
            });
        }
        Ok(Self {
            level,
            kappa,
            c,
            b: vec![Rat::zero(); (level + 1) as usize],
        })
    }

    /// The commuting (κ = 0) spec at a given level.
    pub fn commuting(level: u32, c: Vec<Rat>) -> Result<Self, HierarchyError> {
        Self::new(level, Rat::zero(), c)
    }

    /// Replace the symmetry-side constants `B_0..B_N`.
    pub fn with_b(mut self, b: Vec<Rat>) -> Result<Self, HierarchyError> {
        if b.len() != (self.level + 1) as usize {
            return Err(HierarchyError::WrongConstantCount {
                level: self.level + 1,
                got: b.len(),
            });
        }
        self.b = b;
        Ok(self)
    }

    /// Constraint level `N`.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Scaling parameter `κ` (family form: coefficient of `xV′/2 + V`).
    pub fn kappa(&self) -> &Rat {
        &self.kappa
    }

    /// Family constants `C_0..C_{N−1}`.
    pub fn c(&self) -> &[Rat] {
        &self.c
    }

    /// Symmetry-side constants `B_0..B_N`.
    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    /// The constraint residual
    /// `G = F_N + Σ_{j<N} C_j F_j + κ(xV′/2 + V)` as a ring element.
    pub fn residual(&self) -> DiffPoly {
        let mut g = lenard_f(self.level);
        for (j, cj) in self.c.iter().enumerate() {
            g = &g + &lenard_f(j as u32).scale(cj);
        }
        if !self.kappa.is_zero() {
            g = &g + &scaling_term().scale(&self.kappa);
        }
        g
    }

    /// Rewriter reducing modulo this constraint and its prolongations.
    ///
    /// Fails only for `N = 0, κ ≠ 0`, whose leading coefficient `(κx − 1)/2`
    /// is non-constant; that case is handled by the dilation-specific
    /// verification in the symmetry module.
    pub fn rewriter(&self) -> Result<ConstraintRewriter, RewriteError> {
        ConstraintRewriter::from_constraint(self.level, &self.residual())
    }
}

/// Monomial support of the level-`N` constraint with all-generic constants
/// (generic `C_j` and generic `κ`): the union of the supports of
/// `F_0..F_N` and of the scaling term.
fn generic_support(level: u32) -> BTreeSet<Monomial> {
    let mut s: BTreeSet<Monomial> = scaling_term().support();
    for j in 0..=level {
        s.extend(lenard_f(j).support());
    }
    s
}

/// Structural term inclusion: with generic symbolic constants, every
/// monomial of the level-`n2` constraint appears in the level-`n1`
/// constraint.
///
/// Panics if `n1_level ≤ n2_level` or `n2_level < 1` (precondition).
pub fn term_inclusion(n1_level: u32, n2_level: u32) -> bool {
    assert!(
        n1_level > n2_level && n2_level >= 1,
        "term inclusion requires n1_level > n2_level ≥ 1"
    );
    generic_support(n2_level).is_subset(&generic_support(n1_level))
}

/// Serialize the cached hierarchy up to `level` for persistence.
fn cache_to_json(level: u32) -> Value {
    let mut guard = cache().lock().expect("hierarchy cache poisoned");
    guard.ensure(level);
    let us: Vec<Value> = guard.us[..(level + 2) as usize]
        .iter()
        .map(poly_to_json)
        .collect();
    let fs: Vec<Value> = guard.fs[..(level + 1) as usize]
        .iter()
        .map(poly_to_json)
        .collect();
    json!({ "u_start": -1, "u": us, "f": fs })
}

/// Persist the hierarchy (densities and flows up to `level`) into
/// `dir/hierarchy.json`.
pub fn save_cache(dir: &Path, level: u32) -> Result<(), HierarchyError> {
    std::fs::create_dir_all(dir)?;
    let value = cache_to_json(level);
    std::fs::write(
        dir.join("hierarchy.json"),
        serde_json::to_string_pretty(&value).expect("json serializes"),
    )?;
    Ok(())
}

/// Load a persisted hierarchy from `dir/hierarchy.json` into the in-memory
/// cache, after validating every invariant that makes the data trustworthy:
/// seed, base density, `F_j = D(U_j)`, weight homogeneity, and the leading
/// coefficient law. Invalid or missing files are reported, never trusted.
pub fn load_cache(dir: &Path) -> Result<u32, HierarchyError> {
    let raw = std::fs::read_to_string(dir.join("hierarchy.json"))?;
    let value: Value = serde_json::from_str(&raw)
        .map_err(|e| HierarchyError::BadCache(format!("not json: {e}")))?;
    let parse = |key: &str| -> Result<Vec<DiffPoly>, HierarchyError> {
        value
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| HierarchyError::BadCache(format!("missing {key:?} array")))?
            .iter()
            .map(|v| {
                poly_from_json(v).map_err(|e| HierarchyError::BadCache(format!("bad {key}: {e}")))
            })
            .collect()
    };
    let us = parse("u")?;
    let fs = parse("f")?;
    if us.len() != fs.len() + 1 || fs.is_empty() {
        return Err(HierarchyError::BadCache(format!(
            "length mismatch: {} densities vs {} flows",
            us.len(),
            fs.len()
        )));
    }
    if us[0] != DiffPoly::from_int(-1) {
        return Err(HierarchyError::BadCache("wrong seed density".into()));
    }
    if us[1] != DiffPoly::v(0).scale(&rat(-1, 2)) {
        return Err(HierarchyError::BadCache("wrong base density".into()));
    }
    for (j, f) in fs.iter().enumerate() {
        if *f != total_derivative(&us[j + 1]) {
            return Err(HierarchyError::BadCache(format!(
                "F_{j} is not the derivative of U_{j}"
            )));
        }
        let expected_weight = 2 * j as u64 + 3;
        if f.homogeneous_weight() != Some(expected_weight) {
            return Err(HierarchyError::BadCache(format!(
                "F_{j} is not weight-homogeneous of weight {expected_weight}"
            )));
        }
        let lead = f.coefficient(&Monomial::jet_var(2 * j as u32 + 1, 1));
        if lead != leading_coefficient(j as u32) {
            return Err(HierarchyError::BadCache(format!(
                "F_{j} has wrong leading coefficient"
            )));
        }
    }
    let level = (fs.len() - 1) as u32;
    let mut guard = cache().lock().expect("hierarchy cache poisoned");
    if guard.us.len() < us.len() {
        guard.us = us;
    }
    if guard.fs.len() < fs.len() {
        guard.fs = fs;
    }
    Ok(level)
}

/// The exact coefficient of `V^{(2j+1)}` in `F_j`: `(−1/2)(−1/4)^j`.
pub fn leading_coefficient(j: u32) -> Rat {
    rat(-1, 2) * rat(-1, 4).pow(j as i32)
}

/// Express `p` as an exact rational combination `Σ_j γ_j F_j` of the flows,
/// if possible. Returns the coefficients indexed by `j` (trailing zeros
/// trimmed), or `None` when `p` lies outside that span.
///
/// The decomposition peels the top jet order: the flows have strictly
/// increasing top orders `2j + 1`, each appearing linearly with the constant
/// coefficient given by [`leading_coefficient`], so the expansion is unique
/// and terminates in at most `(order + 1) / 2` subtractions.
pub fn flow_span_coefficients(p: &DiffPoly) -> Option<Vec<Rat>> {
    let mut rem = p.clone();
    let mut gammas: Vec<Rat> = Vec::new();
    while !rem.is_zero() {
        let top = rem.max_order()?;
        if top % 2 == 0 {
            return None;
        }
        let j = (top - 1) / 2;
        let gamma = rem.coefficient(&Monomial::jet_var(top, 1)) / leading_coefficient(j);
        if gamma.is_zero() {
            return None;
        }
        rem = &rem - &lenard_f(j).scale(&gamma);
        if rem.max_order().is_some_and(|m| m >= top) {
            return None;
        }
        if gammas.len() <= j as usize {
            gammas.resize(j as usize + 1, Rat::zero());
        }
        gammas[j as usize] = gamma;
    }
    Some(gammas)
}
