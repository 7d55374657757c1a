//! Verified library of potentials with hierarchy-membership claims.
//!
//! Each [`CatalogEntry`] bundles a concrete potential with zero or more
//! [`MembershipClaim`]s — statements that the potential satisfies a
//! stationary constraint `F_N + Σ_{j<N} C_j F_j + κ(xV′/2 + V) = 0` with
//! the recorded level, κ, and constants. Claims are *data*, shipped as a
//! JSON manifest embedded in the crate (so fixtures can be added or a
//! user manifest loaded without touching code), and every claim is
//! re-verified numerically: [`verify_claim`] evaluates the constraint
//! residual on 64 interior points of the potential's domain and demands
//! `max |G| <` [`MEMBERSHIP_TOL`]. The test suite runs [`verify_all`] so
//! a stale manifest cannot ship.
//!
//! Entries deliberately include sign mirrors carrying *no* claims; they
//! are negative fixtures whose residuals are pinned by tests (for
//! example, the mirrored inverse-square profile leaves exactly `12/x⁵`).

use std::str::FromStr;
use std::sync::LazyLock;

use serde::Deserialize;
use thiserror::Error;

use crate::hierarchy::ConstraintSpec;
use crate::numeric::{eval_diffpoly, NumericError};
use crate::potential::{Potential, PowerSum, Sech2};
use crate::Rat;

/// Residual gate for membership claims on the 64 probe points.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Errors from catalog lookup, manifest parsing, or claim verification.
#[derive(Debug, Error)]
pub enum CatalogError {
    /// No entry with the requested name.
    #[error("no catalog entry named {0:?}")]
    UnknownName(String),
    /// The manifest (or a user expression) failed to parse or validate.
    #[error("bad manifest: {0}")]
    BadManifest(String),
    /// A recorded claim does not hold numerically.
    #[error(
        "{entry}: {family} claim at level {level} leaves residual {max:.3e} (tol {tol:.1e})"
    )]
    ClaimFailed {
        /// Entry name.
        entry: String,
        /// Family tag of the failing claim.
        family: String,
        /// Claim level `N`.
        level: u32,
        /// Measured `max |G|` over the probe points.
        max: f64,
        /// The gate it had to meet.
        tol: f64,
    },
    /// Residual evaluation itself failed (domain violation and the like).
    #[error("numeric evaluation failed: {0}")]
    Numeric(#[from] NumericError),
}

/// One membership statement: the potential satisfies the constraint of
/// this level with these constants.
#[derive(Debug, Clone)]
pub struct MembershipClaim {
    /// Family tag: `"commuting"` for κ = 0, `"scaling"` otherwise.
    pub family: String,
    /// Constraint level `N`.
    pub level: u32,
    /// Scaling parameter κ (family form: coefficient of `xV′/2 + V`).
    pub kappa: Rat,
    /// Constants `C_0 … C_{N−1}`.
    pub constants: Vec<Rat>,
    /// How the claim was established (free-text tag).
    pub provenance: String,
}

impl MembershipClaim {
    /// The constraint this claim asserts the potential satisfies.
    pub fn constraint(&self) -> Result<ConstraintSpec, CatalogError> {
        ConstraintSpec::new(self.level, self.kappa.clone(), self.constants.clone())
            .map_err(|e| CatalogError::BadManifest(e.to_string()))
    }
}

/// A named potential with its verified membership claims.
pub struct CatalogEntry {
    /// Catalog key.
    pub name: String,
    /// The potential itself.
    pub potential: Box<dyn Potential>,
    /// Verified membership claims (may be empty for negative fixtures).
    pub membership: Vec<MembershipClaim>,
    /// Free-text context, including sign-convention cross-references.
    pub notes: String,
}

#[derive(Deserialize)]
struct RawManifest {
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    name: String,
    potential: RawPotential,
    #[serde(default)]
    membership: Vec<RawClaim>,
    #[serde(default)]
    notes: String,
}

#[derive(Deserialize)]
#[serde(tag = "kind")]
enum RawPotential {
    #[serde(rename = "power-sum")]
    PowerSum { expr: String },
    #[serde(rename = "sech2")]
    Sech2 { amplitude: String },
}

#[derive(Deserialize)]
struct RawClaim {
    family: String,
    level: u32,
    kappa: String,
    #[serde(default)]
    constants: Vec<String>,
    #[serde(default)]
    provenance: String,
}

fn parse_rat(s: &str) -> Result<Rat, CatalogError> {
    Rat::from_str(s).map_err(|e| CatalogError::BadManifest(format!("bad rational {s:?}: {e}")))
}

/// Parse a manifest. Claims are validated structurally (constant counts,
/// rational syntax) but not numerically — run [`verify_entry`] for that.
pub fn load_manifest(json: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let raw: RawManifest =
        serde_json::from_str(json).map_err(|e| CatalogError::BadManifest(e.to_string()))?;
    let mut entries = Vec::with_capacity(raw.entries.len());
    for r in raw.entries {
        let potential: Box<dyn Potential> = match r.potential {
            RawPotential::PowerSum { expr } => Box::new(
                expr.parse::<PowerSum>()
                    .map_err(|e| CatalogError::BadManifest(format!("{}: {e}", r.name)))?,
            ),
            RawPotential::Sech2 { amplitude } => Box::new(Sech2::new(parse_rat(&amplitude)?)),
        };
        let mut membership = Vec::with_capacity(r.membership.len());
        for c in r.membership {
            let claim = MembershipClaim {
                family: c.family,
                level: c.level,
                kappa: parse_rat(&c.kappa)?,
                constants: c
                    .constants
                    .iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<_, _>>()?,
                provenance: c.provenance,
            };
            claim.constraint()?;
            membership.push(claim);
        }
        entries.push(CatalogEntry {
            name: r.name,
            potential,
            membership,
            notes: r.notes,
        });
    }
    Ok(entries)
}

static BUILTIN: LazyLock<Vec<CatalogEntry>> = LazyLock::new(|| {
    load_manifest(include_str!("catalog.json")).expect("built-in manifest is valid")
});

/// Look up a built-in entry by name.
pub fn get(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    BUILTIN
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::UnknownName(name.to_string()))
}

/// Names of all built-in entries, in manifest order.
pub fn list() -> Vec<&'static str> {
    BUILTIN.iter().map(|e| e.name.as_str()).collect()
}

/// Wrap a user-supplied rational expression in `x` (power-sum syntax,
/// e.g. `"x^2 - 2*(x-3)^-2 + 5"`) as a claim-free catalog entry.
pub fn user_defined(name: &str, expr: &str) -> Result<CatalogEntry, CatalogError> {
    let pot: PowerSum = expr
        .parse()
        .map_err(|e| CatalogError::BadManifest(format!("{name}: {e}")))?;
    Ok(CatalogEntry {
        name: name.to_string(),
        potential: Box::new(pot),
        membership: Vec::new(),
        notes: String::from("user-defined"),
    })
}

/// 64 interior probe points: the potential's domain clipped to a desk
/// window (±5 on unbounded sides, half a unit in from finite endpoints).
pub fn probe_points(pot: &dyn Potential) -> Vec<f64> {
    let d = pot.domain();
    let lo = if d.lo.is_finite() { d.lo + 0.5 } else { -5.0 };
    let mut hi = if d.hi.is_finite() { d.hi - 0.5 } else { 5.0 };
    if hi <= lo {
        hi = lo + 0.9 * (d.hi - lo);
    }
    let n = 64;
    (1..=n)
        .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
        .collect()
}

/// Evaluate one claim's constraint residual on the probe points and
/// return `max |G|` (no gate applied).
pub fn claim_residual(
    entry: &CatalogEntry,
    claim: &MembershipClaim,
) -> Result<f64, CatalogError> {
    let g = claim.constraint()?.residual();
    let xs = probe_points(entry.potential.as_ref());
    let vals = eval_diffpoly(&g, entry.potential.as_ref(), &xs)?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Verify one claim against [`MEMBERSHIP_TOL`].
pub fn verify_claim(entry: &CatalogEntry, claim: &MembershipClaim) -> Result<(), CatalogError> {
    let max = claim_residual(entry, claim)?;
    if max < MEMBERSHIP_TOL {
        Ok(())
    } else {
        Err(CatalogError::ClaimFailed {
            entry: entry.name.clone(),
            family: claim.family.clone(),
            level: claim.level,
            max,
            tol: MEMBERSHIP_TOL,
        })
    }
}

/// Verify every claim of one entry.
pub fn verify_entry(entry: &CatalogEntry) -> Result<(), CatalogError> {
    for claim in &entry.membership {
        verify_claim(entry, claim)?;
    }
    Ok(())
}

/// Verify every claim of every built-in entry.
pub fn verify_all() -> Result<(), CatalogError> {
    for entry in BUILTIN.iter() {
        verify_entry(entry)?;
    }
    Ok(())
}
