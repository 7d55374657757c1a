//! Subcommand implementations. Each `run` returns the process exit code
//! (verification outcomes print to standard output and exit 0/1) or a
//! [`CliError`] for usage problems and hard failures.

pub mod catalog;
pub mod check;
pub mod constraint;
pub mod golden;
pub mod hierarchy;
pub mod solve;
pub mod symmetry;
pub mod verify;

use lenard_core::catalog::{self as core_catalog, CatalogEntry, CatalogError};
use lenard_core::potential::Potential;

use crate::{CliError, FileConfig};

/// A potential named on the command line: a catalog entry or an inline
/// power-sum expression promoted to a claim-free entry.
pub enum ResolvedPotential {
    Builtin(&'static CatalogEntry),
    Inline(CatalogEntry),
}

impl ResolvedPotential {
    pub fn entry(&self) -> &CatalogEntry {
        match self {
            ResolvedPotential::Builtin(e) => e,
            ResolvedPotential::Inline(e) => e,
        }
    }

    pub fn potential(&self) -> &dyn Potential {
        self.entry().potential.as_ref()
    }
}

/// Resolve `--potential`: catalog name first, then inline expression.
pub fn resolve_potential(name: &str) -> Result<ResolvedPotential, CliError> {
    match core_catalog::get(name) {
        Ok(entry) => Ok(ResolvedPotential::Builtin(entry)),
        Err(CatalogError::UnknownName(_)) => {
            match core_catalog::user_defined("user-defined", name) {
                Ok(entry) => Ok(ResolvedPotential::Inline(entry)),
                Err(_) => Err(CliError::Usage(format!(
                    "unknown potential {name:?}: not a catalog name and not a \
                     power-sum expression (catalog: {})",
                    core_catalog::list().join(", ")
                ))),
            }
        }
        Err(e) => Err(CliError::Failed(e.to_string())),
    }
}

/// The `--potential` flag resolved against the config file, then against
/// the catalog; `None` when absent everywhere.
pub fn resolve_potential_flag(
    flag: &Option<String>,
    cfg: &FileConfig,
) -> Result<Option<ResolvedPotential>, CliError> {
    match flag.as_deref().or_else(|| cfg.get("potential")) {
        Some(name) => resolve_potential(name).map(Some),
        None => Ok(None),
    }
}
