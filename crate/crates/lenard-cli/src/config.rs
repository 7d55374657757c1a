//! Key-value config files and the persistent hierarchy cache.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lenard_core::hierarchy;

use crate::CliError;

/// Keys a config file may define. Each supplies a default for the optional
/// flag of the same long name wherever that flag exists; required flags
/// must always come from the command line.
const KNOWN_KEYS: [&str; 8] = [
    "format",
    "output",
    "tol",
    "samples",
    "potential",
    "kappa",
    "constants",
    "bconstants",
];

/// Parsed config file: `key = value` lines, `#` comments, no sections.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    /// Load a config file if a path was given; empty config otherwise.
    pub fn load_opt(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => Self::load(p),
        }
    }

    /// Load and validate a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }

    /// Parse config text. Unknown and duplicate keys are rejected.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`, got {raw:?}", idx + 1))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!(
                    "line {}: unknown key {key:?} (known keys: {})",
                    idx + 1,
                    KNOWN_KEYS.join(", ")
                ));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(format!("line {}: duplicate key {key:?}", idx + 1));
            }
        }
        Ok(FileConfig(map))
    }

    /// The configured value for `key`, if any.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

/// Environment variable naming the hierarchy cache directory.
pub const CACHE_ENV: &str = "LENARD_CACHE_DIR";

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

/// Load a persisted hierarchy from `$LENARD_CACHE_DIR`, if one exists.
/// Returns the cached level (0 when nothing was loaded). Invalid caches
/// are reported on standard error and ignored, never trusted.
pub fn prime_hierarchy_cache() -> u32 {
    let Some(dir) = cache_dir() else { return 0 };
    if !dir.join("hierarchy.json").exists() {
        return 0;
    }
    match hierarchy::load_cache(&dir) {
        Ok(level) => level,
        Err(e) => {
            eprintln!("warning: ignoring hierarchy cache in {}: {e}", dir.display());
            0
        }
    }
}

/// Persist the hierarchy up to `level` into `$LENARD_CACHE_DIR`, if set.
/// Callers pass the maximum of the level they computed and the level
/// returned by [`prime_hierarchy_cache`], so a cache never shrinks.
pub fn persist_hierarchy_cache(level: u32) {
    let Some(dir) = cache_dir() else { return };
    if let Err(e) = hierarchy::save_cache(&dir, level) {
        eprintln!("warning: could not write hierarchy cache in {}: {e}", dir.display());
    }
}
