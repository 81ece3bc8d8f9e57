//! Tracy-Widom `F2`: Airy functions, the Hastings-McLeod table that serves
//! as the evaluator, and an Airy-kernel Fredholm determinant as an oracle.

pub mod airy;
pub mod fredholm;
pub mod painleve;

use std::path::Path;
use std::sync::{Arc, OnceLock};

pub use airy::{airy_ai, airy_ai_prime, airy_pair};
pub use fredholm::{fredholm_determinant, tw2_fredholm_oracle};
pub use painleve::{solve_hastings_mcleod, HastingsMcLeod, Tw2Params, Tw2Table};

use crate::error::{Error, Result};

/// Environment variable naming a cached table CSV.
pub const TABLE_CACHE_ENV: &str = "RDM_TABLE_CACHE";

/// Shared, read-only handle to a built table.
#[derive(Clone, Debug, Default)]
pub struct TracyWidom {
    table: Option<Arc<Tw2Table>>,
}

impl TracyWidom {
    pub fn unbuilt() -> Self {
        Self { table: None }
    }

    pub fn build(params: Tw2Params) -> Result<Self> {
        Ok(Self::from_table(Tw2Table::build(params)?))
    }

    pub fn from_table(table: Tw2Table) -> Self {
        Self {
            table: Some(Arc::new(table)),
        }
    }

    /// Default table, loaded from `RDM_TABLE_CACHE` when set. A missing cache
    /// file is created from a fresh build.
    pub fn load_or_build() -> Result<Self> {
        match std::env::var_os(TABLE_CACHE_ENV) {
            Some(path) => Self::load_or_build_at(Path::new(&path)),
            None => Ok(Self::from_table(default_table().clone())),
        }
    }

    pub fn load_or_build_at(path: &Path) -> Result<Self> {
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            return Ok(Self::from_table(Tw2Table::from_csv_str(&text)?));
        }
        let table = default_table().clone();
        std::fs::write(path, table.to_csv_string()).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_table(table))
    }

    pub fn table(&self) -> Result<&Tw2Table> {
        self.table.as_deref().ok_or(Error::TableNotBuilt)
    }

    pub fn cdf(&self, s: f64) -> Result<f64> {
        Ok(self.table()?.cdf(s))
    }

    pub fn pdf(&self, s: f64) -> Result<f64> {
        Ok(self.table()?.pdf(s))
    }
}

/// Process-wide table with default parameters, built on first use.
pub fn default_table() -> &'static Tw2Table {
    static TABLE: OnceLock<Tw2Table> = OnceLock::new();
    TABLE.get_or_init(|| Tw2Table::build(Tw2Params::default()).expect("default Painleve II grid is valid"))
}

/// `F2(s)` from the default table.
pub fn tw2_cdf(s: f64) -> f64 {
    default_table().cdf(s)
}

/// `F2'(s)` from the default table.
pub fn tw2_pdf(s: f64) -> f64 {
    default_table().pdf(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbuilt_handle_errors() {
        let tw = TracyWidom::unbuilt();
        assert!(matches!(tw.cdf(0.0), Err(Error::TableNotBuilt)));
        assert!(matches!(tw.pdf(0.0), Err(Error::TableNotBuilt)));
    }

    #[test]
    fn endpoints_and_tails() {
        let t = default_table();
        assert!((t.cdf(t.s_max()) - 1.0).abs() < 1e-8);
        assert_eq!(t.cdf(100.0), 1.0);
        assert_eq!(t.pdf(t.s_max()), 0.0);
        assert!(t.cdf(-12.0) < t.cdf(t.s_min()));
        assert!(t.cdf(-12.0) >= 0.0);
        assert!(t.f2_values[t.len() - 1] < 1e-6);
        assert!(t.f2_values[0] > 1.0 - 1e-8);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tw2.csv");
        let built = TracyWidom::load_or_build_at(&path).unwrap();
        assert!(path.exists());
        let loaded = TracyWidom::load_or_build_at(&path).unwrap();
        assert_eq!(built.table().unwrap(), loaded.table().unwrap());
    }
}
