use serde::{Deserialize, Serialize};

use crate::error::{PcError, Result};

/// Tolerances shared by the consistency tests and floating comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    consistency_eps: f64,
    numeric_eps: f64,
}

impl Tolerance {
    pub const DEFAULT_CONSISTENCY_EPS: f64 = 1e-9;
    pub const DEFAULT_NUMERIC_EPS: f64 = 1e-12;

    pub fn new(consistency_eps: f64, numeric_eps: f64) -> Result<Self> {
        check("consistency_eps", consistency_eps)?;
        check("numeric_eps", numeric_eps)?;
        Ok(Self {
            consistency_eps,
            numeric_eps,
        })
    }

    pub fn with_consistency_eps(self, consistency_eps: f64) -> Result<Self> {
        Self::new(consistency_eps, self.numeric_eps)
    }

    pub fn consistency_eps(&self) -> f64 {
        self.consistency_eps
    }

    pub fn numeric_eps(&self) -> f64 {
        self.numeric_eps
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            consistency_eps: Self::DEFAULT_CONSISTENCY_EPS,
            numeric_eps: Self::DEFAULT_NUMERIC_EPS,
        }
    }
}

fn check(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(PcError::InvalidTolerance { name, value })
    }
}
