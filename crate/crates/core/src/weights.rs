//! Priority weights from normalized geometric row means.

use serde::{Deserialize, Serialize};

use crate::error::{PcError, Result};
use crate::matrix::PcMatrix;

/// Strictly positive weights summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    const SUM_TOL: f64 = 1e-12;

    /// Accepts `values` as is; they must already sum to 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(PcError::InvalidWeights(format!(
                "need at least 2 weights, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(PcError::InvalidWeights(format!("weight {v} is not positive")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(PcError::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(values))
    }

    /// Scales positive `values` to sum 1.
    pub fn normalized(values: &[f64]) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(PcError::InvalidWeights(format!("weight {v} is not positive")));
        }
        let sum: f64 = values.iter().sum();
        Self::new(values.iter().map(|v| v / sum).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = PcError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// `v_i = (prod_j m_ij)^(1/n)`, normalized to sum 1. Computed from row means
/// of logs, shifted by their maximum before exponentiating.
pub fn geometric_mean_weights(m: &PcMatrix) -> WeightVector {
    let n = m.n();
    let log_means: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).ln()).sum::<f64>() / n as f64)
        .collect();
    let top = log_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_means.iter().map(|l| (l - top).exp()).collect();
    let sum: f64 = raw.iter().sum();
    WeightVector(raw.iter().map(|v| v / sum).collect())
}

/// The consistent matrix `[w_i / w_j]`.
pub fn matrix_from_weights(w: &WeightVector) -> PcMatrix {
    let v = w.values();
    let n = v.len();
    let mut data = Vec::with_capacity(n * n);
    for wi in v {
        for wj in v {
            data.push(wi / wj);
        }
    }
    for i in 0..n {
        data[i * n + i] = 1.0;
    }
    PcMatrix::from_raw_parts(n, data, crate::Tolerance::DEFAULT_NUMERIC_EPS)
        .expect("ratios of positive weights are positive")
}

/// Labels ordered by descending weight; ties keep their original order.
pub fn rank_entities<S: AsRef<str>>(w: &WeightVector, labels: &[S]) -> Result<Vec<String>> {
    if labels.len() != w.len() {
        return Err(PcError::LabelMismatch {
            labels: labels.len(),
            n: w.len(),
        });
    }
    let mut order: Vec<usize> = (0..w.len()).collect();
    let v = w.values();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    Ok(order.into_iter().map(|i| labels[i].as_ref().to_owned()).collect())
}

/// Largest `|m_ij - r_ij| / r_ij` where `r` is rebuilt from the geometric
/// mean weights of `m`. Zero exactly when `m` is consistent.
pub fn reconstruction_error(m: &PcMatrix) -> f64 {
    let rebuilt = matrix_from_weights(&geometric_mean_weights(m));
    m.max_relative_diff(&rebuilt)
}
