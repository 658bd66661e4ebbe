//! JSON analysis block shared by the CLI `report` command and the HTTP
//! service. Entity indices in this module's output are one-based.

use serde::{Deserialize, Serialize};

use crate::decomp::{decompose, LogParams};
use crate::error::{PcError, Result};
use crate::extend::{approximate_once, iterate_to_consistency, submatrices3, IterationStep};
use crate::matrix::PcMatrix;
use crate::tolerance::Tolerance;
use crate::weights::{geometric_mean_weights, rank_entities, reconstruction_error};

/// Bumped whenever a field of [`Report`] or [`Analysis`] changes meaning or
/// disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadReport {
    pub indices: [usize; 3],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// Entities of the decomposed 3x3 submatrix.
    pub indices: [usize; 3],
    pub k: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub log_params: LogParams,
    /// `A_H`
    pub ortho: Vec<Vec<f64>>,
    /// `A_L`
    pub consistent: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub weights: Vec<f64>,
    pub ranking: Vec<String>,
    pub inconsistency: f64,
    pub consistent: bool,
    pub worst_triad: Option<TriadReport>,
    pub decomposition: Option<DecompositionReport>,
    pub reconstruction_error: f64,
}

/// Weights, ranking, inconsistency, the worst triad and the decomposition of
/// its 3x3 submatrix.
pub fn analyze<S: AsRef<str>>(m: &PcMatrix, labels: &[S], tol: &Tolerance) -> Result<Analysis> {
    let weights = geometric_mean_weights(m);
    let ranking = rank_entities(&weights, labels)?;
    let (worst_triad, decomposition) = if m.n() >= 3 {
        let (t, value) = m.worst_triad()?;
        let indices = [t.i, t.j, t.k];
        let sub = submatrices3(m)?
            .into_iter()
            .find(|s| s.indices == indices)
            .expect("every triad has a selection")
            .sub;
        let d = decompose(&sub)?;
        let one_based = indices.map(|i| i + 1);
        (
            Some(TriadReport {
                indices: one_based,
                value,
            }),
            Some(DecompositionReport {
                indices: one_based,
                k: d.ortho.k(),
                y: d.consistent.y(),
                z: d.consistent.z(),
                log_params: d.log_params,
                ortho: d.ortho.matrix().to_rows(),
                consistent: d.consistent.matrix().to_rows(),
            }),
        )
    } else {
        (None, None)
    };
    Ok(Analysis {
        weights: weights.values().to_vec(),
        ranking,
        inconsistency: m.inconsistency(),
        consistent: m.is_consistent(tol),
        worst_triad,
        decomposition,
        reconstruction_error: reconstruction_error(m),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub converged: bool,
    pub steps: Vec<IterationStep>,
    #[serde(rename = "final")]
    pub final_matrix: Vec<Vec<f64>>,
}

/// Everything the CLI knows about one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub n: usize,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(flatten)]
    pub analysis: Analysis,
    /// One reconstruction step; absent for `n < 3`.
    pub approximation: Option<Vec<Vec<f64>>>,
    pub iteration: Option<IterationReport>,
}

pub fn build_report(
    m: &PcMatrix,
    labels: Vec<String>,
    tol: &Tolerance,
    max_iter: usize,
) -> Result<Report> {
    if labels.len() != m.n() {
        return Err(PcError::LabelMismatch {
            labels: labels.len(),
            n: m.n(),
        });
    }
    let analysis = analyze(m, &labels, tol)?;
    let (approximation, iteration) = if m.n() >= 3 {
        let trace = iterate_to_consistency(m, tol, max_iter)?;
        (
            Some(approximate_once(m)?.to_rows()),
            Some(IterationReport {
                converged: trace.converged,
                steps: trace.steps,
                final_matrix: trace.final_matrix.to_rows(),
            }),
        )
    } else {
        (None, None)
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        n: m.n(),
        labels,
        matrix: m.to_rows(),
        analysis,
        approximation,
        iteration,
    })
}
