//! Approximation of `n > 3` matrices through their principal 3x3 submatrices.
//!
//! Every index triple `i < j < k` selects a 3x3 submatrix. Each one is
//! decomposed and its consistent component kept. The new matrix `S` takes,
//! at each pair `(i, j)`, the geometric mean of the consistent component
//! values over all selections containing both `i` and `j`. Exactly `n - 2`
//! selections contain a given pair.
//!
//! In log space one step leaves the consistent projection of the matrix
//! unchanged and scales the remaining cycle part by `(2n - 6) / (3n - 6)`,
//! so repeated application converges to the consistent matrix built from
//! the geometric-mean weights.

use serde::{Deserialize, Serialize};

use crate::decomp::decompose;
use crate::error::{PcError, Result};
use crate::liealg::{exp_map, log_map, SkewMatrix};
use crate::matrix::PcMatrix;
use crate::tolerance::Tolerance;

/// A principal 3x3 submatrix, `sub[p][q] = m[indices[p]][indices[q]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmatrixSelection {
    pub indices: [usize; 3],
    pub sub: PcMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub iteration: usize,
    pub inconsistency: f64,
    /// Largest relative entry change against the previous matrix.
    pub max_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    pub final_matrix: PcMatrix,
    pub converged: bool,
}

fn require_three_or_more(m: &PcMatrix) -> Result<()> {
    if m.n() < 3 {
        Err(PcError::DimensionTooSmall { n: m.n(), min: 3 })
    } else {
        Ok(())
    }
}

/// All `C(n, 3)` principal 3x3 submatrices in lexicographic index order.
pub fn submatrices3(m: &PcMatrix) -> Result<Vec<SubmatrixSelection>> {
    require_three_or_more(m)?;
    let n = m.n();
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                out.push(select(m, [i, j, k]));
            }
        }
    }
    Ok(out)
}

fn select(m: &PcMatrix, idx: [usize; 3]) -> SubmatrixSelection {
    let mut data = Vec::with_capacity(9);
    for &p in &idx {
        for &q in &idx {
            data.push(m.get(p, q));
        }
    }
    SubmatrixSelection {
        indices: idx,
        sub: PcMatrix::from_raw_parts(3, data, m.recip_tol()).expect("entries taken from a valid matrix"),
    }
}

/// One reconstruction step.
pub fn approximate_once(m: &PcMatrix) -> Result<PcMatrix> {
    let n = m.n();
    let selections = submatrices3(m)?;
    // Sum of log consistent-component values per upper pair.
    let mut log_sum = vec![0.0; n * n];
    let mut count = vec![0usize; n * n];
    for sel in &selections {
        let d = decompose(&sel.sub)?;
        let l = log_map(d.consistent.matrix());
        let [a, b, c] = sel.indices;
        for (p, q, v) in [(a, b, l.get(0, 1)), (a, c, l.get(0, 2)), (b, c, l.get(1, 2))] {
            log_sum[p * n + q] += v;
            count[p * n + q] += 1;
        }
    }
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            upper.push(log_sum[i * n + j] / count[i * n + j] as f64);
        }
    }
    let s = exp_map(&SkewMatrix::from_upper(n, &upper)?)?;
    s.validate(Tolerance::DEFAULT_NUMERIC_EPS)?;
    Ok(s)
}

/// Applies [`approximate_once`] until the inconsistency drops to
/// `consistency_eps` or `max_iter` steps have run. Step 0 records the input.
pub fn iterate_to_consistency(
    m: &PcMatrix,
    tol: &Tolerance,
    max_iter: usize,
) -> Result<IterationTrace> {
    require_three_or_more(m)?;
    if max_iter == 0 {
        return Err(PcError::InvalidArgument("max_iter must be at least 1".into()));
    }
    let eps = tol.consistency_eps();
    let mut current = m.clone();
    let mut inconsistency = current.inconsistency();
    let mut steps = vec![IterationStep {
        iteration: 0,
        inconsistency,
        max_change: 0.0,
    }];
    let mut iteration = 0;
    while inconsistency > eps && iteration < max_iter {
        iteration += 1;
        let next = approximate_once(&current)?;
        let max_change = next.max_relative_diff(&current);
        inconsistency = next.inconsistency();
        steps.push(IterationStep {
            iteration,
            inconsistency,
            max_change,
        });
        current = next;
    }
    Ok(IterationTrace {
        steps,
        final_matrix: current,
        converged: inconsistency <= eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{matrix_from_weights, WeightVector};

    fn exam() -> PcMatrix {
        PcMatrix::from_upper(3, &[2.0, 5.0, 3.0], 1e-9).unwrap()
    }

    fn consistent(w: &[f64]) -> PcMatrix {
        matrix_from_weights(&WeightVector::normalized(w).unwrap())
    }

    #[test]
    fn single_selection_for_three() {
        let s = submatrices3(&exam()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].indices, [0, 1, 2]);
        assert_eq!(s[0].sub, exam());
    }

    #[test]
    fn five_by_five_selections() {
        let m = consistent(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let s = submatrices3(&m).unwrap();
        assert_eq!(s.len(), 10);
        // removing entities 3 and 4 (one-based) leaves (1, 2, 5)
        let sel = s.iter().find(|s| s.indices == [0, 1, 4]).unwrap();
        assert_eq!(sel.sub.get(0, 2), m.get(0, 4));
        assert_eq!(sel.sub.get(2, 1), m.get(4, 1));
        let order: Vec<_> = s.iter().map(|s| s.indices).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            submatrices3(&PcMatrix::identity(2)),
            Err(PcError::DimensionTooSmall { n: 2, min: 3 })
        ));
        assert!(approximate_once(&PcMatrix::identity(2)).is_err());
        assert!(iterate_to_consistency(&PcMatrix::identity(2), &Tolerance::default(), 5).is_err());
        assert!(iterate_to_consistency(&exam(), &Tolerance::default(), 0).is_err());
    }

    #[test]
    fn consistent_is_fixed_point() {
        let m = consistent(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        assert!(approximate_once(&m).unwrap().max_relative_diff(&m) < 1e-12);
    }

    #[test]
    fn three_by_three_step_is_consistent_component() {
        let s = approximate_once(&exam()).unwrap();
        let d = decompose(&exam()).unwrap();
        assert!(s.max_relative_diff(d.consistent.matrix()) < 1e-14);
    }

    #[test]
    fn doubled_entry_gets_closer() {
        let mut rows = consistent(&[1.0, 2.0, 3.0, 4.0]).to_rows();
        rows[0][3] *= 2.0;
        rows[3][0] /= 2.0;
        let m = PcMatrix::new(&rows, 1e-12).unwrap();
        let s = approximate_once(&m).unwrap();
        assert!(s.inconsistency() < m.inconsistency());
    }

    #[test]
    fn consistent_converges_at_step_zero() {
        let t = iterate_to_consistency(&consistent(&[3.0, 1.0, 2.0]), &Tolerance::default(), 10).unwrap();
        assert!(t.converged);
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].iteration, 0);
    }

    #[test]
    fn exam_converges_in_one_step() {
        let t = iterate_to_consistency(&exam(), &Tolerance::default(), 10).unwrap();
        assert!(t.converged);
        assert_eq!(t.steps.len(), 2);
        assert!((t.steps[0].inconsistency - 1.0 / 6.0).abs() < 1e-15);
        assert!(t.steps[1].inconsistency < 1e-12);
        assert!(t.steps[1].max_change > 0.0);
    }

    #[test]
    fn gives_up_after_max_iter() {
        let mut rows = consistent(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).to_rows();
        rows[0][6] *= 8.0;
        rows[6][0] /= 8.0;
        let m = PcMatrix::new(&rows, 1e-12).unwrap();
        let t = iterate_to_consistency(&m, &Tolerance::default(), 2).unwrap();
        assert!(!t.converged);
        assert_eq!(t.steps.len(), 3);
    }
}
