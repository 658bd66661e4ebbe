//! Skew-symmetric log-space of PC matrices.
//!
//! Entrywise `ln` carries a PC matrix to a skew-symmetric matrix and
//! entrywise `exp` carries it back. The Hadamard product becomes ordinary
//! addition, so the tangent space at the identity is the
//! `n(n-1)/2`-dimensional space of skew-symmetric matrices.
//!
//! `exp` here is always the elementwise exponential, not the matrix
//! exponential series.

use nalgebra::DMatrix;

use crate::error::{PcError, Result};
use crate::matrix::PcMatrix;
use crate::tolerance::Tolerance;

/// Largest log-entry magnitude accepted by [`exp_map`].
pub const EXP_LIMIT: f64 = 700.0;

/// Real `n x n` matrix with `A + A^T = 0`. The lower triangle is always the
/// exact negation of the upper triangle and the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SkewMatrix {
    /// Validates `raw` with [`is_skew`] and canonicalizes it from the upper
    /// triangle.
    pub fn new<R: AsRef<[f64]>>(raw: &[R], tol: &Tolerance) -> Result<Self> {
        let n = raw.len();
        if n < 2 {
            return Err(PcError::DimensionTooSmall { n, min: 2 });
        }
        check_square(raw)?;
        for (i, row) in raw.iter().enumerate() {
            for (j, &value) in row.as_ref().iter().enumerate() {
                if !value.is_finite() {
                    return Err(PcError::NonFiniteEntry { row: i, col: j, value });
                }
            }
        }
        let eps = tol.numeric_eps();
        for i in 0..n {
            for j in i..n {
                let deviation = (raw[i].as_ref()[j] + raw[j].as_ref()[i]).abs();
                if deviation > eps {
                    return Err(PcError::NotSkew {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        let upper: Vec<f64> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| raw[i].as_ref()[j])
            .collect();
        Self::from_upper(n, &upper)
    }

    /// Builds the matrix from its strict upper triangle, row by row.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(PcError::DimensionTooSmall { n, min: 2 });
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(PcError::InvalidArgument(format!(
                "expected {expected} upper-triangle entries for n = {n}, got {}",
                upper.len()
            )));
        }
        let mut data = vec![0.0; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let value = *it.next().expect("length checked");
                if !value.is_finite() {
                    return Err(PcError::NonFiniteEntry { row: i, col: j, value });
                }
                data[i * n + j] = value;
                data[j * n + i] = -value;
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 2, "skew matrices need dimension >= 2, got {n}");
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * t).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    /// Equal to [`neg`](Self::neg) for a skew matrix.
    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j);
            }
        }
        Self { n, data }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ik + a_kj - a_ij|` over triads `i < j < k`; zero exactly
    /// when the exponentiated matrix is consistent.
    pub fn max_triad_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let r = self.get(i, k) + self.get(k, j) - self.get(i, j);
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.n != other.n {
            return Err(PcError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self { n: self.n, data })
    }
}

fn check_square<R: AsRef<[f64]>>(raw: &[R]) -> Result<()> {
    let n = raw.len();
    for (row, r) in raw.iter().enumerate() {
        let len = r.as_ref().len();
        if len != n {
            return Err(PcError::NotSquare {
                row,
                len,
                expected: n,
            });
        }
    }
    Ok(())
}

/// Entrywise natural logarithm.
pub fn log_map(m: &PcMatrix) -> SkewMatrix {
    SkewMatrix::from_upper(m.n(), &m.upper().iter().map(|v| v.ln()).collect::<Vec<_>>())
        .expect("logs of positive finite entries are finite")
}

/// Entrywise exponential. Each lower entry is `exp(-a_ij)` rather than a
/// reciprocal, so `exp_map(A)^T == exp_map(-A)` holds bit for bit.
pub fn exp_map(a: &SkewMatrix) -> Result<PcMatrix> {
    let largest = a.max_abs();
    if largest > EXP_LIMIT {
        return Err(PcError::Overflow {
            value: largest,
            limit: EXP_LIMIT,
        });
    }
    let data = a.data.iter().map(|v| v.exp()).collect();
    PcMatrix::from_raw_parts(a.n, data, Tolerance::DEFAULT_NUMERIC_EPS)
}

/// True iff `raw` is square and `max |raw[i][j] + raw[j][i]| <= numeric_eps`.
pub fn is_skew<R: AsRef<[f64]>>(raw: &[R], tol: &Tolerance) -> bool {
    if check_square(raw).is_err() {
        return false;
    }
    let n = raw.len();
    let eps = tol.numeric_eps();
    (0..n).all(|i| (i..n).all(|j| (raw[i].as_ref()[j] + raw[j].as_ref()[i]).abs() <= eps))
}

/// `sum_ij a_ij b_ij`.
pub fn frobenius_inner(a: &SkewMatrix, b: &SkewMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(PcError::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// `t -> exp(tA)`.
pub fn one_param_subgroup(a: &SkewMatrix, t: f64) -> Result<PcMatrix> {
    if !t.is_finite() {
        return Err(PcError::InvalidArgument(format!("parameter t = {t} is not finite")));
    }
    exp_map(&a.scale(t))
}

/// Dimension of the Lie algebra, `n(n-1)/2`.
pub fn algebra_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// The canonical basis `{E_ij - E_ji : i < j}`.
pub fn skew_basis(n: usize) -> Vec<SkewMatrix> {
    let dim = algebra_dim(n);
    (0..dim)
        .map(|idx| {
            let mut upper = vec![0.0; dim];
            upper[idx] = 1.0;
            SkewMatrix::from_upper(n, &upper).expect("finite")
        })
        .collect()
}

/// Numerical rank of the canonical basis, each element flattened to a
/// vector of length `n^2`.
pub fn basis_rank(n: usize) -> usize {
    let basis = skew_basis(n);
    if basis.is_empty() {
        return 0;
    }
    let cols: Vec<f64> = basis.iter().flat_map(|b| b.data.iter().copied()).collect();
    let m = DMatrix::from_column_slice(n * n, basis.len(), &cols);
    m.rank(1e-10)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetTraceCheck {
    /// Ordinary determinant of `exp_map(A)`.
    pub det_of_exp: f64,
    /// `e^{tr A}`.
    pub exp_of_trace: f64,
    pub equal: bool,
}

/// Compares `det(exp_map(A))` with `e^{tr A}`. For the elementwise
/// exponential the familiar identity does not hold in general.
pub fn det_trace_check(a: &SkewMatrix, tol: &Tolerance) -> Result<DetTraceCheck> {
    let e = exp_map(a)?;
    let det_of_exp = DMatrix::from_row_slice(e.n(), e.n(), e.as_slice()).determinant();
    let exp_of_trace = a.trace().exp();
    let scale = det_of_exp.abs().max(exp_of_trace.abs());
    let equal = (det_of_exp - exp_of_trace).abs() <= tol.numeric_eps() * scale;
    Ok(DetTraceCheck {
        det_of_exp,
        exp_of_trace,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn example_a() -> SkewMatrix {
        SkewMatrix::new(
            &[[0.0, -1.0, 1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            &Tolerance::default(),
        )
        .unwrap()
    }

    fn exam() -> PcMatrix {
        PcMatrix::new(
            &[[1.0, 2.0, 5.0], [0.5, 1.0, 3.0], [0.2, 1.0 / 3.0, 1.0]],
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn log_of_identity_is_zero() {
        assert_eq!(log_map(&PcMatrix::identity(3)), SkewMatrix::zeros(3));
    }

    #[test]
    fn log_of_exam() {
        let a = log_map(&exam());
        assert_eq!(a.upper(), vec![LN_2, 5f64.ln(), 3f64.ln()]);
        assert_eq!(a.get(1, 0), -LN_2);
    }

    #[test]
    fn exp_log_round_trip() {
        let m = exam();
        let back = exp_map(&log_map(&m)).unwrap();
        assert!(back.max_relative_diff(&m) < 1e-12);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(exp_map(&SkewMatrix::zeros(4)).unwrap(), PcMatrix::identity(4));
    }

    #[test]
    fn exp_of_example_matrix() {
        let e = exp_map(&example_a()).unwrap();
        let expected = [[1.0, 1.0 / E, E], [E, 1.0, 1.0], [1.0 / E, 1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                let rel = (e.get(i, j) - expected[i][j]).abs() / expected[i][j];
                assert!(rel <= 1e-15, "({i},{j}) rel err {rel}");
            }
        }
    }

    #[test]
    fn exp_overflow() {
        let a = SkewMatrix::from_upper(2, &[701.0]).unwrap();
        assert!(matches!(exp_map(&a), Err(PcError::Overflow { .. })));
        let ok = SkewMatrix::from_upper(2, &[700.0]).unwrap();
        assert!(exp_map(&ok).is_ok());
    }

    #[test]
    fn skew_predicate() {
        let tol = Tolerance::default();
        assert!(is_skew(&[[0.0; 3]; 3], &tol));
        assert!(is_skew(&example_a().to_rows(), &tol));
        assert!(!is_skew(&[[0.5, 0.0], [0.0, 0.0]], &tol));
        assert!(!is_skew(&[vec![0.0, 1.0], vec![-1.0]], &tol));
    }

    #[test]
    fn new_rejects_non_skew() {
        let tol = Tolerance::default();
        assert!(matches!(
            SkewMatrix::new(&[[0.0, 1.0], [1.0, 0.0]], &tol),
            Err(PcError::NotSkew { .. })
        ));
        assert!(matches!(
            SkewMatrix::new(&[[0.0, f64::INFINITY], [f64::NEG_INFINITY, 0.0]], &tol),
            Err(PcError::NonFiniteEntry { .. })
        ));
    }

    #[test]
    fn inner_product_examples() {
        let a = example_a();
        let aa = frobenius_inner(&a, &a).unwrap();
        let upper_sq: f64 = a.upper().iter().map(|v| v * v).sum();
        assert_eq!(aa, 2.0 * upper_sq);
        assert_eq!(frobenius_inner(&SkewMatrix::zeros(3), &a).unwrap(), 0.0);
        assert!(frobenius_inner(&SkewMatrix::zeros(2), &a).is_err());
    }

    #[test]
    fn h_and_l_basis_are_orthogonal() {
        // h is spanned by upper (1, -1, 1); l by upper (1, 1, 0) and (0, 1, 1).
        let h = SkewMatrix::from_upper(3, &[1.0, -1.0, 1.0]).unwrap();
        let l1 = SkewMatrix::from_upper(3, &[1.0, 1.0, 0.0]).unwrap();
        let l2 = SkewMatrix::from_upper(3, &[0.0, 1.0, 1.0]).unwrap();
        assert_eq!(frobenius_inner(&h, &l1).unwrap(), 0.0);
        assert_eq!(frobenius_inner(&h, &l2).unwrap(), 0.0);
    }

    #[test]
    fn one_param_subgroup_at_zero() {
        assert_eq!(
            one_param_subgroup(&example_a(), 0.0).unwrap(),
            PcMatrix::identity(3)
        );
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(algebra_dim(2), 1);
        assert_eq!(algebra_dim(3), 3);
        assert_eq!(algebra_dim(8), 28);
        assert_eq!(basis_rank(8), 28);
    }

    #[test]
    fn det_trace_counterexample() {
        let check = det_trace_check(&example_a(), &Tolerance::default()).unwrap();
        let expected = E * E + 1.0 / (E * E) - 2.0;
        assert!(((check.det_of_exp - expected) / expected).abs() < 1e-12);
        assert!((check.det_of_exp - 5.5243914).abs() < 1e-6);
        assert_eq!(check.exp_of_trace, 1.0);
        assert!(!check.equal);
    }

    #[test]
    fn det_trace_all_ones_two_by_two() {
        let check = det_trace_check(&SkewMatrix::zeros(2), &Tolerance::default()).unwrap();
        assert_eq!(check.det_of_exp, 0.0);
        assert_eq!(check.exp_of_trace, 1.0);
        assert!(!check.equal);
    }

    #[test]
    fn log_linearizes_consistency() {
        let c = PcMatrix::new(
            &[[1.0, 2.0, 6.0], [0.5, 1.0, 3.0], [1.0 / 6.0, 1.0 / 3.0, 1.0]],
            1e-9,
        )
        .unwrap();
        assert!(log_map(&c).max_triad_residual() < 3.0 * 1e-12);
        assert!(log_map(&exam()).max_triad_residual() > 0.1);
    }
}
