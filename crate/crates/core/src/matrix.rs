//! Multiplicative pairwise comparison matrices and their Hadamard group.
//!
//! A [`PcMatrix`] is an `n x n` matrix of strictly positive ratios with unit
//! diagonal and `m[j][i] = 1 / m[i][j]`. Under the elementwise (Hadamard)
//! product these matrices form an abelian group: the all-ones matrix is the
//! identity and the transpose is the inverse.
//!
//! Consistency is judged triad by triad. For `i < j < k` the triad is
//! consistent when `m[i][k] * m[k][j] = m[i][j]`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{PcError, Result};
use crate::tolerance::Tolerance;

/// Smallest entry accepted from user input.
pub const MIN_ENTRY: f64 = 1e-15;
/// Largest entry accepted from user input.
pub const MAX_ENTRY: f64 = 1e15;

#[derive(Debug, Clone)]
pub struct PcMatrix {
    n: usize,
    // row-major
    data: Vec<f64>,
    recip_tol: f64,
}

impl PartialEq for PcMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data == other.data
    }
}

impl PcMatrix {
    /// Validates `raw` and canonicalizes it: the lower triangle is replaced
    /// by exact reciprocals of the upper triangle.
    pub fn new<R: AsRef<[f64]>>(raw: &[R], recip_tol: f64) -> Result<Self> {
        let n = raw.len();
        if n < 2 {
            return Err(PcError::DimensionTooSmall { n, min: 2 });
        }
        if !(recip_tol.is_finite() && recip_tol >= 0.0) {
            return Err(PcError::InvalidArgument(format!(
                "reciprocity tolerance must be finite and non-negative, got {recip_tol}"
            )));
        }
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
        let at = |i: usize, j: usize| raw[i].as_ref()[j];

        for i in 0..n {
            for j in 0..n {
                let value = at(i, j);
                if !(value.is_finite() && value > 0.0) {
                    return Err(PcError::NonPositiveEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
                if !(MIN_ENTRY..=MAX_ENTRY).contains(&value) {
                    return Err(PcError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value,
                    });
                }
            }
        }
        for i in 0..n {
            let value = at(i, i);
            if (value - 1.0).abs() > recip_tol {
                return Err(PcError::BadDiagonal { index: i, value });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let product = at(i, j) * at(j, i);
                if (product - 1.0).abs() > recip_tol {
                    return Err(PcError::ReciprocityViolation {
                        row: i,
                        col: j,
                        product,
                        tol: recip_tol,
                    });
                }
            }
        }

        let mut data = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let upper = at(i, j);
                data[i * n + j] = upper;
                data[j * n + i] = 1.0 / upper;
            }
        }
        Ok(Self { n, data, recip_tol })
    }

    /// Builds a matrix from its strict upper triangle, listed row by row.
    pub fn from_upper(n: usize, upper: &[f64], recip_tol: f64) -> Result<Self> {
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
        let mut raw = vec![vec![1.0; n]; n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().expect("length checked");
                raw[i][j] = v;
                raw[j][i] = 1.0 / v;
            }
        }
        Self::new(&raw, recip_tol)
    }

    /// The all-ones matrix, neutral element of the Hadamard product.
    ///
    /// Panics if `n < 2`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "PC matrices need dimension >= 2, got {n}");
        Self {
            n,
            data: vec![1.0; n * n],
            recip_tol: Tolerance::DEFAULT_NUMERIC_EPS,
        }
    }

    /// Internal constructor for entries produced by closed operations. Only
    /// positivity and finiteness are checked.
    pub(crate) fn from_raw_parts(n: usize, data: Vec<f64>, recip_tol: f64) -> Result<Self> {
        debug_assert_eq!(data.len(), n * n);
        for (idx, &value) in data.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(PcError::NonPositiveEntry {
                    row: idx / n,
                    col: idx % n,
                    value,
                });
            }
        }
        Ok(Self { n, data, recip_tol })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn recip_tol(&self) -> f64 {
        self.recip_tol
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

    /// Strict upper triangle, row by row.
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

    /// Re-checks every invariant with the given reciprocity tolerance.
    pub fn validate(&self, recip_tol: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let value = self.get(i, j);
                if !(value.is_finite() && value > 0.0) {
                    return Err(PcError::NonPositiveEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
            }
            if self.get(i, i) != 1.0 {
                return Err(PcError::BadDiagonal {
                    index: i,
                    value: self.get(i, i),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let product = self.get(i, j) * self.get(j, i);
                if (product - 1.0).abs() > recip_tol {
                    return Err(PcError::ReciprocityViolation {
                        row: i,
                        col: j,
                        product,
                        tol: recip_tol,
                    });
                }
            }
        }
        Ok(())
    }

    /// Elementwise product, the group operation.
    ///
    /// Each reciprocal pair is evaluated as `x[i][j] / y[j][i]`, where `x` is
    /// the operand whose pair lies farther from 1 and `y` the other one. This
    /// keeps the identity law, the inverse law `M . M^T = 1` and
    /// commutativity exact in floating point.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(PcError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut data = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let a = (self.get(i, j), self.get(j, i));
                let b = (other.get(i, j), other.get(j, i));
                let (x, y) = if pair_order(a, b) == Ordering::Less {
                    (b, a)
                } else {
                    (a, b)
                };
                data[i * n + j] = x.0 / y.1;
                data[j * n + i] = x.1 / y.0;
            }
        }
        Self::from_raw_parts(n, data, self.recip_tol.max(other.recip_tol))
    }

    /// Group inverse, which is the transpose.
    pub fn hadamard_inverse(&self) -> Self {
        self.transpose()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![1.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j);
            }
        }
        Self {
            n,
            data,
            recip_tol: self.recip_tol,
        }
    }

    /// Simultaneous row and column relabeling: entity `perm[p]` of `self`
    /// becomes entity `p` of the result.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        if perm.len() != n {
            return Err(PcError::DimensionMismatch {
                left: n,
                right: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(PcError::InvalidArgument(format!(
                    "{perm:?} is not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        let mut data = vec![1.0; n * n];
        for p in 0..n {
            for q in 0..n {
                data[p * n + q] = self.get(perm[p], perm[q]);
            }
        }
        Ok(Self {
            n,
            data,
            recip_tol: self.recip_tol,
        })
    }

    /// All triads `(i, j, k)` with `i < j < k`, in lexicographic order.
    pub fn triads(&self) -> impl Iterator<Item = Triad> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            ((i + 1)..n).flat_map(move |j| ((j + 1)..n).map(move |k| self.triad(i, j, k)))
        })
    }

    /// Panics unless `i < j < k < n`.
    pub fn triad(&self, i: usize, j: usize, k: usize) -> Triad {
        assert!(i < j && j < k && k < self.n, "bad triad ({i}, {j}, {k})");
        Triad {
            i,
            j,
            k,
            value_ik: self.get(i, k),
            value_kj: self.get(k, j),
            value_ij: self.get(i, j),
        }
    }

    /// True iff every triad satisfies `|m_ik * m_kj / m_ij - 1| <= consistency_eps`.
    pub fn is_consistent(&self, tol: &Tolerance) -> bool {
        let eps = tol.consistency_eps();
        self.triads().all(|t| (t.ratio() - 1.0).abs() <= eps)
    }

    /// Largest triad deviation, in `[0, 1)`. Zero for `n = 2`.
    pub fn inconsistency(&self) -> f64 {
        self.triads().map(|t| t.deviation()).fold(0.0, f64::max)
    }

    /// The triad attaining [`inconsistency`](Self::inconsistency), first in
    /// lexicographic order among ties.
    pub fn worst_triad(&self) -> Result<(Triad, f64)> {
        if self.n < 3 {
            return Err(PcError::DimensionTooSmall { n: self.n, min: 3 });
        }
        let mut triads = self.triads();
        let first = triads.next().expect("n >= 3 has a triad");
        let init = (first, first.deviation());
        Ok(triads.fold(init, |best, t| {
            let d = t.deviation();
            if d > best.1 {
                (t, d)
            } else {
                best
            }
        }))
    }

    /// Largest `|a - b| / |b|` over all entries.
    pub fn max_relative_diff(&self, reference: &Self) -> f64 {
        assert_eq!(self.n, reference.n);
        self.data
            .iter()
            .zip(&reference.data)
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max)
    }
}

// Ordering used to pick the dominant operand of a reciprocal pair. Must be a
// total order so that swapping the operands swaps the roles.
fn pair_order(a: (f64, f64), b: (f64, f64)) -> Ordering {
    a.0.ln()
        .abs()
        .total_cmp(&b.0.ln().abs())
        .then_with(|| a.0.to_bits().cmp(&b.0.to_bits()))
        .then_with(|| a.1.to_bits().cmp(&b.1.to_bits()))
}

impl fmt::Display for PcMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>10.5}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Three entities `i < j < k` and the entries linking them. Indices are
/// zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value_ik: f64,
    pub value_kj: f64,
    pub value_ij: f64,
}

impl Triad {
    pub fn indices(&self) -> (usize, usize, usize) {
        (self.i, self.j, self.k)
    }

    /// `m_ik * m_kj / m_ij`, equal to 1 on a consistent triad.
    pub fn ratio(&self) -> f64 {
        self.value_ik * self.value_kj / self.value_ij
    }

    /// `min(|1 - m_ij / (m_ik m_kj)|, |1 - m_ik m_kj / m_ij|)`.
    pub fn deviation(&self) -> f64 {
        let through = self.value_ik * self.value_kj;
        let a = (1.0 - self.value_ij / through).abs();
        let b = (1.0 - through / self.value_ij).abs();
        a.min(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exam() -> PcMatrix {
        PcMatrix::new(
            &[[1.0, 2.0, 5.0], [0.5, 1.0, 3.0], [0.2, 1.0 / 3.0, 1.0]],
            1e-9,
        )
        .unwrap()
    }

    fn from_weights(w: &[f64]) -> PcMatrix {
        let rows: Vec<Vec<f64>> = w
            .iter()
            .map(|wi| w.iter().map(|wj| wi / wj).collect())
            .collect();
        PcMatrix::new(&rows, 1e-12).unwrap()
    }

    #[test]
    fn exam_matrix_is_valid() {
        let m = exam();
        assert_eq!(m.n(), 3);
        assert_eq!(m.upper(), vec![2.0, 5.0, 3.0]);
        assert_eq!(m.get(2, 1), 1.0 / 3.0);
    }

    #[test]
    fn all_ones_two_by_two() {
        let m = PcMatrix::new(&[[1.0, 1.0], [1.0, 1.0]], 1e-9).unwrap();
        assert_eq!(m, PcMatrix::identity(2));
    }

    #[test]
    fn reciprocity_violation() {
        let err = PcMatrix::new(&[[1.0, 2.0], [0.4, 1.0]], 1e-9).unwrap_err();
        assert!(matches!(err, PcError::ReciprocityViolation { row: 0, col: 1, .. }));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            PcMatrix::new(&[vec![1.0, 2.0], vec![0.5]], 1e-9),
            Err(PcError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            PcMatrix::new(&[[1.0, -2.0], [-0.5, 1.0]], 1e-9),
            Err(PcError::NonPositiveEntry { .. })
        ));
        assert!(matches!(
            PcMatrix::new(&[[1.0, f64::NAN], [1.0, 1.0]], 1e-9),
            Err(PcError::NonPositiveEntry { .. })
        ));
        assert!(matches!(
            PcMatrix::new(&[[1.1, 2.0], [0.5, 1.0]], 1e-9),
            Err(PcError::BadDiagonal { index: 0, .. })
        ));
        assert!(matches!(
            PcMatrix::new(&[[1.0, 1e16], [1e-16, 1.0]], 1e-9),
            Err(PcError::EntryOutOfRange { .. })
        ));
        assert!(matches!(
            PcMatrix::new(&[[1.0]], 1e-9),
            Err(PcError::DimensionTooSmall { n: 1, .. })
        ));
    }

    #[test]
    fn diagonal_within_tolerance_is_forced_to_one() {
        let m = PcMatrix::new(&[[1.0 + 1e-12, 2.0], [0.5, 1.0]], 1e-9).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn lower_triangle_is_canonicalized() {
        let m = PcMatrix::new(
            &[[1.0, 3.0, 1.0], [0.3333333333, 1.0, 1.0], [1.0, 1.0, 1.0]],
            1e-9,
        )
        .unwrap();
        assert_eq!(m.get(1, 0), 1.0 / 3.0);
    }

    #[test]
    fn identity_values() {
        assert_eq!(PcMatrix::identity(3).as_slice(), &[1.0; 9]);
        assert_eq!(PcMatrix::identity(2).as_slice(), &[1.0; 4]);
        let m = exam();
        assert_eq!(PcMatrix::identity(3).hadamard(&m).unwrap(), m);
        assert_eq!(m.hadamard(&PcMatrix::identity(3)).unwrap(), m);
    }

    #[test]
    fn hadamard_square_of_exam() {
        let m = exam();
        let sq = m.hadamard(&m).unwrap();
        assert_eq!(sq.get(0, 1), 4.0);
        assert_eq!(sq.get(0, 2), 25.0);
        assert_eq!(sq.get(1, 2), 9.0);
        assert!((sq.get(2, 1) - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn hadamard_dimension_mismatch() {
        let err = exam().hadamard(&PcMatrix::identity(2)).unwrap_err();
        assert_eq!(err, PcError::DimensionMismatch { left: 3, right: 2 });
    }

    #[test]
    fn inverse_is_transpose() {
        let m = exam();
        let inv = m.hadamard_inverse();
        assert_eq!(inv.get(0, 1), 0.5);
        assert_eq!(m.hadamard(&inv).unwrap(), PcMatrix::identity(3));
        assert_eq!(inv.hadamard(&m).unwrap(), PcMatrix::identity(3));
        assert_eq!(inv.hadamard_inverse(), m);
        assert_eq!(
            PcMatrix::identity(4).hadamard_inverse(),
            PcMatrix::identity(4)
        );
    }

    #[test]
    fn consistency_examples() {
        let tol = Tolerance::default();
        let c = PcMatrix::new(
            &[[1.0, 2.0, 6.0], [0.5, 1.0, 3.0], [1.0 / 6.0, 1.0 / 3.0, 1.0]],
            1e-9,
        )
        .unwrap();
        assert!(c.is_consistent(&tol));
        assert!(!exam().is_consistent(&tol));
        assert!(PcMatrix::identity(5).is_consistent(&tol));
    }

    #[test]
    fn inconsistency_examples() {
        let c = PcMatrix::new(
            &[[1.0, 2.0, 6.0], [0.5, 1.0, 3.0], [1.0 / 6.0, 1.0 / 3.0, 1.0]],
            1e-9,
        )
        .unwrap();
        assert_eq!(c.inconsistency(), 0.0);
        assert!((exam().inconsistency() - 1.0 / 6.0).abs() < 1e-15);
        assert!(from_weights(&[1.0, 2.0, 3.0, 4.0]).inconsistency() < 1e-15);
        assert_eq!(PcMatrix::identity(2).inconsistency(), 0.0);
    }

    #[test]
    fn worst_triad_examples() {
        let (t, v) = exam().worst_triad().unwrap();
        assert_eq!(t.indices(), (0, 1, 2));
        assert!((v - 1.0 / 6.0).abs() < 1e-15);

        let (t, v) = PcMatrix::identity(4).worst_triad().unwrap();
        assert_eq!(t.indices(), (0, 1, 2));
        assert_eq!(v, 0.0);

        let mut rows = from_weights(&[1.0, 2.0, 3.0, 4.0]).to_rows();
        rows[0][3] *= 2.0;
        rows[3][0] /= 2.0;
        let m = PcMatrix::new(&rows, 1e-12).unwrap();
        let (t, v) = m.worst_triad().unwrap();
        assert_eq!((t.i, t.k), (0, 3));
        assert_eq!(t.indices(), (0, 1, 3));
        assert!((v - 0.5).abs() < 1e-12);

        assert!(matches!(
            PcMatrix::identity(2).worst_triad(),
            Err(PcError::DimensionTooSmall { n: 2, min: 3 })
        ));
    }

    #[test]
    fn triads_enumerated_lexicographically() {
        let ids: Vec<_> = PcMatrix::identity(4).triads().map(|t| t.indices()).collect();
        assert_eq!(ids, vec![(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]);
    }

    #[test]
    fn permute_rejects_non_permutations() {
        let m = PcMatrix::identity(3);
        assert!(m.permute(&[0, 1]).is_err());
        assert!(m.permute(&[0, 0, 1]).is_err());
        assert!(m.permute(&[0, 1, 3]).is_err());
        let p = exam().permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.get(1, 2), 2.0);
        assert!(p.validate(1e-15).is_ok());
    }
}
