//! Exact split of a 3x3 PC matrix into an orthogonal and a consistent factor.
//!
//! In log space a 3x3 skew matrix with upper triangle `(a, b, c)` splits
//! uniquely as
//!
//! ```text
//! (a, b, c) = (x, -x, x) + (y, y + z, z)
//! x = (a - b + c) / 3,  y = (2a + b - c) / 3,  z = (2c - a + b) / 3
//! ```
//!
//! The first summand spans the line `h`, the second the plane `l` of
//! additively consistent matrices, and `h` is the Frobenius-orthogonal
//! complement of `l`. Exponentiating gives `M = A_H . A_L` with `A_H` in the
//! one-parameter subgroup `H` and `A_L` consistent.
//!
//! Index convention: `xi = m[0][1]`, `eta = m[0][2]`, `gamma = m[1][2]`
//! (one-based: `m12`, `m13`, `m23`).

use serde::{Deserialize, Serialize};

use crate::error::{PcError, Result};
use crate::liealg::{exp_map, log_map, SkewMatrix};
use crate::matrix::PcMatrix;
use crate::tolerance::Tolerance;

/// Log-space coordinates of the split: `x` along `h`, `(y, z)` in `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogParams {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Element of `H`: `[[1, k, 1/k], [1/k, 1, k], [k, 1/k, 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoComponent {
    k: f64,
    matrix: PcMatrix,
}

impl OrthoComponent {
    pub fn from_k(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(PcError::InvalidArgument(format!("k = {k} must be finite and positive")));
        }
        Self::from_log(k.ln())
    }

    fn from_log(x: f64) -> Result<Self> {
        let matrix = exp_map(&SkewMatrix::from_upper(3, &[x, -x, x])?)?;
        Ok(Self {
            k: matrix.get(0, 1),
            matrix,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn matrix(&self) -> &PcMatrix {
        &self.matrix
    }
}

/// Element of `L`: `[[1, Y, YZ], [1/Y, 1, Z], [1/(YZ), 1/Z, 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentComponent {
    y: f64,
    z: f64,
    matrix: PcMatrix,
}

impl ConsistentComponent {
    pub fn from_yz(y: f64, z: f64) -> Result<Self> {
        for (name, v) in [("Y", y), ("Z", z)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(PcError::InvalidArgument(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
        // m13 is the float product y * z so that m12 * m23 == m13 holds exactly.
        let yz = y * z;
        let data = vec![
            1.0,
            y,
            yz,
            1.0 / y,
            1.0,
            z,
            1.0 / yz,
            1.0 / z,
            1.0,
        ];
        let matrix = PcMatrix::from_raw_parts(3, data, Tolerance::DEFAULT_NUMERIC_EPS)?;
        Ok(Self { y, z, matrix })
    }

    /// `Y = m12`.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// `Z = m23`.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn matrix(&self) -> &PcMatrix {
        &self.matrix
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub ortho: OrthoComponent,
    pub consistent: ConsistentComponent,
    pub log_params: LogParams,
}

impl DecompositionResult {
    /// `A_H . A_L`, which reproduces the decomposed matrix.
    pub fn reconstruct(&self) -> PcMatrix {
        self.ortho
            .matrix
            .hadamard(&self.consistent.matrix)
            .expect("both components are 3x3")
    }
}

/// Output of [`split_additive`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveSplit {
    pub h_part: SkewMatrix,
    pub l_part: SkewMatrix,
    pub params: LogParams,
}

fn require_three(n: usize) -> Result<()> {
    if n == 3 {
        Ok(())
    } else {
        Err(PcError::WrongDimension {
            expected: 3,
            actual: n,
        })
    }
}

/// Splits a 3x3 skew matrix into its `h` and `l` parts.
pub fn split_additive(a: &SkewMatrix) -> Result<AdditiveSplit> {
    require_three(a.n())?;
    let (a12, a13, a23) = (a.get(0, 1), a.get(0, 2), a.get(1, 2));
    let x = (a12 - a13 + a23) / 3.0;
    let y = (2.0 * a12 + a13 - a23) / 3.0;
    let z = (2.0 * a23 - a12 + a13) / 3.0;
    // l takes the remainder so that h + l reproduces a to rounding.
    let h_part = SkewMatrix::from_upper(3, &[x, -x, x])?;
    let l_part = SkewMatrix::from_upper(3, &[a12 - x, a13 + x, a23 - x])?;
    Ok(AdditiveSplit {
        h_part,
        l_part,
        params: LogParams { x, y, z },
    })
}

/// `M = A_H . A_L` with `k = (xi gamma / eta)^(1/3)`,
/// `Y = (xi^2 eta / gamma)^(1/3)` and `Z = (gamma^2 eta / xi)^(1/3)`.
pub fn decompose(m: &PcMatrix) -> Result<DecompositionResult> {
    require_three(m.n())?;
    // Cube roots as exp(ln(.) / 3), evaluated in log space.
    let split = split_additive(&log_map(m))?;
    let LogParams { x, y, z } = split.params;
    let ortho = OrthoComponent::from_log(x)?;
    let consistent = ConsistentComponent::from_yz(y.exp(), z.exp())?;
    Ok(DecompositionResult {
        ortho,
        consistent,
        log_params: split.params,
    })
}

/// Membership in `H`: `m12 = m23 = 1 / m13`, each within `consistency_eps`.
pub fn is_in_h(m: &PcMatrix, tol: &Tolerance) -> Result<bool> {
    require_three(m.n())?;
    let eps = tol.consistency_eps();
    let (m12, m13, m23) = (m.get(0, 1), m.get(0, 2), m.get(1, 2));
    Ok((m12 / m23 - 1.0).abs() <= eps && (m12 * m13 - 1.0).abs() <= eps)
}

/// Membership in `L`: `m12 * m23 = m13` within `consistency_eps`.
pub fn is_in_l(m: &PcMatrix, tol: &Tolerance) -> Result<bool> {
    require_three(m.n())?;
    let (m12, m13, m23) = (m.get(0, 1), m.get(0, 2), m.get(1, 2));
    Ok((m12 * m23 / m13 - 1.0).abs() <= tol.consistency_eps())
}

/// Checks that `m . n`, `m^-1` and `n^-1` stay in the subgroup both inputs
/// belong to. Inputs in neither common subgroup are rejected.
pub fn hl_closure_check(m: &PcMatrix, n: &PcMatrix, tol: &Tolerance) -> Result<bool> {
    let member: fn(&PcMatrix, &Tolerance) -> Result<bool> = if is_in_h(m, tol)? && is_in_h(n, tol)? {
        is_in_h
    } else if is_in_l(m, tol)? && is_in_l(n, tol)? {
        is_in_l
    } else {
        return Err(PcError::MembershipViolation { set: "H or L" });
    };
    let product = m.hadamard(n)?;
    Ok(member(&product, tol)?
        && member(&m.hadamard_inverse(), tol)?
        && member(&n.hadamard_inverse(), tol)?)
}
