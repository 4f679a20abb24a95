//! Group precoding vectors and the superimposed transmit vector.

use crate::modem::ConstellationPoint;
use crate::topology::{GroupAssignment, PowerAllocation};
use crate::{Complex, Error, Result};

/// Rotation angle of every Givens factor in the basis construction.
const GIVENS_ANGLE: f64 = std::f64::consts::FRAC_PI_3;

/// `T` orthonormal real vectors of length `T`, one per group.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingBasis {
    vectors: Vec<Vec<f64>>,
}

impl PrecodingBasis {
    /// Deterministic orthonormal basis.
    ///
    /// Starts from the identity and right-multiplies a Givens rotation by
    /// pi/3 in every coordinate plane `(i, j)`, `i < j`, in lexicographic
    /// order. The rows are the precoding vectors. For `T = 2` this is
    /// `v_1 = [1/2, sqrt(3)/2]`, `v_2 = [-sqrt(3)/2, 1/2]`; for `T` up to at
    /// least 8 every entry is non-zero, so each group occupies every slot.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::GroupCountOutOfRange {
                groups: 0,
                users: 0,
            });
        }
        let (s, c) = GIVENS_ANGLE.sin_cos();
        let mut m: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for i in 0..dim {
            for j in i + 1..dim {
                // columns i and j of M * G(i, j)
                for row in m.iter_mut() {
                    let (a, b) = (row[i], row[j]);
                    row[i] = c * a - s * b;
                    row[j] = s * a + c * b;
                }
            }
        }
        Ok(PrecodingBasis { vectors: m })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Precoding vector of group `t`.
    pub fn vector(&self, t: usize) -> &[f64] {
        &self.vectors[t]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Gram matrix `V V^T`; the identity for an orthonormal basis.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|a| {
                self.vectors
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                    .collect()
            })
            .collect()
    }
}

/// Shorthand for [`PrecodingBasis::new`].
pub fn make_basis(dim: usize) -> Result<PrecodingBasis> {
    PrecodingBasis::new(dim)
}

/// `x = sum_k sqrt(P_k) v_{t(k)} x_k`.
pub fn assemble_transmit(
    symbols: &[ConstellationPoint],
    power: &PowerAllocation,
    groups: &GroupAssignment,
    basis: &PrecodingBasis,
) -> Result<Vec<Complex>> {
    let users = power.per_user().len();
    if symbols.len() != users {
        return Err(Error::DimensionMismatch {
            expected: users,
            actual: symbols.len(),
        });
    }
    if groups.user_count() != users {
        return Err(Error::DimensionMismatch {
            expected: users,
            actual: groups.user_count(),
        });
    }
    if basis.dim() != groups.group_count() {
        return Err(Error::DimensionMismatch {
            expected: groups.group_count(),
            actual: basis.dim(),
        });
    }
    // Per-group scalar first, then spread along the group's vector.
    let mut per_group = vec![Complex::new(0.0, 0.0); basis.dim()];
    for (k, sym) in symbols.iter().enumerate() {
        per_group[groups.group_of(k)] += sym.value() * power.amplitude(k);
    }
    let mut x = vec![Complex::new(0.0, 0.0); basis.dim()];
    for (t, &s) in per_group.iter().enumerate() {
        for (xi, &vi) in x.iter_mut().zip(basis.vector(t)) {
            *xi += s * vi;
        }
    }
    Ok(x)
}
