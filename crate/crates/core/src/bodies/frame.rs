use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{axpy, complete_basis, dot, norm, normalized, scale};

/// An orthonormal basis of a k-dimensional subspace of `R^n`. For hyperplanes
/// (`k = n - 1`) the unit normal `θ` with `θ⊥ = span(basis)` is also stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub dim: usize,
    pub k: usize,
    pub basis: Vec<Vec<f64>>,
    pub normal: Option<Vec<f64>>,
}

const ORTHO_TOL: f64 = 1e-12;

impl Frame {
    /// The hyperplane `θ⊥`; `θ` is normalized first.
    pub fn hyperplane(theta: &[f64]) -> Result<Self> {
        let n = theta.len();
        if n < 2 {
            return Err(invalid("hyperplane frame needs dim >= 2"));
        }
        let t = normalized(theta).ok_or_else(|| invalid("zero normal vector"))?;
        let full = complete_basis(std::slice::from_ref(&t), n);
        Ok(Self {
            dim: n,
            k: n - 1,
            basis: full[1..].to_vec(),
            normal: Some(t),
        })
    }

    /// Hyperplane frame whose first basis vector is the component of `pole`
    /// orthogonal to `θ` (when that component is not negligible).
    pub fn hyperplane_with_pole(theta: &[f64], pole: &[f64]) -> Result<Self> {
        let n = theta.len();
        let t = normalized(theta).ok_or_else(|| invalid("zero normal vector"))?;
        let p = axpy(pole, -dot(pole, &t), &t);
        let mut first = vec![t.clone()];
        if norm(&p) > 1e-9 * norm(pole) {
            first.push(scale(&p, 1.0 / norm(&p)));
        }
        let full = complete_basis(&first, n);
        Ok(Self {
            dim: n,
            k: n - 1,
            basis: full[1..].to_vec(),
            normal: Some(t),
        })
    }

    /// A subspace frame from an explicit orthonormal basis.
    pub fn subspace(dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        let k = basis.len();
        if k == 0 || k >= dim {
            return Err(invalid(format!("subspace dimension {k} must lie in 1..{dim}")));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != dim {
                return Err(invalid("basis vector has wrong length"));
            }
            for (j, c) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(b, c) - want).abs() > ORTHO_TOL {
                    return Err(invalid("basis is not orthonormal to 1e-12"));
                }
            }
        }
        let normal = (k + 1 == dim).then(|| complete_basis(&basis, dim)[k].clone());
        Ok(Self { dim, k, basis, normal })
    }

    /// Span of the listed coordinate axes.
    pub fn coordinate(dim: usize, axes: &[usize]) -> Result<Self> {
        let basis = axes
            .iter()
            .map(|&i| {
                if i >= dim {
                    Err(invalid("axis index out of range"))
                } else {
                    Ok(crate::linalg::basis_vector(dim, i))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::subspace(dim, basis)
    }

    /// Coordinates of `x` in the frame basis (orthogonal projection).
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    /// Embeds frame coordinates back into `R^n`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (c, b) in y.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }

    pub fn theta(&self) -> Option<&[f64]> {
        self.normal.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplane_frame_is_orthonormal() {
        let f = Frame::hyperplane(&[1.0, 1.0, 1.0]).unwrap();
        let t = f.normal.clone().unwrap();
        for b in &f.basis {
            assert!(dot(b, &t).abs() < 1e-12);
            assert!((norm(b) - 1.0).abs() < 1e-12);
        }
        assert!(dot(&f.basis[0], &f.basis[1]).abs() < 1e-12);
    }

    #[test]
    fn pole_is_first_basis_vector() {
        let f = Frame::hyperplane_with_pole(&[0.0, 0.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        let want = normalized(&[1.0, 1.0, 0.0]).unwrap();
        assert!(norm(&crate::linalg::sub(&f.basis[0], &want)) < 1e-12);
    }

    #[test]
    fn rejects_non_orthonormal() {
        assert!(Frame::subspace(3, vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]]).is_err());
        let f = Frame::coordinate(3, &[0, 1]).unwrap();
        assert_eq!(f.normal.unwrap(), vec![0.0, 0.0, 1.0]);
    }
}
