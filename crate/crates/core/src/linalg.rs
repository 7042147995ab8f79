//! Small dense helpers on `&[f64]` vectors plus the ball/sphere constants.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + t * b`
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let l = norm(a);
    (l > 0.0 && l.is_finite()).then(|| scale(a, 1.0 / l))
}

pub fn basis_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    // exact recursion V_n = 2π/n V_{n-2}
    let mut v = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// Surface area of the unit sphere `S^{n-1}`; equals `n * ball_volume(n)`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

/// Extends `first` (orthonormal) to an orthonormal basis of `R^n` by Gram-Schmidt
/// against the standard basis, in index order.
pub fn complete_basis(first: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = first.to_vec();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = basis_vector(n, i);
        // two passes keep the result orthonormal to round-off
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v = axpy(&v, -c, b);
            }
        }
        let l = norm(&v);
        if l > 1e-6 {
            basis.push(scale(&v, 1.0 / l));
        }
    }
    basis
}

/// Solves the square system `rows * x = rhs`; `None` if (numerically) singular.
pub fn solve(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = a.lu();
    let det = lu.determinant();
    let scale: f64 = rows.iter().map(|r| norm(r)).product();
    // also rejects a NaN determinant
    if det.abs().partial_cmp(&(1e-12 * scale.max(1e-300))) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    lu.solve(&DVector::from_column_slice(rhs))
        .map(|x| x.iter().copied().collect())
}

/// `sqrt(det(E^T E))` for the edge vectors `E`: the k-volume of the parallelotope.
pub fn gram_volume(edges: &[Vec<f64>]) -> f64 {
    let k = edges.len();
    if k == 0 {
        return 1.0;
    }
    let g = DMatrix::from_fn(k, k, |i, j| dot(&edges[i], &edges[j]));
    g.determinant().max(0.0).sqrt()
}

/// Affine dimension of a point set (tolerance relative to the set's extent).
pub fn affine_rank(points: &[&[f64]], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let extent = points
        .iter()
        .map(|p| norm(&sub(p, base)))
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    for p in &points[1..] {
        let mut v = sub(p, base);
        for _ in 0..2 {
            for b in &ortho {
                let c = dot(&v, b);
                v = axpy(&v, -c, b);
            }
        }
        let l = norm(&v);
        if l > tol * extent {
            ortho.push(scale(&v, 1.0 / l));
        }
    }
    ortho.len()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Deterministic pairwise summation; fixed order regardless of thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
