//! Numerical integration over spheres, sub-spheres, `[0, 1]`, simplices and the
//! Grassmannian.
//!
//! Sphere integrals use the unnormalized surface measure `du` (total mass
//! `|S^{n-1}| = n ω_n`). Deterministic rules are hyperspherical product rules
//! built from composite Gauss-Legendre panels. The panel breaks sit on the
//! coordinate hyperplanes of the rule's frame, so integrands with kinks on
//! `⟨u, e_i⟩ = 0` (cone densities, `|⟨θ,u⟩|`) are integrated panel-wise smoothly
//! when the frame is chosen accordingly.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bodies::Frame;
use crate::error::{invalid, Result};
use crate::linalg::{basis_vector, factorial, gram_volume, pairwise_sum, sphere_area, sub};

pub const MAX_LEVEL: u8 = 5;

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Sphere,
    Radial,
    Stochastic,
}

/// Nodes and positive weights. Sphere nodes are unit vectors of the ambient
/// space; radial nodes are 1-vectors in `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub dim: usize,
    pub level: u8,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub exact_mass: f64,
    /// `|Σ weights − exact_mass|`; for stochastic rules integrals carry their
    /// own batch standard error instead.
    pub error_estimate: f64,
    pub seed: Option<u64>,
    /// Number of contiguous node batches used for the batch-variance error.
    pub batches: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Parallel evaluation, fixed-order summation. Stochastic rules report the
    /// standard error of the batch means; deterministic rules report 0 (use
    /// [`integrate_refined`] for a resolution-based estimate).
    pub fn integrate<F>(&self, f: F) -> Estimate
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        let value = pairwise_sum(&terms);
        if self.kind != RuleKind::Stochastic || self.batches < 2 {
            return Estimate { value, error: 0.0 };
        }
        let b = self.batches;
        let chunk = terms.len() / b;
        let means: Vec<f64> = (0..b)
            .map(|i| pairwise_sum(&terms[i * chunk..(i + 1) * chunk]) * b as f64)
            .collect();
        let m = means.iter().sum::<f64>() / b as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b as f64 - 1.0);
        Estimate {
            value,
            error: (var / b as f64).sqrt(),
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if m == 0 {
                break;
            }
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre on `[a, b]`.
pub fn gauss_legendre_interval(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|wi| wi * h).collect(),
    )
}

/// Nodes per panel for a product rule on `S^{m-1}`, by sphere dimension and level.
fn panel_nodes(m: usize, level: u8) -> Option<usize> {
    let l = level as usize;
    let table: &[usize; 6] = match m {
        2 => &[16, 32, 48, 64, 96, 128],
        3 => &[6, 10, 16, 32, 48, 64],
        4 => &[3, 4, 6, 8, 12, 16],
        5 => &[2, 3, 4, 5, 6, 8],
        _ => return None,
    };
    Some(table[l.min(5)])
}

/// Product rule on `S^{m-1}` in canonical coordinates (the first coordinate is the pole).
fn canonical_sphere(m: usize, c: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    match m {
        1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
        2 => {
            let mut nodes = Vec::with_capacity(4 * c);
            let mut weights = Vec::with_capacity(4 * c);
            for q in 0..4 {
                let a = q as f64 * PI / 2.0;
                let (x, w) = gauss_legendre_interval(c, a, a + PI / 2.0);
                for (phi, wi) in x.into_iter().zip(w) {
                    nodes.push(vec![phi.cos(), phi.sin()]);
                    weights.push(wi);
                }
            }
            (nodes, weights)
        }
        3 => {
            let (inner, iw) = canonical_sphere(2, c);
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (a, b) in [(-1.0, 0.0), (0.0, 1.0)] {
                let (ts, tw) = gauss_legendre_interval(c, a, b);
                for (t, wt) in ts.into_iter().zip(tw) {
                    let s = (1.0 - t * t).max(0.0).sqrt();
                    for (y, wy) in inner.iter().zip(&iw) {
                        nodes.push(vec![t, s * y[0], s * y[1]]);
                        weights.push(wt * wy);
                    }
                }
            }
            (nodes, weights)
        }
        _ => {
            let (inner, iw) = canonical_sphere(m - 1, c);
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (a, b) in [(0.0, PI / 2.0), (PI / 2.0, PI)] {
                let (al, aw) = gauss_legendre_interval(c, a, b);
                // rescale so the polar-angle weights integrate sin^{m-2} exactly
                let half = sphere_area(m) / sphere_area(m - 1) / 2.0;
                let raw: f64 = al.iter().zip(&aw).map(|(t, w)| w * t.sin().powi(m as i32 - 2)).sum();
                let fix = half / raw;
                for (alpha, wa) in al.into_iter().zip(aw) {
                    let (s, co) = alpha.sin_cos();
                    let jac = fix * s.powi(m as i32 - 2);
                    for (y, wy) in inner.iter().zip(&iw) {
                        let mut node = Vec::with_capacity(m);
                        node.push(co);
                        node.extend(y.iter().map(|v| s * v));
                        nodes.push(node);
                        weights.push(wa * jac * wy);
                    }
                }
            }
            (nodes, weights)
        }
    }
}

fn stochastic_count(level: u8, m: usize) -> usize {
    let n = 1usize << (10 + level.min(MAX_LEVEL) as usize);
    let shell = 2 * m;
    let batches = 16 * shell;
    n.div_ceil(batches) * batches
}

/// Haar-random orthogonal matrix columns via QR of a Gaussian matrix with the
/// sign of R's diagonal fixed.
fn haar_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    (0..n)
        .map(|j| {
            let s = if r[(j, j)] < 0.0 { -1.0 } else { 1.0 };
            (0..n).map(|i| s * q[(i, j)]).collect()
        })
        .collect()
}

fn canonical_stochastic(m: usize, level: u8, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>, usize) {
    let count = stochastic_count(level, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(count);
    while nodes.len() < count {
        for col in haar_orthogonal(m, &mut rng) {
            let neg: Vec<f64> = col.iter().map(|v| -v).collect();
            nodes.push(col);
            nodes.push(neg);
        }
    }
    let w = sphere_area(m) / count as f64;
    (nodes, vec![w; count], 16)
}

/// Rule on the unit sphere of `span(basis)` (orthonormal vectors of `R^n`),
/// with the first basis vector as the pole. Sphere dimensions above 5 use the
/// stochastic rule seeded by `seed`.
pub fn sphere_rule_in_frame(basis: &[Vec<f64>], level: u8, seed: u64) -> Result<QuadratureRule> {
    let m = basis.len();
    if m == 0 {
        return Err(invalid("empty frame"));
    }
    if level > MAX_LEVEL {
        return Err(invalid(format!("level {level} outside 0..={MAX_LEVEL}")));
    }
    let n = basis[0].len();
    let (canon, weights, kind, batches, seed_used) = match panel_nodes(m, level) {
        Some(c) => {
            let (x, w) = canonical_sphere(m, c);
            (x, w, RuleKind::Sphere, 1, None)
        }
        None if m == 1 => {
            let (x, w) = canonical_sphere(1, 1);
            (x, w, RuleKind::Sphere, 1, None)
        }
        None => {
            let (x, w, b) = canonical_stochastic(m, level, seed);
            (x, w, RuleKind::Stochastic, b, Some(seed))
        }
    };
    let nodes: Vec<Vec<f64>> = canon
        .iter()
        .map(|y| {
            let mut x = vec![0.0; n];
            for (c, b) in y.iter().zip(basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            x
        })
        .collect();
    let exact_mass = sphere_area(m);
    let mass = pairwise_sum(&weights);
    Ok(QuadratureRule {
        kind,
        dim: n,
        level,
        nodes,
        weights,
        exact_mass,
        error_estimate: (mass - exact_mass).abs(),
        seed: seed_used,
        batches,
    })
}

/// Rule on `S^{n-1}` in the standard frame.
pub fn sphere_rule(n: usize, level: u8, seed: u64) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(invalid("sphere rule needs n >= 2"));
    }
    let basis: Vec<Vec<f64>> = (0..n).map(|i| basis_vector(n, i)).collect();
    sphere_rule_in_frame(&basis, level, seed)
}

/// Rule on `S^{n-1}` with the given unit pole as first axis.
pub fn sphere_rule_with_pole(pole: &[f64], level: u8, seed: u64) -> Result<QuadratureRule> {
    let p = crate::linalg::normalized(pole).ok_or_else(|| invalid("zero pole"))?;
    let basis = crate::linalg::complete_basis(&[p], pole.len());
    sphere_rule_in_frame(&basis, level, seed)
}

/// Rule on the sub-sphere `S^{n-1} ∩ span(frame)`.
pub fn subsphere_rule(frame: &Frame, level: u8, seed: u64) -> Result<QuadratureRule> {
    sphere_rule_in_frame(&frame.basis, level, seed)
}

/// Gauss-Legendre rule on `[0, 1]`; 32 nodes at level 3.
pub fn radial_rule(level: u8) -> Result<QuadratureRule> {
    if level > MAX_LEVEL {
        return Err(invalid(format!("level {level} outside 0..={MAX_LEVEL}")));
    }
    let m = match level {
        0 => 4,
        l => 8usize << (l - 1),
    };
    let (x, w) = gauss_legendre_interval(m, 0.0, 1.0);
    let mass = pairwise_sum(&w);
    Ok(QuadratureRule {
        kind: RuleKind::Radial,
        dim: 1,
        level,
        nodes: x.into_iter().map(|t| vec![t]).collect(),
        weights: w,
        exact_mass: 1.0,
        error_estimate: (mass - 1.0).abs(),
        seed: None,
        batches: 1,
    })
}

/// Integrates on the rule at `level` and `level − 1`; the error estimate is the
/// difference (plus the batch error for stochastic rules, plus round-off).
pub fn integrate_refined<F>(basis: &[Vec<f64>], level: u8, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let fine = sphere_rule_in_frame(basis, level, seed)?.integrate(&f);
    let coarse_level = level.saturating_sub(1);
    if coarse_level == level {
        return Ok(fine);
    }
    let coarse = sphere_rule_in_frame(basis, coarse_level, seed ^ 0x9e37_79b9)?.integrate(&f);
    Ok(Estimate {
        value: fine.value,
        error: (fine.value - coarse.value).abs() + fine.error + 1e-13 * fine.value.abs(),
    })
}

/// Haar-distributed k-dimensional frames of `R^n`.
pub fn grassmann_sample(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Frame>> {
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = haar_orthogonal(n, &mut rng);
            let normal = (k + 1 == n).then(|| q[k].clone());
            Ok(Frame {
                dim: n,
                k,
                basis: q[..k].to_vec(),
                normal,
            })
        })
        .collect()
}

/// Points and weights integrating over the k-simplex with the given vertices
/// (embedded in any ambient dimension), by collapsed-coordinate Gauss-Legendre
/// with `m` points per direction.
pub fn simplex_rule(vertices: &[Vec<f64>], m: usize) -> Vec<(Vec<f64>, f64)> {
    let k = vertices.len() - 1;
    let v0 = &vertices[0];
    let edges: Vec<Vec<f64>> = vertices[1..].iter().map(|v| sub(v, v0)).collect();
    let vol = gram_volume(&edges) / factorial(k);
    if k == 0 {
        return vec![(v0.clone(), 1.0)];
    }
    let (x, w) = gauss_legendre_interval(m, 0.0, 1.0);
    let mut out = Vec::with_capacity(m.pow(k as u32));
    let mut idx = vec![0usize; k];
    loop {
        // unit-simplex coordinates y_i = u_i * Π_{j<i} (1 − u_j)
        let mut rest = 1.0;
        let mut weight = factorial(k) * vol;
        let mut point = v0.clone();
        for (i, &ix) in idx.iter().enumerate() {
            let u = x[ix];
            let y = rest * u;
            weight *= w[ix] * (1.0 - u).powi((k - 1 - i) as i32);
            for (p, e) in point.iter_mut().zip(&edges[i]) {
                *p += y * e;
            }
            rest *= 1.0 - u;
        }
        out.push((point, weight));
        let mut d = 0;
        loop {
            if d == k {
                return out;
            }
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Hypothesis grid of directions on the upper hemisphere (first coordinate of
/// the rule frame ≥ 0): nodes of the level-`max(level,2)−2` sphere rule plus
/// the coordinate axes and the main diagonal.
pub fn direction_grid(n: usize, level: u8) -> Result<Vec<Vec<f64>>> {
    let rule = sphere_rule(n, level.saturating_sub(2), 0x5eed)?;
    let mut dirs: Vec<Vec<f64>> = rule.nodes.into_iter().filter(|u| u[0] >= 0.0).collect();
    for i in 0..n {
        dirs.push(basis_vector(n, i));
    }
    dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    Ok(dirs)
}
