//! H-polytopes in dimension ≤ 4: vertex enumeration, simplicial decomposition
//! of the polytope and of each facet, and Euclidean projection onto the hull.
//!
//! Constraints are `⟨a_i, x⟩ ≤ b_i`, stored with `|a_i| = 1`. The origin need
//! not be interior (slices and cone-clipped bodies reuse this code).

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, unsupported, Result};
use crate::linalg::{affine_rank, dot, factorial, gram_volume, norm, scale, sub};

pub const MAX_POLY_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct HRep {
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

impl HRep {
    /// Normalizes every constraint. Rows with a vanishing normal are dropped when
    /// trivially satisfied and rejected otherwise.
    pub fn new(dim: usize, normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(invalid("normals and offsets differ in length"));
        }
        let mut ns = Vec::with_capacity(normals.len());
        let mut bs = Vec::with_capacity(offsets.len());
        for (a, b) in normals.into_iter().zip(offsets) {
            if a.len() != dim {
                return Err(invalid("constraint normal has wrong dimension"));
            }
            let l = norm(&a);
            if l < 1e-13 {
                if b < 0.0 {
                    return Ok(Self::empty(dim));
                }
                continue;
            }
            ns.push(scale(&a, 1.0 / l));
            bs.push(b / l);
        }
        Ok(Self {
            dim,
            normals: ns,
            offsets: bs,
        })
    }

    fn empty(dim: usize) -> Self {
        // x_0 ≤ -1 and -x_0 ≤ -1 has no solution
        let mut e = vec![0.0; dim];
        e[0] = 1.0;
        Self {
            dim,
            normals: vec![e.clone(), scale(&e, -1.0)],
            offsets: vec![-1.0, -1.0],
        }
    }

    pub fn with_constraint(&self, a: &[f64], b: f64) -> Result<Self> {
        let mut normals = self.normals.clone();
        let mut offsets = self.offsets.clone();
        normals.push(a.to_vec());
        offsets.push(b);
        Self::new(self.dim, normals, offsets)
    }

    fn tol(&self) -> f64 {
        1e-9 * self.offsets.iter().fold(1.0_f64, |m, b| m.max(b.abs()))
    }
}

/// Vertices with their tight constraint sets, plus derived simplicial data.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub hrep: HRep,
    pub vertices: Vec<Vec<f64>>,
    tight: Vec<Vec<bool>>,
    /// Affine dimension of the vertex set.
    pub affine_dim: usize,
}

/// A facet: unit outer normal, offset, and its decomposition into simplices of
/// dimension `dim − 1` (vertex indices into [`Polytope::vertices`]).
#[derive(Debug, Clone)]
pub struct Facet {
    pub constraint: usize,
    pub normal: Vec<f64>,
    pub offset: f64,
    pub simplices: Vec<Vec<usize>>,
    pub area: f64,
}

fn combinations(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Polytope {
    pub fn from_hrep(hrep: HRep) -> Result<Self> {
        let d = hrep.dim;
        if d == 0 || d > MAX_POLY_DIM {
            return Err(unsupported(format!(
                "vertex enumeration is limited to dimension <= {MAX_POLY_DIM}, got {d}"
            )));
        }
        let tol = hrep.tol();
        let m = hrep.normals.len();
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        combinations(m, d, |sel| {
            let rows: Vec<Vec<f64>> = sel.iter().map(|&i| hrep.normals[i].clone()).collect();
            let rhs: Vec<f64> = sel.iter().map(|&i| hrep.offsets[i]).collect();
            let Some(x) = crate::linalg::solve(&rows, &rhs) else {
                return;
            };
            let feasible = hrep
                .normals
                .iter()
                .zip(&hrep.offsets)
                .all(|(a, b)| dot(a, &x) <= b + tol);
            if feasible && !vertices.iter().any(|v| norm(&sub(v, &x)) <= 10.0 * tol) {
                vertices.push(x);
            }
        });
        let tight = vertices
            .iter()
            .map(|v| {
                hrep.normals
                    .iter()
                    .zip(&hrep.offsets)
                    .map(|(a, b)| (dot(a, v) - b).abs() <= 10.0 * tol)
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = vertices.iter().map(|v| v.as_slice()).collect();
        let affine_dim = if vertices.is_empty() {
            0
        } else {
            affine_rank(&refs, 1e-9)
        };
        Ok(Self {
            hrep,
            vertices,
            tight,
            affine_dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.hrep.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        !self.vertices.is_empty() && self.affine_dim == self.dim()
    }

    fn rank_of(&self, verts: &[usize]) -> usize {
        let refs: Vec<&[f64]> = verts.iter().map(|&v| self.vertices[v].as_slice()).collect();
        affine_rank(&refs, 1e-9)
    }

    /// Simplices (vertex index lists of length `face_dim + 1`) covering the face
    /// spanned by `verts`, coning from its first vertex over its facets.
    fn triangulate_face(&self, verts: &[usize], face_dim: usize) -> Vec<Vec<usize>> {
        if face_dim == 0 {
            return vec![vec![verts[0]]];
        }
        let apex = verts[0];
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        for j in 0..self.hrep.normals.len() {
            let sub_face: Vec<usize> = verts.iter().copied().filter(|&v| self.tight[v][j]).collect();
            if sub_face.len() == verts.len() || sub_face.len() < face_dim || self.tight[apex][j] {
                continue;
            }
            if self.rank_of(&sub_face) != face_dim - 1 || !seen.insert(sub_face.clone()) {
                continue;
            }
            for s in self.triangulate_face(&sub_face, face_dim - 1) {
                let mut simplex = Vec::with_capacity(face_dim + 1);
                simplex.push(apex);
                simplex.extend(s);
                out.push(simplex);
            }
        }
        out
    }

    /// Full-dimensional simplices covering the polytope (empty when the
    /// polytope is lower dimensional).
    pub fn simplices(&self) -> Vec<Vec<usize>> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.triangulate_face(&all, self.dim())
    }

    pub fn simplex_points(&self, s: &[usize]) -> Vec<Vec<f64>> {
        s.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    fn simplex_volume(&self, s: &[usize]) -> f64 {
        let v0 = &self.vertices[s[0]];
        let edges: Vec<Vec<f64>> = s[1..].iter().map(|&i| sub(&self.vertices[i], v0)).collect();
        gram_volume(&edges) / factorial(edges.len())
    }

    pub fn volume(&self) -> f64 {
        self.simplices().iter().map(|s| self.simplex_volume(s)).sum()
    }

    /// Facets coming from the constraints accepted by `keep`.
    pub fn facets_where(&self, keep: impl Fn(usize) -> bool) -> Vec<Facet> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        let d = self.dim();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        for j in 0..self.hrep.normals.len() {
            let verts: Vec<usize> = (0..self.vertices.len()).filter(|&v| self.tight[v][j]).collect();
            if verts.len() < d || self.rank_of(&verts) != d - 1 || !seen.insert(verts.clone()) {
                continue;
            }
            if !keep(j) {
                continue;
            }
            let simplices = self.triangulate_face(&verts, d - 1);
            let area = simplices.iter().map(|s| self.simplex_volume(s)).sum();
            out.push(Facet {
                constraint: j,
                normal: self.hrep.normals[j].clone(),
                offset: self.hrep.offsets[j],
                simplices,
                area,
            });
        }
        out
    }

    pub fn facets(&self) -> Vec<Facet> {
        self.facets_where(|_| true)
    }
}

/// Affine minimizer of `|Σ μ_i p_i|` subject to `Σ μ_i = 1`.
fn affine_minimizer(points: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let k = points.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = dot(points[i], points[j]);
        }
        m[(i, k)] = 1.0;
        m[(k, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.lu().solve(&rhs)?;
    Some((0..k).map(|i| sol[i]).collect())
}

/// Wolfe's minimum-norm-point algorithm on the convex hull of `points`.
pub fn min_norm_point(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let combine = |set: &[usize], lam: &[f64]| {
        let mut x = vec![0.0; n];
        for (&i, &l) in set.iter().zip(lam) {
            for (xi, pi) in x.iter_mut().zip(&points[i]) {
                *xi += l * pi;
            }
        }
        x
    };
    let start = (0..points.len())
        .min_by(|&a, &b| norm(&points[a]).total_cmp(&norm(&points[b])))
        .unwrap();
    let mut set = vec![start];
    let mut lam = vec![1.0];
    let mut x = points[start].clone();
    let scale2 = points.iter().map(|p| dot(p, p)).fold(0.0_f64, f64::max).max(1e-300);
    for _ in 0..1000 {
        let j = (0..points.len())
            .min_by(|&a, &b| dot(&x, &points[a]).total_cmp(&dot(&x, &points[b])))
            .unwrap();
        if dot(&x, &x) - dot(&x, &points[j]) <= 1e-14 * scale2 || set.contains(&j) {
            break;
        }
        set.push(j);
        lam.push(0.0);
        loop {
            let refs: Vec<&Vec<f64>> = set.iter().map(|&i| &points[i]).collect();
            let Some(mu) = affine_minimizer(&refs) else {
                // degenerate set: drop the newest point and stop
                set.pop();
                lam.pop();
                return combine(&set, &lam);
            };
            if mu.iter().all(|&m| m > 1e-14) {
                lam = mu;
                x = combine(&set, &lam);
                break;
            }
            let mut step = 1.0_f64;
            for (l, m) in lam.iter().zip(&mu) {
                if *m <= 1e-14 && l - m > 0.0 {
                    step = step.min(l / (l - m));
                }
            }
            for (l, m) in lam.iter_mut().zip(&mu) {
                *l = (1.0 - step) * *l + step * m;
            }
            let keep: Vec<bool> = lam.iter().map(|&l| l > 1e-14).collect();
            let mut k = 0;
            set.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            lam.retain(|&l| l > 1e-14);
            let total: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= total);
            x = combine(&set, &lam);
            if set.len() == 1 {
                break;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(d: usize, w: f64) -> HRep {
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; d];
                a[i] = s;
                normals.push(a);
                offsets.push(w);
            }
        }
        HRep::new(d, normals, offsets).unwrap()
    }

    fn cross(d: usize, s: f64) -> HRep {
        let mut normals = Vec::new();
        for mask in 0..(1usize << d) {
            normals.push((0..d).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect());
        }
        let offsets = vec![s; normals.len()];
        HRep::new(d, normals, offsets).unwrap()
    }

    #[test]
    fn cube_volumes_and_facets() {
        for d in 1..=4 {
            let p = Polytope::from_hrep(cube(d, 1.0)).unwrap();
            assert_eq!(p.vertices.len(), 1 << d);
            assert!((p.volume() - 2f64.powi(d as i32)).abs() < 1e-10, "d={d}");
            if d >= 2 {
                let f = p.facets();
                assert_eq!(f.len(), 2 * d);
                for facet in f {
                    assert!((facet.area - 2f64.powi(d as i32 - 1)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn cross_polytope_volume() {
        for d in 2..=4 {
            let p = Polytope::from_hrep(cross(d, 1.0)).unwrap();
            assert_eq!(p.vertices.len(), 2 * d);
            let want = 2f64.powi(d as i32) / factorial(d);
            assert!((p.volume() - want).abs() < 1e-10, "d={d}");
            let facets = p.facets();
            assert_eq!(facets.len(), 1 << d);
            // facet: regular simplex with vertices e_i, area sqrt(d)/(d-1)!
            let want_area = (d as f64).sqrt() / factorial(d - 1);
            for f in facets {
                assert!((f.area - want_area).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn clipped_cube_is_half() {
        let h = cube(3, 1.0).with_constraint(&[-1.0, 0.0, 0.0], 0.0).unwrap();
        let p = Polytope::from_hrep(h).unwrap();
        assert!((p.volume() - 4.0).abs() < 1e-10);
        let kept = p.facets_where(|j| j < 6);
        let area: f64 = kept.iter().map(|f| f.area).sum();
        // 1 full facet (x=1) + 4 half facets
        assert!((area - (4.0 + 4.0 * 2.0)).abs() < 1e-10);
    }

    #[test]
    fn empty_and_degenerate() {
        let h = cube(2, 1.0).with_constraint(&[1.0, 0.0], -2.0).unwrap();
        let p = Polytope::from_hrep(h).unwrap();
        assert!(p.vertices.is_empty());
        assert_eq!(p.volume(), 0.0);
        assert!(Polytope::from_hrep(cube(5, 1.0)).is_err());
    }

    #[test]
    fn wolfe_projection() {
        let sq: Vec<Vec<f64>> = vec![
            vec![1.0, 1.0],
            vec![3.0, 1.0],
            vec![1.0, 3.0],
            vec![3.0, 3.0],
        ];
        let x = min_norm_point(&sq);
        assert!(norm(&sub(&x, &[1.0, 1.0])) < 1e-12);
        let seg = vec![vec![-1.0, 2.0], vec![1.0, 2.0]];
        let y = min_norm_point(&seg);
        assert!(norm(&sub(&y, &[0.0, 2.0])) < 1e-12);
        let tri = vec![vec![1.0, -1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 0.0, -1.0]];
        let z = min_norm_point(&tri);
        assert!(norm(&sub(&z, &[1.0, 0.0, 0.0])) < 1e-12);
    }
}
