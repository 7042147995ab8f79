//! Convex bodies containing the origin in their interior, with analytic radial,
//! support and gauge oracles per kind.

pub mod frame;
pub mod polytope;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use frame::Frame;
pub use polytope::{min_norm_point, Facet, HRep, Polytope, MAX_POLY_DIM};

use crate::error::{invalid, unsupported, GeomError, Result};
use crate::linalg::{complete_basis, dot, norm, normalized, scale, sub};

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Ball { radius: f64 },
    Ellipsoid { semi_axes: Vec<f64> },
    /// `p ∈ [1, ∞]`; `f64::INFINITY` is the cube.
    LpBall { p: f64, scale: f64 },
    Box { half_widths: Vec<f64> },
    CrossPolytope { scale: f64 },
    /// `{x : ⟨a_i, x⟩ ≤ b_i}` with every `b_i > 0`.
    HPolytope { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
}

impl BodyKind {
    pub fn name(&self) -> &'static str {
        match self {
            BodyKind::Ball { .. } => "ball",
            BodyKind::Ellipsoid { .. } => "ellipsoid",
            BodyKind::LpBall { .. } => "lp_ball",
            BodyKind::Box { .. } => "box",
            BodyKind::CrossPolytope { .. } => "cross_polytope",
            BodyKind::HPolytope { .. } => "h_polytope",
        }
    }
}

/// A body with its flags and, for polytopes of dimension ≤ 4, the vertex and
/// facet structure. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BodyJson", into = "BodyJson")]
pub struct BodySpec {
    pub dim: usize,
    pub kind: BodyKind,
    pub symmetric: bool,
    pub smooth: bool,
    poly: Option<Arc<Polytope>>,
}

impl PartialEq for BodySpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind
    }
}

/// Point on the boundary hit by the ray through `u`, its outer unit normal and
/// the area Jacobian `J(u)` with `∫_{∂K} f dH = ∫_S f(ρ(u)u) J(u) du`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryElement {
    pub point: Vec<f64>,
    pub normal: Vec<f64>,
    pub jacobian: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    pub inner: f64,
    pub outer: f64,
}

const RIDGE_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-5;
const PERTURB: f64 = 1e-9;

fn positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be positive and finite, got {x}")))
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Index of the largest value and whether the runner-up ties it.
fn argmax_with_tie(values: impl Iterator<Item = f64>) -> (usize, bool) {
    let mut best = (0, f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best.1 {
            second = best.1;
            best = (i, v);
        } else if v > second {
            second = v;
        }
    }
    let tie = second > -f64::INFINITY && best.1 - second <= RIDGE_TOL * best.1.abs().max(1e-300);
    (best.0, tie)
}

impl BodySpec {
    pub fn new(dim: usize, kind: BodyKind) -> Result<Self> {
        if dim < 2 {
            return Err(invalid(format!("dimension must be >= 2, got {dim}")));
        }
        let (symmetric, smooth) = match &kind {
            BodyKind::Ball { radius } => {
                positive(*radius, "radius")?;
                (true, true)
            }
            BodyKind::Ellipsoid { semi_axes } => {
                if semi_axes.len() != dim {
                    return Err(invalid("semi_axes length differs from dim"));
                }
                for a in semi_axes {
                    positive(*a, "semi-axis")?;
                }
                (true, true)
            }
            BodyKind::LpBall { p, scale } => {
                positive(*scale, "scale")?;
                if p.is_nan() || *p < 1.0 {
                    return Err(invalid(format!("p must lie in [1, inf], got {p}")));
                }
                (true, *p > 1.0 && p.is_finite())
            }
            BodyKind::Box { half_widths } => {
                if half_widths.len() != dim {
                    return Err(invalid("half_widths length differs from dim"));
                }
                for w in half_widths {
                    positive(*w, "half-width")?;
                }
                (true, false)
            }
            BodyKind::CrossPolytope { scale } => {
                positive(*scale, "scale")?;
                (true, false)
            }
            BodyKind::HPolytope { normals, offsets } => {
                if normals.len() != offsets.len() || normals.is_empty() {
                    return Err(invalid("normals and offsets must be non-empty and equal in length"));
                }
                for (a, b) in normals.iter().zip(offsets) {
                    if a.len() != dim {
                        return Err(invalid("facet normal has wrong dimension"));
                    }
                    if norm(a) == 0.0 {
                        return Err(invalid("zero facet normal"));
                    }
                    if !(b.is_finite() && *b > 0.0) {
                        return Err(GeomError::InvariantViolation(
                            "h_polytope offsets must be positive (origin interior)".into(),
                        ));
                    }
                }
                let symmetric = normals.iter().zip(offsets).all(|(a, b)| {
                    let na = norm(a);
                    normals.iter().zip(offsets).any(|(c, d)| {
                        let nc = norm(c);
                        norm(&sub(&scale(a, 1.0 / na), &scale(c, -1.0 / nc))) < 1e-12
                            && (b / na - d / nc).abs() <= 1e-12 * (b / na)
                    })
                });
                (symmetric, false)
            }
        };
        let mut body = Self {
            dim,
            kind,
            symmetric,
            smooth,
            poly: None,
        };
        if let Some(h) = body.hrep() {
            if dim <= MAX_POLY_DIM {
                if matches!(body.kind, BodyKind::HPolytope { .. }) {
                    body.check_bounded(&h)?;
                }
                body.poly = Some(Arc::new(Polytope::from_hrep(h)?));
            } else if matches!(body.kind, BodyKind::HPolytope { .. }) {
                body.check_bounded_sampled()?;
            }
        }
        Ok(body)
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(dim, BodyKind::Ball { radius })
    }

    pub fn ellipsoid(semi_axes: Vec<f64>) -> Result<Self> {
        Self::new(semi_axes.len(), BodyKind::Ellipsoid { semi_axes })
    }

    pub fn lp_ball(dim: usize, p: f64, scale: f64) -> Result<Self> {
        Self::new(dim, BodyKind::LpBall { p, scale })
    }

    pub fn cuboid(half_widths: Vec<f64>) -> Result<Self> {
        Self::new(half_widths.len(), BodyKind::Box { half_widths })
    }

    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::cuboid(vec![half_width; dim])
    }

    pub fn cross_polytope(dim: usize, scale: f64) -> Result<Self> {
        Self::new(dim, BodyKind::CrossPolytope { scale })
    }

    pub fn h_polytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        let dim = normals.first().map(|a| a.len()).unwrap_or(0);
        Self::new(dim, BodyKind::HPolytope { normals, offsets })
    }

    fn check_bounded(&self, h: &HRep) -> Result<()> {
        let big = 1e6 * h.offsets.iter().fold(1.0_f64, |m, b| m.max(*b));
        let mut normals = h.normals.clone();
        let mut offsets = h.offsets.clone();
        for i in 0..self.dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; self.dim];
                e[i] = s;
                normals.push(e);
                offsets.push(big);
            }
        }
        let p = Polytope::from_hrep(HRep::new(self.dim, normals, offsets)?)?;
        if p.vertices.iter().any(|v| v.iter().any(|c| c.abs() > 0.5 * big)) {
            return Err(GeomError::InvariantViolation("h_polytope is unbounded".into()));
        }
        Ok(())
    }

    fn check_bounded_sampled(&self) -> Result<()> {
        let rule = crate::quadrature::sphere_rule(self.dim, 1, 1)?;
        if rule.nodes.iter().any(|u| !self.gauge(u).is_finite() || self.gauge(u) <= 0.0) {
            return Err(GeomError::InvariantViolation("h_polytope is unbounded".into()));
        }
        Ok(())
    }

    /// Polytope structure (vertices, facets) when the body is a polytope of
    /// dimension ≤ 4.
    pub fn polytope(&self) -> Option<&Polytope> {
        self.poly.as_deref()
    }

    pub fn is_polytope(&self) -> bool {
        match &self.kind {
            BodyKind::Box { .. } | BodyKind::CrossPolytope { .. } | BodyKind::HPolytope { .. } => true,
            BodyKind::LpBall { p, .. } => *p == 1.0 || p.is_infinite(),
            _ => false,
        }
    }

    /// Facet description for polytope kinds. Cross-polytopes have `2^n` facets.
    pub fn hrep(&self) -> Option<HRep> {
        let n = self.dim;
        let cube = |w: &[f64]| {
            let mut normals = Vec::with_capacity(2 * n);
            let mut offsets = Vec::with_capacity(2 * n);
            for (i, wi) in w.iter().enumerate() {
                for s in [1.0, -1.0] {
                    let mut a = vec![0.0; n];
                    a[i] = s;
                    normals.push(a);
                    offsets.push(*wi);
                }
            }
            HRep::new(n, normals, offsets).ok()
        };
        let cross = |s: f64| {
            if n > 16 {
                return None;
            }
            let normals: Vec<Vec<f64>> = (0..1usize << n)
                .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect();
            let offsets = vec![s; normals.len()];
            HRep::new(n, normals, offsets).ok()
        };
        match &self.kind {
            BodyKind::Box { half_widths } => cube(half_widths),
            BodyKind::CrossPolytope { scale } => cross(*scale),
            BodyKind::LpBall { p, scale } if p.is_infinite() => cube(&vec![*scale; n]),
            BodyKind::LpBall { p, scale } if *p == 1.0 => cross(*scale),
            BodyKind::HPolytope { normals, offsets } => HRep::new(n, normals.clone(), offsets.clone()).ok(),
            _ => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(invalid(format!("vector of length {} for a body of dim {}", x.len(), self.dim)));
        }
        Ok(())
    }

    fn check_unit(&self, u: &[f64]) -> Result<()> {
        self.check_dim(u)?;
        if (norm(u) - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("direction is not a unit vector (|u| = {})", norm(u))));
        }
        Ok(())
    }

    /// Minkowski functional `‖x‖_K`. Infinite only for unbounded directions,
    /// which validated bodies do not have.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => norm(x) / radius,
            BodyKind::Ellipsoid { semi_axes } => x
                .iter()
                .zip(semi_axes)
                .map(|(v, a)| (v / a).powi(2))
                .sum::<f64>()
                .sqrt(),
            BodyKind::LpBall { p, scale } => lp_norm(x, *p) / scale,
            BodyKind::Box { half_widths } => x
                .iter()
                .zip(half_widths)
                .fold(0.0_f64, |m, (v, w)| m.max(v.abs() / w)),
            BodyKind::CrossPolytope { scale } => x.iter().map(|v| v.abs()).sum::<f64>() / scale,
            BodyKind::HPolytope { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .fold(0.0_f64, |m, (a, b)| m.max(dot(a, x) / b)),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Radial function `ρ_K(u)` for a unit vector `u`.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        self.check_unit(u)?;
        let g = self.gauge(u);
        if !(g > 0.0 && g.is_finite()) {
            return Err(GeomError::InvariantViolation("origin is not interior".into()));
        }
        Ok(1.0 / g)
    }

    /// `ρ_K(x/|x|)·|x|`-style radial value without the unit check.
    pub(crate) fn radial_unchecked(&self, u: &[f64]) -> f64 {
        1.0 / self.gauge(u)
    }

    /// Support function `h_K(u) = max_{x ∈ K} ⟨u, x⟩` (any `u`, 1-homogeneous).
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        Ok(match &self.kind {
            BodyKind::Ball { radius } => radius * norm(u),
            BodyKind::Ellipsoid { semi_axes } => u
                .iter()
                .zip(semi_axes)
                .map(|(v, a)| (v * a).powi(2))
                .sum::<f64>()
                .sqrt(),
            BodyKind::LpBall { p, scale } => {
                let q = if *p == 1.0 {
                    f64::INFINITY
                } else if p.is_infinite() {
                    1.0
                } else {
                    p / (p - 1.0)
                };
                scale * lp_norm(u, q)
            }
            BodyKind::Box { half_widths } => u.iter().zip(half_widths).map(|(v, w)| v.abs() * w).sum(),
            BodyKind::CrossPolytope { scale } => scale * u.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            BodyKind::HPolytope { .. } => {
                let p = self.poly.as_ref().ok_or_else(|| {
                    unsupported("h_polytope support needs vertex enumeration (dimension <= 4)")
                })?;
                p.vertices.iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
            }
        })
    }

    /// A point of `K` attaining `h_K(u)`.
    pub fn support_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(u)?;
        let n = self.dim;
        let sgn = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
        let cross_point = |s: f64| {
            let (j, _) = argmax_with_tie(u.iter().map(|v| v.abs()));
            let mut x = vec![0.0; n];
            x[j] = s * sgn(u[j]);
            x
        };
        Ok(match &self.kind {
            BodyKind::Ball { radius } => match normalized(u) {
                Some(d) => scale(&d, *radius),
                None => vec![0.0; n],
            },
            BodyKind::Ellipsoid { semi_axes } => {
                let h = self.support(u)?;
                if h == 0.0 {
                    return Ok(vec![0.0; n]);
                }
                u.iter().zip(semi_axes).map(|(v, a)| a * a * v / h).collect()
            }
            BodyKind::LpBall { p, scale: s } => {
                if *p == 1.0 {
                    cross_point(*s)
                } else if p.is_infinite() {
                    u.iter().map(|v| s * sgn(*v)).collect()
                } else {
                    let q = p / (p - 1.0);
                    let nq = lp_norm(u, q);
                    if nq == 0.0 {
                        return Ok(vec![0.0; n]);
                    }
                    u.iter()
                        .map(|v| s * sgn(*v) * (v.abs() / nq).powf(q - 1.0))
                        .collect()
                }
            }
            BodyKind::Box { half_widths } => u.iter().zip(half_widths).map(|(v, w)| w * sgn(*v)).collect(),
            BodyKind::CrossPolytope { scale: s } => cross_point(*s),
            BodyKind::HPolytope { .. } => {
                let p = self
                    .poly
                    .as_ref()
                    .ok_or_else(|| unsupported("h_polytope support point needs dimension <= 4"))?;
                let (j, _) = argmax_with_tie(p.vertices.iter().map(|v| dot(v, u)));
                p.vertices[j].clone()
            }
        })
    }

    /// Gradient of the gauge at `x ≠ 0`; `Err(Ridge)` where it is not unique.
    pub fn gauge_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let n = self.dim;
        let g = self.gauge(x);
        let box_grad = |w: &dyn Fn(usize) -> f64| -> Result<Vec<f64>> {
            let (j, tie) = argmax_with_tie((0..n).map(|i| x[i].abs() / w(i)));
            if tie {
                return Err(GeomError::Ridge);
            }
            let mut d = vec![0.0; n];
            d[j] = x[j].signum() / w(j);
            Ok(d)
        };
        let cross_grad = |s: f64| -> Result<Vec<f64>> {
            let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if x.iter().any(|v| v.abs() <= RIDGE_TOL * m) {
                return Err(GeomError::Ridge);
            }
            Ok(x.iter().map(|v| v.signum() / s).collect())
        };
        match &self.kind {
            BodyKind::Ball { radius } => Ok(scale(x, 1.0 / (radius * norm(x)))),
            BodyKind::Ellipsoid { semi_axes } => Ok(x
                .iter()
                .zip(semi_axes)
                .map(|(v, a)| v / (a * a * g))
                .collect()),
            BodyKind::LpBall { p, scale: s } => {
                if p.is_infinite() {
                    box_grad(&|_| *s)
                } else if *p == 1.0 {
                    cross_grad(*s)
                } else {
                    let np = lp_norm(x, *p);
                    Ok(x.iter()
                        .map(|v| v.signum() * (v.abs() / np).powf(p - 1.0) / s)
                        .collect())
                }
            }
            BodyKind::Box { half_widths } => box_grad(&|i| half_widths[i]),
            BodyKind::CrossPolytope { scale: s } => cross_grad(*s),
            BodyKind::HPolytope { normals, offsets } => {
                let (j, tie) = argmax_with_tie(normals.iter().zip(offsets).map(|(a, b)| dot(a, x) / b));
                if tie {
                    return Err(GeomError::Ridge);
                }
                Ok(scale(&normals[j], 1.0 / offsets[j]))
            }
        }
    }

    /// Outer unit normal at a boundary point (or the normal of the level set
    /// of the gauge through `x`).
    pub fn normal_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let grad = self.gauge_gradient(x)?;
        normalized(&grad).ok_or_else(|| GeomError::Numerical("vanishing gauge gradient".into()))
    }

    /// Analytic boundary element through the direction `u`.
    pub fn boundary_element(&self, u: &[f64]) -> Result<BoundaryElement> {
        let rho = self.radial(u)?;
        let point = scale(u, rho);
        let normal = self.normal_at(&point)?;
        let cos = dot(u, &normal);
        Ok(BoundaryElement {
            jacobian: rho.powi(self.dim as i32 - 1) / cos,
            point,
            normal,
        })
    }

    /// Boundary element from the spherical gradient of `ρ` by central
    /// differences on the tangent chart at `u`.
    pub fn boundary_element_fd(&self, u: &[f64]) -> Result<BoundaryElement> {
        let rho = self.radial(u)?;
        let n = self.dim;
        let frame = complete_basis(&[u.to_vec()], n);
        let mut grad = vec![0.0; n];
        for e in &frame[1..] {
            let plus = normalized(&crate::linalg::axpy(u, FD_STEP, e)).unwrap();
            let minus = normalized(&crate::linalg::axpy(u, -FD_STEP, e)).unwrap();
            // the chart u + h e has |u + h e| = sqrt(1 + h²); the angle is atan(h)
            let d = (self.radial_unchecked(&plus) - self.radial_unchecked(&minus)) / (2.0 * FD_STEP.atan());
            for (g, ei) in grad.iter_mut().zip(e) {
                *g += d * ei;
            }
        }
        let point = scale(u, rho);
        let normal = normalized(&sub(&point, &grad))
            .ok_or_else(|| GeomError::Numerical("degenerate finite-difference normal".into()))?;
        let g2 = dot(&grad, &grad);
        Ok(BoundaryElement {
            jacobian: rho.powi(n as i32 - 2) * (rho * rho + g2).sqrt(),
            point,
            normal,
        })
    }

    /// Like [`boundary_element`](Self::boundary_element), but ridge hits are
    /// resolved by moving `u` by `1e-9` along fixed tangent directions. The
    /// returned element belongs to the perturbed direction.
    pub fn boundary_element_resolved(&self, u: &[f64]) -> Result<BoundaryElement> {
        match self.boundary_element(u) {
            Err(GeomError::Ridge) => {}
            other => return other,
        }
        let frame = complete_basis(&[u.to_vec()], self.dim);
        for (k, e) in frame[1..].iter().enumerate() {
            let step = PERTURB * (k + 1) as f64;
            let v = normalized(&crate::linalg::axpy(u, step, e)).unwrap();
            match self.boundary_element(&v) {
                Err(GeomError::Ridge) => continue,
                other => return other,
            }
        }
        // every single-tangent move stays on a ridge: combine all of them
        let mut v = u.to_vec();
        for (k, e) in frame[1..].iter().enumerate() {
            v = crate::linalg::axpy(&v, PERTURB * (k as f64 + 1.7), e);
        }
        self.boundary_element(&normalized(&v).unwrap())
    }

    /// Centered inradius and circumradius: `min ρ` and `max ρ` over the sphere.
    pub fn radii(&self) -> Radii {
        let n = self.dim as f64;
        match &self.kind {
            BodyKind::Ball { radius } => Radii {
                inner: *radius,
                outer: *radius,
            },
            BodyKind::Ellipsoid { semi_axes } => Radii {
                inner: semi_axes.iter().copied().fold(f64::INFINITY, f64::min),
                outer: semi_axes.iter().copied().fold(0.0, f64::max),
            },
            BodyKind::LpBall { p, scale } => {
                let f = n.powf(0.5 - 1.0 / p);
                Radii {
                    inner: scale * f.min(1.0),
                    outer: scale * f.max(1.0),
                }
            }
            BodyKind::Box { half_widths } => Radii {
                inner: half_widths.iter().copied().fold(f64::INFINITY, f64::min),
                outer: norm(half_widths),
            },
            BodyKind::CrossPolytope { scale } => Radii {
                inner: scale / n.sqrt(),
                outer: *scale,
            },
            BodyKind::HPolytope { normals, offsets } => {
                let inner = normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| b / norm(a))
                    .fold(f64::INFINITY, f64::min);
                let outer = match &self.poly {
                    Some(p) => p.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max),
                    None => self.scan_outer_radius(),
                };
                Radii { inner, outer }
            }
        }
    }

    /// `max ρ` by a sphere scan followed by pattern-search refinement of the
    /// best few nodes; relative accuracy about 1e-4 or better.
    fn scan_outer_radius(&self) -> f64 {
        let rule = match crate::quadrature::sphere_rule(self.dim, 2, 7) {
            Ok(r) => r,
            Err(_) => return f64::NAN,
        };
        let mut scored: Vec<(f64, &Vec<f64>)> = rule.nodes.iter().map(|u| (self.radial_unchecked(u), u)).collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = scored[0].0;
        for (r0, u0) in scored.iter().take(8) {
            let mut u = (*u0).clone();
            let mut r = *r0;
            let mut step = 0.05;
            let basis = complete_basis(&[], self.dim);
            while step > 1e-9 {
                let mut improved = false;
                for e in &basis {
                    for s in [step, -step] {
                        let v = normalized(&crate::linalg::axpy(&u, s, e)).unwrap();
                        let rv = self.radial_unchecked(&v);
                        if rv > r {
                            r = rv;
                            u = v;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best = best.max(r);
        }
        best
    }

    /// The affine image in John's position for kinds whose John ellipsoid is
    /// the largest inscribed centered ball after a diagonal map.
    pub fn john_normalize(&self) -> Result<BodySpec> {
        let n = self.dim;
        match &self.kind {
            BodyKind::Ball { .. } | BodyKind::Ellipsoid { .. } => BodySpec::ball(n, 1.0),
            BodyKind::Box { .. } => BodySpec::cube(n, 1.0),
            BodyKind::CrossPolytope { .. } => BodySpec::cross_polytope(n, (n as f64).sqrt()),
            BodyKind::LpBall { p, scale } => {
                let r = self.radii().inner;
                BodySpec::lp_ball(n, *p, scale / r)
            }
            BodyKind::HPolytope { .. } => Err(unsupported(
                "John position of a general polytope is not computed",
            )),
        }
    }

    /// `tK` for `t > 0`.
    pub fn dilate(&self, t: f64) -> Result<BodySpec> {
        positive(t, "dilation factor")?;
        let kind = match &self.kind {
            BodyKind::Ball { radius } => BodyKind::Ball { radius: radius * t },
            BodyKind::Ellipsoid { semi_axes } => BodyKind::Ellipsoid {
                semi_axes: scale(semi_axes, t),
            },
            BodyKind::LpBall { p, scale: s } => BodyKind::LpBall { p: *p, scale: s * t },
            BodyKind::Box { half_widths } => BodyKind::Box {
                half_widths: scale(half_widths, t),
            },
            BodyKind::CrossPolytope { scale: s } => BodyKind::CrossPolytope { scale: s * t },
            BodyKind::HPolytope { normals, offsets } => BodyKind::HPolytope {
                normals: normals.clone(),
                offsets: scale(offsets, t),
            },
        };
        BodySpec::new(self.dim, kind)
    }

    /// If `other = c·self` for some `c > 0`, returns `c`.
    pub fn homothety_ratio(&self, other: &BodySpec) -> Option<f64> {
        if self.dim != other.dim {
            return None;
        }
        let ratio_vec = |a: &[f64], b: &[f64]| -> Option<f64> {
            let c = b[0] / a[0];
            a.iter()
                .zip(b)
                .all(|(x, y)| (y / x - c).abs() <= 1e-12 * c)
                .then_some(c)
        };
        match (&self.kind, &other.kind) {
            (BodyKind::Ball { radius: a }, BodyKind::Ball { radius: b }) => Some(b / a),
            (BodyKind::Ellipsoid { semi_axes: a }, BodyKind::Ellipsoid { semi_axes: b }) => ratio_vec(a, b),
            (BodyKind::LpBall { p: p1, scale: a }, BodyKind::LpBall { p: p2, scale: b }) if p1 == p2 => Some(b / a),
            (BodyKind::Box { half_widths: a }, BodyKind::Box { half_widths: b }) => ratio_vec(a, b),
            (BodyKind::CrossPolytope { scale: a }, BodyKind::CrossPolytope { scale: b }) => Some(b / a),
            (
                BodyKind::HPolytope { normals: na, offsets: a },
                BodyKind::HPolytope { normals: nb, offsets: b },
            ) if na == nb => ratio_vec(a, b),
            _ => None,
        }
    }

    /// `λ·self + (1 − λ)·other` when the sum stays in the catalog: two balls,
    /// two boxes, or homothetic bodies of the same kind.
    pub fn minkowski_combination(&self, other: &BodySpec, lambda: f64) -> Result<BodySpec> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(invalid(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        if self.dim != other.dim {
            return Err(invalid("bodies of different dimension"));
        }
        let mu = 1.0 - lambda;
        if let (BodyKind::Box { half_widths: a }, BodyKind::Box { half_widths: b }) = (&self.kind, &other.kind) {
            let w = a.iter().zip(b).map(|(x, y)| lambda * x + mu * y).collect();
            return BodySpec::cuboid(w);
        }
        match self.homothety_ratio(other) {
            Some(c) => self.dilate(lambda + mu * c),
            None => Err(unsupported(format!(
                "Minkowski combination of {} and {} is not in the catalog",
                self.kind.name(),
                other.kind.name()
            ))),
        }
    }

    /// Largest `t ≥ 0` with `c + t v ∈ K`, for `c ∈ K`.
    pub fn line_exit(&self, c: &[f64], v: &[f64]) -> Result<f64> {
        self.check_dim(c)?;
        self.check_dim(v)?;
        if self.gauge(c) > 1.0 + 1e-12 {
            return Err(invalid("line_exit start point lies outside the body"));
        }
        let quad = |w: &[f64]| {
            // Σ ((c_i + t v_i)/w_i)² = 1
            let a: f64 = v.iter().zip(w).map(|(vi, wi)| (vi / wi).powi(2)).sum();
            let b: f64 = c.iter().zip(v).zip(w).map(|((ci, vi), wi)| ci * vi / (wi * wi)).sum();
            let cc: f64 = c.iter().zip(w).map(|(ci, wi)| (ci / wi).powi(2)).sum::<f64>() - 1.0;
            if a == 0.0 {
                return f64::INFINITY;
            }
            let disc = (b * b - a * cc).max(0.0).sqrt();
            // larger root, written to avoid cancellation
            if b >= 0.0 {
                -cc / (b + disc)
            } else {
                (disc - b) / a
            }
        };
        let linear = |normals: &[Vec<f64>], offsets: &[f64]| {
            normals
                .iter()
                .zip(offsets)
                .filter_map(|(a, b)| {
                    let av = dot(a, v);
                    (av > 0.0).then(|| ((b - dot(a, c)) / av).max(0.0))
                })
                .fold(f64::INFINITY, f64::min)
        };
        let t = match &self.kind {
            BodyKind::Ball { radius } => quad(&vec![*radius; self.dim]),
            BodyKind::Ellipsoid { semi_axes } => quad(semi_axes),
            BodyKind::Box { half_widths } => c
                .iter()
                .zip(v)
                .zip(half_widths)
                .filter(|&((_ci, vi), _w)| *vi != 0.0).map(|((ci, vi), w)| ((w * vi.signum() - ci) / vi).max(0.0))
                .fold(f64::INFINITY, f64::min),
            BodyKind::HPolytope { normals, offsets } => linear(normals, offsets),
            _ => self.gauge_root(c, v),
        };
        if !t.is_finite() {
            return Err(invalid("direction vector is zero"));
        }
        Ok(t)
    }

    /// Root of `‖c + t v‖_K = 1` for `t ≥ 0` by Newton iteration from above
    /// (monotone for convex gauges) with a bisection safeguard.
    fn gauge_root(&self, c: &[f64], v: &[f64]) -> f64 {
        let f = |t: f64| self.gauge(&crate::linalg::axpy(c, t, v)) - 1.0;
        if norm(v) == 0.0 {
            return f64::INFINITY;
        }
        let mut lo = 0.0;
        let mut hi = self.radii().outer / norm(v) + norm(c) / norm(v);
        while f(hi) <= 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        let mut t = hi;
        for _ in 0..200 {
            let x = crate::linalg::axpy(c, t, v);
            let ft = self.gauge(&x) - 1.0;
            if ft <= 0.0 {
                lo = lo.max(t);
                break;
            }
            hi = t;
            let slope = self.directional_gauge(&x, v);
            let next = if slope > 0.0 { t - ft / slope } else { 0.5 * (lo + hi) };
            let next = if next <= lo || next >= hi { 0.5 * (lo + hi) } else { next };
            if (t - next).abs() <= 1e-15 * t.abs().max(1e-300) {
                t = next;
                break;
            }
            t = next;
        }
        // finish with bisection on the bracket for kinks where Newton stalls
        if f(t) > 1e-13 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            return 0.5 * (lo + hi);
        }
        t
    }

    /// Right derivative of the gauge at `x` along `v` (a subgradient value on
    /// kinks, which keeps Newton-from-above monotone).
    fn directional_gauge(&self, x: &[f64], v: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::CrossPolytope { scale: s } => {
                x.iter()
                    .zip(v)
                    .map(|(xi, vi)| if *xi == 0.0 { vi.abs() } else { xi.signum() * vi })
                    .sum::<f64>()
                    / s
            }
            BodyKind::LpBall { p, scale: s } if *p == 1.0 => {
                x.iter()
                    .zip(v)
                    .map(|(xi, vi)| if *xi == 0.0 { vi.abs() } else { xi.signum() * vi })
                    .sum::<f64>()
                    / s
            }
            _ => match self.gauge_gradient(x) {
                Ok(g) => dot(&g, v),
                Err(_) => {
                    let h = 1e-9 * norm(x).max(1e-300) / norm(v).max(1e-300);
                    (self.gauge(&crate::linalg::axpy(x, h, v)) - self.gauge(x)) / h
                }
            },
        }
    }

    /// `{s : y + sθ ∈ K}` as `(s_min, s_max)`, or `None` if the line misses `K`.
    pub fn chord(&self, y: &[f64], theta: &[f64]) -> Result<Option<(f64, f64)>> {
        self.check_dim(y)?;
        self.check_dim(theta)?;
        let quad = |w: &[f64]| {
            let a: f64 = theta.iter().zip(w).map(|(v, wi)| (v / wi).powi(2)).sum();
            let b: f64 = y.iter().zip(theta).zip(w).map(|((c, v), wi)| c * v / (wi * wi)).sum();
            let c: f64 = y.iter().zip(w).map(|(c, wi)| (c / wi).powi(2)).sum::<f64>() - 1.0;
            let disc = b * b - a * c;
            if disc < 0.0 {
                return None;
            }
            let d = disc.sqrt();
            Some(((-b - d) / a, (-b + d) / a))
        };
        let linear = |normals: &[Vec<f64>], offsets: &[f64]| {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (a, b) in normals.iter().zip(offsets) {
                let at = dot(a, theta);
                let slack = b - dot(a, y);
                if at.abs() < 1e-300 {
                    if slack < 0.0 {
                        return None;
                    }
                } else if at > 0.0 {
                    hi = hi.min(slack / at);
                } else {
                    lo = lo.max(slack / at);
                }
            }
            (lo <= hi).then_some((lo, hi))
        };
        Ok(match &self.kind {
            BodyKind::Ball { radius } => quad(&vec![*radius; self.dim]),
            BodyKind::Ellipsoid { semi_axes } => quad(semi_axes),
            BodyKind::Box { half_widths } => {
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for ((c, v), w) in y.iter().zip(theta).zip(half_widths) {
                    if v.abs() < 1e-300 {
                        if c.abs() > *w {
                            return Ok(None);
                        }
                    } else {
                        let a = (-w - c) / v;
                        let b = (w - c) / v;
                        lo = lo.max(a.min(b));
                        hi = hi.min(a.max(b));
                    }
                }
                (lo <= hi).then_some((lo, hi))
            }
            BodyKind::HPolytope { normals, offsets } => linear(normals, offsets),
            _ => {
                // convex in s: golden-section minimum, then exits on both sides
                let d = (norm(y) + self.radii().outer) / norm(theta);
                let g = |s: f64| self.gauge(&crate::linalg::axpy(y, s, theta));
                let (mut a, mut b) = (-d, d);
                let r = 0.5 * (5f64.sqrt() - 1.0);
                let mut x1 = b - r * (b - a);
                let mut x2 = a + r * (b - a);
                let (mut f1, mut f2) = (g(x1), g(x2));
                for _ in 0..200 {
                    if f1 <= 1.0 || f2 <= 1.0 || b - a < 1e-14 * d {
                        break;
                    }
                    if f1 < f2 {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - r * (b - a);
                        f1 = g(x1);
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + r * (b - a);
                        f2 = g(x2);
                    }
                }
                let s0 = if f1 <= f2 { x1 } else { x2 };
                if g(s0) > 1.0 {
                    None
                } else {
                    let c = crate::linalg::axpy(y, s0, theta);
                    let up = self.line_exit(&c, theta)?;
                    let down = self.line_exit(&c, &scale(theta, -1.0))?;
                    Some((s0 - down, s0 + up))
                }
            }
        })
    }

    /// Euclidean distance from `x` to `K` (zero inside).
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if self.gauge(x) <= 1.0 {
            return Ok(0.0);
        }
        Ok(match &self.kind {
            BodyKind::Ball { radius } => norm(x) - radius,
            BodyKind::Box { half_widths } => box_distance(x, half_widths),
            BodyKind::Ellipsoid { semi_axes } => ellipsoid_distance(x, semi_axes),
            BodyKind::CrossPolytope { scale } => l1_ball_distance(x, *scale),
            BodyKind::LpBall { p, scale } => {
                if p.is_infinite() {
                    box_distance(x, &vec![*scale; self.dim])
                } else if *p == 1.0 {
                    l1_ball_distance(x, *scale)
                } else {
                    lp_ball_distance(x, *p, *scale)
                }
            }
            BodyKind::HPolytope { .. } => {
                let p = self
                    .poly
                    .as_ref()
                    .ok_or_else(|| unsupported("h_polytope distance needs dimension <= 4"))?;
                let shifted: Vec<Vec<f64>> = p.vertices.iter().map(|v| sub(v, x)).collect();
                norm(&min_norm_point(&shifted))
            }
        })
    }

    /// Per-coordinate bounds `[−h(−e_i), h(e_i)]`.
    pub fn bounding_box(&self) -> Result<Vec<(f64, f64)>> {
        (0..self.dim)
            .map(|i| {
                let e = crate::linalg::basis_vector(self.dim, i);
                Ok((-self.support(&scale(&e, -1.0))?, self.support(&e)?))
            })
            .collect()
    }

    pub fn params_json(&self) -> Value {
        match &self.kind {
            BodyKind::Ball { radius } => json!({ "radius": radius }),
            BodyKind::Ellipsoid { semi_axes } => json!({ "semi_axes": semi_axes }),
            BodyKind::LpBall { p, scale } => {
                let pv = if p.is_infinite() { json!("inf") } else { json!(p) };
                json!({ "p": pv, "scale": scale })
            }
            BodyKind::Box { half_widths } => json!({ "half_widths": half_widths }),
            BodyKind::CrossPolytope { scale } => json!({ "scale": scale }),
            BodyKind::HPolytope { normals, offsets } => json!({ "normals": normals, "offsets": offsets }),
        }
    }
}

fn box_distance(x: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .zip(w)
        .map(|(v, wi)| (v.abs() - wi).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Distance to `{Σ (y_i/a_i)² ≤ 1}` for `x` outside: the nearest point is
/// `y_i = a_i² x_i / (a_i² + λ)` with `λ > 0` the root of a decreasing function.
fn ellipsoid_distance(x: &[f64], a: &[f64]) -> f64 {
    let phi = |l: f64| -> f64 {
        x.iter()
            .zip(a)
            .map(|(xi, ai)| (ai * xi / (ai * ai + l)).powi(2))
            .sum::<f64>()
            - 1.0
    };
    let mut lo = 0.0;
    let mut hi = a.iter().fold(0.0_f64, |m, ai| m.max(ai * ai)).max(1e-300);
    while phi(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let l = 0.5 * (lo + hi);
    x.iter()
        .zip(a)
        .map(|(xi, ai)| (xi - ai * ai * xi / (ai * ai + l)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Distance to the l1 ball of radius `s` via the sorting projection.
fn l1_ball_distance(x: &[f64], s: f64) -> f64 {
    let mut m: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, mj) in m.iter().enumerate() {
        cum += mj;
        let t = (cum - s) / (j + 1) as f64;
        if *mj > t {
            tau = t;
        } else {
            break;
        }
    }
    x.iter()
        .map(|v| (v.abs() - (v.abs() - tau).max(0.0)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Distance to the lp ball (`1 < p < ∞`) from the KKT system
/// `z_i + λ p z_i^{p−1} = |x_i|`, `Σ z_i^p = s^p`.
fn lp_ball_distance(x: &[f64], p: f64, s: f64) -> f64 {
    let a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let z_of = |l: f64| -> Vec<f64> {
        a.iter()
            .map(|&ai| {
                if ai == 0.0 {
                    return 0.0;
                }
                // φ(z) = z + λ p z^{p−1} − a is increasing on [0, a]
                let phi = |z: f64| z + l * p * z.powf(p - 1.0) - ai;
                let (mut lo, mut hi) = (0.0, ai);
                let mut z = ai / (1.0 + l * p * ai.powf(p - 2.0)).max(1.0);
                for _ in 0..100 {
                    let f = phi(z);
                    if f > 0.0 {
                        hi = z;
                    } else {
                        lo = z;
                    }
                    let d = 1.0 + l * p * (p - 1.0) * z.powf(p - 2.0);
                    let mut next = z - f / d;
                    if !(next > lo && next < hi) || !next.is_finite() {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - z).abs() <= 1e-16 * ai {
                        z = next;
                        break;
                    }
                    z = next;
                }
                z
            })
            .collect()
    };
    let excess = |l: f64| -> f64 { lp_norm(&z_of(l), p) - s };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while excess(hi) > 0.0 {
        lo = hi;
        hi *= 4.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let z = z_of(0.5 * (lo + hi));
    a.iter()
        .zip(&z)
        .map(|(ai, zi)| (ai - zi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Wire form of a body: `{"kind": ..., "dim": n, "params": {...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyJson {
    pub kind: String,
    pub dim: usize,
    pub params: Value,
}

fn get_f64(params: &Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| invalid(format!("missing numeric parameter '{key}'")))
}

fn get_vec(params: &Value, key: &str) -> Result<Vec<f64>> {
    serde_json::from_value(params.get(key).cloned().unwrap_or(Value::Null))
        .map_err(|_| invalid(format!("parameter '{key}' must be an array of numbers")))
}

impl TryFrom<BodyJson> for BodySpec {
    type Error = GeomError;

    fn try_from(j: BodyJson) -> Result<Self> {
        let p = &j.params;
        let n = j.dim;
        let check_len = |v: Vec<f64>| -> Result<Vec<f64>> {
            if v.len() != n {
                return Err(invalid(format!("expected {n} entries, got {}", v.len())));
            }
            Ok(v)
        };
        let kind = match j.kind.as_str() {
            "ball" => BodyKind::Ball {
                radius: get_f64(p, "radius")?,
            },
            "ellipsoid" => BodyKind::Ellipsoid {
                semi_axes: check_len(get_vec(p, "semi_axes")?)?,
            },
            "lp_ball" => {
                let pv = match p.get("p") {
                    Some(Value::String(s)) if s == "inf" => f64::INFINITY,
                    Some(v) => v.as_f64().ok_or_else(|| invalid("p must be a number or \"inf\""))?,
                    None => return Err(invalid("missing parameter 'p'")),
                };
                BodyKind::LpBall {
                    p: pv,
                    scale: get_f64(p, "scale")?,
                }
            }
            "box" => BodyKind::Box {
                half_widths: check_len(get_vec(p, "half_widths")?)?,
            },
            "cross_polytope" => BodyKind::CrossPolytope {
                scale: get_f64(p, "scale")?,
            },
            "h_polytope" => {
                let normals: Vec<Vec<f64>> = serde_json::from_value(p.get("normals").cloned().unwrap_or(Value::Null))
                    .map_err(|_| invalid("parameter 'normals' must be an array of arrays"))?;
                BodyKind::HPolytope {
                    normals,
                    offsets: get_vec(p, "offsets")?,
                }
            }
            other => return Err(invalid(format!("unknown body kind '{other}'"))),
        };
        BodySpec::new(n, kind)
    }
}

impl From<BodySpec> for BodyJson {
    fn from(b: BodySpec) -> Self {
        BodyJson {
            kind: b.kind.name().to_string(),
            dim: b.dim,
            params: b.params_json(),
        }
    }
}

#[cfg(test)]
mod tests;
