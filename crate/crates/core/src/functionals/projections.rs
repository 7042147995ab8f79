use serde_json::{json, Value};

use super::cover::{cover, cross_facet_area, sign_sum, CoverKind, CoverNode};
use super::volumes::{check_frame, check_measure, hyperplane_normal, inputs, sum_nodes};
use super::{digest, refine, EvalConfig, FunctionalValue, Method};
use crate::bodies::{BodyKind, BodySpec, Frame, HRep, Polytope};
use crate::error::{invalid, unsupported, Result};
use crate::linalg::{ball_volume, dot, norm, sub};
use crate::measures::{MeasureKind, MeasureSpec};

/// Exact facet sum `½ Σ |F| |⟨θ, n_F⟩|` for polytope kinds.
fn facet_projection(k: &BodySpec, theta: &[f64]) -> Option<f64> {
    let n = k.dim;
    match &k.kind {
        BodyKind::Box { half_widths } => Some(box_projection(half_widths, theta)),
        BodyKind::LpBall { p, scale } if p.is_infinite() => Some(box_projection(&vec![*scale; n], theta)),
        BodyKind::CrossPolytope { scale } if n <= 16 => Some(cross_projection(n, *scale, theta)),
        BodyKind::LpBall { p, scale } if *p == 1.0 && n <= 16 => Some(cross_projection(n, *scale, theta)),
        BodyKind::HPolytope { .. } => {
            let p = k.polytope()?;
            Some(0.5 * p.facets().iter().map(|f| f.area * dot(&f.normal, theta).abs()).sum::<f64>())
        }
        _ => None,
    }
}

fn box_projection(w: &[f64], theta: &[f64]) -> f64 {
    let vol: f64 = w.iter().map(|x| 2.0 * x).product();
    w.iter().zip(theta).map(|(wi, t)| t.abs() * vol / (2.0 * wi)).sum()
}

fn cross_projection(n: usize, s: f64, theta: &[f64]) -> f64 {
    0.5 * cross_facet_area(n, s) * sign_sum(theta) / (n as f64).sqrt()
}

/// `|K|θ⊥|` by Cauchy's projection formula `½ ∫ |⟨θ, ν⟩| dH`.
pub fn projection_area(k: &BodySpec, h: &Frame, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_frame(k, h)?;
    let theta = hyperplane_normal(h)?;
    let n = k.dim;
    let dg = digest("projection_area", inputs(k, None, Some(h), Value::Null), cfg);
    if cfg.closed_forms {
        match &k.kind {
            BodyKind::Ball { radius } => {
                let v = ball_volume(n - 1) * radius.powi(n as i32 - 1);
                return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
            }
            BodyKind::Ellipsoid { semi_axes } => {
                let det: f64 = semi_axes.iter().product();
                let inv: Vec<f64> = theta.iter().zip(semi_axes).map(|(t, a)| t / a).collect();
                let v = ball_volume(n - 1) * det * norm(&inv);
                return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
            }
            _ => {}
        }
    }
    if let Some(v) = facet_projection(k, &theta) {
        return Ok(FunctionalValue::new(v, 0.0, Method::FacetSum, dg));
    }
    let (value, err) = refine(cfg, |level| {
        let c = cover(k, None, Some(&theta), level, cfg.seed)?;
        Ok(0.5 * sum_nodes(&c.nodes, |p: &CoverNode| p.surf_w * dot(&theta, &p.normal).abs()))
    })?;
    Ok(FunctionalValue::new(value, err, Method::BoundaryIntegral, dg))
}

/// `P_{μ,K}(θ) = (n/2) ∫_{∂K} |⟨θ, ν⟩| G(x) dH` with `G(x) = ∫₀¹ g(tx) t^{n−1} dt`,
/// which is the `t`-integral of the weighted boundary projections of `tK`
/// carried out in closed form along each ray.
pub fn mu_projection(m: &MeasureSpec, k: &BodySpec, h: &Frame, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_measure(m, k)?;
    check_frame(k, h)?;
    let theta = hyperplane_normal(h)?;
    let n = k.dim;
    let half_n = n as f64 / 2.0;
    let dg = digest("mu_projection", inputs(k, Some(m), Some(h), Value::Null), cfg);
    if let (BodyKind::Ball { radius }, true) = (&k.kind, cfg.closed_forms && rotation_invariant(m)) {
        // every boundary point of tB carries the same density, so
        // P = n ω_{n−1} ∫₀¹ t^{n−1} g(tR) dt
        let v = n as f64 * ball_volume(n - 1) * m.radial_integral(&theta, *radius, n) / radius;
        return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
    }
    let kind = std::cell::Cell::new(CoverKind::Sphere);
    let (value, err) = refine(cfg, |level| {
        let c = cover(k, Some(m), Some(&theta), level, cfg.seed)?;
        kind.set(c.kind);
        Ok(half_n
            * sum_nodes(&c.nodes, |p: &CoverNode| {
                let g = m.radial_integral(&p.u, p.rho, n) / p.rho.powi(n as i32);
                p.surf_w * dot(&theta, &p.normal).abs() * g
            }))
    })?;
    let method = if kind.get() == CoverKind::Facets {
        Method::FacetSum
    } else {
        Method::BoundaryIntegral
    };
    Ok(FunctionalValue::new(value, err, method, dg))
}

fn rotation_invariant(m: &MeasureSpec) -> bool {
    matches!(
        m.kind,
        MeasureKind::Lebesgue
            | MeasureKind::RadialPower { .. }
            | MeasureKind::Gaussian { .. }
            | MeasureKind::TruncatedGaussian { .. }
    )
}

fn coords(h: &Frame, x: &[f64]) -> Vec<f64> {
    h.basis.iter().map(|b| dot(b, x)).collect()
}

/// Area of the convex hull of planar points (Andrew's monotone chain).
pub(crate) fn hull_area_2d(points: &[Vec<f64>]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut area = 0.0;
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        area += a.0 * b.1 - a.1 * b.0;
    }
    area.abs() / 2.0
}

/// Volume of the convex hull of a modest number of points in `R^3`: every
/// supporting plane through three points becomes a constraint.
pub(crate) fn hull_volume_3d(points: &[Vec<f64>]) -> Result<f64> {
    let m = points.len();
    let scale_ = points.iter().map(|p| norm(p)).fold(0.0_f64, f64::max).max(1e-300);
    let tol = 1e-10 * scale_;
    let centroid: Vec<f64> = (0..3).map(|i| points.iter().map(|p| p[i]).sum::<f64>() / m as f64).collect();
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for l in j + 1..m {
                let a = sub(&points[j], &points[i]);
                let b = sub(&points[l], &points[i]);
                let c = vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                let cn = norm(&c);
                if cn <= tol * scale_ {
                    continue;
                }
                let mut nrm: Vec<f64> = c.iter().map(|v| v / cn).collect();
                let mut off = dot(&nrm, &points[i]);
                if dot(&nrm, &centroid) > off {
                    nrm.iter_mut().for_each(|v| *v = -*v);
                    off = -off;
                }
                if !points.iter().all(|p| dot(&nrm, p) <= off + tol) {
                    continue;
                }
                let rel = off - dot(&nrm, &centroid);
                let seen = normals
                    .iter()
                    .zip(&offsets)
                    .any(|(a, b): (&Vec<f64>, &f64)| norm(&sub(a, &nrm)) < 1e-9 && (b - rel).abs() <= tol);
                if !seen {
                    normals.push(nrm);
                    offsets.push(rel);
                }
            }
        }
    }
    if normals.is_empty() {
        return Ok(0.0);
    }
    // shift so the centroid is the origin (offsets above are already relative to it)
    let p = Polytope::from_hrep(HRep::new(3, normals, offsets)?)?;
    Ok(p.volume())
}

fn vertex_list(k: &BodySpec) -> Option<Vec<Vec<f64>>> {
    let n = k.dim;
    match &k.kind {
        BodyKind::CrossPolytope { scale } => Some(cross_vertices(n, *scale)),
        BodyKind::LpBall { p, scale } if *p == 1.0 => Some(cross_vertices(n, *scale)),
        BodyKind::HPolytope { .. } => k.polytope().map(|p| p.vertices.clone()),
        _ => None,
    }
}

fn cross_vertices(n: usize, s: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; n];
            v[i] = sign * s;
            out.push(v);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Directions used for sampled shadows in the plane.
const SHADOW_DIRECTIONS: usize = 16384;

/// Inscribed and circumscribed polygon areas of a planar shadow from support
/// points and support lines at equally spaced directions.
fn sampled_shadow_2d(k: &BodySpec, h: &Frame) -> Result<(f64, f64)> {
    let lift = |c: f64, s: f64| -> Vec<f64> { (0..k.dim).map(|i| c * h.basis[0][i] + s * h.basis[1][i]).collect() };
    let mut inner = Vec::with_capacity(SHADOW_DIRECTIONS);
    let mut support = Vec::with_capacity(SHADOW_DIRECTIONS);
    for i in 0..SHADOW_DIRECTIONS {
        let a = i as f64 * std::f64::consts::TAU / SHADOW_DIRECTIONS as f64;
        let (s, c) = a.sin_cos();
        let d = lift(c, s);
        inner.push(coords(h, &k.support_point(&d)?));
        support.push((c, s, k.support(&d)?));
    }
    let lo = hull_area_2d(&inner);
    let mut outer_pts = Vec::with_capacity(SHADOW_DIRECTIONS);
    for i in 0..SHADOW_DIRECTIONS {
        let (c1, s1, h1) = support[i];
        let (c2, s2, h2) = support[(i + 1) % SHADOW_DIRECTIONS];
        let det = c1 * s2 - s1 * c2;
        outer_pts.push(vec![(h1 * s2 - h2 * s1) / det, (c1 * h2 - c2 * h1) / det]);
    }
    let hi = hull_area_2d(&outer_pts);
    Ok((lo, hi))
}

/// Volume of the orthogonal projection `K|H` onto a k-dimensional subspace.
pub fn kdim_projection_volume(k: &BodySpec, h: &Frame, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_frame(k, h)?;
    let n = k.dim;
    let kk = h.k;
    if kk == 0 || kk >= n {
        return Err(invalid(format!("projection dimension {kk} must lie in 1..{n}")));
    }
    let dg = digest("kdim_projection_volume", inputs(k, None, Some(h), json!({ "k": kk })), cfg);
    match &k.kind {
        BodyKind::Ball { radius } => {
            return Ok(FunctionalValue::new(
                ball_volume(kk) * radius.powi(kk as i32),
                0.0,
                Method::Analytic,
                dg,
            ))
        }
        BodyKind::Ellipsoid { semi_axes } => {
            let g = nalgebra::DMatrix::from_fn(kk, kk, |i, j| {
                h.basis[i]
                    .iter()
                    .zip(&h.basis[j])
                    .zip(semi_axes)
                    .map(|((a, b), s)| a * b * s * s)
                    .sum::<f64>()
            });
            return Ok(FunctionalValue::new(
                ball_volume(kk) * g.determinant().sqrt(),
                0.0,
                Method::Analytic,
                dg,
            ));
        }
        _ => {}
    }
    if kk + 1 == n {
        let mut v = projection_area(k, h, cfg)?;
        v.inputs_digest = dg;
        return Ok(v);
    }
    if kk == 1 {
        let b = &h.basis[0];
        let minus: Vec<f64> = b.iter().map(|x| -x).collect();
        let v = k.support(b)? + k.support(&minus)?;
        return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
    }
    let box_widths = match &k.kind {
        BodyKind::Box { half_widths } => Some(half_widths.clone()),
        BodyKind::LpBall { p, scale } if p.is_infinite() => Some(vec![*scale; n]),
        _ => None,
    };
    if let Some(w) = box_widths {
        // zonotope: Σ over k-subsets of generators of |det|
        let gens: Vec<Vec<f64>> = (0..n).map(|i| h.basis.iter().map(|b| 2.0 * w[i] * b[i]).collect()).collect();
        let v: f64 = combinations(n, kk)
            .iter()
            .map(|sel| nalgebra::DMatrix::from_fn(kk, kk, |r, c| gens[sel[c]][r]).determinant().abs())
            .sum();
        return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
    }
    if kk > 3 {
        return Err(unsupported(format!(
            "projection volume onto a {kk}-dimensional subspace of a {} needs a closed form",
            k.kind.name()
        )));
    }
    if let Some(verts) = vertex_list(k) {
        let proj: Vec<Vec<f64>> = verts.iter().map(|v| coords(h, v)).collect();
        let v = if kk == 2 {
            hull_area_2d(&proj)
        } else {
            hull_volume_3d(&proj)?
        };
        return Ok(FunctionalValue::new(v, 0.0, Method::FacetSum, dg));
    }
    if kk == 2 {
        let (lo, hi) = sampled_shadow_2d(k, h)?;
        return Ok(FunctionalValue::new(lo, hi - lo, Method::MonteCarloHull, dg));
    }
    Err(unsupported(format!(
        "3-dimensional shadows of a {} in dimension {n} are not available",
        k.kind.name()
    )))
}
