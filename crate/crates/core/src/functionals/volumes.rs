use rayon::prelude::*;
use serde_json::{json, Value};
use statrs::function::gamma::gamma;

use super::cover::{cover, simplex_points, CoverKind, CoverNode};
use super::{digest, refine, EvalConfig, FunctionalValue, Method};
use crate::bodies::{BodyKind, BodySpec, Frame, HRep, Polytope};
use crate::error::{invalid, Result};
use crate::linalg::{ball_volume, dot, factorial, norm, pairwise_sum, scale};
use crate::measures::{cone_power_sphere_integral, MeasureKind, MeasureSpec};
use crate::quadrature::{simplex_rule, subsphere_rule};

/// Parallel map over nodes with a fixed-order sum.
pub(crate) fn sum_nodes<T: Sync>(nodes: &[T], f: impl Fn(&T) -> f64 + Sync + Send) -> f64 {
    let terms: Vec<f64> = nodes.par_iter().map(f).collect();
    pairwise_sum(&terms)
}

pub(crate) fn check_measure(m: &MeasureSpec, k: &BodySpec) -> Result<()> {
    if m.dim != k.dim {
        return Err(invalid(format!("measure of dim {} with a body of dim {}", m.dim, k.dim)));
    }
    Ok(())
}

pub(crate) fn check_frame(k: &BodySpec, h: &Frame) -> Result<()> {
    if h.dim != k.dim {
        return Err(invalid(format!("frame of dim {} with a body of dim {}", h.dim, k.dim)));
    }
    Ok(())
}

fn body_json(k: &BodySpec) -> Value {
    serde_json::to_value(k).expect("bodies serialize")
}

fn measure_json(m: &MeasureSpec) -> Value {
    serde_json::to_value(m).expect("measures serialize")
}

pub(crate) fn inputs(k: &BodySpec, m: Option<&MeasureSpec>, h: Option<&Frame>, extra: Value) -> Value {
    json!({
        "body": body_json(k),
        "measure": m.map(measure_json),
        "frame": h.map(|f| serde_json::to_value(f).expect("frames serialize")),
        "extra": extra,
    })
}

/// `|B_p^n(s)| = s^n (2Γ(1 + 1/p))^n / Γ(1 + n/p)`.
fn lp_volume(n: usize, p: f64, s: f64) -> f64 {
    let nf = n as f64;
    if p.is_infinite() {
        return (2.0 * s).powi(n as i32);
    }
    s.powi(n as i32) * (2.0 * gamma(1.0 + 1.0 / p)).powf(nf) / gamma(1.0 + nf / p)
}

fn lebesgue_volume(k: &BodySpec) -> Option<(f64, Method)> {
    let n = k.dim;
    Some(match &k.kind {
        BodyKind::Ball { radius } => (ball_volume(n) * radius.powi(n as i32), Method::Analytic),
        BodyKind::Ellipsoid { semi_axes } => (ball_volume(n) * semi_axes.iter().product::<f64>(), Method::Analytic),
        BodyKind::Box { half_widths } => (half_widths.iter().map(|w| 2.0 * w).product(), Method::Analytic),
        BodyKind::CrossPolytope { scale } => ((2.0 * scale).powi(n as i32) / factorial(n), Method::Analytic),
        BodyKind::LpBall { p, scale } => (lp_volume(n, *p, *scale), Method::Analytic),
        BodyKind::HPolytope { .. } => (k.polytope()?.volume(), Method::FacetSum),
    })
}

pub(crate) fn cover_method(kind: CoverKind) -> Method {
    match kind {
        CoverKind::Facets => Method::FacetSum,
        _ => Method::PolarQuadrature,
    }
}

/// `μ(K) = ∫_S ∫₀^{ρ(u)} g(ru) r^{n−1} dr du`.
pub fn body_measure(m: &MeasureSpec, k: &BodySpec, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_measure(m, k)?;
    let dg = digest("body_measure", inputs(k, Some(m), None, Value::Null), cfg);
    if cfg.closed_forms {
        if m.is_lebesgue() {
            if let Some((v, method)) = lebesgue_volume(k) {
                return Ok(FunctionalValue::new(v, 0.0, method, dg));
            }
        }
        if let BodyKind::Ball { radius } = k.kind {
            if !matches!(m.kind, MeasureKind::ConeRestricted { .. }) {
                let e = m.ball_mass(radius)?;
                return Ok(FunctionalValue::new(e.value, e.error, Method::Analytic, dg));
            }
        }
    }
    let n = k.dim;
    let kind = std::cell::Cell::new(CoverKind::Sphere);
    let (value, err) = refine(cfg, |level| {
        let c = cover(k, Some(m), None, level, cfg.seed)?;
        kind.set(c.kind);
        Ok(sum_nodes(&c.nodes, |p: &CoverNode| p.dir_w * m.radial_integral(&p.u, p.rho, n)))
    })?;
    Ok(FunctionalValue::new(value, err, cover_method(kind.get()), dg))
}

/// Second path for homogeneous densities: `μ(K) = q ∫_S ρ^{1/q} g(u) du` with
/// `1/q = n + deg g`, on a plain sphere rule.
pub fn body_measure_homogeneous(m: &MeasureSpec, k: &BodySpec, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_measure(m, k)?;
    let d = m
        .homogeneity()
        .ok_or_else(|| invalid(format!("measure '{}' has no homogeneity degree", m.kind.name())))?;
    let inv_q = k.dim as f64 + d;
    let dg = digest("body_measure_homogeneous", inputs(k, Some(m), None, Value::Null), cfg);
    // same direction partition as the radial path, but the ray integral is
    // replaced by the homogeneity closed form q ρ^{1/q} g(u)
    let (value, err) = refine(cfg, |level| {
        let c = cover(k, Some(m), None, level, cfg.seed)?;
        Ok(sum_nodes(&c.nodes, |p: &CoverNode| p.dir_w * p.rho.powf(inv_q) * m.density(&p.u)) / inv_q)
    })?;
    Ok(FunctionalValue::new(value, err, Method::PolarQuadrature, dg))
}

/// The polytope `K ∩ (t θ + span(B))` in the coordinates of the orthonormal
/// basis `B`, clipped by the measure's support half-spaces.
pub(crate) fn slice_polytope(
    hrep: &HRep,
    basis: &[Vec<f64>],
    shift: Option<(&[f64], f64)>,
    measure: Option<&MeasureSpec>,
) -> Result<Polytope> {
    let k = basis.len();
    let project = |a: &[f64]| -> Vec<f64> { basis.iter().map(|b| dot(a, b)).collect() };
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for (a, b) in hrep.normals.iter().zip(&hrep.offsets) {
        normals.push(project(a));
        offsets.push(match shift {
            Some((theta, t)) => b - t * dot(a, theta),
            None => *b,
        });
    }
    if let Some(m) = measure {
        for c in m.support_halfspaces() {
            normals.push(scale(&project(&c), -1.0));
            offsets.push(0.0);
        }
    }
    Polytope::from_hrep(HRep::new(k, normals, offsets)?)
}

/// `∫_P g(B y) dy` over a k-dimensional polytope `P` containing the origin, by
/// cones over its facets.
pub(crate) fn slice_measure(p: &Polytope, basis: &[Vec<f64>], m: &MeasureSpec, level: u8) -> f64 {
    let k = basis.len();
    let lift = |y: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; basis[0].len()];
        for (c, b) in y.iter().zip(basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    };
    let pts = simplex_points(k.saturating_sub(1), level);
    let mut nodes: Vec<(Vec<f64>, f64)> = Vec::new();
    for f in p.facets() {
        if f.offset <= 1e-12 {
            continue;
        }
        for s in &f.simplices {
            for (y, w) in simplex_rule(&p.simplex_points(s), pts) {
                nodes.push((y, w * f.offset));
            }
        }
    }
    sum_nodes(&nodes, |(y, w)| {
        let x = lift(y);
        let r = norm(&x);
        if r == 0.0 {
            return 0.0;
        }
        w * m.radial_integral(&scale(&x, 1.0 / r), r, k) / r.powi(k as i32)
    })
}

pub(crate) fn hyperplane_normal(h: &Frame) -> Result<Vec<f64>> {
    if h.k + 1 != h.dim {
        return Err(invalid(format!("expected a hyperplane frame, got k = {} in dim {}", h.k, h.dim)));
    }
    Ok(match &h.normal {
        Some(t) => t.clone(),
        None => crate::linalg::complete_basis(&h.basis, h.dim)[h.k].clone(),
    })
}

/// Closed forms for sections of balls by rotation-invariant or cone-power
/// densities, and Lebesgue sections of ellipsoids.
fn section_closed_form(m: &MeasureSpec, k: &BodySpec, theta: &[f64]) -> Option<f64> {
    let n = k.dim;
    match (&k.kind, &m.kind) {
        (BodyKind::Ball { radius }, MeasureKind::Lebesgue)
        | (BodyKind::Ball { radius }, MeasureKind::RadialPower { .. })
        | (BodyKind::Ball { radius }, MeasureKind::Gaussian { .. })
        | (BodyKind::Ball { radius }, MeasureKind::TruncatedGaussian { .. }) => {
            let any = theta.to_vec();
            Some(crate::linalg::sphere_area(n - 1) * m.radial_integral(&any, *radius, n - 1))
        }
        (BodyKind::Ball { radius }, MeasureKind::ConePower { direction, exponent }) if n >= 3 => {
            let pw: Vec<f64> = crate::linalg::axpy(direction, -dot(direction, theta), theta);
            let k1 = (n - 1) as f64;
            Some(cone_power_sphere_integral(n - 1, norm(&pw), *exponent) * radius.powf(k1 + exponent) / (k1 + exponent))
        }
        (BodyKind::Ellipsoid { semi_axes }, MeasureKind::Lebesgue) => {
            let det: f64 = semi_axes.iter().product();
            let at: Vec<f64> = semi_axes.iter().zip(theta).map(|(a, t)| a * t).collect();
            Some(ball_volume(n - 1) * det / norm(&at))
        }
        _ => None,
    }
}

/// `μ_{n−1}(K ∩ θ⊥) = ∫_{S ∩ θ⊥} ∫₀^{ρ(u)} g(ru) r^{n−2} dr du`.
pub fn section_measure(m: &MeasureSpec, k: &BodySpec, h: &Frame, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_measure(m, k)?;
    check_frame(k, h)?;
    let theta = hyperplane_normal(h)?;
    let n = k.dim;
    let dg = digest("section_measure", inputs(k, Some(m), Some(h), Value::Null), cfg);
    if cfg.closed_forms {
        if let Some(v) = section_closed_form(m, k, &theta) {
            return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
        }
    }
    if let Some(hrep) = k.hrep().filter(|_| n <= 4) {
        let frame = Frame::hyperplane(&theta)?;
        let p = slice_polytope(&hrep, &frame.basis, None, Some(m))?;
        if m.is_lebesgue() {
            return Ok(FunctionalValue::new(p.volume(), 0.0, Method::FacetSum, dg));
        }
        let (value, err) = refine(cfg, |level| Ok(slice_measure(&p, &frame.basis, m, level)))?;
        return Ok(FunctionalValue::new(value, err, Method::FacetSum, dg));
    }
    let frame = match m.kink_pole() {
        Some(w) => Frame::hyperplane_with_pole(&theta, &w)?,
        None => Frame::hyperplane(&theta)?,
    };
    let (value, err) = refine(cfg, |level| {
        let rule = subsphere_rule(&frame, level, cfg.seed)?;
        Ok(rule.integrate(|u| m.radial_integral(u, k.radial_unchecked(u), n - 1)).value)
    })?;
    Ok(FunctionalValue::new(value, err, Method::PolarQuadrature, dg))
}

/// Lebesgue volume of the central section `K ∩ H` for a k-dimensional `H`.
pub fn kdim_section_volume(k: &BodySpec, h: &Frame, cfg: &EvalConfig) -> Result<FunctionalValue> {
    check_frame(k, h)?;
    let n = k.dim;
    let kk = h.k;
    if kk == 0 || kk >= n {
        return Err(invalid(format!("section dimension {kk} must lie in 1..{n}")));
    }
    let dg = digest("kdim_section_volume", inputs(k, None, Some(h), Value::Null), cfg);
    if cfg.closed_forms {
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
                // |E ∩ H| = ω_k / sqrt(det(Bᵀ A⁻² B))
                let g = nalgebra::DMatrix::from_fn(kk, kk, |i, j| {
                    h.basis[i]
                        .iter()
                        .zip(&h.basis[j])
                        .zip(semi_axes)
                        .map(|((a, b), s)| a * b / (s * s))
                        .sum::<f64>()
                });
                return Ok(FunctionalValue::new(
                    ball_volume(kk) / g.determinant().sqrt(),
                    0.0,
                    Method::Analytic,
                    dg,
                ));
            }
            _ => {}
        }
    }
    if let Some(hrep) = k.hrep().filter(|_| kk <= 4) {
        let p = slice_polytope(&hrep, &h.basis, None, None)?;
        return Ok(FunctionalValue::new(p.volume(), 0.0, Method::FacetSum, dg));
    }
    let (value, err) = refine(cfg, |level| {
        let rule = subsphere_rule(h, level, cfg.seed)?;
        Ok(rule.integrate(|u| k.radial_unchecked(u).powi(kk as i32)).value / kk as f64)
    })?;
    Ok(FunctionalValue::new(value, err, Method::PolarQuadrature, dg))
}
