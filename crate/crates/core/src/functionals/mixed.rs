use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::cover::{cover, cross_facet_area, Cover, CoverNode};
use super::projections::projection_area;
use super::volumes::{check_measure, inputs, sum_nodes};
use super::{digest, refine, EvalConfig, FunctionalValue, Method};
use crate::bodies::{BodyKind, BodySpec, Frame};
use crate::error::{invalid, GeomError, Result};
use crate::linalg::{axpy, ball_volume, dot, normalized, scale};
use crate::measures::MeasureSpec;
use crate::quadrature::sphere_rule;

/// The second body of a mixed μ-measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MixedWith {
    /// The centered ball of the given radius.
    Ball { radius: f64 },
    /// The segment `[−θ, θ]` for a unit `θ`.
    Segment { direction: Vec<f64> },
    /// The first body itself.
    Itself,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedMethod {
    BoundaryIntegral,
    FiniteDifference,
}

/// Step sizes of the one-sided difference quotients, halving.
const FD_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

impl MixedWith {
    fn validate(&self, n: usize) -> Result<MixedWith> {
        match self {
            MixedWith::Ball { radius } if radius.is_finite() && *radius > 0.0 => Ok(self.clone()),
            MixedWith::Ball { radius } => Err(invalid(format!("ball radius must be positive, got {radius}"))),
            MixedWith::Segment { direction } if direction.len() == n => {
                let d = normalized(direction).ok_or_else(|| invalid("segment direction must be non-zero"))?;
                Ok(MixedWith::Segment { direction: d })
            }
            MixedWith::Segment { .. } => Err(invalid("segment direction has the wrong dimension")),
            MixedWith::Itself => Ok(MixedWith::Itself),
        }
    }

    /// `h_B(ν)` at a boundary node of `A`.
    fn support(&self, node: &CoverNode) -> f64 {
        match self {
            MixedWith::Ball { radius } => *radius,
            MixedWith::Segment { direction } => dot(direction, &node.normal).abs(),
            MixedWith::Itself => dot(&node.x, &node.normal),
        }
    }

    fn hint(&self) -> Option<&[f64]> {
        match self {
            MixedWith::Segment { direction } => Some(direction),
            _ => None,
        }
    }
}

/// Radial function of `A + εB` in the direction of a node of `A`.
fn expanded_radial(a: &BodySpec, b: &MixedWith, node: &CoverNode, eps: f64) -> Result<f64> {
    match b {
        MixedWith::Itself => Ok((1.0 + eps) * node.rho),
        MixedWith::Ball { radius } => {
            // distance(x + s u) = ε r, bracketed by the supporting hyperplane at x
            let target = eps * radius;
            let cos = dot(&node.u, &node.normal).max(1e-12);
            let f = |s: f64| -> Result<f64> { Ok(a.distance(&axpy(&node.x, s, &node.u))? - target) };
            let (mut lo, mut hi) = (target, target / cos);
            let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
            if flo >= 0.0 {
                return Ok(node.rho + lo);
            }
            if fhi <= 0.0 {
                return Ok(node.rho + hi);
            }
            let mut side = 0i8;
            for _ in 0..200 {
                let s = (lo * fhi - hi * flo) / (fhi - flo);
                let fs = f(s)?;
                if fs == 0.0 || hi - lo <= 1e-15 * (1.0 + node.rho) {
                    return Ok(node.rho + s);
                }
                if fs < 0.0 {
                    lo = s;
                    flo = fs;
                    if side == -1 {
                        fhi /= 2.0;
                    }
                    side = -1;
                } else {
                    hi = s;
                    fhi = fs;
                    if side == 1 {
                        flo /= 2.0;
                    }
                    side = 1;
                }
            }
            Ok(node.rho + 0.5 * (lo + hi))
        }
        MixedWith::Segment { direction } => {
            // max over |s| ≤ ε of the exit distance from −sθ; concave in s
            let exit = |s: f64| a.line_exit(&scale(direction, -s), &node.u);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            let (mut lo, mut hi) = (-eps, eps);
            let mut x1 = hi - r * (hi - lo);
            let mut x2 = lo + r * (hi - lo);
            let (mut f1, mut f2) = (exit(x1)?, exit(x2)?);
            while hi - lo > 1e-12 * eps {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + r * (hi - lo);
                    f2 = exit(x2)?;
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - r * (hi - lo);
                    f1 = exit(x1)?;
                }
            }
            Ok(f1.max(f2).max(exit(-eps)?).max(exit(eps)?))
        }
    }
}

fn difference_quotients(m: &MeasureSpec, a: &BodySpec, b: &MixedWith, c: &Cover) -> Result<[f64; 3]> {
    let n = a.dim;
    let mut out = [0.0; 3];
    for (slot, eps) in out.iter_mut().zip(FD_STEPS) {
        let terms: Vec<Result<f64>> = {
            use rayon::prelude::*;
            c.nodes
                .par_iter()
                .map(|p| {
                    let r = expanded_radial(a, b, p, eps)?;
                    Ok(p.dir_w * (m.radial_integral(&p.u, r, n) - m.radial_integral(&p.u, p.rho, n)) / eps)
                })
                .collect()
        };
        let vals = terms.into_iter().collect::<Result<Vec<f64>>>()?;
        *slot = crate::linalg::pairwise_sum(&vals);
    }
    Ok(out)
}

/// Two Richardson sweeps over halving steps; returns the extrapolant and the
/// residual against the first sweep.
fn richardson(d: [f64; 3]) -> (f64, f64) {
    let r0 = 2.0 * d[1] - d[0];
    let r1 = 2.0 * d[2] - d[1];
    let r = (4.0 * r1 - r0) / 3.0;
    (r, (r - r1).abs())
}

/// Mixed μ-measure `μ₁(A, B)` by the boundary integral `∫ h_B(ν) g dH` or by
/// Richardson-extrapolated difference quotients of `μ(A + εB)`.
pub fn mixed_measure(
    m: &MeasureSpec,
    a: &BodySpec,
    b: &MixedWith,
    method: MixedMethod,
    cfg: &EvalConfig,
) -> Result<FunctionalValue> {
    check_measure(m, a)?;
    let b = b.validate(a.dim)?;
    let extra = json!({ "with": serde_json::to_value(&b).expect("serializable"), "method": method });
    let dg = digest("mixed_measure", inputs(a, Some(m), None, extra), cfg);
    match method {
        MixedMethod::BoundaryIntegral => {
            let (value, err) = refine(cfg, |level| {
                let c = cover(a, Some(m), b.hint(), level, cfg.seed)?;
                Ok(sum_nodes(&c.nodes, |p: &CoverNode| p.surf_w * b.support(p) * m.density(&p.x)))
            })?;
            Ok(FunctionalValue::new(value, err, Method::BoundaryIntegral, dg))
        }
        MixedMethod::FiniteDifference => {
            let residual = std::cell::Cell::new(0.0_f64);
            let (value, err) = refine(cfg, |level| {
                let c = cover(a, Some(m), b.hint(), level, cfg.seed)?;
                let (r, res) = richardson(difference_quotients(m, a, &b, &c)?);
                residual.set(residual.get().max(res));
                Ok(r)
            })?;
            Ok(FunctionalValue::new(value, err + residual.get(), Method::FiniteDifference, dg))
        }
    }
}

/// `|∂K|`: closed forms for balls and polytopes, otherwise `μ₁(K, B)` for
/// Lebesgue measure.
pub fn surface_area(k: &BodySpec, cfg: &EvalConfig) -> Result<FunctionalValue> {
    let n = k.dim;
    let dg = digest("surface_area", inputs(k, None, None, Value::Null), cfg);
    let closed = match &k.kind {
        BodyKind::Ball { radius } => Some((n as f64 * ball_volume(n) * radius.powi(n as i32 - 1), Method::Analytic)),
        BodyKind::Box { half_widths } => {
            let vol: f64 = half_widths.iter().map(|w| 2.0 * w).product();
            Some((half_widths.iter().map(|w| vol / w).sum(), Method::Analytic))
        }
        BodyKind::LpBall { p, scale } if p.is_infinite() => {
            Some((2.0 * n as f64 * (2.0 * scale).powi(n as i32 - 1), Method::Analytic))
        }
        BodyKind::CrossPolytope { scale } if n <= 30 => {
            Some((2f64.powi(n as i32) * cross_facet_area(n, *scale), Method::Analytic))
        }
        BodyKind::HPolytope { .. } => k
            .polytope()
            .map(|p| (p.facets().iter().map(|f| f.area).sum(), Method::FacetSum)),
        _ => None,
    };
    if let Some((v, method)) = closed.filter(|_| cfg.closed_forms) {
        return Ok(FunctionalValue::new(v, 0.0, method, dg));
    }
    let leb = MeasureSpec::lebesgue(n);
    let mut v = mixed_measure(&leb, k, &MixedWith::Ball { radius: 1.0 }, MixedMethod::BoundaryIntegral, cfg)?;
    v.inputs_digest = dg;
    Ok(v)
}

/// Relative gap in Cauchy's surface area formula
/// `|∂K| = (1/ω_{n−1}) ∫_S |K|u⊥| du`.
pub fn cauchy_formula_gap(k: &BodySpec, cfg: &EvalConfig) -> Result<f64> {
    let n = k.dim;
    let s = surface_area(k, cfg)?.value;
    let rule = sphere_rule(n, cfg.level, cfg.seed)?;
    // projections either in closed form / by facets, or from one fixed surface
    let fixed = match projection_area(k, &Frame::hyperplane(&rule.nodes[0])?, cfg)?.method {
        Method::Analytic | Method::FacetSum => None,
        _ => Some(cover(k, None, None, cfg.level, cfg.seed)?),
    };
    let proj = |u: &[f64]| -> Result<f64> {
        match &fixed {
            None => Ok(projection_area(k, &Frame::hyperplane(u)?, cfg)?.value),
            Some(c) => Ok(0.5 * c.nodes.iter().map(|p| p.surf_w * dot(u, &p.normal).abs()).sum::<f64>()),
        }
    };
    let mut total = Vec::with_capacity(rule.len());
    for (u, w) in rule.nodes.iter().zip(&rule.weights) {
        total.push(w * proj(u)?);
    }
    let c = crate::linalg::pairwise_sum(&total) / ball_volume(n - 1);
    if s <= 0.0 {
        return Err(GeomError::Numerical("non-positive surface area".into()));
    }
    Ok((s - c).abs() / s)
}
