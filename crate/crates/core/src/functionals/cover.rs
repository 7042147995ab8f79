//! A discretization of `∂K` shared by every boundary and polar integral.
//!
//! Each node carries the boundary point `x = ρ(u)u`, the outer normal, a
//! surface weight (`∫_{∂K} f dH ≈ Σ surf_w f(x)`) and a direction weight
//! (`∫_S f(u) du ≈ Σ dir_w f(u)`), related by `surf_w = J(u) dir_w`.
//!
//! Polytopes are covered facet by facet (simplices of each facet with a
//! collapsed Gauss rule), after clipping by the half-spaces that bound the
//! density's support, so every kink of the integrands sits on a panel edge.
//! Ellipsoids are parametrized as linear images of the sphere, other smooth
//! bodies through the radial map; both use a pole-aligned sphere rule.

use crate::bodies::{BodyKind, BodySpec, HRep, Polytope};
use crate::error::Result;
use crate::linalg::{factorial, norm, scale};
use crate::measures::MeasureSpec;
use crate::quadrature::{gauss_legendre_interval, simplex_rule, sphere_rule, sphere_rule_with_pole, RuleKind};

#[derive(Debug, Clone)]
pub(crate) struct CoverNode {
    pub u: Vec<f64>,
    pub rho: f64,
    pub x: Vec<f64>,
    pub normal: Vec<f64>,
    pub dir_w: f64,
    pub surf_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CoverKind {
    Facets,
    Sphere,
    Stochastic,
}

#[derive(Debug, Clone)]
pub(crate) struct Cover {
    pub kind: CoverKind,
    pub nodes: Vec<CoverNode>,
}

/// Gauss points per simplex direction for facets of dimension `d`.
pub(crate) fn simplex_points(d: usize, level: u8) -> usize {
    let table: [usize; 6] = match d {
        0 | 1 => [4, 6, 8, 12, 16, 24],
        2 => [3, 4, 6, 8, 12, 16],
        3 => [2, 3, 4, 6, 8, 10],
        _ => [2, 2, 3, 4, 5, 6],
    };
    table[(level as usize).min(5)]
}

/// Polytope with the density's support half-spaces `⟨x, c⟩ ≥ 0` appended, and
/// the number of original constraints.
pub(crate) fn clipped_polytope(hrep: &HRep, measure: Option<&MeasureSpec>) -> Result<(Polytope, usize)> {
    let original = hrep.normals.len();
    let mut h = hrep.clone();
    if let Some(m) = measure {
        for c in m.support_halfspaces() {
            h = h.with_constraint(&scale(&c, -1.0), 0.0)?;
        }
    }
    Ok((Polytope::from_hrep(h)?, original))
}

fn facet_node(y: Vec<f64>, normal: &[f64], offset: f64, w: f64, n: usize) -> CoverNode {
    let rho = norm(&y);
    CoverNode {
        u: scale(&y, 1.0 / rho),
        rho,
        dir_w: w * offset / rho.powi(n as i32),
        surf_w: w,
        x: y,
        normal: normal.to_vec(),
    }
}

fn engine_cover(body: &BodySpec, measure: Option<&MeasureSpec>, level: u8) -> Result<Cover> {
    let n = body.dim;
    let hrep = body.hrep().expect("polytope kinds have an H-representation");
    let (poly, original) = clipped_polytope(&hrep, measure)?;
    let m = simplex_points(n - 1, level);
    let mut nodes = Vec::new();
    for facet in poly.facets_where(|j| j < original) {
        for s in &facet.simplices {
            for (y, w) in simplex_rule(&poly.simplex_points(s), m) {
                nodes.push(facet_node(y, &facet.normal, facet.offset, w, n));
            }
        }
    }
    Ok(Cover {
        kind: CoverKind::Facets,
        nodes,
    })
}

/// Facets of a box in any dimension: tensor Gauss rules on each face.
fn box_cover(w: &[f64], level: u8) -> Cover {
    let n = w.len();
    let m = simplex_points(n - 1, level);
    let mut nodes = Vec::new();
    for i in 0..n {
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .map(|j| {
                if j == i {
                    (vec![w[j]], vec![1.0])
                } else {
                    gauss_legendre_interval(m, -w[j], w[j])
                }
            })
            .collect();
        for s in [1.0, -1.0] {
            let mut normal = vec![0.0; n];
            normal[i] = s;
            let mut idx = vec![0usize; n];
            loop {
                let mut y = vec![0.0; n];
                let mut wt = 1.0;
                for j in 0..n {
                    y[j] = rules[j].0[idx[j]];
                    wt *= rules[j].1[idx[j]];
                }
                y[i] *= s;
                nodes.push(facet_node(y, &normal, w[i], wt, n));
                let mut d = 0;
                while d < n {
                    idx[d] += 1;
                    if idx[d] < rules[d].0.len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == n {
                    break;
                }
            }
        }
    }
    Cover {
        kind: CoverKind::Facets,
        nodes,
    }
}

fn cross_fits(n: usize, level: u8) -> bool {
    let m = simplex_points(n - 1, level) as f64;
    2f64.powi(n as i32) * m.powi(n as i32 - 1) <= 4e5
}

/// Facets of the cross-polytope `{Σ|x_i| ≤ s}`: one simplex per sign pattern.
fn cross_cover(n: usize, s: f64, level: u8) -> Cover {
    let m = simplex_points(n - 1, level);
    let offset = s / (n as f64).sqrt();
    let mut nodes = Vec::new();
    for mask in 0..(1usize << n) {
        let signs: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let verts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = s * signs[i];
                v
            })
            .collect();
        let normal = scale(&signs, 1.0 / (n as f64).sqrt());
        for (y, w) in simplex_rule(&verts, m) {
            nodes.push(facet_node(y, &normal, offset, w, n));
        }
    }
    Cover {
        kind: CoverKind::Facets,
        nodes,
    }
}

fn rule_kind(kind: RuleKind) -> CoverKind {
    if kind == RuleKind::Stochastic {
        CoverKind::Stochastic
    } else {
        CoverKind::Sphere
    }
}

/// `x = A v` over the unit sphere, `A = diag(a)`.
fn ellipsoid_cover(a: &[f64], pole: Option<Vec<f64>>, level: u8, seed: u64) -> Result<Cover> {
    let n = a.len();
    let rule = match pole {
        Some(p) => sphere_rule_with_pole(&p, level, seed)?,
        None => sphere_rule(n, level, seed)?,
    };
    let det: f64 = a.iter().product();
    let nodes = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(v, w)| {
            let x: Vec<f64> = v.iter().zip(a).map(|(vi, ai)| vi * ai).collect();
            let inv: Vec<f64> = v.iter().zip(a).map(|(vi, ai)| vi / ai).collect();
            let rho = norm(&x);
            let li = norm(&inv);
            CoverNode {
                u: scale(&x, 1.0 / rho),
                rho,
                normal: scale(&inv, 1.0 / li),
                dir_w: w * det / rho.powi(n as i32),
                surf_w: w * det * li,
                x,
            }
        })
        .collect();
    Ok(Cover {
        kind: rule_kind(rule.kind),
        nodes,
    })
}

fn radial_cover(body: &BodySpec, pole: Option<Vec<f64>>, level: u8, seed: u64) -> Result<Cover> {
    let rule = match pole {
        Some(p) => sphere_rule_with_pole(&p, level, seed)?,
        None => sphere_rule(body.dim, level, seed)?,
    };
    let mut nodes = Vec::with_capacity(rule.len());
    for (u, w) in rule.nodes.iter().zip(&rule.weights) {
        let e = body.boundary_element_resolved(u)?;
        let rho = norm(&e.point);
        nodes.push(CoverNode {
            u: scale(&e.point, 1.0 / rho),
            rho,
            surf_w: w * e.jacobian,
            dir_w: *w,
            x: e.point,
            normal: e.normal,
        });
    }
    Ok(Cover {
        kind: rule_kind(rule.kind),
        nodes,
    })
}

/// Builds the cover of `∂K`. `hint` is a direction whose orthogonal
/// complement carries a kink of the integrand (e.g. `|⟨θ, ν⟩|`); it is
/// used as the pole when the measure itself has no kink.
pub(crate) fn cover(
    body: &BodySpec,
    measure: Option<&MeasureSpec>,
    hint: Option<&[f64]>,
    level: u8,
    seed: u64,
) -> Result<Cover> {
    let n = body.dim;
    let kink = measure.and_then(|m| m.kink_pole());
    if body.polytope().is_some() {
        return engine_cover(body, measure, level);
    }
    match &body.kind {
        BodyKind::Box { half_widths } => return Ok(box_cover(half_widths, level)),
        BodyKind::LpBall { p, scale: s } if p.is_infinite() => return Ok(box_cover(&vec![*s; n], level)),
        BodyKind::CrossPolytope { scale: s } if cross_fits(n, level) => return Ok(cross_cover(n, *s, level)),
        BodyKind::LpBall { p, scale: s } if *p == 1.0 && cross_fits(n, level) => {
            return Ok(cross_cover(n, *s, level))
        }
        BodyKind::Ball { radius } => {
            let a = vec![*radius; n];
            return ellipsoid_cover(&a, kink.or_else(|| hint.map(<[f64]>::to_vec)), level, seed);
        }
        BodyKind::Ellipsoid { semi_axes } => {
            let pole = match (kink, hint) {
                (Some(w), _) => Some(w.iter().zip(semi_axes).map(|(wi, ai)| wi * ai).collect()),
                (None, Some(t)) => Some(t.iter().zip(semi_axes).map(|(ti, ai)| ti / ai).collect()),
                (None, None) => None,
            };
            return ellipsoid_cover(semi_axes, pole, level, seed);
        }
        _ => {}
    }
    radial_cover(body, kink.or_else(|| hint.map(<[f64]>::to_vec)), level, seed)
}

/// Exact surface area of a cross-polytope facet, used by closed forms.
pub(crate) fn cross_facet_area(n: usize, s: f64) -> f64 {
    s.powi(n as i32 - 1) * (n as f64).sqrt() / factorial(n - 1)
}

/// `Σ_σ |⟨θ, σ⟩|` over all sign vectors.
pub(crate) fn sign_sum(theta: &[f64]) -> f64 {
    let n = theta.len();
    (0..(1usize << n))
        .map(|mask| {
            theta
                .iter()
                .enumerate()
                .map(|(i, t)| if mask >> i & 1 == 1 { -t } else { *t })
                .sum::<f64>()
                .abs()
        })
        .sum()
}
