use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::volumes::{body_measure, inputs, kdim_section_volume, slice_polytope};
use super::{digest, refine, EvalConfig, FunctionalValue, Method};
use crate::bodies::{BodyKind, BodySpec, Frame};
use crate::error::{invalid, GeomError, Result};
use crate::linalg::{ball_volume, normalized, scale};
use crate::measures::MeasureSpec;
use crate::quadrature::{sphere_rule, subsphere_rule};

/// Mean width `w(L) = (1/(nω_n)) ∫_S h_L(u) du`.
pub fn mean_width(l: &BodySpec, cfg: &EvalConfig) -> Result<FunctionalValue> {
    let n = l.dim;
    let dg = digest("mean_width", inputs(l, None, None, json!(null)), cfg);
    let norm_const = n as f64 * ball_volume(n);
    if cfg.closed_forms {
        // E|u_i| over the normalized sphere is 2ω_{n−1}/(nω_n)
        let abs_mean = 2.0 * ball_volume(n - 1) / norm_const;
        let closed = match &l.kind {
            BodyKind::Ball { radius } => Some(*radius),
            BodyKind::Box { half_widths } => Some(abs_mean * half_widths.iter().sum::<f64>()),
            BodyKind::LpBall { p, scale } if p.is_infinite() => Some(abs_mean * scale * n as f64),
            _ => None,
        };
        if let Some(v) = closed {
            return Ok(FunctionalValue::new(v, 0.0, Method::Analytic, dg));
        }
    }
    let (value, err) = refine(cfg, |level| {
        let rule = sphere_rule(n, level, cfg.seed)?;
        let mut vals = Vec::with_capacity(rule.len());
        for (u, w) in rule.nodes.iter().zip(&rule.weights) {
            vals.push(w * l.support(u)?);
        }
        Ok(crate::linalg::pairwise_sum(&vals) / norm_const)
    })?;
    Ok(FunctionalValue::new(value, err, Method::PolarQuadrature, dg))
}

/// Normalization of the isotropic constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IsotropicConvention {
    /// The common diagonal value of the covariance of the volume-one
    /// isotropic image.
    #[default]
    Diagonal,
    /// Its square root, the usual `L_K`.
    SquareRoot,
}

const BATCHES: usize = 16;

/// Isotropic constant from the covariance of uniform samples: the volume-one
/// isotropic image of `K` has covariance `det(C)^{1/n} / |K|^{2/n}` times the
/// identity.
pub fn isotropic_constant(
    k: &BodySpec,
    samples: usize,
    seed: u64,
    convention: IsotropicConvention,
) -> Result<FunctionalValue> {
    let n = k.dim;
    if samples < 4 * BATCHES * n {
        return Err(invalid(format!("need at least {} samples", 4 * BATCHES * n)));
    }
    let cfg = EvalConfig {
        seed,
        ..EvalConfig::default()
    };
    let dg = digest(
        "isotropic_constant",
        inputs(k, None, None, json!({ "samples": samples, "convention": convention })),
        &cfg,
    );
    let volume = body_measure(&MeasureSpec::lebesgue(n), k, &cfg)?.value;
    let bbox = k.bounding_box()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_batch = samples / BATCHES;
    let max_attempts = 1000 * samples;
    let mut attempts = 0usize;
    let stat = |m2: &DMatrix<f64>, mean: &[f64], count: f64| -> f64 {
        let c = DMatrix::from_fn(n, n, |i, j| m2[(i, j)] / count - mean[i] * mean[j] / (count * count));
        let v = c.determinant().max(0.0).powf(1.0 / n as f64) / volume.powf(2.0 / n as f64);
        match convention {
            IsotropicConvention::Diagonal => v,
            IsotropicConvention::SquareRoot => v.sqrt(),
        }
    };
    let mut total_m2 = DMatrix::zeros(n, n);
    let mut total_mean = vec![0.0; n];
    let mut batch_stats = Vec::with_capacity(BATCHES);
    for _ in 0..BATCHES {
        let mut m2 = DMatrix::zeros(n, n);
        let mut mean = vec![0.0; n];
        let mut accepted = 0;
        let mut x = vec![0.0; n];
        while accepted < per_batch {
            attempts += 1;
            if attempts > max_attempts {
                return Err(GeomError::Numerical(format!(
                    "rejection sampling accepted too few points for a {} in dimension {n}",
                    k.kind.name()
                )));
            }
            for (xi, (lo, hi)) in x.iter_mut().zip(&bbox) {
                *xi = rng.random_range(*lo..*hi);
            }
            if !k.contains(&x) {
                continue;
            }
            accepted += 1;
            for i in 0..n {
                mean[i] += x[i];
                for j in 0..n {
                    m2[(i, j)] += x[i] * x[j];
                }
            }
        }
        batch_stats.push(stat(&m2, &mean, per_batch as f64));
        total_m2 += &m2;
        for (t, m) in total_mean.iter_mut().zip(&mean) {
            *t += m;
        }
    }
    let value = stat(&total_m2, &total_mean, (per_batch * BATCHES) as f64);
    let bm = batch_stats.iter().sum::<f64>() / BATCHES as f64;
    let var = batch_stats.iter().map(|s| (s - bm).powi(2)).sum::<f64>() / (BATCHES as f64 - 1.0);
    let err = (var / BATCHES as f64).sqrt();
    Ok(FunctionalValue::new(value, err, Method::CovarianceMc, dg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub area: FunctionalValue,
}

/// A point of `K` in the slice `⟨x, θ⟩ = t` lying in the relative interior of
/// that slice, or `None` when the slice misses the interior of `K`.
fn slice_center(k: &BodySpec, theta: &[f64], t: f64) -> Result<Option<Vec<f64>>> {
    if t.abs() < k.radial(theta)? * (1.0 - 1e-12) {
        return Ok(Some(scale(theta, t)));
    }
    let dir = if t >= 0.0 { theta.to_vec() } else { scale(theta, -1.0) };
    let h = k.support(&dir)?;
    if t.abs() >= h * (1.0 - 1e-12) {
        return Ok(None);
    }
    Ok(Some(scale(&k.support_point(&dir)?, t.abs() / h)))
}

/// Parallel section function `A(t) = |K ∩ (θ⊥ + tθ)|` on the given grid.
pub fn parallel_section_profile(
    k: &BodySpec,
    theta: &[f64],
    ts: &[f64],
    cfg: &EvalConfig,
) -> Result<Vec<ProfilePoint>> {
    let n = k.dim;
    let theta = normalized(theta)
        .filter(|_| theta.len() == n)
        .ok_or_else(|| invalid("profile direction must be a non-zero vector of the body's dimension"))?;
    let frame = Frame::hyperplane(&theta)?;
    let central = match &k.kind {
        BodyKind::Ball { .. } | BodyKind::Ellipsoid { .. } if cfg.closed_forms => {
            Some((kdim_section_volume(k, &frame, cfg)?.value, k.support(&theta)?))
        }
        _ => None,
    };
    let hrep = k.hrep().filter(|_| n <= 4);
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let dg = digest(
            "parallel_section_profile",
            inputs(k, None, Some(&frame), json!({ "t": t })),
            cfg,
        );
        let area = if let Some((a0, h)) = central {
            let r = (1.0 - (t / h).powi(2)).max(0.0);
            FunctionalValue::new(a0 * r.powf((n as f64 - 1.0) / 2.0), 0.0, Method::Analytic, dg)
        } else if let Some(hrep) = &hrep {
            let p = slice_polytope(hrep, &frame.basis, Some((&theta, t)), None)?;
            FunctionalValue::new(p.volume(), 0.0, Method::FacetSum, dg)
        } else {
            match slice_center(k, &theta, t)? {
                None => FunctionalValue::new(0.0, 0.0, Method::PolarQuadrature, dg),
                Some(c) => {
                    let (v, e) = refine(cfg, |level| {
                        let rule = subsphere_rule(&frame, level, cfg.seed)?;
                        let mut vals = Vec::with_capacity(rule.len());
                        for (v, w) in rule.nodes.iter().zip(&rule.weights) {
                            vals.push(w * k.line_exit(&c, v)?.powi(n as i32 - 1));
                        }
                        Ok(crate::linalg::pairwise_sum(&vals) / (n as f64 - 1.0))
                    })?;
                    FunctionalValue::new(v, e, Method::PolarQuadrature, dg)
                }
            }
        };
        out.push(ProfilePoint { t, area });
    }
    Ok(out)
}
