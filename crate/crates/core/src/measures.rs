//! Densities with the metadata (homogeneity, concavity class, monotonicity
//! along rays, sup-norm) that decides which inequalities apply to them.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use statrs::function::beta::beta;
use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{invalid, GeomError, Result};
use crate::linalg::{ball_volume, dot, norm, sphere_area};
use crate::quadrature::{sphere_rule_with_pole, Estimate};

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Lebesgue,
    /// Density `|x|^p`.
    RadialPower { p: f64 },
    /// Density `⟨x, w⟩₊^a`; `a = 1/p` for a `p`-concave density.
    ConePower { direction: Vec<f64>, exponent: f64 },
    /// Density `exp(−|x|²/(2s²))`.
    Gaussian { scale: f64 },
    /// Gaussian density restricted to the ball of radius `radius`.
    TruncatedGaussian { scale: f64, radius: f64 },
    /// A base density times the indicator of `{x : ⟨x, c_j⟩ ≥ 0 for all j}`.
    ConeRestricted { base: Box<MeasureKind>, cone: Vec<Vec<f64>> },
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Lebesgue => "lebesgue",
            MeasureKind::RadialPower { .. } => "radial_power",
            MeasureKind::ConePower { .. } => "cone_power",
            MeasureKind::Gaussian { .. } => "gaussian",
            MeasureKind::TruncatedGaussian { .. } => "truncated_gaussian",
            MeasureKind::ConeRestricted { .. } => "cone_restricted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "value")]
pub enum Concavity {
    /// The density is `p`-concave on its (convex) support.
    PConcave(f64),
    /// The measure itself is `q`-concave.
    QConcaveMeasure(f64),
    LogConcave,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum SupNorm {
    Finite(f64),
    /// Unbounded on `R^n`; bounded on bounded sets (see [`MeasureSpec::sup_on_ball`]).
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureMeta {
    pub homogeneity: Option<f64>,
    pub concavity: Concavity,
    pub ray_decreasing: bool,
    pub sup_norm: SupNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub struct MeasureSpec {
    pub dim: usize,
    pub kind: MeasureKind,
}

fn validate_kind(dim: usize, kind: &MeasureKind) -> Result<()> {
    let pos = |x: f64, what: &str| {
        if x.is_finite() && x > 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("{what} must be positive and finite, got {x}")))
        }
    };
    match kind {
        MeasureKind::Lebesgue => Ok(()),
        MeasureKind::RadialPower { p } => pos(*p, "radial_power exponent"),
        MeasureKind::ConePower { direction, exponent } => {
            pos(*exponent, "cone_power exponent")?;
            if direction.len() != dim || norm(direction) == 0.0 {
                return Err(invalid("cone_power direction must be a non-zero vector of length dim"));
            }
            Ok(())
        }
        MeasureKind::Gaussian { scale } => pos(*scale, "gaussian scale"),
        MeasureKind::TruncatedGaussian { scale, radius } => {
            pos(*scale, "gaussian scale")?;
            pos(*radius, "truncation radius")
        }
        MeasureKind::ConeRestricted { base, cone } => {
            if matches!(**base, MeasureKind::ConeRestricted { .. }) {
                return Err(invalid("nested cone restrictions are not supported"));
            }
            if cone.is_empty() || cone.iter().any(|c| c.len() != dim || norm(c) == 0.0) {
                return Err(invalid("cone normals must be non-zero vectors of length dim"));
            }
            validate_kind(dim, base)
        }
    }
}

impl MeasureSpec {
    pub fn new(dim: usize, kind: MeasureKind) -> Result<Self> {
        if dim < 2 {
            return Err(invalid(format!("dimension must be >= 2, got {dim}")));
        }
        validate_kind(dim, &kind)?;
        Ok(Self { dim, kind })
    }

    pub fn lebesgue(dim: usize) -> Self {
        Self {
            dim,
            kind: MeasureKind::Lebesgue,
        }
    }

    pub fn radial_power(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, MeasureKind::RadialPower { p })
    }

    pub fn cone_power(direction: Vec<f64>, exponent: f64) -> Result<Self> {
        Self::new(direction.len(), MeasureKind::ConePower { direction, exponent })
    }

    pub fn gaussian(dim: usize, scale: f64) -> Result<Self> {
        Self::new(dim, MeasureKind::Gaussian { scale })
    }

    pub fn truncated_gaussian(dim: usize, scale: f64, radius: f64) -> Result<Self> {
        Self::new(dim, MeasureKind::TruncatedGaussian { scale, radius })
    }

    pub fn cone_restricted(dim: usize, base: MeasureKind, cone: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            dim,
            MeasureKind::ConeRestricted {
                base: Box::new(base),
                cone,
            },
        )
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self.kind, MeasureKind::Lebesgue)
    }

    pub fn metadata(&self) -> MeasureMeta {
        meta_of(self.dim, &self.kind)
    }

    pub fn homogeneity(&self) -> Option<f64> {
        self.metadata().homogeneity
    }

    /// `q = 1/(n + 1/p)` for `p`-concave densities; `1/n` for Lebesgue.
    pub fn q_exponent(&self) -> Option<f64> {
        match self.metadata().concavity {
            Concavity::PConcave(p) if p > 0.0 => Some(1.0 / (self.dim as f64 + 1.0 / p)),
            Concavity::QConcaveMeasure(q) => Some(q),
            _ => None,
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        density_of(&self.kind, x)
    }

    /// `sup g` over the ball of radius `r`.
    pub fn sup_on_ball(&self, r: f64) -> f64 {
        sup_of(&self.kind, r)
    }

    /// `∫₀^ρ g(t u) t^{k−1} dt` in closed form, for a unit `u`.
    pub fn radial_integral(&self, u: &[f64], rho: f64, k: usize) -> f64 {
        radial_of(&self.kind, u, rho, k)
    }

    /// `∫₀¹ g(t x) t^{k−1} dt` for any `x ≠ 0`.
    pub fn ray_average(&self, x: &[f64], k: usize) -> f64 {
        let r = norm(x);
        let u: Vec<f64> = x.iter().map(|v| v / r).collect();
        self.radial_integral(&u, r, k) / r.powi(k as i32)
    }

    /// Outer normals `c` of half-spaces `⟨x, c⟩ ≥ 0` bounding the support of
    /// the density (empty for full support).
    pub fn support_halfspaces(&self) -> Vec<Vec<f64>> {
        match &self.kind {
            MeasureKind::ConePower { direction, .. } => vec![direction.clone()],
            MeasureKind::ConeRestricted { base, cone } => {
                let mut out = cone.clone();
                if let MeasureKind::ConePower { direction, .. } = &**base {
                    out.push(direction.clone());
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Direction along which the density has a kink through the origin, if any;
    /// quadrature poles are aligned with it.
    pub fn kink_pole(&self) -> Option<Vec<f64>> {
        self.support_halfspaces().into_iter().next()
    }

    /// `μ(R B₂ⁿ)`: closed forms, except cone restrictions which integrate the
    /// exact radial profile over the sphere.
    pub fn ball_mass(&self, radius: f64) -> Result<Estimate> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        let n = self.dim;
        let nf = n as f64;
        let value = match &self.kind {
            MeasureKind::Lebesgue => ball_volume(n) * radius.powi(n as i32),
            MeasureKind::RadialPower { p } => sphere_area(n) * radius.powf(nf + p) / (nf + p),
            MeasureKind::ConePower { direction, exponent } => {
                cone_power_sphere_integral(n, norm(direction), *exponent) * radius.powf(nf + exponent)
                    / (nf + exponent)
            }
            MeasureKind::Gaussian { scale } => gaussian_ball(n, *scale, radius),
            MeasureKind::TruncatedGaussian { scale, radius: t } => gaussian_ball(n, *scale, radius.min(*t)),
            MeasureKind::ConeRestricted { .. } => {
                let pole = self.kink_pole().unwrap();
                let fine = sphere_rule_with_pole(&pole, 4, 17)?.integrate(|u| self.radial_integral(u, radius, n));
                let coarse = sphere_rule_with_pole(&pole, 3, 17)?.integrate(|u| self.radial_integral(u, radius, n));
                return Ok(Estimate {
                    value: fine.value,
                    error: (fine.value - coarse.value).abs() + fine.error,
                });
            }
        };
        Ok(Estimate::exact(value))
    }

    /// `∫_{S^{n−1}} g(u) du` for homogeneous densities (so that
    /// `μ(B₂ⁿ) = q ∫ g(u) du`).
    pub fn sphere_integral(&self) -> Result<Estimate> {
        let d = self
            .homogeneity()
            .ok_or_else(|| invalid("sphere integral of g needs a homogeneous density"))?;
        let m = self.ball_mass(1.0)?;
        let c = self.dim as f64 + d;
        Ok(Estimate {
            value: m.value * c,
            error: m.error * c,
        })
    }

    pub fn params_json(&self) -> Value {
        kind_params(&self.kind)
    }
}

fn meta_of(n: usize, kind: &MeasureKind) -> MeasureMeta {
    match kind {
        MeasureKind::Lebesgue => MeasureMeta {
            homogeneity: Some(0.0),
            concavity: Concavity::QConcaveMeasure(1.0 / n as f64),
            ray_decreasing: true,
            sup_norm: SupNorm::Finite(1.0),
        },
        MeasureKind::RadialPower { p } => MeasureMeta {
            homogeneity: Some(*p),
            concavity: Concavity::None,
            ray_decreasing: false,
            sup_norm: SupNorm::Infinite,
        },
        MeasureKind::ConePower { exponent, .. } => MeasureMeta {
            homogeneity: Some(*exponent),
            concavity: Concavity::PConcave(1.0 / exponent),
            ray_decreasing: false,
            sup_norm: SupNorm::Infinite,
        },
        MeasureKind::Gaussian { .. } => MeasureMeta {
            homogeneity: None,
            concavity: Concavity::LogConcave,
            ray_decreasing: true,
            sup_norm: SupNorm::Finite(1.0),
        },
        // g^p = exp(−p|x|²/2s²) is concave on |x|² ≤ s²/p, so p = s²/T² on the ball of radius T
        MeasureKind::TruncatedGaussian { scale, radius } => MeasureMeta {
            homogeneity: None,
            concavity: Concavity::PConcave((scale / radius).powi(2)),
            ray_decreasing: true,
            sup_norm: SupNorm::Finite(1.0),
        },
        MeasureKind::ConeRestricted { base, .. } => meta_of(n, base),
    }
}

fn density_of(kind: &MeasureKind, x: &[f64]) -> f64 {
    match kind {
        MeasureKind::Lebesgue => 1.0,
        MeasureKind::RadialPower { p } => norm(x).powf(*p),
        MeasureKind::ConePower { direction, exponent } => {
            let t = dot(x, direction);
            if t > 0.0 {
                t.powf(*exponent)
            } else {
                0.0
            }
        }
        MeasureKind::Gaussian { scale } => (-dot(x, x) / (2.0 * scale * scale)).exp(),
        MeasureKind::TruncatedGaussian { scale, radius } => {
            let r2 = dot(x, x);
            if r2 <= radius * radius {
                (-r2 / (2.0 * scale * scale)).exp()
            } else {
                0.0
            }
        }
        MeasureKind::ConeRestricted { base, cone } => {
            if cone.iter().all(|c| dot(x, c) >= 0.0) {
                density_of(base, x)
            } else {
                0.0
            }
        }
    }
}

fn sup_of(kind: &MeasureKind, r: f64) -> f64 {
    match kind {
        MeasureKind::Lebesgue | MeasureKind::Gaussian { .. } | MeasureKind::TruncatedGaussian { .. } => 1.0,
        MeasureKind::RadialPower { p } => r.powf(*p),
        MeasureKind::ConePower { direction, exponent } => (r * norm(direction)).powf(*exponent),
        MeasureKind::ConeRestricted { base, .. } => sup_of(base, r),
    }
}

/// `∫₀^ρ exp(−t²/2s²) t^{k−1} dt = s^k 2^{k/2−1} Γ(k/2) P(k/2, ρ²/2s²)`.
fn gaussian_radial(s: f64, rho: f64, k: usize) -> f64 {
    let a = k as f64 / 2.0;
    let x = rho * rho / (2.0 * s * s);
    let p = if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(a, x)
    };
    s.powi(k as i32) * 2f64.powf(a - 1.0) * gamma(a) * p
}

fn gaussian_ball(n: usize, s: f64, r: f64) -> f64 {
    sphere_area(n) * gaussian_radial(s, r, n)
}

/// `∫_{S^{n−1}} ⟨u, w⟩₊^a du = |w|^a |S^{n−2}| B((a+1)/2, (n−1)/2) / 2`.
pub fn cone_power_sphere_integral(n: usize, wnorm: f64, a: f64) -> f64 {
    wnorm.powf(a) * sphere_area(n - 1) * beta((a + 1.0) / 2.0, (n as f64 - 1.0) / 2.0) / 2.0
}

fn radial_of(kind: &MeasureKind, u: &[f64], rho: f64, k: usize) -> f64 {
    let kf = k as f64;
    match kind {
        MeasureKind::Lebesgue => rho.powi(k as i32) / kf,
        MeasureKind::RadialPower { p } => rho.powf(kf + p) / (kf + p),
        MeasureKind::ConePower { direction, exponent } => {
            let t = dot(u, direction);
            if t > 0.0 {
                t.powf(*exponent) * rho.powf(kf + exponent) / (kf + exponent)
            } else {
                0.0
            }
        }
        MeasureKind::Gaussian { scale } => gaussian_radial(*scale, rho, k),
        MeasureKind::TruncatedGaussian { scale, radius } => gaussian_radial(*scale, rho.min(*radius), k),
        MeasureKind::ConeRestricted { base, cone } => {
            if cone.iter().all(|c| dot(u, c) >= 0.0) {
                radial_of(base, u, rho, k)
            } else {
                0.0
            }
        }
    }
}

fn kind_params(kind: &MeasureKind) -> Value {
    match kind {
        MeasureKind::Lebesgue => json!({}),
        MeasureKind::RadialPower { p } => json!({ "p": p }),
        MeasureKind::ConePower { direction, exponent } => json!({ "direction": direction, "exponent": exponent }),
        MeasureKind::Gaussian { scale } => json!({ "scale": scale }),
        MeasureKind::TruncatedGaussian { scale, radius } => json!({ "scale": scale, "radius": radius }),
        MeasureKind::ConeRestricted { base, cone } => json!({
            "base": { "kind": base.name(), "params": kind_params(base) },
            "cone": cone,
        }),
    }
}

fn num(params: &Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| invalid(format!("missing numeric parameter '{key}'")))
}

fn kind_from(name: &str, params: &Value) -> Result<MeasureKind> {
    Ok(match name {
        "lebesgue" => MeasureKind::Lebesgue,
        "radial_power" => MeasureKind::RadialPower { p: num(params, "p")? },
        "cone_power" => MeasureKind::ConePower {
            direction: serde_json::from_value(params.get("direction").cloned().unwrap_or(Value::Null))
                .map_err(|_| invalid("parameter 'direction' must be an array of numbers"))?,
            exponent: num(params, "exponent")?,
        },
        "gaussian" => MeasureKind::Gaussian {
            scale: num(params, "scale")?,
        },
        "truncated_gaussian" => MeasureKind::TruncatedGaussian {
            scale: num(params, "scale")?,
            radius: num(params, "radius")?,
        },
        "cone_restricted" => {
            let base = params.get("base").ok_or_else(|| invalid("missing parameter 'base'"))?;
            let base_name = base
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| invalid("base measure needs a 'kind'"))?;
            let base_params = base.get("params").cloned().unwrap_or(json!({}));
            MeasureKind::ConeRestricted {
                base: Box::new(kind_from(base_name, &base_params)?),
                cone: serde_json::from_value(params.get("cone").cloned().unwrap_or(Value::Null))
                    .map_err(|_| invalid("parameter 'cone' must be an array of arrays"))?,
            }
        }
        other => return Err(invalid(format!("unknown measure kind '{other}'"))),
    })
}

/// Wire form of a measure: `{"kind": ..., "dim": n, "params": {...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    pub kind: String,
    pub dim: usize,
    #[serde(default)]
    pub params: Value,
}

impl TryFrom<MeasureJson> for MeasureSpec {
    type Error = GeomError;

    fn try_from(j: MeasureJson) -> Result<Self> {
        let params = if j.params.is_null() { json!({}) } else { j.params };
        MeasureSpec::new(j.dim, kind_from(&j.kind, &params)?)
    }
}

impl From<MeasureSpec> for MeasureJson {
    fn from(m: MeasureSpec) -> Self {
        MeasureJson {
            kind: m.kind.name().to_string(),
            dim: m.dim,
            params: m.params_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{radial_rule, sphere_rule};
    use std::f64::consts::PI;

    #[test]
    fn density_examples() {
        assert_eq!(MeasureSpec::lebesgue(3).density(&[1.0, 2.0, 3.0]), 1.0);
        let rp = MeasureSpec::radial_power(3, 2.0).unwrap();
        assert!((rp.density(&[0.0, 3.0, 4.0]) - 25.0).abs() < 1e-12);
        let cp = MeasureSpec::cone_power(vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(cp.density(&[-1.0, 0.0]), 0.0);
        assert_eq!(cp.density(&[2.0, 5.0]), 2.0);
    }

    #[test]
    fn q_exponents() {
        assert!((MeasureSpec::lebesgue(3).q_exponent().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let cp = MeasureSpec::cone_power(vec![1.0, 0.0], 1.0).unwrap();
        assert!((cp.q_exponent().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(MeasureSpec::gaussian(3, 1.0).unwrap().q_exponent(), None);
        let tg = MeasureSpec::truncated_gaussian(3, 1.0, 2.0).unwrap();
        assert!((tg.q_exponent().unwrap() - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn metadata_flags() {
        let leb = MeasureSpec::lebesgue(4).metadata();
        assert_eq!(leb.concavity, Concavity::QConcaveMeasure(0.25));
        assert!(leb.ray_decreasing);
        assert_eq!(leb.sup_norm, SupNorm::Finite(1.0));
        let g = MeasureSpec::gaussian(3, 1.0).unwrap().metadata();
        assert_eq!(g.concavity, Concavity::LogConcave);
        assert!(g.ray_decreasing);
        let rp = MeasureSpec::radial_power(3, 2.0).unwrap();
        assert!(!rp.metadata().ray_decreasing);
        assert_eq!(rp.metadata().sup_norm, SupNorm::Infinite);
        assert!((rp.sup_on_ball(2.0) - 4.0).abs() < 1e-15);
        let cp = MeasureSpec::cone_power(vec![0.0, 1.0, 0.0], 0.5).unwrap();
        assert_eq!(cp.metadata().concavity, Concavity::PConcave(2.0));
        assert_eq!(cp.homogeneity(), Some(0.5));
    }

    #[test]
    fn homogeneity_of_densities() {
        let kinds = [
            MeasureSpec::radial_power(3, 1.5).unwrap(),
            MeasureSpec::cone_power(vec![1.0, 1.0, 0.0], 2.0).unwrap(),
            MeasureSpec::lebesgue(3),
        ];
        let x = [0.3, 0.7, -0.2];
        for m in &kinds {
            let d = m.homogeneity().unwrap();
            for t in [0.5, 2.0] {
                let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
                let want = t.powf(d) * m.density(&x);
                assert!((m.density(&tx) - want).abs() <= 1e-13 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn ball_mass_closed_forms() {
        let v = MeasureSpec::lebesgue(3).ball_mass(1.0).unwrap().value;
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-13);
        // radial power: the 1-D integral ∫₀ᴿ r^{n+p−1} nω_n dr by Gauss-Legendre
        let rp = MeasureSpec::radial_power(3, 2.0).unwrap();
        let rule = radial_rule(3).unwrap();
        let r = 1.7;
        let oracle = rule.integrate(|t| r * (r * t[0]).powi(4) * 4.0 * PI).value;
        assert!((rp.ball_mass(r).unwrap().value - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn cone_power_ball_mass_in_the_plane() {
        let cp = MeasureSpec::cone_power(vec![1.0, 0.0], 1.0).unwrap();
        let closed = cp.ball_mass(1.0).unwrap().value;
        assert!((closed - 2.0 / 3.0).abs() < 1e-13);
        // polar oracle: ∫_{S¹} ⟨θ,w⟩₊ dθ · ∫₀¹ r² dr
        let rule = sphere_rule(2, 4, 0).unwrap();
        let polar = rule.integrate(|u| u[0].max(0.0)).value / 3.0;
        assert!((polar - closed).abs() < 1e-10);
    }

    #[test]
    fn cone_power_mass_matches_monte_carlo() {
        use rand::{Rng, SeedableRng};
        let cp = MeasureSpec::cone_power(vec![0.0, 1.0, 1.0], 1.0).unwrap();
        let closed = cp.ball_mass(1.0).unwrap().value;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..n {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = if dot(&x, &x) <= 1.0 { cp.density(&x) * 8.0 } else { 0.0 };
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - closed).abs() < 4.0 * se, "{mean} vs {closed} (se {se})");
    }

    #[test]
    fn gaussian_ball_mass_limits() {
        let g = MeasureSpec::gaussian(3, 0.7).unwrap();
        let full = (2.0 * PI).powf(1.5) * 0.7f64.powi(3);
        assert!((g.ball_mass(50.0).unwrap().value - full).abs() < 1e-12 * full);
        // small radius: ≈ volume
        let small = g.ball_mass(1e-3).unwrap().value;
        assert!((small / (4.0 * PI / 3.0 * 1e-9) - 1.0).abs() < 1e-5);
        let t = MeasureSpec::truncated_gaussian(3, 0.7, 1.0).unwrap();
        assert_eq!(t.ball_mass(3.0).unwrap().value, g.ball_mass(1.0).unwrap().value);
    }

    #[test]
    fn cone_restricted_lebesgue_is_a_fraction() {
        // positive orthant in R^3 carries 1/8 of the ball
        let m = MeasureSpec::cone_restricted(
            3,
            MeasureKind::Lebesgue,
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let v = m.ball_mass(1.0).unwrap();
        assert!((v.value - PI / 6.0).abs() < 1e-9, "{:?}", v);
        assert_eq!(m.q_exponent(), Some(1.0 / 3.0));
    }

    #[test]
    fn json_round_trip() {
        let specs = [
            MeasureSpec::lebesgue(3),
            MeasureSpec::radial_power(2, 0.5).unwrap(),
            MeasureSpec::cone_power(vec![0.25, -1.0], 3.0).unwrap(),
            MeasureSpec::truncated_gaussian(4, 0.5, 1.25).unwrap(),
            MeasureSpec::cone_restricted(2, MeasureKind::Gaussian { scale: 2.0 }, vec![vec![1.0, 1.0]]).unwrap(),
        ];
        for m in specs {
            let s = serde_json::to_string(&m).unwrap();
            let back: MeasureSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(back, m);
        }
        let bad: std::result::Result<MeasureSpec, _> =
            serde_json::from_str(r#"{"kind":"cauchy","dim":2,"params":{}}"#);
        assert!(bad.is_err());
    }
}
