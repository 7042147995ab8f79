use serde::{Deserialize, Serialize};

use super::lemmas::averaged_hypothesis_check;
use super::theorems::{verify_prop31, verify_thm12, verify_thm61, Variant};
use super::CheckConfig;
use crate::bodies::BodySpec;
use crate::error::{invalid, Result};
use crate::linalg::basis_vector;
use crate::measures::MeasureSpec;

/// Parameter sweeps over the known equality and near-equality cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sweep", rename_all = "snake_case")]
pub enum SweepConfig {
    /// Radial power densities `|x|^p`, `K = B`, `L = rB` dilated onto the
    /// section/weighted-projection hypothesis; ratio `rμ(K)/(Rμ(L))` against
    /// `(p+n−1)/(p+n) · 1/(1−1/n)`.
    Remark31 { n: usize, ps: Vec<f64> },
    /// Lebesgue, `K = L` the ball of volume `λ(rB)/e`; the two case ratios
    /// against `e^{−1/n}` and `e^{1/(n−1)}`.
    Remark61 { ns: Vec<usize>, r: f64 },
    /// `K = L = RB` in the mean-width bound; relative slack against 0 as the
    /// level increases.
    Remark32 { n: usize, radius: f64, levels: Vec<u8> },
    /// Cone power densities `⟨x, e₁⟩₊^a`, `K = B` and `L` a ball dilated onto
    /// the averaged hypothesis; `μ(K)/μ(L)` against
    /// `((1−1/n)/(1−q))^{1/(1−q)}`.
    Remark41 { n: usize, exponents: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    /// Values of the named column, if present.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn sharpness_sweep(config: &SweepConfig, cfg: &CheckConfig) -> Result<SweepTable> {
    let cols = |c: &[&str]| c.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match config {
        SweepConfig::Remark31 { n, ps } => {
            let n = *n;
            let nf = n as f64;
            let cfg = cfg.enforced();
            let ball = BodySpec::ball(n, 1.0)?;
            let mut rows = Vec::new();
            for &p in ps {
                let m = MeasureSpec::radial_power(n, p)?;
                let rep = verify_thm12(&ball, &ball, &m, Variant::B, &cfg)?;
                let observed = rep.details["sharpness_ratio"];
                let predicted = (p + nf - 1.0) / (p + nf) / (1.0 - 1.0 / nf);
                rows.push(vec![p, observed, predicted, rel(observed, predicted), rep.details["l_scale"]]);
            }
            Ok(SweepTable {
                name: "remark31".into(),
                columns: cols(&["p", "observed", "predicted", "rel_error", "l_scale"]),
                rows,
            })
        }
        SweepConfig::Remark61 { ns, r } => {
            let mut rows = Vec::new();
            for &n in ns {
                if n < 2 {
                    return Err(invalid("the log-concave bound needs n >= 2"));
                }
                let nf = n as f64;
                let b = BodySpec::ball(n, r * (-1.0 / nf).exp())?;
                let rep = verify_thm61(&b, &b, &MeasureSpec::lebesgue(n), *r, cfg)?;
                let find = |key: &str| {
                    rep.flatten()
                        .into_iter()
                        .find_map(|s| s.details.get(key).copied())
                        .unwrap_or(f64::NAN)
                };
                let (ra, rb) = (find("ratio_a"), find("ratio_b"));
                let (pa, pb) = ((-1.0 / nf).exp(), (1.0 / (nf - 1.0)).exp());
                rows.push(vec![nf, ra, pa, rel(ra, pa), rb, pb, rel(rb, pb)]);
            }
            Ok(SweepTable {
                name: "remark61".into(),
                columns: cols(&[
                    "n",
                    "observed_a",
                    "predicted_a",
                    "rel_error_a",
                    "observed_b",
                    "predicted_b",
                    "rel_error_b",
                ]),
                rows,
            })
        }
        SweepConfig::Remark32 { n, radius, levels } => {
            let b = BodySpec::ball(*n, *radius)?;
            let mut rows = Vec::new();
            for &level in levels {
                let c = CheckConfig {
                    level,
                    grid_level: level,
                    ..*cfg
                };
                let rep = verify_prop31(&b, &b, n - 1, &c)?;
                rows.push(vec![level as f64, rep.relative_slack(), 0.0, rep.noise_tolerance / rep.lhs]);
            }
            Ok(SweepTable {
                name: "remark32".into(),
                columns: cols(&["level", "observed", "predicted", "relative_noise"]),
                rows,
            })
        }
        SweepConfig::Remark41 { n, exponents } => {
            let n = *n;
            let ball = BodySpec::ball(n, 1.0)?;
            let mut rows = Vec::new();
            for &a in exponents {
                let m = MeasureSpec::cone_power(basis_vector(n, 0), a)?;
                let rep = averaged_hypothesis_check(&m, &ball, &ball, cfg)?;
                let observed = rep.details["measure_ratio"];
                let predicted = rep.details["predicted_ratio"];
                rows.push(vec![a, observed, predicted, rel(observed, predicted)]);
            }
            Ok(SweepTable {
                name: "remark41".into(),
                columns: cols(&["exponent", "observed", "predicted", "rel_error"]),
                rows,
            })
        }
    }
}
