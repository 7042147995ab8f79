use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{digest_of, CheckConfig, ROUNDING_FLOOR};
use crate::bodies::{BodySpec, Frame};
use crate::error::{invalid, unsupported, GeomError, Result};
use crate::functionals::{
    kdim_projection_volume, kdim_section_volume, mu_projection, projection_area, section_measure, EvalConfig,
    FunctionalValue,
};
use crate::measures::MeasureSpec;
use crate::quadrature::{direction_grid, grassmann_sample};

/// Which functional of `K` is bounded by which functional of `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalPair {
    /// `|K ∩ F| ≤ |L|F|`, Lebesgue, any subspace dimension.
    SectionVsProjection,
    /// `|K|F| ≤ |L ∩ F|`, Lebesgue, any subspace dimension.
    ProjectionVsSection,
    /// `μ_{n−1}(K ∩ θ⊥) ≤ P_{μ,L}(θ)`.
    SectionVsMuProjection,
    /// `P_{μ,K}(θ) ≤ μ_{n−1}(L ∩ θ⊥) + ε`.
    MuProjectionVsSection,
    /// `μ_{n−1}(K ∩ θ⊥) ≤ μ_{n−1}(L ∩ θ⊥)`.
    SectionVsSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Section,
    Projection,
    MuProjection,
}

impl FunctionalPair {
    fn ops(self) -> (Op, Op) {
        match self {
            FunctionalPair::SectionVsProjection => (Op::Section, Op::Projection),
            FunctionalPair::ProjectionVsSection => (Op::Projection, Op::Section),
            FunctionalPair::SectionVsMuProjection => (Op::Section, Op::MuProjection),
            FunctionalPair::MuProjectionVsSection => (Op::MuProjection, Op::Section),
            FunctionalPair::SectionVsSection => (Op::Section, Op::Section),
        }
    }
}

/// A hypothesis `f_K(F) ≤ g_L(F) + ε` over a grid of subspaces `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub pair: FunctionalPair,
    pub measure: MeasureSpec,
    /// Dimension of the subspaces.
    pub k: usize,
    pub epsilon: f64,
}

impl Hypothesis {
    /// Hyperplane version with `ε = 0`.
    pub fn hyperplanes(pair: FunctionalPair, measure: MeasureSpec) -> Self {
        let k = measure.dim - 1;
        Self {
            pair,
            measure,
            k,
            epsilon: 0.0,
        }
    }

    /// Lebesgue version on `k`-dimensional subspaces of `R^n`.
    pub fn subspaces(pair: FunctionalPair, n: usize, k: usize) -> Self {
        Self {
            pair,
            measure: MeasureSpec::lebesgue(n),
            k,
            epsilon: 0.0,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    fn validate(&self, k_body: &BodySpec, l_body: &BodySpec) -> Result<()> {
        let n = self.measure.dim;
        if k_body.dim != n || l_body.dim != n {
            return Err(invalid("bodies and measure must share the dimension"));
        }
        if self.k == 0 || self.k >= n {
            return Err(invalid(format!("subspace dimension must lie in 1..{n}, got {}", self.k)));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(invalid(format!("epsilon must be finite and non-negative, got {}", self.epsilon)));
        }
        let (a, b) = self.pair.ops();
        let uses_projection = a == Op::Projection || b == Op::Projection;
        if uses_projection && !self.measure.is_lebesgue() {
            return Err(unsupported("plain projections are compared only under Lebesgue measure"));
        }
        let uses_mu = a == Op::MuProjection || b == Op::MuProjection;
        if self.k + 1 != n && (uses_mu || !self.measure.is_lebesgue()) {
            return Err(unsupported(
                "lower-dimensional subspaces are supported only for Lebesgue sections and projections",
            ));
        }
        Ok(())
    }

    /// Homogeneity degree of the right-hand functional under `L ↦ sL`.
    fn rhs_degree(&self) -> Option<f64> {
        let deg = self.measure.homogeneity()?;
        let n = self.measure.dim as f64;
        match self.pair.ops().1 {
            Op::Section => Some(self.k as f64 + deg),
            Op::Projection => Some(self.k as f64),
            Op::MuProjection => Some(n - 1.0 + deg),
        }
    }
}

/// The hypothesis grid: hyperplanes from the direction grid, or a seeded
/// Grassmann sample of the same size for lower-dimensional subspaces.
pub(crate) fn hypothesis_frames(n: usize, k: usize, cfg: &CheckConfig) -> Result<Vec<Frame>> {
    let dirs = direction_grid(n, cfg.grid_level)?;
    if k + 1 == n {
        dirs.iter().map(|d| Frame::hyperplane(d)).collect()
    } else {
        grassmann_sample(n, k, dirs.len(), cfg.seed ^ 0x6a09_e667)
    }
}

fn eval_op(op: Op, m: &MeasureSpec, body: &BodySpec, f: &Frame, eval: &EvalConfig) -> Result<FunctionalValue> {
    let hyperplane = f.k + 1 == body.dim;
    match (op, hyperplane) {
        (Op::Section, true) => section_measure(m, body, f, eval),
        (Op::Section, false) => kdim_section_volume(body, f, eval),
        (Op::Projection, true) => projection_area(body, f, eval),
        (Op::Projection, false) => kdim_projection_volume(body, f, eval),
        (Op::MuProjection, _) => mu_projection(m, body, f, eval),
    }
}

fn side(op: Op, m: &MeasureSpec, body: &BodySpec, frames: &[Frame], eval: &EvalConfig) -> Result<Vec<FunctionalValue>> {
    frames.par_iter().map(|f| eval_op(op, m, body, f, eval)).collect()
}

/// Both sides of a hypothesis on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation {
    pub frames: Vec<Frame>,
    pub lhs: Vec<FunctionalValue>,
    pub rhs: Vec<FunctionalValue>,
    pub epsilon: f64,
}

impl GridEvaluation {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// `min_F (g_L(F) + ε − f_K(F))`.
    pub fn margin(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| b.value + self.epsilon - a.value)
            .fold(f64::INFINITY, f64::min)
    }

    /// Grid index of the smallest margin.
    pub fn argmin(&self) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, (a, b)) in self.lhs.iter().zip(&self.rhs).enumerate() {
            let m = b.value + self.epsilon - a.value;
            if m < best.1 {
                best = (i, m);
            }
        }
        best.0
    }

    /// Largest combined error estimate of a grid point, plus rounding.
    pub fn noise(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| {
                a.error_estimate + b.error_estimate + ROUNDING_FLOOR * a.value.abs().max(b.value.abs() + self.epsilon)
            })
            .fold(0.0, f64::max)
    }

    /// One digest per side, over the input digests of every grid value.
    pub fn digests(&self) -> Vec<String> {
        [&self.lhs, &self.rhs]
            .iter()
            .map(|vals| digest_of(vals.iter().map(|v| v.inputs_digest.as_str())))
            .collect()
    }
}

/// Evaluates `f_K` and `g_L` on the hypothesis grid.
pub fn evaluate_hypothesis(k: &BodySpec, l: &BodySpec, hyp: &Hypothesis, cfg: &CheckConfig) -> Result<GridEvaluation> {
    hyp.validate(k, l)?;
    let frames = hypothesis_frames(k.dim, hyp.k, cfg)?;
    let eval = cfg.eval();
    let (a, b) = hyp.pair.ops();
    let lhs = side(a, &hyp.measure, k, &frames, &eval)?;
    let rhs = side(b, &hyp.measure, l, &frames, &eval)?;
    Ok(GridEvaluation {
        frames,
        lhs,
        rhs,
        epsilon: hyp.epsilon,
    })
}

const BISECTION_STEPS: usize = 200;
const MAX_DOUBLINGS: usize = 40;

/// Smallest `s > 0` such that the hypothesis holds on the grid with minimal
/// margin 0 once `L` is replaced by `sL`.
///
/// Homogeneous measures use the scaling law of the right-hand functional, so
/// `s` comes out in closed form from the grid values; other measures bisect on
/// the margin, re-evaluating the `L` side at each step.
pub fn enforce_hypothesis(k: &BodySpec, l: &BodySpec, hyp: &Hypothesis, cfg: &CheckConfig) -> Result<f64> {
    let grid = evaluate_hypothesis(k, l, hyp, cfg)?;
    enforce_on(&grid, l, hyp, cfg)
}

pub(crate) fn enforce_on(grid: &GridEvaluation, l: &BodySpec, hyp: &Hypothesis, cfg: &CheckConfig) -> Result<f64> {
    let eps = hyp.epsilon;
    let vanishing = |i: usize| {
        GeomError::Unsupported(format!(
            "no dilate of L satisfies the hypothesis: its side vanishes on grid element {i} where K's side is {}",
            grid.lhs[i].value
        ))
    };
    if let Some(d) = hyp.rhs_degree() {
        let mut s = 0.0_f64;
        for (i, (a, b)) in grid.lhs.iter().zip(&grid.rhs).enumerate() {
            let need = a.value - eps;
            if need <= 0.0 {
                continue;
            }
            if b.value <= 0.0 {
                return Err(vanishing(i));
            }
            s = s.max((need / b.value).powf(1.0 / d));
        }
        if s == 0.0 {
            return Err(invalid("the hypothesis holds for every dilate of L"));
        }
        return Ok(s);
    }
    // bisection on the grid margin of sL; the K side is fixed
    let (_, op) = hyp.pair.ops();
    let eval = cfg.eval();
    let margin = |s: f64| -> Result<f64> {
        let ls = l.dilate(s)?;
        let rhs = side(op, &hyp.measure, &ls, &grid.frames, &eval)?;
        let mut m = f64::INFINITY;
        for (a, b) in grid.lhs.iter().zip(&rhs) {
            m = m.min(b.value + eps - a.value);
        }
        Ok(m)
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    if margin(1.0)? >= 0.0 {
        let mut steps = 0;
        while margin(lo)? >= 0.0 {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > 80 {
                return Err(invalid("the hypothesis holds for every dilate of L"));
            }
        }
    } else {
        // the weighted projections of non-homogeneous measures need not grow
        // with s, so the upward search is capped
        let mut steps = 0;
        while margin(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_DOUBLINGS {
                return Err(GeomError::Unsupported(format!(
                    "no dilate of L up to 2^{MAX_DOUBLINGS} satisfies the hypothesis under {} measure",
                    hyp.measure.kind.name()
                )));
            }
        }
    }
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if margin(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `ε ≥ 0` for which the hypothesis holds on the grid as given.
pub fn enforce_epsilon(k: &BodySpec, l: &BodySpec, hyp: &Hypothesis, cfg: &CheckConfig) -> Result<f64> {
    let hyp = hyp.clone().with_epsilon(0.0);
    let grid = evaluate_hypothesis(k, l, &hyp, cfg)?;
    Ok((-grid.margin()).max(0.0))
}

/// The same grid with the `L` side re-evaluated for a new body.
pub(crate) fn regrid(grid: &GridEvaluation, l: &BodySpec, hyp: &Hypothesis, cfg: &CheckConfig) -> Result<GridEvaluation> {
    let (_, op) = hyp.pair.ops();
    let rhs = side(op, &hyp.measure, l, &grid.frames, &cfg.eval())?;
    Ok(GridEvaluation {
        rhs,
        epsilon: hyp.epsilon,
        ..grid.clone()
    })
}
