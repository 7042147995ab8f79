use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemmas::lemma_bank;
use super::theorems::{verify_cor13, verify_gk, verify_prop31, verify_thm12, verify_thm14, verify_thm51, verify_thm61, Variant};
use super::{CheckConfig, CheckReport};
use crate::bodies::BodySpec;
use crate::error::Result;
use crate::measures::MeasureSpec;

/// Named groups of checks run by [`battery`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Every lemma on seeded random instances, at least 200 reports.
    LemmaBank,
    /// The main comparison theorems on enforced random symmetric pairs.
    Theorems,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaBank => "lemma_bank",
            Suite::Theorems => "theorems",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "lemma_bank" => Some(Suite::LemmaBank),
            "theorems" => Some(Suite::Theorems),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub suite: Suite,
    pub seed: u64,
    pub level: u8,
    pub reports: Vec<CheckReport>,
}

impl BatteryReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(CheckReport::all_pass)
    }

    /// Number of reports, sub-reports included, with a fail verdict.
    pub fn failures(&self) -> usize {
        self.reports
            .iter()
            .flat_map(|r| r.flatten())
            .filter(|r| r.verdict == super::Verdict::Fail)
            .count()
    }
}

/// Seeds per lemma in the lemma bank suite; with twelve lemma checks this
/// gives 204 instances.
pub const LEMMA_BANK_SEEDS: u64 = 17;

/// Runs a suite. Reports come back in a fixed order and contain no clock
/// readings, so equal inputs give byte-identical serializations.
pub fn battery(suite: Suite, seed: u64, cfg: &CheckConfig) -> Result<BatteryReport> {
    let cfg = cfg.seeded(seed);
    let reports = match suite {
        Suite::LemmaBank => {
            let seeds: Vec<u64> = (0..LEMMA_BANK_SEEDS).map(|i| seed.wrapping_mul(1000).wrapping_add(i)).collect();
            lemma_bank(&seeds, &cfg)?
        }
        Suite::Theorems => theorem_suite(seed, &cfg)?,
    };
    Ok(BatteryReport {
        suite,
        seed,
        level: cfg.level,
        reports,
    })
}

/// A random origin-symmetric catalog body with parameters in fixed ranges:
/// ball, ellipsoid, box, cross-polytope or `ℓ_p` ball with `p ∈ {1.5, 3, 4}`.
pub fn random_symmetric_body<R: Rng>(n: usize, rng: &mut R) -> Result<BodySpec> {
    match rng.random_range(0..5) {
        0 => BodySpec::ball(n, rng.random_range(0.5..1.5)),
        1 => BodySpec::ellipsoid((0..n).map(|_| rng.random_range(0.5..1.5)).collect()),
        2 => BodySpec::cuboid((0..n).map(|_| rng.random_range(0.4..1.2)).collect()),
        3 => BodySpec::cross_polytope(n, rng.random_range(0.8..1.6)),
        _ => {
            let p = [1.5, 3.0, 4.0][rng.random_range(0..3)];
            BodySpec::lp_ball(n, p, rng.random_range(0.6..1.4))
        }
    }
}

fn theorem_suite(seed: u64, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let cfg = cfg.enforced();
    let jobs: Vec<u64> = (0..8).collect();
    let out: Vec<Vec<CheckReport>> = jobs
        .par_iter()
        .map(|&j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            let n = 2 + (j as usize % 2);
            let k = random_symmetric_body(n, &mut rng)?;
            let l = random_symmetric_body(n, &mut rng)?;
            let leb = MeasureSpec::lebesgue(n);
            let r = rng.random_range(0.5..2.0);
            let jc = cfg.seeded(seed.wrapping_add(j));
            Ok(vec![
                verify_gk(&k, &l, n - 1, &jc)?,
                verify_thm12(&k, &l, &leb, Variant::A, &jc)?,
                verify_thm12(&k, &l, &leb, Variant::B, &jc)?,
                verify_cor13(&k, &l, &leb, Variant::A, &jc)?,
                verify_prop31(&k, &l, n - 1, &jc)?,
                verify_thm14(&k, &l, &leb, 0.0, &jc)?,
                verify_thm51(&k, &l, &leb, r, &jc)?,
                verify_thm61(&k, &l, &MeasureSpec::gaussian(n, 1.0)?, r, &jc)?,
            ])
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}
