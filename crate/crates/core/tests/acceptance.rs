//! Acceptance suite. Runs every criterion in order, prints one line per
//! criterion and exits non-zero if any fails. Reference values come from the
//! oracles in `common` or from closed forms written out here; tolerances are
//! the constants below.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{mc_shadow_area, omega, random_body, random_unit, rel, rng, simpson};
use geomtomo::functionals::{mixed_measure, mu_projection, projection_area, MixedMethod, MixedWith};
use geomtomo::linalg::basis_vector;
use geomtomo::verifiers::{
    battery, random_symmetric_body, sharpness_sweep, verify_cor13, verify_prop29, verify_prop53, verify_thm12,
    verify_thm14, verify_thm51, verify_thm61, CheckConfig, Suite, SweepConfig, Variant,
};
use geomtomo::{BodySpec, CheckReport, EvalConfig, Frame, MeasureSpec, Method, Verdict};

const AC1_TOL: f64 = 5e-3;
const AC2_TOL: f64 = 1e-2;
const AC3_TOL: f64 = 1e-3;
const AC5_TOL: f64 = 1e-3;
const AC7_TOL: f64 = 1e-6;
const AC9_TOL: f64 = 1e-2;
const AC8_MIN_INSTANCES: usize = 200;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { pass, summary }
}

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

fn ball(n: usize, r: f64) -> BodySpec {
    BodySpec::ball(n, r).unwrap()
}

/// Fails unless no report in the tree is a failure; returns the number of
/// reports with a definite verdict.
fn count_passing(reports: &[CheckReport]) -> (usize, usize) {
    let flat: Vec<&CheckReport> = reports.iter().flat_map(|r| r.flatten()).collect();
    let fails = flat.iter().filter(|r| r.verdict == Verdict::Fail).count();
    let passes = flat.iter().filter(|r| r.verdict == Verdict::Pass).count();
    (passes, fails)
}

fn ac1() -> Outcome {
    let eval = EvalConfig {
        level: 3,
        seed: 0,
        closed_forms: false,
    };
    let mut r = rng(1001);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = [2, 3, 4][i % 3];
        let k = random_body(&mut r, n);
        let h = Frame::hyperplane(&random_unit(&mut r, n)).unwrap();
        let p = mu_projection(&MeasureSpec::lebesgue(n), &k, &h, &eval).unwrap().value;
        let a = projection_area(&k, &h, &EvalConfig::default()).unwrap().value;
        worst = worst.max(rel(p, a));
    }
    outcome(
        worst <= AC1_TOL,
        format!("P_lambda vs projection on 50 pairs: max rel err {worst:.2e} (tol {AC1_TOL:.0e})"),
    )
}

fn ac2() -> Outcome {
    let n = 3;
    let measures = [
        MeasureSpec::lebesgue(n),
        MeasureSpec::cone_power(basis_vector(n, 0), 1.0).unwrap(),
        MeasureSpec::gaussian(n, 1.0).unwrap(),
    ];
    let bodies = [
        ball(n, 1.0),
        BodySpec::cuboid(vec![0.8, 0.6, 1.0]).unwrap(),
        BodySpec::ellipsoid(vec![1.0, 0.7, 0.5]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for m in &measures {
        for k in &bodies {
            let rep = verify_prop29(m, k, &cfg()).unwrap();
            worst = worst.max(rel(rep.lhs, rep.rhs));
        }
    }
    outcome(
        worst <= AC2_TOL,
        format!("averaged mu-projection identity, 3 measures x 3 bodies: max rel err {worst:.2e} (tol {AC2_TOL:.0e})"),
    )
}

fn ac3() -> Outcome {
    let ps = [1.0, 10.0, 100.0, 1000.0];
    let t = sharpness_sweep(&SweepConfig::Remark31 { n: 3, ps: ps.to_vec() }, &cfg()).unwrap();
    let observed = t.column("observed").unwrap();
    let mut worst: f64 = 0.0;
    for (p, o) in ps.iter().zip(&observed) {
        let predicted = (p + 2.0) / (p + 3.0) * 1.5;
        worst = worst.max(rel(*o, predicted));
    }
    let monotone = observed.windows(2).all(|w| w[0] < w[1]) && observed.iter().all(|&o| o < 1.5);
    outcome(
        worst <= AC3_TOL && monotone,
        format!(
            "radial power sharpness ratios {:?}: max rel err {worst:.2e} (tol {AC3_TOL:.0e}), increasing to 1.5: {monotone}",
            observed.iter().map(|o| (o * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn ac4() -> Outcome {
    use rand::SeedableRng;
    let mut runs = 0;
    let mut bad = 0;
    for i in 0..30u64 {
        let n = [2, 3, 4][i as usize % 3];
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(4000 + i);
        let k = random_symmetric_body(n, &mut g).unwrap();
        let l = random_symmetric_body(n, &mut g).unwrap();
        let c = cfg().enforced().seeded(i);
        let leb = MeasureSpec::lebesgue(n);
        for rep in [
            verify_thm12(&k, &l, &leb, Variant::A, &c).unwrap(),
            verify_cor13(&k, &l, &leb, Variant::A, &c).unwrap(),
        ] {
            runs += 1;
            if rep.slack < -rep.noise_tolerance || !rep.all_pass() {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("enforced circumradius bounds on 30 random symmetric pairs: {} of {runs} runs within noise", runs - bad),
    )
}

/// `μ(B)` for the density `⟨x, e₁⟩₊^a`: `ω_{n−1} ∫₀¹ t^a (1−t²)^{(n−1)/2} dt`.
fn cone_ball_mass(n: usize, a: f64) -> f64 {
    omega(n - 1) * simpson(|t| t.powf(a) * (1.0 - t * t).powf((n as f64 - 1.0) / 2.0), 0.0, 1.0, 20_000)
}

fn ac5() -> Outcome {
    let eps = [0.0, 0.05, 0.1, 0.2, 0.5];
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let nf = n as f64;
        let a = 1.0;
        let cases = [
            (MeasureSpec::lebesgue(n), omega(n), 1.0 / nf),
            (
                MeasureSpec::cone_power(basis_vector(n, 0), a).unwrap(),
                cone_ball_mass(n, a),
                1.0 / (nf + a),
            ),
        ];
        let k = BodySpec::cuboid((0..n).map(|i| 0.5 + 0.1 * i as f64).collect()).unwrap();
        let l = ball(n, 1.0);
        for (m, mass_b, q) in &cases {
            let coef = omega(n) / (mass_b.powf(*q) * omega(n - 1));
            let slack: Vec<f64> = eps.iter().map(|&e| verify_thm14(&k, &l, m, e, &cfg()).unwrap().slack).collect();
            for (e, s) in eps.iter().zip(&slack).skip(1) {
                worst = worst.max(rel((s - slack[0]) / e, coef));
            }
        }
    }
    outcome(
        worst <= AC5_TOL,
        format!("epsilon slope of the separation bound, n=2,3, lebesgue and cone power: max rel err {worst:.2e} (tol {AC5_TOL:.0e})"),
    )
}

fn ac6() -> Outcome {
    let mut saturated = true;
    let mut gap: f64 = 0.0;
    for n in [2, 3, 4] {
        let rep = verify_prop53(&MeasureSpec::lebesgue(n), &ball(n, 1.0), &cfg()).unwrap();
        let exact = omega(n - 1).powi(n as i32);
        saturated &= rep.slack.abs() <= rep.noise_tolerance && rel(rep.lhs, exact) < 1e-9;
        gap = gap.max(rep.slack.abs());
    }
    use rand::{Rng, SeedableRng};
    let mut reports = Vec::new();
    for i in 0..20u64 {
        let n = 3;
        let m = if i % 2 == 0 {
            MeasureSpec::lebesgue(n)
        } else {
            MeasureSpec::truncated_gaussian(n, 1.0, 2.0).unwrap()
        };
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(6000 + i);
        let k = random_symmetric_body(n, &mut g).unwrap();
        let l = random_symmetric_body(n, &mut g).unwrap();
        let r = g.random_range(0.5..2.0);
        reports.push(verify_thm51(&k, &l, &m, r, &cfg().enforced().seeded(i)).unwrap());
    }
    let (passes, fails) = count_passing(&reports);
    outcome(
        saturated && fails == 0,
        format!(
            "ball saturation n=2..4: |slack| {gap:.1e} within 3 SE: {saturated}; 20 enforced instances: {passes} pass, {fails} fail"
        ),
    )
}

fn ac7() -> Outcome {
    let t = sharpness_sweep(&SweepConfig::Remark61 { ns: vec![3, 4, 5], r: 1.0 }, &cfg()).unwrap();
    let (oa, ob) = (t.column("observed_a").unwrap(), t.column("observed_b").unwrap());
    let mut worst: f64 = 0.0;
    for (i, n) in [3.0f64, 4.0, 5.0].iter().enumerate() {
        worst = worst.max(rel(oa[i], (-1.0 / n).exp()));
        worst = worst.max(rel(ob[i], (1.0 / (n - 1.0)).exp()));
    }
    use rand::{Rng, SeedableRng};
    let mut passing = 0;
    for i in 0..10u64 {
        let n = 3;
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(7000 + i);
        let k = random_symmetric_body(n, &mut g).unwrap();
        let l = random_symmetric_body(n, &mut g).unwrap();
        // r beyond the circumradius of K keeps μ(K) < μ(rB), so a case applies
        let r = k.radii().outer * g.random_range(1.05..3.0);
        let rep = verify_thm61(&k, &l, &MeasureSpec::gaussian(n, 1.0).unwrap(), r, &cfg().enforced().seeded(i)).unwrap();
        if rep.verdict == Verdict::Pass && rep.all_pass() {
            passing += 1;
        }
    }
    outcome(
        worst <= AC7_TOL && passing == 10,
        format!("log-concave boundary ratios n=3,4,5: max rel err {worst:.2e} (tol {AC7_TOL:.0e}); gaussian instances: {passing}/10 pass"),
    )
}

fn ac8() -> Outcome {
    let rep = battery(Suite::LemmaBank, 42, &cfg()).unwrap();
    let (passes, fails) = count_passing(&rep.reports);
    let count = rep.reports.len();
    outcome(
        count >= AC8_MIN_INSTANCES && fails == 0,
        format!("lemma bank: {count} instances ({passes} reports incl. sub-checks pass), {fails} violations"),
    )
}

fn ac9() -> Outcome {
    let mut r = rng(9001);
    let mut worst_mixed: f64 = 0.0;
    for i in 0..30 {
        let n = 2 + i % 2;
        let m = match (i / 2) % 4 {
            0 => MeasureSpec::lebesgue(n),
            1 => MeasureSpec::gaussian(n, 1.0).unwrap(),
            2 => MeasureSpec::cone_power(basis_vector(n, 0), 1.0).unwrap(),
            _ => MeasureSpec::radial_power(n, 1.0).unwrap(),
        };
        let k = random_body(&mut r, n);
        let with = MixedWith::Ball { radius: 1.0 };
        let cfg = EvalConfig::default();
        let a = mixed_measure(&m, &k, &with, MixedMethod::BoundaryIntegral, &cfg).unwrap().value;
        let b = mixed_measure(&m, &k, &with, MixedMethod::FiniteDifference, &cfg).unwrap().value;
        worst_mixed = worst_mixed.max(rel(b, a));
    }
    let mut worst_shadow: f64 = 0.0;
    let mut facet_sum = true;
    for i in 0..10 {
        use rand::Rng;
        let k = BodySpec::cuboid((0..3).map(|_| r.random_range(0.3..1.2)).collect()).unwrap();
        let h = Frame::hyperplane(&random_unit(&mut r, 3)).unwrap();
        let v = projection_area(&k, &h, &EvalConfig::default()).unwrap();
        facet_sum &= v.method == Method::FacetSum;
        let (mc, _) = mc_shadow_area(&k, &h, 300_000, 900 + i);
        worst_shadow = worst_shadow.max(rel(v.value, mc));
    }
    outcome(
        worst_mixed <= AC9_TOL && worst_shadow <= AC9_TOL && facet_sum,
        format!(
            "mixed measure paths on 30 instances: max rel diff {worst_mixed:.2e}; box facet sums vs MC shadows: max rel diff {worst_shadow:.2e} (tol {AC9_TOL:.0e})"
        ),
    )
}

fn ac10() -> Outcome {
    let json = |suite, seed, c: &CheckConfig| serde_json::to_string(&battery(suite, seed, c).unwrap()).unwrap();
    let lemma_same = json(Suite::LemmaBank, 5, &cfg()) == json(Suite::LemmaBank, 5, &cfg());
    let quick = CheckConfig::with_level(2);
    let theorems_same = json(Suite::Theorems, 5, &quick) == json(Suite::Theorems, 5, &quick);

    let verdicts = |level: u8| -> Vec<Verdict> {
        battery(Suite::LemmaBank, 42, &CheckConfig::with_level(level))
            .unwrap()
            .reports
            .iter()
            .flat_map(|r| r.flatten())
            .map(|r| r.verdict)
            .collect()
    };
    let (v3, v4) = (verdicts(3), verdicts(4));
    let changed = v3.iter().zip(&v4).filter(|(a, b)| a != b).count() + v3.len().abs_diff(v4.len());
    outcome(
        lemma_same && theorems_same && changed == 0,
        format!(
            "byte-identical re-runs: lemma bank {lemma_same}, theorems {theorems_same}; verdicts changed level 3 -> 4: {changed} of {}",
            v3.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|a| a == id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("{id:<4} {verdict}  {} [{:.1}s]", result.summary, start.elapsed().as_secs_f64());
        if !result.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
