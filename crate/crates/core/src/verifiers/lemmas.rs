use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::battery::random_symmetric_body;
use super::{digest_of, CheckConfig, CheckReport};
use crate::bodies::{BodySpec, Frame};
use crate::error::Result;
use crate::functionals::{
    body_measure, body_measure_homogeneous, mixed_measure, parallel_section_profile, surface_area, EvalConfig,
    FunctionalValue, MixedMethod, MixedWith,
};
use crate::linalg::{ball_volume, normalized, pairwise_sum, sphere_area};
use crate::measures::MeasureSpec;
use crate::quadrature::{grassmann_sample, sphere_rule, sphere_rule_with_pole, subsphere_rule, Estimate};

/// Identifiers of the lemma checks, in the order the bank runs them.
pub const LEMMA_IDS: [&str; 12] = [
    "lemma25",
    "lemma26",
    "lemma27",
    "lemma52",
    "lemma62",
    "lemma63",
    "lemma64",
    "identity32",
    "step34",
    "brunn_max",
    "brunn_concavity",
    "remark41",
];

/// Frames in the Monte Carlo Grassmann average.
const GRASSMANN_FRAMES: usize = 400;

/// Standard errors allowed on the Monte Carlo Grassmann identity. Its two
/// sides differ only by sampling error, so three would fail about one run in
/// four hundred; four keeps a 200-instance bank clean without hiding a wrong
/// constant, which shows up as a shift of many standard errors.
const IDENTITY_SE: f64 = 4.0;

/// Runs every lemma check once per seed. Reports are ordered by seed, then
/// by [`LEMMA_IDS`].
pub fn lemma_bank(seeds: &[u64], cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let jobs: Vec<(u64, usize)> = seeds
        .iter()
        .flat_map(|&s| (0..LEMMA_IDS.len()).map(move |i| (s, i)))
        .collect();
    jobs.par_iter()
        .map(|&(seed, i)| {
            let cfg = cfg.seeded(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (i as u64 + 1));
            run_lemma(LEMMA_IDS[i], &mut rng, &cfg)
        })
        .collect()
}

fn run_lemma(id: &str, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let n = rng.random_range(2..4);
    match id {
        "lemma25" => lemma25(n, rng, cfg),
        "lemma26" => lemma26(n, rng, cfg),
        "lemma27" => lemma27(n, rng, cfg),
        "lemma52" => lemma52(n, rng, cfg),
        "lemma62" => lemma62(n, rng, cfg),
        "lemma63" => lemma63(n, rng, cfg),
        "lemma64" => lemma64(n, rng, cfg),
        "identity32" => identity32(n + 1, rng, cfg),
        "step34" => step34(n, rng, cfg),
        "brunn_max" => brunn(n, rng, cfg, false),
        "brunn_concavity" => brunn(n, rng, cfg, true),
        "remark41" => remark41(n, rng, cfg),
        _ => unreachable!("unknown lemma id {id}"),
    }
}

fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// Lebesgue, a cone power or a truncated gaussian: the q-concave measures of
/// the catalog with finite `q`.
fn q_concave_measure<R: Rng>(n: usize, rng: &mut R) -> Result<MeasureSpec> {
    match rng.random_range(0..3) {
        0 => Ok(MeasureSpec::lebesgue(n)),
        1 => MeasureSpec::cone_power(random_unit(n, rng), rng.random_range(0.5..2.0)),
        _ => MeasureSpec::truncated_gaussian(n, rng.random_range(0.8..1.5), rng.random_range(1.5..3.0)),
    }
}

/// Lebesgue or a cone power: homogeneous densities with `q = 1/(n + deg)`.
fn homogeneous_measure<R: Rng>(n: usize, rng: &mut R) -> Result<MeasureSpec> {
    if rng.random_bool(0.4) {
        Ok(MeasureSpec::lebesgue(n))
    } else {
        MeasureSpec::cone_power(random_unit(n, rng), rng.random_range(0.5..2.0))
    }
}

/// Lebesgue, gaussian or truncated gaussian: ray-decreasing log-concave
/// densities.
fn ray_decreasing_measure<R: Rng>(n: usize, rng: &mut R) -> Result<MeasureSpec> {
    match rng.random_range(0..3) {
        0 => Ok(MeasureSpec::lebesgue(n)),
        1 => MeasureSpec::gaussian(n, rng.random_range(0.5..1.5)),
        _ => MeasureSpec::truncated_gaussian(n, rng.random_range(0.8..1.5), rng.random_range(1.5..3.0)),
    }
}

fn pow_err(x: f64, dx: f64, a: f64) -> f64 {
    if dx == 0.0 {
        0.0
    } else {
        (a * x.powf(a - 1.0) * dx).abs()
    }
}

fn tag(report: &mut CheckReport, m: &MeasureSpec, bodies: &[&BodySpec]) {
    report.notes.push(format!("measure {}", m.kind.name()));
    for b in bodies {
        report.notes.push(format!("body {}", b.kind.name()));
    }
    report.detail("n", m.dim as f64);
}

/// A pair `(E, F)` whose Minkowski combinations stay in the catalog: two
/// boxes, or a body and a dilate of it.
fn combinable_pair<R: Rng>(n: usize, rng: &mut R) -> Result<(BodySpec, BodySpec)> {
    if rng.random_bool(0.5) {
        let a = BodySpec::cuboid((0..n).map(|_| rng.random_range(0.3..1.5)).collect())?;
        let b = BodySpec::cuboid((0..n).map(|_| rng.random_range(0.3..1.5)).collect())?;
        Ok((a, b))
    } else {
        let a = random_symmetric_body(n, rng)?;
        let b = a.dilate(rng.random_range(0.3..2.0))?;
        Ok((a, b))
    }
}

/// q-concavity: `μ(λE + (1−λ)F)^q ≥ λμ(E)^q + (1−λ)μ(F)^q`.
fn lemma25(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = q_concave_measure(n, rng)?;
    let q = m.q_exponent().expect("q-concave measure");
    let (e, f) = combinable_pair(n, rng)?;
    let lambda = rng.random_range(0.1..0.9);
    let c = e.minkowski_combination(&f, lambda)?;
    let eval = cfg.eval();
    let me = body_measure(&m, &e, &eval)?;
    let mf = body_measure(&m, &f, &eval)?;
    let mc = body_measure(&m, &c, &eval)?;
    let mut r = CheckReport::new("lemma25", cfg);
    tag(&mut r, &m, &[&e, &f]);
    r.value("measure_e", &me);
    r.value("measure_f", &mf);
    r.value("measure_combination", &mc);
    r.detail("lambda", lambda);
    r.detail("q", q);
    let lhs = lambda * me.value.powf(q) + (1.0 - lambda) * mf.value.powf(q);
    let rhs = mc.value.powf(q);
    let noise = lambda * pow_err(me.value, me.error_estimate, q)
        + (1.0 - lambda) * pow_err(mf.value, mf.error_estimate, q)
        + pow_err(mc.value, mc.error_estimate, q);
    Ok(r.inequality(lhs, rhs, noise))
}

/// `μ(E)^{1−q} μ(F)^q ≤ q μ₁(E, F)` for homogeneous densities, with `F` a
/// ball or `E` itself (where it is an equality).
fn lemma26(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = homogeneous_measure(n, rng)?;
    let q = m.q_exponent().expect("homogeneous q-concave measure");
    let e = random_symmetric_body(n, rng)?;
    let eval = cfg.eval();
    let me = body_measure(&m, &e, &eval)?;
    let (with, mf) = if rng.random_bool(0.5) {
        let rho = rng.random_range(0.3..2.0);
        let mb = m.ball_mass(rho)?;
        (MixedWith::Ball { radius: rho }, mb)
    } else {
        (MixedWith::Itself, Estimate { value: me.value, error: me.error_estimate })
    };
    let mixed = mixed_measure(&m, &e, &with, MixedMethod::BoundaryIntegral, &eval)?;
    let mut r = CheckReport::new("lemma26", cfg);
    tag(&mut r, &m, &[&e]);
    r.value("measure_e", &me);
    r.value("mixed", &mixed);
    r.detail("q", q);
    r.detail("measure_f", mf.value);
    if with == MixedWith::Itself {
        r.branch = Some("f_equals_e".into());
    }
    let lhs = me.value.powf(1.0 - q) * mf.value.powf(q);
    let rhs = q * mixed.value;
    let noise = pow_err(me.value, me.error_estimate, 1.0 - q) * mf.value.powf(q)
        + me.value.powf(1.0 - q) * pow_err(mf.value, mf.error, q)
        + q * mixed.error_estimate;
    Ok(r.inequality(lhs, rhs, noise))
}

/// Measure of a star body from its radial function,
/// `μ(L) = q ∫_S ρ^{1/q} g`, against the general measure path.
fn lemma27(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = if rng.random_bool(0.3) {
        MeasureSpec::radial_power(n, rng.random_range(0.5..2.0))?
    } else {
        homogeneous_measure(n, rng)?
    };
    let l = random_symmetric_body(n, rng)?;
    let general = body_measure(
        &m,
        &l,
        &EvalConfig {
            closed_forms: false,
            ..cfg.eval()
        },
    )?;
    let radial = body_measure_homogeneous(&m, &l, &cfg.eval())?;
    let mut r = CheckReport::new("lemma27", cfg);
    tag(&mut r, &m, &[&l]);
    r.value("general_path", &general);
    r.value("radial_path", &radial);
    Ok(r.identity(general.value, radial.value, general.error_estimate + radial.error_estimate))
}

/// `μ₁(E, F) ≥ μ₁(E, E) + (μ(F)^q − μ(E)^q)/(q μ(E)^{q−1})` for q-concave
/// measures.
fn lemma52(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = q_concave_measure(n, rng)?;
    let q = m.q_exponent().expect("q-concave measure");
    let e = random_symmetric_body(n, rng)?;
    let eval = cfg.eval();
    let me = body_measure(&m, &e, &eval)?;
    let self_mixed = mixed_measure(&m, &e, &MixedWith::Itself, MixedMethod::BoundaryIntegral, &eval)?;
    let mut r = CheckReport::new("lemma52", cfg);
    tag(&mut r, &m, &[&e]);
    r.value("measure_e", &me);
    r.value("mixed_e_e", &self_mixed);
    r.detail("q", q);
    let (mixed, mf) = if rng.random_bool(0.8) {
        let rho = rng.random_range(0.3..2.0);
        r.detail("ball_radius", rho);
        let v = mixed_measure(&m, &e, &MixedWith::Ball { radius: rho }, MixedMethod::BoundaryIntegral, &eval)?;
        (v, m.ball_mass(rho)?)
    } else {
        r.branch = Some("f_equals_e".into());
        (self_mixed.clone(), Estimate { value: me.value, error: me.error_estimate })
    };
    r.value("mixed_e_f", &mixed);
    let gap = (mf.value.powf(q) - me.value.powf(q)) / (q * me.value.powf(q - 1.0));
    let rhs = mixed.value;
    let lhs = self_mixed.value + gap;
    // d gap / d μ(E) = ((q−1)μ(F)^q μ(E)^{−q} − 1)/q
    let dgap_de = ((q - 1.0) * mf.value.powf(q) * me.value.powf(-q) - 1.0) / q;
    let noise = mixed.error_estimate
        + self_mixed.error_estimate
        + dgap_de.abs() * me.error_estimate
        + pow_err(mf.value, mf.error, q) / (q * me.value.powf(q - 1.0));
    Ok(r.inequality(lhs, rhs, noise))
}

/// `μ(tK) ≥ tⁿ μ(K)` for ray-decreasing densities and `t ∈ (0, 1]`.
fn lemma62(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = ray_decreasing_measure(n, rng)?;
    let k = random_symmetric_body(n, rng)?;
    let t = if rng.random_bool(0.15) { 1.0 } else { rng.random_range(0.05..1.0) };
    let eval = cfg.eval();
    let mk = body_measure(&m, &k, &eval)?;
    let mt = body_measure(&m, &k.dilate(t)?, &eval)?;
    let mut r = CheckReport::new("lemma62", cfg);
    tag(&mut r, &m, &[&k]);
    r.value("measure_k", &mk);
    r.value("measure_tk", &mt);
    r.detail("t", t);
    let c = t.powi(n as i32);
    Ok(r.inequality(c * mk.value, mt.value, c * mk.error_estimate + mt.error_estimate))
}

/// Endpoint surrogates for the limits of `μ₁(xB, B)/μ(xB)` at 0 and infinity:
/// `x·ratio ≤ n` at both ends, `x·ratio ≥ ∫_S g/(ω_n ‖g‖)` at the small end,
/// and the ratio decreasing from one end to the other.
fn lemma63(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = ray_decreasing_measure(n, rng)?;
    let eval = cfg.eval();
    let b = BodySpec::ball(n, 1.0)?;
    let nf = n as f64;
    let ratio_at = |x: f64| -> Result<(f64, f64, FunctionalValue, FunctionalValue)> {
        let xb = b.dilate(x)?;
        let mixed = mixed_measure(&m, &xb, &MixedWith::Ball { radius: 1.0 }, MixedMethod::BoundaryIntegral, &eval)?;
        let mass = body_measure(&m, &xb, &eval)?;
        let ratio = mixed.value / mass.value;
        let err = mixed.error_estimate / mass.value + ratio * mass.error_estimate / mass.value;
        Ok((ratio, err, mixed, mass))
    };
    let (small, large) = (1e-3, 1e3);
    let (rs, es, ms, vs) = ratio_at(small)?;
    let (rl, el, ml, vl) = ratio_at(large)?;
    let g_sup = m.sup_on_ball(1.0);
    let sphere = sphere_rule(n, cfg.level.min(3), cfg.seed)?.integrate(|u| m.density(u));
    let lower = sphere.value / (ball_volume(n) * g_sup);

    let mut r = CheckReport::new("lemma63", cfg);
    tag(&mut r, &m, &[&b]);
    for (name, v) in [("mixed_small", &ms), ("mass_small", &vs), ("mixed_large", &ml), ("mass_large", &vl)] {
        r.value(name, v);
    }
    r.detail("x_small", small);
    r.detail("x_large", large);
    r.detail("scaled_ratio_small", small * rs);
    r.detail("scaled_ratio_large", large * rl);
    r.branch = Some("upper_small".into());
    let mut r = r.inequality(small * rs, nf, small * es);
    let sub = |branch: &str, lhs: f64, rhs: f64, noise: f64| {
        let mut s = CheckReport::new("lemma63", cfg);
        s.branch = Some(branch.into());
        s.inequality(lhs, rhs, noise)
    };
    r.sub_reports.push(sub("upper_large", large * rl, nf, large * el));
    r.sub_reports.push(sub("lower_small", lower, small * rs, small * es + sphere.error / (ball_volume(n) * g_sup)));
    r.sub_reports.push(sub("trend", rl, rs, el + es));
    Ok(r)
}

/// `μ₁(E, F) ≥ μ₁(E, E) + μ(E) log(μ(F)/μ(E))` for log-concave measures.
fn lemma64(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = ray_decreasing_measure(n, rng)?;
    let e = random_symmetric_body(n, rng)?;
    let eval = cfg.eval();
    let rho = rng.random_range(0.3..2.0);
    let me = body_measure(&m, &e, &eval)?;
    let mf = m.ball_mass(rho)?;
    let self_mixed = mixed_measure(&m, &e, &MixedWith::Itself, MixedMethod::BoundaryIntegral, &eval)?;
    let mixed = mixed_measure(&m, &e, &MixedWith::Ball { radius: rho }, MixedMethod::BoundaryIntegral, &eval)?;
    let mut r = CheckReport::new("lemma64", cfg);
    tag(&mut r, &m, &[&e]);
    r.value("measure_e", &me);
    r.value("mixed_e_e", &self_mixed);
    r.value("mixed_e_f", &mixed);
    r.detail("ball_radius", rho);
    let log = (mf.value / me.value).ln();
    let lhs = self_mixed.value + me.value * log;
    let noise = mixed.error_estimate
        + self_mixed.error_estimate
        + (log - 1.0).abs() * me.error_estimate
        + me.value * mf.error / mf.value;
    Ok(r.inequality(lhs, mixed.value, noise))
}

/// `∫_G ∫_{S∩H} f dν(H) = |S^{k−1}|/|S^{n−1}| ∫_S f` with the Grassmann
/// average by Monte Carlo, for `f` a power of the radial or support function
/// of a random body.
fn identity32(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let k = rng.random_range(2..n);
    let body = random_symmetric_body(n, rng)?;
    let power = rng.random_range(1..4);
    let use_support = rng.random_bool(0.5);
    let f = |u: &[f64]| -> f64 {
        let v = if use_support { body.support(u) } else { body.radial(u) };
        v.map(|x| x.powi(power)).unwrap_or(f64::NAN)
    };
    let frames: Vec<Frame> = grassmann_sample(n, k, GRASSMANN_FRAMES, cfg.seed ^ 0x3232)?;
    let level = cfg.level.min(3);
    let inner: Vec<f64> = frames
        .par_iter()
        .map(|fr| Ok(subsphere_rule(fr, level, cfg.seed)?.integrate(f).value))
        .collect::<Result<_>>()?;
    let mean = pairwise_sum(&inner) / inner.len() as f64;
    let var = inner.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (inner.len() as f64 - 1.0);
    let se = (var / inner.len() as f64).sqrt();
    let fine = sphere_rule(n, level, cfg.seed)?.integrate(f).value;
    let coarse = sphere_rule(n, level.saturating_sub(1), cfg.seed)?.integrate(f).value;
    let c = sphere_area(k) / sphere_area(n);
    let rhs = c * fine;
    let mut r = CheckReport::new("identity32", cfg);
    r.notes.push(format!("body {}", body.kind.name()));
    r.notes.push(format!("f = {}^{power}", if use_support { "h" } else { "rho" }));
    r.detail("n", n as f64);
    r.detail("k", k as f64);
    r.detail("standard_error", se);
    r.grid_size = frames.len();
    r.provenance.push(digest_of([format!("{:?}", body.kind).as_str(), &cfg.seed.to_string()]));
    Ok(r.identity(mean, rhs, IDENTITY_SE * se + c * (fine - coarse).abs()))
}

/// `|∂L| ≤ n|L|/r` with `r` the inradius.
fn step34(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let l = random_symmetric_body(n, rng)?;
    let eval = cfg.eval();
    let s = surface_area(&l, &eval)?;
    let v = body_measure(&MeasureSpec::lebesgue(n), &l, &eval)?;
    let r = l.radii().inner;
    let mut rep = CheckReport::new("step34", cfg);
    rep.notes.push(format!("body {}", l.kind.name()));
    rep.value("surface_area", &s);
    rep.value("volume", &v);
    rep.detail("n", n as f64);
    rep.detail("inradius", r);
    let c = n as f64 / r;
    Ok(rep.inequality(s.value, c * v.value, s.error_estimate + c * v.error_estimate))
}

/// Parallel section function `A(t)` of a symmetric body: maximal at `t = 0`,
/// and `A^{1/(n−1)}` concave on its support.
fn brunn(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig, concavity: bool) -> Result<CheckReport> {
    let k = random_symmetric_body(n, rng)?;
    let theta = random_unit(n, rng);
    let h = k.support(&theta)?;
    let pts = 11;
    let ts: Vec<f64> = (0..pts).map(|i| h * 0.9 * (2.0 * i as f64 / (pts - 1) as f64 - 1.0)).collect();
    let profile = parallel_section_profile(&k, &theta, &ts, &cfg.eval())?;
    let id = if concavity { "brunn_concavity" } else { "brunn_max" };
    let mut r = CheckReport::new(id, cfg);
    r.notes.push(format!("body {}", k.kind.name()));
    r.detail("n", n as f64);
    r.grid_size = pts;
    r.provenance
        .push(digest_of(profile.iter().map(|p| p.area.inputs_digest.as_str())));
    let areas: Vec<f64> = profile.iter().map(|p| p.area.value).collect();
    let errs: Vec<f64> = profile.iter().map(|p| p.area.error_estimate).collect();
    let max_err = errs.iter().copied().fold(0.0, f64::max);
    if !concavity {
        let centre = pts / 2;
        let (imax, amax) = areas
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &a)| if a > b.1 { (i, a) } else { b });
        r.detail("argmax_t", ts[imax]);
        return Ok(r.inequality(amax, areas[centre], 2.0 * max_err));
    }
    let e = 1.0 / (n as f64 - 1.0);
    let f: Vec<f64> = areas.iter().map(|a| a.powf(e)).collect();
    let mut worst = (f64::INFINITY, 0.0, 0.0, 0.0);
    for i in 1..pts - 1 {
        let chord = 0.5 * (f[i - 1] + f[i + 1]);
        let gap = f[i] - chord;
        if gap < worst.0 {
            let noise = (i - 1..=i + 1).map(|j| pow_err(areas[j], errs[j], e)).sum::<f64>();
            worst = (gap, chord, f[i], noise);
        }
    }
    Ok(r.inequality(worst.1, worst.2, worst.3))
}

/// Averaged hypothesis `∫_S P_{μ,K} ≤ ∫_S μ_{n−1}(L ∩ θ⊥)` for homogeneous
/// densities, enforced by dilating `L` onto equality, then
/// `μ(K) ≤ ((1−1/n)/(1−q))^{1/(1−q)} μ(L)`.
///
/// Both averages come from identities rather than a sphere rule over the
/// weighted projections: `∫_S P_{μ,K} = nω_{n−1} ∫₀¹ μ₁(tK, B) dt`, which is
/// `nω_{n−1} q μ₁(K, B)` for a `1/q`-homogeneous measure, and
/// `∫_S μ_{n−1}(L ∩ θ⊥) = |S^{n−2}| ∫_S ∫₀^{ρ_L(u)} g(tu) t^{n−2} dt du`.
fn remark41(n: usize, rng: &mut ChaCha8Rng, cfg: &CheckConfig) -> Result<CheckReport> {
    let m = homogeneous_measure(n, rng)?;
    let k = random_symmetric_body(n, rng)?;
    let l = random_symmetric_body(n, rng)?;
    averaged_hypothesis_check(&m, &k, &l, cfg)
}

/// The averaged-hypothesis check for given `μ`, `K` and `L`; `L` is dilated
/// onto equality of the two averages.
pub(crate) fn averaged_hypothesis_check(
    m: &MeasureSpec,
    k: &BodySpec,
    l: &BodySpec,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let (m, k, l) = (m.clone(), k.clone(), l.clone());
    let n = k.dim;
    let q = m.q_exponent().expect("homogeneous q-concave measure");
    let eval = cfg.eval();
    let nf = n as f64;
    let mixed = mixed_measure(&m, &k, &MixedWith::Ball { radius: 1.0 }, MixedMethod::BoundaryIntegral, &eval)?;
    let p_avg = nf * ball_volume(n - 1) * q * mixed.value;
    let p_err = nf * ball_volume(n - 1) * q * mixed.error_estimate;
    let section_total = |level: u8| -> Result<f64> {
        let rule = match m.kink_pole() {
            Some(p) => sphere_rule_with_pole(&p, level, cfg.seed)?,
            None => sphere_rule(n, level, cfg.seed)?,
        };
        let vals: Vec<f64> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(u, w)| Ok(w * m.radial_integral(u, l.radial(u)?, n - 1)))
            .collect::<Result<_>>()?;
        Ok(sphere_area(n - 1) * pairwise_sum(&vals))
    };
    let level = cfg.level.min(4);
    let s_fine = section_total(level)?;
    let s_coarse = section_total(level.saturating_sub(1))?;
    let s_err = (s_fine - s_coarse).abs();
    // the section average scales as s^{1/q − 1} under L ↦ sL
    let deg = 1.0 / q - 1.0;
    let scale = (p_avg / s_fine).powf(1.0 / deg);
    let ls = l.dilate(scale)?;
    let mk = body_measure(&m, &k, &eval)?;
    let ml = body_measure(&m, &ls, &eval)?;
    let c = ((1.0 - 1.0 / nf) / (1.0 - q)).powf(1.0 / (1.0 - q));
    let mut r = CheckReport::new("remark41", cfg);
    tag(&mut r, &m, &[&k, &l]);
    r.value("mixed_k_ball", &mixed);
    r.value("measure_k", &mk);
    r.value("measure_l", &ml);
    r.detail("l_scale", scale);
    r.detail("q", q);
    r.detail("projection_average", p_avg);
    r.detail("measure_ratio", mk.value / ml.value);
    r.detail("predicted_ratio", c);
    // after dilation both averages agree; the margin carries their errors
    r.hypothesis_noise = p_err + s_err * scale.powf(deg);
    // relative errors of the averages move the enforced scale and hence μ(L)
    let rel = (p_err / p_avg + s_err / s_fine) / deg;
    let noise = mk.error_estimate + c * (ml.error_estimate + ml.value * rel * (nf + m.homogeneity().unwrap_or(0.0)));
    Ok(r.inequality(mk.value, c * ml.value, noise))
}
