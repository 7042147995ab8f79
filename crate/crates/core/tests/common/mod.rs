//! Independent oracles shared by the integration tests. None of these reuse
//! the library's quadrature: they are Monte Carlo counts, brute-force
//! searches or one-dimensional classical rules.

#![allow(dead_code)]

use geomtomo::{BodySpec, Frame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let l = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if l > 1e-6 {
            return g.iter().map(|v| v / l).collect();
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Random convex symmetric body from the catalog kinds.
pub fn random_body(rng: &mut ChaCha8Rng, n: usize) -> BodySpec {
    match rng.random_range(0..5) {
        0 => BodySpec::ball(n, rng.random_range(0.5..1.5)).unwrap(),
        1 => BodySpec::ellipsoid((0..n).map(|_| rng.random_range(0.5..1.5)).collect()).unwrap(),
        2 => BodySpec::cuboid((0..n).map(|_| rng.random_range(0.5..1.5)).collect()).unwrap(),
        3 => BodySpec::cross_polytope(n, rng.random_range(0.8..1.6)).unwrap(),
        _ => {
            let p = [1.5, 3.0, 4.0][rng.random_range(0..3)];
            BodySpec::lp_ball(n, p, rng.random_range(0.6..1.4)).unwrap()
        }
    }
}

/// Monte Carlo estimate (value, standard error) of the area of a planar
/// shadow `K|H`: uniform points in a bounding square are tested against the
/// support inequalities `⟨y, v⟩ ≤ h_K(v)` on 2048 directions of `H`.
pub fn mc_shadow_area(k: &BodySpec, h: &Frame, samples: usize, seed: u64) -> (f64, f64) {
    assert_eq!(h.k, 2);
    let dirs = 2048;
    let mut lines = Vec::with_capacity(dirs);
    for i in 0..dirs {
        let a = i as f64 * std::f64::consts::TAU / dirs as f64;
        let (s, c) = a.sin_cos();
        let v: Vec<f64> = (0..k.dim).map(|j| c * h.basis[0][j] + s * h.basis[1][j]).collect();
        lines.push((c, s, k.support(&v).unwrap()));
    }
    let r = lines.iter().map(|l| l.2).fold(0.0_f64, f64::max);
    let mut g = rng(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let y0 = g.random_range(-r..r);
        let y1 = g.random_range(-r..r);
        if lines.iter().all(|(c, s, hv)| c * y0 + s * y1 <= *hv) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let area = 4.0 * r * r;
    (area * p, area * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Monte Carlo (value, standard error) of `|K ∩ H|` for a 2-dimensional frame,
/// by membership of uniform points of a bounding square.
pub fn mc_section_area(k: &BodySpec, h: &Frame, samples: usize, seed: u64) -> (f64, f64) {
    assert_eq!(h.k, 2);
    let r = k.radii().outer;
    let mut g = rng(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let y0 = g.random_range(-r..r);
        let y1 = g.random_range(-r..r);
        let x: Vec<f64> = (0..k.dim).map(|j| y0 * h.basis[0][j] + y1 * h.basis[1][j]).collect();
        if k.contains(&x) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let area = 4.0 * r * r;
    (area * p, area * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Perimeter of the ellipse with semi-axes `a, b` from the complete elliptic
/// integral of the second kind, `4 ∫₀^{π/2} sqrt(a² sin² t + b² cos² t) dt`.
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    4.0 * simpson(
        |t| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt(),
        0.0,
        std::f64::consts::FRAC_PI_2,
        20_000,
    )
}

/// Brute-force Monte Carlo of `μ(K)` with `g` given pointwise; returns
/// (value, standard error).
pub fn mc_measure(k: &BodySpec, g: impl Fn(&[f64]) -> f64, samples: usize, seed: u64) -> (f64, f64) {
    let bbox = k.bounding_box().unwrap();
    let vol: f64 = bbox.iter().map(|(lo, hi)| hi - lo).product();
    let mut r = rng(seed);
    let mut s = 0.0;
    let mut s2 = 0.0;
    let mut x = vec![0.0; k.dim];
    for _ in 0..samples {
        for (xi, (lo, hi)) in x.iter_mut().zip(&bbox) {
            *xi = r.random_range(*lo..*hi);
        }
        let v = if k.contains(&x) { g(&x) } else { 0.0 };
        s += v;
        s2 += v * v;
    }
    let m = s / samples as f64;
    let var = (s2 / samples as f64 - m * m).max(0.0);
    (vol * m, vol * (var / samples as f64).sqrt())
}

/// Unit ball volume by the Gamma function recursion, written out independently.
pub fn omega(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * omega(n - 2),
    }
}
