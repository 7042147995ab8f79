mod common;

use std::f64::consts::PI;

use common::*;
use geomtomo::functionals::{
    body_measure, body_measure_homogeneous, cauchy_formula_gap, isotropic_constant, kdim_projection_volume,
    kdim_section_volume, mean_width, mixed_measure, mu_projection, parallel_section_profile, projection_area,
    section_measure, surface_area, IsotropicConvention, MixedMethod, MixedWith,
};
use geomtomo::{BodySpec, EvalConfig, Frame, MeasureSpec, Method};

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn no_closed() -> EvalConfig {
    EvalConfig {
        closed_forms: false,
        ..EvalConfig::default()
    }
}

fn diag3() -> Vec<f64> {
    vec![1.0 / 3f64.sqrt(); 3]
}

#[test]
fn body_measure_examples() {
    let leb = MeasureSpec::lebesgue(3);
    let ball = BodySpec::ball(3, 1.0).unwrap();
    let v = body_measure(&leb, &ball, &cfg()).unwrap();
    assert_eq!(v.method, Method::Analytic);
    assert_eq!(v.error_estimate, 0.0);
    assert!(rel(v.value, 4.0 * PI / 3.0) < 1e-14);

    let cube = BodySpec::cube(3, 1.0).unwrap();
    for c in [cfg(), no_closed()] {
        let v = body_measure(&leb, &cube, &c).unwrap();
        assert!(rel(v.value, 8.0) <= 1e-6, "{v:?}");
    }

    // πR⁴/2 for |x|² on the disc of radius R
    for r in [0.5, 1.0, 1.7] {
        let m = MeasureSpec::radial_power(2, 2.0).unwrap();
        let b = BodySpec::ball(2, r).unwrap();
        let want = PI * r.powi(4) / 2.0;
        for c in [cfg(), no_closed()] {
            assert!(rel(body_measure(&m, &b, &c).unwrap().value, want) < 1e-10);
        }
        assert!(rel(body_measure_homogeneous(&m, &b, &cfg()).unwrap().value, want) < 1e-10);
    }
}

#[test]
fn body_measure_matches_monte_carlo() {
    let w = vec![1.0, 0.0, 0.0];
    let measures = [
        MeasureSpec::cone_power(w.clone(), 1.0).unwrap(),
        MeasureSpec::gaussian(3, 0.8).unwrap(),
        MeasureSpec::radial_power(3, 1.5).unwrap(),
    ];
    let bodies = [
        BodySpec::cuboid(vec![1.0, 0.7, 1.2]).unwrap(),
        BodySpec::cross_polytope(3, 1.3).unwrap(),
        BodySpec::lp_ball(3, 3.0, 1.1).unwrap(),
        BodySpec::ellipsoid(vec![0.6, 1.0, 1.4]).unwrap(),
    ];
    for m in &measures {
        for k in &bodies {
            let v = body_measure(m, k, &cfg()).unwrap();
            let (mc, se) = mc_measure(k, |x| m.density(x), 400_000, 3);
            assert!((v.value - mc).abs() < 4.0 * se + 1e-9, "{:?} {:?}: {} vs {mc} ± {se}", m.kind, k.kind, v.value);
            assert!(v.rel_error() < 1e-3, "{v:?}");
        }
    }
}

#[test]
fn two_paths_for_homogeneous_measures() {
    let mut r = rng(27);
    for n in [2, 3, 4] {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        for m in [
            MeasureSpec::lebesgue(n),
            MeasureSpec::cone_power(w.clone(), 1.0).unwrap(),
            MeasureSpec::radial_power(n, 2.0).unwrap(),
        ] {
            for _ in 0..4 {
                let k = random_body(&mut r, n);
                let a = body_measure(&m, &k, &no_closed()).unwrap();
                let b = body_measure_homogeneous(&m, &k, &cfg()).unwrap();
                let tol = 3.0 * (a.error_estimate + b.error_estimate) + 1e-9 * a.value;
                assert!((a.value - b.value).abs() <= tol, "{:?} {:?}: {a:?} {b:?}", m.kind, k.kind);
                assert!(rel(a.value, b.value) < 5e-3, "{:?} {:?}: {a:?} {b:?}", m.kind, k.kind);
            }
        }
    }
}

#[test]
fn dilation_scaling_for_homogeneous_measures() {
    let mut r = rng(5);
    for n in [2, 3] {
        let mut w = vec![0.0; n];
        w[n - 1] = 1.0;
        let m = MeasureSpec::cone_power(w, 2.0).unwrap();
        for _ in 0..6 {
            let k = random_body(&mut r, n);
            let t = 1.7;
            let a = body_measure(&m, &k, &cfg()).unwrap().value;
            let b = body_measure(&m, &k.dilate(t).unwrap(), &cfg()).unwrap().value;
            assert!(rel(b, t.powf(n as f64 + 2.0) * a) < 1e-8, "{:?}", k.kind);
        }
    }
}

#[test]
fn section_examples() {
    let leb = MeasureSpec::lebesgue(3);
    let ball = BodySpec::ball(3, 1.0).unwrap();
    let mut r = rng(1);
    for _ in 0..5 {
        let h = Frame::hyperplane(&random_unit(&mut r, 3)).unwrap();
        assert!(rel(section_measure(&leb, &ball, &h, &cfg()).unwrap().value, PI) < 1e-14);
        assert!(rel(section_measure(&leb, &ball, &h, &no_closed()).unwrap().value, PI) < 1e-12);
    }
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let e3 = Frame::hyperplane(&[0.0, 0.0, 1.0]).unwrap();
    assert!(rel(section_measure(&leb, &cube, &e3, &cfg()).unwrap().value, 4.0) < 1e-12);
    let d = Frame::hyperplane(&diag3()).unwrap();
    let hex = section_measure(&leb, &cube, &d, &cfg()).unwrap().value;
    let (mc, se) = mc_section_area(&cube, &d, 1_000_000, 9);
    assert!((hex - mc).abs() < 4.0 * se);
    assert!(rel(hex, 3.0 * 3f64.sqrt()) < 1e-12);
}

#[test]
fn weighted_sections_match_monte_carlo() {
    let mut r = rng(77);
    let m = MeasureSpec::cone_power(vec![0.6, 0.8, 0.0], 1.0).unwrap();
    let g = MeasureSpec::gaussian(3, 0.7).unwrap();
    for k in [
        BodySpec::cuboid(vec![1.0, 0.6, 1.3]).unwrap(),
        BodySpec::lp_ball(3, 4.0, 1.0).unwrap(),
        BodySpec::ellipsoid(vec![1.2, 0.7, 1.0]).unwrap(),
        BodySpec::ball(3, 1.1).unwrap(),
    ] {
        for meas in [&m, &g] {
            let th = random_unit(&mut r, 3);
            let h = Frame::hyperplane(&th).unwrap();
            let v = section_measure(meas, &k, &h, &cfg()).unwrap();
            let q = section_measure(meas, &k, &h, &no_closed()).unwrap();
            assert!(rel(v.value, q.value) < 1e-6, "{:?} {:?} {v:?} {q:?}", k.kind, meas.kind);
            // Monte Carlo over the plane
            let rr = k.radii().outer;
            let mut gen = rng(3);
            let n = 400_000;
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                use rand::Rng;
                let y0: f64 = gen.random_range(-rr..rr);
                let y1: f64 = gen.random_range(-rr..rr);
                let x: Vec<f64> = (0..3).map(|j| y0 * h.basis[0][j] + y1 * h.basis[1][j]).collect();
                let f = if k.contains(&x) { meas.density(&x) } else { 0.0 };
                s += f;
                s2 += f * f;
            }
            let mean = s / n as f64;
            let se = 4.0 * rr * rr * ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
            assert!((v.value - 4.0 * rr * rr * mean).abs() < 4.0 * se, "{:?} {:?}", k.kind, meas.kind);
        }
    }
}

#[test]
fn kdim_section_examples() {
    let ball = BodySpec::ball(4, 1.0).unwrap();
    let mut r = rng(2);
    for k in 1..4 {
        let f = &geomtomo::quadrature::grassmann_sample(4, k, 1, 11).unwrap()[0];
        let v = kdim_section_volume(&ball, f, &cfg()).unwrap();
        assert!(rel(v.value, omega(k)) < 1e-14);
        let q = kdim_section_volume(&ball, f, &no_closed()).unwrap();
        assert!(rel(q.value, omega(k)) < 1e-12);
    }
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let plane = Frame::coordinate(3, &[0, 1]).unwrap();
    assert!(rel(kdim_section_volume(&cube, &plane, &cfg()).unwrap().value, 4.0) < 1e-12);
    let e = BodySpec::ellipsoid(vec![1.0, 2.0, 3.0]).unwrap();
    assert!(rel(kdim_section_volume(&e, &plane, &cfg()).unwrap().value, 2.0 * PI) < 1e-14);
    assert!(rel(kdim_section_volume(&e, &plane, &no_closed()).unwrap().value, 2.0 * PI) < 1e-8);
    // random 2-planes against membership counting
    for _ in 0..3 {
        let f = &geomtomo::quadrature::grassmann_sample(3, 2, 1, r.random_seed()).unwrap()[0];
        for k in [e.clone(), BodySpec::lp_ball(3, 3.0, 1.0).unwrap()] {
            let v = kdim_section_volume(&k, f, &cfg()).unwrap();
            let (mc, se) = mc_section_area(&k, f, 400_000, 5);
            assert!((v.value - mc).abs() < 4.0 * se, "{:?}", k.kind);
        }
    }
}

trait Seed {
    fn random_seed(&mut self) -> u64;
}

impl Seed for rand_chacha::ChaCha8Rng {
    fn random_seed(&mut self) -> u64 {
        use rand::Rng;
        self.random()
    }
}

#[test]
fn projection_examples() {
    let ball = BodySpec::ball(3, 1.0).unwrap();
    let mut r = rng(4);
    for _ in 0..5 {
        let h = Frame::hyperplane(&random_unit(&mut r, 3)).unwrap();
        assert!(rel(projection_area(&ball, &h, &cfg()).unwrap().value, PI) < 1e-14);
        assert!(rel(projection_area(&ball, &h, &no_closed()).unwrap().value, PI) < 1e-10);
    }
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let e3 = Frame::hyperplane(&[0.0, 0.0, 1.0]).unwrap();
    assert!(rel(projection_area(&cube, &e3, &cfg()).unwrap().value, 4.0) < 1e-14);
    let d = Frame::hyperplane(&diag3()).unwrap();
    let v = projection_area(&cube, &d, &cfg()).unwrap();
    assert_eq!(v.method, Method::FacetSum);
    let (mc, se) = mc_shadow_area(&cube, &d, 400_000, 8);
    assert!((v.value - mc).abs() < 4.0 * se);
    assert!(rel(v.value, 4.0 * 3f64.sqrt()) < 1e-12);
}

#[test]
fn kdim_projection_examples() {
    for k in 1..4 {
        let f = &geomtomo::quadrature::grassmann_sample(4, k, 1, 7).unwrap()[0];
        let b = BodySpec::ball(4, 1.5).unwrap();
        assert!(rel(kdim_projection_volume(&b, f, &cfg()).unwrap().value, omega(k) * 1.5f64.powi(k as i32)) < 1e-14);
    }
    let e = BodySpec::ellipsoid(vec![1.0, 2.0, 3.0]).unwrap();
    let h = Frame::coordinate(3, &[0, 2]).unwrap();
    assert!(rel(kdim_projection_volume(&e, &h, &cfg()).unwrap().value, 3.0 * PI) < 1e-14);
    let cube = BodySpec::cube(3, 1.0).unwrap();
    for (i, f) in geomtomo::quadrature::grassmann_sample(3, 2, 3, 99).unwrap().iter().enumerate() {
        let v = kdim_projection_volume(&cube, f, &cfg()).unwrap();
        let (mc, _) = mc_shadow_area(&cube, f, 400_000, i as u64);
        assert!(rel(v.value, mc) < 1e-2);
    }
    // shadows in higher dimension: zonotope sum, vertex hulls, sampled outlines
    for (i, f) in geomtomo::quadrature::grassmann_sample(5, 2, 3, 5).unwrap().iter().enumerate() {
        for k in [
            BodySpec::cuboid(vec![1.0, 0.5, 0.8, 1.2, 0.9]).unwrap(),
            BodySpec::cross_polytope(5, 1.2).unwrap(),
            BodySpec::lp_ball(5, 3.0, 1.0).unwrap(),
        ] {
            let v = kdim_projection_volume(&k, f, &cfg()).unwrap();
            let (mc, se) = mc_shadow_area(&k, f, 200_000, 40 + i as u64);
            assert!((v.value - mc).abs() < 4.0 * se + 2e-3 * mc, "{:?}: {v:?} vs {mc}", k.kind);
        }
    }
    // 3-dimensional shadows of 4-dimensional polytopes: compare with hyperplane projections
    let cross = BodySpec::cross_polytope(4, 1.0).unwrap();
    let t = random_unit(&mut rng(1), 4);
    let h = Frame::hyperplane(&t).unwrap();
    let sub = Frame::subspace(4, h.basis.clone()).unwrap();
    let a = kdim_projection_volume(&cross, &sub, &cfg()).unwrap().value;
    let b = projection_area(&cross, &h, &cfg()).unwrap().value;
    assert!(rel(a, b) < 1e-10, "{a} {b}");
}

#[test]
fn mu_projection_examples() {
    let mut r = rng(12);
    for n in [2, 3, 4] {
        for _ in 0..6 {
            let k = random_body(&mut r, n);
            let h = Frame::hyperplane(&random_unit(&mut r, n)).unwrap();
            let p = mu_projection(&MeasureSpec::lebesgue(n), &k, &h, &cfg()).unwrap();
            let a = projection_area(&k, &h, &cfg()).unwrap();
            assert!(rel(p.value, a.value) < 5e-3, "{:?}: {p:?} {a:?}", k.kind);
        }
        // radial power on a ball: nω_{n−1} r^{n+p−1}/(n+p)
        for (p, rad) in [(1.0, 0.7), (3.0, 1.3)] {
            let m = MeasureSpec::radial_power(n, p).unwrap();
            let b = BodySpec::ball(n, rad).unwrap();
            let h = Frame::hyperplane(&random_unit(&mut r, n)).unwrap();
            let want = n as f64 * omega(n - 1) * rad.powf(n as f64 + p - 1.0) / (n as f64 + p);
            assert!(rel(mu_projection(&m, &b, &h, &cfg()).unwrap().value, want) < 1e-10);
        }
    }
    let b = BodySpec::ball(3, 1.0).unwrap();
    let h = Frame::hyperplane(&[0.3, 0.4, 0.5]).unwrap();
    assert!(rel(mu_projection(&MeasureSpec::lebesgue(3), &b, &h, &cfg()).unwrap().value, PI) < 1e-12);
}

#[test]
fn mixed_measure_examples() {
    let leb = MeasureSpec::lebesgue(3);
    let b1 = BodySpec::ball(3, 1.0).unwrap();
    let unit = MixedWith::Ball { radius: 1.0 };
    for method in [MixedMethod::BoundaryIntegral, MixedMethod::FiniteDifference] {
        let v = mixed_measure(&leb, &b1, &unit, method, &cfg()).unwrap();
        assert!(rel(v.value, 4.0 * PI) < 1e-6, "{method:?} {v:?}");
        for t in [0.5, 2.0] {
            let bt = BodySpec::ball(3, t).unwrap();
            let v = mixed_measure(&leb, &bt, &unit, method, &cfg()).unwrap();
            assert!(rel(v.value, 3.0 * omega(3) * t * t) < 1e-6, "{method:?} {v:?}");
        }
    }
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let seg = MixedWith::Segment {
        direction: vec![0.0, 0.0, 1.0],
    };
    let bi = mixed_measure(&leb, &cube, &seg, MixedMethod::BoundaryIntegral, &cfg()).unwrap();
    assert!(rel(bi.value, 8.0) < 1e-12);
    let fd = mixed_measure(&leb, &cube, &seg, MixedMethod::FiniteDifference, &cfg()).unwrap();
    assert!(rel(fd.value, 8.0) < 1e-2, "{fd:?}");
}

#[test]
fn mixed_measure_paths_agree() {
    let mut r = rng(31);
    for n in [2, 3] {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        let measures = [
            MeasureSpec::lebesgue(n),
            MeasureSpec::gaussian(n, 1.0).unwrap(),
            MeasureSpec::cone_power(w, 1.0).unwrap(),
        ];
        for m in &measures {
            for _ in 0..3 {
                let k = random_body(&mut r, n);
                let with = match r.random_seed() % 3 {
                    0 => MixedWith::Ball { radius: 1.0 },
                    1 => MixedWith::Segment {
                        direction: random_unit(&mut r, n),
                    },
                    _ => MixedWith::Itself,
                };
                let a = mixed_measure(m, &k, &with, MixedMethod::BoundaryIntegral, &cfg()).unwrap();
                let b = mixed_measure(m, &k, &with, MixedMethod::FiniteDifference, &cfg()).unwrap();
                println!("{:?} {:?} {:?}: {} {} ({})", m.kind, k.kind, with, a.value, b.value, rel(a.value, b.value));
                assert!(rel(a.value, b.value) < 1e-2, "{:?} {:?} {with:?}: {a:?} {b:?}", m.kind, k.kind);
            }
        }
    }
}

#[test]
fn surface_area_and_cauchy() {
    let b = BodySpec::ball(3, 1.0).unwrap();
    assert!(rel(surface_area(&b, &cfg()).unwrap().value, 4.0 * PI) < 1e-14);
    assert!(rel(surface_area(&b, &no_closed()).unwrap().value, 4.0 * PI) < 1e-10);
    assert!(cauchy_formula_gap(&b, &cfg()).unwrap() <= 1e-6);
    let cube = BodySpec::cube(3, 1.0).unwrap();
    assert!(rel(surface_area(&cube, &cfg()).unwrap().value, 24.0) < 1e-14);
    assert!(rel(surface_area(&cube, &no_closed()).unwrap().value, 24.0) < 1e-12);
    assert!(cauchy_formula_gap(&cube, &cfg()).unwrap() <= 5e-3);
    let e = BodySpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    let s = surface_area(&e, &cfg()).unwrap().value;
    assert!(rel(s, ellipse_perimeter(1.0, 2.0)) < 1e-6, "{s}");
    assert!(cauchy_formula_gap(&e, &cfg()).unwrap() < 1e-6);
    for k in [
        BodySpec::lp_ball(3, 3.0, 1.0).unwrap(),
        BodySpec::cross_polytope(3, 1.0).unwrap(),
        BodySpec::ellipsoid(vec![0.5, 1.0, 1.5]).unwrap(),
    ] {
        assert!(cauchy_formula_gap(&k, &cfg()).unwrap() < 5e-3, "{:?}", k.kind);
    }
}

#[test]
fn mean_width_examples() {
    for r in [0.5, 2.0] {
        let b = BodySpec::ball(3, r).unwrap();
        assert!(rel(mean_width(&b, &cfg()).unwrap().value, r) < 1e-14);
        assert!(rel(mean_width(&b, &no_closed()).unwrap().value, r) < 1e-12);
    }
    let cube = BodySpec::cube(3, 1.0).unwrap();
    assert!(rel(mean_width(&cube, &cfg()).unwrap().value, 1.5) < 1e-14);
    let g = mean_width(&cube, &no_closed()).unwrap();
    assert!(rel(g.value, 1.5) < 1e-3, "{g:?}");
    assert!((g.value - 1.5).abs() <= 3.0 * g.error_estimate, "{g:?}");
    let e = BodySpec::ellipsoid(vec![1.0, 1.0]).unwrap();
    assert!(rel(mean_width(&e, &cfg()).unwrap().value, 1.0) < 1e-12);
}

#[test]
fn isotropic_constant_examples() {
    let cube = BodySpec::cube(3, 0.5).unwrap();
    let v = isotropic_constant(&cube, 200_000, 1, IsotropicConvention::Diagonal).unwrap();
    assert!(rel(v.value, 1.0 / 12.0) < 0.02, "{v:?}");
    let s = isotropic_constant(&cube, 200_000, 1, IsotropicConvention::SquareRoot).unwrap();
    assert!(rel(s.value * s.value, v.value) < 1e-12);
    for n in [2, 3, 4] {
        let r = omega(n).powf(-1.0 / n as f64);
        let b = BodySpec::ball(n, r).unwrap();
        let v = isotropic_constant(&b, 200_000, 2, IsotropicConvention::Diagonal).unwrap();
        let want = omega(n).powf(-2.0 / n as f64) / (n as f64 + 2.0);
        assert!(rel(v.value, want) < 0.02, "{n}: {v:?} {want}");
    }
    let e = BodySpec::ellipsoid(vec![0.5, 1.0, 2.0]).unwrap();
    let b = BodySpec::ball(3, 1.0).unwrap();
    let ve = isotropic_constant(&e, 200_000, 3, IsotropicConvention::Diagonal).unwrap();
    let vb = isotropic_constant(&b, 200_000, 4, IsotropicConvention::Diagonal).unwrap();
    assert!((ve.value - vb.value).abs() < 4.0 * (ve.error_estimate + vb.error_estimate));
}

#[test]
fn profile_examples() {
    let b = BodySpec::ball(3, 1.0).unwrap();
    let ts: Vec<f64> = (-10..=10).map(|i| i as f64 / 10.0).collect();
    for c in [cfg(), no_closed()] {
        for p in parallel_section_profile(&b, &[0.0, 0.0, 1.0], &ts, &c).unwrap() {
            assert!((p.area.value - PI * (1.0 - p.t * p.t)).abs() < 1e-9, "{p:?}");
        }
    }
    let cube = BodySpec::cube(3, 1.0).unwrap();
    for p in parallel_section_profile(&cube, &[0.0, 0.0, 1.0], &[-0.9, -0.3, 0.0, 0.5, 0.99], &cfg()).unwrap() {
        assert!(rel(p.area.value, 4.0) < 1e-12);
    }
}

#[test]
fn brunn_profile_on_random_bodies() {
    let mut r = rng(20);
    for i in 0..20 {
        let n = 2 + i % 3;
        let k = random_body(&mut r, n);
        let th = random_unit(&mut r, n);
        let h = k.support(&th).unwrap();
        let ts: Vec<f64> = (-8..=8).map(|j| 0.95 * h * j as f64 / 8.0).collect();
        let prof = parallel_section_profile(&k, &th, &ts, &cfg()).unwrap();
        let a0 = prof[8].area.value;
        let e = 1e-9 + prof.iter().map(|p| p.area.error_estimate).fold(0.0, f64::max);
        for p in &prof {
            assert!(p.area.value <= a0 + e, "{:?} {p:?} {a0}", k.kind);
        }
        let root: Vec<f64> = prof.iter().map(|p| p.area.value.powf(1.0 / (n as f64 - 1.0))).collect();
        for j in 1..root.len() - 1 {
            assert!(root[j] >= 0.5 * (root[j - 1] + root[j + 1]) - 1e-6, "{:?} at {j}", k.kind);
        }
    }
}
