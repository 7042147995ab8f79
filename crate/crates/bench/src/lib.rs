//! Benchmarks for the quadrature-heavy paths: sphere rules, μ-projections,
//! mixed measures and a full enforced check.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use geomtomo::functionals::{mixed_measure, mu_projection, section_measure, MixedMethod, MixedWith};
use geomtomo::linalg::basis_vector;
use geomtomo::quadrature::sphere_rule;
use geomtomo::verifiers::{verify_gk, CheckConfig};
use geomtomo::{BodySpec, EvalConfig, Frame, MeasureSpec};

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("sphere_rule");
    for level in 1..=4u8 {
        g.bench_with_input(BenchmarkId::new("n3", level), &level, |b, &level| {
            b.iter(|| sphere_rule(3, black_box(level), 0).unwrap().len())
        });
    }
    g.finish();
}

fn functionals(c: &mut Criterion) {
    let cfg = EvalConfig::default();
    let body = BodySpec::ellipsoid(vec![1.0, 0.7, 0.4]).unwrap();
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let gauss = MeasureSpec::gaussian(3, 1.0).unwrap();
    let frame = Frame::hyperplane(&[0.3, -0.5, 0.81]).unwrap();

    c.bench_function("section_gaussian_ellipsoid", |b| {
        b.iter(|| section_measure(&gauss, black_box(&body), &frame, &cfg).unwrap().value)
    });
    c.bench_function("mu_projection_gaussian_cube", |b| {
        b.iter(|| mu_projection(&gauss, black_box(&cube), &frame, &cfg).unwrap().value)
    });

    let cone = MeasureSpec::cone_power(basis_vector(3, 0), 1.0).unwrap();
    let mut g = c.benchmark_group("mixed_measure");
    g.sample_size(10);
    for (name, method) in [
        ("boundary_integral", MixedMethod::BoundaryIntegral),
        ("finite_difference", MixedMethod::FiniteDifference),
    ] {
        g.bench_function(name, |b| {
            b.iter(|| {
                mixed_measure(&cone, black_box(&body), &MixedWith::Ball { radius: 1.0 }, method, &cfg)
                    .unwrap()
                    .value
            })
        });
    }
    g.finish();
}

fn checks(c: &mut Criterion) {
    let k = BodySpec::cube(3, 0.6).unwrap();
    let l = BodySpec::ball(3, 1.0).unwrap();
    let cfg = CheckConfig::default().enforced();
    let mut g = c.benchmark_group("checks");
    g.sample_size(10);
    g.bench_function("gk_enforced_cube_ball", |b| {
        b.iter(|| verify_gk(black_box(&k), &l, 2, &cfg).unwrap().slack)
    });
    g.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    quadrature(c);
    functionals(c);
    checks(c);
}
