use super::*;
use crate::linalg::axpy;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn unit(v: &[f64]) -> Vec<f64> {
    normalized(v).unwrap()
}

fn random_units(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            unit(&g)
        })
        .collect()
}

fn catalog(n: usize) -> Vec<BodySpec> {
    let mut out = vec![
        BodySpec::ball(n, 1.3).unwrap(),
        BodySpec::ellipsoid((0..n).map(|i| 0.6 + 0.3 * i as f64).collect()).unwrap(),
        BodySpec::lp_ball(n, 3.0, 1.1).unwrap(),
        BodySpec::lp_ball(n, 1.5, 0.9).unwrap(),
        BodySpec::cuboid((0..n).map(|i| 1.0 + 0.2 * i as f64).collect()).unwrap(),
        BodySpec::cross_polytope(n, 1.2).unwrap(),
    ];
    if n <= 4 {
        // a symmetric polytope: cube cut by a pair of diagonal slabs
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; n];
                a[i] = s;
                normals.push(a);
                offsets.push(1.0);
            }
        }
        normals.push(vec![1.0; n]);
        offsets.push(0.8 * n as f64 / 2.0);
        normals.push(vec![-1.0; n]);
        offsets.push(0.8 * n as f64 / 2.0);
        out.push(BodySpec::h_polytope(normals, offsets).unwrap());
    }
    out
}

#[test]
fn radial_examples() {
    assert_eq!(BodySpec::ball(3, 1.0).unwrap().radial(&unit(&[1.0, 2.0, 3.0])).unwrap(), 1.0);
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let d = unit(&[1.0, 1.0, 1.0]);
    assert!((cube.radial(&d).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    let e = BodySpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    assert!((e.radial(&[0.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
    assert!(cube.radial(&[1.0, 1.0, 0.0]).is_err());
}

#[test]
fn support_examples() {
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let d = unit(&[1.0, 1.0, 1.0]);
    assert!((cube.support(&d).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    assert_eq!(BodySpec::ball(3, 2.0).unwrap().support(&d).unwrap(), 2.0);
    let e = BodySpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    assert_eq!(e.support(&[1.0, 0.0]).unwrap(), 1.0);
}

#[test]
fn hpolytope_support_requires_low_dimension() {
    let n = 5;
    let mut normals = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut a = vec![0.0; n];
            a[i] = s;
            normals.push(a);
        }
    }
    let offsets = vec![1.0; normals.len()];
    let p = BodySpec::h_polytope(normals, offsets).unwrap();
    assert!(matches!(p.support(&basis_vector_(n, 0)), Err(GeomError::Unsupported(_))));
    // the radial function stays available
    assert_eq!(p.radial(&basis_vector_(n, 0)).unwrap(), 1.0);
}

fn basis_vector_(n: usize, i: usize) -> Vec<f64> {
    crate::linalg::basis_vector(n, i)
}

#[test]
fn hpolytope_validation() {
    let bad = BodySpec::h_polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0]);
    assert!(matches!(bad, Err(GeomError::InvariantViolation(_))));
    let outside = BodySpec::h_polytope(
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        vec![1.0, -0.5, 1.0, 1.0],
    );
    assert!(matches!(outside, Err(GeomError::InvariantViolation(_))));
}

#[test]
fn boundary_element_examples() {
    let b1 = BodySpec::ball(3, 1.0).unwrap();
    let u = unit(&[0.3, -0.4, 0.5]);
    let e = b1.boundary_element(&u).unwrap();
    assert!(norm(&sub(&e.point, &u)) < 1e-15);
    assert!(norm(&sub(&e.normal, &u)) < 1e-15);
    assert!((e.jacobian - 1.0).abs() < 1e-14);
    let b2 = BodySpec::ball(3, 2.0).unwrap();
    let e2 = b2.boundary_element(&u).unwrap();
    assert!((e2.jacobian - 4.0).abs() < 1e-13);
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let e3 = cube.boundary_element(&[0.0, 0.0, 1.0]).unwrap();
    assert_eq!(e3.point, vec![0.0, 0.0, 1.0]);
    assert_eq!(e3.normal, vec![0.0, 0.0, 1.0]);
    assert!((e3.jacobian - 1.0).abs() < 1e-15);
}

#[test]
fn ridge_is_signalled_and_resolved() {
    let cube = BodySpec::cube(3, 1.0).unwrap();
    let d = unit(&[1.0, 1.0, 0.2]);
    assert_eq!(cube.boundary_element(&d), Err(GeomError::Ridge));
    let e = cube.boundary_element_resolved(&d).unwrap();
    assert!((norm(&e.normal) - 1.0).abs() < 1e-14);
    assert!(e.normal.iter().filter(|v| v.abs() == 1.0).count() == 1);
}

#[test]
fn analytic_and_finite_difference_elements_agree() {
    for n in [2, 3, 4] {
        for body in catalog(n) {
            for u in random_units(n, 40, 11) {
                let a = match body.boundary_element(&u) {
                    Ok(a) => a,
                    Err(GeomError::Ridge) => continue,
                    Err(e) => panic!("{e}"),
                };
                let f = body.boundary_element_fd(&u).unwrap();
                // skip directions within the finite-difference stencil of a ridge
                if body.is_polytope() && norm(&sub(&a.normal, &f.normal)) > 1e-3 {
                    continue;
                }
                assert!(norm(&sub(&a.normal, &f.normal)) < 1e-6, "{:?} {u:?}", body.kind);
                assert!((a.jacobian - f.jacobian).abs() < 1e-6 * a.jacobian, "{:?}", body.kind);
            }
        }
    }
}

#[test]
fn radii_examples() {
    for n in 2..=6 {
        let r = BodySpec::cube(n, 1.0).unwrap().radii();
        assert!((r.inner - 1.0).abs() < 1e-15 && (r.outer - (n as f64).sqrt()).abs() < 1e-14);
        let c = BodySpec::cross_polytope(n, 1.0).unwrap().radii();
        assert!((c.inner - 1.0 / (n as f64).sqrt()).abs() < 1e-15 && (c.outer - 1.0).abs() < 1e-15);
    }
    let e = BodySpec::ellipsoid(vec![1.0, 2.0]).unwrap().radii();
    assert_eq!((e.inner, e.outer), (1.0, 2.0));
}

#[test]
fn radii_bound_the_radial_function() {
    for n in [2, 3, 4, 5] {
        for body in catalog(n) {
            let r = body.radii();
            for u in random_units(n, 1000, 5) {
                let rho = body.radial(&u).unwrap();
                assert!(rho >= r.inner * (1.0 - 1e-12) && rho <= r.outer * (1.0 + 1e-12), "{:?}", body.kind);
            }
        }
    }
}

#[test]
fn scanned_outer_radius_matches_vertices() {
    let n = 5;
    let mut normals = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut a = vec![0.0; n];
            a[i] = s;
            normals.push(a);
        }
    }
    let offsets = vec![1.0; normals.len()];
    let p = BodySpec::h_polytope(normals, offsets).unwrap();
    let r = p.radii();
    assert!((r.outer - 5f64.sqrt()).abs() < 1e-4 * 5f64.sqrt());
}

#[test]
fn support_dominates_radial() {
    for n in [2, 3, 4] {
        for body in catalog(n) {
            for u in random_units(n, 1000, 9) {
                let rho = body.radial(&u).unwrap();
                let h = body.support(&u).unwrap();
                assert!(h >= rho * (1.0 - 1e-12), "{:?}", body.kind);
                if matches!(body.kind, BodyKind::Ball { .. }) {
                    assert!((h - rho).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn first_order_support_identity() {
    for n in [2, 3, 4] {
        for body in catalog(n) {
            for u in random_units(n, 200, 21) {
                let e = match body.boundary_element(&u) {
                    Ok(e) => e,
                    Err(GeomError::Ridge) => continue,
                    Err(err) => panic!("{err}"),
                };
                let h = body.support(&e.normal).unwrap();
                assert!((dot(&e.normal, &e.point) - h).abs() < 1e-8, "{:?}", body.kind);
            }
        }
    }
}

#[test]
fn support_points_attain_support() {
    for n in [2, 3, 4] {
        for body in catalog(n) {
            for u in random_units(n, 100, 4) {
                let x = body.support_point(&u).unwrap();
                assert!(body.gauge(&x) <= 1.0 + 1e-10, "{:?}", body.kind);
                assert!((dot(&x, &u) - body.support(&u).unwrap()).abs() < 1e-10, "{:?}", body.kind);
            }
        }
    }
}

#[test]
fn symmetric_bodies_have_even_radial_function() {
    for n in [2, 3, 4] {
        for body in catalog(n) {
            assert!(body.symmetric);
            for u in random_units(n, 100, 8) {
                let m = scale(&u, -1.0);
                assert!((body.radial(&u).unwrap() - body.radial(&m).unwrap()).abs() < 1e-13);
            }
        }
    }
    let skew = BodySpec::h_polytope(
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        vec![1.0, 2.0, 1.0, 1.0],
    )
    .unwrap();
    assert!(!skew.symmetric);
}

#[test]
fn john_normalize_examples() {
    assert_eq!(
        BodySpec::cube(3, 2.0).unwrap().john_normalize().unwrap(),
        BodySpec::cube(3, 1.0).unwrap()
    );
    assert_eq!(
        BodySpec::ball(3, 3.0).unwrap().john_normalize().unwrap(),
        BodySpec::ball(3, 1.0).unwrap()
    );
    let c = BodySpec::cross_polytope(2, 1.0).unwrap().john_normalize().unwrap();
    assert_eq!(c, BodySpec::cross_polytope(2, 2f64.sqrt()).unwrap());
    for n in [2, 3, 4, 5] {
        for body in catalog(n) {
            match body.john_normalize() {
                Ok(j) => assert!((j.radii().inner - 1.0).abs() < 1e-10, "{:?}", body.kind),
                Err(e) => {
                    assert!(matches!(body.kind, BodyKind::HPolytope { .. }));
                    assert!(matches!(e, GeomError::Unsupported(_)));
                }
            }
        }
    }
}

#[test]
fn dilate_examples() {
    assert_eq!(
        BodySpec::ball(3, 1.0).unwrap().dilate(2.0).unwrap(),
        BodySpec::ball(3, 2.0).unwrap()
    );
    assert_eq!(
        BodySpec::cube(2, 1.0).unwrap().dilate(0.5).unwrap(),
        BodySpec::cube(2, 0.5).unwrap()
    );
    assert!(BodySpec::ball(2, 1.0).unwrap().dilate(0.0).is_err());
    for n in [2, 3, 4] {
        for body in catalog(n) {
            let t = 1.7;
            let d = body.dilate(t).unwrap();
            let (r, rd) = (body.radii(), d.radii());
            assert!((rd.inner - t * r.inner).abs() < 1e-12 && (rd.outer - t * r.outer).abs() < 1e-12);
            for u in random_units(n, 20, 2) {
                assert!((d.radial(&u).unwrap() - t * body.radial(&u).unwrap()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn minkowski_combinations() {
    let a = BodySpec::cuboid(vec![1.0, 2.0]).unwrap();
    let b = BodySpec::cuboid(vec![3.0, 1.0]).unwrap();
    let c = a.minkowski_combination(&b, 0.25).unwrap();
    assert_eq!(c, BodySpec::cuboid(vec![2.5, 1.25]).unwrap());
    let e1 = BodySpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    let e2 = BodySpec::ellipsoid(vec![2.0, 4.0]).unwrap();
    let e = e1.minkowski_combination(&e2, 0.5).unwrap();
    assert_eq!(e, BodySpec::ellipsoid(vec![1.5, 3.0]).unwrap());
    let e3 = BodySpec::ellipsoid(vec![2.0, 1.0]).unwrap();
    assert!(matches!(e1.minkowski_combination(&e3, 0.5), Err(GeomError::Unsupported(_))));
    // support functions add
    let u = unit(&[0.3, 0.8]);
    let want = 0.25 * a.support(&u).unwrap() + 0.75 * b.support(&u).unwrap();
    assert!((c.support(&u).unwrap() - want).abs() < 1e-14);
}

#[test]
fn line_exit_and_chords() {
    for n in [2, 3, 4] {
        for body in catalog(n) {
            for (i, u) in random_units(n, 30, 13).iter().enumerate() {
                let c = scale(&random_units(n, 31, 14)[i], 0.3 * body.radii().inner);
                let t = body.line_exit(&c, u).unwrap();
                let x = axpy(&c, t, u);
                assert!((body.gauge(&x) - 1.0).abs() < 1e-10, "{:?}", body.kind);
                let ch = body.chord(&c, u).unwrap().unwrap();
                assert!((ch.1 - t).abs() < 1e-9 * t.max(1.0), "{:?}", body.kind);
                assert!((body.gauge(&axpy(&c, ch.0, u)) - 1.0).abs() < 1e-9, "{:?}", body.kind);
            }
            let far = vec![10.0 * body.radii().outer; n];
            let dir = basis_vector_(n, 0);
            assert_eq!(body.chord(&far, &dir).unwrap(), None, "{:?}", body.kind);
        }
    }
}

#[test]
fn distances_are_consistent() {
    // brute-force oracle: distance to boundary points sampled densely (n = 2)
    let n = 2;
    let dirs: Vec<Vec<f64>> = (0..100_000)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / 100_000.0;
            vec![a.cos(), a.sin()]
        })
        .collect();
    for body in catalog(n) {
        let boundary: Vec<Vec<f64>> = dirs.iter().map(|u| scale(u, body.radial(u).unwrap())).collect();
        for x in [vec![2.5, 0.4], vec![-1.7, 1.9], vec![0.2, -3.0]] {
            let d = body.distance(&x).unwrap();
            // distance to the inscribed polygon through the samples (closed loop)
            let brute = (0..boundary.len())
                .map(|i| {
                    let a = &boundary[i];
                    let b = &boundary[(i + 1) % boundary.len()];
                    let ab = sub(b, a);
                    let t = (dot(&sub(&x, a), &ab) / dot(&ab, &ab)).clamp(0.0, 1.0);
                    norm(&sub(&axpy(a, t, &ab), &x))
                })
                .fold(f64::INFINITY, f64::min);
            assert!(d <= brute + 1e-9, "{:?}", body.kind);
            assert!(brute - d < 1e-5, "{:?}: {d} vs {brute}", body.kind);
        }
        assert_eq!(body.distance(&[0.1, 0.1]).unwrap(), 0.0);
    }
}

#[test]
fn distance_in_higher_dimension_uses_projection_geometry() {
    for body in catalog(3) {
        for u in random_units(3, 30, 77) {
            let e = match body.boundary_element(&u) {
                Ok(e) => e,
                Err(_) => continue,
            };
            // moving outward along the normal by δ gives distance δ
            let x = axpy(&e.point, 0.05, &e.normal);
            let d = body.distance(&x).unwrap();
            assert!((d - 0.05).abs() < 1e-8, "{:?}: {d}", body.kind);
        }
    }
}

#[test]
fn json_schema_round_trip() {
    let text = r#"{"kind":"lp_ball","dim":3,"params":{"p":"inf","scale":0.5}}"#;
    let b: BodySpec = serde_json::from_str(text).unwrap();
    assert!(b.is_polytope());
    assert_eq!(serde_json::to_string(&b).unwrap(), text);
    for n in [2, 3] {
        for body in catalog(n) {
            let s = serde_json::to_string(&body).unwrap();
            let back: BodySpec = serde_json::from_str(&s).unwrap();
            assert_eq!(back, body);
            assert_eq!(serde_json::to_string(&back).unwrap(), s);
        }
    }
    assert!(serde_json::from_str::<BodySpec>(r#"{"kind":"torus","dim":3,"params":{}}"#).is_err());
    assert!(serde_json::from_str::<BodySpec>(r#"{"kind":"box","dim":3,"params":{"half_widths":[1,2]}}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_is_homogeneous(a in 0.2f64..3.0, b in 0.2f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0, t in 0.1f64..5.0) {
        prop_assume!(x.abs() + y.abs() > 1e-3);
        for body in [
            BodySpec::ellipsoid(vec![a, b]).unwrap(),
            BodySpec::cuboid(vec![a, b]).unwrap(),
            BodySpec::lp_ball(2, 1.0 + a, b).unwrap(),
        ] {
            let g = body.gauge(&[x, y]);
            let gt = body.gauge(&[t * x, t * y]);
            prop_assert!((gt - t * g).abs() <= 1e-12 * gt.max(1.0));
        }
    }

    #[test]
    fn lp_support_is_dual_norm(p in 1.05f64..8.0, s in 0.3f64..2.0, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        prop_assume!(x.abs() + y.abs() + z.abs() > 1e-2);
        let body = BodySpec::lp_ball(3, p, s).unwrap();
        let u = [x, y, z];
        let sp = body.support_point(&u).unwrap();
        prop_assert!((body.gauge(&sp) - 1.0).abs() < 1e-10);
        prop_assert!((dot(&sp, &u) - body.support(&u).unwrap()).abs() < 1e-10);
    }
}
