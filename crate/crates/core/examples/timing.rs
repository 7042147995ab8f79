use geomtomo::functionals::*;
use geomtomo::*;
use std::time::Instant;
fn main() {
    let cfg = EvalConfig::default();
    for n in [2usize, 3, 4] {
        let g = MeasureSpec::gaussian(n, 1.0).unwrap();
        let mut w = vec![0.0; n]; w[0] = 1.0;
        let c = MeasureSpec::cone_power(w, 1.0).unwrap();
        let l = MeasureSpec::lebesgue(n);
        let th: Vec<f64> = (0..n).map(|i| i as f64 + 1.0 ).collect();
        let th: Vec<f64> = th.iter().map(|x| x / th.iter().map(|y| y*y).sum::<f64>().sqrt()).collect();
        let h = Frame::hyperplane(&th).unwrap();
        for k in [BodySpec::ball(n, 1.0).unwrap(), BodySpec::cube(n, 1.0).unwrap(), BodySpec::cross_polytope(n, 1.0).unwrap(), BodySpec::lp_ball(n, 3.0, 1.0).unwrap(), BodySpec::ellipsoid((0..n).map(|i| 0.5 + i as f64 * 0.3).collect()).unwrap()] {
            for m in [&l, &g, &c] {
                let t = Instant::now();
                let p = mu_projection(m, &k, &h, &cfg).unwrap();
                let t1 = t.elapsed();
                let t = Instant::now();
                let s = section_measure(m, &k, &h, &cfg).unwrap();
                let t2 = t.elapsed();
                let t = Instant::now();
                let mm = mixed_measure(m, &k, &MixedWith::Ball{radius:1.0}, MixedMethod::BoundaryIntegral, &cfg).unwrap();
                let t3 = t.elapsed();
                let t = Instant::now();
                let v = body_measure(m, &k, &cfg).unwrap();
                let t4 = t.elapsed();
                println!("n{n} {} {}: P {:.2?} ({:?}) sec {:.2?} mixed {:.2?} vol {:.2?}  relerrs {:.1e} {:.1e} {:.1e} {:.1e}", k.kind.name(), m.kind.name(), t1, p.method, t2, t3, t4, p.rel_error(), s.rel_error(), mm.rel_error(), v.rel_error());
            }
        }
    }
}
