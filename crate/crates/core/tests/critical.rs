use planar_hodograph::analytic::*;
use planar_hodograph::critical::*;
use planar_hodograph::geometry::*;
use planar_hodograph::hodograph::*;
use planar_hodograph::solver::*;
use planar_hodograph::{cplx, Cplx, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square() -> Domain<f64> {
    Domain::polygon(&[cplx(-0.5, 0.0), cplx(0.5, 0.0), cplx(0.5, 1.0), cplx(-0.5, 1.0)], &[2], cplx(0.0, 0.0)).unwrap()
}

fn dmo() -> Domain<f64> {
    make_graph_domain(&GraphParametrization::dmo(), 0.5).unwrap()
}

fn map_for(d: &Domain<f64>, v: &HarmonicFunction<f64>, tol: f64) -> HodographMap<f64> {
    let vb = conjugate(v, d, d.anchor()).unwrap();
    let g = completion(v, &vb, d).unwrap();
    build_map(&g, d, tol).unwrap()
}

fn unimodal(d: &Domain<f64>) -> Solution<f64> {
    let tr = Trace::Data(unimodal_on_free_run(d, 0.1, 0.9, 0.5).unwrap());
    solve_dirichlet(d, &tr, &SolverConfig::default()).unwrap()
}

/// Roots of `p` from Newton started on a 32×32 grid over `[-1.5, 1.5]²`,
/// merged within 1e-6, each with the order of the first non-vanishing
/// derivative.
fn newton_grid_roots(p: &Polynomial<f64>) -> Vec<(Cplx<f64>, usize)> {
    let dp = p.derivative();
    let mut roots: Vec<Cplx<f64>> = Vec::new();
    for i in 0..32 {
        for j in 0..32 {
            let mut z = cplx(-1.5 + 3.0 * (i as f64 + 0.5) / 32.0, -1.5 + 3.0 * (j as f64 + 0.5) / 32.0);
            for _ in 0..200 {
                let d = dp.value(z);
                if d.norm() == 0.0 {
                    break;
                }
                z -= p.value(z) / d;
            }
            if p.value(z).norm() < 1e-10 && roots.iter().all(|r| (r - z).norm() > 1e-6) {
                roots.push(z);
            }
        }
    }
    roots
        .into_iter()
        .map(|r| {
            let mut q = p.derivative();
            let mut m = 1;
            while q.value(r).norm() < 1e-6 && m < 8 {
                q = q.derivative();
                m += 1;
            }
            (r, m)
        })
        .collect()
}

#[test]
fn counts_on_simple_polynomials() {
    let p = Polynomial::new(vec![cplx(-3.0, 0.0), cplx(0.0, 0.0), cplx(3.0, 0.0)]);
    let c = count_zeros(&p, Rect::new(cplx(-2.0, -2.0), cplx(2.0, 2.0)).unwrap()).unwrap();
    assert_eq!(c.zeros, Some(2));
    let z3 = Polynomial::from_roots(&[cplx(0.0, 0.0); 3]);
    let r = Rect::new(cplx(-1.0, -1.0), cplx(1.0, 1.0)).unwrap();
    assert_eq!(count_zeros(&z3, r).unwrap().zeros, Some(3));
    let loc = locate_zeros(&z3, r, &r).unwrap();
    assert!(loc.is_conclusive());
    assert_eq!(loc.zeros.len(), 1);
    assert_eq!(loc.zeros[0].multiplicity, 3);
    assert!(loc.zeros[0].point.norm() < 1e-6);
}

#[test]
fn counts_match_newton_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    for _ in 0..20 {
        let deg = rng.gen_range(1..=6);
        let roots: Vec<Cplx<f64>> = (0..deg).map(|_| cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let p = Polynomial::from_roots(&roots);
        let oracle = newton_grid_roots(&p);
        assert_eq!(oracle.iter().map(|r| r.1).sum::<usize>(), deg);
        let shift = cplx(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
        for s in [0.35, 0.7, 1.05] {
            let r = Rect::new(shift - cplx(s, s), shift + cplx(s, s)).unwrap();
            let expect: usize = oracle.iter().filter(|(z, _)| r.strictly_contains(*z)).map(|r| r.1).sum();
            let got = count_zeros(&p, r).unwrap();
            assert_eq!(got.zeros, Some(expect), "{roots:?} in {r:?}");
            let loc = locate_zeros(&p, r, &r).unwrap();
            assert!(loc.is_conclusive());
            assert_eq!(loc.total_multiplicity(), expect);
            for z in &loc.zeros {
                assert!(p.value(z.point).norm() <= 1e-8, "{z:?}");
            }
            agree += 1;
        }
    }
    assert_eq!(agree, 60);
}

#[test]
fn located_critical_points_of_closed_forms() {
    let r = Rect::new(cplx(-1.0, -1.0), cplx(1.0, 1.0)).unwrap();
    let y = HarmonicFunction::ClosedForm(ClosedForm::y());
    let loc = locate_zeros(&DerivativeField { h: &y }, r, &r).unwrap();
    assert!(loc.is_conclusive() && loc.zeros.is_empty());
    let c = HarmonicFunction::ClosedForm(ClosedForm::im_power(3));
    let loc = locate_zeros(&DerivativeField { h: &c }, r, &r).unwrap();
    assert_eq!(loc.zeros.len(), 1);
    assert_eq!(loc.zeros[0].multiplicity, 2);
    assert!(loc.zeros[0].point.norm() < 1e-6);
}

#[test]
fn unimodal_solutions_have_no_interior_critical_points() {
    for d in [Domain::half_disk().unwrap(), square(), dmo()] {
        let v = unimodal(&d).function;
        let rep = verify_no_interior_critical_points(&v, &d).unwrap();
        assert!(rep.is_conclusive(), "{:?}", rep.inconclusive);
        assert_eq!(rep.count, Some(0), "{}: {:?}", d.label(), rep.points);
        let tr = Trace::Data(bimodal_data(&d).unwrap());
        let b = solve_dirichlet(&d, &tr, &SolverConfig::default()).unwrap().function;
        let rep = verify_no_interior_critical_points(&b, &d).unwrap();
        assert!(rep.count.unwrap_or(0) >= 1, "{}", d.label());
    }
}

#[test]
fn reflection_of_closed_forms() {
    let d = Domain::half_disk().unwrap();
    let y = HarmonicFunction::ClosedForm(ClosedForm::y());
    let m = map_for(&d, &y, 1e-12);
    let cubic = HarmonicFunction::ClosedForm(ClosedForm::im_power(3));
    let ry = reflect_odd(Transported { map: &m, u: &y }, 0.5, 1e-12).unwrap();
    let rc = reflect_odd(Transported { map: &m, u: &cubic }, 0.5, 1e-12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let w = cplx(rng.gen_range(-0.5..0.5), rng.gen_range(0.01..0.5));
        for (r, f) in [(&ry, &y), (&rc, &cubic)] {
            let up = r.value(w).unwrap();
            let down = r.value(w.conj()).unwrap();
            assert_eq!(up, -down);
            assert!((up - f.value(w).unwrap()).abs() < 1e-12);
            assert!((down - f.value(w.conj()).unwrap()).abs() < 1e-12);
            let (g1, g2) = (r.eval(w).unwrap(), r.eval(w.conj()).unwrap());
            assert_eq!(g2, g1.conj());
        }
    }
    let x = HarmonicFunction::ClosedForm(ClosedForm::x());
    let err = reflect_odd(Transported { map: &m, u: &x }, 0.5, 1e-6).unwrap_err();
    assert!(matches!(err, Error::NotDirichletZeroTrace { .. }), "{err}");
}

#[test]
fn reflected_dmo_transport_is_harmonic_across_the_line() {
    let d = dmo();
    let v = unimodal(&d);
    let m = map_for(&d, &v.function, 1e-5);
    let e = localize_e(&m, None, 1).unwrap();
    // smooth data vanishing on the graph
    let tr = Trace::Data(unimodal_on_free_run(&d, 0.05, 0.7, 0.3).unwrap());
    let u = solve_dirichlet(&d, &tr, &SolverConfig::default()).unwrap();
    let r = reflect_odd(Transported { map: &m, u: &u.function }, e.a, 10.0 * u.report.residual).unwrap();
    // smaller steps amplify the trace residual of u as 1/h²
    let h = 1e-2;
    for k in 0..100 {
        // centres just above the line so the stencil straddles it
        let w = cplx(e.a * (-0.8 + 1.6 * (k as f64 + 0.5) / 100.0), 0.4 * h);
        let f = |z: Cplx<f64>| r.value(z).unwrap();
        let lap: f64 = (f(w + cplx(h, 0.0)) + f(w - cplx(h, 0.0)) + f(w + cplx(0.0, h)) + f(w - cplx(0.0, h)) - 4.0 * f(w)) / (h * h);
        assert!(lap.abs() <= 1e-3, "{w}: {lap}");
    }
}

#[test]
fn small_gradient_tables() {
    let d: Domain<f64> = Domain::half_disk().unwrap();
    let y = HarmonicFunction::ClosedForm(ClosedForm::y());
    let t = boundary_small_gradient_measure(&y, &d, &[0.5, 0.1], 4000).unwrap();
    assert_eq!(t.entries.iter().map(|e| e.1).collect::<Vec<_>>(), vec![0.0, 0.0]);
    assert!((t.boundary_length - 2.0).abs() < 1e-12);

    // |∇v| ~ r at a right-angle corner, so the measure halves with ε
    let sq = square();
    let v = unimodal(&sq).function;
    let eps = [0.04, 0.02, 0.01, 0.005, 1e-3, 0.0];
    let t = boundary_small_gradient_measure(&v, &sq, &eps, 20_000).unwrap();
    assert!(!t.rough);
    for w in t.entries[..4].windows(2) {
        let ratio = w[1].1 / w[0].1;
        assert!((0.4..=0.6).contains(&ratio), "{ratio}");
    }
    assert!(t.entries[4].1 < 0.01 * t.boundary_length);
    assert_eq!(t.entries[5].1, 0.0);
    let mut sorted = t.entries.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert!(sorted.windows(2).all(|w| w[0].1 <= w[1].1));

    let dm = dmo();
    let v = unimodal(&dm).function;
    let t = boundary_small_gradient_measure(&v, &dm, &[1e-3], 20_000).unwrap();
    assert!(t.entries[0].1 < 0.01 * t.boundary_length);
}

#[test]
fn ledgers_for_closed_forms() {
    let d = Domain::half_disk().unwrap();
    let y = HarmonicFunction::ClosedForm(ClosedForm::y());
    let m = map_for(&d, &y, 1e-12);
    let e = localize_e(&m, None, 1).unwrap();
    assert!(e.inner && e.outer);
    let table = || boundary_small_gradient_measure(&y, &d, &[BOUNDARY_EPS, 1e-3], 4000).unwrap();
    for (u, expect) in [
        (HarmonicFunction::ClosedForm(ClosedForm::y()), LedgerCounts { u: 0, theta: 0, reflected: 0 }),
        (HarmonicFunction::ClosedForm(ClosedForm::im_power(3)), LedgerCounts { u: 1, theta: 0, reflected: 1 }),
    ] {
        let r = reflect_odd(Transported { map: &m, u: &u }, e.a, 1e-12).unwrap();
        let rep = counting_ledger(&u, &m, &r, &e, table()).unwrap();
        assert!(rep.is_conclusive(), "{:?}", rep.inconclusive);
        assert_eq!(rep.counts, expect);
        assert!(rep.inequality_holds());
    }
}

#[test]
fn dmo_ledger_is_finite_and_stable() {
    let d = dmo();
    let mut counts = Vec::new();
    for n in [96, 192] {
        let cfg = SolverConfig::default().with_charges(n);
        let tr = Trace::Data(unimodal_on_free_run(&d, 0.1, 0.9, 0.5).unwrap());
        let v = solve_dirichlet(&d, &tr, &cfg).unwrap();
        let m = map_for(&d, &v.function, 10.0 * v.report.residual);
        let e = localize_e(&m, None, 1).unwrap();
        let u = solve_dirichlet(&d, &Trace::Data(sine_data(&d, 3.0, 1.0).unwrap()), &cfg).unwrap();
        let r = reflect_odd(Transported { map: &m, u: &u.function }, e.a, 10.0 * u.report.residual).unwrap();
        let t = boundary_small_gradient_measure(&v.function, &d, &[BOUNDARY_EPS, 1e-3], 20_000).unwrap();
        let rep = counting_ledger(&u.function, &m, &r, &e, t).unwrap();
        assert!(rep.is_conclusive(), "{:?}", rep.inconclusive);
        assert!(rep.inequality_holds(), "{:?}", rep.counts);
        counts.push((rep.counts, rep.interior_points.clone()));
    }
    assert_eq!(counts[0].0, counts[1].0);
    for (a, b) in counts[0].1.iter().zip(&counts[1].1) {
        assert!((a.point - b.point).norm() <= 1e-4);
    }
}
