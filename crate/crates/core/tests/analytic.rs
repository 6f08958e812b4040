use planar_hodograph::analytic::*;
use planar_hodograph::geometry::*;
use planar_hodograph::solver::*;
use planar_hodograph::{cplx, Cplx};

fn dmo() -> Domain<f64> {
    make_graph_domain(&GraphParametrization::dmo(), 0.5).unwrap()
}

fn solved(d: &Domain<f64>) -> HarmonicFunction<f64> {
    let tr = Trace::Data(unimodal_on_free_run(d, 0.1, 0.9, 0.5).unwrap());
    solve_dirichlet(d, &tr, &SolverConfig::default()).unwrap().function
}

#[test]
fn closed_form_conjugates() {
    let d = Domain::<f64>::half_disk().unwrap();
    let o = d.anchor();
    assert!(o.norm() < 1e-15);
    let y = HarmonicFunction::ClosedForm(ClosedForm::y());
    let yb = conjugate(&y, &d, o).unwrap();
    let q = HarmonicFunction::ClosedForm(ClosedForm::im_power(2));
    let qb = conjugate(&q, &d, o).unwrap();
    for z in d.interior_samples(50, 1, 1e-3, None) {
        assert!((yb.value(z).unwrap() - z.re).abs() < 1e-15);
        assert!((qb.value(z).unwrap() - (z * z).re).abs() < 1e-15);
    }
}

#[test]
fn single_charge_conjugate_is_minus_the_angle() {
    let d = Domain::<f64>::half_disk().unwrap();
    let p = cplx(0.0, 2.0);
    let e = ChargeExpansion::new(0.0, vec![p], vec![1.0]);
    let c = charge_conjugate(&e, &d, d.anchor()).unwrap();
    // g = i Log(z - p) has real part -arg(z - p); normalized at the origin
    for z in d.interior_samples(100, 2, 1e-3, None) {
        let expect = -((z - p).arg() - (-p).arg());
        assert!((c.value(z).unwrap() - expect).abs() < 1e-14, "{z}");
    }
}

#[test]
fn solved_conjugate_satisfies_cauchy_riemann() {
    for d in [Domain::<f64>::half_disk().unwrap(), dmo()] {
        let v = solved(&d);
        let vb = conjugate(&v, &d, d.anchor()).unwrap();
        assert!(matches!(vb, HarmonicFunction::ChargeConjugate(_)));
        let g = completion(&v, &vb, &d).unwrap();
        let diag = g.diagnostics();
        assert!(diag.cr_residual <= 1e-8 && diag.anchor_value <= 1e-8);
        assert!(diag.modulus_mismatch < 1e-12);
        assert_eq!(diag.samples, 1000);
        for z in d.interior_samples(200, 9, 1e-2, None) {
            // level curves of v and v̄ cross at right angles
            let (a, b) = (v.gradient(z).unwrap(), vb.gradient(z).unwrap());
            assert!(a.dot(b).abs() <= 1e-10 * a.norm_sqr().max(1e-300));
            // finite-difference holomorphy of g
            let h = 1e-6;
            let fd = (g.g(z + cplx(h, 0.0)).unwrap() - g.g(z - cplx(h, 0.0)).unwrap()) / (2.0 * h);
            let fdy = (g.g(z + cplx(0.0, h)).unwrap() - g.g(z - cplx(0.0, h)).unwrap()) / (2.0 * h);
            let gp = g.g_prime(z).unwrap();
            assert!((fd - gp).norm() < 1e-6 * (1.0 + gp.norm()), "{z}");
            assert!((fdy - gp * cplx(0.0, 1.0)).norm() < 1e-6 * (1.0 + gp.norm()), "{z}");
        }
    }
}

#[test]
fn path_conjugate_agrees_and_is_path_independent() {
    let d = dmo();
    let v = solved(&d);
    let HarmonicFunction::Charges(e) = &v else { panic!() };
    let cut = charge_conjugate(e, &d, d.anchor()).unwrap();
    let path = PathConjugate::new(v.clone(), &d, d.anchor()).unwrap();
    let hubs = d.interior_samples(2, 11, 0.05, None);
    for z in d.interior_samples(40, 10, 0.05, None) {
        let a = cut.value(z).unwrap();
        let b = path.value(z).unwrap();
        assert!((a - b).abs() < 1e-8, "{z}: {a} {b}");
        // hub routes may leave the domain on a non-convex region, so only
        // compare when both legs stay inside
        for &h in &hubs {
            if let Ok(c) = path.via(h, z) {
                assert!((c - b).abs() < 1e-8, "{z} via {h}");
            }
        }
    }
}

#[test]
fn rejects_a_non_conjugate() {
    let d = Domain::<f64>::half_disk().unwrap();
    let v = HarmonicFunction::ClosedForm(ClosedForm::y());
    // y is not the conjugate of y
    assert!(completion(&v, &v, &d).is_err());
    let x = HarmonicFunction::ClosedForm(ClosedForm::x());
    let mut shifted = ClosedForm::x();
    shifted.coeffs[0] = cplx(0.0, 0.5);
    assert!(completion(&v, &HarmonicFunction::ClosedForm(shifted), &d).is_err());
    assert!(completion(&v, &x, &d).is_ok());
}

#[test]
fn polynomial_helpers() {
    let p = Polynomial::from_roots(&[cplx(1.0, 0.0), cplx(0.0, 2.0)]);
    assert!(p.value(cplx(1.0, 0.0)).norm() < 1e-15);
    let dp = p.derivative();
    // (z - 1)(z - 2i) has derivative 2z - 1 - 2i
    let z: Cplx<f64> = cplx(0.3, -0.7);
    assert!((dp.value(z) - (z * 2.0 - cplx(1.0, 2.0))).norm() < 1e-14);
}
