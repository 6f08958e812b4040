//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always print; exits nonzero if any line fails.

use std::time::Instant;

use planar_hodograph::analytic::Polynomial;
use planar_hodograph::critical::{count_zeros, Rect};
use planar_hodograph::geometry::{make_graph_domain, Domain, GraphParametrization};
use planar_hodograph::hodograph::{HodographMap, Transported};
use planar_hodograph::solver::{
    bimodal_data, gradient_fd_error, solve_dirichlet, unimodal_on_free_run, verify_no_interior_critical_points,
    Harmonic, HarmonicFunction, SolverConfig, Trace,
};
use planar_hodograph::{cplx, Cplx};
use planar_hodograph_cli::pipeline::points_in_e;
use planar_hodograph_cli::report::halving_ratios;
use planar_hodograph_cli::{bundled, output, run_scenario, Mode, Run, SCENARIOS};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

struct Ledger {
    failed: usize,
}

impl Ledger {
    fn line(&mut self, id: u32, ok: bool, what: &str, detail: String, secs: f64) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {id:>2}  {what}: {detail} [{secs:.2} s]", if ok { "PASS" } else { "FAIL" });
    }
}

/// `g'` from values of `g` alone: trapezoid rule for the Cauchy integral on
/// a circle inside the domain. The quadrature error decays like 0.9^512;
/// the large radius keeps value noise divided by `r |g'|` small near corners.
fn cauchy_derivative(map: &HodographMap<f64>, z: Cplx<f64>) -> Cplx<f64> {
    const N: usize = 512;
    let r = 0.9 * map.domain().distance_to_boundary(z);
    let g0 = map.completion().g(z).unwrap();
    let mut acc = cplx(0.0, 0.0);
    for k in 0..N {
        let e = Cplx::from_polar(1.0, std::f64::consts::TAU * k as f64 / N as f64);
        acc += (map.completion().g(z + e * r).unwrap() - g0) / e;
    }
    acc / (N as f64 * r)
}

/// `∇U` from values of `U` only, fourth-order central differences.
fn fd_gradient(t: &Transported<'_, f64>, w: Cplx<f64>, h: f64) -> (f64, f64) {
    let u = |d: Cplx<f64>| t.value(w + d).unwrap();
    let diff = |e: Cplx<f64>| (8.0 * (u(e) - u(-e)) - (u(e * 2.0) - u(-e * 2.0))) / (12.0 * h);
    (diff(cplx(h, 0.0)), diff(cplx(0.0, h)))
}

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

fn square() -> Domain<f64> {
    Domain::polygon(&[cplx(-0.5, 0.0), cplx(0.5, 0.0), cplx(0.5, 1.0), cplx(-0.5, 1.0)], &[2], cplx(0.0, 0.0)).unwrap()
}

fn report_bytes(run: &Run) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    output::write_all(run, dir.path()).unwrap();
    std::fs::read(dir.path().join(output::REPORT)).unwrap()
}

fn main() {
    let mut led = Ledger { failed: 0 };
    // every harmonic function built below, for the gradient check
    let mut functions: Vec<(String, HarmonicFunction<f64>, Domain<f64>)> = Vec::new();

    let mut runs = Vec::new();
    let mut run_secs = Vec::new();
    for (name, _) in SCENARIOS {
        let t = Instant::now();
        let run = run_scenario(bundled(name).unwrap(), Mode::Run, false);
        run_secs.push(t.elapsed().as_secs_f64());
        if let Some(e) = &run.error {
            println!("scenario {name} stopped: {e}");
        }
        runs.push(run);
    }
    let by_name = |n: &str| SCENARIOS.iter().position(|s| s.0 == n).unwrap();
    for r in &runs {
        let d = r.domain.clone().unwrap();
        let m = r.map.as_ref().unwrap();
        functions.push((format!("{} v", r.config.name), r.v.as_ref().unwrap().function.clone(), d.clone()));
        functions.push((format!("{} v-conjugate", r.config.name), m.completion().conjugate().clone(), d.clone()));
        functions.push((format!("{} u", r.config.name), r.u.as_ref().unwrap().function.clone(), d));
    }

    // 1. identity pipeline
    {
        let i = by_name("halfdisk-identity");
        let r = &runs[i];
        let t = Instant::now();
        let d = r.domain.as_ref().unwrap();
        let v = &r.v.as_ref().unwrap().function;
        let m = r.map.as_ref().unwrap();
        let mut dv: f64 = 0.0;
        let mut dt: f64 = 0.0;
        for z in d.interior_samples(100, 11, 0.0, None) {
            dv = dv.max((v.value(z).unwrap() - z.im).abs());
            dt = dt.max((m.theta(z).unwrap() - z).norm());
        }
        let c = r.ledger.as_ref().map(|l| (l.counts.u, l.counts.theta, l.counts.reflected, l.is_conclusive()));
        let ok = dv <= 1e-8 && dt <= 1e-8 && c == Some((0, 0, 0, true)) && run_secs[i] < 2.0;
        led.line(
            1,
            ok,
            "identity pipeline",
            format!("|v - y| {dv:.1e}, |Θ - id| {dt:.1e} (tol 1e-8), ledger {c:?}, run {:.2} s", run_secs[i]),
            t.elapsed().as_secs_f64() + run_secs[i],
        );
    }

    // 2. conformal factor against an independent Cauchy-integral derivative
    {
        for r in &runs {
            let m = r.map.as_ref().unwrap();
            let v = &r.v.as_ref().unwrap().function;
            let d = m.domain();
            let pts = d.interior_samples(1000, 21, 1e-2, Some(d.clip_radius()));
            // the check itself: library det against |∇v|²
            let t = Instant::now();
            let lib: f64 = pts
                .iter()
                .map(|&z| {
                    let g = v.gradient(z).unwrap();
                    let grad2 = g.x * g.x + g.y * g.y;
                    (m.det(z).unwrap().abs() - grad2).abs() / grad2
                })
                .fold(0.0, f64::max);
            let secs = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let errs: Vec<(f64, f64)> = pts
                .par_iter()
                .map(|&z| {
                    let g = v.gradient(z).unwrap();
                    let grad2 = g.x * g.x + g.y * g.y;
                    let det = cauchy_derivative(m, z).norm_sqr();
                    ((det - grad2).abs() / grad2, (m.det(z).unwrap().abs() - grad2).abs() / grad2)
                })
                .collect();
            let worst = errs.iter().map(|e| e.0).fold(0.0, f64::max);
            let worst_lib = errs.iter().map(|e| e.1).fold(lib, f64::max);
            let oracle_secs = t.elapsed().as_secs_f64();
            led.line(
                2,
                worst <= 1e-10 && worst_lib <= 1e-10 && pts.len() == 1000 && secs < 1.0,
                &format!("conformal factor, {}", r.config.name),
                format!(
                    "max rel |det DΘ| vs |∇v|² over {}: {worst:.1e} (Cauchy integral), {worst_lib:.1e} (map) (tol 1e-10); oracle {oracle_secs:.2} s",
                    pts.len()
                ),
                secs,
            );
        }
    }

    // 3. transformation law
    for name in ["halfdisk-cubic", "dmo-theorem12"] {
        let r = &runs[by_name(name)];
        let t = Instant::now();
        let m = r.map.as_ref().unwrap();
        let e = r.localization.as_ref().unwrap();
        let u = &r.u.as_ref().unwrap().function;
        let tr = Transported { map: m, u };
        let pts = points_in_e(m, e, 500, 31);
        let mut worst: f64 = 0.0;
        for &z in &pts {
            let gu = u.gradient(z).unwrap();
            let lhs = gu.x * gu.x + gu.y * gu.y;
            let (ux, uy) = fd_gradient(&tr, m.theta(z).unwrap(), 1e-4);
            let rhs = m.det(z).unwrap().abs() * (ux * ux + uy * uy);
            worst = worst.max((lhs - rhs).abs() / lhs);
        }
        let lib = r.law.map(|l| l.max_relative).unwrap_or(f64::NAN);
        let secs = t.elapsed().as_secs_f64();
        led.line(
            3,
            pts.len() == 500 && worst <= 1e-6 && lib <= 1e-6 && secs < 5.0,
            &format!("transformation law, {name}"),
            format!(
                "max rel over {} points of E: {worst:.1e} (∇U by differences), {lib:.1e} (∇U from H') (tol 1e-6)",
                pts.len()
            ),
            secs,
        );
    }

    // 4. argument principle vs Newton-grid oracle
    {
        let t = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut agree, mut total) = (0, 0);
        for _ in 0..20 {
            let deg = rng.gen_range(1..=6);
            let roots: Vec<Cplx<f64>> = (0..deg).map(|_| cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let p = Polynomial::from_roots(&roots);
            let oracle = newton_grid_roots(&p);
            let shift = cplx(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
            for s in [0.35, 0.7, 1.05] {
                let rect = Rect::new(shift - cplx(s, s), shift + cplx(s, s)).unwrap();
                let expect: usize = oracle.iter().filter(|(z, _)| rect.strictly_contains(*z)).map(|r| r.1).sum();
                total += 1;
                if count_zeros(&p, rect).unwrap().zeros == Some(expect) {
                    agree += 1;
                }
            }
        }
        let secs = t.elapsed().as_secs_f64();
        led.line(
            4,
            agree == 60 && total == 60 && secs < 3.0,
            "argument principle vs Newton grid",
            format!("{agree}/{total} counts agree"),
            secs,
        );
    }

    // 5. no interior critical points for unimodal data, some for bimodal
    {
        let t = Instant::now();
        let mut detail = Vec::new();
        let mut ok = true;
        let domains = [
            Domain::half_disk().unwrap(),
            square(),
            make_graph_domain(&GraphParametrization::dmo(), 0.5).unwrap(),
        ];
        for d in domains {
            let cfg = SolverConfig::default();
            let uni = solve_dirichlet(&d, &Trace::Data(unimodal_on_free_run(&d, 0.1, 0.9, 0.5).unwrap()), &cfg).unwrap();
            let bi = solve_dirichlet(&d, &Trace::Data(bimodal_data(&d).unwrap()), &cfg).unwrap();
            let cu = verify_no_interior_critical_points(&uni.function, &d).unwrap().count;
            let cb = verify_no_interior_critical_points(&bi.function, &d).unwrap().count;
            ok &= cu == Some(0) && cb.is_some_and(|c| c >= 1);
            detail.push(format!("{} unimodal {cu:?} bimodal {cb:?}", d.label()));
            functions.push((format!("{} unimodal", d.label()), uni.function, d.clone()));
            functions.push((format!("{} bimodal", d.label()), bi.function, d));
        }
        let secs = t.elapsed().as_secs_f64();
        led.line(5, ok && secs < 10.0, "no interior critical points", detail.join(", "), secs);
    }

    // 6. monotone level curves and injectivity
    for (r, secs) in runs.iter().zip(&run_secs) {
        let inj = r.injectivity.as_ref().unwrap();
        let ok = inj.levels.len() == 10 && inj.min_increment() > 0.0 && inj.probes >= 10_000 && inj.collisions.is_empty();
        let t_inj = r.timings.iter().find(|s| s.0 == "injectivity").map_or(*secs, |s| s.1.as_secs_f64());
        led.line(
            6,
            ok && t_inj < 10.0,
            &format!("level monotonicity, {}", r.config.name),
            format!(
                "{} levels, min increment {:.1e}, {} collisions in {} probe pairs",
                inj.levels.len(),
                inj.min_increment(),
                inj.collisions.len(),
                inj.probes
            ),
            t_inj,
        );
    }

    // 7. small-gradient decay
    {
        let t = Instant::now();
        let sq = &runs[by_name("square-corner")];
        let table = sq.table.as_ref().unwrap();
        let ratios: Vec<(f64, f64)> = halving_ratios(table);
        let ok_ratio = ratios.len() >= 3 && ratios.iter().all(|r| (0.3..=0.7).contains(&r.1));
        led.line(
            7,
            ok_ratio,
            "corner decay, square-corner",
            format!(
                "measure(ε/2)/measure(ε) = {} (range [0.3, 0.7])",
                ratios.iter().map(|r| format!("{:.3} at {}", r.1, r.0)).collect::<Vec<_>>().join(", ")
            ),
            t.elapsed().as_secs_f64(),
        );
        for r in &runs {
            let t = r.table.as_ref().unwrap();
            let frac = t.measure(1e-3) / t.boundary_length;
            let secs = r.timings.iter().find(|s| s.0 == "measure").map_or(0.0, |s| s.1.as_secs_f64());
            led.line(
                7,
                frac < 0.01 && secs < 10.0,
                &format!("measure at 1e-3, {}", r.config.name),
                format!("{:.3}% of the zero-data boundary (limit 1%)", 100.0 * frac),
                secs,
            );
        }
    }

    // 8. finite ledger, stable under doubling the charge count
    {
        let i = by_name("dmo-theorem12");
        let r = &runs[i];
        let t = Instant::now();
        let mut cfg = bundled("dmo-theorem12").unwrap();
        cfg.solver.charges *= 2;
        cfg.solver.collocation *= 2;
        let doubled = run_scenario(cfg, Mode::Run, false);
        let secs = t.elapsed().as_secs_f64() + run_secs[i];
        let (a, b) = (r.ledger.as_ref().unwrap(), doubled.ledger.as_ref());
        let ok = a.is_conclusive()
            && a.inequality_holds()
            && b.is_some_and(|b| b.is_conclusive() && b.counts == a.counts);
        led.line(
            8,
            ok && secs < 30.0,
            "finite ledger, dmo-theorem12",
            format!(
                "(u, Θ, U) = ({}, {}, {}), doubled charges {:?}, conclusive {}",
                a.counts.u,
                a.counts.theta,
                a.counts.reflected,
                b.map(|b| (b.counts.u, b.counts.theta, b.counts.reflected)),
                a.is_conclusive()
            ),
            secs,
        );
        let d = doubled.domain.clone().unwrap();
        functions.push(("dmo doubled v".into(), doubled.v.unwrap().function, d.clone()));
        functions.push(("dmo doubled u".into(), doubled.u.unwrap().function, d));
    }

    // 9. gradients against central differences
    {
        let t = Instant::now();
        let mut worst = (0.0f64, String::new());
        for (name, f, d) in &functions {
            let e = gradient_fd_error(f as &dyn Harmonic<f64>, d, 100, 1e-5, 41).unwrap();
            if e >= worst.0 {
                worst = (e, name.clone());
            }
        }
        let secs = t.elapsed().as_secs_f64();
        led.line(
            9,
            worst.0 <= 1e-6 && secs < 1.0,
            "gradients vs central differences",
            format!("{} functions, worst {:.1e} ({}) (tol 1e-6)", functions.len(), worst.0, worst.1),
            secs,
        );
    }

    // 10. determinism
    {
        let t = Instant::now();
        let mut same = 0;
        for (r, (name, _)) in runs.iter().zip(SCENARIOS) {
            let again = run_scenario(bundled(name).unwrap(), Mode::Run, false);
            if report_bytes(r) == report_bytes(&again) {
                same += 1;
            }
        }
        let secs = t.elapsed().as_secs_f64() + run_secs.iter().sum::<f64>();
        led.line(
            10,
            same == SCENARIOS.len() && secs < 60.0,
            "deterministic reports",
            format!("{same}/{} scenarios byte-identical over two runs", SCENARIOS.len()),
            secs,
        );
    }

    println!("{} failed", led.failed);
    if led.failed > 0 {
        std::process::exit(1);
    }
}
