use std::time::{Duration, Instant};

use planar_hodograph::analytic::{completion, conjugate};
use planar_hodograph::critical::{
    boundary_small_gradient_measure, counting_ledger, reflect_odd, CriticalSetReport, SmallGradientTable, BOUNDARY_EPS,
};
use planar_hodograph::geometry::Domain;
use planar_hodograph::hodograph::{
    build_map, localize_e, transformation_law, verify_injectivity, ELocalization, HodographMap, InjectivityReport,
    Transported,
};
use planar_hodograph::solver::{gradient_fd_error, solve_dirichlet, Harmonic, HarmonicFunction, SolveReport};
use planar_hodograph::Cplx;

use crate::config::{ScenarioConfig, Source};

/// Relative tolerance of the conformal factor identity.
pub const DET_TOL: f64 = 1e-10;
/// Relative tolerance of the transformation law.
pub const LAW_TOL: f64 = 1e-6;
/// Gap allowed between analytic and central-difference gradients.
pub const GRADIENT_TOL: f64 = 1e-6;
pub const GRADIENT_STEP: f64 = 1e-5;
pub const GRADIENT_POINTS: usize = 100;
/// Threshold of the small-gradient measure bound, as a fraction of length.
pub const MEASURE_EPS: f64 = 1e-3;
pub const MEASURE_FRACTION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The whole pipeline with the ledger and output files.
    Run,
    /// Invariant suites only: solves, map diagnostics, gradients,
    /// injectivity and the transformation law.
    Verify,
}

#[derive(Clone, Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.message)
    }
}

/// `v` or `u` with how it was obtained.
#[derive(Clone, Debug)]
pub struct Function {
    pub function: HarmonicFunction<f64>,
    pub label: String,
    pub solve: Option<SolveReport<f64>>,
}

impl Function {
    /// Boundary residual, zero for closed forms.
    pub fn residual(&self) -> f64 {
        self.solve.as_ref().map_or(0.0, |r| r.residual)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LawCheck {
    pub samples: usize,
    pub max_relative: f64,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

/// Everything a scenario produced, up to the first hard error.
pub struct Run {
    pub config: ScenarioConfig,
    pub mode: Mode,
    pub domain: Option<Domain<f64>>,
    pub v: Option<Function>,
    pub u: Option<Function>,
    pub map: Option<HodographMap<f64>>,
    pub levels: Vec<f64>,
    pub injectivity: Option<InjectivityReport<f64>>,
    pub localization: Option<ELocalization<f64>>,
    pub law: Option<LawCheck>,
    /// Max gradient gap for `v`, `v̄` and `u`.
    pub gradients: Vec<(&'static str, f64)>,
    pub table: Option<SmallGradientTable<f64>>,
    pub ledger: Option<CriticalSetReport<f64>>,
    pub timings: Vec<(&'static str, Duration)>,
    pub error: Option<StageError>,
}

impl Run {
    fn new(config: ScenarioConfig, mode: Mode) -> Self {
        Self {
            config,
            mode,
            domain: None,
            v: None,
            u: None,
            map: None,
            levels: Vec::new(),
            injectivity: None,
            localization: None,
            law: None,
            gradients: Vec::new(),
            table: None,
            ledger: None,
            timings: Vec::new(),
            error: None,
        }
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let mut push = |name, value: f64, limit: f64, passed: bool| out.push(Check { name, value, limit, passed });
        let target = self.config.solver.target_residual;
        for (name, f) in [("v_residual", &self.v), ("u_residual", &self.u)] {
            if let Some(r) = f.as_ref().and_then(|f| f.solve.as_ref()) {
                push(name, r.residual, target, r.residual <= target);
            }
        }
        if let Some(m) = &self.map {
            let d = m.diagnostics();
            push("det_identity", d.det_mismatch, DET_TOL, d.det_mismatch <= DET_TOL);
            push("map_diagnostics", d.failures.len() as f64, 0.0, d.passed());
        }
        if !self.gradients.is_empty() {
            let worst = self.gradients.iter().map(|g| g.1).fold(0.0, f64::max);
            push("gradients", worst, GRADIENT_TOL, worst <= GRADIENT_TOL);
        }
        if let Some(inj) = &self.injectivity {
            push("injectivity", inj.collisions.len() as f64, 0.0, inj.passed());
        }
        if let Some(e) = &self.localization {
            push("e_inside_ball", e.shrinks as f64, 0.0, e.inner);
        }
        if let Some(l) = &self.law {
            push("transformation_law", l.max_relative, LAW_TOL, l.max_relative <= LAW_TOL);
        }
        if let Some(t) = &self.table {
            let frac = t.measure(MEASURE_EPS) / t.boundary_length;
            push("small_gradient_measure", frac, MEASURE_FRACTION, frac < MEASURE_FRACTION);
        }
        if let Some(l) = &self.ledger {
            if l.is_conclusive() {
                let c = l.counts;
                push("ledger_inequality", c.u as f64, (c.theta + c.reflected) as f64, l.inequality_holds());
            }
        }
        out
    }

    /// 0 pass, 1 hard error or failed check, 2 inconclusive ledger.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() || self.checks().iter().any(|c| !c.passed) {
            1
        } else if self.ledger.as_ref().is_some_and(|l| !l.is_conclusive()) {
            2
        } else {
            0
        }
    }

    pub fn status(&self) -> &'static str {
        match self.exit_code() {
            0 => "pass",
            2 => "inconclusive",
            _ if self.error.is_some() => "error",
            _ => "fail",
        }
    }
}

struct Stages<'a> {
    run: &'a mut Run,
    verbose: bool,
}

impl Stages<'_> {
    fn stage<R>(&mut self, name: &'static str, f: impl FnOnce(&Run) -> Result<R, String>) -> Option<R> {
        let t = Instant::now();
        let out = f(self.run);
        let dt = t.elapsed();
        self.run.timings.push((name, dt));
        if self.verbose {
            eprintln!("[{:>8.3} s] {name}", dt.as_secs_f64());
        }
        match out {
            Ok(r) => Some(r),
            Err(message) => {
                self.run.error = Some(StageError { stage: name, message });
                None
            }
        }
    }
}

fn obtain(source: Source, label: String, domain: &Domain<f64>, config: &ScenarioConfig) -> Result<Function, String> {
    match source {
        Source::Closed(c) => Ok(Function {
            function: HarmonicFunction::ClosedForm(c),
            label,
            solve: None,
        }),
        Source::Solve(trace) => {
            let s = solve_dirichlet(domain, &trace, &config.solver_config()).map_err(|e| e.to_string())?;
            Ok(Function {
                function: s.function,
                label,
                solve: Some(s.report),
            })
        }
    }
}

fn label(spec: &crate::config::FunctionSpec) -> String {
    match &spec.name {
        Some(n) => format!("{}:{n}", spec.kind),
        None => spec.kind.clone(),
    }
}

/// Quasi-random points of `E`, drawn from the domain inside the ball.
pub fn points_in_e(map: &HodographMap<f64>, e: &ELocalization<f64>, n: usize, seed: u64) -> Vec<Cplx<f64>> {
    use planar_hodograph::critical::Region;
    let domain = map.domain();
    let region = e.region(map);
    let mut draw = 4 * n;
    loop {
        let pts: Vec<Cplx<f64>> = domain
            .interior_samples(draw, seed, 1e-3, Some(domain.clip_radius()))
            .into_iter()
            .filter(|&z| region.contains(z))
            .take(n)
            .collect();
        if pts.len() == n || draw >= 256 * n {
            return pts;
        }
        draw *= 4;
    }
}

/// Evenly spaced levels strictly between 0 and the sampled max of `v` in
/// the ball.
pub fn level_values(v: &HarmonicFunction<f64>, domain: &Domain<f64>, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    let samples = domain.interior_samples(4000, seed, 0.0, Some(domain.clip_radius()));
    let vals = v.values(&samples).map_err(|e| e.to_string())?;
    let vmax = vals.into_iter().fold(0.0, f64::max);
    if !(vmax > 0.0) {
        return Err("v has no positive values in the ball".into());
    }
    Ok((1..=n).map(|k| vmax * k as f64 / (n + 1) as f64).collect())
}

/// Runs a scenario up to the first hard error.
pub fn run_scenario(config: ScenarioConfig, mode: Mode, verbose: bool) -> Run {
    let mut run = Run::new(config, mode);
    execute(&mut Stages { run: &mut run, verbose });
    run
}

fn execute(s: &mut Stages<'_>) {
    let seed = s.run.config.seed;

    let Some(domain) = s.stage("domain", |r| r.config.build_domain().map_err(|e| e.to_string())) else {
        return;
    };
    s.run.domain = Some(domain);

    let Some(v) = s.stage("solve-v", |r| {
        let d = r.domain.as_ref().unwrap();
        let src = r.config.v.source(d).map_err(|e| e.to_string())?;
        obtain(src, label(&r.config.v), d, &r.config)
    }) else {
        return;
    };
    s.run.v = Some(v);

    let Some(map) = s.stage("map", |r| {
        let d = r.domain.as_ref().unwrap();
        let v = r.v.as_ref().unwrap();
        let vb = conjugate(&v.function, d, d.anchor()).map_err(|e| format!("conjugate: {e}"))?;
        let g = completion(&v.function, &vb, d).map_err(|e| format!("completion: {e}"))?;
        let tol = (10.0 * v.residual()).max(1e-12);
        build_map(&g, d, tol).map_err(|e| e.to_string())
    }) else {
        return;
    };
    s.run.map = Some(map);

    let Some(u) = s.stage("solve-u", |r| {
        let d = r.domain.as_ref().unwrap();
        let src = r.config.u.source(d).map_err(|e| e.to_string())?;
        obtain(src, label(&r.config.u), d, &r.config)
    }) else {
        return;
    };
    s.run.u = Some(u);

    let Some(grads) = s.stage("gradients", |r| {
        let d = r.domain.as_ref().unwrap();
        let m = r.map.as_ref().unwrap();
        let fs: [(&'static str, &HarmonicFunction<f64>); 3] = [
            ("v", &r.v.as_ref().unwrap().function),
            ("v_conjugate", m.completion().conjugate()),
            ("u", &r.u.as_ref().unwrap().function),
        ];
        fs.iter()
            .map(|(n, f)| {
                let h: &dyn Harmonic<f64> = *f;
                gradient_fd_error(h, d, GRADIENT_POINTS, GRADIENT_STEP, seed)
                    .map(|e| (*n, e))
                    .map_err(|e| format!("{n}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
    }) else {
        return;
    };
    s.run.gradients = grads;

    let Some(levels) = s.stage("levels", |r| {
        level_values(&r.v.as_ref().unwrap().function, r.domain.as_ref().unwrap(), r.config.hodograph.levels, seed)
    }) else {
        return;
    };
    s.run.levels = levels;

    let Some(inj) = s.stage("injectivity", |r| {
        verify_injectivity(r.map.as_ref().unwrap(), &r.levels, r.config.hodograph.probes, seed).map_err(|e| e.to_string())
    }) else {
        return;
    };
    s.run.injectivity = Some(inj);

    let Some(e) = s.stage("localize", |r| {
        localize_e(r.map.as_ref().unwrap(), r.config.rectangle(), seed).map_err(|e| e.to_string())
    }) else {
        return;
    };
    s.run.localization = Some(e);

    let Some(law) = s.stage("transformation-law", |r| {
        let m = r.map.as_ref().unwrap();
        let e = r.localization.as_ref().unwrap();
        let pts = points_in_e(m, e, r.config.hodograph.law_samples, seed);
        if pts.is_empty() {
            return Err("no sample points in E".into());
        }
        let t = Transported {
            map: m,
            u: &r.u.as_ref().unwrap().function,
        };
        let max_relative = transformation_law(&t, &pts).map_err(|e| e.to_string())?;
        Ok(LawCheck {
            samples: pts.len(),
            max_relative,
        })
    }) else {
        return;
    };
    s.run.law = Some(law);

    if s.run.mode == Mode::Verify {
        return;
    }

    let Some(table) = s.stage("measure", |r| {
        let mut eps = r.config.critical.epsilons.clone();
        for extra in [MEASURE_EPS, BOUNDARY_EPS] {
            if !eps.contains(&extra) {
                eps.push(extra);
            }
        }
        boundary_small_gradient_measure(
            &r.v.as_ref().unwrap().function,
            r.domain.as_ref().unwrap(),
            &eps,
            r.config.critical.boundary_samples,
        )
        .map_err(|e| e.to_string())
    }) else {
        return;
    };
    s.run.table = Some(table);

    let Some(ledger) = s.stage("ledger", |r| {
        let m = r.map.as_ref().unwrap();
        let e = r.localization.as_ref().unwrap();
        let u = r.u.as_ref().unwrap();
        let v = r.v.as_ref().unwrap();
        // U(X, 0) = u at a point where v vanishes up to its residual
        let tol = 10.0 * (u.residual() + v.residual()) + 1e-12;
        let refl = reflect_odd(Transported { map: m, u: &u.function }, e.a, tol).map_err(|e| format!("reflect: {e}"))?;
        counting_ledger(&u.function, m, &refl, e, r.table.clone().unwrap()).map_err(|e| e.to_string())
    }) else {
        return;
    };
    s.run.ledger = Some(ledger);
}
