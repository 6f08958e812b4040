use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use planar_hodograph::geometry::{make_graph_domain, Domain, GraphParametrization, GraphProfile, Smoothness};
use planar_hodograph::solver::{
    bimodal_data, sine_data, unimodal_on_free_run, ClosedForm, HarmonicFunction, SolverConfig, Trace,
};
use planar_hodograph::{cplx, Cplx};

/// A scenario file: flat `key = value` pairs in named TOML sections.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    pub v: FunctionSpec,
    pub u: FunctionSpec,
    #[serde(default)]
    pub hodograph: HodographSpec,
    #[serde(default)]
    pub critical: CriticalSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// `halfdisk`, `polygon` or `graph`.
    pub kind: String,
    /// Graph profile: `zero`, `dmo`, `corner` or `custom-polyline`.
    pub phi: Option<String>,
    pub half_width: Option<f64>,
    /// Polyline profile nodes.
    pub xs: Option<Vec<f64>>,
    pub ys: Option<Vec<f64>>,
    /// Polygon vertices as a flat `[x0, y0, x1, y1, ...]` list.
    pub vertices: Option<Vec<f64>>,
    /// Polygon edges that carry data instead of the zero condition.
    #[serde(default)]
    pub free_edges: Vec<usize>,
    pub anchor: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub charges: usize,
    pub collocation: usize,
    pub offset: f64,
    pub target_residual: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::<f64>::default();
        Self {
            charges: d.charges,
            collocation: d.collocation,
            offset: d.offset,
            target_residual: d.target_residual,
        }
    }
}

/// How `v` or `u` is obtained.
///
/// `closed`: the named closed form itself. `trace`: MFS solve with the
/// named closed form as boundary data. `unimodal`, `bimodal`, `sine`: MFS
/// solve with the corresponding data on the longest free boundary run.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub kind: String,
    pub name: Option<String>,
    /// Support of the bump, as fractions of the free run.
    pub support: Option<[f64; 2]>,
    pub peak: Option<f64>,
    pub periods: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum RectangleSpec {
    Fixed([f64; 2]),
    Named(String),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HodographSpec {
    /// Half-width and height `(a, b)` of the image rectangle, or `"auto"`.
    pub rectangle: RectangleSpec,
    /// Level curves traced for the injectivity check.
    pub levels: usize,
    /// Probe pairs for the injectivity check.
    pub probes: usize,
    /// Points of `E` where the transformation law is checked.
    pub law_samples: usize,
}

impl Default for HodographSpec {
    fn default() -> Self {
        Self {
            rectangle: RectangleSpec::Named("auto".into()),
            levels: 10,
            probes: 10_000,
            law_samples: 500,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CriticalSpec {
    /// Thresholds of the small-gradient table.
    pub epsilons: Vec<f64>,
    pub boundary_samples: usize,
}

impl Default for CriticalSpec {
    fn default() -> Self {
        Self {
            epsilons: vec![0.04, 0.02, 0.01, 0.005, 0.001],
            boundary_samples: 20_000,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn finite_in(name: &str, x: f64, lo: f64, hi: f64) -> Result<(), ConfigError> {
    if x.is_finite() && lo <= x && x <= hi {
        Ok(())
    } else {
        Err(bad(format!("{name} = {x} outside [{lo}, {hi}]")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Documented ranges for every numeric field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(bad("name is empty"));
        }
        let s = &self.solver;
        if !(4..=4096).contains(&s.charges) {
            return Err(bad(format!("solver.charges = {} outside [4, 4096]", s.charges)));
        }
        if s.collocation < 2 * s.charges || s.collocation > 16384 {
            return Err(bad(format!(
                "solver.collocation = {} outside [2 x charges, 16384]",
                s.collocation
            )));
        }
        finite_in("solver.offset", s.offset, 1e-3, 2.0)?;
        finite_in("solver.target_residual", s.target_residual, 1e-16, 1.0)?;

        let h = &self.hodograph;
        match &h.rectangle {
            RectangleSpec::Fixed([a, b]) => {
                finite_in("hodograph.rectangle a", *a, 1e-6, 10.0)?;
                finite_in("hodograph.rectangle b", *b, 1e-6, 10.0)?;
            }
            RectangleSpec::Named(n) if n == "auto" => {}
            RectangleSpec::Named(n) => return Err(bad(format!("hodograph.rectangle = {n:?}, expected \"auto\" or [a, b]"))),
        }
        if !(1..=100).contains(&h.levels) {
            return Err(bad(format!("hodograph.levels = {} outside [1, 100]", h.levels)));
        }
        if !(1..=1_000_000).contains(&h.probes) {
            return Err(bad(format!("hodograph.probes = {} outside [1, 1e6]", h.probes)));
        }
        if !(1..=100_000).contains(&h.law_samples) {
            return Err(bad(format!("hodograph.law_samples = {} outside [1, 1e5]", h.law_samples)));
        }

        let c = &self.critical;
        if c.epsilons.is_empty() {
            return Err(bad("critical.epsilons is empty"));
        }
        for e in &c.epsilons {
            finite_in("critical.epsilons", *e, 0.0, 1e3)?;
        }
        if !(16..=1_000_000).contains(&c.boundary_samples) {
            return Err(bad(format!(
                "critical.boundary_samples = {} outside [16, 1e6]",
                c.boundary_samples
            )));
        }

        // building the pieces checks the remaining parameters
        self.solver_config().validate().map_err(|e| bad(e.to_string()))?;
        self.domain_checked()?;
        self.v.check("v")?;
        self.u.check("u")?;
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        SolverConfig {
            charges: self.solver.charges,
            collocation: self.solver.collocation,
            offset: self.solver.offset,
            target_residual: self.solver.target_residual,
            ..SolverConfig::default()
        }
    }

    pub fn rectangle(&self) -> Option<(f64, f64)> {
        match self.hodograph.rectangle {
            RectangleSpec::Fixed([a, b]) => Some((a, b)),
            RectangleSpec::Named(_) => None,
        }
    }

    fn domain_checked(&self) -> Result<(), ConfigError> {
        let d = &self.domain;
        match d.kind.as_str() {
            "halfdisk" => Ok(()),
            "graph" => {
                let phi = d.phi.as_deref().ok_or_else(|| bad("domain.phi missing for kind = graph"))?;
                if !["zero", "dmo", "corner", "custom-polyline"].contains(&phi) {
                    return Err(bad(format!("domain.phi = {phi:?} unknown")));
                }
                let hw = d.half_width.ok_or_else(|| bad("domain.half_width missing"))?;
                finite_in("domain.half_width", hw, 1e-3, 1.0)
            }
            "polygon" => {
                let v = d.vertices.as_ref().ok_or_else(|| bad("domain.vertices missing for kind = polygon"))?;
                if v.len() < 6 || v.len() % 2 != 0 {
                    return Err(bad("domain.vertices needs an even count of at least 6 coordinates"));
                }
                for x in v.iter().chain(d.anchor.iter().flatten()) {
                    finite_in("domain vertex coordinate", *x, -1e3, 1e3)?;
                }
                let n = v.len() / 2;
                if let Some(e) = d.free_edges.iter().find(|&&e| e >= n) {
                    return Err(bad(format!("domain.free_edges: edge {e} of a {n}-gon")));
                }
                Ok(())
            }
            k => Err(bad(format!("domain.kind = {k:?}, expected halfdisk | polygon | graph"))),
        }
    }

    pub fn build_domain(&self) -> planar_hodograph::Result<Domain<f64>> {
        let d = &self.domain;
        match d.kind.as_str() {
            "halfdisk" => Domain::half_disk(),
            "polygon" => {
                let v = d.vertices.as_deref().unwrap_or_default();
                let pts: Vec<Cplx<f64>> = v.chunks(2).map(|p| cplx(p[0], p[1])).collect();
                let [ax, ay] = d.anchor.unwrap_or([0.0, 0.0]);
                Domain::polygon(&pts, &d.free_edges, cplx(ax, ay))
            }
            _ => {
                let hw = d.half_width.unwrap_or(0.5);
                let phi = match d.phi.as_deref() {
                    Some("dmo") => GraphParametrization::dmo(),
                    Some("corner") => GraphParametrization::corner(),
                    Some("custom-polyline") => GraphParametrization::new(
                        GraphProfile::Polyline {
                            xs: d.xs.clone().unwrap_or_default(),
                            ys: d.ys.clone().unwrap_or_default(),
                        },
                        Smoothness::Lipschitz,
                        hw,
                    )?,
                    _ => GraphParametrization::flat(),
                };
                make_graph_domain(&phi, hw)
            }
        }
    }
}

/// The function a [`FunctionSpec`] resolves to before any solve.
pub enum Source {
    Closed(ClosedForm<f64>),
    Solve(Trace<f64>),
}

impl FunctionSpec {
    fn closed(&self, what: &str) -> Result<ClosedForm<f64>, ConfigError> {
        let name = self.name.as_deref().ok_or_else(|| bad(format!("{what}.name missing")))?;
        ClosedForm::by_name(name).ok_or_else(|| bad(format!("{what}.name = {name:?} is not a known closed form")))
    }

    fn check(&self, what: &str) -> Result<(), ConfigError> {
        match self.kind.as_str() {
            "closed" | "trace" => self.closed(what).map(|_| ()),
            "unimodal" => {
                let [a, b] = self.support.unwrap_or([0.1, 0.9]);
                let p = self.peak.unwrap_or(0.5);
                for (n, x) in [("support", a), ("support", b), ("peak", p)] {
                    finite_in(&format!("{what}.{n}"), x, 0.0, 1.0)?;
                }
                if !(a < p && p < b) {
                    return Err(bad(format!("{what}: need support[0] < peak < support[1]")));
                }
                Ok(())
            }
            "bimodal" => Ok(()),
            "sine" => {
                finite_in(&format!("{what}.periods"), self.periods.unwrap_or(1.0), 1e-3, 100.0)?;
                finite_in(&format!("{what}.amplitude"), self.amplitude.unwrap_or(1.0), -1e6, 1e6)
            }
            k => Err(bad(format!(
                "{what}.kind = {k:?}, expected closed | trace | unimodal | bimodal | sine"
            ))),
        }
    }

    pub fn source(&self, domain: &Domain<f64>) -> planar_hodograph::Result<Source> {
        let named = || {
            self.name
                .as_deref()
                .and_then(ClosedForm::by_name)
                .ok_or_else(|| planar_hodograph::Error::InvalidParameter("unknown closed form".into()))
        };
        Ok(match self.kind.as_str() {
            "closed" => Source::Closed(named()?),
            "trace" => Source::Solve(Trace::ClosedForm(named()?)),
            "unimodal" => {
                let [a, b] = self.support.unwrap_or([0.1, 0.9]);
                Source::Solve(Trace::Data(unimodal_on_free_run(domain, a, b, self.peak.unwrap_or(0.5))?))
            }
            "bimodal" => Source::Solve(Trace::Data(bimodal_data(domain)?)),
            _ => Source::Solve(Trace::Data(sine_data(
                domain,
                self.periods.unwrap_or(1.0),
                self.amplitude.unwrap_or(1.0),
            )?)),
        })
    }
}

impl Source {
    pub fn closed_function(&self) -> Option<HarmonicFunction<f64>> {
        match self {
            Source::Closed(c) => Some(HarmonicFunction::ClosedForm(c.clone())),
            Source::Solve(_) => None,
        }
    }
}
