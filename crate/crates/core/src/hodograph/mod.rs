//! The hodograph map `Θ = (v̄, v)`: diagnostics, Newton inversion, level
//! curves, injectivity probes, the localized region `E` and transport of a
//! second harmonic function through `Θ⁻¹`.

mod level;
mod localize;
mod transport;

pub use level::{trace_level_curve, trace_level_set, verify_injectivity, Collision, InjectivityReport, LevelCheck, LevelCurve};
pub use localize::{localize_e, ELocalization, ERegion, SideId};
pub use transport::{transformation_law, Transported};

use rayon::prelude::*;

use crate::analytic::AnalyticCompletion;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::scalar::{cplx, rel_diff, Cplx, Real};
use crate::solver::Harmonic;

const ANCHOR_HARD: f64 = 1e-4;
const ANCHOR_SOFT: f64 = 1e-6;
const DET_LIMIT: f64 = 1e-10;
const INVERT_TOL: f64 = 1e-10;
const INVERT_ITERS: usize = 50;
const FALLBACK_SEEDS: usize = 8;
const SEED_GRID: usize = 16;

#[derive(Clone, Debug, Default)]
pub struct MapDiagnostics<T> {
    /// `|Θ(anchor)|`.
    pub anchor_offset: T,
    /// Max relative gap between `|det DΘ|` and `|∇v|²`.
    pub det_mismatch: T,
    pub det_samples: usize,
    /// Max `|v|` on sampled Dirichlet boundary points.
    pub boundary_height: T,
    pub boundary_tolerance: T,
    pub boundary_samples: usize,
    pub failures: Vec<String>,
}

impl<T: Real> MapDiagnostics<T> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `Θ(z) = v̄(z) + i v(z)`, read as the point `(X, Y)`.
#[derive(Clone, Debug)]
pub struct HodographMap<T> {
    completion: AnalyticCompletion<T>,
    domain: Domain<T>,
    diagnostics: MapDiagnostics<T>,
    /// Interior grid points with their images, for seeding Newton.
    seeds: Vec<(Cplx<T>, Cplx<T>)>,
    /// Slack allowed when certifying that an inverse lies in the domain.
    slack: T,
}

impl<T: Real> HodographMap<T> {
    pub fn completion(&self) -> &AnalyticCompletion<T> {
        &self.completion
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn diagnostics(&self) -> &MapDiagnostics<T> {
        &self.diagnostics
    }

    pub fn theta(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.completion.g(z)
    }

    /// `DΘ` as rows `(∂x v̄, ∂y v̄)` and `(∂x v, ∂y v)`.
    pub fn jacobian(&self, z: Cplx<T>) -> Result<[[T; 2]; 2]> {
        let gb = self.completion.conjugate().gradient(z)?;
        let gv = self.completion.base().gradient(z)?;
        Ok([[gb.x, gb.y], [gv.x, gv.y]])
    }

    pub fn det(&self, z: Cplx<T>) -> Result<T> {
        let j = self.jacobian(z)?;
        Ok(j[0][0] * j[1][1] - j[0][1] * j[1][0])
    }

    /// Newton iteration on `g(z) = w` from `z0`; returns the last iterate
    /// and its residual `|g(z) - w|`.
    pub fn newton(&self, w: Cplx<T>, z0: Cplx<T>) -> (Cplx<T>, T) {
        let mut z = z0;
        let mut best = (z0, T::infinity());
        let (lo, hi) = self.domain.bounding_box();
        let reach = (hi - lo).norm();
        for _ in 0..INVERT_ITERS {
            let Ok(gz) = self.completion.g(z) else { break };
            let r = gz - w;
            let res = r.norm();
            if res < best.1 {
                best = (z, res);
            }
            if res <= T::tol(INVERT_TOL) * T::lit(0.01) {
                break;
            }
            let Ok(d) = self.completion.g_prime(z) else { break };
            let mut step = r / d;
            // damp steps that would jump across the domain
            let cap = reach * T::lit(0.25);
            if step.norm() > cap {
                step = step * (cap / step.norm());
            }
            z -= step;
            if !(z.re.is_finite() && z.im.is_finite()) {
                break;
            }
        }
        best
    }

    /// Seeds ordered by the distance of their images from `w`.
    fn seeds_near(&self, w: Cplx<T>, k: usize) -> Vec<Cplx<T>> {
        let mut idx: Vec<(T, Cplx<T>)> = self.seeds.iter().map(|&(z, t)| ((t - w).norm(), z)).collect();
        idx.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        idx.into_iter().take(k).map(|p| p.1).collect()
    }

    /// Inverse image of `w` without the domain certificate: the first of
    /// `seed` and the nearest grid seeds from which Newton converges.
    pub fn invert_unchecked(&self, w: Cplx<T>, seed: Option<Cplx<T>>) -> Result<Cplx<T>> {
        let mut tried = Vec::with_capacity(FALLBACK_SEEDS + 1);
        if let Some(s) = seed {
            tried.push(s);
        }
        tried.extend(self.seeds_near(w, FALLBACK_SEEDS + 1));
        let mut last = (tried[0], T::infinity());
        let mut outside = None;
        for s in tried {
            let (z, res) = self.newton(w, s);
            if res <= T::tol(INVERT_TOL) {
                // prefer a preimage in the domain over a spurious branch
                if self.contains_closed(z) {
                    return Ok(z);
                }
                let d = self.domain.distance_to_boundary(z);
                if outside.map_or(true, |(_, best)| d < best) {
                    outside = Some((z, d));
                }
            }
            if res < last.1 {
                last = (z, res);
            }
        }
        if let Some((z, _)) = outside {
            return Ok(z);
        }
        Err(Error::InversionFailed {
            x: last.0.re.as_f64(),
            y: last.0.im.as_f64(),
            residual: last.1.as_f64(),
        })
    }

    /// `Θ⁻¹(w)` with `|Θ(z) - w| ≤ 1e-10`, certified to lie in the closed
    /// domain (up to a slack of `1e-9` for boundary images).
    pub fn invert(&self, w: Cplx<T>, seed: Option<Cplx<T>>) -> Result<Cplx<T>> {
        let z = self.invert_unchecked(w, seed)?;
        if self.contains_closed(z) {
            Ok(z)
        } else {
            Err(Error::LeftDomain {
                x: z.re.as_f64(),
                y: z.im.as_f64(),
            })
        }
    }

    pub(crate) fn contains_closed(&self, z: Cplx<T>) -> bool {
        self.domain.inside(z) || self.domain.distance_to_boundary(z) <= self.slack
    }
}

/// Builds `Θ` and checks the anchor normalization, the conformal factor
/// identity `|det DΘ| = |∇v|²` at 10³ interior samples and `|v| ≤
/// boundary_tol` on the Dirichlet boundary. Only an anchor offset above
/// 1e-4 is a hard error; other failures are listed in the diagnostics.
pub fn build_map<T: Real>(completion: &AnalyticCompletion<T>, domain: &Domain<T>, boundary_tol: T) -> Result<HodographMap<T>> {
    let anchor = domain.anchor();
    let at = completion.g(anchor)?;
    let mut diag = MapDiagnostics {
        anchor_offset: at.norm(),
        boundary_tolerance: boundary_tol,
        ..Default::default()
    };
    if diag.anchor_offset > T::lit(ANCHOR_HARD) {
        return Err(Error::AnchorNotMapped {
            x: at.re.as_f64(),
            y: at.im.as_f64(),
        });
    }
    if diag.anchor_offset > T::tol(ANCHOR_SOFT) {
        diag.failures.push(format!("anchor maps to |Θ| = {:e}", diag.anchor_offset.as_f64()));
    }

    let samples = domain.interior_samples(1000, 21, T::lit(1e-6), None);
    let v = completion.base();
    let vb = completion.conjugate();
    let gaps: Vec<T> = samples
        .par_iter()
        .map(|&z| {
            let gv = v.gradient(z)?;
            let gb = vb.gradient(z)?;
            let det = gb.x * gv.y - gb.y * gv.x;
            Ok(rel_diff(det.abs(), gv.norm_sqr()))
        })
        .collect::<Result<_>>()?;
    diag.det_mismatch = gaps.iter().copied().fold(T::zero(), T::max);
    diag.det_samples = samples.len();
    if !(diag.det_mismatch <= T::tol(DET_LIMIT)) {
        diag.failures.push(format!("|det DΘ| vs |∇v|² mismatch {:e}", diag.det_mismatch.as_f64()));
    }

    let curve = domain.boundary();
    let mut heights = Vec::new();
    for (i, &len) in curve.segment_lengths().iter().enumerate() {
        if !domain.is_dirichlet(i) {
            continue;
        }
        let k = 64;
        for j in 0..k {
            let s = curve.segment_offset(i) + len * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(k);
            heights.push(v.value(curve.point(curve.at_arclength(s)))?.abs());
        }
    }
    diag.boundary_samples = heights.len();
    diag.boundary_height = heights.iter().copied().fold(T::zero(), T::max);
    if diag.boundary_height > boundary_tol {
        diag.failures.push(format!(
            "|v| = {:e} on the Dirichlet boundary exceeds {:e}",
            diag.boundary_height.as_f64(),
            boundary_tol.as_f64()
        ));
    }

    let (lo, hi) = domain.bounding_box();
    let mut grid = Vec::new();
    for i in 0..SEED_GRID {
        for j in 0..SEED_GRID {
            let z = cplx(
                lo.re + (hi.re - lo.re) * (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(SEED_GRID),
                lo.im + (hi.im - lo.im) * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(SEED_GRID),
            );
            if domain.inside(z) {
                grid.push(z);
            }
        }
    }
    let seeds = grid
        .into_iter()
        .filter_map(|z| completion.g(z).ok().map(|w| (z, w)))
        .collect();
    Ok(HodographMap {
        completion: completion.clone(),
        domain: domain.clone(),
        diagnostics: diag,
        seeds,
        slack: T::tol(1e-9),
    })
}
