use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{CurvePoint, Domain};
use crate::scalar::{Cplx, Real};
use crate::solver::{Harmonic, HarmonicFunction};

/// Inward offsets used for the extrapolation to the boundary.
pub const OFFSETS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
/// Fraction of non-monotone samples above which the table is flagged.
const ROUGH_FRACTION: f64 = 0.05;

/// Extrapolated boundary gradient at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryGradient<T> {
    pub point: Cplx<T>,
    pub arclength: T,
    pub weight: T,
    pub gradient: T,
    pub monotone: bool,
}

#[derive(Clone, Debug)]
pub struct SmallGradientTable<T> {
    /// `(ε, arc length of {|∇v| < ε})`, in the order the thresholds were given.
    pub entries: Vec<(T, T)>,
    /// Length of the Dirichlet boundary that was sampled.
    pub boundary_length: T,
    pub samples: Vec<BoundaryGradient<T>>,
    pub non_monotone: usize,
    /// More than 5% of the samples extrapolated non-monotonically.
    pub rough: bool,
}

impl<T: Real> SmallGradientTable<T> {
    pub fn measure(&self, eps: T) -> T {
        self.samples.iter().filter(|s| s.gradient < eps).fold(T::zero(), |acc, s| acc + s.weight)
    }

    /// Runs of consecutive samples with `|∇v| < eps`, each reported by its
    /// sample of smallest gradient.
    pub fn candidates(&self, eps: T) -> Vec<BoundaryGradient<T>> {
        let mut out: Vec<BoundaryGradient<T>> = Vec::new();
        let mut prev_in = false;
        for s in &self.samples {
            let hit = s.gradient < eps;
            if hit {
                match out.last_mut() {
                    Some(last) if prev_in => {
                        if s.gradient < last.gradient {
                            *last = *s;
                        }
                    }
                    _ => out.push(*s),
                }
            }
            prev_in = hit;
        }
        // a run may wrap around the end of the sampled list
        if out.len() > 1 && self.samples.first().is_some_and(|s| s.gradient < eps) && prev_in {
            let last = out.pop().unwrap();
            if last.gradient < out[0].gradient {
                out[0] = last;
            }
        }
        out
    }
}

/// Arc length of the part of the Dirichlet boundary where the extrapolated
/// `|∇v|` falls below each threshold. `n` samples are spread over the
/// Dirichlet segments proportionally to length (midpoint rule); at each the
/// gradient is read at the inward offsets 1e-3, 5e-4, 2.5e-4 and extrapolated
/// to the boundary by two rounds of Richardson.
pub fn boundary_small_gradient_measure<T: Real>(
    v: &HarmonicFunction<T>,
    domain: &Domain<T>,
    epsilons: &[T],
    n: usize,
) -> Result<SmallGradientTable<T>> {
    if epsilons.iter().any(|e| !(*e >= T::zero())) {
        return Err(Error::InvalidParameter("thresholds must be nonnegative".into()));
    }
    let curve = domain.boundary();
    let total = domain.dirichlet_length();
    if total <= T::zero() {
        return Err(Error::InvalidParameter("domain has no Dirichlet boundary".into()));
    }
    let mut nodes = Vec::with_capacity(n);
    for (i, &len) in curve.segment_lengths().iter().enumerate() {
        if !domain.is_dirichlet(i) {
            continue;
        }
        let k = ((T::from_usize_lossy(n) * len / total).round().to_usize().unwrap_or(1)).max(1);
        let w = len / T::from_usize_lossy(k);
        let offset = curve.segment_offset(i);
        for j in 0..k {
            nodes.push((offset + w * (T::from_usize_lossy(j) + T::lit(0.5)), w));
        }
    }
    let samples: Vec<BoundaryGradient<T>> = nodes
        .par_iter()
        .map(|&(s, weight)| {
            let at: CurvePoint<T> = curve.at_arclength(s);
            let p = curve.point(at);
            let inward = -curve.outward_normal(at).to_complex();
            let mut f = [T::zero(); 3];
            for (fi, &h) in f.iter_mut().zip(&OFFSETS) {
                *fi = v.gradient(p + inward * T::lit(h))?.norm();
            }
            let two = T::lit(2.0);
            let r1 = two * f[1] - f[0];
            let r2 = two * f[2] - f[1];
            let r = (T::lit(4.0) * r2 - r1) / T::lit(3.0);
            let monotone = (f[0] - f[1]) * (f[1] - f[2]) >= T::zero();
            Ok(BoundaryGradient {
                point: p,
                arclength: s,
                weight,
                gradient: r.max(T::zero()),
                monotone,
            })
        })
        .collect::<Result<_>>()?;
    let non_monotone = samples.iter().filter(|s| !s.monotone).count();
    let mut table = SmallGradientTable {
        entries: Vec::new(),
        boundary_length: total,
        rough: (non_monotone as f64) > ROUGH_FRACTION * samples.len() as f64,
        non_monotone,
        samples,
    };
    table.entries = epsilons.iter().map(|&e| (e, table.measure(e))).collect();
    Ok(table)
}
