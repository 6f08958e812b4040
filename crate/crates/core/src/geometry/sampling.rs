use crate::error::{Error, Result};
use crate::geometry::curve::CurvePoint;
use crate::geometry::domain::Domain;
use crate::scalar::{Cplx, Real, Vec2};
use crate::sequence::QuasiRandom2;

/// Boundary sample with its arc-length coordinate and quadrature weight.
#[derive(Clone, Copy, Debug)]
pub struct BoundarySample<T> {
    pub point: Cplx<T>,
    pub tangent: Vec2<T>,
    /// Outward unit normal.
    pub normal: Vec2<T>,
    pub arclength: T,
    pub weight: T,
    pub at: CurvePoint<T>,
    pub dirichlet: bool,
    /// Within two sample spacings of a corner, where the normal is unreliable.
    pub near_corner: bool,
}

/// `n` midpoint samples, uniform in arc length over the whole boundary.
pub fn boundary_sample<T: Real>(domain: &Domain<T>, n: usize) -> Result<Vec<BoundarySample<T>>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("boundary sample count {n} < 8")));
    }
    let curve = domain.boundary();
    let total = curve.length();
    let h = total / T::from_usize_lossy(n);
    Ok((0..n)
        .map(|k| {
            let s = (T::from_usize_lossy(k) + T::lit(0.5)) * h;
            sample_at(domain, s, h)
        })
        .collect())
}

/// `n` midpoint samples spread over the segments selected by `keep`,
/// proportionally to their lengths.
pub fn segment_sample<T: Real>(
    domain: &Domain<T>,
    n: usize,
    keep: impl Fn(usize) -> bool,
) -> Vec<BoundarySample<T>> {
    let curve = domain.boundary();
    let lengths = curve.segment_lengths();
    let total: T = (0..lengths.len()).filter(|&i| keep(i)).map(|i| lengths[i]).sum();
    if total == T::zero() {
        return vec![];
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..lengths.len() {
        if !keep(i) {
            continue;
        }
        let m = ((T::from_usize_lossy(n) * lengths[i] / total).round().as_f64() as usize).max(1);
        let h = lengths[i] / T::from_usize_lossy(m);
        for k in 0..m {
            let s = curve.segment_offset(i) + (T::from_usize_lossy(k) + T::lit(0.5)) * h;
            out.push(sample_at(domain, s, h));
        }
    }
    out
}

/// Samples on `∂Ω` only.
pub fn dirichlet_sample<T: Real>(domain: &Domain<T>, n: usize) -> Vec<BoundarySample<T>> {
    segment_sample(domain, n, |i| domain.is_dirichlet(i))
}

pub(crate) fn sample_at<T: Real>(domain: &Domain<T>, s: T, spacing: T) -> BoundarySample<T> {
    let curve = domain.boundary();
    let at = curve.at_arclength(s);
    let tangent = curve.unit_tangent(at);
    let total = curve.length();
    let near_corner = curve.corners().any(|k| {
        let d = (s - k.arclength).abs();
        d.min(total - d) < spacing * T::lit(2.0)
    });
    BoundarySample {
        point: curve.point(at),
        tangent,
        normal: tangent.rotate_cw(),
        arclength: s,
        weight: spacing,
        at,
        dirichlet: domain.is_dirichlet(at.segment),
        near_corner,
    }
}

/// Result of the chord-arc sampler.
#[derive(Clone, Copy, Debug)]
pub struct ChordArc<T> {
    pub constant: T,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
}

/// Sampled supremum of (shorter boundary arc) / chord over `n_pairs`
/// quasi-random pairs of arc-length coordinates. On a fixed seed the value is
/// nondecreasing in `n_pairs`.
pub fn chord_arc_constant<T: Real>(domain: &Domain<T>, n_pairs: usize, seed: u64) -> Result<ChordArc<T>> {
    if n_pairs < 2 {
        return Err(Error::InvalidParameter(format!("n_pairs = {n_pairs} < 2")));
    }
    let curve = domain.boundary();
    let total = curve.length();
    let mut seq = QuasiRandom2::new(seed);
    let mut best = T::zero();
    let mut used = 0;
    let mut skipped = 0;
    for _ in 0..n_pairs {
        let (u, v): (T, T) = seq.next_pair();
        let (s1, s2) = (u * total, v * total);
        let z1 = curve.point(curve.at_arclength(s1));
        let z2 = curve.point(curve.at_arclength(s2));
        let chord = (z1 - z2).norm();
        if chord < T::lit(1e-12) {
            skipped += 1;
            continue;
        }
        let d = (s1 - s2).abs();
        let arc = d.min(total - d);
        best = best.max(arc / chord);
        used += 1;
    }
    if used == 0 {
        return Err(Error::AllPairsDegenerate);
    }
    Ok(ChordArc {
        constant: best,
        pairs_used: used,
        pairs_skipped: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn circle_normals_are_radial() {
        let d = Domain::<f64>::disk(cplx(0.0, 0.0), 1.0, 0.0, true).unwrap();
        for s in boundary_sample(&d, 8).unwrap() {
            let radial = Vec2::from_complex(s.point);
            assert!((s.normal - radial).norm() < 1e-12);
        }
    }

    #[test]
    fn weights_sum_to_length() {
        let d = Domain::<f64>::half_disk().unwrap();
        let total: f64 = boundary_sample(&d, 1000).unwrap().iter().map(|s| s.weight).sum();
        assert!((total - d.boundary().length()).abs() < 1e-9);
        let dl: f64 = dirichlet_sample(&d, 100).iter().map(|s| s.weight).sum();
        assert!((dl - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let d = Domain::<f64>::half_disk().unwrap();
        assert!(boundary_sample(&d, 7).is_err());
    }
}
