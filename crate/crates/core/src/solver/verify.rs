use crate::critical::{interior_critical_points, Rect, Zero};
use crate::error::Result;
use crate::geometry::Domain;
use crate::scalar::{cplx, Real};
use crate::solver::{Harmonic, HarmonicFunction};

/// Corners and the rest of the boundary are excluded by this margin.
pub const INTERIOR_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct InteriorCriticalReport<T> {
    /// Critical points counted with multiplicity; `None` when inconclusive.
    pub count: Option<usize>,
    pub points: Vec<Zero<T>>,
    /// Cells whose count did not settle.
    pub inconclusive: Vec<Rect<T>>,
    /// Zeros of the completion's derivative in the enclosing rectangle,
    /// including those outside the domain or inside the margin.
    pub enclosing_count: Option<usize>,
}

impl<T: Real> InteriorCriticalReport<T> {
    pub fn is_conclusive(&self) -> bool {
        self.count.is_some()
    }
}

/// Counts interior critical points of `h` at distance at least 1e-3 from
/// the boundary via the argument principle on the completion's derivative.
pub fn verify_no_interior_critical_points<T: Real>(h: &HarmonicFunction<T>, domain: &Domain<T>) -> Result<InteriorCriticalReport<T>> {
    let located = interior_critical_points(h, domain, T::lit(INTERIOR_MARGIN))?;
    Ok(InteriorCriticalReport {
        count: located.is_conclusive().then(|| located.total_multiplicity()),
        enclosing_count: located.root.zeros,
        inconclusive: located.inconclusive.clone(),
        points: located.zeros,
    })
}

/// Largest componentwise gap between the analytic gradient and a central
/// difference with step `h`, over `n` interior points at distance at least
/// `10 h` from the boundary.
pub fn gradient_fd_error<T: Real>(f: &dyn Harmonic<T>, domain: &Domain<T>, n: usize, h: T, seed: u64) -> Result<T> {
    let mut worst = T::zero();
    for z in domain.interior_samples(n, seed, h * T::lit(10.0), None) {
        let dx = cplx(h, T::zero());
        let dy = cplx(T::zero(), h);
        let two_h = h + h;
        let fx = (f.value(z + dx)? - f.value(z - dx)?) / two_h;
        let fy = (f.value(z + dy)? - f.value(z - dy)?) / two_h;
        let g = f.gradient(z)?;
        worst = worst.max((g.x - fx).abs()).max((g.y - fy).abs());
    }
    Ok(worst)
}
