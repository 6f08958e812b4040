//! Critical points: argument-principle counts on the completion's
//! derivative, odd reflection, boundary small-gradient measure and the
//! counting ledger.

mod ledger;
mod measure;
mod reflect;
mod zeros;

pub use ledger::{counting_ledger, CriticalSetReport, LedgerCounts, BOUNDARY_EPS, CLOSURE_TOL};
pub use measure::{boundary_small_gradient_measure, BoundaryGradient, SmallGradientTable, OFFSETS};
pub use reflect::{reflect_odd, Reflected};
pub use zeros::{count_zeros, locate_zeros, ContourCount, Located, Rect, Region, Zero, CLUSTER, MAX_LEVELS};

use crate::analytic::{DerivativeField, Holomorphic};
use crate::error::Result;
use crate::geometry::Domain;
use crate::scalar::{Cplx, Real};
use crate::solver::HarmonicFunction;

/// Interior points at distance at least `margin` from the boundary.
#[derive(Clone, Copy, Debug)]
pub struct InteriorRegion<'a, T> {
    pub domain: &'a Domain<T>,
    pub margin: T,
}

impl<T: Real> Region<T> for InteriorRegion<'_, T> {
    fn contains(&self, z: Cplx<T>) -> bool {
        self.domain.inside(z) && self.domain.distance_to_boundary(z) >= self.margin
    }

    fn may_intersect(&self, rect: &Rect<T>) -> bool {
        self.may_meet(rect, 5)
    }
}

impl<T: Real> InteriorRegion<'_, T> {
    /// The distance to the boundary is 1-Lipschitz, so a cell whose centre
    /// is inside at distance `d` with `d + r < margin`, or outside with
    /// `d > r`, misses the region; undecided cells are quartered a few times.
    fn may_meet(&self, rect: &Rect<T>, depth: usize) -> bool {
        let c = rect.center();
        let r = rect.diameter() * T::lit(0.5);
        let d = self.domain.distance_to_boundary(c);
        let inside = self.domain.inside(c);
        if inside && d - r >= self.margin {
            return true;
        }
        let excluded = if inside { d + r < self.margin } else { d > r };
        if excluded {
            return false;
        }
        depth == 0 || rect.split(T::lit(0.5)).iter().any(|k| self.may_meet(k, depth - 1))
    }
}

/// Rectangle around `lo..hi`, dilated by a few percent of its diameter,
/// with the dilation chosen to keep the contour away from `poles`.
pub fn enclosing_rect<T: Real>(lo: Cplx<T>, hi: Cplx<T>, poles: &[(Cplx<T>, usize)]) -> Result<Rect<T>> {
    let base = Rect::new(lo, hi)?;
    let diam = base.diameter();
    let mut best = (T::neg_infinity(), base);
    for f in [0.02, 0.03, 0.05, 0.08, 0.12] {
        let r = base.dilate(diam * T::lit(f));
        let gap = poles.iter().map(|(p, _)| r.contour_distance(*p)).fold(T::infinity(), T::min);
        if gap > best.0 {
            best = (gap, r);
        }
    }
    Ok(best.1)
}

/// Critical points of `h` in the interior of `domain` at distance at least
/// `margin` from the boundary.
pub fn interior_critical_points<T: Real>(h: &HarmonicFunction<T>, domain: &Domain<T>, margin: T) -> Result<Located<T>> {
    let field = DerivativeField { h };
    let (lo, hi) = domain.bounding_box();
    let rect = enclosing_rect(lo, hi, &field.poles())?;
    locate_zeros(
        &field,
        rect,
        &InteriorRegion { domain, margin },
    )
}
