use rayon::prelude::*;

use crate::critical::{Rect, Region};
use crate::error::{Error, Result};
use crate::hodograph::HodographMap;
use crate::scalar::{cplx, Cplx, Real};

const SIDE_POINTS: usize = 200;
const INNER_SAMPLES: usize = 10_000;
const SHRINK: f64 = 0.9;
const MAX_SHRINKS: usize = 40;
/// Preimages of the bottom side may sit this far from the Dirichlet boundary.
const BOTTOM_SLACK: f64 = 1e-6;

/// Sides of the image rectangle, in counterclockwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SideId {
    Bottom,
    Right,
    Top,
    Left,
}

impl SideId {
    pub const ALL: [SideId; 4] = [SideId::Bottom, SideId::Right, SideId::Top, SideId::Left];

    pub fn index(self) -> usize {
        self as usize
    }

    fn corners<T: Real>(self, a: T, b: T) -> (Cplx<T>, Cplx<T>) {
        let z = T::zero();
        match self {
            SideId::Bottom => (cplx(-a, z), cplx(a, z)),
            SideId::Right => (cplx(a, z), cplx(a, b)),
            SideId::Top => (cplx(a, b), cplx(-a, b)),
            SideId::Left => (cplx(-a, b), cplx(-a, z)),
        }
    }
}

/// `E = Θ⁻¹((−a, a) × (0, b))` with a traced boundary.
#[derive(Clone, Debug)]
pub struct ELocalization<T> {
    pub a: T,
    pub b: T,
    /// Preimages of the rectangle sides, counterclockwise from `(−a, 0)`.
    pub boundary: Vec<(Cplx<T>, SideId)>,
    /// `E ⊂ Ω ∩ B₁`: every side inverts and stays in the ball, with the
    /// bottom side on the Dirichlet boundary.
    pub inner: bool,
    /// `E ⊃ Ω ∩ B_{1/2}` at every sample.
    pub outer: bool,
    /// Fraction of the `Ω ∩ B_{1/2}` samples that land in `E`.
    pub coverage: T,
    pub samples: usize,
    pub shrinks: usize,
    /// Gap between the first and last traced points.
    pub closure_gap: T,
    pub bbox: (Cplx<T>, Cplx<T>),
}

impl<T: Real> ELocalization<T> {
    pub fn region<'a>(&self, map: &'a HodographMap<T>) -> ERegion<'a, T> {
        ERegion {
            map,
            a: self.a,
            b: self.b,
            bbox: self.bbox,
            tol: T::zero(),
        }
    }

    pub fn closure<'a>(&self, map: &'a HodographMap<T>, tol: T) -> ERegion<'a, T> {
        ERegion { tol, ..self.region(map) }
    }

    pub fn polyline(&self) -> Vec<Cplx<T>> {
        self.boundary.iter().map(|p| p.0).collect()
    }
}

/// Membership test for `E` (or its closure, when `tol > 0`).
#[derive(Clone, Copy, Debug)]
pub struct ERegion<'a, T> {
    pub map: &'a HodographMap<T>,
    pub a: T,
    pub b: T,
    pub bbox: (Cplx<T>, Cplx<T>),
    pub tol: T,
}

impl<T: Real> ERegion<'_, T> {
    pub fn image_contains(&self, w: Cplx<T>) -> bool {
        let t = self.tol;
        if t > T::zero() {
            w.re.abs() <= self.a + t && w.im >= -t && w.im <= self.b + t
        } else {
            w.re.abs() < self.a && w.im > T::zero() && w.im < self.b
        }
    }

    /// Rectangle enclosing the traced boundary, padded by the tolerance.
    pub fn bounding_rect(&self) -> Result<Rect<T>> {
        let pad = self.tol + T::tol(1e-9);
        Rect::new(self.bbox.0, self.bbox.1).map(|r| r.dilate(pad))
    }
}

impl<T: Real> Region<T> for ERegion<'_, T> {
    fn contains(&self, z: Cplx<T>) -> bool {
        let domain = self.map.domain();
        let near = if self.tol > T::zero() {
            domain.inside(z) || domain.distance_to_boundary(z) <= self.tol
        } else {
            domain.inside(z)
        };
        near && self.map.theta(z).map(|w| self.image_contains(w)).unwrap_or(false)
    }

    fn may_intersect(&self, rect: &Rect<T>) -> bool {
        if !self.bounding_rect().map(|b| b.intersects(rect)).unwrap_or(true) {
            return false;
        }
        // cells well outside the domain cannot meet E
        let domain = self.map.domain();
        let c = rect.center();
        domain.inside(c) || domain.distance_to_boundary(c) <= rect.diameter() * T::lit(0.5) + self.tol
    }
}

struct Trace<T> {
    boundary: Vec<(Cplx<T>, SideId)>,
    inner: bool,
}

/// Inverts the rectangle sides by continuation. `inner` fails if any
/// inversion fails, leaves the closed domain or leaves `B₁`.
fn trace_sides<T: Real>(map: &HodographMap<T>, a: T, b: T) -> Trace<T> {
    let domain = map.domain();
    let anchor = domain.anchor();
    let radius = domain.clip_radius();
    let mut boundary = Vec::with_capacity(4 * SIDE_POINTS);
    let mut inner = true;
    let mut seed = None;
    for side in SideId::ALL {
        let (p, q) = side.corners(a, b);
        for k in 0..SIDE_POINTS {
            let t = T::from_usize_lossy(k) / T::from_usize_lossy(SIDE_POINTS);
            let w = p + (q - p) * t;
            match map.invert_unchecked(w, seed) {
                Ok(z) => {
                    // the bottom side must land on the Dirichlet boundary, where
                    // both v and the transported function vanish
                    let inside = if w.im == T::zero() {
                        domain.distance_to_dirichlet(z) <= T::lit(BOTTOM_SLACK)
                    } else {
                        map.contains_closed(z)
                    };
                    if !inside || (z - anchor).norm() > radius {
                        inner = false;
                    }
                    boundary.push((z, side));
                    seed = Some(z);
                }
                Err(_) => {
                    inner = false;
                    seed = None;
                }
            }
        }
    }
    Trace { boundary, inner }
}

fn bbox<T: Real>(pts: &[(Cplx<T>, SideId)]) -> (Cplx<T>, Cplx<T>) {
    let mut lo = cplx(T::infinity(), T::infinity());
    let mut hi = cplx(T::neg_infinity(), T::neg_infinity());
    for (z, _) in pts {
        lo = cplx(lo.re.min(z.re), lo.im.min(z.im));
        hi = cplx(hi.re.max(z.re), hi.im.max(z.im));
    }
    (lo, hi)
}

/// Builds `E` for a fixed image rectangle, or, with `rect = None`, picks
/// `(a, b)` just large enough to cover the images of `Ω ∩ B_{1/2}` samples
/// and shrinks both by 10% until the sides invert inside `Ω ∩ B₁`.
/// Partial coverage is reported, not an error.
pub fn localize_e<T: Real>(map: &HodographMap<T>, rect: Option<(T, T)>, seed: u64) -> Result<ELocalization<T>> {
    let domain = map.domain();
    let half = domain.clip_radius() * T::lit(0.5);
    let samples = domain.interior_samples(INNER_SAMPLES, seed, T::zero(), Some(half));
    let images: Vec<Cplx<T>> = samples.par_iter().map(|&z| map.theta(z)).collect::<Result<_>>()?;

    let (mut a, mut b) = match rect {
        Some((a, b)) => {
            if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("rectangle ({a}, {b}) must be positive")));
            }
            (a, b)
        }
        None => {
            let xm = images.iter().map(|w| w.re.abs()).fold(T::zero(), T::max);
            let ym = images.iter().map(|w| w.im).fold(T::zero(), T::max);
            if !(xm > T::zero() && ym > T::zero()) {
                return Err(Error::InvalidParameter("no samples in the half ball".into()));
            }
            (xm * T::lit(1.01), ym * T::lit(1.01))
        }
    };

    let mut shrinks = 0;
    let mut trace = trace_sides(map, a, b);
    while rect.is_none() && !trace.inner && shrinks < MAX_SHRINKS {
        a = a * T::lit(SHRINK);
        b = b * T::lit(SHRINK);
        shrinks += 1;
        trace = trace_sides(map, a, b);
    }

    let inside = |w: &Cplx<T>| w.re.abs() < a && w.im > T::zero() && w.im < b;
    let hit = images.iter().filter(|w| inside(w)).count();
    let n = images.len().max(1);
    // continue past the last point back to the starting corner
    let closure_gap = match (trace.boundary.first(), trace.boundary.last()) {
        (Some(f), Some(l)) => map
            .invert_unchecked(cplx(-a, T::zero()), Some(l.0))
            .map(|z| (z - f.0).norm())
            .unwrap_or(T::infinity()),
        _ => T::infinity(),
    };
    Ok(ELocalization {
        a,
        b,
        bbox: bbox(&trace.boundary),
        inner: trace.inner,
        outer: hit == images.len() && !images.is_empty(),
        coverage: T::from_usize_lossy(hit) / T::from_usize_lossy(n),
        samples: images.len(),
        shrinks,
        closure_gap,
        boundary: trace.boundary,
    })
}
