use crate::analytic::{DerivativeField, Holomorphic};
use crate::critical::measure::{BoundaryGradient, SmallGradientTable};
use crate::critical::reflect::Reflected;
use crate::critical::zeros::{locate_zeros, Located, Rect, Region, Zero};
use crate::critical::enclosing_rect;
use crate::error::Result;
use crate::hodograph::{ELocalization, HodographMap};
use crate::scalar::{cplx, Real};
use crate::solver::HarmonicFunction;

/// Distance from `E` within which points count as in its closure.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Threshold on the extrapolated boundary gradient for boundary candidates.
pub const BOUNDARY_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LedgerCounts {
    /// Distinct critical points of `u` in `Ē`.
    pub u: usize,
    /// Distinct points of `C(Θ)` in `Ē`, boundary candidates included.
    pub theta: usize,
    /// Distinct critical points of the reflected `U` in `(−a, a) × (−b, b)`.
    pub reflected: usize,
}

#[derive(Clone, Debug)]
pub struct CriticalSetReport<T> {
    pub interior_points: Vec<Zero<T>>,
    pub theta_points: Vec<Zero<T>>,
    pub boundary_candidates: Vec<BoundaryGradient<T>>,
    pub reflected_points: Vec<Zero<T>>,
    pub boundary_small_gradient: SmallGradientTable<T>,
    pub counts: LedgerCounts,
    /// Whether the `u`, `Θ` and `U` counts are settled.
    pub conclusive: [bool; 3],
    /// Unsettled cells, labelled by the count they belong to.
    pub inconclusive: Vec<(&'static str, Rect<T>)>,
    pub image_rect: (T, T),
}

impl<T: Real> CriticalSetReport<T> {
    pub fn is_conclusive(&self) -> bool {
        self.conclusive.iter().all(|&c| c)
    }

    pub fn inequality_holds(&self) -> bool {
        self.counts.u <= self.counts.theta + self.counts.reflected
    }
}

fn locate_in_e<T: Real>(f: &dyn Holomorphic<T>, map: &HodographMap<T>, e: &ELocalization<T>) -> Result<Located<T>> {
    let closure = e.closure(map, T::lit(CLOSURE_TOL));
    let rect = enclosing_rect(e.bbox.0, e.bbox.1, &f.poles())?;
    locate_zeros(f, rect, &closure)
}

/// The three counts of the ledger `H⁰(C(u) ∩ Ē) ≤ H⁰(C(Θ) ∩ Ē) + H⁰(C(U))`.
/// `C(u)` and interior `C(Θ)` come from zero location on the completions'
/// derivatives over a rectangle enclosing `E`, kept if in `Ē`. Boundary
/// points of `C(Θ)` are the runs of the small-gradient table below 1e-6 that
/// lie in `Ē`; they are candidates, not certified zeros.
pub fn counting_ledger<T: Real>(
    u: &HarmonicFunction<T>,
    map: &HodographMap<T>,
    reflected: &Reflected<'_, T>,
    e: &ELocalization<T>,
    table: SmallGradientTable<T>,
) -> Result<CriticalSetReport<T>> {
    let mut inconclusive = Vec::new();

    let cu = locate_in_e(&DerivativeField { h: u }, map, e)?;
    inconclusive.extend(cu.inconclusive.iter().map(|r| ("u", *r)));

    let cv = locate_in_e(&map.completion().derivative_field(), map, e)?;
    inconclusive.extend(cv.inconclusive.iter().map(|r| ("theta", *r)));
    let closure = e.closure(map, T::lit(CLOSURE_TOL));
    let boundary_candidates: Vec<BoundaryGradient<T>> = table
        .candidates(T::lit(BOUNDARY_EPS))
        .into_iter()
        .filter(|c| closure.contains(c.point))
        .filter(|c| cv.zeros.iter().all(|z| (z.point - c.point).norm() > T::lit(CLOSURE_TOL)))
        .collect();

    let image = Rect::new(cplx(-e.a, -e.b), cplx(e.a, e.b))?;
    let cr = locate_zeros(reflected, image, &image)?;
    inconclusive.extend(cr.inconclusive.iter().map(|r| ("reflected", *r)));

    Ok(CriticalSetReport {
        counts: LedgerCounts {
            u: cu.zeros.len(),
            theta: cv.zeros.len() + boundary_candidates.len(),
            reflected: cr.zeros.len(),
        },
        conclusive: [cu.is_conclusive(), cv.is_conclusive(), cr.is_conclusive()],
        interior_points: cu.zeros,
        theta_points: cv.zeros,
        boundary_candidates,
        reflected_points: cr.zeros,
        boundary_small_gradient: table,
        inconclusive,
        image_rect: (e.a, e.b),
    })
}
