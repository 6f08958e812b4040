//! Graph domains `{y > phi(x)}` closed inside the unit ball.

use crate::error::{Error, Result};
use crate::geometry::domain::Domain;
use crate::geometry::segment::Segment;
use crate::scalar::{cplx, Real};

/// Regularity class of a boundary parametrization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Lipschitz,
    C1,
    C1Dini,
    C1Dmo,
}

impl Smoothness {
    /// Every class except plain Lipschitz has a continuous derivative.
    pub fn is_c1(self) -> bool {
        !matches!(self, Smoothness::Lipschitz)
    }
}

/// Profile function `phi` of a graph boundary.
#[derive(Clone, Debug)]
pub enum GraphProfile<T> {
    Zero,
    /// `x / |log|x||^{1/2}`, continuous at 0 and C1 with a non-Dini modulus.
    Dmo,
    /// `|x|`, a right-angle corner at the origin.
    Corner,
    /// Piecewise linear through the nodes, `xs` strictly increasing.
    Polyline { xs: Vec<T>, ys: Vec<T> },
}

impl<T: Real> GraphProfile<T> {
    pub fn eval(&self, x: T) -> T {
        match self {
            GraphProfile::Zero => T::zero(),
            GraphProfile::Dmo => dmo_unchecked(x),
            GraphProfile::Corner => x.abs(),
            GraphProfile::Polyline { xs, ys } => {
                let i = polyline_cell(xs, x);
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                ys[i] + (ys[i + 1] - ys[i]) * t
            }
        }
    }

    pub fn derivative(&self, x: T) -> T {
        match self {
            GraphProfile::Zero => T::zero(),
            GraphProfile::Dmo => {
                if x == T::zero() {
                    return T::zero();
                }
                // phi' = L^{-1/2} + L^{-3/2} / 2 with L = |log|x||
                let l = x.abs().ln().abs();
                l.powf(T::lit(-0.5)) + T::lit(0.5) * l.powf(T::lit(-1.5))
            }
            GraphProfile::Corner => {
                if x >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                }
            }
            GraphProfile::Polyline { xs, ys } => {
                let i = polyline_cell(xs, x);
                (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
            }
        }
    }

    /// Abscissas where the profile is not smooth, strictly inside `(lo, hi)`.
    pub fn kinks(&self, lo: T, hi: T) -> Vec<T> {
        let inside = |x: T| x > lo && x < hi;
        match self {
            GraphProfile::Zero => vec![],
            // not a corner, but the curvature is unbounded there
            GraphProfile::Dmo | GraphProfile::Corner => {
                if inside(T::zero()) {
                    vec![T::zero()]
                } else {
                    vec![]
                }
            }
            GraphProfile::Polyline { xs, .. } => xs.iter().copied().filter(|&x| inside(x)).collect(),
        }
    }

    pub fn is_piecewise_linear(&self) -> bool {
        matches!(
            self,
            GraphProfile::Zero | GraphProfile::Corner | GraphProfile::Polyline { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphProfile::Zero => "zero",
            GraphProfile::Dmo => "dmo",
            GraphProfile::Corner => "corner",
            GraphProfile::Polyline { .. } => "custom-polyline",
        }
    }
}

fn polyline_cell<T: Real>(xs: &[T], x: T) -> usize {
    let n = xs.len();
    match xs.iter().position(|&xi| xi > x) {
        Some(0) => 0,
        Some(i) => (i - 1).min(n - 2),
        None => n - 2,
    }
}

fn dmo_unchecked<T: Real>(x: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    x / x.abs().ln().abs().sqrt()
}

/// `x / |log|x||^{1/2}` on `|x| < 1/2`, extended by 0 at the origin.
pub fn dmo_phi<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() || x.abs() >= T::lit(0.5) {
        return Err(Error::OutOfRange {
            value: x.as_f64(),
            range: "|x| < 1/2",
        });
    }
    Ok(dmo_unchecked(x))
}

/// A boundary profile together with its declared regularity.
#[derive(Clone, Debug)]
pub struct GraphParametrization<T> {
    pub profile: GraphProfile<T>,
    pub smoothness: Smoothness,
}

impl<T: Real> GraphParametrization<T> {
    /// Checks `phi(0) = 0` and, for C1 tags, the derivative evaluator against
    /// a five-point difference quotient at 100 points of `[-half_width, half_width]`.
    pub fn new(profile: GraphProfile<T>, smoothness: Smoothness, half_width: T) -> Result<Self> {
        if let GraphProfile::Polyline { xs, ys } = &profile {
            if xs.len() < 2 || xs.len() != ys.len() || xs.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidParameter(
                    "polyline profile needs >= 2 nodes with increasing x".into(),
                ));
            }
            if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("polyline profile node".into()));
            }
        }
        let at0 = profile.eval(T::zero());
        if at0.abs() > T::lit(1e-14) {
            return Err(Error::InvalidParameter(format!("phi(0) = {at0}, expected 0")));
        }
        if smoothness.is_c1() {
            if !profile.kinks(-half_width, half_width).is_empty() && profile.is_piecewise_linear() {
                return Err(Error::InvalidParameter(
                    "piecewise linear profile with kinks cannot carry a C1 tag".into(),
                ));
            }
            check_derivative(&profile, half_width)?;
        }
        Ok(Self { profile, smoothness })
    }

    pub fn dmo() -> Self {
        Self {
            profile: GraphProfile::Dmo,
            smoothness: Smoothness::C1Dmo,
        }
    }

    pub fn flat() -> Self {
        Self {
            profile: GraphProfile::Zero,
            smoothness: Smoothness::C1Dini,
        }
    }

    pub fn corner() -> Self {
        Self {
            profile: GraphProfile::Corner,
            smoothness: Smoothness::Lipschitz,
        }
    }
}

fn check_derivative<T: Real>(profile: &GraphProfile<T>, half_width: T) -> Result<()> {
    // Derivative checks run in f64 regardless of T: the tolerance is 1e-6.
    let w = half_width.as_f64();
    let f = |x: f64| profile.eval(T::lit(x)).as_f64();
    let h = 1e-4 * w;
    for i in 0..100 {
        let x = -w + 2.0 * w * (i as f64 + 0.5) / 100.0;
        if x.abs() < 2.5 * h {
            continue;
        }
        // keep the stencil inside the interval
        let x = x.clamp(-w + 2.0 * h, w - 2.0 * h);
        let fd = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        let exact = profile.derivative(T::lit(x)).as_f64();
        let tol = if std::mem::size_of::<T>() < 8 { 1e-2 } else { 1e-6 };
        if (fd - exact).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "derivative evaluator disagrees with difference quotient at x = {x}: {exact} vs {fd}"
            )));
        }
    }
    Ok(())
}

/// Graph domain `{y > phi(x)}` for `|x| <= half_width`, closed by vertical
/// joins and the counterclockwise arc of the unit circle around the origin.
/// Only the graph pieces belong to the Dirichlet boundary.
pub fn make_graph_domain<T: Real>(phi: &GraphParametrization<T>, half_width: T) -> Result<Domain<T>> {
    let w = half_width;
    if !(w > T::zero()) || w > T::one() {
        return Err(Error::InvalidParameter(format!("half width {w} outside (0, 1]")));
    }
    let profile = &phi.profile;
    let one = T::one();
    let slack = T::tol(1e-12);
    // graph samples must be finite and inside the closed unit ball
    for i in 0..=512 {
        let x = -w + (w + w) * T::from_usize_lossy(i) / T::lit(512.0);
        let y = profile.eval(x);
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("phi({x})")));
        }
        if x.hypot(y) > one + slack {
            return Err(Error::GraphExitsBall { x: x.as_f64() });
        }
    }
    let mut breaks = vec![-w];
    breaks.extend(profile.kinks(-w, w));
    breaks.push(w);
    let mut segments = Vec::new();
    let mut dirichlet = Vec::new();
    for pair in breaks.windows(2) {
        let (x0, x1) = (pair[0], pair[1]);
        let seg = if profile.is_piecewise_linear() {
            Segment::line(cplx(x0, profile.eval(x0)), cplx(x1, profile.eval(x1)))
        } else {
            Segment::Graph {
                profile: profile.clone(),
                x0,
                x1,
            }
        };
        segments.push(seg);
        dirichlet.push(true);
    }

    let end_r = cplx(w, profile.eval(w));
    let end_l = cplx(-w, profile.eval(-w));
    let circle_y = (one - w * w).max(T::zero()).sqrt();
    let join_target = |p: crate::scalar::Cplx<T>| -> Option<crate::scalar::Cplx<T>> {
        if (p.norm() - one).abs() <= slack {
            None
        } else if p.im >= T::zero() {
            Some(cplx(p.re, circle_y))
        } else {
            Some(cplx(p.re, -circle_y))
        }
    };
    let top_r = join_target(end_r);
    let top_l = join_target(end_l);
    if let Some(q) = top_r {
        segments.push(Segment::line(end_r, q));
        dirichlet.push(false);
    }
    let arc_from = top_r.unwrap_or(end_r);
    let arc_to = top_l.unwrap_or(end_l);
    let th0 = arc_from.im.atan2(arc_from.re);
    let mut th1 = arc_to.im.atan2(arc_to.re);
    while th1 <= th0 {
        th1 += T::TAU();
    }
    segments.push(Segment::circular_arc(cplx(T::zero(), T::zero()), one, th0, th1));
    dirichlet.push(false);
    if let Some(q) = top_l {
        segments.push(Segment::line(q, end_l));
        dirichlet.push(false);
    }
    let label = format!("graph:{}", profile.name());
    Domain::from_segments(label, segments, dirichlet, cplx(T::zero(), T::zero()), one)
        .map(|d| d.with_smoothness(phi.smoothness))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dmo_phi_values() {
        assert_eq!(dmo_phi(0.0_f64).unwrap(), 0.0);
        let x = (-4.0_f64).exp();
        assert!((dmo_phi(x).unwrap() - x / 2.0).abs() < 1e-17);
        assert!((dmo_phi(x).unwrap() - 0.009_157_819_444_367_09).abs() < 1e-15);
        assert_eq!(dmo_phi(-x).unwrap(), -dmo_phi(x).unwrap());
        assert!(dmo_phi(0.5_f64).is_err());
        assert!(dmo_phi(-0.7_f64).is_err());
    }

    #[test]
    fn dmo_profile_passes_c1_check() {
        assert!(GraphParametrization::new(GraphProfile::<f64>::Dmo, Smoothness::C1Dmo, 0.5).is_ok());
    }

    #[test]
    fn corner_with_c1_tag_is_rejected() {
        assert!(GraphParametrization::new(GraphProfile::<f64>::Corner, Smoothness::C1, 0.5).is_err());
        assert!(GraphParametrization::new(GraphProfile::<f64>::Corner, Smoothness::Lipschitz, 0.5).is_ok());
    }

    #[test]
    fn wrong_derivative_is_rejected() {
        // derivative evaluator of a polyline is exact, so fake a mismatch via phi(0) != 0
        let p = GraphProfile::Polyline {
            xs: vec![-1.0, 1.0],
            ys: vec![0.5, 0.5],
        };
        assert!(GraphParametrization::new(p, Smoothness::Lipschitz, 0.5).is_err());
    }
}
