use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::scalar::{Cplx, Real};
use crate::solver::harmonic::{ClosedForm, Harmonic};

#[derive(Clone, Debug, PartialEq)]
enum Piece<T> {
    /// Raised cosine: 0 at `start`, `height` at `peak`, 0 at `end`.
    Bump { start: T, peak: T, end: T, height: T },
    /// `amplitude * sin(pi * periods * (s - start) / (end - start))` on the interval.
    Sine { start: T, end: T, periods: T, amplitude: T },
}

impl<T: Real> Piece<T> {
    fn value(&self, s: T) -> T {
        let half = T::lit(0.5);
        match *self {
            Piece::Bump {
                start,
                peak,
                end,
                height,
            } => {
                if s <= start || s >= end {
                    T::zero()
                } else if s <= peak {
                    height * half * (T::one() - (T::PI() * (s - start) / (peak - start)).cos())
                } else {
                    height * half * (T::one() + (T::PI() * (s - peak) / (end - peak)).cos())
                }
            }
            Piece::Sine {
                start,
                end,
                periods,
                amplitude,
            } => {
                if s <= start || s >= end {
                    T::zero()
                } else {
                    amplitude * (T::PI() * periods * (s - start) / (end - start)).sin()
                }
            }
        }
    }

    fn interval(&self) -> (T, T) {
        match *self {
            Piece::Bump { start, end, .. } | Piece::Sine { start, end, .. } => (start, end),
        }
    }
}

/// Boundary data as a function of the arc-length coordinate, built from
/// raised-cosine bumps and sine pieces on the free part of the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData<T> {
    pieces: Vec<Piece<T>>,
    total: T,
}

impl<T: Real> BoundaryData<T> {
    pub fn value(&self, s: T) -> T {
        let s = wrap(s, self.total);
        self.pieces.iter().map(|p| p.value(s)).sum()
    }

    /// Hull of the supports of all pieces.
    pub fn support(&self) -> (T, T) {
        let lo = self.pieces.iter().map(|p| p.interval().0).fold(T::infinity(), T::min);
        let hi = self.pieces.iter().map(|p| p.interval().1).fold(T::neg_infinity(), T::max);
        (lo, hi)
    }

    /// Peak locations of the bump pieces.
    pub fn peaks(&self) -> Vec<T> {
        self.pieces
            .iter()
            .filter_map(|p| match *p {
                Piece::Bump { peak, .. } => Some(peak),
                _ => None,
            })
            .collect()
    }

    /// Arc-length points where the data loses smoothness.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut out = Vec::new();
        for p in &self.pieces {
            match *p {
                Piece::Bump { start, peak, end, .. } => {
                    out.push(start);
                    out.push(end);
                    let (a, b) = (peak - start, end - peak);
                    if (a - b).abs() > T::tol(1e-12) * (a + b) {
                        out.push(peak);
                    }
                }
                Piece::Sine { start, end, .. } => {
                    out.push(start);
                    out.push(end);
                }
            }
        }
        out
    }

    /// Largest and smallest value over `n` samples of the whole boundary.
    pub fn range(&self, n: usize) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for k in 0..n {
            let v = self.value(self.total * T::from_usize_lossy(k) / T::from_usize_lossy(n));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo.min(T::zero()), hi.max(T::zero()))
    }

    /// Nonnegative, zero off the support and monotone up to a single peak,
    /// checked on 512 samples of the support.
    pub fn is_unimodal(&self) -> bool {
        let peaks = self.peaks();
        if peaks.len() != 1 || self.pieces.len() != 1 {
            return false;
        }
        let (lo, hi) = self.support();
        let n = 512;
        let mut prev = T::zero();
        let mut past_peak = false;
        for k in 0..=n {
            let s = lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n);
            let v = self.value(s);
            if v < T::zero() {
                return false;
            }
            if s > peaks[0] {
                past_peak = true;
            }
            if (!past_peak && v < prev) || (past_peak && v > prev) {
                return false;
            }
            prev = v;
        }
        [lo - (hi - lo) * T::lit(0.01), hi + (hi - lo) * T::lit(0.01)]
            .iter()
            .all(|&s| self.value(s) == T::zero())
    }
}

fn wrap<T: Real>(s: T, total: T) -> T {
    let r = s % total;
    if r < T::zero() {
        r + total
    } else {
        r
    }
}

/// Raised-cosine bump on the arc-length interval `support`, equal to 1 at
/// `peak`. The support must avoid the Dirichlet segments.
pub fn unimodal_data<T: Real>(domain: &Domain<T>, support: (T, T), peak: T) -> Result<BoundaryData<T>> {
    let total = domain.boundary().length();
    let piece = bump(domain, support, peak, T::one())?;
    Ok(BoundaryData {
        pieces: vec![piece],
        total,
    })
}

fn bump<T: Real>(domain: &Domain<T>, (start, end): (T, T), peak: T, height: T) -> Result<Piece<T>> {
    check_support(domain, start, end)?;
    if !(start < peak && peak < end) {
        return Err(Error::PeakOnSupportBoundary);
    }
    Ok(Piece::Bump {
        start,
        peak,
        end,
        height,
    })
}

fn check_support<T: Real>(domain: &Domain<T>, start: T, end: T) -> Result<()> {
    let curve = domain.boundary();
    let total = curve.length();
    if !(start.is_finite() && end.is_finite()) || !(T::zero() <= start && start < end && end <= total) {
        return Err(Error::InvalidParameter(format!(
            "support [{start}, {end}] not inside [0, {total}]"
        )));
    }
    for (i, &len) in curve.segment_lengths().iter().enumerate() {
        if !domain.is_dirichlet(i) {
            continue;
        }
        let a = curve.segment_offset(i);
        let b = a + len;
        // closed intervals: sharing an endpoint counts as touching
        if start <= b && end >= a {
            return Err(Error::SupportTouchesDirichlet);
        }
    }
    Ok(())
}

/// The longest run of consecutive free segments, as an arc-length interval.
pub fn free_run<T: Real>(domain: &Domain<T>) -> Option<(T, T)> {
    let curve = domain.boundary();
    let lengths = curve.segment_lengths();
    let mut best: Option<(T, T)> = None;
    let mut i = 0;
    while i < lengths.len() {
        if domain.is_dirichlet(i) {
            i += 1;
            continue;
        }
        let a = curve.segment_offset(i);
        let mut j = i;
        while j < lengths.len() && !domain.is_dirichlet(j) {
            j += 1;
        }
        let b = curve.segment_offset(j - 1) + lengths[j - 1];
        if best.map_or(true, |(p, q)| b - a > q - p) {
            best = Some((a, b));
        }
        i = j;
    }
    best
}

fn on_free_run<T: Real>(domain: &Domain<T>, f: T) -> Result<T> {
    let (a, b) = free_run(domain).ok_or_else(|| Error::InvalidParameter("domain has no free boundary".into()))?;
    Ok(a + (b - a) * f)
}

/// Unimodal bump placed by fractions of the longest free run.
pub fn unimodal_on_free_run<T: Real>(domain: &Domain<T>, from: T, to: T, peak: T) -> Result<BoundaryData<T>> {
    unimodal_data(
        domain,
        (on_free_run(domain, from)?, on_free_run(domain, to)?),
        on_free_run(domain, peak)?,
    )
}

/// Two unit bumps on the two halves of the free run (negative control for
/// the no-critical-point property).
pub fn bimodal_data<T: Real>(domain: &Domain<T>) -> Result<BoundaryData<T>> {
    let f = |x: f64| on_free_run(domain, T::lit(x));
    let total = domain.boundary().length();
    Ok(BoundaryData {
        pieces: vec![
            bump(domain, (f(0.1)?, f(0.45)?), f(0.275)?, T::one())?,
            bump(domain, (f(0.55)?, f(0.9)?), f(0.725)?, T::one())?,
        ],
        total,
    })
}

/// `sin(pi * periods * t)` over the free run, `t` its normalized arc length;
/// zero on the Dirichlet part.
pub fn sine_data<T: Real>(domain: &Domain<T>, periods: T, amplitude: T) -> Result<BoundaryData<T>> {
    let (start, end) = free_run(domain).ok_or_else(|| Error::InvalidParameter("domain has no free boundary".into()))?;
    Ok(BoundaryData {
        pieces: vec![Piece::Sine {
            start,
            end,
            periods,
            amplitude,
        }],
        total: domain.boundary().length(),
    })
}

/// Dirichlet trace to be matched by the solver.
#[derive(Clone, Debug)]
pub enum Trace<T> {
    Data(BoundaryData<T>),
    /// Boundary values of a closed-form harmonic function.
    ClosedForm(ClosedForm<T>),
    /// Linear combination of traces.
    Sum(Vec<(T, Trace<T>)>),
}

impl<T: Real> Trace<T> {
    /// Arc-length points where the trace loses smoothness.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Trace::Data(d) => d.breakpoints(),
            Trace::ClosedForm(_) => Vec::new(),
            Trace::Sum(terms) => terms.iter().flat_map(|(_, t)| t.breakpoints()).collect(),
        }
    }

    /// Trace value at boundary point `z` with arc-length coordinate `s`.
    pub fn at(&self, z: Cplx<T>, s: T) -> T {
        match self {
            Trace::Data(d) => d.value(s),
            Trace::ClosedForm(f) => f.value(z).unwrap_or(T::nan()),
            Trace::Sum(terms) => terms.iter().map(|(c, t)| *c * t.at(z, s)).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        let d = Domain::<f64>::half_disk().unwrap();
        // the arc occupies [2, 2 + pi]
        let b = unimodal_data(&d, (2.5, 4.5), 3.0).unwrap();
        assert_eq!(b.value(2.5), 0.0);
        assert_eq!(b.value(4.5), 0.0);
        assert_eq!(b.value(3.0), 1.0);
        let (p, q) = (b.value(2.7), b.value(2.8));
        assert!(0.0 < p && p < q && q < 1.0);
        assert!(b.is_unimodal());
        assert_eq!(unimodal_data(&d, (1.9, 3.0), 2.5), Err(Error::SupportTouchesDirichlet));
        assert_eq!(unimodal_data(&d, (2.5, 3.0), 2.5), Err(Error::PeakOnSupportBoundary));
        assert!(!bimodal_data(&d).unwrap().is_unimodal());
    }
}
