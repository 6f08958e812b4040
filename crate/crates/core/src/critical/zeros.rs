//! Zero counting by the argument principle and zero location by recursive
//! subdivision of rectangles.

use rayon::prelude::*;

use crate::analytic::Holomorphic;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cplx, Cplx, Real};

/// Edge pieces are split at most this many times.
pub const MAX_LEVELS: usize = 12;
/// Cells below this fraction of the root diameter whose zeros cannot be
/// separated by subdivision are reported as one point.
pub const CLUSTER: f64 = 1e-5;
/// Below this modulus on the contour a zero is treated as lying on it.
const ON_CONTOUR: f64 = 1e-12;
const NUDGE: f64 = 1e-6;
/// Split fractions tried in turn; asymmetric so that symmetric zero sets
/// do not land on the cut lines.
const SPLITS: [f64; 4] = [0.53, 0.47, 0.59, 0.41];
/// Extra fractions scanned when poles lie inside a cell.
const SPLIT_SCAN: usize = 21;

/// Closed axis-aligned rectangle `[lo.re, hi.re] x [lo.im, hi.im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<T> {
    pub lo: Cplx<T>,
    pub hi: Cplx<T>,
}

impl<T: Real> Rect<T> {
    pub fn new(lo: Cplx<T>, hi: Cplx<T>) -> Result<Self> {
        if !(lo.re < hi.re && lo.im < hi.im) || !(lo.re.is_finite() && lo.im.is_finite() && hi.re.is_finite() && hi.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("empty rectangle [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-a, a] x [-b, b]` shifted to `center`.
    pub fn centered(center: Cplx<T>, a: T, b: T) -> Result<Self> {
        Self::new(center - cplx(a, b), center + cplx(a, b))
    }

    pub fn width(&self) -> T {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> T {
        self.hi.im - self.lo.im
    }

    pub fn center(&self) -> Cplx<T> {
        (self.lo + self.hi) * T::lit(0.5)
    }

    pub fn diameter(&self) -> T {
        (self.hi - self.lo).norm()
    }

    pub fn contains(&self, z: Cplx<T>) -> bool {
        self.lo.re <= z.re && z.re <= self.hi.re && self.lo.im <= z.im && z.im <= self.hi.im
    }

    pub fn strictly_contains(&self, z: Cplx<T>) -> bool {
        self.lo.re < z.re && z.re < self.hi.re && self.lo.im < z.im && z.im < self.hi.im
    }

    pub fn dilate(&self, d: T) -> Self {
        Self {
            lo: self.lo - cplx(d, d),
            hi: self.hi + cplx(d, d),
        }
    }

    /// Counterclockwise corners starting at `lo`.
    pub fn corners(&self) -> [Cplx<T>; 4] {
        [self.lo, cplx(self.hi.re, self.lo.im), self.hi, cplx(self.lo.re, self.hi.im)]
    }

    /// Distance from `z` to the contour.
    pub fn contour_distance(&self, z: Cplx<T>) -> T {
        let c = self.corners();
        (0..4)
            .map(|i| crate::geometry::segment_distance(z, c[i], c[(i + 1) % 4]))
            .fold(T::infinity(), T::min)
    }

    pub fn intersects(&self, other: &Rect<T>) -> bool {
        self.lo.re <= other.hi.re && other.lo.re <= self.hi.re && self.lo.im <= other.hi.im && other.lo.im <= self.hi.im
    }

    /// Four children cut at fraction `f` of each side.
    pub fn split(&self, f: T) -> [Rect<T>; 4] {
        let m = cplx(
            self.lo.re + self.width() * f,
            self.lo.im + self.height() * f,
        );
        [
            Rect { lo: self.lo, hi: m },
            Rect {
                lo: cplx(m.re, self.lo.im),
                hi: cplx(self.hi.re, m.im),
            },
            Rect { lo: m, hi: self.hi },
            Rect {
                lo: cplx(self.lo.re, m.im),
                hi: cplx(m.re, self.hi.im),
            },
        ]
    }
}

/// Result of one argument-principle count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourCount<T> {
    /// Contour actually integrated (after nudging).
    pub rect: Rect<T>,
    /// Zeros inside with multiplicity; `None` when inconclusive.
    pub zeros: Option<usize>,
    /// Raw `(1/2πi) ∮ f'/f`, before snapping pieces to exact turns.
    pub winding: T,
    /// Pole order inside, added back to the winding.
    pub poles: usize,
    /// `(1/2πi) ∮ z f'/f = Σ zeros - Σ order * poles`.
    pub moment: Cplx<T>,
    /// `(1/2πi) ∮ z² f'/f`.
    pub moment2: Cplx<T>,
    /// Deepest edge split used.
    pub levels: usize,
}

impl<T: Real> ContourCount<T> {
    pub fn is_conclusive(&self) -> bool {
        self.zeros.is_some()
    }
}

struct Piece<T> {
    i0: Cplx<T>,
    i1: Cplx<T>,
    i2: Cplx<T>,
    /// Exact change of `arg f`, from the endpoint values and the integer
    /// number of turns read off `Im i0`.
    turn: T,
}

enum EdgeOutcome<T> {
    Done(Piece<T>, usize),
    /// Some piece did not settle within the level budget.
    Unresolved,
    /// `|f|` dropped below the on-contour threshold.
    Touches,
}

struct Counter<'a, T: Real> {
    f: &'a dyn Holomorphic<T>,
}

impl<T: Real> Counter<'_, T> {
    fn value(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.f.eval(z)
    }

    /// GL16 on the straight piece `[a, b]`, checked against the exact
    /// logarithm of the endpoint ratio.
    fn piece(&self, a: Cplx<T>, fa: Cplx<T>, b: Cplx<T>, fb: Cplx<T>, level: usize) -> Result<EdgeOutcome<T>> {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let zero = Cplx::from(T::zero());
        let (mut i0, mut i1, mut i2) = (zero, zero, zero);
        for &(x, w) in gauss_legendre(16) {
            let z = mid + half * T::lit(x);
            let fz = self.value(z)?;
            if fz.norm() < T::lit(ON_CONTOUR) {
                return Ok(EdgeOutcome::Touches);
            }
            let r = self.f.deriv(z)? / fz * half * T::lit(w);
            i0 += r;
            i1 += r * z;
            i2 += r * z * z;
        }
        let ratio = fb / fa;
        let principal = ratio.arg();
        let tau = T::TAU();
        let k = ((i0.im - principal) / tau).round();
        let arg_err = (i0.im - principal - k * tau).abs();
        let log_err = (i0.re - ratio.norm().ln()).abs();
        let tol = T::tol(1e-7);
        let finite = i0.re.is_finite() && i0.im.is_finite();
        if finite && i0.im.abs() < T::PI() && arg_err <= tol && log_err <= tol * (T::one() + ratio.norm().ln().abs()) {
            return Ok(EdgeOutcome::Done(
                Piece {
                    i0,
                    i1,
                    i2,
                    turn: principal + k * tau,
                },
                level,
            ));
        }
        if level >= MAX_LEVELS {
            return Ok(EdgeOutcome::Unresolved);
        }
        let fm = self.value(mid)?;
        if fm.norm() < T::lit(ON_CONTOUR) {
            return Ok(EdgeOutcome::Touches);
        }
        let l = self.piece(a, fa, mid, fm, level + 1)?;
        let EdgeOutcome::Done(pl, dl) = l else { return Ok(l) };
        let r = self.piece(mid, fm, b, fb, level + 1)?;
        let EdgeOutcome::Done(pr, dr) = r else { return Ok(r) };
        Ok(EdgeOutcome::Done(
            Piece {
                i0: pl.i0 + pr.i0,
                i1: pl.i1 + pr.i1,
                i2: pl.i2 + pr.i2,
                turn: pl.turn + pr.turn,
            },
            dl.max(dr),
        ))
    }

    /// Value at an endpoint on the seam, taken from the side of `toward`.
    fn side_value(&self, z: Cplx<T>, fz: Cplx<T>, toward: Cplx<T>) -> Result<Cplx<T>> {
        match self.f.seam() {
            Some(y) if z.im == y && toward.im != y => self.f.eval_from(z, toward.im > y),
            _ => Ok(fz),
        }
    }

    /// The edge `[a, b]`, cut where it crosses the seam so that no piece
    /// straddles it. `None` if a cut point lies on a zero.
    #[allow(clippy::type_complexity)]
    fn edge_pieces(&self, a: Cplx<T>, fa: Cplx<T>, b: Cplx<T>, fb: Cplx<T>) -> Result<Option<Vec<(Cplx<T>, Cplx<T>, Cplx<T>, Cplx<T>)>>> {
        let fa = self.side_value(a, fa, b)?;
        let fb = self.side_value(b, fb, a)?;
        if let Some(y) = self.f.seam() {
            if (a.im - y) * (b.im - y) < T::zero() {
                let t = (y - a.im) / (b.im - a.im);
                let s = cplx(a.re + (b.re - a.re) * t, y);
                let (sa, sb) = (self.f.eval_from(s, a.im > y)?, self.f.eval_from(s, b.im > y)?);
                if sa.norm() < T::lit(ON_CONTOUR) || sb.norm() < T::lit(ON_CONTOUR) {
                    return Ok(None);
                }
                return Ok(Some(vec![(a, fa, s, sa), (s, sb, b, fb)]));
            }
        }
        Ok(Some(vec![(a, fa, b, fb)]))
    }

    fn contour(&self, rect: &Rect<T>) -> Result<Option<ContourCount<T>>> {
        let c = rect.corners();
        let mut fc = [Cplx::from(T::zero()); 4];
        for (k, &z) in c.iter().enumerate() {
            fc[k] = match self.value(z) {
                Ok(v) if v.norm() >= T::lit(ON_CONTOUR) => v,
                Ok(_) => return Ok(None),
                Err(Error::EvalAtCharge { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
        }
        let zero = Cplx::from(T::zero());
        let (mut i0, mut i1, mut i2, mut turns) = (zero, zero, zero, T::zero());
        let mut levels = 0;
        let mut unresolved = false;
        for k in 0..4 {
            let j = (k + 1) % 4;
            let pieces = match self.edge_pieces(c[k], fc[k], c[j], fc[j]) {
                Ok(Some(p)) => p,
                Ok(None) | Err(Error::EvalAtCharge { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            for (a, fa, b, fb) in pieces {
                match self.piece(a, fa, b, fb, 0) {
                    Ok(EdgeOutcome::Done(p, d)) => {
                        i0 += p.i0;
                        i1 += p.i1;
                        i2 += p.i2;
                        turns += p.turn;
                        levels = levels.max(d);
                    }
                    Ok(EdgeOutcome::Unresolved) => unresolved = true,
                    Ok(EdgeOutcome::Touches) | Err(Error::EvalAtCharge { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
        }
        let poles: usize = self
            .f
            .poles()
            .iter()
            .filter(|(p, _)| rect.strictly_contains(*p))
            .map(|&(_, order)| order)
            .sum();
        let two_pi_i = cplx(T::zero(), T::TAU());
        let winding = i0.im / T::TAU();
        let snapped = (turns / T::TAU()).round();
        let conclusive = !unresolved && (winding - snapped).abs() <= T::lit(0.05) && snapped + T::from_usize_lossy(poles) >= T::zero();
        let zeros = conclusive.then(|| (snapped + T::from_usize_lossy(poles)).round().to_usize().unwrap_or(0));
        Ok(Some(ContourCount {
            rect: *rect,
            zeros,
            winding,
            poles,
            moment: i1 / two_pi_i,
            moment2: i2 / two_pi_i,
            levels: if unresolved { MAX_LEVELS } else { levels },
        }))
    }
}

/// Number of zeros of `f` inside `rect`, with multiplicity, from
/// `(1/2πi) ∮ f'/f` plus the known poles inside. A contour that passes
/// through a zero or pole is dilated by `1e-6` (up to eight times).
pub fn count_zeros<T: Real>(f: &dyn Holomorphic<T>, rect: Rect<T>) -> Result<ContourCount<T>> {
    let counter = Counter { f };
    let mut r = rect;
    for _ in 0..8 {
        if let Some(c) = counter.contour(&r)? {
            return Ok(c);
        }
        r = r.dilate(T::lit(NUDGE));
    }
    Err(Error::InvalidParameter(format!(
        "contour around [{}, {}] keeps touching a zero",
        rect.lo, rect.hi
    )))
}

/// Count without nudging; `None` when the contour touches a zero or pole.
fn count_exact<T: Real>(f: &dyn Holomorphic<T>, rect: &Rect<T>) -> Result<Option<ContourCount<T>>> {
    Counter { f }.contour(rect)
}

/// Where located zeros may be kept.
pub trait Region<T: Real>: Sync {
    fn contains(&self, z: Cplx<T>) -> bool;
    /// Conservative: false only when `rect` certainly misses the region.
    fn may_intersect(&self, rect: &Rect<T>) -> bool;
}

impl<T: Real> Region<T> for Rect<T> {
    fn contains(&self, z: Cplx<T>) -> bool {
        Rect::contains(self, z)
    }

    fn may_intersect(&self, rect: &Rect<T>) -> bool {
        self.intersects(rect)
    }
}

/// A zero of `f` with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero<T> {
    pub point: Cplx<T>,
    pub multiplicity: usize,
    /// `|f|` at the reported point.
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct Located<T> {
    /// Zeros inside the region.
    pub zeros: Vec<Zero<T>>,
    /// Zeros found inside the enclosing rectangle but outside the region.
    pub discarded: Vec<Zero<T>>,
    /// Count on the enclosing rectangle.
    pub root: ContourCount<T>,
    /// Cells whose count could not be settled.
    pub inconclusive: Vec<Rect<T>>,
}

impl<T: Real> Located<T> {
    pub fn is_conclusive(&self) -> bool {
        self.root.is_conclusive() && self.inconclusive.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }
}

enum CellResult<T> {
    Zeros(Vec<Zero<T>>),
    Split(Vec<(Rect<T>, usize, ContourCount<T>)>),
    Failed(Rect<T>),
}

fn newton<T: Real>(f: &dyn Holomorphic<T>, mut z: Cplx<T>, cell: &Rect<T>) -> Option<Cplx<T>> {
    let guard = cell.dilate(cell.diameter() * T::lit(0.1));
    let scale = T::one() + z.norm();
    for _ in 0..60 {
        let fz = f.eval(z).ok()?;
        let d = f.deriv(z).ok()?;
        if fz.norm() == T::zero() {
            return Some(z);
        }
        if d.norm() == T::zero() {
            return None;
        }
        let step = fz / d;
        z -= step;
        if !guard.contains(z) {
            return None;
        }
        if step.norm() <= T::epsilon() * T::lit(4.0) * scale {
            break;
        }
    }
    Some(z)
}

/// The fixed fractions, then, when poles sit in the cell, the fractions in
/// `[0.3, 0.7]` whose cut lines stay farthest from them.
fn split_fractions<T: Real>(f: &dyn Holomorphic<T>, cell: &Rect<T>) -> Vec<T> {
    let mut out: Vec<T> = SPLITS.iter().map(|&x| T::lit(x)).collect();
    let poles: Vec<Cplx<T>> = f.poles().into_iter().map(|p| p.0).filter(|&p| cell.contains(p)).collect();
    if poles.is_empty() {
        return out;
    }
    let clearance = |frac: T| {
        let m = cplx(cell.lo.re + cell.width() * frac, cell.lo.im + cell.height() * frac);
        poles
            .iter()
            .map(|p| ((p.re - m.re) / cell.width()).abs().min(((p.im - m.im) / cell.height()).abs()))
            .fold(T::infinity(), T::min)
    };
    let mut scan: Vec<(T, T)> = (0..SPLIT_SCAN)
        .map(|k| {
            let frac = T::lit(0.3) + T::lit(0.4) * T::from_usize_lossy(k) / T::from_usize_lossy(SPLIT_SCAN - 1);
            (clearance(frac), frac)
        })
        .collect();
    scan.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best: Vec<T> = scan.iter().take(4).map(|s| s.1).collect();
    best.append(&mut out);
    best
}

/// Zeros inside the cell, from its conclusive count.
fn resolve<T: Real>(
    f: &dyn Holomorphic<T>,
    cell: &Rect<T>,
    count: &ContourCount<T>,
    min_size: T,
    cluster_size: T,
) -> Result<CellResult<T>> {
    let n = count.zeros.unwrap_or(0);
    if n == 0 {
        return Ok(CellResult::Zeros(Vec::new()));
    }
    // moments of the zeros alone, poles added back
    let mut m1 = count.moment;
    let mut m2 = count.moment2;
    for (p, order) in f.poles() {
        if count.rect.strictly_contains(p) {
            let o = T::from_usize_lossy(order);
            m1 += p * o;
            m2 += p * p * o;
        }
    }
    let nn = T::from_usize_lossy(n);
    let centroid = m1 / nn;
    if n == 1 {
        if let Some(z) = newton(f, centroid, cell) {
            if count.rect.contains(z) {
                let residual = f.eval(z)?.norm();
                return Ok(CellResult::Zeros(vec![Zero {
                    point: z,
                    multiplicity: 1,
                    residual,
                }]));
            }
        }
    } else {
        let spread = (m2 / nn - centroid * centroid).norm().sqrt();
        if spread <= T::lit(1e-7) * cell.diameter() || cell.diameter() <= min_size {
            let residual = f.eval(centroid)?.norm();
            return Ok(CellResult::Zeros(vec![Zero {
                point: centroid,
                multiplicity: n,
                residual,
            }]));
        }
    }
    if cell.diameter() <= min_size {
        return Ok(CellResult::Failed(*cell));
    }
    for frac in split_fractions(f, cell) {
        let kids = cell.split(frac);
        let mut out = Vec::with_capacity(4);
        let mut total = 0;
        let mut ok = true;
        for k in kids {
            match count_exact(f, &k)? {
                Some(c) if c.is_conclusive() => {
                    let m = c.zeros.unwrap_or(0);
                    total += m;
                    out.push((k, m, c));
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && total == n {
            return Ok(CellResult::Split(out));
        }
    }
    if cell.diameter() <= cluster_size {
        // the count is certified but the zeros cannot be separated further
        let residual = f.eval(centroid)?.norm();
        return Ok(CellResult::Zeros(vec![Zero {
            point: centroid,
            multiplicity: n,
            residual,
        }]));
    }
    Ok(CellResult::Failed(*cell))
}

/// Counts the zeros of `f` in `rect`, isolates them by subdivision and
/// polishes them with Newton's method. Cells that miss `region` are
/// dropped unresolved; zeros found outside it are returned separately.
pub fn locate_zeros<T: Real>(f: &dyn Holomorphic<T>, rect: Rect<T>, region: &dyn Region<T>) -> Result<Located<T>> {
    let root = count_zeros(f, rect)?;
    let mut located = Located {
        zeros: Vec::new(),
        discarded: Vec::new(),
        root,
        inconclusive: Vec::new(),
    };
    if !root.is_conclusive() {
        located.inconclusive.push(root.rect);
        return Ok(located);
    }
    let min_size = root.rect.diameter() * T::lit(1e-9);
    let cluster_size = root.rect.diameter() * T::lit(CLUSTER);
    let mut frontier = vec![(root.rect, root)];
    while !frontier.is_empty() {
        let results: Vec<Result<CellResult<T>>> = frontier
            .par_iter()
            .map(|(cell, count)| resolve(f, cell, count, min_size, cluster_size))
            .collect();
        let mut next = Vec::new();
        for r in results {
            match r? {
                CellResult::Zeros(zs) => {
                    for z in zs {
                        if region.contains(z.point) {
                            located.zeros.push(z);
                        } else {
                            located.discarded.push(z);
                        }
                    }
                }
                CellResult::Split(kids) => {
                    for (k, m, c) in kids {
                        if m > 0 && region.may_intersect(&k) {
                            next.push((k, c));
                        }
                    }
                }
                CellResult::Failed(cell) => {
                    if region.may_intersect(&cell) {
                        located.inconclusive.push(cell);
                    }
                }
            }
        }
        frontier = next;
    }
    let key = |z: &Zero<T>| (z.point.re.as_f64(), z.point.im.as_f64());
    located.zeros.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    located.discarded.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    Ok(located)
}
