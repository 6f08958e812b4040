//! Closed boundary curves: arc length tables, polyline acceleration
//! structures, inside test and closest-point queries.

use crate::error::{Error, Result};
use crate::geometry::segment::Segment;
use crate::scalar::{cross, Cplx, Real, Vec2};

const POLY_SAMPLES: usize = 2048;
const CHUNK: usize = 32;
const TABLE_PIECES: usize = 64;

/// Location on the boundary: segment index and local parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint<T> {
    pub segment: usize,
    pub t: T,
}

/// Junction between segment `index - 1` and segment `index`.
#[derive(Clone, Copy, Debug)]
pub struct Knot<T> {
    pub index: usize,
    pub point: Cplx<T>,
    pub arclength: T,
    /// Interior angle in radians; `pi` for a smooth junction.
    pub interior_angle: T,
}

impl<T: Real> Knot<T> {
    pub fn is_corner(&self) -> bool {
        (self.interior_angle - T::PI()).abs() > T::lit(1e-6)
    }
}

#[derive(Clone, Debug)]
struct PolyNode<T> {
    z: Cplx<T>,
    at: CurvePoint<T>,
}

#[derive(Clone, Debug)]
struct Chunk<T> {
    first: usize,
    last: usize,
    lo: Cplx<T>,
    hi: Cplx<T>,
    sagitta: T,
}

#[derive(Clone, Debug)]
struct ArcTable<T> {
    ts: Vec<T>,
    cum: Vec<T>,
}

/// Closed, simple, counterclockwise boundary made of parametrized segments.
#[derive(Clone, Debug)]
pub struct BoundaryCurve<T> {
    segments: Vec<Segment<T>>,
    lengths: Vec<T>,
    offsets: Vec<T>,
    tables: Vec<Option<ArcTable<T>>>,
    poly: Vec<PolyNode<T>>,
    chunks: Vec<Chunk<T>>,
    knots: Vec<Knot<T>>,
    counterclockwise: bool,
}

impl<T: Real> BoundaryCurve<T> {
    /// Builds the curve and checks closure, positive finite segment lengths,
    /// orientation and simplicity.
    pub fn new(segments: Vec<Segment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("boundary has no segments".into()));
        }
        let n = segments.len();
        for i in 0..n {
            let gap = (segments[i].end() - segments[(i + 1) % n].start()).norm();
            if !(gap <= T::tol(1e-12)) {
                return Err(Error::NotClosed { gap: gap.as_f64() });
            }
        }
        let mut lengths = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for (i, seg) in segments.iter().enumerate() {
            let (len, table) = measure_segment(seg).ok_or(Error::NonRectifiable { index: i })?;
            if !len.is_finite() {
                return Err(Error::NonRectifiable { index: i });
            }
            if !(len > T::tol(1e-12)) {
                return Err(Error::DegenerateSegment {
                    index: i,
                    length: len.as_f64(),
                });
            }
            lengths.push(len);
            tables.push(table);
        }
        let mut offsets = vec![T::zero()];
        for &l in &lengths {
            let last = *offsets.last().unwrap();
            offsets.push(last + l);
        }
        let poly = build_polyline(&segments, &lengths);
        let chunks = build_chunks(&segments, &poly);
        let knots = (0..n)
            .map(|i| {
                let prev = &segments[(i + n - 1) % n];
                let next = &segments[i];
                let tin = prev.derivative(T::one());
                let tout = next.derivative(T::zero());
                let turn = cross(tin, tout).atan2((tin * tout.conj()).re);
                Knot {
                    index: i,
                    point: next.start(),
                    arclength: offsets[i],
                    interior_angle: T::PI() - turn,
                }
            })
            .collect();
        let mut curve = Self {
            segments,
            lengths,
            offsets,
            tables,
            poly,
            chunks,
            knots,
            counterclockwise: true,
        };
        curve.counterclockwise = curve.signed_area() > T::zero();
        if !curve.counterclockwise {
            return Err(Error::InvalidParameter(
                "boundary must be oriented counterclockwise".into(),
            ));
        }
        curve.check_simple()?;
        Ok(curve)
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn segment_lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn length(&self) -> T {
        *self.offsets.last().unwrap()
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.counterclockwise
    }

    pub fn knots(&self) -> &[Knot<T>] {
        &self.knots
    }

    pub fn corners(&self) -> impl Iterator<Item = &Knot<T>> {
        self.knots.iter().filter(|k| k.is_corner())
    }

    /// Arc-length coordinate of the start of segment `i`.
    pub fn segment_offset(&self, i: usize) -> T {
        self.offsets[i]
    }

    pub fn point(&self, at: CurvePoint<T>) -> Cplx<T> {
        self.segments[at.segment].point(at.t)
    }

    pub fn unit_tangent(&self, at: CurvePoint<T>) -> Vec2<T> {
        Vec2::from_complex(self.segments[at.segment].derivative(at.t)).normalized()
    }

    /// Outward unit normal (clockwise quarter turn of the tangent).
    pub fn outward_normal(&self, at: CurvePoint<T>) -> Vec2<T> {
        self.unit_tangent(at).rotate_cw()
    }

    /// Reduces `s` modulo the total length into `[0, L)`.
    pub fn wrap(&self, s: T) -> T {
        let l = self.length();
        let mut r = s % l;
        if r < T::zero() {
            r += l;
        }
        r
    }

    /// Curve location at arc-length coordinate `s` (taken modulo the length).
    pub fn at_arclength(&self, s: T) -> CurvePoint<T> {
        let s = self.wrap(s);
        let n = self.segments.len();
        let mut i = match self.offsets.iter().position(|&o| o > s) {
            Some(k) => k.saturating_sub(1),
            None => n - 1,
        };
        i = i.min(n - 1);
        let local = (s - self.offsets[i]).max(T::zero()).min(self.lengths[i]);
        CurvePoint {
            segment: i,
            t: self.param_at(i, local),
        }
    }

    /// Arc-length coordinate of a curve location.
    pub fn arclength_of(&self, at: CurvePoint<T>) -> T {
        self.offsets[at.segment] + self.local_length(at.segment, at.t)
    }

    fn local_length(&self, i: usize, t: T) -> T {
        let seg = &self.segments[i];
        match &self.tables[i] {
            None => self.lengths[i] * t,
            Some(tab) => {
                let k = piece_index(&tab.ts, t);
                let extra = seg
                    .length_between(tab.ts[k], t)
                    .unwrap_or_else(|| seg.length_between_fixed(tab.ts[k], t));
                tab.cum[k] + extra
            }
        }
    }

    fn param_at(&self, i: usize, local: T) -> T {
        let seg = &self.segments[i];
        let tab = match &self.tables[i] {
            None => return (local / self.lengths[i]).max(T::zero()).min(T::one()),
            Some(tab) => tab,
        };
        let k = match tab.cum.iter().position(|&c| c > local) {
            Some(k) => k.saturating_sub(1),
            None => tab.cum.len() - 2,
        }
        .min(tab.ts.len() - 2);
        let (ta, tb) = (tab.ts[k], tab.ts[k + 1]);
        let span = tab.cum[k + 1] - tab.cum[k];
        let mut t = ta + (tb - ta) * ((local - tab.cum[k]) / span).max(T::zero()).min(T::one());
        // Newton with bisection safeguard on the monotone length function
        let (mut lo, mut hi) = (ta, tb);
        for _ in 0..60 {
            let f = tab.cum[k] + seg.length_between_fixed(ta, t) - local;
            if f > T::zero() {
                hi = t;
            } else {
                lo = t;
            }
            if f.abs() <= T::epsilon() * T::lit(8.0) * self.lengths[i].max(T::one()) {
                break;
            }
            let speed = seg.speed(t);
            let mut next = t - f / speed;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = (lo + hi) * T::lit(0.5);
            }
            if (next - t).abs() <= T::epsilon() {
                t = next;
                break;
            }
            t = next;
        }
        t
    }

    /// Signed area enclosed by the sampling polyline.
    pub fn signed_area(&self) -> T {
        let n = self.poly.len();
        let mut acc = T::zero();
        for i in 0..n {
            acc += cross(self.poly[i].z, self.poly[(i + 1) % n].z);
        }
        acc * T::lit(0.5)
    }

    /// Sampling polyline (closed implicitly).
    pub fn polyline(&self) -> Vec<Cplx<T>> {
        self.poly.iter().map(|p| p.z).collect()
    }

    pub fn bounding_box(&self) -> (Cplx<T>, Cplx<T>) {
        let mut lo = self.chunks[0].lo;
        let mut hi = self.chunks[0].hi;
        for c in &self.chunks {
            lo.re = lo.re.min(c.lo.re);
            lo.im = lo.im.min(c.lo.im);
            hi.re = hi.re.max(c.hi.re);
            hi.im = hi.im.max(c.hi.im);
        }
        (lo, hi)
    }

    /// Winding number of the sampling polyline around `z`.
    pub fn polyline_winding(&self, z: Cplx<T>) -> i32 {
        let n = self.poly.len();
        let mut w = 0;
        for c in &self.chunks {
            if c.hi.im < z.im || c.lo.im > z.im || c.hi.re < z.re {
                continue;
            }
            let a = self.poly[c.first].z;
            let b = self.poly[(c.last + 1) % n].z;
            if c.lo.re > z.re {
                // chain entirely right of z: only the net crossing matters
                if a.im <= z.im && b.im > z.im {
                    w += 1;
                } else if b.im <= z.im && a.im > z.im {
                    w -= 1;
                }
                continue;
            }
            for i in c.first..=c.last {
                let p = self.poly[i].z;
                let q = self.poly[(i + 1) % n].z;
                if p.im <= z.im {
                    if q.im > z.im && cross(q - p, z - p) > T::zero() {
                        w += 1;
                    }
                } else if q.im <= z.im && cross(q - p, z - p) < T::zero() {
                    w -= 1;
                }
            }
        }
        w
    }

    /// Closest point on the exact curve. Returns the location and distance.
    pub fn closest(&self, z: Cplx<T>) -> (CurvePoint<T>, T) {
        let n = self.poly.len();
        // polyline pass: candidate edges within best + sagitta
        let mut best = T::infinity();
        for c in &self.chunks {
            if box_distance(z, c.lo, c.hi) > best {
                continue;
            }
            for i in c.first..=c.last {
                let d = segment_distance(z, self.poly[i].z, self.poly[(i + 1) % n].z);
                if d < best {
                    best = d;
                }
            }
        }
        let mut result = (self.poly[0].at, T::infinity());
        for c in &self.chunks {
            let reach = best + c.sagitta;
            if box_distance(z, c.lo, c.hi) > reach {
                continue;
            }
            for i in c.first..=c.last {
                let a = &self.poly[i];
                let b = &self.poly[(i + 1) % n];
                if segment_distance(z, a.z, b.z) > best + c.sagitta {
                    continue;
                }
                let seg = a.at.segment;
                let (t0, t1) = if b.at.segment == seg && b.at.t > a.at.t {
                    (a.at.t, b.at.t)
                } else {
                    (a.at.t, T::one())
                };
                let t = self.segments[seg].closest_param_in(z, t0, t1);
                let at = CurvePoint { segment: seg, t };
                let d = (self.point(at) - z).norm();
                if d < result.1 {
                    result = (at, d);
                }
            }
        }
        result
    }

    pub fn distance(&self, z: Cplx<T>) -> T {
        self.closest(z).1
    }

    /// Point-in-region test: polyline winding number, replaced by an exact
    /// normal-side test when `z` is within the chord sagitta of the curve.
    pub fn contains(&self, z: Cplx<T>) -> bool {
        let wind = self.polyline_winding(z) != 0;
        let sag = self.max_sagitta_near(z);
        if sag == T::zero() {
            return wind;
        }
        let (at, d) = self.closest(z);
        if d > sag * T::lit(4.0) {
            return wind;
        }
        if d == T::zero() {
            return false;
        }
        // a corner as closest point: keep the polyline answer (corners are vertices)
        let seg = &self.segments[at.segment];
        if at.t <= T::zero() || at.t >= T::one() {
            if seg.is_straight() {
                return wind;
            }
        }
        let nrm = self.outward_normal(at);
        Vec2::from_complex(z - self.point(at)).dot(nrm) < T::zero()
    }

    fn max_sagitta_near(&self, z: Cplx<T>) -> T {
        let mut s = T::zero();
        for c in &self.chunks {
            if c.sagitta > T::zero() && box_distance(z, c.lo, c.hi) <= c.sagitta * T::lit(4.0) {
                s = s.max(c.sagitta);
            }
        }
        s
    }

    /// Sign convention: negative inside, positive outside.
    pub fn signed_distance(&self, z: Cplx<T>) -> T {
        let d = self.distance(z);
        if self.contains(z) {
            -d
        } else {
            d
        }
    }

    /// Rejects polylines whose non-adjacent edges intersect.
    fn check_simple(&self) -> Result<()> {
        let n = self.poly.len();
        let nc = self.chunks.len();
        for ci in 0..nc {
            for cj in ci..nc {
                let (a, b) = (&self.chunks[ci], &self.chunks[cj]);
                if a.hi.re < b.lo.re || b.hi.re < a.lo.re || a.hi.im < b.lo.im || b.hi.im < a.lo.im {
                    continue;
                }
                for i in a.first..=a.last {
                    let j0 = if ci == cj { i + 1 } else { b.first };
                    for j in j0..=b.last {
                        if j == i || (j + 1) % n == i || (i + 1) % n == j {
                            continue;
                        }
                        let p = (self.poly[i].z, self.poly[(i + 1) % n].z);
                        let q = (self.poly[j].z, self.poly[(j + 1) % n].z);
                        if let Some(x) = edge_intersection(p, q) {
                            return Err(Error::SelfIntersecting {
                                x: x.re.as_f64(),
                                y: x.im.as_f64(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn measure_segment<T: Real>(seg: &Segment<T>) -> Option<(T, Option<ArcTable<T>>)> {
    if seg.is_uniform_speed() {
        let len = seg.length_between(T::zero(), T::one())?;
        return Some((len, None));
    }
    let ts: Vec<T> = (0..=TABLE_PIECES)
        .map(|k| T::from_usize_lossy(k) / T::from_usize_lossy(TABLE_PIECES))
        .collect();
    let mut cum = vec![T::zero()];
    for w in ts.windows(2) {
        let piece = seg.length_between(w[0], w[1])?;
        let last = *cum.last().unwrap();
        cum.push(last + piece);
    }
    Some((*cum.last().unwrap(), Some(ArcTable { ts, cum })))
}

fn piece_index<T: Real>(ts: &[T], t: T) -> usize {
    match ts.iter().position(|&x| x > t) {
        Some(k) => k.saturating_sub(1).min(ts.len() - 2),
        None => ts.len() - 2,
    }
}

fn build_polyline<T: Real>(segments: &[Segment<T>], lengths: &[T]) -> Vec<PolyNode<T>> {
    let curved: T = segments
        .iter()
        .zip(lengths)
        .filter(|(s, _)| !s.is_straight())
        .map(|(_, &l)| l)
        .sum();
    let mut poly = Vec::new();
    for (i, (seg, &len)) in segments.iter().zip(lengths).enumerate() {
        let pieces = if seg.is_straight() {
            1
        } else {
            let share = (T::lit(POLY_SAMPLES as f64) * len / curved).ceil().as_f64() as usize;
            share.max(8)
        };
        for k in 0..pieces {
            let t = T::from_usize_lossy(k) / T::from_usize_lossy(pieces);
            poly.push(PolyNode {
                z: seg.point(t),
                at: CurvePoint { segment: i, t },
            });
        }
    }
    poly
}

fn build_chunks<T: Real>(segments: &[Segment<T>], poly: &[PolyNode<T>]) -> Vec<Chunk<T>> {
    let n = poly.len();
    let mut chunks = Vec::new();
    let mut first = 0;
    while first < n {
        let last = (first + CHUNK - 1).min(n - 1);
        let mut lo = poly[first].z;
        let mut hi = poly[first].z;
        let mut sag = T::zero();
        for i in first..=last {
            let a = &poly[i];
            let b = &poly[(i + 1) % n];
            for z in [a.z, b.z] {
                lo.re = lo.re.min(z.re);
                lo.im = lo.im.min(z.im);
                hi.re = hi.re.max(z.re);
                hi.im = hi.im.max(z.im);
            }
            let seg = &segments[a.at.segment];
            if !seg.is_straight() {
                let t1 = if b.at.segment == a.at.segment { b.at.t } else { T::one() };
                for f in [0.25, 0.5, 0.75] {
                    let t = a.at.t + (t1 - a.at.t) * T::lit(f);
                    sag = sag.max(segment_distance(seg.point(t), a.z, b.z));
                }
            }
        }
        let pad = sag * T::lit(1.5);
        chunks.push(Chunk {
            first,
            last,
            lo: lo - Cplx::new(pad, pad),
            hi: hi + Cplx::new(pad, pad),
            sagitta: pad,
        });
        first = last + 1;
    }
    chunks
}

fn box_distance<T: Real>(z: Cplx<T>, lo: Cplx<T>, hi: Cplx<T>) -> T {
    let dx = (lo.re - z.re).max(z.re - hi.re).max(T::zero());
    let dy = (lo.im - z.im).max(z.im - hi.im).max(T::zero());
    dx.hypot(dy)
}

/// Distance from `z` to the straight segment `[a, b]`.
pub fn segment_distance<T: Real>(z: Cplx<T>, a: Cplx<T>, b: Cplx<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).max(T::zero()).min(T::one());
    (a + d * t - z).norm()
}

/// Proper or touching intersection of two closed segments.
pub fn edge_intersection<T: Real>(p: (Cplx<T>, Cplx<T>), q: (Cplx<T>, Cplx<T>)) -> Option<Cplx<T>> {
    let r = p.1 - p.0;
    let s = q.1 - q.0;
    let denom = cross(r, s);
    let qp = q.0 - p.0;
    if denom == T::zero() {
        // parallel: report only collinear overlap
        if cross(qp, r) != T::zero() {
            return None;
        }
        let rr = r.norm_sqr();
        if rr == T::zero() {
            return None;
        }
        let t0 = (qp * r.conj()).re / rr;
        let t1 = ((q.1 - p.0) * r.conj()).re / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        if hi < T::zero() || lo > T::one() {
            return None;
        }
        return Some(p.0 + r * lo.max(T::zero()));
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if t >= T::zero() && t <= T::one() && u >= T::zero() && u <= T::one() {
        Some(p.0 + r * t)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use std::f64::consts::PI;

    fn unit_circle() -> BoundaryCurve<f64> {
        BoundaryCurve::new(vec![Segment::circular_arc(cplx(0.0, 0.0), 1.0, 0.0, 2.0 * PI)]).unwrap()
    }

    #[test]
    fn circle_length_and_inside() {
        let c = unit_circle();
        assert!((c.length() - 2.0 * PI).abs() < 1e-13);
        assert!(c.contains(cplx(0.3, -0.2)));
        assert!(!c.contains(cplx(1.2, 0.0)));
        // closer than the chord sagitta: exact test decides
        assert!(c.contains(cplx(1.0 - 1e-9, 0.0)));
        assert!(!c.contains(cplx(0.0, 1.0 + 1e-9)));
        let probe = cplx((0.3f64).cos(), (0.3f64).sin()) * (1.0 - 1e-8);
        assert!(c.contains(probe));
    }

    #[test]
    fn arclength_roundtrip() {
        let c = unit_circle();
        let at = c.at_arclength(1.0);
        assert!((at.t * 2.0 * PI - 1.0).abs() < 1e-14);
        assert!((c.arclength_of(at) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clockwise_is_rejected() {
        let sq = [cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(1.0, 1.0), cplx(1.0, 0.0)];
        let segs = (0..4).map(|i| Segment::line(sq[i], sq[(i + 1) % 4])).collect();
        assert!(BoundaryCurve::<f64>::new(segs).is_err());
    }

    #[test]
    fn bowtie_is_rejected() {
        let pts = [cplx(0.0, 0.0), cplx(1.0, 1.0), cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.5)];
        let segs = (0..5).map(|i| Segment::line(pts[i], pts[(i + 1) % 5])).collect();
        let err = BoundaryCurve::<f64>::new(segs).unwrap_err();
        assert!(matches!(err, Error::SelfIntersecting { .. } | Error::InvalidParameter(_)));
    }

    #[test]
    fn open_chain_is_rejected() {
        let segs = vec![
            Segment::line(cplx(0.0, 0.0), cplx(1.0, 0.0)),
            Segment::line(cplx(1.0, 0.0), cplx(0.0, 1.0)),
            Segment::line(cplx(0.0, 1.0), cplx(0.0, 1e-9)),
        ];
        assert!(matches!(BoundaryCurve::<f64>::new(segs), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn square_corners_are_right_angles() {
        let sq = [cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 1.0), cplx(0.0, 1.0)];
        let segs = (0..4).map(|i| Segment::line(sq[i], sq[(i + 1) % 4])).collect();
        let c = BoundaryCurve::<f64>::new(segs).unwrap();
        assert_eq!(c.corners().count(), 4);
        for k in c.corners() {
            assert!((k.interior_angle - PI / 2.0).abs() < 1e-12);
        }
        assert!((c.distance(cplx(0.5, 0.2)) - 0.2).abs() < 1e-15);
        assert!(c.signed_distance(cplx(0.5, 0.2)) < 0.0);
        assert!(c.signed_distance(cplx(1.5, 0.2)) > 0.0);
    }
}
