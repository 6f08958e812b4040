use crate::error::{Error, Result};
use crate::geometry::curve::{BoundaryCurve, CurvePoint};
use crate::geometry::graph::{make_graph_domain, GraphParametrization, Smoothness};
use crate::geometry::segment::Segment;
use crate::scalar::{cplx, Cplx, Real};
use crate::sequence::QuasiRandom2;

const FLOOD_GRID: usize = 256;

/// Bounded simply connected region standing for `Omega ∩ B_1`.
///
/// Segments flagged Dirichlet form `∂Ω`, where the harmonic functions of
/// interest vanish; the remaining segments close the region inside the ball.
#[derive(Clone, Debug)]
pub struct Domain<T> {
    label: String,
    boundary: BoundaryCurve<T>,
    dirichlet: Vec<bool>,
    anchor: Cplx<T>,
    anchor_at: CurvePoint<T>,
    clip_radius: T,
    smoothness: Option<Smoothness>,
    probe: Cplx<T>,
}

impl<T: Real> Domain<T> {
    /// Builds and validates a domain from counterclockwise segments.
    pub fn from_segments(
        label: impl Into<String>,
        segments: Vec<Segment<T>>,
        dirichlet: Vec<bool>,
        anchor: Cplx<T>,
        clip_radius: T,
    ) -> Result<Self> {
        if dirichlet.len() != segments.len() {
            return Err(Error::InvalidParameter(
                "one Dirichlet flag per segment required".into(),
            ));
        }
        if !(clip_radius > T::zero()) || !clip_radius.is_finite() {
            return Err(Error::InvalidParameter(format!("clip radius {clip_radius}")));
        }
        let boundary = BoundaryCurve::new(segments)?;
        let (anchor_at, dist) = boundary.closest(anchor);
        if dist > T::tol(1e-12) {
            return Err(Error::AnchorOffBoundary {
                distance: dist.as_f64(),
            });
        }
        let mut domain = Self {
            label: label.into(),
            boundary,
            dirichlet,
            anchor,
            anchor_at,
            clip_radius,
            smoothness: None,
            probe: anchor,
        };
        domain.probe = domain.deepest_grid_point()?;
        domain.validate_membership()?;
        Ok(domain)
    }

    pub(crate) fn with_smoothness(mut self, s: Smoothness) -> Self {
        self.smoothness = Some(s);
        self
    }

    /// Polygon with counterclockwise or clockwise vertices; edge `i` joins
    /// vertex `i` to `i + 1`. Edges listed in `free_edges` are not Dirichlet.
    pub fn polygon(vertices: &[Cplx<T>], free_edges: &[usize], anchor: Cplx<T>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter("polygon needs >= 3 vertices".into()));
        }
        if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("polygon vertex".into()));
        }
        let mut area = T::zero();
        for i in 0..n {
            area += crate::scalar::cross(vertices[i], vertices[(i + 1) % n]);
        }
        let mut segments = Vec::with_capacity(n);
        let mut dirichlet = Vec::with_capacity(n);
        if area > T::zero() {
            for i in 0..n {
                segments.push(Segment::line(vertices[i], vertices[(i + 1) % n]));
                dirichlet.push(!free_edges.contains(&i));
            }
        } else {
            // reverse: edge i (v_i -> v_{i+1}) becomes v_{i+1} -> v_i
            for i in (0..n).rev() {
                segments.push(Segment::line(vertices[(i + 1) % n], vertices[i]));
                dirichlet.push(!free_edges.contains(&i));
            }
        }
        Self::from_segments("polygon", segments, dirichlet, anchor, T::one())
            .map(|d| d.with_smoothness(Smoothness::Lipschitz))
    }

    /// Disk with the anchor at polar angle `anchor_angle`.
    pub fn disk(center: Cplx<T>, radius: T, anchor_angle: T, dirichlet: bool) -> Result<Self> {
        let seg = Segment::circular_arc(center, radius, anchor_angle, anchor_angle + T::TAU());
        let anchor = seg.start();
        Self::from_segments("disk", vec![seg], vec![dirichlet], anchor, T::one())
            .map(|d| d.with_smoothness(Smoothness::C1Dini))
    }

    /// Axis-aligned ellipse, anchor at the bottom vertex.
    pub fn ellipse(center: Cplx<T>, semi_x: T, semi_y: T) -> Result<Self> {
        let from = -T::FRAC_PI_2();
        let seg = Segment::EllipticArc {
            center,
            semi_x,
            semi_y,
            from,
            to: from + T::TAU(),
        };
        let anchor = seg.start();
        Self::from_segments("ellipse", vec![seg], vec![true], anchor, T::one())
            .map(|d| d.with_smoothness(Smoothness::C1Dini))
    }

    /// Upper half of the unit disk; the diameter is the Dirichlet boundary.
    pub fn half_disk() -> Result<Self> {
        make_graph_domain(&GraphParametrization::flat(), T::one())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn boundary(&self) -> &BoundaryCurve<T> {
        &self.boundary
    }

    pub fn anchor(&self) -> Cplx<T> {
        self.anchor
    }

    pub fn anchor_location(&self) -> CurvePoint<T> {
        self.anchor_at
    }

    pub fn clip_radius(&self) -> T {
        self.clip_radius
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        self.smoothness
    }

    /// Center of the largest sampled interior disk.
    pub fn interior_probe(&self) -> Cplx<T> {
        self.probe
    }

    pub fn is_dirichlet(&self, segment: usize) -> bool {
        self.dirichlet[segment]
    }

    pub fn dirichlet_flags(&self) -> &[bool] {
        &self.dirichlet
    }

    /// Total length of the Dirichlet part `∂Ω`.
    pub fn dirichlet_length(&self) -> T {
        self.boundary
            .segment_lengths()
            .iter()
            .zip(&self.dirichlet)
            .filter(|(_, &d)| d)
            .map(|(&l, _)| l)
            .sum()
    }

    pub fn inside(&self, z: Cplx<T>) -> bool {
        self.boundary.contains(z)
    }

    pub fn distance_to_boundary(&self, z: Cplx<T>) -> T {
        self.boundary.distance(z)
    }

    /// Distance to the Dirichlet part of the boundary only.
    pub fn distance_to_dirichlet(&self, z: Cplx<T>) -> T {
        let mut best = T::infinity();
        for (i, seg) in self.boundary.segments().iter().enumerate() {
            if !self.dirichlet[i] {
                continue;
            }
            // coarse scan, then golden-section polish
            let k = 64;
            let mut tb = T::zero();
            let mut db = T::infinity();
            for j in 0..=k {
                let t = T::from_usize_lossy(j) / T::from_usize_lossy(k);
                let d = (seg.point(t) - z).norm();
                if d < db {
                    db = d;
                    tb = t;
                }
            }
            let h = T::one() / T::from_usize_lossy(k);
            let t = seg.closest_param_in(z, (tb - h).max(T::zero()), (tb + h).min(T::one()));
            best = best.min((seg.point(t) - z).norm()).min(db);
        }
        best
    }

    pub fn bounding_box(&self) -> (Cplx<T>, Cplx<T>) {
        self.boundary.bounding_box()
    }

    /// Quasi-random interior points at distance at least `margin` from the
    /// boundary, optionally restricted to the disk `B(anchor, radius)`.
    pub fn interior_samples(&self, n: usize, seed: u64, margin: T, radius: Option<T>) -> Vec<Cplx<T>> {
        let (lo, hi) = self.bounding_box();
        let mut seq = QuasiRandom2::new(seed);
        let mut out = Vec::with_capacity(n);
        let mut tries = 0usize;
        while out.len() < n && tries < 1000 * n + 10_000 {
            tries += 1;
            let (u, v): (T, T) = seq.next_pair();
            let z = cplx(lo.re + (hi.re - lo.re) * u, lo.im + (hi.im - lo.im) * v);
            if let Some(r) = radius {
                if (z - self.anchor).norm() >= r {
                    continue;
                }
            }
            if self.inside(z) && self.distance_to_boundary(z) >= margin {
                out.push(z);
            }
        }
        out
    }

    fn grid(&self) -> (Cplx<T>, Cplx<T>) {
        let (mut lo, mut hi) = self.bounding_box();
        let r = self.clip_radius;
        lo.re = lo.re.max(self.anchor.re - r);
        lo.im = lo.im.max(self.anchor.im - r);
        hi.re = hi.re.min(self.anchor.re + r);
        hi.im = hi.im.min(self.anchor.im + r);
        (lo, hi)
    }

    fn grid_point(&self, lo: Cplx<T>, hi: Cplx<T>, i: usize, j: usize) -> Cplx<T> {
        let g = T::from_usize_lossy(FLOOD_GRID);
        let half = T::lit(0.5);
        cplx(
            lo.re + (hi.re - lo.re) * (T::from_usize_lossy(i) + half) / g,
            lo.im + (hi.im - lo.im) * (T::from_usize_lossy(j) + half) / g,
        )
    }

    fn deepest_grid_point(&self) -> Result<Cplx<T>> {
        let (lo, hi) = self.bounding_box();
        let mut best = (T::zero(), None);
        let k = 32;
        for i in 0..k {
            for j in 0..k {
                let z = cplx(
                    lo.re + (hi.re - lo.re) * (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(k),
                    lo.im + (hi.im - lo.im) * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(k),
                );
                if self.boundary.polyline_winding(z) == 0 {
                    continue;
                }
                let d = self.boundary.distance(z);
                if d > best.0 {
                    best = (d, Some(z));
                }
            }
        }
        best.1
            .ok_or_else(|| Error::MembershipCheck("no interior grid point found".into()))
    }

    fn validate_membership(&self) -> Result<()> {
        if !self.inside(self.probe) {
            return Err(Error::MembershipCheck(
                "center of the sampled interior disk tested outside".into(),
            ));
        }
        let far = T::lit(2.0) * self.clip_radius;
        for k in 0..16 {
            let th = T::TAU() * T::from_usize_lossy(k) / T::lit(16.0);
            let z = self.anchor + cplx(th.cos(), th.sin()) * far;
            if self.inside(z) {
                return Err(Error::MembershipCheck(format!(
                    "point at distance {far} from the anchor tested inside"
                )));
            }
        }
        let components = self.flood_fill_components();
        if components != 1 {
            return Err(Error::NotConnected { components });
        }
        Ok(())
    }

    /// Number of 4-connected components of `{inside} ∩ B(anchor, clip)` on the grid.
    fn flood_fill_components(&self) -> usize {
        let (lo, hi) = self.grid();
        let n = FLOOD_GRID;
        let r2 = self.clip_radius * self.clip_radius;
        let mut cell = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                let z = self.grid_point(lo, hi, i, j);
                cell[i * n + j] = (z - self.anchor).norm_sqr() < r2 && self.boundary.polyline_winding(z) != 0;
            }
        }
        let mut seen = vec![false; n * n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n * n {
            if !cell[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(c) = stack.pop() {
                let (i, j) = (c / n, c % n);
                let mut visit = |k: usize| {
                    if cell[k] && !seen[k] {
                        seen[k] = true;
                        stack.push(k);
                    }
                };
                if i > 0 {
                    visit(c - n);
                }
                if i + 1 < n {
                    visit(c + n);
                }
                if j > 0 {
                    visit(c - 1);
                }
                if j + 1 < n {
                    visit(c + 1);
                }
            }
        }
        components
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::graph::GraphProfile;

    #[test]
    fn half_disk_basics() {
        let d = Domain::<f64>::half_disk().unwrap();
        assert_eq!(d.boundary().segments().len(), 2);
        assert!(d.inside(cplx(0.0, 0.5)));
        assert!(!d.inside(cplx(0.0, -0.1)));
        assert!((d.dirichlet_length() - 2.0).abs() < 1e-15);
        assert!((d.boundary().length() - 2.0 - std::f64::consts::PI).abs() < 1e-13);
        assert_eq!(d.boundary().corners().count(), 2);
    }

    #[test]
    fn anchor_must_lie_on_boundary() {
        let sq = [cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 1.0), cplx(0.0, 1.0)];
        let err = Domain::<f64>::polygon(&sq, &[], cplx(0.5, 0.1)).unwrap_err();
        assert!(matches!(err, Error::AnchorOffBoundary { .. }));
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let sq = [cplx(-0.5, 0.0), cplx(-0.5, 1.0), cplx(0.5, 1.0), cplx(0.5, 0.0)];
        // edge 3 is the bottom edge (0.5,0) -> (-0.5,0); only it stays Dirichlet
        let d = Domain::<f64>::polygon(&sq, &[0, 1, 2], cplx(0.0, 0.0)).unwrap();
        assert!(d.boundary().is_counterclockwise());
        assert!((d.dirichlet_length() - 1.0).abs() < 1e-15);
        assert!(d.inside(cplx(0.0, 0.5)));
    }

    #[test]
    fn graph_exiting_the_ball_is_rejected() {
        let p = GraphParametrization::new(
            GraphProfile::Polyline {
                xs: vec![-0.9, 0.0, 0.9],
                ys: vec![0.9, 0.0, 0.9],
            },
            Smoothness::Lipschitz,
            0.9,
        )
        .unwrap();
        assert!(matches!(make_graph_domain(&p, 0.9), Err(Error::GraphExitsBall { .. })));
    }
}
