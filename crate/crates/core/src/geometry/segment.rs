use crate::geometry::graph::GraphProfile;
use crate::quadrature;
use crate::scalar::{cplx, Cplx, Real};

/// One parametrized piece of a boundary curve, defined on `t in [0, 1]`.
#[derive(Clone, Debug)]
pub enum Segment<T> {
    Line {
        start: Cplx<T>,
        end: Cplx<T>,
    },
    /// Arc of the axis-aligned ellipse `center + (a cos th, b sin th)`,
    /// `th` running linearly from `from` to `to`.
    EllipticArc {
        center: Cplx<T>,
        semi_x: T,
        semi_y: T,
        from: T,
        to: T,
    },
    /// Graph `y = phi(x)` traversed from `x0` to `x1`.
    Graph {
        profile: GraphProfile<T>,
        x0: T,
        x1: T,
    },
}

impl<T: Real> Segment<T> {
    pub fn line(start: Cplx<T>, end: Cplx<T>) -> Self {
        Segment::Line { start, end }
    }

    pub fn circular_arc(center: Cplx<T>, radius: T, from: T, to: T) -> Self {
        Segment::EllipticArc {
            center,
            semi_x: radius,
            semi_y: radius,
            from,
            to,
        }
    }

    pub fn point(&self, t: T) -> Cplx<T> {
        match self {
            Segment::Line { start, end } => *start + (*end - *start) * t,
            Segment::EllipticArc {
                center,
                semi_x,
                semi_y,
                from,
                to,
            } => {
                let th = *from + (*to - *from) * t;
                *center + cplx(*semi_x * th.cos(), *semi_y * th.sin())
            }
            Segment::Graph { profile, x0, x1 } => {
                let x = *x0 + (*x1 - *x0) * t;
                cplx(x, profile.eval(x))
            }
        }
    }

    /// Derivative of the parametrization with respect to `t`.
    pub fn derivative(&self, t: T) -> Cplx<T> {
        match self {
            Segment::Line { start, end } => *end - *start,
            Segment::EllipticArc {
                semi_x,
                semi_y,
                from,
                to,
                ..
            } => {
                let dth = *to - *from;
                let th = *from + dth * t;
                cplx(-*semi_x * th.sin() * dth, *semi_y * th.cos() * dth)
            }
            Segment::Graph { profile, x0, x1 } => {
                let dx = *x1 - *x0;
                let x = *x0 + dx * t;
                cplx(dx, dx * profile.derivative(x))
            }
        }
    }

    pub fn start(&self) -> Cplx<T> {
        self.point(T::zero())
    }

    pub fn end(&self) -> Cplx<T> {
        self.point(T::one())
    }

    /// Arc length is linear in `t` for lines and circular arcs.
    pub fn is_uniform_speed(&self) -> bool {
        match self {
            Segment::Line { .. } => true,
            Segment::EllipticArc { semi_x, semi_y, .. } => semi_x == semi_y,
            Segment::Graph { .. } => false,
        }
    }

    pub fn is_straight(&self) -> bool {
        matches!(self, Segment::Line { .. })
            || matches!(self, Segment::Graph { profile, .. } if profile.is_piecewise_linear())
    }

    pub fn speed(&self, t: T) -> T {
        self.derivative(t).norm()
    }

    /// Length of the parameter interval `[a, b]`, 16-point rule.
    pub fn length_between_fixed(&self, a: T, b: T) -> T {
        if self.is_uniform_speed() {
            return self.speed(T::lit(0.5)) * (b - a);
        }
        quadrature::fixed(&|t: T| self.speed(t), a, b, 16)
    }

    /// Adaptive length of `[a, b]`; `None` if quadrature fails to settle.
    pub fn length_between(&self, a: T, b: T) -> Option<T> {
        if self.is_uniform_speed() {
            return Some(self.speed(T::lit(0.5)) * (b - a));
        }
        let rough = self.length_between_fixed(a, b).abs();
        let tol = T::epsilon() * T::lit(64.0) * rough.max(T::min_positive_value());
        quadrature::integrate(|t: T| self.speed(t), a, b, tol, 60)
    }

    /// Closest parameter to `z` searched in `[lo, hi]` by golden section on the
    /// squared distance. The bracket must isolate a single local minimum.
    pub fn closest_param_in(&self, z: Cplx<T>, lo: T, hi: T) -> T {
        if let Segment::Line { start, end } = self {
            let d = *end - *start;
            let t = ((z - *start) * d.conj()).re / d.norm_sqr();
            return t.max(lo).min(hi);
        }
        let f = |t: T| (self.point(t) - z).norm_sqr();
        let g = T::lit(0.618_033_988_749_894_8);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
            if (b - a).abs() < T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let mut mid = (a + b) * T::lit(0.5);
        // golden section only resolves t to sqrt(eps); finish with Newton on
        // the stationarity condition Re((p - z) conj(p')) = 0
        let g = |t: T| ((self.point(t) - z) * self.derivative(t).conj()).re;
        let h = (hi - lo) * T::lit(1e-5);
        for _ in 0..4 {
            let slope = (g(mid + h) - g(mid - h)) / (h + h);
            if !(slope > T::zero()) {
                break;
            }
            let next = (mid - g(mid) / slope).max(lo).min(hi);
            if (next - mid).abs() > (b - a).abs() * T::lit(4.0) + h {
                break;
            }
            mid = next;
        }
        // endpoints may beat the interior minimum
        [lo, mid, hi]
            .into_iter()
            .min_by(|p, q| f(*p).partial_cmp(&f(*q)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(mid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circular_arc_length_is_exact() {
        let s = Segment::circular_arc(cplx(0.0, 0.0), 2.0, 0.0, PI);
        assert!((s.length_between(0.0, 1.0).unwrap() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn ellipse_quarter_length_matches_reference() {
        // quarter perimeter of the 2:1 ellipse, 2 E(m = 3/4)
        let s = Segment::EllipticArc {
            center: cplx(0.0, 0.0),
            semi_x: 2.0,
            semi_y: 1.0,
            from: 0.0,
            to: PI / 2.0,
        };
        let l = s.length_between(0.0, 1.0).unwrap();
        assert!((l - 2.422_112_055_136_919).abs() < 1e-10, "{l}");
    }

    #[test]
    fn closest_param_on_arc() {
        let s = Segment::circular_arc(cplx(0.0, 0.0), 1.0, 0.0, PI);
        let t = s.closest_param_in(cplx(0.0, 3.0), 0.0, 1.0);
        assert!((t - 0.5).abs() < 1e-9);
    }
}
