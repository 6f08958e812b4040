use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{edge_intersection, Domain};
use crate::quadrature;
use crate::scalar::{cplx, Cplx, Real, Vec2};
use crate::solver::{ChargeExpansion, ClosedForm, Harmonic, HarmonicFunction};

/// Conjugate of a charge expansion: `shift - Σ c_k arg(z - z_k) + Re Σ m_j / (z - q_j)`,
/// each angle cut along the ray `z_k + t d_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeConjugate<T> {
    pub shift: T,
    /// The expansion being conjugated; its constant is ignored.
    pub expansion: ChargeExpansion<T>,
    /// Unit direction of each branch cut.
    pub cuts: Vec<Cplx<T>>,
}

impl<T: Real> Harmonic<T> for ChargeConjugate<T> {
    fn value(&self, z: Cplx<T>) -> Result<T> {
        let e = &self.expansion;
        let mut acc = self.shift;
        for ((&p, &c), &d) in e.points.iter().zip(&e.coeffs).zip(&self.cuts) {
            // the principal argument of w * (-conj d) jumps exactly on the cut
            acc -= c * ((z - p) * -d.conj()).arg();
        }
        Ok(acc + e.dipole_part(z).re)
    }

    // holomorphic F = i g
    fn complex_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.expansion.check(z)?;
        Ok(self.expansion.g_prime(z) * cplx(T::zero(), T::one()))
    }

    fn complex_second_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.expansion.check(z)?;
        Ok(self.expansion.g_second(z) * cplx(T::zero(), T::one()))
    }
}

/// Conjugate obtained by integrating `J ∇v` from an interior start point,
/// straight when the segment stays inside, otherwise through a hub point.
#[derive(Clone, Debug)]
pub struct PathConjugate<T> {
    base: Box<HarmonicFunction<T>>,
    domain: Arc<Domain<T>>,
    start: Cplx<T>,
    hubs: Vec<Cplx<T>>,
    shift: T,
}

impl<T: Real> PathConjugate<T> {
    pub fn new(base: HarmonicFunction<T>, domain: &Domain<T>, anchor: Cplx<T>) -> Result<Self> {
        let start = domain.interior_probe();
        let margin = domain.distance_to_boundary(start) * T::lit(0.1);
        let hubs = domain.interior_samples(64, 17, margin, None);
        let mut p = Self {
            base: Box::new(base),
            domain: Arc::new(domain.clone()),
            start,
            hubs,
            shift: T::zero(),
        };
        p.shift = -p.value(anchor)?;
        Ok(p)
    }

    pub fn base(&self) -> &HarmonicFunction<T> {
        &self.base
    }

    fn segment_inside(&self, a: Cplx<T>, b: Cplx<T>) -> bool {
        let n = 64;
        (1..n).all(|k| self.domain.inside(a + (b - a) * (T::from_usize_lossy(k) / T::from_usize_lossy(n))))
    }

    /// `∫ ∇v̄ · dz` along the straight segment from `a` to `b`.
    pub fn leg(&self, a: Cplx<T>, b: Cplx<T>) -> Result<T> {
        let d = b - a;
        let f = |t: T| {
            let g = self.base.gradient(a + d * t).unwrap_or(Vec2::new(T::nan(), T::nan()));
            // J ∇v = (v_y, -v_x)
            g.y * d.re - g.x * d.im
        };
        let tol = T::tol(1e-14) * (T::one() + d.norm());
        let v = quadrature::integrate(f, T::zero(), T::one(), tol, 40)
            .ok_or_else(|| Error::ConjugateFailed("path quadrature did not converge".into()))?;
        if !v.is_finite() {
            return Err(Error::ConjugateFailed("path passes through a charge".into()));
        }
        Ok(v)
    }

    /// Integral from the start point to `z` through the given hub.
    pub fn via(&self, hub: Cplx<T>, z: Cplx<T>) -> Result<T> {
        Ok(self.shift + self.leg(self.start, hub)? + self.leg(hub, z)?)
    }
}

impl<T: Real> Harmonic<T> for PathConjugate<T> {
    fn value(&self, z: Cplx<T>) -> Result<T> {
        // points outside are projected onto the boundary; the base function
        // is smooth up to the boundary, so the last leg may end there
        let target = if self.domain.inside(z) {
            z
        } else {
            let (at, _) = self.domain.boundary().closest(z);
            self.domain.boundary().point(at)
        };
        if self.segment_inside(self.start, target) {
            return Ok(self.shift + self.leg(self.start, target)?);
        }
        for &h in &self.hubs {
            if self.segment_inside(self.start, h) && self.segment_inside(h, target) {
                return Ok(self.shift + self.leg(self.start, h)? + self.leg(h, target)?);
            }
        }
        Err(Error::ConjugateFailed(format!(
            "no interior polyline to ({}, {})",
            z.re, z.im
        )))
    }

    fn gradient(&self, z: Cplx<T>) -> Result<Vec2<T>> {
        Ok(self.base.gradient(z)?.rotate_cw())
    }

    fn complex_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.base.complex_derivative(z)? * cplx(T::zero(), T::one()))
    }

    fn complex_second_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.base.complex_second_derivative(z)? * cplx(T::zero(), T::one()))
    }
}

/// Does the ray from `p` in direction `d` stay clear of the boundary
/// polyline (with a clearance of a quarter of the distance from `p`)?
fn ray_is_clear<T: Real>(domain: &Domain<T>, poly: &[Cplx<T>], p: Cplx<T>, d: Cplx<T>, far: T) -> bool {
    let q = p + d * far;
    let n = poly.len();
    for i in 0..n {
        if edge_intersection((p, q), (poly[i], poly[(i + 1) % n])).is_some() {
            return false;
        }
    }
    let clearance = domain.distance_to_boundary(p) * T::lit(0.25);
    poly.iter().all(|&z| {
        let t = (Vec2::from_complex(z - p).dot(Vec2::from_complex(d))).max(T::zero()).min(far);
        (p + d * t - z).norm() >= clearance
    })
}

/// Finite-difference Cauchy-Riemann residual `|∂x v̄ - ∂y v| + |∂y v̄ + ∂x v|`,
/// with the difference quotient of `v̄` against the exact gradient of `v`.
/// A branch cut through the stencil shows up as a jump of order `2π c`.
pub fn fd_cr_residual<T: Real>(v: &dyn Harmonic<T>, vbar: &dyn Harmonic<T>, z: Cplx<T>, h: T) -> Result<T> {
    let g = v.gradient(z)?;
    let two_h = h + h;
    let dx = (vbar.value(z + cplx(h, T::zero()))? - vbar.value(z - cplx(h, T::zero()))?) / two_h;
    let dy = (vbar.value(z + cplx(T::zero(), h))? - vbar.value(z - cplx(T::zero(), h))?) / two_h;
    Ok((dx - g.y).abs() + (dy + g.x).abs())
}

/// Harmonic conjugate `v̄` with `∇v̄ = J∇v` and `v̄(anchor) = 0`.
///
/// Closed forms use their exact conjugate. Charge expansions get one angle
/// per charge, the cut pointing away from the domain centroid or, failing
/// that, along the first of 64 directions that misses the domain; if no
/// clear direction exists or the finite-difference check fails, the
/// conjugate falls back to path integration.
pub fn conjugate<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, anchor: Cplx<T>) -> Result<HarmonicFunction<T>> {
    match v {
        HarmonicFunction::ClosedForm(f) => {
            let mut c = f.conjugate();
            let at = c.poly(anchor).im;
            if c.coeffs.is_empty() {
                c.coeffs.push(T::zero().into());
            }
            c.coeffs[0] -= cplx(T::zero(), at);
            Ok(HarmonicFunction::ClosedForm(ClosedForm::new(c.name, c.coeffs)))
        }
        HarmonicFunction::Charges(e) => match charge_conjugate(e, domain, anchor) {
            Ok(c) => Ok(HarmonicFunction::ChargeConjugate(c)),
            Err(_) => path_fallback(v, domain, anchor),
        },
        _ => path_fallback(v, domain, anchor),
    }
}

fn path_fallback<T: Real>(v: &HarmonicFunction<T>, domain: &Domain<T>, anchor: Cplx<T>) -> Result<HarmonicFunction<T>> {
    Ok(HarmonicFunction::PathConjugate(PathConjugate::new(v.clone(), domain, anchor)?))
}

/// Branch-cut conjugate of a charge expansion, validated by the
/// finite-difference residual at interior samples.
pub fn charge_conjugate<T: Real>(e: &ChargeExpansion<T>, domain: &Domain<T>, anchor: Cplx<T>) -> Result<ChargeConjugate<T>> {
    let poly = domain.boundary().polyline();
    let n = T::from_usize_lossy(poly.len());
    let centroid = poly.iter().fold(Cplx::from(T::zero()), |a, &b| a + b) / n;
    let (lo, hi) = domain.bounding_box();
    let far = (hi - lo).norm() * T::lit(4.0);
    let mut cuts = Vec::with_capacity(e.points.len());
    for &p in &e.points {
        let away = p - centroid;
        let base = if away.norm() > T::zero() {
            away / away.norm()
        } else {
            Cplx::from(T::one())
        };
        let mut found = None;
        // alternate +k, -k around the preferred direction
        for k in 0..64usize {
            let step = T::from_usize_lossy(k.div_ceil(2)) * T::TAU() / T::lit(64.0);
            let angle = if k % 2 == 1 { step } else { -step };
            let d = base * Cplx::from_polar(T::one(), angle);
            if ray_is_clear(domain, &poly, p, d, far) {
                found = Some(d);
                break;
            }
        }
        cuts.push(found.ok_or_else(|| Error::ConjugateFailed(format!("no clear cut from ({}, {})", p.re, p.im)))?);
    }
    let mut c = ChargeConjugate {
        shift: T::zero(),
        expansion: e.clone(),
        cuts,
    };
    // the cuts stay off the closed domain, so the anchor is evaluated directly
    c.shift = -c.value(anchor)?;

    let scale: T = e.coeffs.iter().map(|c| c.abs()).sum::<T>() * T::PI()
        + e.moments.iter().zip(&e.dipoles).map(|(m, &q)| m.norm() / domain.distance_to_boundary(q)).sum::<T>();
    let h = T::lit(1e-6);
    let limit = T::lit(1e-6) + T::epsilon() * T::lit(100.0) * scale / h;
    let margin = T::lit(0.05);
    for z in domain.interior_samples(200, 5, margin, None) {
        let r = fd_cr_residual(e, &c, z, h)?;
        if !(r <= limit) {
            return Err(Error::CauchyRiemann {
                residual: r.as_f64(),
                limit: limit.as_f64(),
            });
        }
    }
    Ok(c)
}
