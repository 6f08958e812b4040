use crate::analytic::Holomorphic;
use crate::error::{Error, Result};
use crate::hodograph::HodographMap;
use crate::scalar::{Cplx, Real, Vec2};
use crate::solver::{Harmonic, HarmonicFunction};

/// `U = u ∘ Θ⁻¹` on the image side. With `F_u` the completion of `u` and
/// `g` that of `v`, the completion of `U` has derivative
/// `H'(W) = F_u'(z) / g'(z)` at `z = Θ⁻¹(W)`.
#[derive(Clone, Copy, Debug)]
pub struct Transported<'a, T> {
    pub map: &'a HodographMap<T>,
    pub u: &'a HarmonicFunction<T>,
}

impl<T: Real> Transported<'_, T> {
    fn preimage(&self, w: Cplx<T>) -> Result<Cplx<T>> {
        self.map.invert_unchecked(w, None)
    }

    pub fn value(&self, w: Cplx<T>) -> Result<T> {
        self.u.value(self.preimage(w)?)
    }

    /// `∇U = (Im H', Re H')`.
    pub fn gradient(&self, w: Cplx<T>) -> Result<Vec2<T>> {
        let d = self.eval(w)?;
        Ok(Vec2::new(d.im, d.re))
    }

    /// `H'` at a known preimage `z`.
    pub fn derivative_at(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        let gp = self.map.completion().g_prime(z)?;
        if gp.norm() == T::zero() {
            return Err(Error::NonFinite("critical point of the map".into()));
        }
        Ok(self.u.complex_derivative(z)? / gp)
    }
}

impl<T: Real> Holomorphic<T> for Transported<'_, T> {
    fn eval(&self, w: Cplx<T>) -> Result<Cplx<T>> {
        self.derivative_at(self.preimage(w)?)
    }

    // H'' = (F_u'' g' - F_u' g'') / g'^3
    fn deriv(&self, w: Cplx<T>) -> Result<Cplx<T>> {
        let z = self.preimage(w)?;
        let c = self.map.completion();
        let (g1, g2) = (c.g_prime(z)?, c.g_second(z)?);
        let (f1, f2) = (self.u.complex_derivative(z)?, self.u.complex_second_derivative(z)?);
        Ok((f2 * g1 - f1 * g2) / (g1 * g1 * g1))
    }
}

/// Max over `points` of `||∇u|² − |det DΘ| |∇U|²∘Θ|`, relative to `|∇u|²`.
/// `∇U` is evaluated through a fresh inversion of `Θ(z)`, so the check also
/// covers the inverse map.
pub fn transformation_law<T: Real>(t: &Transported<'_, T>, points: &[Cplx<T>]) -> Result<T> {
    use rayon::prelude::*;
    let errs: Vec<T> = points
        .par_iter()
        .map(|&z| {
            let gu = t.u.gradient(z)?;
            let lhs = gu.x * gu.x + gu.y * gu.y;
            let det = t.map.det(z)?.abs();
            let gw = t.gradient(t.map.theta(z)?)?;
            let rhs = det * (gw.x * gw.x + gw.y * gw.y);
            Ok((lhs - rhs).abs() / lhs.max(T::min_positive_value()))
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(T::zero(), T::max))
}
