use crate::analytic::Holomorphic;
use crate::error::{Error, Result};
use crate::hodograph::Transported;
use crate::scalar::{cplx, Cplx, Real, Vec2};

/// Points on `{Y = 0}` where the zero trace is checked.
const TRACE_SAMPLES: usize = 64;

/// Odd extension `U(X, −Y) = −U(X, Y)` of a transported function, with
/// the completion's derivative extended by `H'(W̄) = conj(H'(W))`.
#[derive(Clone, Copy, Debug)]
pub struct Reflected<'a, T> {
    pub inner: Transported<'a, T>,
}

impl<T: Real> Reflected<'_, T> {
    /// Zero on the line itself, as the odd extension requires.
    pub fn value(&self, w: Cplx<T>) -> Result<T> {
        if w.im == T::zero() {
            Ok(T::zero())
        } else if w.im > T::zero() {
            self.inner.value(w)
        } else {
            Ok(-self.inner.value(w.conj())?)
        }
    }

    pub fn gradient(&self, w: Cplx<T>) -> Result<Vec2<T>> {
        let d = self.eval(w)?;
        Ok(Vec2::new(d.im, d.re))
    }
}

impl<T: Real> Holomorphic<T> for Reflected<'_, T> {
    fn eval(&self, w: Cplx<T>) -> Result<Cplx<T>> {
        if w.im >= T::zero() {
            self.inner.eval(w)
        } else {
            Ok(self.inner.eval(w.conj())?.conj())
        }
    }

    fn seam(&self) -> Option<T> {
        Some(T::zero())
    }

    fn eval_from(&self, w: Cplx<T>, above: bool) -> Result<Cplx<T>> {
        if above {
            self.inner.eval(w)
        } else {
            Ok(self.inner.eval(w.conj())?.conj())
        }
    }

    fn deriv(&self, w: Cplx<T>) -> Result<Cplx<T>> {
        if w.im >= T::zero() {
            self.inner.deriv(w)
        } else {
            Ok(self.inner.deriv(w.conj())?.conj())
        }
    }
}

/// Reflects `U` across `{Y = 0}` after checking `|U| ≤ tol` at 64 points of
/// `(−a, a) × {0}`.
pub fn reflect_odd<T: Real>(inner: Transported<'_, T>, a: T, tol: T) -> Result<Reflected<'_, T>> {
    let mut worst = T::zero();
    for k in 0..TRACE_SAMPLES {
        let t = (T::from_usize_lossy(k) + T::lit(0.5)) / T::from_usize_lossy(TRACE_SAMPLES);
        let x = a * (t * T::lit(2.0) - T::one());
        worst = worst.max(inner.value(cplx(x, T::zero()))?.abs());
    }
    if !(worst <= tol) {
        return Err(Error::NotDirichletZeroTrace {
            max: worst.as_f64(),
            tolerance: tol.as_f64(),
        });
    }
    Ok(Reflected { inner })
}
