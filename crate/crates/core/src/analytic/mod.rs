//! Harmonic conjugates and the holomorphic completion `g = v̄ + i v`.

mod completion;
mod conjugate;

pub use completion::{completion, AnalyticCompletion, CompletionDiagnostics, DerivativeField};
pub use conjugate::{charge_conjugate, conjugate, fd_cr_residual, ChargeConjugate, PathConjugate};

use crate::error::Result;
use crate::scalar::{Cplx, Real};

/// A holomorphic function with its derivative. Zero counting works on any
/// implementor.
pub trait Holomorphic<T: Real>: Sync {
    fn eval(&self, z: Cplx<T>) -> Result<Cplx<T>>;
    fn deriv(&self, z: Cplx<T>) -> Result<Cplx<T>>;
    /// Known poles with their orders.
    fn poles(&self) -> Vec<(Cplx<T>, usize)> {
        Vec::new()
    }
    /// A line `Im z = c` across which `eval` is only piecewise continuous,
    /// as for an odd reflection assembled from two one-sided evaluations.
    fn seam(&self) -> Option<T> {
        None
    }
    /// One-sided value on the seam, from above or below.
    fn eval_from(&self, z: Cplx<T>, _above: bool) -> Result<Cplx<T>> {
        self.eval(z)
    }
}

/// Complex polynomial, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    pub coeffs: Vec<Cplx<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<Cplx<T>>) -> Self {
        Self { coeffs }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Cplx<T>]) -> Self {
        let mut c = vec![Cplx::from(T::one())];
        for &r in roots {
            let mut next = vec![Cplx::from(T::zero()); c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    pub fn value(&self, z: Cplx<T>) -> Cplx<T> {
        self.coeffs.iter().rev().fold(Cplx::from(T::zero()), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * T::from_usize_lossy(k))
                .collect(),
        }
    }
}

impl<T: Real> Holomorphic<T> for Polynomial<T> {
    fn eval(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.value(z))
    }

    fn deriv(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.derivative().value(z))
    }
}
