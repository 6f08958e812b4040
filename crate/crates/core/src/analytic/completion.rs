use rayon::prelude::*;

use crate::analytic::Holomorphic;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::scalar::{cplx, rel_diff, Cplx, Real};
use crate::solver::{Harmonic, HarmonicFunction};

const CR_LIMIT: f64 = 1e-8;
const ANCHOR_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletionDiagnostics<T> {
    /// Max of `|∂x v̄ - ∂y v| + |∂y v̄ + ∂x v|` relative to `max(1, |∇v|)`.
    pub cr_residual: T,
    /// Max relative gap between `|g'|` and `|∇v|`.
    pub modulus_mismatch: T,
    /// `|v̄(anchor)|`.
    pub anchor_value: T,
    pub samples: usize,
}

/// `g = v̄ + i v`, holomorphic with `g' = ∂y v + i ∂x v`.
#[derive(Clone, Debug)]
pub struct AnalyticCompletion<T> {
    base: HarmonicFunction<T>,
    conjugate: HarmonicFunction<T>,
    anchor: Cplx<T>,
    diagnostics: CompletionDiagnostics<T>,
}

impl<T: Real> AnalyticCompletion<T> {
    pub fn base(&self) -> &HarmonicFunction<T> {
        &self.base
    }

    pub fn conjugate(&self) -> &HarmonicFunction<T> {
        &self.conjugate
    }

    pub fn anchor(&self) -> Cplx<T> {
        self.anchor
    }

    pub fn diagnostics(&self) -> &CompletionDiagnostics<T> {
        &self.diagnostics
    }

    pub fn g(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(cplx(self.conjugate.value(z)?, self.base.value(z)?))
    }

    pub fn g_prime(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.base.complex_derivative(z)
    }

    pub fn g_second(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.base.complex_second_derivative(z)
    }

    /// `g'` with its derivative, for zero counting.
    pub fn derivative_field(&self) -> DerivativeField<'_, T> {
        DerivativeField { h: &self.base }
    }
}

/// Derivative `F'` of the completion of a harmonic function, as a
/// holomorphic function whose zeros are the critical points.
#[derive(Clone, Copy, Debug)]
pub struct DerivativeField<'a, T> {
    pub h: &'a HarmonicFunction<T>,
}

impl<T: Real> Holomorphic<T> for DerivativeField<'_, T> {
    fn eval(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.h.complex_derivative(z)
    }

    fn deriv(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.h.complex_second_derivative(z)
    }

    fn poles(&self) -> Vec<(Cplx<T>, usize)> {
        self.h.poles()
    }
}

/// Pairs `v` with its conjugate after checking the Cauchy-Riemann residual
/// and the anchor normalization on 10^3 interior samples.
pub fn completion<T: Real>(
    v: &HarmonicFunction<T>,
    v_bar: &HarmonicFunction<T>,
    domain: &Domain<T>,
) -> Result<AnalyticCompletion<T>> {
    let samples = domain.interior_samples(1000, 3, T::lit(1e-3), None);
    let per_point: Vec<(T, T)> = samples
        .par_iter()
        .map(|&z| {
            let gv = v.gradient(z)?;
            let gb = v_bar.gradient(z)?;
            let scale = gv.norm().max(T::one());
            let cr = ((gb.x - gv.y).abs() + (gb.y + gv.x).abs()) / scale;
            let gp = v.complex_derivative(z)?;
            Ok((cr, rel_diff(gp.norm(), gv.norm())))
        })
        .collect::<Result<_>>()?;
    let cr_residual = per_point.iter().map(|p| p.0).fold(T::zero(), T::max);
    let modulus_mismatch = per_point.iter().map(|p| p.1).fold(T::zero(), T::max);
    let anchor = domain.anchor();
    let anchor_value = v_bar.value(anchor)?.abs();
    if !(cr_residual <= T::tol(CR_LIMIT)) {
        return Err(Error::CauchyRiemann {
            residual: cr_residual.as_f64(),
            limit: CR_LIMIT,
        });
    }
    if !(anchor_value <= T::tol(ANCHOR_LIMIT)) {
        return Err(Error::ConjugateFailed(format!("conjugate is {anchor_value} at the anchor")));
    }
    Ok(AnalyticCompletion {
        base: v.clone(),
        conjugate: v_bar.clone(),
        anchor,
        diagnostics: CompletionDiagnostics {
            cr_residual,
            modulus_mismatch,
            anchor_value,
            samples: samples.len(),
        },
    })
}
