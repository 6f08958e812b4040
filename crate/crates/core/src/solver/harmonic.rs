use rayon::prelude::*;

use crate::analytic::{ChargeConjugate, PathConjugate};
use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real, Vec2};

/// Pointwise access to a real harmonic function `h` and to the holomorphic
/// `F` with `Im F = h`, whose derivative is `F' = ∂y h + i ∂x h`.
pub trait Harmonic<T: Real>: Send + Sync {
    fn value(&self, z: Cplx<T>) -> Result<T>;

    fn gradient(&self, z: Cplx<T>) -> Result<Vec2<T>> {
        let d = self.complex_derivative(z)?;
        Ok(Vec2::new(d.im, d.re))
    }

    fn complex_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>>;

    /// `h(z + dz) - h(z)`. Representations with large cancelling terms
    /// override this to difference term by term, which keeps finite
    /// difference stencils accurate for small `dz`.
    fn increment(&self, z: Cplx<T>, dz: Cplx<T>) -> Result<T> {
        Ok(self.value(z + dz)? - self.value(z)?)
    }

    fn complex_second_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>>;
}

/// Harmonic function `Im P(z)` for a complex polynomial `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm<T> {
    pub name: String,
    /// Coefficients of `P`, lowest degree first.
    pub coeffs: Vec<Cplx<T>>,
}

impl<T: Real> ClosedForm<T> {
    pub fn new(name: impl Into<String>, coeffs: Vec<Cplx<T>>) -> Self {
        Self {
            name: name.into(),
            coeffs,
        }
    }

    /// `y = Im z`.
    pub fn y() -> Self {
        Self::new("y", vec![T::zero().into(), T::one().into()])
    }

    /// `x = Im(i z)`.
    pub fn x() -> Self {
        Self::new("x", vec![T::zero().into(), cplx(T::zero(), T::one())])
    }

    /// `Im z^k`.
    pub fn im_power(k: usize) -> Self {
        let mut coeffs = vec![Cplx::<T>::from(T::zero()); k + 1];
        coeffs[k] = T::one().into();
        Self::new(format!("im_z{k}"), coeffs)
    }

    /// Looks up a closed form by the names used in scenario files.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "y" | "im_z" => Some(Self::y()),
            "x" | "re_z" => Some(Self::x()),
            "im_z2" => Some(Self::im_power(2)),
            "im_z3" => Some(Self::im_power(3)),
            "im_z4" => Some(Self::im_power(4)),
            _ => None,
        }
    }

    /// The polynomial `P` itself, i.e. the completion `g = Re P + i Im P`.
    pub fn poly(&self, z: Cplx<T>) -> Cplx<T> {
        horner(&self.coeffs, z)
    }

    pub fn poly_derivative(&self, z: Cplx<T>) -> Cplx<T> {
        horner(&derive(&self.coeffs), z)
    }

    pub fn poly_second_derivative(&self, z: Cplx<T>) -> Cplx<T> {
        horner(&derive(&derive(&self.coeffs)), z)
    }

    /// Conjugate `Re P = Im(i P)`, vanishing where `Re P` does.
    pub fn conjugate(&self) -> Self {
        let i = cplx(T::zero(), T::one());
        Self::new(format!("conj({})", self.name), self.coeffs.iter().map(|&a| a * i).collect())
    }
}

fn horner<T: Real>(coeffs: &[Cplx<T>], z: Cplx<T>) -> Cplx<T> {
    coeffs.iter().rev().fold(Cplx::from(T::zero()), |acc, &a| acc * z + a)
}

fn derive<T: Real>(coeffs: &[Cplx<T>]) -> Vec<Cplx<T>> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * T::from_usize_lossy(k))
        .collect()
}

impl<T: Real> Harmonic<T> for ClosedForm<T> {
    fn value(&self, z: Cplx<T>) -> Result<T> {
        Ok(self.poly(z).im)
    }

    fn complex_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.poly_derivative(z))
    }

    fn complex_second_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.poly_second_derivative(z))
    }
}

/// `c0 + Σ c_k ln|z - z_k| + Σ Im(m_j / (z - q_j))`: logarithmic charges
/// with real coefficients plus dipoles with complex moments, all outside
/// the domain. The completion is `g = i Σ c_k Log(z - z_k) + Σ m_j / (z - q_j)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChargeExpansion<T> {
    pub constant: T,
    pub points: Vec<Cplx<T>>,
    pub coeffs: Vec<T>,
    pub dipoles: Vec<Cplx<T>>,
    pub moments: Vec<Cplx<T>>,
}

/// Separation below which a query is treated as sitting on a charge.
fn on_charge<T: Real>(w: Cplx<T>) -> bool {
    w.norm_sqr() <= T::min_positive_value().sqrt()
}

impl<T: Real> ChargeExpansion<T> {
    pub fn new(constant: T, points: Vec<Cplx<T>>, coeffs: Vec<T>) -> Self {
        assert_eq!(points.len(), coeffs.len());
        Self {
            constant,
            points,
            coeffs,
            dipoles: Vec::new(),
            moments: Vec::new(),
        }
    }

    pub fn with_dipoles(mut self, dipoles: Vec<Cplx<T>>, moments: Vec<Cplx<T>>) -> Self {
        assert_eq!(dipoles.len(), moments.len());
        self.dipoles = dipoles;
        self.moments = moments;
        self
    }

    pub(crate) fn check(&self, z: Cplx<T>) -> Result<()> {
        for &p in self.points.iter().chain(&self.dipoles) {
            if on_charge(z - p) {
                return Err(Error::EvalAtCharge {
                    x: p.re.as_f64(),
                    y: p.im.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Poles of `g'` with their orders.
    pub fn poles(&self) -> Vec<(Cplx<T>, usize)> {
        let mut out: Vec<_> = self.points.iter().map(|&p| (p, 1)).collect();
        out.extend(self.dipoles.iter().map(|&q| (q, 2)));
        out
    }

    /// `Σ c_k ln|z - z_k|`.
    pub(crate) fn log_part(&self, z: Cplx<T>) -> T {
        let half = T::lit(0.5);
        let mut acc = T::zero();
        for (&p, &c) in self.points.iter().zip(&self.coeffs) {
            acc += c * half * (z - p).norm_sqr().ln();
        }
        acc
    }

    /// `Σ m_j / (z - q_j)`.
    pub(crate) fn dipole_part(&self, z: Cplx<T>) -> Cplx<T> {
        let mut acc = Cplx::from(T::zero());
        for (&q, &m) in self.dipoles.iter().zip(&self.moments) {
            acc += m / (z - q);
        }
        acc
    }

    /// `g'` of the completion.
    pub(crate) fn g_prime(&self, z: Cplx<T>) -> Cplx<T> {
        let mut logs = Cplx::from(T::zero());
        for (&p, &c) in self.points.iter().zip(&self.coeffs) {
            logs += (z - p).inv() * c;
        }
        let mut dips = Cplx::from(T::zero());
        for (&q, &m) in self.dipoles.iter().zip(&self.moments) {
            let r = (z - q).inv();
            dips += m * r * r;
        }
        logs * cplx(T::zero(), T::one()) - dips
    }

    pub(crate) fn g_second(&self, z: Cplx<T>) -> Cplx<T> {
        let mut logs = Cplx::from(T::zero());
        for (&p, &c) in self.points.iter().zip(&self.coeffs) {
            let r = (z - p).inv();
            logs += r * r * c;
        }
        let mut dips = Cplx::from(T::zero());
        for (&q, &m) in self.dipoles.iter().zip(&self.moments) {
            let r = (z - q).inv();
            dips += m * r * r * r;
        }
        logs * cplx(T::zero(), -T::one()) + dips * T::lit(2.0)
    }
}

impl<T: Real> Harmonic<T> for ChargeExpansion<T> {
    fn value(&self, z: Cplx<T>) -> Result<T> {
        self.check(z)?;
        Ok(self.constant + self.log_part(z) + self.dipole_part(z).im)
    }

    fn complex_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.check(z)?;
        Ok(self.g_prime(z))
    }

    fn increment(&self, z: Cplx<T>, dz: Cplx<T>) -> Result<T> {
        self.check(z)?;
        self.check(z + dz)?;
        let half = T::lit(0.5);
        let mut acc = T::zero();
        for (&p, &c) in self.points.iter().zip(&self.coeffs) {
            // ln|w + dz| - ln|w| = ln1p((2 Re(conj(w) dz) + |dz|^2) / |w|^2) / 2
            let w = z - p;
            let t = (T::lit(2.0) * (w.conj() * dz).re + dz.norm_sqr()) / w.norm_sqr();
            acc += c * half * t.ln_1p();
        }
        for (&q, &m) in self.dipoles.iter().zip(&self.moments) {
            let w = z - q;
            acc -= (m * dz / (w * (w + dz))).im;
        }
        Ok(acc)
    }

    fn complex_second_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        self.check(z)?;
        Ok(self.g_second(z))
    }
}

/// A harmonic function in one of the representations the pipeline produces.
#[derive(Clone, Debug)]
pub enum HarmonicFunction<T> {
    ClosedForm(ClosedForm<T>),
    Charges(ChargeExpansion<T>),
    /// Conjugate of a charge expansion through per-charge angle branches.
    ChargeConjugate(ChargeConjugate<T>),
    /// Conjugate by integrating the rotated gradient along interior paths.
    PathConjugate(PathConjugate<T>),
}

impl<T: Real> HarmonicFunction<T> {
    /// Poles of the completion's derivative with their orders.
    pub fn poles(&self) -> Vec<(Cplx<T>, usize)> {
        match self {
            HarmonicFunction::ClosedForm(_) => Vec::new(),
            HarmonicFunction::Charges(c) => c.poles(),
            HarmonicFunction::ChargeConjugate(c) => c.expansion.poles(),
            HarmonicFunction::PathConjugate(p) => p.base().poles(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarmonicFunction::ClosedForm(_) => "closed-form",
            HarmonicFunction::Charges(_) => "charge-expansion",
            HarmonicFunction::ChargeConjugate(_) => "charge-conjugate",
            HarmonicFunction::PathConjugate(_) => "path-conjugate",
        }
    }

    /// Values at many points; evaluation is pure so the batch runs in parallel.
    pub fn values(&self, points: &[Cplx<T>]) -> Result<Vec<T>> {
        points.par_iter().map(|&z| self.value(z)).collect()
    }

    pub fn gradients(&self, points: &[Cplx<T>]) -> Result<Vec<Vec2<T>>> {
        points.par_iter().map(|&z| self.gradient(z)).collect()
    }
}

impl<T: Real> Harmonic<T> for HarmonicFunction<T> {
    fn value(&self, z: Cplx<T>) -> Result<T> {
        match self {
            HarmonicFunction::ClosedForm(f) => f.value(z),
            HarmonicFunction::Charges(f) => f.value(z),
            HarmonicFunction::ChargeConjugate(f) => f.value(z),
            HarmonicFunction::PathConjugate(f) => f.value(z),
        }
    }

    fn gradient(&self, z: Cplx<T>) -> Result<Vec2<T>> {
        match self {
            HarmonicFunction::ClosedForm(f) => f.gradient(z),
            HarmonicFunction::Charges(f) => f.gradient(z),
            HarmonicFunction::ChargeConjugate(f) => f.gradient(z),
            HarmonicFunction::PathConjugate(f) => f.gradient(z),
        }
    }

    fn complex_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        match self {
            HarmonicFunction::ClosedForm(f) => f.complex_derivative(z),
            HarmonicFunction::Charges(f) => f.complex_derivative(z),
            HarmonicFunction::ChargeConjugate(f) => f.complex_derivative(z),
            HarmonicFunction::PathConjugate(f) => f.complex_derivative(z),
        }
    }

    fn increment(&self, z: Cplx<T>, dz: Cplx<T>) -> Result<T> {
        match self {
            HarmonicFunction::Charges(f) => f.increment(z, dz),
            _ => Ok(self.value(z + dz)? - self.value(z)?),
        }
    }

    fn complex_second_derivative(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        match self {
            HarmonicFunction::ClosedForm(f) => f.complex_second_derivative(z),
            HarmonicFunction::Charges(f) => f.complex_second_derivative(z),
            HarmonicFunction::ChargeConjugate(f) => f.complex_second_derivative(z),
            HarmonicFunction::PathConjugate(f) => f.complex_second_derivative(z),
        }
    }
}

/// Value of `h` at `z`.
pub fn eval<T: Real>(h: &HarmonicFunction<T>, z: Cplx<T>) -> Result<T> {
    h.value(z)
}

/// Exact gradient of `h` at `z`.
pub fn eval_grad<T: Real>(h: &HarmonicFunction<T>, z: Cplx<T>) -> Result<Vec2<T>> {
    h.gradient(z)
}
