//! Gauss-Legendre rules and adaptive integration.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
fn compute_rule(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

static GL8: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
static GL16: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
static GL32: OnceLock<Vec<(f64, f64)>> = OnceLock::new();

/// Gauss-Legendre rule with 8, 16 or 32 nodes.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    match n {
        8 => GL8.get_or_init(|| compute_rule(8)),
        16 => GL16.get_or_init(|| compute_rule(16)),
        32 => GL32.get_or_init(|| compute_rule(32)),
        _ => panic!("unsupported Gauss-Legendre order {n}"),
    }
}

/// Applies a fixed Gauss-Legendre rule to `f` on `[a, b]`.
pub fn fixed<T, V, F>(f: &F, a: T, b: T, n: usize) -> V
where
    T: Real,
    V: Copy + Add<Output = V> + Mul<T, Output = V> + Default,
    F: Fn(T) -> V,
{
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut acc = V::default();
    for &(x, w) in gauss_legendre(n) {
        acc = acc + f(mid + half * T::lit(x)) * (T::lit(w) * half);
    }
    acc
}

/// Adaptive bisection with a 16-point rule compared against its two halves.
/// The local tolerance halves with each split but never drops below
/// `tol / 8`, so integrable endpoint singularities still terminate.
/// Returns `None` when `max_depth` is exhausted before the tolerance is met.
pub fn adaptive<T, V, F, N>(f: &F, a: T, b: T, tol: T, max_depth: usize, norm: &N) -> Option<V>
where
    T: Real,
    V: Copy + Add<Output = V> + Sub<Output = V> + Mul<T, Output = V> + Default,
    F: Fn(T) -> V,
    N: Fn(V) -> T,
{
    let whole = fixed(f, a, b, 16);
    let floor = tol * T::lit(0.125);
    adaptive_rec(f, a, b, whole, tol, floor, max_depth, norm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<T, V, F, N>(
    f: &F,
    a: T,
    b: T,
    whole: V,
    tol: T,
    floor: T,
    depth: usize,
    norm: &N,
) -> Option<V>
where
    T: Real,
    V: Copy + Add<Output = V> + Sub<Output = V> + Mul<T, Output = V> + Default,
    F: Fn(T) -> V,
    N: Fn(V) -> T,
{
    let mid = (a + b) * T::lit(0.5);
    let left = fixed(f, a, mid, 16);
    let right = fixed(f, mid, b, 16);
    let refined = left + right;
    if norm(refined - whole) <= tol {
        return Some(refined);
    }
    if depth == 0 {
        return None;
    }
    let half_tol = (tol * T::lit(0.5)).max(floor);
    let l = adaptive_rec(f, a, mid, left, half_tol, floor, depth - 1, norm)?;
    let r = adaptive_rec(f, mid, b, right, half_tol, floor, depth - 1, norm)?;
    Some(l + r)
}

/// Adaptive integral of a real function.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T, max_depth: usize) -> Option<T> {
    adaptive(&f, a, b, tol, max_depth, &|v: T| v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in [8usize, 16, 32] {
            let deg = 2 * n - 1;
            let got: f64 = fixed(&|x: f64| x.powi(deg as i32 - 1), 0.0, 1.0, n);
            assert!((got - 1.0 / (deg as f64)).abs() < 1e-14, "n={n}");
            let wsum: f64 = gauss_legendre(n).iter().map(|p| p.1).sum();
            assert!((wsum - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let got = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 40).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_gives_up_on_nonintegrable() {
        assert!(integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 20).is_none());
    }
}
