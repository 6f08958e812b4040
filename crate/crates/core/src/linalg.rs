//! Dense least squares by Householder QR followed by a one-sided Jacobi SVD
//! of the triangular factor, with relative truncation of small singular values.

use crate::scalar::Real;

/// Column-major dense matrix.
#[derive(Clone, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    pub fn columns_mut(&mut self) -> std::slice::ChunksMut<'_, T> {
        self.data.chunks_mut(self.rows.max(1))
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
        y
    }
}

/// Result of a truncated least-squares solve.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub solution: Vec<T>,
    /// Number of singular values kept.
    pub rank: usize,
    /// Singular values of the column-equilibrated matrix, descending.
    pub singular_values: Vec<T>,
}

impl<T: Real> LeastSquares<T> {
    /// Ratio of the largest to the smallest kept singular value.
    pub fn condition(&self) -> T {
        if self.rank == 0 {
            return T::infinity();
        }
        self.singular_values[0] / self.singular_values[self.rank - 1]
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Minimum-norm solution of `min |A x - b|` restricted to singular directions
/// with `sigma > rel_tol * sigma_max`. Columns are equilibrated first.
pub fn truncated_lstsq<T: Real>(a: &Matrix<T>, b: &[T], rel_tol: T) -> LeastSquares<T> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m, "right-hand side length");
    assert!(m >= n, "least squares needs at least as many rows as columns");

    let mut work = a.clone();
    let mut scale = vec![T::one(); n];
    for (j, s) in scale.iter_mut().enumerate() {
        let col = &mut work.data[j * m..(j + 1) * m];
        let norm = dot(col, col).sqrt();
        if norm > T::zero() {
            *s = norm;
            col.iter_mut().for_each(|v| *v /= norm);
        }
    }

    // Householder QR, applying the reflectors to the right-hand side as we go.
    let mut rhs = b.to_vec();
    for k in 0..n {
        let (head, tail) = work.data.split_at_mut((k + 1) * m);
        let colk = &mut head[k * m..];
        let alpha = dot(&colk[k..], &colk[k..]).sqrt();
        if alpha == T::zero() {
            continue;
        }
        let alpha = if colk[k] > T::zero() { -alpha } else { alpha };
        colk[k] -= alpha;
        let vnorm2 = dot(&colk[k..], &colk[k..]);
        if vnorm2 == T::zero() {
            colk[k] = alpha;
            continue;
        }
        let v = &colk[k..];
        for j in 0..(n - k - 1) {
            let cj = &mut tail[j * m + k..(j + 1) * m];
            let f = T::lit(2.0) * dot(v, cj) / vnorm2;
            cj.iter_mut().zip(v).for_each(|(c, &vi)| *c -= f * vi);
        }
        let f = T::lit(2.0) * dot(v, &rhs[k..]) / vnorm2;
        rhs[k..].iter_mut().zip(v).for_each(|(c, &vi)| *c -= f * vi);
        colk[k] = alpha;
    }

    // Upper-triangular factor, column-major n x n.
    let mut w = vec![T::zero(); n * n];
    for j in 0..n {
        for i in 0..=j {
            w[j * n + i] = work.data[j * m + i];
        }
    }
    let mut v = vec![T::zero(); n * n];
    for j in 0..n {
        v[j * n + j] = T::one();
    }
    jacobi_sweeps(&mut w, &mut v, n);

    let mut sigma: Vec<(T, usize)> = (0..n)
        .map(|j| (dot(&w[j * n..(j + 1) * n], &w[j * n..(j + 1) * n]).sqrt(), j))
        .collect();
    sigma.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let smax = sigma.first().map(|s| s.0).unwrap_or(T::zero());
    let cut = smax * rel_tol;

    let qtb = &rhs[..n];
    let mut x = vec![T::zero(); n];
    let mut rank = 0;
    for &(s, j) in &sigma {
        if s <= cut || s == T::zero() {
            break;
        }
        rank += 1;
        let uj = &w[j * n..(j + 1) * n];
        let coef = dot(uj, qtb) / (s * s);
        let vj = &v[j * n..(j + 1) * n];
        x.iter_mut().zip(vj).for_each(|(xi, &vi)| *xi += coef * vi);
    }
    x.iter_mut().zip(&scale).for_each(|(xi, &s)| *xi /= s);

    LeastSquares {
        solution: x,
        rank,
        singular_values: sigma.into_iter().map(|s| s.0).collect(),
    }
}

/// One-sided Jacobi: orthogonalizes the columns of `w` (n x n) and
/// accumulates the rotations in `v`.
fn jacobi_sweeps<T: Real>(w: &mut [T], v: &mut [T], n: usize) {
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = &w[p * n..(p + 1) * n];
                    let cq = &w[q * n..(q + 1) * n];
                    (dot(cp, cp), dot(cq, cq), dot(cp, cq))
                };
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_columns(w, n, p, q, c, s);
                rotate_columns(v, n, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate_columns<T: Real>(m: &mut [T], n: usize, p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = m.split_at_mut(q * n);
    let cp = &mut lo[p * n..(p + 1) * n];
    let cq = &mut hi[..n];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_overdetermined_consistent_system() {
        let a = Matrix::from_fn(6, 3, |i, j| ((i + 1) as f64).powi(j as i32));
        let x_true = [1.5, -2.0, 0.25];
        let b = a.mul_vec(&x_true);
        let ls = truncated_lstsq(&a, &b, 1e-14);
        assert_eq!(ls.rank, 3);
        for (x, t) in ls.solution.iter().zip(x_true) {
            assert!((x - t).abs() < 1e-10, "{x} vs {t}");
        }
    }

    #[test]
    fn truncation_returns_minimum_norm_solution() {
        // two identical columns: the minimum-norm solution splits the weight
        let a = Matrix::from_fn(4, 2, |i, _| (i + 1) as f64);
        let b: Vec<f64> = (1..=4).map(|i| 2.0 * i as f64).collect();
        let ls = truncated_lstsq(&a, &b, 1e-12);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[0] - 1.0).abs() < 1e-12);
        assert!((ls.solution[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_residual_is_orthogonal_to_range() {
        let a = Matrix::from_fn(8, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 + 0.1 * j as f64);
        let b: Vec<f64> = (0..8).map(|i| (i as f64).sin()).collect();
        let ls = truncated_lstsq(&a, &b, 1e-14);
        let r: Vec<f64> = a.mul_vec(&ls.solution).iter().zip(&b).map(|(p, q)| p - q).collect();
        for j in 0..3 {
            assert!(dot(a.col(j), &r).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = Matrix::<f64>::from_fn(3, 3, |i, j| if i == j { [3.0, 1.0, 2.0][i] } else { 0.0 });
        let ls = truncated_lstsq(&a, &[1.0, 1.0, 1.0], 1e-14);
        assert_eq!(ls.singular_values.len(), 3);
        // columns are equilibrated, so the spectrum is flat
        assert!(ls.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-14));
        assert!((ls.condition() - 1.0).abs() < 1e-12);
    }
}
