//! Small dense linear algebra: row-major matrices, Cholesky, and a cyclic
//! Jacobi eigensolver for the generalized symmetric problem.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `self · x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ · y`
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Gram matrix `AᵀA · scale` of `self = A`, computed from the transposed
    /// layout so that every entry is a contiguous dot product.
    pub fn gram(&self, scale: f64) -> Matrix {
        let at = self.transpose();
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        const BLOCK: usize = 8;
        let mut i0 = 0;
        while i0 < n {
            let i1 = (i0 + BLOCK).min(n);
            for j in i0..n {
                let bj = at.row(j);
                for i in i0..i1.min(j + 1) {
                    let v = dot(at.row(i), bj) * scale;
                    g.data[i * n + j] = v;
                    g.data[j * n + i] = v;
                }
            }
            i0 = i1;
        }
        g
    }
}

/// Dot product with four independent accumulators so it vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.rows;
        if a.cols != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.cols,
            });
        }
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let lj = &l.data[j * n..j * n + j];
            let d = a.get(j, j) - dot(lj, lj);
            if d.is_nan() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = libm::sqrt(d);
            l.data[j * n + j] = djj;
            for i in (j + 1)..n {
                let (head, tail) = l.data.split_at_mut(i * n);
                let li = &tail[..j];
                let lj = &head[j * n..j * n + j];
                let v = (a.get(i, j) - dot(li, lj)) / djj;
                tail[j] = v;
            }
        }
        Ok(Self { l })
    }

    pub fn lower(&self) -> &Matrix {
        &self.l
    }

    /// Solves `L y = b` in place.
    pub fn forward_sub(&self, b: &mut [f64]) {
        let n = self.l.rows;
        for i in 0..n {
            let row = self.l.row(i);
            let s = dot(&row[..i], &b[..i]);
            b[i] = (b[i] - s) / row[i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_sub(&self, y: &mut [f64]) {
        let n = self.l.rows;
        for i in (0..n).rev() {
            y[i] /= self.l.get(i, i);
            let yi = y[i];
            let row = self.l.row(i);
            for k in 0..i {
                y[k] -= row[k] * yi;
            }
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward_sub(&mut x);
        self.backward_sub(&mut x);
        x
    }
}

/// Eigenvalues (ascending) and column eigenvectors of a symmetric matrix by
/// cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    const MAX_SWEEPS: usize = 100;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m.get(i, i) * m.get(i, i);
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        if off <= 1e-30 * diag || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNonConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs.set(k, new, v.get(k, old));
        }
    }
    Ok((values, vecs))
}

/// Ascending eigenvalues μ of `A c = μ B c` for symmetric `A` and symmetric
/// positive definite `B`, via `C = L⁻¹ A L⁻ᵀ` with `B = L Lᵀ`.
pub fn generalized_symmetric_eigenvalues(a: &Matrix, b: &Matrix) -> Result<Vec<f64>> {
    let n = a.rows;
    let chol = Cholesky::factor(b)?;
    // W = L⁻¹ A, column by column of A (A symmetric so rows work too)
    let mut w = Matrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            col[i] = a.get(i, j);
        }
        chol.forward_sub(&mut col);
        for i in 0..n {
            w.set(i, j, col[i]);
        }
    }
    // C = L⁻¹ Wᵀ = L⁻¹ A L⁻ᵀ
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            col[i] = w.get(j, i);
        }
        chol.forward_sub(&mut col);
        for i in 0..n {
            c.set(i, j, col[i]);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (c.get(i, j) + c.get(j, i));
            c.set(i, j, s);
            c.set(j, i, s);
        }
    }
    symmetric_eigen(&c).map(|(vals, _)| vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Matrix {
        // Hilbert-like plus diagonal shift
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, 1.0 / (i + j + 1) as f64);
            }
            a.set(i, i, a.get(i, i) + 1.0);
        }
        a
    }

    #[test]
    fn cholesky_solves() {
        let a = spd(12);
        let x: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let b = a.mul_vec(&x);
        let sol = Cholesky::factor(&a).unwrap().solve(&b);
        for (u, v) in sol.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(Cholesky::factor(&a), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn gram_matches_naive() {
        let a = Matrix::from_row_major(5, 3, (0..15).map(|i| (i as f64 * 0.7).cos()).collect()).unwrap();
        let g = a.gram(0.5);
        for i in 0..3 {
            for j in 0..3 {
                let naive: f64 = (0..5).map(|r| a.get(r, i) * a.get(r, j)).sum::<f64>() * 0.5;
                assert!((g.get(i, j) - naive).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = spd(8);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        for k in 0..8 {
            let v: Vec<f64> = (0..8).map(|i| vecs.get(i, k)).collect();
            let av = a.mul_vec(&v);
            for i in 0..8 {
                assert!((av[i] - vals[k] * v[i]).abs() < 1e-12);
            }
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn generalized_diagonal_case() {
        let a = Matrix::from_row_major(3, 3, vec![2.0, 0.0, 0.0, 0.0, 9.0, 0.0, 0.0, 0.0, 4.0]).unwrap();
        let b = Matrix::from_row_major(3, 3, vec![1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let mu = generalized_symmetric_eigenvalues(&a, &b).unwrap();
        let expect = [2.0, 3.0, 8.0];
        for (m, e) in mu.iter().zip(expect) {
            assert!((m - e).abs() < 1e-12);
        }
    }
}
