//! Symmetric eigendecomposition by cyclic Jacobi rotations and the
//! quadrature-orthonormal spectral basis built from it.

use super::{check_same_grid, Grid, GridFunction};
use crate::{Error, Result};
use std::sync::Arc;

/// Minimal dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must form a square"));
        }
        Ok(DenseMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] = v;
    }

    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in (r + 1)..self.n {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `y = A x` into a fresh vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for r in 0..self.n {
            let row = &self.data[r * self.n..(r + 1) * self.n];
            let mut acc = 0.0;
            for c in 0..self.n {
                acc += row[c] * x[c];
            }
            y[r] = acc;
        }
        y
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns unsorted eigenvalues and the matrix whose columns are the matching
/// orthonormal eigenvectors. Follows the classic threshold strategy: sweeps
/// sacrifice the smallest off-diagonal entries first, converging when the
/// off-diagonal sum underflows to zero.
pub fn jacobi_eigh(matrix: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = matrix.n();
    let mut a = matrix.clone();
    let mut v = DenseMatrix::identity(n);
    let mut d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off == 0.0 {
            return Ok((d, v));
        }
        let tresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a.set(p, q, 0.0);
                    continue;
                }
                if apq.abs() <= tresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a.set(p, q, 0.0);
                let rotate = |m: &mut DenseMatrix, i: usize, j: usize, k: usize, l: usize| {
                    let g = m.get(i, j);
                    let h = m.get(k, l);
                    m.set(i, j, g - s * (h + g * tau));
                    m.set(k, l, h + s * (g - h * tau));
                };
                for j in 0..p {
                    rotate(&mut a, j, p, j, q);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p, j, j, q);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q);
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
    )))
}

/// Truncated spectral data of a covariance operator: non-increasing
/// eigenvalues with eigenfunctions orthonormal under the quadrature inner
/// product. Eigenfunctions are shared behind an `Arc` so that measures with
/// the same modes but different spectra stay cheaply comparable.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    grid: Arc<Grid>,
    eigenvalues: Vec<f64>,
    funcs: Arc<Vec<Vec<f64>>>,
    clamped: usize,
}

impl SpectralBasis {
    pub fn new(grid: &Arc<Grid>, eigenvalues: Vec<f64>, funcs: Vec<Vec<f64>>) -> Result<Self> {
        if eigenvalues.len() != funcs.len() {
            return Err(Error::invalid(
                "eigenvalue and eigenfunction counts differ",
            ));
        }
        if eigenvalues.is_empty() {
            return Err(Error::invalid("spectral basis needs at least one mode"));
        }
        if funcs.iter().any(|f| f.len() != grid.n()) {
            return Err(Error::invalid("eigenfunction length does not match grid"));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("eigenvalues must be non-increasing"));
        }
        if eigenvalues.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite and >= 0"));
        }
        Ok(SpectralBasis {
            grid: Arc::clone(grid),
            eigenvalues,
            funcs: Arc::new(funcs),
            clamped: 0,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Truncation order `K`.
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn func_values(&self, i: usize) -> &[f64] {
        &self.funcs[i]
    }

    pub fn eigenfunction(&self, i: usize) -> GridFunction {
        GridFunction::from_values_unchecked(&self.grid, self.funcs[i].clone())
    }

    /// Number of eigenvalues clamped to zero during decomposition.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Same eigenfunctions, different spectrum. The replacement must also be
    /// non-increasing and nonnegative.
    pub fn with_eigenvalues(&self, eigenvalues: Vec<f64>) -> Result<SpectralBasis> {
        if eigenvalues.len() != self.k() {
            return Err(Error::invalid("replacement spectrum has wrong length"));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("eigenvalues must be non-increasing"));
        }
        if eigenvalues.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite and >= 0"));
        }
        Ok(SpectralBasis {
            grid: Arc::clone(&self.grid),
            eigenvalues,
            funcs: Arc::clone(&self.funcs),
            clamped: 0,
        })
    }

    /// Whether two bases share the same eigenfunctions (used by the Gaussian
    /// oracle and the score machinery, which condition mode by mode).
    pub fn shares_eigenfunctions(&self, other: &SpectralBasis) -> bool {
        Arc::ptr_eq(&self.funcs, &other.funcs)
            || (self.grid == other.grid && *self.funcs == *other.funcs)
    }
}

/// Solves the weighted covariance eigenproblem and returns the top-`k`
/// eigenpairs, sorted by descending eigenvalue.
///
/// The continuous operator `(Kf)(s) = int k(s,t) f(t) dt` discretizes to
/// `K W` with `W = diag(weights)`; symmetrizing as `B = W^(1/2) K W^(1/2)`
/// makes the `l2`-orthonormal Jacobi eigenvectors `u_i` map back to
/// quadrature-orthonormal eigenfunctions `e_i = W^(-1/2) u_i`. Negative
/// eigenvalues (roundoff on indefinite kernels) clamp to zero; the count is
/// recorded on the returned basis.
pub fn eigendecompose(matrix: &DenseMatrix, grid: &Arc<Grid>, k: usize) -> Result<SpectralBasis> {
    let n = grid.n();
    if matrix.n() != n {
        return Err(Error::GridMismatch(format!(
            "matrix order {} does not match grid n={n}",
            matrix.n()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "truncation must satisfy 1 <= K <= n, got K={k}, n={n}"
        )));
    }
    let tol = 1e-10 * matrix.max_abs().max(1.0);
    let asym = matrix.max_asymmetry();
    if asym > tol {
        return Err(Error::invalid(format!(
            "matrix asymmetry {asym:.3e} exceeds tolerance {tol:.3e}"
        )));
    }

    let w = grid.weights();
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut b = DenseMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            b.set(r, c, sqrt_w[r] * matrix.get(r, c) * sqrt_w[c]);
        }
    }
    // Symmetrize exactly: roundoff in the scaling can break the Jacobi
    // rotations' symmetric invariant.
    for r in 0..n {
        for c in (r + 1)..n {
            let m = 0.5 * (b.get(r, c) + b.get(c, r));
            b.set(r, c, m);
            b.set(c, r, m);
        }
    }

    let (vals, vecs) = jacobi_eigh(&b)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());

    let mut eigenvalues = Vec::with_capacity(k);
    let mut funcs = Vec::with_capacity(k);
    let mut clamped = 0;
    for &idx in order.iter().take(k) {
        let lam = vals[idx];
        if lam < 0.0 {
            clamped += 1;
        }
        eigenvalues.push(lam.max(0.0));
        let mut e = vec![0.0; n];
        for r in 0..n {
            e[r] = vecs.get(r, idx) / sqrt_w[r];
        }
        funcs.push(e);
    }
    let mut basis = SpectralBasis::new(grid, eigenvalues, funcs)?;
    basis.clamped = clamped;
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{inner_product, make_uniform_grid};

    #[test]
    fn identity_matrix_spectrum() {
        let g = make_uniform_grid(6, 0.0, 1.0).unwrap();
        let m = DenseMatrix::identity(6);
        let basis = eigendecompose(&m, &g, 6).unwrap();
        for i in 0..6 {
            assert!((basis.eigenvalue(i) - 1.0).abs() < 1e-12);
        }
        for i in 0..6 {
            for j in 0..6 {
                let ip = inner_product(&basis.eigenfunction(i), &basis.eigenfunction(j)).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "gram[{i}{j}] = {ip}");
            }
        }
    }

    #[test]
    fn rank_one_matrix() {
        let g = make_uniform_grid(5, 0.0, 1.0).unwrap();
        let u = [1.0, -2.0, 0.5, 3.0, -1.0];
        let mut m = DenseMatrix::zeros(5);
        for r in 0..5 {
            for c in 0..5 {
                m.set(r, c, u[r] * u[c]);
            }
        }
        let basis = eigendecompose(&m, &g, 5).unwrap();
        // weighted operator K W has single nonzero eigenvalue sum_i w_i u_i^2
        let expect: f64 = g
            .weights()
            .iter()
            .zip(u.iter())
            .map(|(w, x)| w * x * x)
            .sum();
        assert!((basis.eigenvalue(0) - expect).abs() < 1e-10);
        for i in 1..5 {
            assert!(basis.eigenvalue(i) <= 1e-10, "lambda_{i} = {}", basis.eigenvalue(i));
        }
    }

    #[test]
    fn full_truncation_reconstructs_kernel() {
        let g = make_uniform_grid(12, 0.0, 1.0).unwrap();
        let m = crate::hilbert::kernel_matrix(
            crate::hilbert::KernelKind::MaternHalf,
            &crate::hilbert::KernelParams::new(1.0, 0.5, 0.0),
            &g,
        )
        .unwrap();
        let basis = eigendecompose(&m, &g, 12).unwrap();
        for s in 0..12 {
            for t in 0..12 {
                let mut rec = 0.0;
                for i in 0..12 {
                    rec += basis.eigenvalue(i) * basis.func_values(i)[s] * basis.func_values(i)[t];
                }
                assert!(
                    (rec - m.get(s, t)).abs() < 1e-6,
                    "entry ({s},{t}): {rec} vs {}",
                    m.get(s, t)
                );
            }
        }
    }

    #[test]
    fn eigen_residuals_small() {
        let g = make_uniform_grid(16, 0.0, 1.0).unwrap();
        let m = crate::hilbert::kernel_matrix(
            crate::hilbert::KernelKind::Rbf,
            &crate::hilbert::KernelParams::new(2.0, 0.3, 0.0),
            &g,
        )
        .unwrap();
        let basis = eigendecompose(&m, &g, 16).unwrap();
        // residual of the weighted operator K W acting on eigenfunctions
        let scale = basis.eigenvalue(0);
        for i in 0..16 {
            let e = basis.func_values(i);
            let we: Vec<f64> = (0..16).map(|j| g.weights()[j] * e[j]).collect();
            let ke = m.matvec(&we);
            let mut resid2 = 0.0;
            for j in 0..16 {
                let r = ke[j] - basis.eigenvalue(i) * e[j];
                resid2 += g.weights()[j] * r * r;
            }
            assert!(
                resid2.sqrt() <= 1e-8 * scale,
                "mode {i} residual {}",
                resid2.sqrt()
            );
        }
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let g = make_uniform_grid(3, 0.0, 1.0).unwrap();
        let mut m = DenseMatrix::identity(3);
        m.set(0, 1, 0.5);
        assert!(eigendecompose(&m, &g, 3).is_err());
    }

    #[test]
    fn with_eigenvalues_shares_functions() {
        let g = make_uniform_grid(8, 0.0, 1.0).unwrap();
        let m = DenseMatrix::identity(8);
        let basis = eigendecompose(&m, &g, 4).unwrap();
        let other = basis.with_eigenvalues(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        assert!(basis.shares_eigenfunctions(&other));
        assert_eq!(other.eigenvalue(0), 4.0);
        assert!(basis.with_eigenvalues(vec![1.0, 2.0, 3.0, 4.0]).is_err());
    }
}
