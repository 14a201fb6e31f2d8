//! Discretized separable-Hilbert-space numerics.
//!
//! A [`Grid`] is a uniform partition of `[a, b]` with trapezoid quadrature
//! weights; a [`GridFunction`] is an element of the discretized `L2` space; a
//! [`SpectralBasis`] holds truncated covariance eigenpairs orthonormal under
//! the quadrature inner product; a [`GaussianMeasure`] is sampled by
//! Karhunen-Loeve expansion.

mod eigen;
mod gaussian;
mod io;
mod kernels;

pub use eigen::{eigendecompose, jacobi_eigh, DenseMatrix, SpectralBasis};
pub use gaussian::{
    make_synthetic_dataset, sample_gaussian, sample_gaussian_par, GaussianMeasure, SyntheticKind,
};
pub use io::{read_basis_csv, read_sample_set_csv, write_basis_csv, write_sample_set_csv};
pub use kernels::{kernel_matrix, KernelKind, KernelParams};

use crate::{Error, Result};
use std::sync::Arc;

/// Uniform grid on `[a, b]` with trapezoid quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature inner product of two value slices (lengths unchecked).
    pub fn dot(&self, f: &[f64], g: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += self.weights[i] * f[i] * g[i];
        }
        acc
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.dot(f, f).sqrt()
    }
}

/// Builds the uniform grid with nodes `a + i*(b-a)/(n-1)` and trapezoid
/// weights `h*[1/2, 1, ..., 1, 1/2]`.
pub fn make_uniform_grid(n: usize, a: f64, b: f64) -> Result<Arc<Grid>> {
    if n < 2 {
        return Err(Error::invalid(format!("grid needs n >= 2, got {n}")));
    }
    if !(a < b) {
        return Err(Error::invalid(format!("grid needs a < b, got [{a}, {b}]")));
    }
    let h = (b - a) / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
    let mut weights = vec![h; n];
    weights[0] = h / 2.0;
    weights[n - 1] = h / 2.0;
    Ok(Arc::new(Grid {
        n,
        a,
        b,
        nodes,
        weights,
    }))
}

pub(crate) fn check_same_grid(a: &Grid, b: &Grid, what: &str) -> Result<()> {
    if std::ptr::eq(a, b) || (a.n == b.n && a.a == b.a && a.b == b.b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "{what}: [{}, {}] n={} vs [{}, {}] n={}",
            a.a, a.b, a.n, b.a, b.b, b.n
        )))
    }
}

/// A function in `L2([a, b])` given by its values at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid n={}",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid function values must be finite"));
        }
        Ok(GridFunction {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.n()],
        }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            values: vec![c; grid.n()],
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&p| f(p)).collect();
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Construction without the finiteness scan, for hot internal paths that
    /// check state separately (e.g. the ODE stepper).
    pub(crate) fn from_values_unchecked(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.grid.norm(&self.values)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip(other, |a, b| a - b)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        self.zip(other, |a, b| a + c * b)
    }

    fn zip(&self, other: &GridFunction, op: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        check_same_grid(&self.grid, &other.grid, "grid function arithmetic")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    pub fn dist(&self, other: &GridFunction) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }
}

/// Quadrature inner product `sum_i w_i f_i g_i`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    check_same_grid(f.grid(), g.grid(), "inner product")?;
    Ok(f.grid().dot(f.values(), g.values()))
}

/// Coefficients `<f, e_i>` in the basis.
pub fn project(f: &GridFunction, basis: &SpectralBasis) -> Result<Vec<f64>> {
    check_same_grid(f.grid(), basis.grid(), "projection")?;
    let grid = f.grid();
    Ok((0..basis.k())
        .map(|i| grid.dot(f.values(), basis.func_values(i)))
        .collect())
}

/// `sum_i c_i e_i` as a grid function.
pub fn reconstruct(coeffs: &[f64], basis: &SpectralBasis) -> Result<GridFunction> {
    if coeffs.len() != basis.k() {
        return Err(Error::invalid(format!(
            "coefficient count {} does not match basis truncation {}",
            coeffs.len(),
            basis.k()
        )));
    }
    let n = basis.grid().n();
    let mut values = vec![0.0; n];
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let e = basis.func_values(i);
        for j in 0..n {
            values[j] += c * e[j];
        }
    }
    Ok(GridFunction {
        grid: Arc::clone(basis.grid()),
        values,
    })
}

/// Paired or unpaired empirical collection of grid functions.
#[derive(Debug, Clone)]
pub struct SampleSet {
    grid: Arc<Grid>,
    items: Vec<GridFunction>,
    kind: String,
    seed: u64,
}

impl SampleSet {
    pub fn new(
        grid: &Arc<Grid>,
        items: Vec<GridFunction>,
        kind: impl Into<String>,
        seed: u64,
    ) -> Result<Self> {
        for it in &items {
            check_same_grid(grid, it.grid(), "sample set")?;
        }
        Ok(SampleSet {
            grid: Arc::clone(grid),
            items,
            kind: kind.into(),
            seed,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, i: usize) -> &GridFunction {
        &self.items[i]
    }

    pub fn items(&self) -> &[GridFunction] {
        &self.items
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Pointwise empirical mean.
    pub fn empirical_mean(&self) -> GridFunction {
        let n = self.grid.n();
        let mut mean = vec![0.0; n];
        for it in &self.items {
            for j in 0..n {
                mean[j] += it.values()[j];
            }
        }
        let inv = 1.0 / self.items.len().max(1) as f64;
        for m in &mut mean {
            *m *= inv;
        }
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: mean,
        }
    }

    /// Entrywise empirical covariance matrix (biased, 1/N normalization).
    pub fn empirical_covariance(&self) -> DenseMatrix {
        let n = self.grid.n();
        let mean = self.empirical_mean();
        let mut cov = DenseMatrix::zeros(n);
        for it in &self.items {
            let v = it.values();
            for s in 0..n {
                let ds = v[s] - mean.values()[s];
                for t in s..n {
                    let add = ds * (v[t] - mean.values()[t]);
                    *cov.get_mut(s, t) += add;
                }
            }
        }
        let inv = 1.0 / self.items.len().max(1) as f64;
        for s in 0..n {
            for t in s..n {
                let v = cov.get(s, t) * inv;
                cov.set(s, t, v);
                cov.set(t, s, v);
            }
        }
        cov
    }

    /// Per-mode coefficients of every item: `out[j][i] = <x_j, e_i>`.
    pub fn project_all(&self, basis: &SpectralBasis) -> Result<Vec<Vec<f64>>> {
        self.items.iter().map(|it| project(it, basis)).collect()
    }

    /// Max-abs entrywise gap between the empirical covariance and the
    /// truncated spectral covariance of `measure`; the sampler-fidelity
    /// diagnostic.
    pub fn covariance_recovery_error(&self, measure: &GaussianMeasure) -> Result<f64> {
        check_same_grid(&self.grid, measure.basis().grid(), "covariance recovery")?;
        let emp = self.empirical_covariance();
        let n = self.grid.n();
        let basis = measure.basis();
        let kappa = measure.scale();
        let mut worst: f64 = 0.0;
        for s in 0..n {
            for t in s..n {
                let mut model = 0.0;
                for i in 0..basis.k() {
                    model += kappa
                        * basis.eigenvalue(i)
                        * basis.func_values(i)[s]
                        * basis.func_values(i)[t];
                }
                worst = worst.max((emp.get(s, t) - model).abs());
            }
        }
        Ok(worst)
    }
}
