//! Covariance kernels evaluated on a grid.

use super::{DenseMatrix, Grid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Matern-1/2 (exponential): `k(s,t) = sigma2 * exp(-|s-t| / ell)`.
    MaternHalf,
    /// Squared exponential: `k(s,t) = sigma2 * exp(-(s-t)^2 / (2 ell^2))`.
    Rbf,
    /// Matern-1/2 plus a white-noise nugget on the diagonal.
    WhitePlusMatern,
}

impl KernelKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "matern_half" => Ok(KernelKind::MaternHalf),
            "rbf" => Ok(KernelKind::Rbf),
            "white_plus_matern" => Ok(KernelKind::WhitePlusMatern),
            other => Err(Error::invalid(format!("unknown kernel kind '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::MaternHalf => "matern_half",
            KernelKind::Rbf => "rbf",
            KernelKind::WhitePlusMatern => "white_plus_matern",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KernelParams {
    /// Marginal variance `sigma2`.
    pub variance: f64,
    /// Length scale `ell`.
    pub length_scale: f64,
    /// Diagonal nugget added as `nugget * delta_st`.
    pub nugget: f64,
}

impl KernelParams {
    pub fn new(variance: f64, length_scale: f64, nugget: f64) -> Self {
        KernelParams {
            variance,
            length_scale,
            nugget,
        }
    }
}

/// Dense symmetric kernel matrix `K_st = k(p_s, p_t) + nugget * delta_st`.
pub fn kernel_matrix(kind: KernelKind, params: &KernelParams, grid: &Grid) -> Result<DenseMatrix> {
    if !(params.variance > 0.0) {
        return Err(Error::invalid(format!(
            "kernel variance must be positive, got {}",
            params.variance
        )));
    }
    if !(params.length_scale > 0.0) {
        return Err(Error::invalid(format!(
            "kernel length scale must be positive, got {}",
            params.length_scale
        )));
    }
    if !(params.nugget >= 0.0) {
        return Err(Error::invalid(format!(
            "kernel nugget must be nonnegative, got {}",
            params.nugget
        )));
    }
    let n = grid.n();
    let nodes = grid.nodes();
    let mut m = DenseMatrix::zeros(n);
    for s in 0..n {
        for t in s..n {
            let d = (nodes[s] - nodes[t]).abs();
            let v = match kind {
                KernelKind::MaternHalf | KernelKind::WhitePlusMatern => {
                    params.variance * (-d / params.length_scale).exp()
                }
                KernelKind::Rbf => {
                    params.variance
                        * (-d * d / (2.0 * params.length_scale * params.length_scale)).exp()
                }
            };
            m.set(s, t, v);
            m.set(t, s, v);
        }
        let dg = m.get(s, s) + params.nugget;
        m.set(s, s, dg);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::make_uniform_grid;

    #[test]
    fn matern_half_value() {
        let g = make_uniform_grid(3, 0.0, 1.0).unwrap();
        let m = kernel_matrix(
            KernelKind::MaternHalf,
            &KernelParams::new(1.0, 0.5, 0.0),
            &g,
        )
        .unwrap();
        // nodes 0 and 0.5 are distance 0.5 apart: exp(-1)
        assert!((m.get(0, 1) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((m.get(0, 1) - 0.367_879_441_171_442_33).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_variance_plus_nugget() {
        let g = make_uniform_grid(5, 0.0, 1.0).unwrap();
        for kind in [
            KernelKind::MaternHalf,
            KernelKind::Rbf,
            KernelKind::WhitePlusMatern,
        ] {
            let m = kernel_matrix(kind, &KernelParams::new(2.5, 0.3, 0.0), &g).unwrap();
            for s in 0..5 {
                assert!((m.get(s, s) - 2.5).abs() < 1e-15);
            }
            let m = kernel_matrix(kind, &KernelParams::new(2.5, 0.3, 0.1), &g).unwrap();
            assert!((m.get(2, 2) - 2.6).abs() < 1e-15);
            assert!(m.max_asymmetry() == 0.0);
        }
    }

    #[test]
    fn rbf_value() {
        let g = make_uniform_grid(2, 0.0, 1.0).unwrap();
        let m = kernel_matrix(KernelKind::Rbf, &KernelParams::new(1.0, 1.0, 0.0), &g).unwrap();
        assert!((m.get(0, 1) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((m.get(0, 1) - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_hyperparameters() {
        let g = make_uniform_grid(3, 0.0, 1.0).unwrap();
        assert!(kernel_matrix(KernelKind::Rbf, &KernelParams::new(0.0, 1.0, 0.0), &g).is_err());
        assert!(kernel_matrix(KernelKind::Rbf, &KernelParams::new(1.0, -1.0, 0.0), &g).is_err());
        assert!(kernel_matrix(KernelKind::Rbf, &KernelParams::new(1.0, 1.0, -0.1), &g).is_err());
    }
}
