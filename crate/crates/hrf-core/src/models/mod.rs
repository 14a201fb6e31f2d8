//! Velocity fields `v(t, x)`: trainable models and closed-form oracles.

mod checkpoint;
mod fourier;
mod mlp;
mod oracle;

pub use checkpoint::{load_checkpoint, save_checkpoint, AnyModel};
pub use fourier::FourierLayerModel;
pub use mlp::MlpSpectralModel;
pub use oracle::{median_heuristic_bandwidth, EmpiricalOracle, GaussianOracle};

use crate::hilbert::{Grid, GridFunction, SampleSet};
use crate::rng::DetRng;
use crate::{Error, Result};
use std::sync::Arc;

/// Anything that evaluates an expected-velocity field.
pub trait VelocityField: Send + Sync {
    fn grid(&self) -> &Arc<Grid>;

    fn evaluate(&self, t: f64, x: &GridFunction) -> Result<GridFunction>;

    /// True when the field can blow up at `t = 0` or `t = 1` (a vanishing
    /// conditional variance); integrators then clip to `[eps, 1 - eps]`.
    fn endpoint_degenerate(&self) -> bool {
        false
    }
}

/// Models with a flat parameter vector and reverse-mode gradients.
pub trait TrainableModel: VelocityField {
    fn param_count(&self) -> usize;

    fn params(&self) -> &[f64];

    fn params_mut(&mut self) -> &mut [f64];

    fn forward(&self, t: f64, x: &GridFunction) -> Result<GridFunction>;

    /// Gradient of `<upstream, forward(t, x)>` (quadrature inner product)
    /// with respect to every parameter.
    fn backward(&self, t: f64, x: &GridFunction, upstream: &GridFunction) -> Result<Vec<f64>> {
        let mut grad = vec![0.0; self.param_count()];
        self.backward_accumulate(t, x, upstream, 1.0, &mut grad)?;
        Ok(grad)
    }

    /// Adds `scale * d<upstream, forward(t,x)>/dparams` into `grad`.
    fn backward_accumulate(
        &self,
        t: f64,
        x: &GridFunction,
        upstream: &GridFunction,
        scale: f64,
        grad: &mut [f64],
    ) -> Result<()>;
}

/// Geometric-frequency time embedding: `[sin(2 pi 2^k t), cos(2 pi 2^k t)]`
/// interleaved for `k = 0 .. d_t/2 - 1`.
pub fn fourier_time_features(t: f64, d_t: usize) -> Result<Vec<f64>> {
    if d_t % 2 != 0 {
        return Err(Error::invalid(format!(
            "time feature dimension must be even, got {d_t}"
        )));
    }
    let mut out = Vec::with_capacity(d_t);
    for k in 0..d_t / 2 {
        let ang = std::f64::consts::TAU * (1u64 << k) as f64 * t;
        out.push(ang.sin());
        out.push(ang.cos());
    }
    Ok(out)
}

/// Empirical Lipschitz ratio `max ||v(t,x) - v(t,y)|| / ||x - y||` over
/// random sample pairs and the given times. Diagnostic for the Gronwall
/// well-posedness condition; coincident pairs are skipped.
pub fn lipschitz_estimate(
    field: &dyn VelocityField,
    samples: &SampleSet,
    t_grid: &[f64],
    pair_count: usize,
    rng: &mut DetRng,
) -> Result<f64> {
    if pair_count == 0 {
        return Err(Error::invalid("pair count must be >= 1"));
    }
    if samples.len() < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let mut worst: f64 = 0.0;
    for _ in 0..pair_count {
        let i = rng.index(samples.len());
        let j = rng.index(samples.len());
        let x = samples.item(i);
        let y = samples.item(j);
        let gap = x.dist(y)?;
        if gap < 1e-14 {
            continue;
        }
        for &t in t_grid {
            let vx = field.evaluate(t, x)?;
            let vy = field.evaluate(t, y)?;
            worst = worst.max(vx.dist(&vy)? / gap);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_uniform_grid, sample_gaussian, GaussianMeasure};

    struct ScaledIdentity {
        grid: Arc<Grid>,
        c: f64,
    }

    impl VelocityField for ScaledIdentity {
        fn grid(&self) -> &Arc<Grid> {
            &self.grid
        }
        fn evaluate(&self, _t: f64, x: &GridFunction) -> Result<GridFunction> {
            Ok(x.scale(self.c))
        }
    }

    #[test]
    fn time_features_examples() {
        let f = fourier_time_features(0.0, 8).unwrap();
        for k in 0..4 {
            assert_eq!(f[2 * k], 0.0);
            assert_eq!(f[2 * k + 1], 1.0);
        }
        let f = fourier_time_features(0.5, 2).unwrap();
        assert!(f[0].abs() < 1e-15); // sin(pi)
        assert!((f[1] + 1.0).abs() < 1e-15); // cos(pi)
        for i in 0..200 {
            let t = i as f64 / 199.0;
            for v in fourier_time_features(t, 12).unwrap() {
                assert!((-1.0..=1.0).contains(&v));
            }
        }
        assert!(fourier_time_features(0.1, 3).is_err());
    }

    #[test]
    fn lipschitz_of_linear_and_zero_fields() {
        let grid = make_uniform_grid(16, 0.0, 1.0).unwrap();
        let basis = Arc::new(
            crate::hilbert::eigendecompose(
                &crate::hilbert::DenseMatrix::identity(16),
                &grid,
                4,
            )
            .unwrap(),
        );
        let m = GaussianMeasure::centered(&basis);
        let samples = sample_gaussian(&m, 32, &mut DetRng::new(4)).unwrap();
        let ts = [0.0, 0.5, 1.0];

        let field = ScaledIdentity {
            grid: Arc::clone(&grid),
            c: -2.5,
        };
        let k = lipschitz_estimate(&field, &samples, &ts, 40, &mut DetRng::new(9)).unwrap();
        assert!((k - 2.5).abs() < 1e-10, "k = {k}");

        let zero = ScaledIdentity {
            grid: Arc::clone(&grid),
            c: 0.0,
        };
        let k = lipschitz_estimate(&zero, &samples, &ts, 40, &mut DetRng::new(9)).unwrap();
        assert_eq!(k, 0.0);
    }
}
