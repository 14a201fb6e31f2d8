//! Gaussian measures and Karhunen-Loeve sampling.

use super::{check_same_grid, GridFunction, SampleSet, SpectralBasis};
use crate::rng::DetRng;
use crate::{Error, Result};
use std::sync::Arc;

/// Gaussian measure `N(m, kappa * Q)` with `Q` given spectrally by `basis`.
#[derive(Debug, Clone)]
pub struct GaussianMeasure {
    mean: GridFunction,
    basis: Arc<SpectralBasis>,
    scale: f64,
}

impl GaussianMeasure {
    pub fn new(mean: GridFunction, basis: &Arc<SpectralBasis>, scale: f64) -> Result<Self> {
        check_same_grid(mean.grid(), basis.grid(), "gaussian measure")?;
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(Error::invalid(format!(
                "covariance scale must be finite and >= 0, got {scale}"
            )));
        }
        Ok(GaussianMeasure {
            mean,
            basis: Arc::clone(basis),
            scale,
        })
    }

    /// Centered measure with unit scale.
    pub fn centered(basis: &Arc<SpectralBasis>) -> Self {
        GaussianMeasure {
            mean: GridFunction::zero(basis.grid()),
            basis: Arc::clone(basis),
            scale: 1.0,
        }
    }

    pub fn mean(&self) -> &GridFunction {
        &self.mean
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Per-mode variance `kappa * lambda_i`.
    pub fn mode_variance(&self, i: usize) -> f64 {
        self.scale * self.basis.eigenvalue(i)
    }

    pub fn mode_variances(&self) -> Vec<f64> {
        (0..self.basis.k()).map(|i| self.mode_variance(i)).collect()
    }

    /// All per-mode variances strictly positive (required by score and
    /// oracle conditioning).
    pub fn strictly_positive(&self) -> bool {
        self.scale > 0.0 && self.basis.eigenvalues().iter().all(|&l| l > 0.0)
    }

    fn draw(&self, rng: &mut DetRng) -> GridFunction {
        let k = self.basis.k();
        let n = self.basis.grid().n();
        let mut values = self.mean.values().to_vec();
        for i in 0..k {
            let amp = (self.scale * self.basis.eigenvalue(i)).sqrt() * rng.normal();
            if amp == 0.0 {
                continue;
            }
            let e = self.basis.func_values(i);
            for j in 0..n {
                values[j] += amp * e[j];
            }
        }
        GridFunction::from_values_unchecked(self.basis.grid(), values)
    }
}

/// Karhunen-Loeve sampling: `x = m + sum_i sqrt(kappa lambda_i) xi_i e_i`.
///
/// Sample `s` is drawn from the substream `(base, s)` where `base` is pulled
/// once from `rng`, so each item is independent of `count` and a worker pool
/// produces byte-identical output.
pub fn sample_gaussian(
    measure: &GaussianMeasure,
    count: usize,
    rng: &mut DetRng,
) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::invalid("sample count must be >= 1"));
    }
    let base = rng.split_seed();
    let items: Vec<GridFunction> = (0..count)
        .map(|s| measure.draw(&mut DetRng::stream(base, s as u64)))
        .collect();
    SampleSet::new(measure.basis().grid(), items, "gaussian", base)
}

/// Worker-pool variant of [`sample_gaussian`]; identical output for any
/// `workers >= 1`.
pub fn sample_gaussian_par(
    measure: &GaussianMeasure,
    count: usize,
    rng: &mut DetRng,
    workers: usize,
) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::invalid("sample count must be >= 1"));
    }
    let base = rng.split_seed();
    let items = crate::stats::parallel_map_indexed(count, workers, |s| {
        measure.draw(&mut DetRng::stream(base, s as u64))
    });
    SampleSet::new(measure.basis().grid(), items, "gaussian", base)
}

/// Synthetic dataset families used by the command-line pipeline.
#[derive(Debug, Clone)]
pub enum SyntheticKind {
    /// Samples of one Gaussian measure.
    Gp { measure: GaussianMeasure },
    /// Equal-weight mixture of two Gaussian measures on one grid.
    GpMixture {
        first: GaussianMeasure,
        second: GaussianMeasure,
    },
    /// `a * sin(2 pi f x + phi)` with independent uniform draws per sample.
    RandomSines {
        amplitude: (f64, f64),
        frequency: (f64, f64),
        phase: (f64, f64),
    },
}

pub fn make_synthetic_dataset(
    kind: &SyntheticKind,
    grid: &Arc<super::Grid>,
    count: usize,
    rng: &mut DetRng,
) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::invalid("sample count must be >= 1"));
    }
    match kind {
        SyntheticKind::Gp { measure } => {
            check_same_grid(grid, measure.basis().grid(), "synthetic gp")?;
            let mut set = sample_gaussian(measure, count, rng)?;
            set.kind = "gp".to_string();
            Ok(set)
        }
        SyntheticKind::GpMixture { first, second } => {
            check_same_grid(grid, first.basis().grid(), "synthetic mixture")?;
            check_same_grid(grid, second.basis().grid(), "synthetic mixture")?;
            let base = rng.split_seed();
            let items: Vec<GridFunction> = (0..count)
                .map(|s| {
                    let mut sub = DetRng::stream(base, s as u64);
                    let pick_second = sub.uniform() < 0.5;
                    if pick_second {
                        second.draw(&mut sub)
                    } else {
                        first.draw(&mut sub)
                    }
                })
                .collect();
            SampleSet::new(grid, items, "gp_mixture", base)
        }
        SyntheticKind::RandomSines {
            amplitude,
            frequency,
            phase,
        } => {
            for (lo, hi, name) in [
                (amplitude.0, amplitude.1, "amplitude"),
                (frequency.0, frequency.1, "frequency"),
                (phase.0, phase.1, "phase"),
            ] {
                if !(lo <= hi) {
                    return Err(Error::invalid(format!("bad {name} range [{lo}, {hi}]")));
                }
            }
            let base = rng.split_seed();
            let items: Vec<GridFunction> = (0..count)
                .map(|s| {
                    let mut sub = DetRng::stream(base, s as u64);
                    let a = sub.uniform_in(amplitude.0, amplitude.1);
                    let f = sub.uniform_in(frequency.0, frequency.1);
                    let phi = sub.uniform_in(phase.0, phase.1);
                    GridFunction::from_fn(grid, |x| {
                        a * (std::f64::consts::TAU * f * x + phi).sin()
                    })
                })
                .collect();
            SampleSet::new(grid, items, "random_sines", base)
        }
    }
}
