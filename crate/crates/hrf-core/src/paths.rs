//! Interpolation schedules `X_t = alpha_t X_1 + beta_t X_0` and their
//! velocities.
//!
//! Convention everywhere in this crate: `t = 0` is the noise end, `t = 1` the
//! data end. Schedules evaluate closed forms (no sampled tables), so
//! derivative checks see only genuine formula error.

use crate::hilbert::{check_same_grid, GridFunction};
use crate::pfode::SigmaSchedule;
use crate::{Error, Result};
use std::sync::Arc;

/// Clamp bound for the VP `beta_dot` endpoint singularity.
const VP_BETA_DOT_CAP: f64 = 1e6;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time schedule `(alpha_t, beta_t)` with derivatives.
#[derive(Clone)]
pub enum PathSchedule {
    /// `alpha = t`, `beta = 1 - t`.
    Linear,
    /// `alpha = t`, `beta = 1 - (1 - sigma_min) t`.
    Ot { sigma_min: f64 },
    /// `beta = sqrt(1 - alpha^2)` for a monotone C1 `alpha`.
    Vp { alpha: ScalarFn, alpha_dot: ScalarFn },
    /// `alpha_t = eta(1 - t)`, `beta_t = sqrt(kappa(1 - t))` induced by a
    /// variance-preserving sigma schedule (a VP instance).
    InducedPfode { sigma: SigmaSchedule },
}

impl std::fmt::Debug for PathSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PathSchedule::{}", self.name())
    }
}

/// The Eq.-style straight-line schedule.
pub fn linear_schedule() -> PathSchedule {
    PathSchedule::Linear
}

/// Optimal-transport schedule with terminal noise floor `sigma_min`.
pub fn ot_schedule(sigma_min: f64) -> Result<PathSchedule> {
    if !(sigma_min > 0.0 && sigma_min < 1.0) {
        return Err(Error::invalid(format!(
            "ot schedule needs sigma_min in (0, 1), got {sigma_min}"
        )));
    }
    Ok(PathSchedule::Ot { sigma_min })
}

/// Variance-preserving schedule from a monotone C1 map `alpha` with
/// `alpha(0) = 0`, `alpha(1) = 1`.
pub fn vp_schedule(
    alpha: impl Fn(f64) -> f64 + Send + Sync + 'static,
    alpha_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<PathSchedule> {
    if alpha(0.0).abs() > 1e-12 || (alpha(1.0) - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("vp alpha must map 0 -> 0 and 1 -> 1"));
    }
    for i in 0..=100 {
        let a = alpha(i as f64 / 100.0);
        if !(-1e-12..=1.0 + 1e-12).contains(&a) {
            return Err(Error::invalid(format!("vp alpha({}) = {a} outside [0, 1]", i as f64 / 100.0)));
        }
    }
    Ok(PathSchedule::Vp {
        alpha: Arc::new(alpha),
        alpha_dot: Arc::new(alpha_dot),
    })
}

/// VP schedule with the default choice `alpha_t = t`.
pub fn vp_linear_alpha_schedule() -> PathSchedule {
    PathSchedule::Vp {
        alpha: Arc::new(|t| t),
        alpha_dot: Arc::new(|_| 1.0),
    }
}

impl PathSchedule {
    pub fn name(&self) -> &'static str {
        match self {
            PathSchedule::Linear => "linear",
            PathSchedule::Ot { .. } => "ot",
            PathSchedule::Vp { .. } => "vp",
            PathSchedule::InducedPfode { .. } => "pfode_induced",
        }
    }

    pub fn alpha(&self, t: f64) -> f64 {
        match self {
            PathSchedule::Linear | PathSchedule::Ot { .. } => t,
            PathSchedule::Vp { alpha, .. } => alpha(t),
            PathSchedule::InducedPfode { sigma } => sigma.eta_kappa(1.0 - t).0,
        }
    }

    pub fn beta(&self, t: f64) -> f64 {
        match self {
            PathSchedule::Linear => 1.0 - t,
            PathSchedule::Ot { sigma_min } => 1.0 - (1.0 - sigma_min) * t,
            PathSchedule::Vp { alpha, .. } => {
                let a = alpha(t).clamp(0.0, 1.0);
                (1.0 - a * a).max(0.0).sqrt()
            }
            PathSchedule::InducedPfode { sigma } => sigma.eta_kappa(1.0 - t).1.max(0.0).sqrt(),
        }
    }

    pub fn alpha_dot(&self, t: f64) -> f64 {
        match self {
            PathSchedule::Linear | PathSchedule::Ot { .. } => 1.0,
            PathSchedule::Vp { alpha_dot, .. } => alpha_dot(t),
            // d/dt eta(1-t) = -eta_dot(1-t) = (sigma(1-t)/2) eta(1-t)
            PathSchedule::InducedPfode { sigma } => {
                let s = 1.0 - t;
                0.5 * sigma.value(s) * sigma.eta_kappa(s).0
            }
        }
    }

    pub fn beta_dot(&self, t: f64) -> f64 {
        match self {
            PathSchedule::Linear => -1.0,
            PathSchedule::Ot { sigma_min } => -(1.0 - sigma_min),
            // beta_dot = -alpha alpha_dot / beta, stable form with a cap at
            // the alpha -> 1 endpoint where the derivative is unbounded
            PathSchedule::Vp { alpha, alpha_dot } => {
                let a = alpha(t).clamp(0.0, 1.0);
                let b = (1.0 - a * a).max(0.0).sqrt();
                let raw = -a * alpha_dot(t) / b.max(1e-12);
                raw.clamp(-VP_BETA_DOT_CAP, VP_BETA_DOT_CAP)
            }
            // d/dt sqrt(kappa(1-t)) = -kappa_dot(1-t) / (2 sqrt(kappa(1-t)))
            // with kappa_dot = sigma (1 - kappa); capped at the data endpoint
            // where kappa -> 0.
            PathSchedule::InducedPfode { sigma } => {
                let s = 1.0 - t;
                let kappa = sigma.eta_kappa(s).1;
                let kdot = sigma.value(s) * (1.0 - kappa);
                let raw = -kdot / (2.0 * kappa.max(0.0).sqrt().max(1e-12));
                raw.clamp(-VP_BETA_DOT_CAP, VP_BETA_DOT_CAP)
            }
        }
    }

    /// Whether the `beta_dot` cap is active at `t` (the VP-family endpoint
    /// singularity), for diagnostics.
    pub fn beta_dot_capped(&self, t: f64) -> bool {
        matches!(
            self,
            PathSchedule::Vp { .. } | PathSchedule::InducedPfode { .. }
        ) && self.beta_dot(t).abs() >= VP_BETA_DOT_CAP
    }
}

/// `alpha_t x1 + beta_t x0`.
pub fn interpolate(
    x0: &GridFunction,
    x1: &GridFunction,
    t: f64,
    schedule: &PathSchedule,
) -> Result<GridFunction> {
    check_time(t)?;
    check_same_grid(x0.grid(), x1.grid(), "interpolate")?;
    let (a, b) = (schedule.alpha(t), schedule.beta(t));
    Ok(lin_comb(a, x1, b, x0))
}

/// `alpha_dot_t x1 + beta_dot_t x0`.
pub fn path_velocity(
    x0: &GridFunction,
    x1: &GridFunction,
    t: f64,
    schedule: &PathSchedule,
) -> Result<GridFunction> {
    check_time(t)?;
    check_same_grid(x0.grid(), x1.grid(), "path velocity")?;
    let (ad, bd) = (schedule.alpha_dot(t), schedule.beta_dot(t));
    Ok(lin_comb(ad, x1, bd, x0))
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("time {t} outside [0, 1]")));
    }
    Ok(())
}

fn lin_comb(c1: f64, f1: &GridFunction, c0: f64, f0: &GridFunction) -> GridFunction {
    let values: Vec<f64> = f1
        .values()
        .iter()
        .zip(f0.values())
        .map(|(&v1, &v0)| c1 * v1 + c0 * v0)
        .collect();
    GridFunction::from_values_unchecked(f0.grid(), values)
}
