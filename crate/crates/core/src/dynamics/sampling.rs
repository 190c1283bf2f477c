use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hitting::exact_hitting_moments;
use super::simulate::{simulate, simulate_lumped, SimOptions};
use crate::classes::{build_lumped_chain, representative, ClassState};
use crate::error::{Error, Result};
use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Configuration-level dynamics on G(2,n).
    Full,
    /// Class-level dynamics on the lumped chain.
    Lumped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub mode: SimMode,
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
    pub max_steps: u64,
    /// Barrier `Γ` and half-width `δ` of the window `(e^{β(Γ−δ)}, e^{β(Γ+δ)})`.
    pub window: Option<(f64, f64)>,
    /// Also solve for the exact moments on the lumped chain.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub gamma: f64,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    /// Fraction of all trials (censored ones count as outside) with τ in the window.
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingStats {
    pub mode: SimMode,
    pub beta: f64,
    pub start: ClassState,
    pub targets: Vec<ClassState>,
    pub trials: usize,
    pub censored: usize,
    /// Statistics over uncensored samples.
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub std_error: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci95: (f64, f64),
    pub exact_mean: Option<f64>,
    pub exact_second_moment: Option<f64>,
    /// `(1/β)·log E[τ]`, from the exact mean when available.
    pub log_rate: f64,
    pub window: Option<WindowStats>,
    #[serde(skip)]
    pub times: Vec<Option<u64>>,
}

/// Independent replicas of the hitting time of `targets` from `start`;
/// trial `i` uses stream `i` of the master seed, so results do not depend
/// on the thread count.
pub fn sample_hitting_times(
    params: &Params,
    start: ClassState,
    targets: &[ClassState],
    cfg: &SampleConfig,
) -> Result<HittingStats> {
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let n = params.n();
    let lumped = build_lumped_chain(params, cfg.beta)?;
    let run = |trial: usize| -> Result<Option<u64>> {
        let opts = SimOptions { seed: cfg.seed, stream: trial as u64, max_steps: cfg.max_steps, record: false };
        let t = match cfg.mode {
            SimMode::Full => simulate(params, cfg.beta, &representative(start, n)?, targets, opts)?,
            SimMode::Lumped => simulate_lumped(&lumped, start, targets, opts)?,
        };
        Ok(t.hitting_step)
    };
    let times: Vec<Option<u64>> = (0..cfg.trials).into_par_iter().map(run).collect::<Result<_>>()?;
    let done: Vec<f64> = times.iter().flatten().map(|&t| t as f64).collect();
    let k = done.len() as f64;
    let mean = if done.is_empty() { f64::NAN } else { done.iter().sum::<f64>() / k };
    let second_moment = if done.is_empty() { f64::NAN } else { done.iter().map(|t| t * t).sum::<f64>() / k };
    let variance = if done.len() > 1 { done.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { f64::NAN };
    let std_error = (variance / k).sqrt();
    let (exact_mean, exact_second_moment) = if cfg.exact {
        let h = exact_hitting_moments(&lumped, start, targets)?;
        (Some(h.mean), Some(h.second_moment))
    } else {
        (None, None)
    };
    let log_rate = exact_mean.unwrap_or(mean).ln() / cfg.beta;
    let window = cfg.window.map(|(gamma, delta)| {
        let lower = (cfg.beta * (gamma - delta)).exp();
        let upper = (cfg.beta * (gamma + delta)).exp();
        let inside = done.iter().filter(|&&t| t > lower && t < upper).count();
        WindowStats { gamma, delta, lower, upper, fraction: inside as f64 / cfg.trials as f64 }
    });
    Ok(HittingStats {
        mode: cfg.mode,
        beta: cfg.beta,
        start,
        targets: targets.to_vec(),
        trials: cfg.trials,
        censored: cfg.trials - done.len(),
        samples: done.len(),
        mean,
        variance,
        second_moment,
        std_error,
        ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        exact_mean,
        exact_second_moment,
        log_rate,
        window,
        times,
    })
}
