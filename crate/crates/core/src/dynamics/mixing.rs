use serde::{Deserialize, Serialize};

use crate::classes::{ClassState, LumpedChain};
use crate::error::{Error, Result};

/// Default cap on the number of matrix applications.
pub const DEFAULT_MIXING_BUDGET: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingResult {
    pub gamma: f64,
    /// First `t` with worst-case distance at most `gamma`, or the budget when
    /// `lower_bound_only` is set.
    pub steps: u64,
    pub lower_bound_only: bool,
    pub worst_start: ClassState,
    pub distance: f64,
}

/// `t_mix(γ)` of the class-level distribution: the first `t` with
/// `max_c ½ Σ_{c'} |P̄ᵗ(c, c') − π(c')| ≤ γ`, where `π(c')` is the
/// size-weighted Gibbs mass of class `c'`.
///
/// By lumpability the class row `P̄ᵗ(c, ·)` is the law of the class of `X_t`
/// started anywhere in `c`. The class-level distance never exceeds the
/// configuration-level one, so the result is a lower bound for the
/// configuration chain and equal to it when classes are singletons.
pub fn mixing_time(chain: &LumpedChain, gamma: f64, budget: u64) -> Result<MixingResult> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("γ must lie in (0, 1), got {gamma}")));
    }
    let p = chain.chain();
    let pi = p.stationary();
    let len = chain.len();
    let mut rows: Vec<Vec<f64>> = (0..len)
        .map(|i| {
            let mut r = vec![0.0; len];
            r[i] = 1.0;
            r
        })
        .collect();
    let worst = |rows: &[Vec<f64>]| -> (usize, f64) {
        rows.iter()
            .map(|r| 0.5 * r.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty")
    };
    let mut t = 0;
    let (mut start, mut distance) = worst(&rows);
    while distance > gamma {
        if t == budget {
            return Ok(MixingResult { gamma, steps: t, lower_bound_only: true, worst_start: chain.classes()[start], distance });
        }
        rows = rows.iter().map(|r| p.apply_left(r)).collect();
        t += 1;
        (start, distance) = worst(&rows);
    }
    Ok(MixingResult { gamma, steps: t, lower_bound_only: false, worst_start: chain.classes()[start], distance })
}
