use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::classes::{ClassState, LumpedChain};
use crate::error::{Error, Result};

/// Elimination of the non-target block of `I − P` without subtractions
/// (Grassmann–Taksar–Heyman). Pivots are recomputed as the escape mass of
/// the remaining chain, so the factor stays accurate when the chain is
/// extremely metastable.
#[derive(Clone, Debug)]
pub(crate) struct GthFactor {
    order: Vec<usize>,
    pivot: Vec<f64>,
    upper: Vec<Vec<(usize, f64)>>,
    lower: Vec<Vec<(usize, f64)>>,
    target: Vec<bool>,
}

impl GthFactor {
    pub(crate) fn new(chain: &Chain, target: &[bool]) -> Result<Self> {
        let len = chain.len();
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); len];
        let mut escape = vec![0.0; len];
        for i in (0..len).filter(|&i| !target[i]) {
            for &(j, p) in chain.row(i) {
                if target[j] {
                    escape[i] += p;
                } else {
                    rows[i].insert(j, p);
                }
            }
        }
        let order: Vec<usize> = (0..len).filter(|&i| !target[i]).collect();
        let mut alive = target.iter().map(|t| !t).collect::<Vec<bool>>();
        let mut pivot = vec![0.0; len];
        let mut upper = vec![Vec::new(); len];
        let mut lower = vec![Vec::new(); len];
        for &k in &order {
            alive[k] = false;
            let row = std::mem::take(&mut rows[k]);
            let s = row.values().sum::<f64>() + escape[k];
            if s <= 0.0 {
                return Err(Error::Unreachable);
            }
            pivot[k] = s;
            let kept: Vec<(usize, f64)> = row.into_iter().filter(|&(j, _)| alive[j]).collect();
            let mut updates = Vec::new();
            for &(i, _) in &kept {
                let Some(pik) = rows[i].remove(&k) else { continue };
                let f = pik / s;
                for &(j, v) in &kept {
                    if j != i {
                        *rows[i].entry(j).or_insert(0.0) += f * v;
                    }
                }
                escape[i] += f * escape[k];
                updates.push((i, f));
            }
            upper[k] = kept;
            lower[k] = updates;
        }
        Ok(GthFactor { order, pivot, upper, lower, target: target.to_vec() })
    }

    /// Solves `x(i) − Σ_{j ∉ T} P(i,j) x(j) = r(i)` for `i ∉ T`, with
    /// `x = 0` on the target set.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = rhs.iter().zip(&self.target).map(|(v, &t)| if t { 0.0 } else { *v }).collect();
        for &k in &self.order {
            let rk = r[k];
            if rk != 0.0 {
                for &(i, f) in &self.lower[k] {
                    r[i] += f * rk;
                }
            }
        }
        let mut x = vec![0.0; r.len()];
        for &k in self.order.iter().rev() {
            x[k] = (r[k] + self.upper[k].iter().map(|&(j, v)| v * x[j]).sum::<f64>()) / self.pivot[k];
        }
        x
    }

    /// As [`solve`](Self::solve) for a right-hand side of either sign; the
    /// positive and negative parts are solved separately.
    pub(crate) fn solve_signed(&self, rhs: &[f64]) -> Vec<f64> {
        let pos: Vec<f64> = rhs.iter().map(|v| v.max(0.0)).collect();
        let neg: Vec<f64> = rhs.iter().map(|v| (-v).max(0.0)).collect();
        self.solve(&pos).iter().zip(self.solve(&neg)).map(|(a, b)| a - b).collect()
    }
}

/// First and second moments of a hitting time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingMoments {
    pub mean: f64,
    pub second_moment: f64,
    /// `E[τ²] / E[τ]²`; tends to 2 when `τ / E[τ]` becomes exponential.
    pub ratio: f64,
    /// Largest relative residual of the first-moment system.
    pub residual: f64,
}

/// `E[τ_T]` from every state (zero on `T`).
pub fn mean_hitting_times(chain: &Chain, targets: &[usize]) -> Result<Vec<f64>> {
    Ok(moments_from(chain, targets)?.0)
}

fn moments_from(chain: &Chain, targets: &[usize]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let mut target = vec![false; chain.len()];
    for &t in targets {
        if t >= chain.len() {
            return Err(Error::Dimension { expected: chain.len(), got: t });
        }
        target[t] = true;
    }
    let factor = GthFactor::new(chain, &target)?;
    let ones: Vec<f64> = target.iter().map(|&t| if t { 0.0 } else { 1.0 }).collect();
    let m = factor.solve(&ones);
    let rhs: Vec<f64> = m.iter().zip(&target).map(|(&v, &t)| if t { 0.0 } else { 2.0 * v - 1.0 }).collect();
    let s = factor.solve(&rhs);
    let mut residual: f64 = 0.0;
    for i in (0..chain.len()).filter(|&i| !target[i]) {
        let step = chain.diagonal(i) * m[i] + chain.row(i).iter().map(|&(j, p)| p * m[j]).sum::<f64>();
        residual = residual.max((m[i] - 1.0 - step).abs() / m[i]);
    }
    Ok((m, s, residual))
}

/// Exact `E[τ]` and `E[τ²]` for the chain started at `start`.
pub fn hitting_moments(chain: &Chain, start: usize, targets: &[usize]) -> Result<HittingMoments> {
    if targets.contains(&start) {
        return Ok(HittingMoments { mean: 0.0, second_moment: 0.0, ratio: f64::NAN, residual: 0.0 });
    }
    let (m, s, residual) = moments_from(chain, targets)?;
    let mean = m[start];
    Ok(HittingMoments { mean, second_moment: s[start], ratio: s[start] / (mean * mean), residual })
}

/// [`hitting_moments`] on the lumped chain with class-valued start and targets.
pub fn exact_hitting_moments(chain: &LumpedChain, start: ClassState, targets: &[ClassState]) -> Result<HittingMoments> {
    let idx = |c: ClassState| chain.index_of(c).ok_or(Error::InvalidClass { n: chain.n(), p1: c.p1, p2: c.p2, a: c.a });
    let start = idx(start)?;
    let targets: Vec<usize> = targets.iter().map(|&c| idx(c)).collect::<Result<_>>()?;
    hitting_moments(chain.chain(), start, &targets)
}
