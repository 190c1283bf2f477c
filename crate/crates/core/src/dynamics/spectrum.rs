use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::hitting::GthFactor;
use super::mixing::MixingResult;
use crate::chain::Chain;
use crate::error::{Error, Result};

/// Largest chain handled by the dense eigensolver.
pub const DENSE_MAX: usize = 2000;

/// Gaps below this are recomputed by Green-operator iteration, since the
/// dense eigenvalue `1 − ρ` carries an absolute rounding error near 1e−15.
pub const DENSE_GAP_FLOOR: f64 = 1e-6;

const SUBSPACE: usize = 6;
const MAX_ITERATIONS: usize = 500;
const TOLERANCE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMethod {
    Dense,
    GreenSubspace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub beta: f64,
    /// Leading eigenvalues `1 = a⁽¹⁾ > a⁽²⁾ ≥ …`.
    pub eigenvalues: Vec<f64>,
    /// `ρ_β = 1 − a⁽²⁾`.
    pub gap: f64,
    /// `(−1/β)·log ρ_β`.
    pub rate: f64,
    pub method: GapMethod,
    pub mixing: Option<MixingResult>,
}

/// Spectral gap of a reversible chain. Dense symmetric eigensolve of
/// `D^{1/2} P D^{−1/2}` (with `D` the stationary weights) for chains of at
/// most [`DENSE_MAX`] states; otherwise, or when the gap is below
/// [`DENSE_GAP_FLOOR`], subspace iteration on the Green operator `(I − P)⁺`.
pub fn spectral_gap(chain: &Chain, beta: f64) -> Result<SpectrumResult> {
    if chain.len() < 2 {
        return Err(Error::Dimension { expected: 2, got: chain.len() });
    }
    if chain.len() <= DENSE_MAX {
        let eigenvalues = dense_eigenvalues(chain);
        let gap = 1.0 - eigenvalues[1];
        if gap > DENSE_GAP_FLOOR {
            let top = eigenvalues.into_iter().take(SUBSPACE).collect();
            return Ok(SpectrumResult {
                beta,
                eigenvalues: top,
                gap,
                rate: -gap.ln() / beta,
                method: GapMethod::Dense,
                mixing: None,
            });
        }
    }
    let ritz = green_ritz_values(chain)?;
    let gap = 1.0 / ritz[0];
    let mut eigenvalues = vec![1.0];
    eigenvalues.extend(ritz.iter().map(|t| 1.0 - 1.0 / t));
    Ok(SpectrumResult { beta, eigenvalues, gap, rate: -gap.ln() / beta, method: GapMethod::GreenSubspace, mixing: None })
}

/// All eigenvalues of the chain in decreasing order.
pub fn dense_eigenvalues(chain: &Chain) -> Vec<f64> {
    let len = chain.len();
    let lw = chain.log_weights();
    let mut s = DMatrix::zeros(len, len);
    for i in 0..len {
        s[(i, i)] = chain.diagonal(i);
        for &(j, p) in chain.row(i) {
            s[(i, j)] = p * ((lw[i] - lw[j]) / 2.0).exp();
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn pi_dot(pi: &[f64], a: &[f64], b: &[f64]) -> f64 {
    pi.iter().zip(a).zip(b).map(|((p, x), y)| p * x * y).sum()
}

fn orthonormalize(pi: &[f64], vs: &mut [Vec<f64>]) {
    for j in 0..vs.len() {
        for _ in 0..2 {
            let mean: f64 = pi.iter().zip(&vs[j]).map(|(p, x)| p * x).sum();
            vs[j].iter_mut().for_each(|x| *x -= mean);
            for k in 0..j {
                let c = pi_dot(pi, &vs[k], &vs[j]);
                let (head, tail) = vs.split_at_mut(j);
                tail[0].iter_mut().zip(&head[k]).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = pi_dot(pi, &vs[j], &vs[j]).sqrt();
        vs[j].iter_mut().for_each(|x| *x /= norm);
    }
}

/// Largest eigenvalues `θ` of `(I − P)⁺` restricted to `π`-mean-zero
/// functions, i.e. `1 / (1 − a⁽ʲ⁾)`, in decreasing order.
fn green_ritz_values(chain: &Chain) -> Result<Vec<f64>> {
    let len = chain.len();
    let pi = chain.stationary();
    let z = (0..len).max_by(|&a, &b| pi[a].total_cmp(&pi[b])).expect("nonempty");
    let mut target = vec![false; len];
    target[z] = true;
    let factor = GthFactor::new(chain, &target)?;
    let green = |b: &[f64]| -> Vec<f64> {
        let mut x = factor.solve_signed(b);
        let mean: f64 = pi.iter().zip(&x).map(|(p, v)| p * v).sum();
        x.iter_mut().for_each(|v| *v -= mean);
        x
    };
    let m = SUBSPACE.min(len - 1);
    let mut vs: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            (0..len).map(|i| (((i * 7919 + j * 104_729) % 1009) as f64 / 1009.0) - 0.5 + if i == j { 1.0 } else { 0.0 }).collect()
        })
        .collect();
    orthonormalize(&pi, &mut vs);
    let mut previous = f64::NAN;
    for _ in 0..MAX_ITERATIONS {
        let ws: Vec<Vec<f64>> = vs.iter().map(|v| green(v)).collect();
        let mut b = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = pi_dot(&pi, &vs[i], &ws[j]);
            }
        }
        let b = (&b + b.transpose()) * 0.5;
        let eig = SymmetricEigen::new(b);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
        let theta: Vec<f64> = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
        vs = idx
            .iter()
            .map(|&k| {
                let mut v = vec![0.0; len];
                for (j, w) in ws.iter().enumerate() {
                    let c = eig.eigenvectors[(j, k)];
                    v.iter_mut().zip(w).for_each(|(x, y)| *x += c * y);
                }
                v
            })
            .collect();
        orthonormalize(&pi, &mut vs);
        if (theta[0] - previous).abs() <= TOLERANCE * theta[0] {
            return Ok(theta);
        }
        previous = theta[0];
    }
    Err(Error::NonConvergence(format!("Green subspace iteration did not settle in {MAX_ITERATIONS} steps")))
}

/// Fitted constants `c_β = ρ_β e^{βΓ}` over a β range, with their extremes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedConstants {
    pub gamma: f64,
    pub per_beta: Vec<(f64, f64)>,
    pub c1: f64,
    pub c2: f64,
}

pub fn fit_constants(results: &[SpectrumResult], gamma: f64) -> Option<FittedConstants> {
    if results.is_empty() {
        return None;
    }
    let per_beta: Vec<(f64, f64)> = results.iter().map(|r| (r.beta, (r.gap.ln() + r.beta * gamma).exp())).collect();
    let c1 = per_beta.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let c2 = per_beta.iter().map(|p| p.1).fold(0.0, f64::max);
    Some(FittedConstants { gamma, per_beta, c1, c2 })
}
