use std::collections::BTreeMap;

use super::StateGraph;
use crate::chain::Chain;
use crate::classes::{ClassState, LumpedChain};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::params::Params;

/// Largest `n` for which the full matrix is built (256 states).
pub const FULL_MATRIX_N_MAX: usize = 4;

/// Metropolis matrix over all 2^{2n} configurations:
/// `P(σ, σ^(v)) = (1/2n)·exp(−β[ΔH]₊)`.
pub fn full_transition_matrix(params: &Params, beta: f64) -> Result<(StateGraph, Chain)> {
    if params.n() > FULL_MATRIX_N_MAX {
        return Err(Error::Capacity(format!(
            "full matrix has 2^(2n) rows; n = {} exceeds the limit {FULL_MATRIX_N_MAX}",
            params.n()
        )));
    }
    let params = params.clone().with_beta(beta)?;
    let g = StateGraph::build(&params, FULL_MATRIX_N_MAX)?;
    let q = 1.0 / (2 * g.n()) as f64;
    let (eps, h) = (g.epsilon(), g.h());
    let rows = (0..g.len() as u32)
        .map(|s| {
            g.neighbors(s)
                .map(|t| {
                    let d = (g.energy_affine(t) - g.energy_affine(s)).positive_part_f64(eps, h);
                    (t as usize, q * (-beta * d).exp())
                })
                .collect()
        })
        .collect();
    let log_weights = (0..g.len() as u32).map(|s| -beta * to_f64(g.energy(s))).collect();
    Ok((g, Chain::new(rows, log_weights)))
}

/// Largest `|Σ_{η ∈ c'} P(σ, η) − P̄(c, c')|` over all configurations `σ`
/// (with class `c`) and classes `c'`. Zero up to rounding means the full
/// chain is strongly lumpable onto the class chain.
pub fn projection_error(g: &StateGraph, full: &Chain, lumped: &LumpedChain) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..g.len() {
        let c = g.class_of(s as u32);
        let mut mass: BTreeMap<ClassState, f64> = BTreeMap::new();
        *mass.entry(c).or_default() += full.diagonal(s);
        for &(t, p) in full.row(s) {
            *mass.entry(g.class_of(t as u32)).or_default() += p;
        }
        let i = lumped.index_of(c).expect("class exists");
        for (j, &d) in lumped.classes().iter().enumerate() {
            let projected = mass.get(&d).copied().unwrap_or(0.0);
            worst = worst.max((projected - lumped.chain().entry(i, j)).abs());
        }
    }
    worst
}

/// Largest `|Σ_{σ ∈ c} μ(σ) − w(c)/Z|` over classes.
pub fn gibbs_projection_error(g: &StateGraph, full: &Chain, lumped: &LumpedChain) -> f64 {
    let mu = full.stationary();
    let pi = lumped.chain().stationary();
    let mut sums = vec![0.0; lumped.len()];
    for (s, m) in mu.iter().enumerate() {
        sums[lumped.index_of(g.class_of(s as u32)).expect("class exists")] += m;
    }
    sums.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
