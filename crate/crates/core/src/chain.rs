//! Sparse row-stochastic chains with known stationary weights.

use nalgebra::DMatrix;

/// A reversible Markov chain stored as off-diagonal sparse rows plus the
/// diagonal, together with log stationary weights (unnormalised).
#[derive(Clone, Debug)]
pub struct Chain {
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    log_weights: Vec<f64>,
}

impl Chain {
    /// Builds a chain from off-diagonal rows; the diagonal takes the residual mass.
    pub fn new(mut rows: Vec<Vec<(usize, f64)>>, log_weights: Vec<f64>) -> Self {
        assert_eq!(rows.len(), log_weights.len());
        for (i, row) in rows.iter_mut().enumerate() {
            row.retain(|&(j, p)| j != i && p > 0.0);
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(j, p) in row.iter() {
                match merged.last_mut() {
                    Some((k, q)) if *k == j => *q += p,
                    _ => merged.push((j, p)),
                }
            }
            *row = merged;
        }
        let diag = rows.iter().map(|r| (1.0 - r.iter().map(|&(_, p)| p).sum::<f64>()).max(0.0)).collect();
        Chain { rows, diag, log_weights }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Off-diagonal entries of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.rows[i].binary_search_by_key(&j, |&(k, _)| k).map(|k| self.rows[i][k].1).unwrap_or(0.0)
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalised stationary distribution.
    pub fn stationary(&self) -> Vec<f64> {
        let max = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    /// Row vector times the matrix: `μ ↦ μP`.
    pub fn apply_left(&self, mu: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = mu.iter().zip(&self.diag).map(|(m, d)| m * d).collect();
        for (i, row) in self.rows.iter().enumerate() {
            if mu[i] == 0.0 {
                continue;
            }
            for &(j, p) in row {
                out[j] += mu[i] * p;
            }
        }
        out
    }

    /// Matrix times a column vector: `f ↦ Pf`.
    pub fn apply_right(&self, f: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| self.diag[i] * f[i] + row.iter().map(|&(j, p)| p * f[j]).sum::<f64>())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, p) in &self.rows[i] {
                m[(i, j)] = p;
            }
        }
        m
    }

    /// Largest `|Σⱼ P(i,j) − 1|` over rows.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.diag[i] + self.rows[i].iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest relative violation of `w(i)P(i,j) = w(j)P(j,i)`, computed in
    /// the log domain so that tiny weights do not underflow.
    pub fn detailed_balance_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for &(j, p) in &self.rows[i] {
                let q = self.entry(j, i);
                if q == 0.0 {
                    return f64::INFINITY;
                }
                let lhs = self.log_weights[i] + p.ln();
                let rhs = self.log_weights[j] + q.ln();
                worst = worst.max((lhs - rhs).exp_m1().abs());
            }
        }
        worst
    }

    /// `max_i |(πP)(i)/π(i) − 1|`, with `(πP)(i)/π(i) = Σⱼ e^{w(j)−w(i)} P(j,i)`
    /// summed in the log-weight domain so that underflowing states keep full
    /// relative precision.
    pub fn stationarity_error(&self) -> f64 {
        let mut ratio = self.diag.clone();
        for (j, row) in self.rows.iter().enumerate() {
            for &(i, p) in row {
                ratio[i] += (self.log_weights[j] - self.log_weights[i]).exp() * p;
            }
        }
        ratio.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
    }
}
