//! Definition-level brute force over all 2^{2n} configurations of G(2,n).
//!
//! States are addressed by their packed code (bit `v` set = vertex `v` plus).
//! Energies are exact rationals, so bottleneck heights and stability levels
//! are computed with zero tolerance.

mod checks;
mod descent;
mod full;
mod gate;

pub use checks::{default_grid, run_checks, Check, OracleReport, PhiEntry, StabilityEntry};
pub use descent::{descent_class_move, descent_move, Descent, DescentRule};
pub use full::{full_transition_matrix, gibbs_projection_error, projection_error, FULL_MATRIX_N_MAX};
pub use gate::{verify_gate, GateVerdict};

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::classes::ClassState;
use crate::error::{Error, Result};
use crate::exact::{Affine, Rational};
use crate::landscape::NamedState;
use crate::model::{build_graph, hamiltonian_exact, SpinConfig};
use crate::params::Params;

/// Default largest `n` for path and bottleneck analyses.
pub const DEFAULT_N_MAX: usize = 5;
/// Largest `n` the oracle accepts at all.
pub const HARD_N_MAX: usize = 6;

/// All configurations with single-flip adjacency and exact energies.
#[derive(Clone, Debug)]
pub struct StateGraph {
    n: usize,
    epsilon: Rational,
    h: Rational,
    affine: Vec<Affine>,
    energies: Vec<Rational>,
    order: Vec<u32>,
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind { parent: (0..len as u32).collect() }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut y = x;
        while self.parent[y as usize] != root {
            let next = self.parent[y as usize];
            self.parent[y as usize] = root;
            y = next;
        }
        root
    }
}

impl StateGraph {
    /// Enumerates every configuration; refuses `n > n_max` or `n > 6`.
    pub fn build(params: &Params, n_max: usize) -> Result<Self> {
        params.require_two_clusters()?;
        let n = params.n();
        let cap = n_max.min(HARD_N_MAX);
        if n > cap {
            return Err(Error::Capacity(format!("oracle enumerates 2^(2n) states; n = {n} exceeds the limit {cap}")));
        }
        let g = build_graph(params);
        let len = 1usize << (2 * n);
        let affine: Vec<Affine> = (0..len as u64)
            .into_par_iter()
            .map(|code| hamiltonian_exact(&g, &SpinConfig::from_code(code, 2 * n)).expect("sizes match"))
            .collect();
        let (eps, h) = (params.epsilon(), params.h());
        let energies: Vec<Rational> = affine.iter().map(|e| e.eval(eps, h)).collect();
        let mut order: Vec<u32> = (0..len as u32).collect();
        order.sort_by(|&a, &b| energies[a as usize].cmp(&energies[b as usize]).then(a.cmp(&b)));
        Ok(StateGraph { n, epsilon: eps, h, affine, energies, order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn h(&self) -> Rational {
        self.h
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energy(&self, code: u32) -> Rational {
        self.energies[code as usize]
    }

    pub fn energy_affine(&self, code: u32) -> Affine {
        self.affine[code as usize]
    }

    pub fn neighbors(&self, code: u32) -> impl Iterator<Item = u32> {
        (0..2 * self.n).map(move |v| code ^ (1 << v))
    }

    pub fn class_of(&self, code: u32) -> ClassState {
        let mask = (1u32 << self.n) - 1;
        let (c1, c2) = (code & mask, (code >> self.n) & mask);
        ClassState::raw(c1.count_ones() as usize, c2.count_ones() as usize, (c1 & c2).count_ones() as usize)
    }

    /// Code of the single configuration of a named state.
    pub fn named_code(&self, s: NamedState) -> u32 {
        let mask = (1u32 << self.n) - 1;
        match s {
            NamedState::Plus => mask | (mask << self.n),
            NamedState::Minus => 0,
            NamedState::PlusMinus => mask,
            NamedState::MinusPlus => mask << self.n,
        }
    }

    pub fn config(&self, code: u32) -> SpinConfig {
        SpinConfig::from_code(code as u64, 2 * self.n)
    }

    pub fn code_of(&self, sigma: &SpinConfig) -> Result<u32> {
        if sigma.len() != 2 * self.n {
            return Err(Error::Dimension { expected: 2 * self.n, got: sigma.len() });
        }
        Ok(sigma.code().expect("at most 12 vertices") as u32)
    }

    /// Codes of every configuration in class `c`.
    pub fn class_members(&self, c: ClassState) -> Vec<u32> {
        (0..self.len() as u32).filter(|&s| self.class_of(s) == c).collect()
    }

    /// `Φ(from, targets)`: least height `L` such that `from` and some target
    /// are connected inside `{H ≤ L}`.
    pub fn communication_height_to(&self, from: u32, targets: &[u32]) -> Result<Rational> {
        if targets.is_empty() {
            return Err(Error::EmptyTargets);
        }
        if targets.contains(&from) {
            return Ok(self.energy(from));
        }
        let mut uf = UnionFind::new(self.len());
        let mut inserted = vec![false; self.len()];
        let mut is_target = vec![false; self.len()];
        for &t in targets {
            is_target[t as usize] = true;
        }
        let mut target_roots: Vec<u32> = Vec::new();
        for &v in &self.order {
            inserted[v as usize] = true;
            for u in self.neighbors(v) {
                if inserted[u as usize] {
                    let (ru, rv) = (uf.find(u), uf.find(v));
                    if ru != rv {
                        uf.parent[ru as usize] = rv;
                    }
                }
            }
            if is_target[v as usize] {
                target_roots.push(v);
            }
            if inserted[from as usize] {
                let rf = uf.find(from);
                if target_roots.iter().any(|&t| uf.find(t) == rf) {
                    return Ok(self.energy(v));
                }
            }
        }
        Err(Error::Unreachable)
    }

    /// `Φ(η, η′)`, the min over paths of the max energy along the path.
    pub fn communication_height(&self, from: u32, to: u32) -> Result<Rational> {
        self.communication_height_to(from, &[to])
    }

    /// Stability level of every state (`None` = infinite, for global minima).
    ///
    /// One sweep inserting states by increasing energy; each component keeps
    /// its minimum energy and the not-yet-resolved states at that minimum.
    /// When two components merge at height `w`, the bottoms of the one with
    /// the strictly higher minimum `m` get `V = w − m`.
    pub fn stability_levels(&self) -> Vec<Option<Rational>> {
        let len = self.len();
        let mut uf = UnionFind::new(len);
        let mut inserted = vec![false; len];
        let mut bottoms: Vec<Vec<u32>> = vec![Vec::new(); len];
        let mut level: Vec<Option<Rational>> = vec![None; len];
        for &v in &self.order {
            inserted[v as usize] = true;
            bottoms[v as usize] = vec![v];
            let w = self.energy(v);
            for u in self.neighbors(v) {
                if !inserted[u as usize] {
                    continue;
                }
                let (ru, rv) = (uf.find(u), uf.find(v));
                if ru == rv {
                    continue;
                }
                let (mu, mv) = (self.comp_min(&bottoms[ru as usize]), self.comp_min(&bottoms[rv as usize]));
                let (keep, drop) = match mu.cmp(&mv) {
                    std::cmp::Ordering::Less => {
                        for &b in &bottoms[rv as usize] {
                            level[b as usize] = Some(w - mv);
                        }
                        bottoms[rv as usize].clear();
                        (ru, rv)
                    }
                    std::cmp::Ordering::Greater => {
                        for &b in &bottoms[ru as usize] {
                            level[b as usize] = Some(w - mu);
                        }
                        bottoms[ru as usize].clear();
                        (rv, ru)
                    }
                    std::cmp::Ordering::Equal => {
                        let moved = std::mem::take(&mut bottoms[ru as usize]);
                        bottoms[rv as usize].extend(moved);
                        (rv, ru)
                    }
                };
                let moved = std::mem::take(&mut bottoms[drop as usize]);
                bottoms[keep as usize].extend(moved);
                uf.parent[drop as usize] = keep;
            }
        }
        level
    }

    fn comp_min(&self, bottoms: &[u32]) -> Rational {
        self.energy(bottoms[0])
    }

    /// Stability level of one state.
    pub fn stability_level(&self, code: u32) -> Option<Rational> {
        let below: Vec<u32> = (0..self.len() as u32).filter(|&s| self.energy(s) < self.energy(code)).collect();
        if below.is_empty() {
            return None;
        }
        Some(self.communication_height_to(code, &below).expect("graph is connected") - self.energy(code))
    }

    pub fn min_energy(&self) -> Rational {
        self.energy(self.order[0])
    }

    /// Codes of the global minima.
    pub fn ground_states(&self) -> Vec<u32> {
        let m = self.min_energy();
        let mut out: Vec<u32> = self.order.iter().copied().take_while(|&s| self.energy(s) == m).collect();
        out.sort();
        out
    }

    /// Non-stable states of maximal stability level; empty when that maximum is 0.
    pub fn metastable_states(&self, levels: &[Option<Rational>]) -> Vec<u32> {
        let max = levels.iter().flatten().max().copied();
        match max {
            Some(m) if m > Rational::from_integer(0) => {
                (0..self.len() as u32).filter(|&s| levels[s as usize] == Some(m)).collect()
            }
            _ => vec![],
        }
    }

    /// States of `{H ≤ height}` reachable from `from` without entering `blocked`,
    /// with BFS parents for path reconstruction.
    pub(crate) fn sublevel_bfs(&self, from: u32, height: Rational, blocked: &[bool]) -> Vec<Option<u32>> {
        let mut parent: Vec<Option<u32>> = vec![None; self.len()];
        if self.energy(from) > height || blocked[from as usize] {
            return parent;
        }
        parent[from as usize] = Some(from);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for u in self.neighbors(v) {
                if parent[u as usize].is_none() && !blocked[u as usize] && self.energy(u) <= height {
                    parent[u as usize] = Some(v);
                    queue.push_back(u);
                }
            }
        }
        parent
    }

    /// Minimal saddles `S(η, η′)`: states at height `Φ(η, η′)` in the
    /// component of `η` inside `{H ≤ Φ}`.
    pub fn minimal_saddles(&self, from: u32, to: u32) -> Result<Vec<u32>> {
        self.minimal_saddles_to(from, &[to])
    }

    pub fn minimal_saddles_to(&self, from: u32, targets: &[u32]) -> Result<Vec<u32>> {
        let phi = self.communication_height_to(from, targets)?;
        let reach = self.sublevel_bfs(from, phi, &vec![false; self.len()]);
        Ok((0..self.len() as u32).filter(|&s| reach[s as usize].is_some() && self.energy(s) == phi).collect())
    }

    /// Distinct classes of a set of codes, sorted.
    pub fn classes_of(&self, codes: &[u32]) -> Vec<ClassState> {
        let mut out: Vec<ClassState> = codes.iter().map(|&s| self.class_of(s)).collect();
        out.sort();
        out.dedup();
        out
    }
}
