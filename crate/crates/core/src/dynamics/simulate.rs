use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{classify, move_between, move_of_vertex, ClassState, LumpedChain, MoveType};
use crate::error::{Error, Result};
use crate::exact::{Affine, Rational};
use crate::model::{build_graph, flip_delta_exact, hamiltonian_exact, ClusteredGraph, SpinConfig};
use crate::params::Params;

/// Seeded generator for one trial: ChaCha8 keyed by the master seed, with
/// the trial index as stream number.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub seed: u64,
    pub stream: u64,
    pub max_steps: u64,
    /// Keep every accepted move; when false only the hitting step is kept.
    pub record: bool,
}

impl SimOptions {
    pub fn new(seed: u64, max_steps: u64) -> Self {
        SimOptions { seed, stream: 0, max_steps, record: true }
    }
}

/// One accepted move: the step index, the move taken and the class reached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub step: u64,
    pub mv: Option<MoveType>,
    pub class: ClassState,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub start: ClassState,
    pub targets: Vec<ClassState>,
    /// The initial state (step 0, no move) followed by accepted moves.
    pub steps: Vec<TrajectoryStep>,
    /// First step `t ≥ 0` with `X_t` in the target set.
    pub hitting_step: Option<u64>,
    pub steps_run: u64,
    pub censored: bool,
}

impl Trajectory {
    /// Writes `step,p1,p2,a,energy` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "p1", "p2", "a", "energy"]).map_err(csv_error)?;
        for s in &self.steps {
            w.write_record([
                s.step.to_string(),
                s.class.p1.to_string(),
                s.class.p2.to_string(),
                s.class.a.to_string(),
                s.energy.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn check_targets(targets: &[ClassState], n: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    for c in targets {
        if !c.is_valid(n) {
            return Err(Error::InvalidClass { n, p1: c.p1, p2: c.p2, a: c.a });
        }
    }
    Ok(())
}

/// Metropolis dynamics on configurations: each step proposes a uniform
/// vertex and accepts its flip with probability `exp(−β[ΔH]₊)`, with `ΔH`
/// evaluated on the graph. Stops at the first visit to a target class or
/// after `max_steps` steps (censored).
pub fn simulate(params: &Params, beta: f64, start: &SpinConfig, targets: &[ClassState], opts: SimOptions) -> Result<Trajectory> {
    let g = build_graph(params);
    let n = params.n();
    check_targets(targets, n)?;
    if start.len() != g.vertex_count() {
        return Err(Error::Dimension { expected: g.vertex_count(), got: start.len() });
    }
    let mut sim = FullSim::new(&g, params, beta)?;
    let mut sigma = start.clone();
    let mut class = classify(&g, &sigma)?;
    let start_class = class;
    let mut energy = hamiltonian_exact(&g, &sigma)?;
    let mut rng = trial_rng(opts.seed, opts.stream);
    let eval = |e: &Affine| e.eval_f64(params.epsilon_f64(), params.h_f64());
    let mut steps = vec![TrajectoryStep { step: 0, mv: None, class, energy: eval(&energy) }];
    let mut t = 0;
    let mut hit = targets.contains(&class).then_some(0);
    while hit.is_none() && t < opts.max_steps {
        t += 1;
        let v = rng.random_range(0..g.vertex_count());
        let delta = flip_delta_exact(&g, &sigma, v)?;
        if sim.accept(&delta, &mut rng) {
            let mv = move_of_vertex(&sigma, n, v);
            sigma.set(v, !sigma.is_plus(v));
            class = mv.target(class, n).expect("vertex realises the move");
            energy += delta;
            if opts.record {
                steps.push(TrajectoryStep { step: t, mv: Some(mv), class, energy: eval(&energy) });
            }
            if targets.contains(&class) {
                hit = Some(t);
            }
        }
    }
    Ok(Trajectory {
        seed: opts.seed,
        stream: opts.stream,
        start: start_class,
        targets: targets.to_vec(),
        steps,
        hitting_step: hit,
        steps_run: t,
        censored: hit.is_none(),
    })
}

struct FullSim {
    beta: f64,
    epsilon: Rational,
    h: Rational,
    cache: HashMap<Affine, f64>,
}

impl FullSim {
    fn new(g: &ClusteredGraph, params: &Params, beta: f64) -> Result<Self> {
        if g.k() != 2 {
            return Err(Error::NeedsTwoClusters(g.k()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("β must be positive and finite, got {beta}")));
        }
        Ok(FullSim { beta, epsilon: params.epsilon(), h: params.h(), cache: HashMap::new() })
    }

    fn accept(&mut self, delta: &Affine, rng: &mut ChaCha8Rng) -> bool {
        let (beta, eps, h) = (self.beta, self.epsilon, self.h);
        let p = *self.cache.entry(*delta).or_insert_with(|| (-beta * delta.positive_part_f64(eps, h)).exp());
        p >= 1.0 || rng.random::<f64>() < p
    }
}

/// The same dynamics on the lumped chain: from class `c` the next class is
/// drawn from the row `P̄(c, ·)`.
pub fn simulate_lumped(chain: &LumpedChain, start: ClassState, targets: &[ClassState], opts: SimOptions) -> Result<Trajectory> {
    let n = chain.n();
    check_targets(targets, n)?;
    let mut i = chain.index_of(start).ok_or(Error::InvalidClass { n, p1: start.p1, p2: start.p2, a: start.a })?;
    let is_target: Vec<bool> = chain.classes().iter().map(|c| targets.contains(c)).collect();
    let p = chain.chain();
    let mut rng = trial_rng(opts.seed, opts.stream);
    let mut steps = vec![TrajectoryStep { step: 0, mv: None, class: start, energy: chain.energy(i) }];
    let mut t = 0;
    let mut hit = is_target[i].then_some(0);
    while hit.is_none() && t < opts.max_steps {
        t += 1;
        let mut u: f64 = rng.random();
        let mut next = None;
        for &(j, q) in p.row(i) {
            if u < q {
                next = Some(j);
                break;
            }
            u -= q;
        }
        if let Some(j) = next {
            if opts.record {
                let (from, to) = (chain.classes()[i], chain.classes()[j]);
                steps.push(TrajectoryStep { step: t, mv: move_between(from, to, n), class: to, energy: chain.energy(j) });
            }
            i = j;
            if is_target[i] {
                hit = Some(t);
            }
        }
    }
    Ok(Trajectory {
        seed: opts.seed,
        stream: opts.stream,
        start,
        targets: targets.to_vec(),
        steps,
        hitting_step: hit,
        steps_run: t,
        censored: hit.is_none(),
    })
}
