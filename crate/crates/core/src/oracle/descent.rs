use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::classes::{class_flip_delta_exact, vertex_for_move, ClassState, Cluster, Direction, MoveType};
use crate::error::Result;
use crate::model::{ClusteredGraph, SpinConfig};
use crate::params::Params;

/// Which branch of the case analysis produced a descent move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DescentRule {
    /// `p1 = n` (or `p2 = n` by symmetry): move along C(n, k, k).
    CaseA,
    /// `p1 ≠ n` and `a` above its lower bound.
    CaseB,
    /// `p1 ≠ n` and `a` at its lower bound.
    CaseC,
    /// None of the case moves is strictly downhill; steepest descent instead.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descent {
    pub mv: MoveType,
    pub target: ClassState,
    pub rule: DescentRule,
}

const fn mv(cluster: Cluster, direction: Direction, changes_a: bool) -> MoveType {
    MoveType::new(cluster, direction, changes_a)
}

/// A strictly energy-lowering move out of class `c`, chosen by the case
/// analysis on `(p1, p2, a)`, or `None` if no single flip lowers the energy.
pub fn descent_class_move(c: ClassState, params: &Params) -> Option<Descent> {
    use Cluster::*;
    use Direction::*;
    let n = params.n();
    let (eps, h) = (params.epsilon(), params.h());
    let delta = |m: MoveType| -> Option<num_rational::Rational64> {
        (m.multiplicity(c, n) > 0).then(|| class_flip_delta_exact(c, m, n).expect("valid move").eval(eps, h))
    };
    let floor = (c.p1 + c.p2).saturating_sub(n);
    let (rule, candidates): (DescentRule, Vec<MoveType>) = if c.p1 == n {
        (DescentRule::CaseA, vec![mv(Two, Up, true), mv(Two, Down, true)])
    } else if c.a > floor {
        let second = if c.p1 > c.p2 { mv(One, Down, false) } else { mv(One, Down, true) };
        (DescentRule::CaseB, vec![mv(One, Up, false), second])
    } else if c.p2 == n {
        (DescentRule::CaseA, vec![mv(One, Up, true), mv(One, Down, true)])
    } else {
        let down = if c.p1 != 0 { mv(One, Down, false) } else { mv(Two, Down, false) };
        // With an empty opposite cluster the up-flip cannot raise `a`.
        let up = |k: Cluster| if mv(k, Up, true).multiplicity(c, n) > 0 { mv(k, Up, true) } else { mv(k, Up, false) };
        (DescentRule::CaseC, vec![up(One), up(Two), down])
    };
    for m in candidates {
        if delta(m).is_some_and(|d| d.is_negative()) {
            return Some(Descent { mv: m, target: m.target(c, n).expect("valid"), rule });
        }
    }
    MoveType::ALL
        .into_iter()
        .filter_map(|m| delta(m).filter(|d| d.is_negative()).map(|d| (m, d)))
        .min_by(|a, b| a.1.cmp(&b.1))
        .map(|(m, _)| Descent { mv: m, target: m.target(c, n).expect("valid"), rule: DescentRule::Fallback })
}

/// A vertex of `sigma` whose flip strictly lowers the energy, chosen by
/// [`descent_class_move`]. Works for any `n`.
pub fn descent_move(g: &ClusteredGraph, sigma: &SpinConfig, params: &Params) -> Result<Option<(usize, Descent)>> {
    let c = crate::classes::classify(g, sigma)?;
    Ok(descent_class_move(c, params).map(|d| {
        let v = vertex_for_move(sigma, g.n(), d.mv).expect("positive multiplicity");
        (v, d)
    }))
}
