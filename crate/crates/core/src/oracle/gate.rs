use serde::{Deserialize, Serialize};

use super::StateGraph;
use crate::classes::ClassState;
use crate::error::Result;
use crate::exact::{serde_rational, Rational};

/// Outcome of checking whether a class set is a gate for `η → η′`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateVerdict {
    pub is_gate: bool,
    #[serde(with = "serde_rational")]
    pub phi: Rational,
    /// Every configuration of every class in W is a minimal saddle.
    pub subset_of_saddles: bool,
    /// Classes of W containing configurations that are not minimal saddles.
    pub outside_saddles: Vec<ClassState>,
    /// Removing W from `{H ≤ Φ}` separates `η` from `η′`.
    pub disconnects: bool,
    /// `Some(false)` when a strict subset of W is already a gate.
    pub minimal: Option<bool>,
    /// Classes that can be dropped individually while W stays a gate.
    pub redundant: Vec<ClassState>,
    /// Class sequence of an optimal path avoiding W, when one exists.
    pub witness: Option<Vec<ClassState>>,
    /// Classes of all minimal saddles.
    pub saddle_classes: Vec<ClassState>,
}

fn blocked_mask(g: &StateGraph, w: &[ClassState]) -> Vec<bool> {
    (0..g.len() as u32).map(|s| w.contains(&g.class_of(s))).collect()
}

fn avoiding_path(g: &StateGraph, from: u32, to: u32, phi: Rational, w: &[ClassState]) -> Option<Vec<ClassState>> {
    let parent = g.sublevel_bfs(from, phi, &blocked_mask(g, w));
    parent[to as usize]?;
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur as usize].expect("bfs tree");
        path.push(cur);
    }
    path.reverse();
    Some(path.into_iter().map(|s| g.class_of(s)).collect())
}

/// Checks that `W` is a gate for `from → to`: every class of `W` consists of
/// minimal saddles and every optimal path meets `W`.
pub fn verify_gate(g: &StateGraph, from: u32, to: u32, w: &[ClassState]) -> Result<GateVerdict> {
    let phi = g.communication_height(from, to)?;
    let saddles = g.minimal_saddles(from, to)?;
    let mut is_saddle = vec![false; g.len()];
    for &s in &saddles {
        is_saddle[s as usize] = true;
    }
    let outside_saddles: Vec<ClassState> = w
        .iter()
        .copied()
        .filter(|&c| {
            let members = g.class_members(c);
            members.is_empty() || members.iter().any(|&s| !is_saddle[s as usize])
        })
        .collect();
    let subset_of_saddles = outside_saddles.is_empty();
    let witness = avoiding_path(g, from, to, phi, w);
    let disconnects = witness.is_none();
    let is_gate = subset_of_saddles && disconnects;
    let (minimal, redundant) = if is_gate {
        let redundant: Vec<ClassState> = w
            .iter()
            .copied()
            .filter(|c| {
                let rest: Vec<ClassState> = w.iter().copied().filter(|d| d != c).collect();
                avoiding_path(g, from, to, phi, &rest).is_none()
            })
            .collect();
        (Some(redundant.is_empty()), redundant)
    } else {
        (None, vec![])
    };
    Ok(GateVerdict {
        is_gate,
        phi,
        subset_of_saddles,
        outside_saddles,
        disconnects,
        minimal,
        redundant,
        witness,
        saddle_classes: g.classes_of(&saddles),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{gate_set, NamedState};
    use crate::params::Params;

    #[test]
    fn even_gate_holds_and_empty_set_fails() {
        let p = Params::parse(4, "0.5", "0").unwrap();
        let g = StateGraph::build(&p, 5).unwrap();
        let (m, pl) = (g.named_code(NamedState::Minus), g.named_code(NamedState::Plus));
        let gate = gate_set(&p).unwrap();
        let v = verify_gate(&g, m, pl, &gate.gate().unwrap().classes).unwrap();
        assert!(v.is_gate, "{v:?}");
        let v = verify_gate(&g, m, pl, &[]).unwrap();
        assert!(!v.is_gate);
        let w = v.witness.unwrap();
        assert_eq!(w[0], ClassState::raw(0, 0, 0));
        assert_eq!(*w.last().unwrap(), ClassState::raw(4, 4, 4));
    }

    #[test]
    fn redundant_classes_are_flagged() {
        let p = Params::parse(4, "0.5", "0").unwrap();
        let g = StateGraph::build(&p, 5).unwrap();
        let (m, pl) = (g.named_code(NamedState::Minus), g.named_code(NamedState::Plus));
        let v = verify_gate(&g, m, pl, &v_all_saddles(&g, m, pl)).unwrap();
        assert!(v.is_gate);
        let first_half = vec![ClassState::raw(2, 0, 0), ClassState::raw(0, 2, 0)];
        let v2 = verify_gate(&g, m, pl, &first_half).unwrap();
        assert!(v2.is_gate && v2.minimal == Some(true));
        assert_eq!(v.minimal, Some(false));
    }

    fn v_all_saddles(g: &StateGraph, a: u32, b: u32) -> Vec<ClassState> {
        g.classes_of(&g.minimal_saddles(a, b).unwrap())
    }
}
