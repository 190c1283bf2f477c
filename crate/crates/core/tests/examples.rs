use clustered_ising::classes::{class_energy_exact, class_flip_delta_exact, flip_multiplicities, ClassState, MoveType};
use clustered_ising::landscape::{
    critical_slices, gamma_values, gate_set, identify_states, manifold_minimum, reference_path, NamedState, PathKind, Regime,
};
use clustered_ising::model::{build_graph, hamiltonian_exact, SpinConfig};
use clustered_ising::oracle::{descent_class_move, verify_gate, StateGraph};
use clustered_ising::{parse_rational, rat, Params, Rational};

fn params(n: usize, e: &str, h: &str) -> Params {
    Params::parse(n, e, h).unwrap()
}

fn cls(n: usize, p1: usize, p2: usize, a: usize) -> ClassState {
    ClassState::new(n, p1, p2, a).unwrap()
}

fn value(p: &Params, c: ClassState) -> Rational {
    class_energy_exact(c, p.n()).unwrap().eval(p.epsilon(), p.h())
}

fn figure_configuration() -> SpinConfig {
    let mut signs = vec![-1i8; 14];
    for v in [0, 1, 2, 3, 7, 8, 9] {
        signs[v] = 1;
    }
    SpinConfig::from_signs(&signs).unwrap()
}

#[test]
fn graph_counts() {
    let g = build_graph(&params(7, "0", "0"));
    assert_eq!((g.internal_edges().len(), g.cross_edges().len(), g.edge_count()), (42, 7, 49));
    let g = build_graph(&params(2, "0", "0"));
    assert_eq!((g.internal_edges().len(), g.cross_edges().len()), (2, 2));
    assert!((0..4).all(|v| g.degree(v) == 2));
    let g = build_graph(&params(4, "0", "0").with_clusters(3).unwrap());
    assert_eq!(g.edge_count(), 30);
    assert!((0..12).all(|v| g.degree(v) == 5));
}

#[test]
fn hamiltonian_examples() {
    let p = params(3, "0.5", "0.25");
    let g = build_graph(&p);
    assert_eq!(hamiltonian_exact(&g, &SpinConfig::all_plus(6)).unwrap().eval(p.epsilon(), p.h()), rat(-9, 1));
    let p = params(2, "0", "0");
    assert_eq!(hamiltonian_exact(&build_graph(&p), &SpinConfig::all_minus(4)).unwrap().eval(p.epsilon(), p.h()), rat(-2, 1));
    let p = params(7, "1", "0");
    let g = build_graph(&p);
    let sigma = figure_configuration();
    assert_eq!(clustered_ising::classes::classify(&g, &sigma).unwrap(), cls(7, 4, 3, 3));
    assert_eq!(hamiltonian_exact(&g, &sigma).unwrap().eval(p.epsilon(), p.h()), rat(1, 1));
    assert_eq!(value(&p, cls(7, 4, 3, 3)), rat(1, 1));
}

#[test]
fn class_energy_examples() {
    for n in 2..=6 {
        let p = params(n, "0.3", "0.4");
        let (n_r, e, h) = (rat(n as i64, 1), p.epsilon(), p.h());
        assert_eq!(value(&p, cls(n, n, n, n)), -n_r * n_r + n_r - e * n_r - rat(2, 1) * h * n_r);
        let q = params(n, "0", "0");
        assert_eq!(value(&q, cls(n, n, 0, 0)), n_r - n_r * n_r);
    }
}

#[test]
fn multiplicity_examples() {
    let m = flip_multiplicities(cls(7, 4, 3, 3), 7).unwrap();
    use clustered_ising::classes::{Cluster::*, Direction::*};
    let get = |c, d, a| m.get(MoveType::new(c, d, a));
    assert_eq!([get(One, Up, true), get(One, Up, false), get(One, Down, true), get(One, Down, false)], [0, 3, 3, 1]);
    assert_eq!([get(Two, Up, true), get(Two, Up, false), get(Two, Down, true), get(Two, Down, false)], [1, 3, 3, 0]);
    assert_eq!(m.total(), 14);
    let z = flip_multiplicities(cls(5, 0, 0, 0), 5).unwrap();
    assert_eq!(z.get(MoveType::new(One, Up, false)) + z.get(MoveType::new(Two, Up, false)), 10);
}

#[test]
fn flip_delta_examples() {
    use clustered_ising::classes::{Cluster::*, Direction::*};
    let p = params(3, "0.5", "0");
    let d = class_flip_delta_exact(cls(3, 1, 0, 0), MoveType::new(One, Up, false), 3).unwrap();
    assert_eq!(d.eval(p.epsilon(), p.h()), rat(1, 1));
    for (p1, p2, a) in [(1, 2, 1), (2, 1, 0), (0, 3, 0)] {
        let c = cls(3, p1, p2, a);
        let plus = class_flip_delta_exact(c, MoveType::new(One, Up, true), 3);
        let same = class_flip_delta_exact(c, MoveType::new(One, Up, false), 3);
        if let (Ok(x), Ok(y)) = (plus, same) {
            assert_eq!((x - y).eval(p.epsilon(), p.h()), -rat(4, 1) * p.epsilon());
        }
    }
}

#[test]
fn state_set_examples() {
    let s = identify_states(&params(4, "0.5", "0")).unwrap();
    assert_eq!(s.stable, vec![NamedState::Plus, NamedState::Minus]);
    assert_eq!(s.metastable, vec![NamedState::PlusMinus, NamedState::MinusPlus]);
    assert_eq!(s.min_energy_value, rat(-14, 1));
    let s = identify_states(&params(4, "0", "0")).unwrap();
    assert_eq!(s.stable.len(), 4);
    assert!(s.metastable.is_empty());
    let p = params(4, "-0.8", "0.3");
    let s = identify_states(&p).unwrap();
    assert_eq!(s.stable, vec![NamedState::PlusMinus, NamedState::MinusPlus]);
    assert_eq!(s.metastable, vec![NamedState::Plus]);
    assert_eq!(s.min_energy_value, rat(-16 + 4, 1) + p.epsilon() * rat(4, 1));
    assert_eq!(Regime::of(&params(4, "-0.5", "0.5")), Regime::HPosEpsNegEq);
}

#[test]
fn barrier_examples() {
    let g = gamma_values(&params(4, "0.5", "0")).unwrap();
    assert_eq!(g.gamma_s.unwrap().value(), rat(10, 1));
    assert_eq!(g.gamma_m.unwrap().value(), rat(6, 1));
    let g = gamma_values(&params(3, "-0.5", "0")).unwrap();
    assert_eq!(g.gamma_s.unwrap().value(), rat(6, 1));
    let g = gamma_values(&params(4, "0.5", "0.25")).unwrap();
    assert_eq!(g.gamma_m.unwrap().value(), rat(9, 1));
}

#[test]
fn manifold_examples() {
    for n in 2..=6 {
        let p = params(n, "0.4", "0.2");
        let n_r = rat(n as i64, 1);
        let m0 = manifold_minimum(0, &p).unwrap();
        assert_eq!(m0.value, n_r - n_r * n_r - p.epsilon() * n_r + rat(2, 1) * p.h() * n_r);
        assert_eq!(m0.classes, vec![cls(n, 0, 0, 0)]);
        let top = manifold_minimum(2 * n, &p).unwrap();
        let lowest = (0..=2 * n).map(|k| manifold_minimum(k, &p).unwrap().value).min().unwrap();
        assert_eq!(top.value, lowest);
    }
}

#[test]
fn critical_slice_examples() {
    let ps = |p: &Params| critical_slices(p).unwrap().into_iter().map(|s| s.p).collect::<Vec<_>>();
    let s = ps(&params(4, "0.5", "0"));
    assert!(s.contains(&2) && s.contains(&6));
    let s = ps(&params(5, "-0.5", "0"));
    assert!(s.contains(&2) && s.contains(&8));
    let p = Params::new(4, parse_rational("-0.8").unwrap(), parse_rational("0.4").unwrap()).unwrap();
    assert_eq!(ps(&p), vec![1]);
}

#[test]
fn gate_examples() {
    let classes = |p: &Params| {
        let mut c = gate_set(p).unwrap().gate().unwrap().classes.clone();
        c.sort();
        c
    };
    let mut expected = vec![cls(4, 2, 0, 0), cls(4, 0, 2, 0), cls(4, 4, 2, 2), cls(4, 2, 4, 2)];
    expected.sort();
    assert_eq!(classes(&params(4, "0.5", "0")), expected);
    let mut expected = vec![cls(5, 3, 0, 0), cls(5, 0, 3, 0)];
    expected.sort();
    assert_eq!(classes(&params(5, "0.5", "0.25")), expected);
    assert_eq!(classes(&params(5, "-0.2", "0.6")), vec![cls(5, 5, 2, 2)]);
}

#[test]
fn reference_path_examples() {
    let p = params(4, "0.7", "0");
    let r = reference_path(&p, PathKind::Bar).unwrap();
    assert_eq!(r.max_energy, rat(-4, 1));
    assert_eq!(r.argmax, vec![2, 6]);
    let p = params(5, "-0.3", "0.6");
    let r = reference_path(&p, PathKind::Tilde).unwrap();
    let n = rat(5, 1);
    assert_eq!(r.max_energy, n - (n * n + rat(1, 1)) / rat(2, 1) + p.epsilon() - p.h() * (n - rat(1, 1)));
    assert!(r.argmax.contains(&2));
    for (e, h) in [("0.5", "0"), ("-0.5", "0"), ("0.5", "0.25"), ("-0.3", "0.6"), ("-0.6", "0.25")] {
        for n in 2..=6 {
            let p = params(n, e, h);
            let Some(kind) = Regime::of(&p).reference_path_kind() else { continue };
            let steps = reference_path(&p, kind).unwrap().steps;
            for w in steps.windows(2) {
                let from = w[0].class;
                assert!(
                    MoveType::ALL.iter().any(|m| m.target(from, n) == Some(w[1].class) && m.multiplicity(from, n) > 0),
                    "{kind:?} n = {n}: {from} → {}",
                    w[1].class
                );
            }
        }
    }
}

#[test]
fn oracle_examples() {
    let p = params(4, "0.5", "0");
    let g = StateGraph::build(&p, 6).unwrap();
    let (minus, plus, pm) =
        (g.named_code(NamedState::Minus), g.named_code(NamedState::Plus), g.named_code(NamedState::PlusMinus));
    assert_eq!(g.communication_height(minus, minus).unwrap(), g.energy(minus));
    assert_eq!(g.communication_height(minus, plus).unwrap() - g.energy(minus), rat(10, 1));
    assert_eq!(g.communication_height(minus, pm).unwrap(), g.communication_height(pm, minus).unwrap());
    assert_eq!(g.stability_level(pm), Some(rat(6, 1)));
    assert_eq!(g.stability_level(plus), None);
    let gate = gate_set(&p).unwrap().gate().unwrap().classes.clone();
    let saddles = g.minimal_saddles(minus, plus).unwrap();
    let phi = g.communication_height(minus, plus).unwrap();
    assert!(saddles.iter().all(|&s| g.energy(s) == phi));
    assert!(g.classes_of(&saddles).iter().all(|c| gate.contains(c)));
    assert!(verify_gate(&g, minus, plus, &gate).unwrap().is_gate);
    let empty = verify_gate(&g, minus, plus, &[]).unwrap();
    assert!(!empty.is_gate && empty.witness.is_some());
}

#[test]
fn odd_saddles_for_negative_epsilon() {
    let p = params(3, "-0.5", "0");
    let g = StateGraph::build(&p, 6).unwrap();
    let (pm, mp) = (g.named_code(NamedState::PlusMinus), g.named_code(NamedState::MinusPlus));
    let slices: Vec<usize> = critical_slices(&p).unwrap().into_iter().map(|s| s.p).collect();
    for c in g.classes_of(&g.minimal_saddles(pm, mp).unwrap()) {
        assert!(slices.contains(&c.plus_count()), "{c} off {slices:?}");
    }
}

#[test]
fn descent_fixed_points_are_named_states() {
    for n in 2..=5 {
        let p = params(n, "0.5", "0");
        for c in clustered_ising::classes::enumerate_classes(n) {
            let named = NamedState::from_class(c, n).is_some();
            assert_eq!(descent_class_move(c, &p).is_none(), named, "n = {n}, {c}");
        }
    }
    let p = params(4, "0.5", "0");
    let d = descent_class_move(cls(4, 4, 2, 2), &p).unwrap();
    assert_eq!(d.target, cls(4, 4, 3, 3));
}
