use serde::{Deserialize, Serialize};

use super::{verify_gate, GateVerdict, StateGraph};
use crate::classes::{enumerate_classes, ClassState};
use crate::error::Result;
use crate::exact::{format_rational, rat, serde_rational, Rational};
use crate::landscape::{
    gamma_values, gate_set, identify_states, manifold_minimum, Barrier, Gate, NamedState, Regime, Transition,
};
use crate::params::Params;

/// One closed-form versus brute-force comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub transition: Transition,
    #[serde(with = "serde_rational")]
    pub phi: Rational,
    #[serde(with = "serde_rational")]
    pub barrier: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityEntry {
    pub class: ClassState,
    #[serde(with = "serde_rational")]
    pub energy: Rational,
    /// `"inf"` for global minima.
    pub level: String,
}

/// Brute-force results for one parameter point together with the checks
/// against the closed-form predictions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "serde_rational")]
    pub h: Rational,
    pub regime: Regime,
    pub stable: Vec<ClassState>,
    pub metastable: Vec<ClassState>,
    pub phi: Vec<PhiEntry>,
    pub stability: Vec<StabilityEntry>,
    pub gate: Option<Gate>,
    pub gate_verdict: Option<GateVerdict>,
    pub checks: Vec<Check>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The (ε, h) grid used by `verify --grid default`: ε ∈ {−1, −0.6, −0.3, 0,
/// 0.3, 0.6, 1} × h ∈ {0, 0.25, 0.5, 1} plus the boundary points
/// (−0.5, 0.5) and (−0.25, 0.25).
pub fn default_grid() -> Vec<(Rational, Rational)> {
    let eps = [rat(-1, 1), rat(-3, 5), rat(-3, 10), rat(0, 1), rat(3, 10), rat(3, 5), rat(1, 1)];
    let hs = [rat(0, 1), rat(1, 4), rat(1, 2), rat(1, 1)];
    let mut out: Vec<(Rational, Rational)> = eps.iter().flat_map(|&e| hs.iter().map(move |&h| (e, h))).collect();
    out.push((rat(-1, 2), rat(1, 2)));
    out.push((rat(-1, 4), rat(1, 4)));
    out
}

fn class_list(cs: &[ClassState]) -> String {
    format!("[{}]", cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
}

fn named_classes(states: &[NamedState], n: usize) -> Vec<ClassState> {
    let mut out: Vec<ClassState> = states.iter().map(|s| s.class(n)).collect();
    out.sort();
    out
}

fn barrier_of(g: &StateGraph, t: &Transition) -> Result<(Rational, Rational)> {
    let from = g.named_code(t.from);
    let targets: Vec<u32> = t.to.iter().map(|&s| g.named_code(s)).collect();
    let phi = g.communication_height_to(from, &targets)?;
    Ok((phi, phi - g.energy(from)))
}

fn barrier_check(
    name: &str,
    g: &StateGraph,
    b: &Barrier,
    alternative: Option<&crate::landscape::Formula>,
    phi: &mut Vec<PhiEntry>,
) -> Result<Check> {
    let (height, observed) = barrier_of(g, &b.transition)?;
    phi.push(PhiEntry { transition: b.transition.clone(), phi: height, barrier: observed });
    let mut matched: Vec<String> = Vec::new();
    if observed == b.value() {
        matched.push(b.formula.expr.clone());
    }
    if let Some(alt) = alternative {
        if observed == alt.value && alt.expr != b.formula.expr {
            matched.push(alt.expr.clone());
        }
    }
    let matched = if matched.is_empty() { "no printed formula".to_string() } else { matched.join(" and ") };
    let mut expected = format!("{} = {}", b.formula.expr, format_rational(b.value()));
    if let Some(alt) = alternative {
        expected.push_str(&format!(" (alternative {} = {})", alt.expr, format_rational(alt.value)));
    }
    Ok(Check {
        name: format!("{name} {}", b.transition),
        passed: observed == b.value(),
        expected,
        observed: format!("Φ − H = {}; matches {matched}", format_rational(observed)),
    })
}

/// Runs every brute-force check for one parameter point.
pub fn run_checks(params: &Params, n_max: usize) -> Result<OracleReport> {
    let g = StateGraph::build(params, n_max)?;
    let n = params.n();
    let regime = Regime::of(params);
    let predicted = identify_states(params)?;
    let gammas = gamma_values(params)?;
    let levels = g.stability_levels();
    let mut checks = Vec::new();

    let stable = g.classes_of(&g.ground_states());
    let want = named_classes(&predicted.stable, n);
    checks.push(Check {
        name: "stable set".into(),
        passed: stable == want && g.min_energy() == predicted.min_energy_value,
        expected: format!("{} at H = {}", class_list(&want), format_rational(predicted.min_energy_value)),
        observed: format!("{} at H = {}", class_list(&stable), format_rational(g.min_energy())),
    });

    let metastable = g.classes_of(&g.metastable_states(&levels));
    let want = named_classes(&predicted.metastable, n);
    checks.push(Check {
        name: "metastable set".into(),
        passed: metastable == want,
        expected: class_list(&want),
        observed: class_list(&metastable),
    });

    let mut phi = Vec::new();
    let alt_s = gammas.discrepancies.iter().find(|d| d.quantity == "Γs").map(|d| &d.alternative);
    if let Some(b) = &gammas.gamma_s {
        checks.push(barrier_check("Γs", &g, b, alt_s, &mut phi)?);
    }
    if let Some(b) = &gammas.gamma_m {
        checks.push(barrier_check("Γm", &g, b, None, &mut phi)?);
    }

    let named: Vec<ClassState> = NamedState::ALL.iter().map(|s| s.class(n)).collect();
    let mut stability = Vec::new();
    let mut nonzero = Vec::new();
    for c in enumerate_classes(n) {
        let rep = g.class_members(c)[0];
        let level = levels[rep as usize];
        if !named.contains(&c) && level != Some(Rational::from_integer(0)) {
            nonzero.push(c);
        }
        stability.push(StabilityEntry {
            class: c,
            energy: g.energy(rep),
            level: level.map(format_rational).unwrap_or_else(|| "inf".into()),
        });
    }
    checks.push(Check {
        name: "V = 0 off the named states".into(),
        passed: nonzero.is_empty(),
        expected: "[]".into(),
        observed: class_list(&nonzero),
    });

    let mut bad_slices = Vec::new();
    for p in 0..=2 * n {
        let m = manifold_minimum(p, params)?;
        let on_slice: Vec<ClassState> = enumerate_classes(n).into_iter().filter(|c| c.plus_count() == p).collect();
        let min = on_slice.iter().map(|&c| g.energy(g.class_members(c)[0])).min().expect("nonempty slice");
        let argmin: Vec<ClassState> = on_slice.iter().copied().filter(|&c| g.energy(g.class_members(c)[0]) == min).collect();
        if min != m.value || !m.classes.iter().all(|c| argmin.contains(c)) {
            bad_slices.push(p);
        }
    }
    checks.push(Check {
        name: "manifold minima".into(),
        passed: bad_slices.is_empty(),
        expected: "closed form on every slice".into(),
        observed: format!("mismatching slices {bad_slices:?}"),
    });

    let (gate, gate_verdict) = match gate_set(params)?.gate() {
        Some(gate) => {
            let from = g.named_code(gate.transition.from);
            let to = g.named_code(gate.transition.to[0]);
            let verdict = verify_gate(&g, from, to, &gate.classes)?;
            let witness = verdict.witness.as_ref().map(|w| class_list(w)).unwrap_or_default();
            checks.push(Check {
                name: format!("gate {} for {}", gate.label, gate.transition),
                passed: verdict.is_gate,
                expected: class_list(&gate.classes),
                observed: if verdict.is_gate {
                    format!("gate (minimal: {:?})", verdict.minimal)
                } else {
                    format!(
                        "not a gate; saddles {}; outside saddles {}; avoiding path {}",
                        class_list(&verdict.saddle_classes),
                        class_list(&verdict.outside_saddles),
                        witness
                    )
                },
            });
            let slices: Vec<usize> = gate.classes.iter().map(|c| c.plus_count()).collect();
            let off_slice: Vec<ClassState> =
                verdict.saddle_classes.iter().copied().filter(|c| !slices.contains(&c.plus_count())).collect();
            checks.push(Check {
                name: format!("saddles on the {} slices", gate.label),
                passed: off_slice.is_empty(),
                expected: format!("p ∈ {slices:?}"),
                observed: format!("saddles {}", class_list(&verdict.saddle_classes)),
            });
            (Some(gate.clone()), Some(verdict))
        }
        None => (None, None),
    };

    Ok(OracleReport {
        n,
        epsilon: params.epsilon(),
        h: params.h(),
        regime,
        stable,
        metastable,
        phi,
        stability,
        gate,
        gate_verdict,
        checks,
    })
}
