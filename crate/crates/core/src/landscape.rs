//! Closed-form predictions for the energy landscape of G(2,n).
//!
//! Everything here is exact: ε and h are rationals, energies are evaluated
//! from their affine form, and regime boundaries are decided by exact
//! comparison.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classes::{class_energy_exact, move_between, ClassState};
use crate::error::{Error, Result};
use crate::exact::{format_rational, serde_rational, to_f64, Affine, Rational};
use crate::params::Params;

/// The (ε, h) regimes in which the landscape changes qualitatively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "H0_EPS_POS")]
    H0EpsPos,
    #[serde(rename = "H0_EPS_ZERO")]
    H0EpsZero,
    #[serde(rename = "H0_EPS_NEG")]
    H0EpsNeg,
    #[serde(rename = "H_POS_EPS_NONNEG")]
    HPosEpsNonneg,
    /// `0 < −ε < h`.
    #[serde(rename = "H_POS_EPS_NEG_WEAK")]
    HPosEpsNegWeak,
    /// `h = −ε`.
    #[serde(rename = "H_POS_EPS_NEG_EQ")]
    HPosEpsNegEq,
    /// `0 < h < −ε`.
    #[serde(rename = "H_POS_EPS_NEG_STRONG")]
    HPosEpsNegStrong,
}

impl Regime {
    pub fn classify(epsilon: Rational, h: Rational) -> Regime {
        let zero = Rational::zero();
        if h.is_zero() {
            match epsilon.cmp(&zero) {
                std::cmp::Ordering::Greater => Regime::H0EpsPos,
                std::cmp::Ordering::Equal => Regime::H0EpsZero,
                std::cmp::Ordering::Less => Regime::H0EpsNeg,
            }
        } else if epsilon >= zero {
            Regime::HPosEpsNonneg
        } else {
            match (-epsilon).cmp(&h) {
                std::cmp::Ordering::Less => Regime::HPosEpsNegWeak,
                std::cmp::Ordering::Equal => Regime::HPosEpsNegEq,
                std::cmp::Ordering::Greater => Regime::HPosEpsNegStrong,
            }
        }
    }

    pub fn of(params: &Params) -> Regime {
        Regime::classify(params.epsilon(), params.h())
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Regime::H0EpsPos => "H0_EPS_POS",
            Regime::H0EpsZero => "H0_EPS_ZERO",
            Regime::H0EpsNeg => "H0_EPS_NEG",
            Regime::HPosEpsNonneg => "H_POS_EPS_NONNEG",
            Regime::HPosEpsNegWeak => "H_POS_EPS_NEG_WEAK",
            Regime::HPosEpsNegEq => "H_POS_EPS_NEG_EQ",
            Regime::HPosEpsNegStrong => "H_POS_EPS_NEG_STRONG",
        }
    }

    pub fn is_zero_field(&self) -> bool {
        matches!(self, Regime::H0EpsPos | Regime::H0EpsZero | Regime::H0EpsNeg)
    }

    /// Reference path whose maximum bounds the regime's barrier.
    pub fn reference_path_kind(&self) -> Option<PathKind> {
        match self {
            Regime::H0EpsPos | Regime::H0EpsZero | Regime::HPosEpsNonneg => Some(PathKind::Bar),
            Regime::H0EpsNeg => Some(PathKind::Hat),
            Regime::HPosEpsNegWeak => Some(PathKind::Tilde),
            Regime::HPosEpsNegStrong => Some(PathKind::Check),
            Regime::HPosEpsNegEq => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The four homogeneous-per-cluster configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NamedState {
    /// All plus, C(n,n,n).
    #[serde(rename = "+1")]
    Plus,
    /// All minus, C(0,0,0).
    #[serde(rename = "-1")]
    Minus,
    /// Cluster 1 plus, cluster 2 minus, C(n,0,0).
    #[serde(rename = "+-1")]
    PlusMinus,
    /// Cluster 1 minus, cluster 2 plus, C(0,n,0).
    #[serde(rename = "-+1")]
    MinusPlus,
}

impl NamedState {
    pub const ALL: [NamedState; 4] = [NamedState::Plus, NamedState::Minus, NamedState::PlusMinus, NamedState::MinusPlus];

    pub fn class(&self, n: usize) -> ClassState {
        match self {
            NamedState::Plus => ClassState::raw(n, n, n),
            NamedState::Minus => ClassState::raw(0, 0, 0),
            NamedState::PlusMinus => ClassState::raw(n, 0, 0),
            NamedState::MinusPlus => ClassState::raw(0, n, 0),
        }
    }

    pub fn from_class(c: ClassState, n: usize) -> Option<NamedState> {
        NamedState::ALL.into_iter().find(|s| s.class(n) == c)
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            NamedState::Plus => "+1",
            NamedState::Minus => "-1",
            NamedState::PlusMinus => "±1",
            NamedState::MinusPlus => "∓1",
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+1" | "1" | "plus" => Ok(NamedState::Plus),
            "-1" | "minus" => Ok(NamedState::Minus),
            "+-1" | "±1" | "pm" => Ok(NamedState::PlusMinus),
            "-+1" | "∓1" | "mp" => Ok(NamedState::MinusPlus),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

fn named_list(states: &[NamedState]) -> String {
    let parts: Vec<&str> = states.iter().map(|s| s.symbol()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Stable and metastable sets with the ground-state energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSets {
    pub stable: Vec<NamedState>,
    pub metastable: Vec<NamedState>,
    pub min_energy: Affine,
    #[serde(with = "serde_rational")]
    pub min_energy_value: Rational,
}

pub fn identify_states(params: &Params) -> Result<StateSets> {
    params.require_two_clusters()?;
    use NamedState::*;
    let (stable, metastable) = match Regime::of(params) {
        Regime::H0EpsPos => (vec![Plus, Minus], vec![PlusMinus, MinusPlus]),
        Regime::H0EpsZero => (vec![Plus, Minus, PlusMinus, MinusPlus], vec![]),
        Regime::H0EpsNeg => (vec![PlusMinus, MinusPlus], vec![Plus, Minus]),
        Regime::HPosEpsNonneg => (vec![Plus], vec![Minus]),
        Regime::HPosEpsNegWeak => (vec![Plus], vec![PlusMinus, MinusPlus]),
        Regime::HPosEpsNegEq => (vec![Plus, PlusMinus, MinusPlus], vec![Minus]),
        Regime::HPosEpsNegStrong => (vec![PlusMinus, MinusPlus], vec![Plus]),
    };
    let n = params.n();
    let min_energy = class_energy_exact(stable[0].class(n), n)?;
    let min_energy_value = min_energy.eval(params.epsilon(), params.h());
    Ok(StateSets { stable, metastable, min_energy, min_energy_value })
}

/// A closed-form value together with the printed expression it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Formula {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub expr: String,
}

impl Formula {
    fn new(value: Rational, expr: &str) -> Self {
        Formula { value, expr: expr.to_string() }
    }
}

fn q(x: i64) -> Rational {
    Rational::from_integer(x)
}

fn half(x: Rational) -> Rational {
    x / q(2)
}

/// Barrier between stable states at `h = 0`: `n²/2 + |ε|n` (even),
/// `(n²−1)/2 + |ε|(n+1)` (odd).
pub fn gamma0_s(n: usize, eps: Rational) -> Formula {
    let (nn, e) = (q(n as i64), eps.abs());
    if n.is_multiple_of(2) {
        Formula::new(half(nn * nn) + e * nn, "n²/2 + |ε|n")
    } else {
        Formula::new(half(nn * nn - q(1)) + e * (nn + q(1)), "(n²−1)/2 + |ε|(n+1)")
    }
}

/// Maximal stability level at `h = 0`: `n²/2 − |ε|n` (even),
/// `(n²−1)/2 − |ε|(n−1)` (odd). The same expression is also printed as a
/// competing value of the stable-to-stable barrier.
pub fn gamma_m_zero_field(n: usize, eps: Rational) -> Formula {
    let (nn, e) = (q(n as i64), eps.abs());
    if n.is_multiple_of(2) {
        Formula::new(half(nn * nn) - e * nn, "n²/2 − |ε|n")
    } else {
        Formula::new(half(nn * nn - q(1)) - e * (nn - q(1)), "(n²−1)/2 − |ε|(n−1)")
    }
}

/// Γ¹ₘ, the `−1 → +1` barrier for `0 ≤ ε`, `h > 0`.
pub fn gamma1_m(n: usize, eps: Rational, h: Rational) -> Formula {
    let nn = q(n as i64);
    if n.is_multiple_of(2) {
        Formula::new(half(nn * nn) + nn * (eps - h), "n²/2 + n(ε−h)")
    } else if h <= eps {
        Formula::new(half(nn * nn - q(1)) + (nn + q(1)) * (eps - h), "(n²−1)/2 + (n+1)(ε−h)")
    } else {
        Formula::new(half(nn * nn - q(1)) + (nn - q(1)) * (eps - h), "(n²−1)/2 + (n−1)(ε−h)")
    }
}

/// Γ²ₘ, the `±1 → +1` barrier for `0 < −ε < h`.
pub fn gamma2_m(n: usize, eps: Rational, h: Rational) -> Formula {
    let nn = q(n as i64);
    if n.is_multiple_of(2) {
        Formula::new(half(nn * nn) - nn * (eps + h), "n²/2 − n(ε+h)")
    } else {
        Formula::new(half(nn * nn - q(1)) - (nn - q(1)) * (eps + h), "(n²−1)/2 − (n−1)(ε+h)")
    }
}

/// Γʰₛ as printed in the `n(h−ε)` form for `0 < h < −ε`; this is the
/// barrier of the path through `−1`.
pub fn gamma_h_s(n: usize, eps: Rational, h: Rational) -> Formula {
    let nn = q(n as i64);
    let d = h - eps;
    if n % 2 == 1 {
        Formula::new(half(nn * nn - q(1)) + (nn + q(1)) * d, "(n²−1)/2 + (n+1)(h−ε)")
    } else if d < q(1) {
        Formula::new(half(nn * nn) + nn * d, "n²/2 + n(h−ε)")
    } else {
        Formula::new(half(nn * nn - q(4)) + (nn + q(2)) * d, "(n²−4)/2 + (n+2)(h−ε)")
    }
}

/// Barrier between `±1` and `∓1` for `0 < h < −ε` in the `−n(ε+h)` form:
/// `n²/2 − n(ε+h)` (even), `(n²−1)/2 − (n+1)(ε+h)` (odd).
pub fn gamma_s_strong(n: usize, eps: Rational, h: Rational) -> Formula {
    let nn = q(n as i64);
    if n.is_multiple_of(2) {
        Formula::new(half(nn * nn) - nn * (eps + h), "n²/2 − n(ε+h)")
    } else {
        Formula::new(half(nn * nn - q(1)) - (nn + q(1)) * (eps + h), "(n²−1)/2 − (n+1)(ε+h)")
    }
}

/// Maximal stability level (of `+1`) for `0 < h < −ε`.
pub fn gamma_m_strong(n: usize, eps: Rational, h: Rational) -> Formula {
    let nn = q(n as i64);
    if n.is_multiple_of(2) {
        Formula::new(half(nn * nn) + nn * (eps + h), "n²/2 + n(ε+h)")
    } else {
        Formula::new(half(nn * nn - q(1)) + (nn - q(1)) * (eps + h), "(n²−1)/2 + (n−1)(ε+h)")
    }
}

/// A transition from one named state to a set of named states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: NamedState,
    pub to: Vec<NamedState>,
}

impl Transition {
    pub fn new(from: NamedState, to: &[NamedState]) -> Self {
        Transition { from, to: to.to_vec() }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.to.len() == 1 {
            write!(f, "{} → {}", self.from, self.to[0])
        } else {
            write!(f, "{} → {}", self.from, named_list(&self.to))
        }
    }
}

/// A barrier value `Φ(from, to) − H(from)` predicted in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub formula: Formula,
    pub value_f64: f64,
    pub transition: Transition,
}

impl Barrier {
    fn new(formula: Formula, transition: Transition) -> Self {
        Barrier { value_f64: to_f64(formula.value), formula, transition }
    }

    pub fn value(&self) -> Rational {
        self.formula.value
    }
}

/// Two printed closed forms that disagree for the same quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub adopted: Formula,
    pub alternative: Formula,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaValues {
    pub gamma_s: Option<Barrier>,
    pub gamma_m: Option<Barrier>,
    pub discrepancies: Vec<Discrepancy>,
    pub not_stated: Vec<String>,
}

pub fn gamma_values(params: &Params) -> Result<GammaValues> {
    params.require_two_clusters()?;
    use NamedState::*;
    let (n, e, h) = (params.n(), params.epsilon(), params.h());
    let mut out = GammaValues { gamma_s: None, gamma_m: None, discrepancies: vec![], not_stated: vec![] };
    match Regime::of(params) {
        r @ (Regime::H0EpsPos | Regime::H0EpsZero | Regime::H0EpsNeg) => {
            let (tunnel, meta) = if r == Regime::H0EpsNeg {
                (Transition::new(PlusMinus, &[MinusPlus]), Transition::new(Plus, &[PlusMinus, MinusPlus]))
            } else {
                (Transition::new(Minus, &[Plus]), Transition::new(PlusMinus, &[Plus, Minus]))
            };
            out.gamma_s = Some(Barrier::new(gamma0_s(n, e), tunnel));
            if r == Regime::H0EpsZero {
                out.not_stated.push("Γm: no metastable state at ε = 0, h = 0".into());
            } else {
                out.gamma_m = Some(Barrier::new(gamma_m_zero_field(n, e), meta));
            }
            out.discrepancies.push(Discrepancy {
                quantity: "Γs".into(),
                adopted: gamma0_s(n, e),
                alternative: gamma_m_zero_field(n, e),
                note: "two printed forms of the stable-to-stable barrier; the adopted one agrees with the reference-path bound and brute force".into(),
            });
        }
        Regime::HPosEpsNonneg => {
            out.gamma_m = Some(Barrier::new(gamma1_m(n, e, h), Transition::new(Minus, &[Plus])));
            out.not_stated.push("Γs: single stable state".into());
        }
        Regime::HPosEpsNegWeak => {
            out.gamma_m = Some(Barrier::new(gamma2_m(n, e, h), Transition::new(PlusMinus, &[Plus])));
            out.not_stated.push("Γs: single stable state".into());
        }
        Regime::HPosEpsNegEq => {
            out.not_stated.push("Γs and Γm are not stated for h = −ε".into());
        }
        Regime::HPosEpsNegStrong => {
            out.gamma_s = Some(Barrier::new(gamma_s_strong(n, e, h), Transition::new(PlusMinus, &[MinusPlus])));
            out.gamma_m = Some(Barrier::new(gamma_m_strong(n, e, h), Transition::new(Plus, &[PlusMinus, MinusPlus])));
            out.discrepancies.push(Discrepancy {
                quantity: "Γs".into(),
                adopted: gamma_s_strong(n, e, h),
                alternative: gamma_h_s(n, e, h),
                note: "the n(h−ε) form is the barrier of the path through −1; the optimal path passes through +1 and brute force matches the adopted form".into(),
            });
        }
    }
    Ok(out)
}

/// Minimum of H over the manifold of configurations with `p` plus spins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldMinimum {
    pub p: usize,
    pub energy: Affine,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub classes: Vec<ClassState>,
}

pub fn manifold_minimum(p: usize, params: &Params) -> Result<ManifoldMinimum> {
    params.require_two_clusters()?;
    let n = params.n();
    if p > 2 * n {
        return Err(Error::Domain(format!("p = {p} exceeds 2n = {}", 2 * n)));
    }
    let (ni, pi) = (n as i64, p as i64);
    let (energy, mut classes) = if p <= n {
        let e = Affine::new(ni - (pi - ni).pow(2) - pi * pi, 2 * pi - ni, -2 * (pi - ni));
        (e, vec![ClassState::raw(p, 0, 0), ClassState::raw(0, p, 0)])
    } else {
        let e = Affine::new(ni - (2 * ni - pi).pow(2) - (pi - ni).pow(2), 3 * ni - 2 * pi, -2 * (pi - ni));
        (e, vec![ClassState::raw(n, p - n, p - n), ClassState::raw(p - n, n, p - n)])
    };
    classes.sort();
    classes.dedup();
    Ok(ManifoldMinimum { p, energy, value: energy.eval(params.epsilon(), params.h()), classes })
}

/// A critical slice `p*` (the manifold where the relevant maximum sits).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSlice {
    pub label: String,
    pub p: usize,
}

pub fn critical_slices(params: &Params) -> Result<Vec<CriticalSlice>> {
    params.require_two_clusters()?;
    let (n, e, h) = (params.n(), params.epsilon(), params.h());
    let even = n % 2 == 0;
    let slice = |label: &str, p: usize| CriticalSlice { label: label.to_string(), p };
    Ok(match Regime::of(params) {
        Regime::H0EpsPos | Regime::H0EpsZero | Regime::H0EpsNeg => {
            let left = if even {
                n / 2
            } else if e >= Rational::zero() {
                n.div_ceil(2)
            } else {
                (n - 1) / 2
            };
            let right = if even {
                n + n / 2
            } else if e >= Rational::zero() {
                n + (n - 1) / 2
            } else {
                n + n.div_ceil(2)
            };
            vec![slice("p*_left", left), slice("p*_right", right)]
        }
        Regime::HPosEpsNonneg => {
            let p = if even {
                n / 2
            } else if h <= e {
                n.div_ceil(2)
            } else {
                (n - 1) / 2
            };
            vec![slice("p*_1", p)]
        }
        Regime::HPosEpsNegWeak => vec![slice("p*_2", if even { 3 * n / 2 } else { (3 * n - 1) / 2 })],
        Regime::HPosEpsNegStrong => {
            let p = if !even {
                (n - 1) / 2
            } else if h - e < q(1) {
                n / 2
            } else {
                (n - 2) / 2
            };
            vec![slice("p*_3", p)]
        }
        Regime::HPosEpsNegEq => vec![],
    })
}

/// A stated gate for a transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub label: String,
    pub transition: Transition,
    pub classes: Vec<ClassState>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GateOutcome {
    Stated(Gate),
    NotStated { reason: String },
}

impl GateOutcome {
    pub fn gate(&self) -> Option<&Gate> {
        match self {
            GateOutcome::Stated(g) => Some(g),
            GateOutcome::NotStated { .. } => None,
        }
    }
}

fn pair_on_left(k: usize) -> Vec<ClassState> {
    vec![ClassState::raw(k, 0, 0), ClassState::raw(0, k, 0)]
}

pub fn gate_set(params: &Params) -> Result<GateOutcome> {
    params.require_two_clusters()?;
    use NamedState::*;
    let (n, e, h) = (params.n(), params.epsilon(), params.h());
    let even = n % 2 == 0;
    let regime = Regime::of(params);
    let gate = |label: &str, transition: Transition, classes: Vec<ClassState>| {
        GateOutcome::Stated(Gate { label: label.to_string(), transition, classes })
    };
    Ok(match regime {
        Regime::H0EpsPos | Regime::H0EpsZero | Regime::H0EpsNeg => {
            let transition = if regime == Regime::H0EpsNeg {
                Transition::new(PlusMinus, &[MinusPlus])
            } else {
                Transition::new(Minus, &[Plus])
            };
            let (l, r) = if even {
                (n / 2, n / 2)
            } else if e >= Rational::zero() {
                (n.div_ceil(2), (n - 1) / 2)
            } else {
                ((n - 1) / 2, n.div_ceil(2))
            };
            let mut classes = pair_on_left(l);
            classes.push(ClassState::raw(n, r, r));
            classes.push(ClassState::raw(r, n, r));
            gate(if even { "C*_even" } else { "C*_odd" }, transition, classes)
        }
        Regime::HPosEpsNonneg => {
            let k = if even {
                n / 2
            } else if h <= e {
                n.div_ceil(2)
            } else {
                (n - 1) / 2
            };
            gate("C*_1", Transition::new(Minus, &[Plus]), pair_on_left(k))
        }
        Regime::HPosEpsNegWeak => {
            let k = if even { n / 2 } else { (n - 1) / 2 };
            gate("C*_2", Transition::new(PlusMinus, &[Plus]), vec![ClassState::raw(n, k, k)])
        }
        Regime::HPosEpsNegStrong => {
            let k = if !even {
                (n - 1) / 2
            } else if h - e < q(1) {
                n / 2
            } else {
                (n - 2) / 2
            };
            gate("C*_3", Transition::new(PlusMinus, &[MinusPlus]), pair_on_left(k))
        }
        Regime::HPosEpsNegEq => GateOutcome::NotStated { reason: "no gate is stated for h = −ε".into() },
    })
}

/// The four reference paths between named states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// `−1 → +1`: fill cluster 1, then cluster 2.
    Bar,
    /// `±1 → ∓1` through `+1`.
    Hat,
    /// `±1 → ∓1` through `−1`.
    Check,
    /// `±1 → +1`: fill cluster 2.
    Tilde,
}

impl PathKind {
    pub fn name(&self) -> &'static str {
        match self {
            PathKind::Bar => "ω̄",
            PathKind::Hat => "ω̂",
            PathKind::Check => "ω̌",
            PathKind::Tilde => "ω̃",
        }
    }

    pub fn endpoints(&self) -> (NamedState, NamedState) {
        match self {
            PathKind::Bar => (NamedState::Minus, NamedState::Plus),
            PathKind::Hat | PathKind::Check => (NamedState::PlusMinus, NamedState::MinusPlus),
            PathKind::Tilde => (NamedState::PlusMinus, NamedState::Plus),
        }
    }

    /// Class sequence of the path for cluster size `n`.
    pub fn classes(&self, n: usize) -> Vec<ClassState> {
        let c = ClassState::raw;
        match self {
            PathKind::Bar => (0..=n).map(|k| c(k, 0, 0)).chain((1..=n).map(|k| c(n, k, k))).collect(),
            PathKind::Hat => (0..=n).map(|k| c(n, k, k)).chain((1..=n).map(|k| c(n - k, n, n - k))).collect(),
            PathKind::Check => (0..=n).map(|k| c(n - k, 0, 0)).chain((1..=n).map(|k| c(0, k, 0))).collect(),
            PathKind::Tilde => (0..=n).map(|k| c(n, k, k)).collect(),
        }
    }
}

impl FromStr for PathKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bar" | "ω̄" => Ok(PathKind::Bar),
            "hat" | "ω̂" => Ok(PathKind::Hat),
            "check" | "ω̌" => Ok(PathKind::Check),
            "tilde" | "ω̃" => Ok(PathKind::Tilde),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// Printed maximum of a reference path and where it is attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathMaximum {
    pub formula: Formula,
    pub indices: Vec<usize>,
}

/// Printed value and position of the maximum along a reference path.
pub fn stated_path_maximum(params: &Params, kind: PathKind) -> Result<PathMaximum> {
    check_kind(params, kind)?;
    let (n, e, h) = (params.n(), params.epsilon(), params.h());
    let nn = q(n as i64);
    let even = n % 2 == 0;
    let hf = |v: Rational, expr: &str, mut indices: Vec<usize>| {
        indices.sort();
        indices.dedup();
        PathMaximum { formula: Formula::new(v, expr), indices }
    };
    let base_even = nn - half(nn * nn);
    let base_odd = nn - half(nn * nn + q(1));
    Ok(match (kind, h.is_zero()) {
        (PathKind::Bar, true) => {
            if even {
                hf(base_even, "n − n²/2", vec![n / 2, n + n / 2])
            } else {
                hf(base_odd + e, "n − (n²+1)/2 + ε", vec![n.div_ceil(2), n + (n - 1) / 2])
            }
        }
        (PathKind::Bar, false) => {
            if even {
                hf(base_even + h * nn, "n − n²/2 + hn", vec![n / 2])
            } else if h <= e {
                hf(base_odd + e + h * (nn - q(1)), "n − (n²+1)/2 + ε + h(n−1)", vec![n.div_ceil(2)])
            } else {
                hf(base_odd - e + h * (nn + q(1)), "n − (n²+1)/2 − ε + h(n+1)", vec![(n - 1) / 2])
            }
        }
        (PathKind::Hat, _) => {
            if even {
                hf(base_even - e * nn, "n − n²/2 − εn", vec![n / 2, n + n / 2])
            } else {
                hf(base_odd - e, "n − (n²+1)/2 − ε", vec![n.div_ceil(2), n + (n - 1) / 2])
            }
        }
        (PathKind::Check, _) => {
            if !even {
                hf(base_odd - e + h * (nn + q(1)), "n − (n²+1)/2 − ε + h(n+1)", vec![n.div_ceil(2), n + (n - 1) / 2])
            } else if h - e < q(1) {
                hf(base_even + h * nn, "n − n²/2 + hn", vec![n / 2, n + n / 2])
            } else {
                hf(
                    base_even - q(2) * (e + q(1)) + h * (nn + q(2)),
                    "n − n²/2 − 2(ε+1) + h(n+2)",
                    vec![(n + 2) / 2, n + (n - 2) / 2],
                )
            }
        }
        (PathKind::Tilde, _) => {
            if even {
                hf(base_even - h * nn, "n − n²/2 − hn", vec![n / 2])
            } else {
                hf(base_odd + e - h * (nn - q(1)), "n − (n²+1)/2 + ε − h(n−1)", vec![(n - 1) / 2])
            }
        }
    })
}

fn check_kind(params: &Params, kind: PathKind) -> Result<()> {
    params.require_two_clusters()?;
    let regime = Regime::of(params);
    let ok = match kind {
        PathKind::Bar => params.epsilon() >= Rational::zero(),
        PathKind::Hat => regime == Regime::H0EpsNeg,
        PathKind::Check => regime == Regime::HPosEpsNegStrong,
        PathKind::Tilde => regime == Regime::HPosEpsNegWeak,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::KindMismatch(format!("path {} is not defined for regime {regime}", kind.name())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub class: ClassState,
    #[serde(with = "serde_rational")]
    pub energy: Rational,
}

/// A reference path with its energy profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePath {
    pub kind: PathKind,
    pub from: NamedState,
    pub to: NamedState,
    pub steps: Vec<PathStep>,
    #[serde(with = "serde_rational")]
    pub max_energy: Rational,
    pub argmax: Vec<usize>,
    /// Printed maximum for this regime branch.
    pub stated: PathMaximum,
    pub matches_stated: bool,
}

impl ReferencePath {
    /// `max − H(start)`: the barrier this path certifies as an upper bound.
    pub fn barrier(&self) -> Rational {
        self.max_energy - self.steps[0].energy
    }
}

pub fn reference_path(params: &Params, kind: PathKind) -> Result<ReferencePath> {
    let stated = stated_path_maximum(params, kind)?;
    let n = params.n();
    let (from, to) = kind.endpoints();
    let steps: Vec<PathStep> = kind
        .classes(n)
        .into_iter()
        .map(|c| Ok(PathStep { class: c, energy: class_energy_exact(c, n)?.eval(params.epsilon(), params.h()) }))
        .collect::<Result<_>>()?;
    debug_assert!(steps.windows(2).all(|w| move_between(w[0].class, w[1].class, n).is_some()));
    let max_energy = steps.iter().map(|s| s.energy).max().expect("nonempty path");
    let argmax: Vec<usize> = steps.iter().enumerate().filter(|(_, s)| s.energy == max_energy).map(|(i, _)| i).collect();
    let matches_stated = stated.formula.value == max_energy;
    Ok(ReferencePath { kind, from, to, steps, max_energy, argmax, stated, matches_stated })
}

/// All closed-form predictions for one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeReport {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "serde_rational")]
    pub h: Rational,
    pub regime: Regime,
    pub stable_set: Vec<NamedState>,
    pub metastable_set: Vec<NamedState>,
    #[serde(with = "serde_rational")]
    pub min_energy: Rational,
    pub gamma: GammaValues,
    pub critical_slices: Vec<CriticalSlice>,
    pub gate: GateOutcome,
    pub reference_path: Option<ReferencePath>,
}

pub fn landscape_report(params: &Params) -> Result<LandscapeReport> {
    let states = identify_states(params)?;
    let regime = Regime::of(params);
    let reference_path = regime.reference_path_kind().map(|k| reference_path(params, k)).transpose()?;
    Ok(LandscapeReport {
        n: params.n(),
        epsilon: params.epsilon(),
        h: params.h(),
        regime,
        stable_set: states.stable,
        metastable_set: states.metastable,
        min_energy: states.min_energy_value,
        gamma: gamma_values(params)?,
        critical_slices: critical_slices(params)?,
        gate: gate_set(params)?,
        reference_path,
    })
}

fn classes_list(cs: &[ClassState]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ∪ ")
}

impl LandscapeReport {
    /// Plain-text table for terminals.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("n".into(), self.n.to_string()),
            ("ε".into(), format_rational(self.epsilon)),
            ("h".into(), format_rational(self.h)),
            ("regime".into(), self.regime.to_string()),
            ("stable".into(), named_list(&self.stable_set)),
            ("metastable".into(), named_list(&self.metastable_set)),
            ("min H".into(), format_rational(self.min_energy)),
        ];
        let barrier_row =
            |b: &Barrier| format!("{} = {} [{}]  {}", b.formula.expr, format_rational(b.value()), b.value_f64, b.transition);
        if let Some(b) = &self.gamma.gamma_s {
            rows.push(("Γs".into(), barrier_row(b)));
        }
        if let Some(b) = &self.gamma.gamma_m {
            rows.push(("Γm".into(), barrier_row(b)));
        }
        for s in &self.gamma.not_stated {
            rows.push(("not stated".into(), s.clone()));
        }
        for d in &self.gamma.discrepancies {
            rows.push((
                format!("{} (alt)", d.quantity),
                format!("{} = {}  (adopted {})", d.alternative.expr, format_rational(d.alternative.value), d.adopted.expr),
            ));
        }
        for s in &self.critical_slices {
            rows.push((s.label.clone(), s.p.to_string()));
        }
        match &self.gate {
            GateOutcome::Stated(g) => rows.push((format!("gate {}", g.label), classes_list(&g.classes))),
            GateOutcome::NotStated { reason } => rows.push(("gate".into(), reason.clone())),
        }
        if let Some(p) = &self.reference_path {
            let flag = if p.matches_stated { "" } else { "  (differs from printed value)" };
            rows.push((
                format!("path {}", p.kind.name()),
                format!(
                    "max {} at {:?}; printed {} = {}{}",
                    format_rational(p.max_energy),
                    p.argmax,
                    p.stated.formula.expr,
                    format_rational(p.stated.formula.value),
                    flag
                ),
            ));
        }
        let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(n: usize, e: &str, h: &str) -> Params {
        Params::parse(n, e, h).unwrap()
    }

    #[test]
    fn regimes_at_boundaries() {
        let r = |e: &str, h: &str| Regime::of(&p(3, e, h));
        assert_eq!(r("0.5", "0"), Regime::H0EpsPos);
        assert_eq!(r("0", "0"), Regime::H0EpsZero);
        assert_eq!(r("-0.5", "0"), Regime::H0EpsNeg);
        assert_eq!(r("0", "0.5"), Regime::HPosEpsNonneg);
        assert_eq!(r("-0.3", "0.6"), Regime::HPosEpsNegWeak);
        assert_eq!(r("-0.5", "0.5"), Regime::HPosEpsNegEq);
        assert_eq!(r("-0.1", "1/10"), Regime::HPosEpsNegEq);
        assert_eq!(r("-0.8", "0.3"), Regime::HPosEpsNegStrong);
    }

    #[test]
    fn stated_sets() {
        let s = identify_states(&p(4, "0.5", "0")).unwrap();
        assert_eq!(s.stable, vec![NamedState::Plus, NamedState::Minus]);
        assert_eq!(s.min_energy_value, rat(-16 + 4 - 2, 1));
        let s = identify_states(&p(4, "0", "0")).unwrap();
        assert_eq!(s.stable.len(), 4);
        assert!(s.metastable.is_empty());
        let s = identify_states(&p(5, "-0.8", "0.3")).unwrap();
        assert_eq!(s.stable, vec![NamedState::PlusMinus, NamedState::MinusPlus]);
        assert_eq!(s.metastable, vec![NamedState::Plus]);
        assert_eq!(s.min_energy_value, rat(-25 + 5, 1) + rat(-4, 5) * 5);
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_values(&p(4, "0.5", "0")).unwrap();
        assert_eq!(g.gamma_s.unwrap().value(), rat(10, 1));
        assert_eq!(g.gamma_m.unwrap().value(), rat(6, 1));
        assert_eq!(gamma_values(&p(3, "-0.5", "0")).unwrap().gamma_s.unwrap().value(), rat(6, 1));
        assert_eq!(gamma_values(&p(4, "0.5", "0.25")).unwrap().gamma_m.unwrap().value(), rat(9, 1));
        let eq = gamma_values(&p(4, "-0.5", "0.5")).unwrap();
        assert!(eq.gamma_s.is_none() && eq.gamma_m.is_none() && !eq.not_stated.is_empty());
        let z = gamma_values(&p(4, "0", "0")).unwrap();
        assert!(z.gamma_m.is_none());
        let strong = gamma_values(&p(4, "-1", "0.25")).unwrap();
        assert_eq!(strong.gamma_s.unwrap().value(), rat(11, 1));
        assert_eq!(strong.discrepancies[0].alternative.value, rat(27, 2));
    }

    #[test]
    fn manifold_branches_agree_at_n() {
        let pr = p(5, "0.3", "0.2");
        let m = manifold_minimum(5, &pr).unwrap();
        let ni = 5i64;
        let right = Affine::new(ni - ni * ni, ni, 0);
        assert_eq!(m.energy, right);
        assert_eq!(m.classes, vec![ClassState::raw(0, 5, 0), ClassState::raw(5, 0, 0)]);
        let m0 = manifold_minimum(0, &pr).unwrap();
        assert_eq!(m0.classes, vec![ClassState::raw(0, 0, 0)]);
        assert_eq!(m0.energy, Affine::new(5 - 25, -5, 10));
        assert!(manifold_minimum(11, &pr).is_err());
    }

    #[test]
    fn slice_examples() {
        let s = critical_slices(&p(4, "0.2", "0")).unwrap();
        assert_eq!((s[0].p, s[1].p), (2, 6));
        let s = critical_slices(&p(5, "-0.2", "0")).unwrap();
        assert_eq!((s[0].p, s[1].p), (2, 8));
        let s = critical_slices(&p(4, "-0.8", "0.4")).unwrap();
        assert_eq!(s[0].p, 1);
    }

    #[test]
    fn gate_examples() {
        let g = gate_set(&p(4, "0.5", "0")).unwrap();
        let mut cs = g.gate().unwrap().classes.clone();
        cs.sort();
        let mut want =
            vec![ClassState::raw(2, 0, 0), ClassState::raw(0, 2, 0), ClassState::raw(4, 2, 2), ClassState::raw(2, 4, 2)];
        want.sort();
        assert_eq!(cs, want);
        let g = gate_set(&p(5, "0.5", "0.25")).unwrap();
        assert_eq!(g.gate().unwrap().classes, vec![ClassState::raw(3, 0, 0), ClassState::raw(0, 3, 0)]);
        let g = gate_set(&p(5, "-0.2", "0.6")).unwrap();
        assert_eq!(g.gate().unwrap().classes, vec![ClassState::raw(5, 2, 2)]);
        assert!(gate_set(&p(4, "-0.5", "0.5")).unwrap().gate().is_none());
    }

    #[test]
    fn path_examples() {
        let path = reference_path(&p(4, "0.7", "0"), PathKind::Bar).unwrap();
        assert_eq!(path.max_energy, rat(-4, 1));
        assert_eq!(path.argmax, vec![2, 6]);
        assert!(path.matches_stated);
        let path = reference_path(&p(5, "-0.3", "0.6"), PathKind::Tilde).unwrap();
        assert_eq!(path.argmax, vec![2]);
        assert_eq!(path.max_energy, rat(5, 1) - rat(13, 1) + rat(-3, 10) - rat(6, 10) * 4);
        assert!(reference_path(&p(5, "0.3", "0.6"), PathKind::Tilde).is_err());
        for kind in [PathKind::Bar, PathKind::Hat, PathKind::Check, PathKind::Tilde] {
            let cs = kind.classes(6);
            assert!(cs.windows(2).all(|w| move_between(w[0], w[1], 6).is_some()));
            let (a, b) = kind.endpoints();
            assert_eq!((cs[0], *cs.last().unwrap()), (a.class(6), b.class(6)));
        }
    }

    #[test]
    fn report_round_trips() {
        let r = landscape_report(&p(4, "-0.6", "0.25")).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: LandscapeReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let t = r.to_table();
        assert!(t.contains("H_POS_EPS_NEG_STRONG"));
        assert!(t.contains("C*_3"));
    }

    #[test]
    fn named_parse() {
        assert_eq!("+-1".parse::<NamedState>().unwrap(), NamedState::PlusMinus);
        assert_eq!("-1".parse::<NamedState>().unwrap(), NamedState::Minus);
        assert!("x".parse::<NamedState>().is_err());
    }
}
