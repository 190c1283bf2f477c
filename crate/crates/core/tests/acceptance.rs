//! Acceptance suite: one PASS/FAIL line per criterion, details indented
//! underneath. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use clustered_ising::classes::{build_lumped_chain, class_energy_exact, classify};
use clustered_ising::dynamics::{exact_hitting_moments, sample_hitting_times, spectral_gap, SampleConfig, SimMode};
use clustered_ising::exact::{format_rational, rat, Rational};
use clustered_ising::landscape::{gamma_values, reference_path, NamedState, Regime};
use clustered_ising::model::{build_graph, hamiltonian_exact, SpinConfig};
use clustered_ising::oracle::{default_grid, full_transition_matrix, projection_error, run_checks, OracleReport};
use clustered_ising::Params;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

fn energy_grid() -> Vec<(Rational, Rational)> {
    let eps = [rat(-1, 1), rat(-3, 5), rat(-3, 10), rat(0, 1), rat(3, 10), rat(3, 5), rat(1, 1)];
    let hs = [rat(0, 1), rat(1, 4), rat(1, 2), rat(1, 1)];
    eps.iter().flat_map(|&e| hs.iter().map(move |&h| (e, h))).collect()
}

fn point(e: Rational, h: Rational) -> String {
    format!("ε = {}, h = {}", format_rational(e), format_rational(h))
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            out.passed = false;
            out.details.push(format!("runtime {took:.1?} exceeds {limit:?}"));
        }
    }
    (out, took)
}

fn energy_identity() -> Outcome {
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for n in 2..=4 {
        let g = build_graph(&Params::parse(n, "0", "0").unwrap());
        for code in 0..1u64 << (2 * n) {
            let sigma = SpinConfig::from_code(code, 2 * n);
            let direct = hamiltonian_exact(&g, &sigma).unwrap();
            let class = classify(&g, &sigma).unwrap();
            let via_class = class_energy_exact(class, n).unwrap();
            for (e, h) in energy_grid() {
                checked += 1;
                if direct.eval(e, h) != via_class.eval(e, h) {
                    bad.push(format!("n = {n}, σ = {code:#b}, {}", point(e, h)));
                }
            }
        }
    }
    Outcome {
        passed: bad.is_empty(),
        summary: format!("{checked} (configuration, ε, h) triples, {} mismatches", bad.len()),
        details: bad.into_iter().take(10).collect(),
    }
}

fn interior(e: Rational, h: Rational) -> bool {
    let zero = rat(0, 1);
    let one = rat(1, 1);
    e != zero && h != -e && e.abs() < one && h < one
}

fn barrier_values() -> Outcome {
    let mut rows = 0;
    let mut details = Vec::new();
    let mut passed = true;
    for n in 2..=4 {
        for (e, h) in energy_grid().into_iter().filter(|&(e, h)| interior(e, h)) {
            let p = Params::new(n, e, h).unwrap();
            let report = run_checks(&p, 4).unwrap();
            for c in report.checks.iter().filter(|c| c.name.starts_with('Γ')) {
                rows += 1;
                passed &= c.passed;
                details.push(format!(
                    "{} n = {n}, {} [{}] {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    point(e, h),
                    report.regime,
                    c.name,
                    c.observed
                ));
            }
        }
    }
    Outcome { passed, summary: format!("{rows} barrier comparisons over n = 2..4, regime interiors"), details }
}

fn oracle_reports(ns: &[usize], n_max: usize) -> Vec<OracleReport> {
    ns.iter()
        .flat_map(|&n| default_grid().into_iter().map(move |(e, h)| (n, e, h)))
        .map(|(n, e, h)| run_checks(&Params::new(n, e, h).unwrap(), n_max).unwrap())
        .collect()
}

fn check_rows(reports: &[OracleReport], pick: impl Fn(&str) -> bool) -> (usize, Vec<String>) {
    let mut total = 0;
    let mut failures = Vec::new();
    for r in reports {
        for c in r.checks.iter().filter(|c| pick(&c.name)) {
            total += 1;
            if !c.passed {
                failures.push(format!(
                    "FAIL n = {}, {} [{}] {}: expected {}; observed {}",
                    r.n,
                    point(r.epsilon, r.h),
                    r.regime,
                    c.name,
                    c.expected,
                    c.observed
                ));
            }
        }
    }
    (total, failures)
}

fn state_sets() -> Outcome {
    let reports = oracle_reports(&[3, 4], 4);
    let (total, failures) = check_rows(&reports, |name| name == "stable set" || name == "metastable set");
    Outcome {
        passed: failures.is_empty(),
        summary: format!(
            "{} of {total} stable/metastable comparisons agree (n = 3, 4, grid with ε = 0 and h = −ε)",
            total - failures.len()
        ),
        details: failures,
    }
}

fn gates() -> Outcome {
    let reports = oracle_reports(&[3, 4, 5], 5);
    let (gate_total, gate_fail) = check_rows(&reports, |name| name.starts_with("gate "));
    let (slice_total, slice_fail) = check_rows(&reports, |name| name.starts_with("saddles on"));
    let mut details = gate_fail.clone();
    details.extend(slice_fail.iter().cloned());
    Outcome {
        passed: gate_fail.is_empty() && slice_fail.is_empty(),
        summary: format!(
            "gates verified {}/{gate_total}; saddles within the gate slices {}/{slice_total} (n = 3, 4, 5)",
            gate_total - gate_fail.len(),
            slice_total - slice_fail.len()
        ),
        details,
    }
}

fn random_point(regime: Regime, rng: &mut ChaCha8Rng) -> (Rational, Rational) {
    let r = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| rat(rng.random_range(lo..=hi), 100);
    loop {
        let (e, h) = match regime {
            Regime::H0EpsPos => (r(rng, 1, 100), rat(0, 1)),
            Regime::H0EpsZero => (rat(0, 1), rat(0, 1)),
            Regime::H0EpsNeg => (r(rng, -100, -1), rat(0, 1)),
            Regime::HPosEpsNonneg => (r(rng, 0, 100), r(rng, 1, 100)),
            Regime::HPosEpsNegWeak | Regime::HPosEpsNegStrong => (r(rng, -100, -1), r(rng, 1, 100)),
            Regime::HPosEpsNegEq => {
                let e = r(rng, -100, -1);
                (e, -e)
            }
        };
        if Regime::classify(e, h) == regime {
            return (e, h);
        }
    }
}

fn reference_paths() -> Outcome {
    let regimes = [
        Regime::H0EpsPos,
        Regime::H0EpsZero,
        Regime::H0EpsNeg,
        Regime::HPosEpsNonneg,
        Regime::HPosEpsNegWeak,
        Regime::HPosEpsNegEq,
        Regime::HPosEpsNegStrong,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0;
    let mut failures = Vec::new();
    for n in 2..=8 {
        for regime in regimes {
            let Some(kind) = regime.reference_path_kind() else { continue };
            for _ in 0..10 {
                let (e, h) = random_point(regime, &mut rng);
                let p = Params::new(n, e, h).unwrap();
                let path = reference_path(&p, kind).unwrap();
                total += 1;
                if !path.matches_stated {
                    failures.push(format!(
                        "FAIL n = {n}, {} [{regime}] {}: computed max {}, printed {} = {}",
                        point(e, h),
                        kind.name(),
                        format_rational(path.max_energy),
                        path.stated.formula.expr,
                        format_rational(path.stated.formula.value)
                    ));
                }
            }
        }
    }
    Outcome {
        passed: failures.is_empty(),
        summary: format!("{} of {total} path maxima equal the printed branch value (n = 2..8)", total - failures.len()),
        details: failures,
    }
}

fn lumpability() -> Outcome {
    let mut worst_projection: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut worst_relative: f64 = 0.0;
    let mut count = 0;
    for n in 2..=4 {
        for (e, h) in default_grid() {
            let p = Params::new(n, e, h).unwrap();
            for beta in [1.0, 4.0] {
                let (g, full) = full_transition_matrix(&p, beta).unwrap();
                let lumped = build_lumped_chain(&p, beta).unwrap();
                worst_projection = worst_projection.max(projection_error(&g, &full, &lumped));
                let a = spectral_gap(&full, beta).unwrap().gap;
                let b = spectral_gap(lumped.chain(), beta).unwrap().gap;
                worst_gap = worst_gap.max((a - b).abs());
                worst_relative = worst_relative.max((a - b).abs() / a.max(b));
                count += 1;
            }
        }
    }
    Outcome {
        passed: worst_projection <= 1e-12 && worst_gap <= 1e-9,
        summary: format!(
            "{count} chains: max projection error {worst_projection:.2e}, max |gap_full − gap_lumped| {worst_gap:.2e} (relative {worst_relative:.2e})"
        ),
        details: vec![],
    }
}

struct SlopeCase {
    label: &'static str,
    epsilon: &'static str,
    h: &'static str,
    from: NamedState,
    to: &'static [NamedState],
}

const SLOPE_CASES: [SlopeCase; 4] = [
    SlopeCase { label: "Γ⁰ₛ", epsilon: "0.5", h: "0", from: NamedState::Minus, to: &[NamedState::Plus] },
    SlopeCase { label: "Γ¹ₘ", epsilon: "0.5", h: "0.25", from: NamedState::Minus, to: &[NamedState::Plus] },
    SlopeCase { label: "Γ²ₘ", epsilon: "-0.3", h: "0.6", from: NamedState::PlusMinus, to: &[NamedState::Plus] },
    SlopeCase { label: "Γʰₛ", epsilon: "-0.6", h: "0.25", from: NamedState::PlusMinus, to: &[NamedState::MinusPlus] },
];

fn approaches(values: &[f64], target: f64) -> bool {
    values.windows(2).all(|w| (w[1] - target).abs() < (w[0] - target).abs())
}

fn slopes() -> Outcome {
    let n = 4;
    let betas = [4.0, 6.0, 8.0, 10.0];
    let mut passed = true;
    let mut details = Vec::new();
    for case in &SLOPE_CASES {
        let p = Params::parse(n, case.epsilon, case.h).unwrap();
        let gv = gamma_values(&p).unwrap();
        let barrier = [gv.gamma_s, gv.gamma_m]
            .into_iter()
            .flatten()
            .find(|b| b.transition.from == case.from && b.transition.to == case.to)
            .expect("closed form for the transition");
        let gamma = barrier.value_f64;
        let targets: Vec<_> = case.to.iter().map(|s| s.class(n)).collect();
        let mut mean_rates = Vec::new();
        let mut gap_rates = Vec::new();
        for &beta in &betas {
            let chain = build_lumped_chain(&p, beta).unwrap();
            let m = exact_hitting_moments(&chain, case.from.class(n), &targets).unwrap();
            mean_rates.push(m.mean.ln() / beta);
            gap_rates.push(spectral_gap(chain.chain(), beta).unwrap().rate);
        }
        let close = |v: &[f64]| (v[v.len() - 1] - gamma).abs() / gamma <= 0.10;
        let ok_mean = approaches(&mean_rates, gamma) && close(&mean_rates);
        let ok_gap = approaches(&gap_rates, gamma) && close(&gap_rates);
        passed &= ok_mean && ok_gap;
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
        details.push(format!(
            "{} {} ({}, {} → {:?}) Γ = {} = {gamma}: (1/β)log Eτ [{}] {}; (−1/β)log ρ [{}] {}",
            if ok_mean && ok_gap { "ok  " } else { "FAIL" },
            case.label,
            point(p.epsilon(), p.h()),
            case.from,
            case.to.iter().map(|s| s.symbol()).collect::<Vec<_>>(),
            barrier.formula.expr,
            fmt(&mean_rates),
            if ok_mean { "ok" } else { "off" },
            fmt(&gap_rates),
            if ok_gap { "ok" } else { "off" },
        ));
    }
    Outcome { passed, summary: "n = 4, β ∈ {4, 6, 8, 10}, four regimes".into(), details }
}

fn exponential_limit() -> Outcome {
    let n = 4;
    let cases: [(&str, &str, NamedState, &[NamedState]); 2] = [
        ("0.5", "0", NamedState::PlusMinus, &[NamedState::Plus, NamedState::Minus]),
        ("0.5", "0.25", NamedState::Minus, &[NamedState::Plus]),
    ];
    let mut passed = true;
    let mut details = Vec::new();
    for (e, h, from, to) in cases {
        let p = Params::parse(n, e, h).unwrap();
        let chain = build_lumped_chain(&p, 10.0).unwrap();
        let targets: Vec<_> = to.iter().map(|s| s.class(n)).collect();
        let m = exact_hitting_moments(&chain, from.class(n), &targets).unwrap();
        let ok = (1.90..=2.10).contains(&m.ratio);
        passed &= ok;
        details.push(format!(
            "{} ε = {e}, h = {h}, {from} → {:?}: E[τ²]/E[τ]² = {:.6}",
            if ok { "ok  " } else { "FAIL" },
            to.iter().map(|s| s.symbol()).collect::<Vec<_>>(),
            m.ratio
        ));
    }
    Outcome { passed, summary: "β = 10, n = 4, two (m → s) transitions".into(), details }
}

fn monte_carlo() -> Outcome {
    let p = Params::parse(4, "0.5", "0").unwrap();
    let cfg = SampleConfig {
        mode: SimMode::Full,
        beta: 1.0,
        trials: 1000,
        seed: 20240607,
        max_steps: 100_000_000,
        window: None,
        exact: true,
    };
    let (from, to) = (NamedState::Minus.class(4), [NamedState::Plus.class(4)]);
    let a = sample_hitting_times(&p, from, &to, &cfg).unwrap();
    let b = sample_hitting_times(&p, from, &to, &cfg).unwrap();
    let exact = a.exact_mean.unwrap();
    let z = (a.mean - exact).abs() / a.std_error;
    let same = a.times == b.times;
    Outcome {
        passed: z <= 3.0 && same && a.censored == 0,
        summary: format!("mean τ {:.1} ± {:.1} vs exact {exact:.1} ({z:.2} s.e.), rerun identical: {same}", a.mean, a.std_error),
        details: vec![],
    }
}

fn stationarity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 3..=8 {
        for (e, h) in default_grid() {
            let p = Params::new(n, e, h).unwrap();
            for beta in [0.5, 2.0, 8.0] {
                worst = worst.max(build_lumped_chain(&p, beta).unwrap().chain().stationarity_error());
                count += 1;
            }
        }
    }
    Outcome {
        passed: worst <= 1e-10, summary: format!("{count} chains, max relative |πP̄ − π| = {worst:.2e}"), details: vec![]
    }
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("energy identity", Some(Duration::from_secs(10)), energy_identity),
        ("barrier values", Some(Duration::from_secs(60)), barrier_values),
        ("state sets", None, state_sets),
        ("gates", Some(Duration::from_secs(120)), gates),
        ("reference-path maxima", None, reference_paths),
        ("lumpability", None, lumpability),
        ("asymptotic slopes", Some(Duration::from_secs(60)), slopes),
        ("exponential limit", None, exponential_limit),
        ("Monte Carlo consistency", Some(Duration::from_secs(30)), monte_carlo),
        ("stationarity", None, stationarity),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (out, took) = timed(limit, f);
        println!("{} criterion {}: {name}: {} [{took:.1?}]", if out.passed { "PASS" } else { "FAIL" }, i + 1, out.summary);
        for d in &out.details {
            println!("    {d}");
        }
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
