//! Acceptance suite. Each test prints one `PASS`/`FAIL` line to stderr,
//! unbuffered so the line shows up even when test output is captured.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;
use veriobs_core::axioms::SamplingPlan;
use veriobs_core::corpus;
use veriobs_core::{
    check_biseparable_grid, check_comonotonic_independence, check_critical_event_modularity, check_submodularity,
    check_supermodularity, choquet_by_level_sets, choquet_by_mobius, induced_capacity, mobius_transform,
    obfuscation_value, recover_structure, transparency_loss, verification_value, zeta_transform, Act,
    ChoquetPreference, Error, Event, EventFamily, Menu, MobiusVector, ModelKind, Scenario, SetFunction, StateSpace,
    UtilitySpec,
};

fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    let line = format!(
        "{} criterion {id} {name}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    pass
}

const TREES: [f64; 3] = [70.0, 70.0, 10.0];
const RECS: [f64; 3] = [60.0, 100.0, 10.0];
const EFFICIENCY: [f64; 3] = [40.0; 3];
const S: u32 = 0b001;
const T: u32 = 0b010;
const U: u32 = 0b100;
const ALL: u32 = 0b111;

fn family(bits: &[u32]) -> EventFamily {
    bits.iter().map(|b| Event(*b)).collect()
}

fn ccr(beliefs: [f64; 3], verifiable: &[u32], model: ModelKind) -> Scenario<f64> {
    Scenario::new(
        StateSpace::new(["s", "t", "u"]).unwrap(),
        vec![
            Act::new("Trees", TREES.to_vec()),
            Act::new("RECs", RECS.to_vec()),
            Act::new("Efficiency", EFFICIENCY.to_vec()),
        ],
        UtilitySpec::Identity,
        beliefs.to_vec(),
        family(verifiable),
        model,
    )
    .unwrap()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

const CORPUS_SEED: u64 = 20_240_601;

/// 200 verification and 200 obfuscation scenarios on 1 to 4 states.
fn corpus() -> Vec<Scenario<f64>> {
    let mut rng = corpus::rng(CORPUS_SEED);
    let mut out = Vec::with_capacity(400);
    for model in [ModelKind::Verification, ModelKind::Obfuscation] {
        for i in 0..200 {
            out.push(corpus::random_scenario(&mut rng, 1 + i % 4, model));
        }
    }
    out
}

/// The verification capacity behind a scenario.
fn verification_capacity(sc: &Scenario<f64>) -> SetFunction<f64> {
    let nu = induced_capacity(sc);
    match sc.model() {
        ModelKind::Obfuscation => nu.conjugate(),
        _ => nu,
    }
}

#[test]
fn criterion_1_ccr_reproduction() {
    let start = Instant::now();
    let values = |sc: &Scenario<f64>| -> Vec<f64> {
        [TREES, RECS, EFFICIENCY]
            .iter()
            .map(|a| sc.model_utility(a).unwrap())
            .collect()
    };
    let v = values(&ccr([0.2, 0.6, 0.2], &[S | T, ALL], ModelKind::Verification));
    let o = values(&ccr([0.2, 0.6, 0.2], &[S | T, U, ALL], ModelKind::Obfuscation));
    let elapsed = start.elapsed();
    let gap = max_gap(&v, &[58.0, 50.0, 40.0]).max(max_gap(&o, &[58.0, 82.0, 40.0]));
    let pass = gap <= 1e-9 && elapsed < Duration::from_secs(1);
    assert!(report(
        1,
        "CCR values",
        pass,
        &format!("verification {v:?}, obfuscation {o:?}, max error {gap:e}, {elapsed:?}")
    ));
}

/// Transparency loss of the two-act menu under heavily skewed beliefs.
fn skewed_menu_loss(richer: &EventFamily) -> f64 {
    let mut bumped = RECS;
    bumped[2] += 0.01;
    let acts = vec![Act::new("Trees", TREES.to_vec()), Act::new("RECs+", bumped.to_vec())];
    let sc = Scenario::new(
        StateSpace::new(["s", "t", "u"]).unwrap(),
        acts.clone(),
        UtilitySpec::Identity,
        vec![0.005, 0.99, 0.005],
        family(&[ALL]),
        ModelKind::Verification,
    )
    .unwrap();
    transparency_loss(&sc, &Menu::new(acts).unwrap(), richer).unwrap()
}

const STATED_TARGET: f64 = -(99.355 - 69.70);

#[test]
fn criterion_2_transparency_counterexample() {
    let t = skewed_menu_loss(&family(&[S, ALL]));
    let t_full = skewed_menu_loss(&EventFamily::all_nonempty(3));
    let oracle = -((0.005 * 60.0 + 0.99 * 100.0 + 0.005 * 10.01) - (0.005 * 70.0 + 0.99 * 70.0 + 0.005 * 10.0));
    let literal = (t - STATED_TARGET).abs() <= 1e-6;
    report(
        2,
        "transparency counterexample",
        literal && t_full >= 0.0,
        &format!(
            "T = {t} vs stated target {STATED_TARGET} (gap {:.5}); arithmetic oracle {oracle}; T against full power set = {t_full}",
            (t - STATED_TARGET).abs()
        ),
    );
    // The stated target is off by 0.00495 (EU of the bumped act is 99.35005);
    // the strict check lives in `criterion_2_stated_target`.
    assert!(t < 0.0);
    assert!((t - oracle).abs() <= 1e-6, "{t} vs {oracle}");
    assert!(t_full >= 0.0, "{t_full}");
}

#[test]
#[ignore = "stated target -(99.355 - 69.70) disagrees with the arithmetic by 0.00495"]
fn criterion_2_stated_target() {
    let t = skewed_menu_loss(&family(&[S, ALL]));
    assert!((t - STATED_TARGET).abs() <= 1e-6, "T = {t}, target {STATED_TARGET}");
}

#[test]
fn criterion_3_transform_round_trip() {
    let start = Instant::now();
    let mut rng = corpus::rng(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 1 + i % 12;
        let space = StateSpace::anonymous(n).unwrap();
        let mut mass: Vec<f64> = (0..space.event_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        mass[0] = 0.0;
        let m = MobiusVector::new(space, mass).unwrap();
        let back = mobius_transform(&zeta_transform(&m));
        worst = worst.max(back.max_abs_diff(&m));
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-9 && elapsed < Duration::from_secs(10);
    assert!(report(
        3,
        "transform round trip",
        pass,
        &format!("max error {worst:e}, {elapsed:?}")
    ));
}

/// A random capacity: either a belief function or the running maximum of
/// random values over subsets, normalised.
fn random_capacity(rng: &mut impl Rng, n: usize) -> SetFunction<f64> {
    let space = StateSpace::anonymous(n).unwrap();
    let full = space.full();
    if rng.gen_bool(0.5) {
        let mut mass: Vec<f64> = (0..space.event_count()).map(|_| rng.gen_range(0.0..1.0)).collect();
        mass[0] = 0.0;
        let total: f64 = mass.iter().sum();
        mass.iter_mut().for_each(|x| *x /= total);
        return zeta_transform(&MobiusVector::new(space, mass).unwrap());
    }
    let raw: Vec<f64> = (0..space.event_count()).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut v = vec![0.0; raw.len()];
    for e in space.events().filter(|e| !e.is_empty()) {
        v[e.index()] = e.nonempty_subsets().map(|f| raw[f.index()]).fold(0.0, f64::max);
    }
    let top = v[full.index()];
    SetFunction::new(space, v.iter().map(|x| x / top).collect()).unwrap()
}

#[test]
fn criterion_4_choquet_equivalence() {
    let mut rng = corpus::rng(4);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = 1 + i % 8;
        let nu = random_capacity(&mut rng, n);
        assert!(nu.is_capacity());
        let payoff: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let a = choquet_by_level_sets(&nu, &payoff);
        let b = choquet_by_mobius(&mobius_transform(&nu), &payoff);
        worst = worst.max((a - b).abs());
    }
    assert!(report(
        4,
        "Choquet equivalence",
        worst <= 1e-9,
        &format!("max gap {worst:e}")
    ));
}

#[test]
fn criterion_5_forward_axiom_suite() {
    let grid: Vec<f64> = vec![0.0, 25.0, 50.0, 75.0, 100.0];
    let mut violations = 0u64;
    let mut samples = 0u64;
    let mut failures = Vec::new();
    for (k, sc) in corpus().iter().enumerate() {
        let nu = induced_capacity(sc);
        let plan = SamplingPlan::default_for(sc.n(), grid.clone(), CORPUS_SEED + k as u64);
        let reports = match sc.model() {
            ModelKind::Verification => vec![
                check_supermodularity(sc),
                check_critical_event_modularity(&nu, veriobs_core::Mode::Min),
            ],
            _ => vec![
                check_submodularity(sc),
                check_critical_event_modularity(&nu, veriobs_core::Mode::Max),
            ],
        };
        let reports = reports
            .into_iter()
            .chain([
                check_comonotonic_independence(sc, &plan).unwrap(),
                check_biseparable_grid(sc, &grid).unwrap(),
            ])
            .collect::<Vec<_>>();
        for r in reports {
            samples += r.samples_checked;
            violations += r.violations;
            if !r.holds && failures.len() < 5 {
                failures.push(format!("scenario {k} {}: {:?}", r.axiom, r.witnesses.first()));
            }
        }
    }
    assert!(
        report(
            5,
            "forward axiom suite",
            violations == 0,
            &format!("400 scenarios, {samples} samples, {violations} violations"),
        ),
        "{failures:#?}"
    );
}

/// Union closure of the smallest verifiable event around each state with
/// positive belief.
fn closure_oracle(sc: &Scenario<f64>) -> EventFamily {
    let n = sc.n();
    let mut generators = Vec::new();
    for s in (0..n).filter(|s| sc.beliefs()[*s] > 0.0) {
        let around = sc
            .verifiable()
            .iter()
            .filter(|e| e.contains(s))
            .fold(Event::full(n), |acc, e| acc.intersection(e));
        generators.push(around);
    }
    let mut closed: Vec<Event> = Vec::new();
    for g in generators {
        let mut next = vec![g];
        for c in &closed {
            next.push(c.union(g));
        }
        for e in next {
            if !closed.contains(&e) {
                closed.push(e);
            }
        }
    }
    EventFamily::new(closed)
}

#[test]
fn criterion_6_identification_round_trip() {
    let mut closure_mismatches = 0;
    let mut worst = 0.0f64;
    for sc in corpus() {
        let r = recover_structure(&verification_capacity(&sc)).unwrap();
        if r.union_closure != closure_oracle(&sc) {
            closure_mismatches += 1;
        }
        let rebuilt = r.rebuild_scenario(&sc).unwrap().with_model(sc.model());
        for act in sc.acts() {
            let a = sc.model_utility(&act.payoff).unwrap();
            let b = rebuilt.model_utility(&act.payoff).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    let pass = closure_mismatches == 0 && worst <= 1e-9;
    assert!(report(
        6,
        "identification round trip",
        pass,
        &format!("{closure_mismatches} closure mismatches, max act-value error {worst:e}")
    ));
}

#[test]
fn criterion_7_duality() {
    let mut worst = 0.0f64;
    for sc in corpus() {
        for act in sc.acts() {
            let u = sc.utilities(&act.payoff).unwrap();
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            let obf = obfuscation_value(sc.verifiable(), sc.beliefs(), &u).unwrap();
            let ver = verification_value(sc.verifiable(), sc.beliefs(), &neg).unwrap();
            worst = worst.max((obf + ver).abs());
        }
    }
    assert!(report(7, "duality", worst <= 1e-12, &format!("max gap {worst:e}")));
}

#[test]
fn criterion_8_negative_controls() {
    let space = StateSpace::new(["s", "t", "u"]).unwrap();
    let rejected = match recover_structure(&SetFunction::<f64>::max_capacity(space.clone())) {
        Err(e @ Error::NotAVerificationCapacity(_)) => e.to_string().contains("not a verification capacity"),
        _ => false,
    };

    let m = MobiusVector::from_masses(space, &[(Event(S | T), 0.6), (Event(T | U), 0.6), (Event(ALL), -0.2)]).unwrap();
    let nu = zeta_transform(&m);
    let modularity = check_critical_event_modularity(&nu, veriobs_core::Mode::Min);
    let pref = ChoquetPreference { capacity: nu };
    let replayed = modularity
        .witnesses
        .iter()
        .filter(|w| w.replays(&pref).unwrap())
        .count();
    let pass = rejected && !modularity.holds && replayed > 0 && replayed == modularity.witnesses.len();
    assert!(report(
        8,
        "negative controls",
        pass,
        &format!(
            "max capacity rejected: {rejected}; injected violation gave {} witnesses, {replayed} replay",
            modularity.witnesses.len()
        )
    ));
}

#[test]
fn criterion_9_mobius_positivity() {
    let mut worst = f64::INFINITY;
    for sc in corpus() {
        let m = mobius_transform(&verification_capacity(&sc));
        let support = (0..sc.n())
            .filter(|s| sc.beliefs()[*s] > 0.0)
            .fold(Event::EMPTY, |acc, s| acc.with(s));
        for e in support.nonempty_subsets() {
            worst = worst.min(m.get(e));
        }
    }
    assert!(report(
        9,
        "Mobius positivity",
        worst >= -1e-9,
        &format!("smallest mass {worst:e}")
    ));
}
