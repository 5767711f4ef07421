//! Executable axiom checkers with replayable counterexamples.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus;
use crate::decision::{Preference, UtilitySpec};
use crate::error::{Error, Result};
use crate::identification::{critical_family, Mode};
use crate::lattice::{Event, EventFamily};
use crate::scalar::{sign_tol, Scalar};
use crate::set_function::SetFunction;

/// Witnesses kept per report; the count of violations is still exact.
pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ComonotonicIndependence,
    Supermodularity,
    Submodularity,
    CriticalEventModularity,
    BiseparableGrid,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axiom::ComonotonicIndependence => "comonotonic_independence",
            Axiom::Supermodularity => "supermodularity",
            Axiom::Submodularity => "submodularity",
            Axiom::CriticalEventModularity => "critical_event_modularity",
            Axiom::BiseparableGrid => "biseparable_grid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModularityCondition {
    /// The intersection of two critical events is critical.
    Intersection,
    /// The union of two critical events is critical.
    Union,
    /// The local inclusion-exclusion identity.
    Additivity,
}

/// A counterexample. Consequences are stored as given, before utility.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T> {
    Independence {
        a: Vec<T>,
        b: Vec<T>,
        c: Vec<T>,
        /// `V(a) − V(b)`.
        direct: T,
        /// `V(a ⊕ c) − V(b ⊕ c)`, averages taken in utility space.
        mixed: T,
    },
    EventPair {
        e: Event,
        f: Event,
        supermodular: bool,
        /// `ν(E∪F) + ν(E∩F)`.
        joint: T,
        /// `ν(E) + ν(F)`.
        separate: T,
    },
    Modularity {
        mode: Mode,
        e: Event,
        f: Event,
        condition: ModularityCondition,
        probe: Option<Event>,
        lhs: T,
        rhs: T,
    },
    Dominance {
        better: Vec<T>,
        worse: Vec<T>,
        better_value: T,
        worse_value: T,
    },
    /// `preferred` should be strictly better than `other` but is not.
    Eventwise {
        event: Event,
        preferred: Vec<T>,
        other: Vec<T>,
        preferred_value: T,
        other_value: T,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<T> {
    pub axiom: Axiom,
    pub holds: bool,
    pub witnesses: Vec<Witness<T>>,
    pub violations: u64,
    pub samples_checked: u64,
    pub seed: Option<u64>,
    /// For comonotonic independence: a violating triple that is not
    /// comonotonic, showing the restriction matters.
    pub non_vacuity: Option<Witness<T>>,
}

impl<T: Scalar> AxiomReport<T> {
    fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            holds: true,
            witnesses: Vec::new(),
            violations: 0,
            samples_checked: 0,
            seed: None,
            non_vacuity: None,
        }
    }

    fn record(&mut self, w: Witness<T>) {
        self.holds = false;
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }
}

/// The capacity `E ↦ V(1_E)` of a preference.
pub fn capacity_of<T: Scalar, P: Preference<T> + ?Sized>(pref: &P) -> SetFunction<T> {
    SetFunction::from_fn(pref.space().clone(), |e| pref.weight(e))
}

fn utils_of<T: Scalar, P: Preference<T> + ?Sized>(pref: &P, payoff: &[T]) -> Result<Vec<T>> {
    payoff.iter().map(|x| pref.utility(*x)).collect()
}

fn midpoint<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| (*x + *y) * T::half()).collect()
}

fn independence_violated<T: Scalar>(direct: T, mixed: T, tol: T) -> bool {
    let scaled = mixed + mixed;
    sign_tol(direct, tol) != sign_tol(scaled, tol) && (direct - scaled).abs() > tol
}

fn modularity_violated<T: Scalar>(lhs: T, rhs: T, tol: T) -> bool {
    (lhs - rhs).abs() > tol
}

/// Whether `u(a(s)) > u(a(t))` and `u(b(s)) < u(b(t))` never happen together.
pub fn are_comonotonic<T: Scalar>(a: &[T], b: &[T], u: &UtilitySpec<T>) -> Result<bool> {
    let ua = a.iter().map(|x| u.apply(*x)).collect::<Result<Vec<T>>>()?;
    let ub = b.iter().map(|x| u.apply(*x)).collect::<Result<Vec<T>>>()?;
    Ok(comonotonic_utils(&ua, &ub))
}

fn comonotonic_utils<T: Scalar>(a: &[T], b: &[T]) -> bool {
    (0..a.len()).all(|s| (0..a.len()).all(|t| !(a[s] > a[t] && b[s] < b[t])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Null,
    Universal,
    Essential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventClass {
    pub kind: EventKind,
    /// Payoffs on the event never affect any value on the probe grid.
    pub irrelevant: bool,
}

/// Null, universal or essential via the binary act `γEβ`, plus the irrelevance flag.
pub fn classify_event<T: Scalar, P: Preference<T> + ?Sized>(pref: &P, e: Event) -> Result<EventClass> {
    let space = pref.space();
    space.check_event(e)?;
    let (gamma, beta) = pref.ranked_pair()?;
    let (ug, ub) = (pref.utility(gamma)?, pref.utility(beta)?);
    let tol = pref.tolerance();
    let n = space.len();
    let v = pref.value_of_utilities(&crate::decision::Act::binary(n, ug, e, ub));
    let kind = if (v - ub).abs() <= tol {
        EventKind::Null
    } else if (v - ug).abs() <= tol {
        EventKind::Universal
    } else {
        EventKind::Essential
    };

    // Three utility levels per state; any change from re-assigning the
    // states in `e` makes the event relevant.
    let levels = [ub, (ub + ug) * T::half(), ug];
    let total = 3usize.pow(n as u32);
    let decode = |mut k: usize| -> Vec<T> {
        (0..n)
            .map(|_| {
                let l = levels[k % 3];
                k /= 3;
                l
            })
            .collect()
    };
    let mut irrelevant = true;
    'outer: for base in 0..total {
        let x = decode(base);
        let vx = pref.value_of_utilities(&x);
        for other in 0..total {
            let y = decode(other);
            if (0..n).any(|s| !e.contains(s) && x[s] != y[s]) {
                continue;
            }
            if (pref.value_of_utilities(&y) - vx).abs() > tol {
                irrelevant = false;
                break 'outer;
            }
        }
    }
    Ok(EventClass { kind, irrelevant })
}

/// How comonotonic triples are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingPlan<T> {
    /// Every comonotonic triple of acts with payoffs on the grid.
    Exhaustive { grid: Vec<T> },
    /// Uniformly random comonotonic triples on the grid.
    Random { grid: Vec<T>, samples: usize, seed: u64 },
}

impl<T: Scalar> SamplingPlan<T> {
    /// Exhaustive for up to three states, 10,000 random triples otherwise.
    pub fn default_for(n: usize, grid: Vec<T>, seed: u64) -> Self {
        if n <= 3 {
            SamplingPlan::Exhaustive { grid }
        } else {
            SamplingPlan::Random {
                grid,
                samples: 10_000,
                seed,
            }
        }
    }

    pub fn grid(&self) -> &[T] {
        match self {
            SamplingPlan::Exhaustive { grid } | SamplingPlan::Random { grid, .. } => grid,
        }
    }
}

/// `k` evenly spaced points from `lo` to `hi`.
pub fn even_grid<T: Scalar>(lo: T, hi: T, k: usize) -> Vec<T> {
    let steps = T::from_usize_lossy(k - 1);
    (0..k)
        .map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / steps)
        .collect()
}

fn sorted_grid<T: Scalar>(grid: &[T]) -> Result<Vec<T>> {
    let mut g = grid.to_vec();
    g.sort_by(|a, b| a.partial_cmp(b).expect("comparable grid values"));
    g.dedup();
    if g.len() < 2 {
        return Err(Error::Precondition("payoff grid needs two distinct values".into()));
    }
    Ok(g)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let s = rest.remove(i);
            prefix.push(s);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, s);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Grid-index vectors that are nondecreasing along `order`.
fn chains(order: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(order: &[usize], pos: usize, low: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == order.len() {
            out.push(cur.clone());
            return;
        }
        for g in low..k {
            cur[order[pos]] = g;
            go(order, pos + 1, g, k, cur, out);
        }
    }
    let mut out = Vec::new();
    go(order, 0, 0, k, &mut vec![0; order.len()], &mut out);
    out
}

/// Exhaustive plans are limited to this many acts on the grid.
const EXHAUSTIVE_ACT_LIMIT: usize = 4096;

/// Preference reversals under a common preference average, restricted to
/// comonotonic triples.
pub fn check_comonotonic_independence<T: Scalar, P: Preference<T> + ?Sized>(
    pref: &P,
    plan: &SamplingPlan<T>,
) -> Result<AxiomReport<T>> {
    let n = pref.space().len();
    let tol = pref.tolerance();
    let grid = sorted_grid(plan.grid())?;
    let ugrid = grid.iter().map(|x| pref.utility(*x)).collect::<Result<Vec<T>>>()?;
    let k = grid.len();
    let mut report = AxiomReport::new(Axiom::ComonotonicIndependence);
    let payoff = |idx: &[usize]| -> Vec<T> { idx.iter().map(|g| grid[*g]).collect() };
    let utils = |idx: &[usize]| -> Vec<T> { idx.iter().map(|g| ugrid[*g]).collect() };

    match plan {
        SamplingPlan::Exhaustive { .. } => {
            if k.checked_pow(n as u32).is_none_or(|c| c > EXHAUSTIVE_ACT_LIMIT) {
                return Err(Error::Precondition(format!(
                    "exhaustive plan with {k} grid points on {n} states is too large"
                )));
            }
            for order in permutations(n) {
                let acts = chains(&order, k);
                let u: Vec<Vec<T>> = acts.iter().map(|a| utils(a)).collect();
                let m = acts.len();
                let v: Vec<T> = u.iter().map(|x| pref.value_of_utilities(x)).collect();
                let mut mid = vec![T::zero(); m * m];
                for i in 0..m {
                    for j in i..m {
                        let val = pref.value_of_utilities(&midpoint(&u[i], &u[j]));
                        mid[i * m + j] = val;
                        mid[j * m + i] = val;
                    }
                }
                for i in 0..m {
                    for j in i + 1..m {
                        let direct = v[i] - v[j];
                        for c in 0..m {
                            report.samples_checked += 1;
                            let mixed = mid[i * m + c] - mid[j * m + c];
                            if independence_violated(direct, mixed, tol) {
                                report.record(Witness::Independence {
                                    a: payoff(&acts[i]),
                                    b: payoff(&acts[j]),
                                    c: payoff(&acts[c]),
                                    direct,
                                    mixed,
                                });
                            }
                        }
                    }
                }
            }
        }
        SamplingPlan::Random { samples, seed, .. } => {
            report.seed = Some(*seed);
            let mut rng = corpus::rng(*seed);
            let mut order: Vec<usize> = (0..n).collect();
            for _ in 0..*samples {
                order.shuffle(&mut rng);
                let mut draw = || -> Vec<usize> {
                    let mut levels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
                    levels.sort_unstable();
                    let mut idx = vec![0; n];
                    for (pos, s) in order.iter().enumerate() {
                        idx[*s] = levels[pos];
                    }
                    idx
                };
                let (a, b, c) = (draw(), draw(), draw());
                let (ua, ub, uc) = (utils(&a), utils(&b), utils(&c));
                let direct = pref.value_of_utilities(&ua) - pref.value_of_utilities(&ub);
                let mixed = pref.value_of_utilities(&midpoint(&ua, &uc)) - pref.value_of_utilities(&midpoint(&ub, &uc));
                report.samples_checked += 1;
                if independence_violated(direct, mixed, tol) {
                    report.record(Witness::Independence {
                        a: payoff(&a),
                        b: payoff(&b),
                        c: payoff(&c),
                        direct,
                        mixed,
                    });
                }
            }
        }
    }

    if report.holds && n <= 4 {
        report.non_vacuity = search_non_comonotonic_reversal(pref, &grid, &ugrid, tol);
    }
    Ok(report)
}

/// A violating triple on the lowest, middle and highest grid points, if any.
fn search_non_comonotonic_reversal<T: Scalar, P: Preference<T> + ?Sized>(
    pref: &P,
    grid: &[T],
    ugrid: &[T],
    tol: T,
) -> Option<Witness<T>> {
    let n = pref.space().len();
    let picks = [0, grid.len() / 2, grid.len() - 1];
    let count = 3usize.pow(n as u32);
    let decode = |mut code: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let p = picks[code % 3];
                code /= 3;
                p
            })
            .collect()
    };
    let acts: Vec<Vec<usize>> = (0..count).map(decode).collect();
    let u: Vec<Vec<T>> = acts.iter().map(|a| a.iter().map(|g| ugrid[*g]).collect()).collect();
    let v: Vec<T> = u.iter().map(|x| pref.value_of_utilities(x)).collect();
    let mut mid = vec![T::zero(); count * count];
    for i in 0..count {
        for j in i..count {
            let val = pref.value_of_utilities(&midpoint(&u[i], &u[j]));
            mid[i * count + j] = val;
            mid[j * count + i] = val;
        }
    }
    for i in 0..count {
        for j in 0..count {
            let direct = v[i] - v[j];
            for c in 0..count {
                let mixed = mid[i * count + c] - mid[j * count + c];
                if independence_violated(direct, mixed, tol) {
                    let payoff = |idx: &[usize]| -> Vec<T> { idx.iter().map(|g| grid[*g]).collect() };
                    return Some(Witness::Independence {
                        a: payoff(&acts[i]),
                        b: payoff(&acts[j]),
                        c: payoff(&acts[c]),
                        direct,
                        mixed,
                    });
                }
            }
        }
    }
    None
}

fn check_modular_direction<T: Scalar>(nu: &SetFunction<T>, tol: T, supermodular: bool) -> AxiomReport<T> {
    let mut report = AxiomReport::new(if supermodular {
        Axiom::Supermodularity
    } else {
        Axiom::Submodularity
    });
    let events: Vec<Event> = nu.space().events().collect();
    for (i, e) in events.iter().enumerate() {
        for f in &events[i + 1..] {
            report.samples_checked += 1;
            let joint = nu.get(e.union(*f)) + nu.get(e.intersection(*f));
            let separate = nu.get(*e) + nu.get(*f);
            let bad = if supermodular {
                joint < separate - tol
            } else {
                joint > separate + tol
            };
            if bad {
                report.record(Witness::EventPair {
                    e: *e,
                    f: *f,
                    supermodular,
                    joint,
                    separate,
                });
            }
        }
    }
    report
}

/// `ν(E∪F) + ν(E∩F) ≥ ν(E) + ν(F)` for every pair of events.
pub fn check_supermodularity<T: Scalar, P: Preference<T> + ?Sized>(pref: &P) -> AxiomReport<T> {
    check_modular_direction(&capacity_of(pref), pref.tolerance(), true)
}

/// `ν(E∪F) + ν(E∩F) ≤ ν(E) + ν(F)` for every pair of events.
pub fn check_submodularity<T: Scalar, P: Preference<T> + ?Sized>(pref: &P) -> AxiomReport<T> {
    check_modular_direction(&capacity_of(pref), pref.tolerance(), false)
}

/// Closure and local additivity of the critical family.
///
/// In min mode the additivity condition is
/// `ν(A) + ν(A∩E∩F) = ν(A∩E) + ν(A∩F)` for `A ⊆ E∪F`. Max mode checks the
/// conjugate statement: `ν(B) + ν(B∪E∪F) = ν(B∪E) + ν(B∪F)` for `B ⊇ E∩F`,
/// with the intersection always critical and the union critical unless it
/// is the full set.
pub fn check_critical_event_modularity<T: Scalar>(nu: &SetFunction<T>, mode: Mode) -> AxiomReport<T> {
    let tol = T::comparison_tol();
    let family = critical_family(nu, mode);
    let full = nu.space().full();
    let mut report = AxiomReport::new(Axiom::CriticalEventModularity);
    let members = family.members();
    for (i, e) in members.iter().enumerate() {
        for f in &members[i..] {
            let (e, f) = (*e, *f);
            let (meet, join) = (e.intersection(f), e.union(f));
            let witness = |condition, probe, lhs, rhs| Witness::Modularity {
                mode,
                e,
                f,
                condition,
                probe,
                lhs,
                rhs,
            };
            report.samples_checked += 1;
            let need_meet = match mode {
                Mode::Min => !meet.is_empty(),
                Mode::Max => true,
            };
            if need_meet && !family.contains(meet) {
                report.record(witness(
                    ModularityCondition::Intersection,
                    Some(meet),
                    nu.get(meet),
                    nu.get(meet),
                ));
            }
            let need_join = match mode {
                Mode::Min => true,
                Mode::Max => join != full,
            };
            if need_join && !family.contains(join) {
                report.record(witness(
                    ModularityCondition::Union,
                    Some(join),
                    nu.get(join),
                    nu.get(join),
                ));
            }
            match mode {
                Mode::Min => {
                    for a in join.subsets() {
                        report.samples_checked += 1;
                        let lhs = nu.get(a) + nu.get(a.intersection(meet));
                        let rhs = nu.get(a.intersection(e)) + nu.get(a.intersection(f));
                        if modularity_violated(lhs, rhs, tol) {
                            report.record(witness(ModularityCondition::Additivity, Some(a), lhs, rhs));
                        }
                    }
                }
                Mode::Max => {
                    for rest in meet.complement(nu.n()).subsets() {
                        report.samples_checked += 1;
                        let b = rest.union(meet);
                        let lhs = nu.get(b) + nu.get(b.union(join));
                        let rhs = nu.get(b.union(e)) + nu.get(b.union(f));
                        if modularity_violated(lhs, rhs, tol) {
                            report.record(witness(ModularityCondition::Additivity, Some(b), lhs, rhs));
                        }
                    }
                }
            }
        }
    }
    report
}

/// Dominance (single-step raises never hurt) and eventwise monotonicity on
/// all acts with payoffs on `grid`.
///
/// The nonuniversal half compares `yEx` with `yEz` for `z < x ≤ y`, so the
/// consequence on `E` stays the better one in both binary acts.
pub fn check_biseparable_grid<T: Scalar, P: Preference<T> + ?Sized>(pref: &P, grid: &[T]) -> Result<AxiomReport<T>> {
    let n = pref.space().len();
    let tol = pref.tolerance();
    let grid = sorted_grid(grid)?;
    let ugrid = grid.iter().map(|x| pref.utility(*x)).collect::<Result<Vec<T>>>()?;
    let k = grid.len();
    let total = k
        .checked_pow(n as u32)
        .filter(|c| *c <= 1 << 20)
        .ok_or_else(|| Error::Precondition(format!("grid of {k} points on {n} states is too large")))?;
    let mut report = AxiomReport::new(Axiom::BiseparableGrid);
    let decode = |mut code: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let g = code % k;
                code /= k;
                g
            })
            .collect()
    };
    let values: Vec<T> = (0..total)
        .map(|code| pref.value_of_utilities(&decode(code).iter().map(|g| ugrid[*g]).collect::<Vec<T>>()))
        .collect();
    let payoff = |code: usize| -> Vec<T> { decode(code).iter().map(|g| grid[*g]).collect() };

    let mut stride = 1;
    for _ in 0..n {
        for code in 0..total {
            if (code / stride) % k + 1 < k {
                report.samples_checked += 1;
                let up = code + stride;
                if values[up] < values[code] - tol {
                    report.record(Witness::Dominance {
                        better: payoff(up),
                        worse: payoff(code),
                        better_value: values[up],
                        worse_value: values[code],
                    });
                }
            }
        }
        stride *= k;
    }

    // Binary acts xEz: index by the grid positions of the two consequences.
    let (lo, hi) = (ugrid[0], ugrid[k - 1]);
    let full = pref.space().full();
    let binary_value = |e: Event, on: usize, off: usize| -> T {
        pref.value_of_utilities(&crate::decision::Act::binary(n, ugrid[on], e, ugrid[off]))
    };
    for e in pref.space().events() {
        let w = pref.value_of_utilities(&crate::decision::Act::binary(n, hi, e, lo));
        let nonnull = w > lo + tol;
        let nonuniversal = w < hi - tol;
        let binary = |on: usize, off: usize| -> Vec<T> { crate::decision::Act::binary(n, grid[on], e, grid[off]) };
        for x in 0..k {
            for y in 0..k {
                for z in 0..=y {
                    if nonnull && x > y {
                        report.samples_checked += 1;
                        let (p, q) = (binary_value(e, x, z), binary_value(e, y, z));
                        if p <= q + tol {
                            report.record(Witness::Eventwise {
                                event: e,
                                preferred: binary(x, z),
                                other: binary(y, z),
                                preferred_value: p,
                                other_value: q,
                            });
                        }
                    }
                    if nonuniversal && x > z && x <= y && e != full {
                        report.samples_checked += 1;
                        let (p, q) = (binary_value(e, y, x), binary_value(e, y, z));
                        if p <= q + tol {
                            report.record(Witness::Eventwise {
                                event: e,
                                preferred: binary(y, x),
                                other: binary(y, z),
                                preferred_value: p,
                                other_value: q,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

impl<T: Scalar> Witness<T> {
    /// Re-evaluates the witness against `pref`; true if it is still a violation.
    pub fn replays<P: Preference<T> + ?Sized>(&self, pref: &P) -> Result<bool> {
        let tol = pref.tolerance();
        Ok(match self {
            Witness::Independence { a, b, c, .. } => {
                let (ua, ub, uc) = (utils_of(pref, a)?, utils_of(pref, b)?, utils_of(pref, c)?);
                let direct = pref.value_of_utilities(&ua) - pref.value_of_utilities(&ub);
                let mixed = pref.value_of_utilities(&midpoint(&ua, &uc)) - pref.value_of_utilities(&midpoint(&ub, &uc));
                independence_violated(direct, mixed, tol)
            }
            Witness::EventPair { e, f, supermodular, .. } => {
                let joint = pref.weight(e.union(*f)) + pref.weight(e.intersection(*f));
                let separate = pref.weight(*e) + pref.weight(*f);
                if *supermodular {
                    joint < separate - tol
                } else {
                    joint > separate + tol
                }
            }
            Witness::Modularity {
                mode,
                e,
                f,
                condition,
                probe,
                ..
            } => {
                let nu = capacity_of(pref);
                let tol = T::comparison_tol();
                match condition {
                    ModularityCondition::Intersection | ModularityCondition::Union => {
                        let family: EventFamily = critical_family(&nu, *mode);
                        let target = probe.expect("closure witnesses name their event");
                        family.contains(*e) && family.contains(*f) && !family.contains(target)
                    }
                    ModularityCondition::Additivity => {
                        let p = probe.expect("additivity witnesses name their probe");
                        let (meet, join) = (e.intersection(*f), e.union(*f));
                        let (lhs, rhs) = match mode {
                            Mode::Min => (
                                nu.get(p) + nu.get(p.intersection(meet)),
                                nu.get(p.intersection(*e)) + nu.get(p.intersection(*f)),
                            ),
                            Mode::Max => (
                                nu.get(p) + nu.get(p.union(join)),
                                nu.get(p.union(*e)) + nu.get(p.union(*f)),
                            ),
                        };
                        modularity_violated(lhs, rhs, tol)
                    }
                }
            }
            Witness::Dominance { better, worse, .. } => {
                better.iter().zip(worse).all(|(x, y)| x >= y) && pref.value(better)? < pref.value(worse)? - tol
            }
            Witness::Eventwise { preferred, other, .. } => pref.value(preferred)? <= pref.value(other)? + tol,
        })
    }
}
