//! Welfare loss, transparency loss, witness searches and comparative statics.

use serde::{Deserialize, Serialize};

use crate::decision::{validate_beliefs, Act, ModelKind, Scenario, UtilitySpec};
use crate::error::{Error, Result};
use crate::identification::recover_structure;
use crate::lattice::{EventFamily, StateSpace};
use crate::scalar::{approx_eq, max_of, Scalar};
use crate::set_function::{mobius_transform, SetFunction};

/// A non-empty list of acts to choose from.
#[derive(Debug, Clone, PartialEq)]
pub struct Menu<T> {
    pub acts: Vec<Act<T>>,
}

impl<T: Scalar> Menu<T> {
    pub fn new(acts: Vec<Act<T>>) -> Result<Self> {
        if acts.is_empty() {
            return Err(Error::EmptyMenu);
        }
        Ok(Self { acts })
    }

    /// Every act of the scenario.
    pub fn all(sc: &Scenario<T>) -> Result<Self> {
        Self::new(sc.acts().to_vec())
    }

    pub fn from_names<S: AsRef<str>>(sc: &Scenario<T>, names: &[S]) -> Result<Self> {
        let acts = names
            .iter()
            .map(|name| {
                sc.act(name.as_ref())
                    .cloned()
                    .ok_or_else(|| Error::validation("menu", format!("unknown act `{}`", name.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(acts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Choice<T> {
    pub act: String,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport<T> {
    /// Act with the highest expected utility under the true beliefs.
    pub eu_best: Choice<T>,
    /// Act chosen by the model, with its model value.
    pub model_best: Choice<T>,
    /// Expected utility of the model's choice.
    pub model_best_eu: T,
    pub loss: T,
    pub transparency_delta: Option<T>,
}

/// `max EU − EU(model choice)` on a strict menu.
pub fn welfare_loss<T: Scalar>(sc: &Scenario<T>, menu: &Menu<T>, true_beliefs: Option<&[T]>) -> Result<LossReport<T>> {
    let beliefs = true_beliefs.unwrap_or(sc.beliefs());
    validate_beliefs(sc.n(), beliefs, "true_beliefs")?;
    let tol = sc.tolerance();
    let model_values = menu
        .acts
        .iter()
        .map(|a| sc.model_utility(&a.payoff))
        .collect::<Result<Vec<T>>>()?;
    for i in 0..model_values.len() {
        for j in i + 1..model_values.len() {
            if approx_eq(model_values[i], model_values[j], tol) {
                return Err(Error::MenuNotStrict(
                    menu.acts[i].name.clone(),
                    menu.acts[j].name.clone(),
                ));
            }
        }
    }
    let eu = menu
        .acts
        .iter()
        .map(|a| sc.expected_utility_under(beliefs, &a.payoff))
        .collect::<Result<Vec<T>>>()?;
    let argmax = |v: &[T]| -> usize {
        let best = max_of(v.iter().copied()).expect("non-empty menu");
        v.iter().position(|x| *x == best).expect("maximum is attained")
    };
    let (ib, im) = (argmax(&eu), argmax(&model_values));
    Ok(LossReport {
        eu_best: Choice {
            act: menu.acts[ib].name.clone(),
            value: eu[ib],
        },
        model_best: Choice {
            act: menu.acts[im].name.clone(),
            value: model_values[im],
        },
        model_best_eu: eu[im],
        loss: eu[ib] - eu[im],
        transparency_delta: None,
    })
}

/// Non-empty members of the union closure.
fn union_class(family: &EventFamily) -> EventFamily {
    EventFamily::new(family.nonempty()).close_under_union()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransparencyReport<T> {
    pub base: LossReport<T>,
    pub richer: LossReport<T>,
    /// Loss under the scenario's family minus loss under the richer one.
    pub delta: T,
}

pub fn transparency_report<T: Scalar>(
    sc: &Scenario<T>,
    menu: &Menu<T>,
    richer: &EventFamily,
    true_beliefs: Option<&[T]>,
) -> Result<TransparencyReport<T>> {
    let rich = sc.with_verifiable(richer)?;
    if !union_class(sc.verifiable()).is_subfamily_of(&union_class(rich.verifiable())) {
        return Err(Error::Precondition(
            "the richer family must contain the union closure of the scenario's family".into(),
        ));
    }
    let mut base = welfare_loss(sc, menu, true_beliefs)?;
    let richer = welfare_loss(&rich, menu, true_beliefs)?;
    let delta = base.loss - richer.loss;
    base.transparency_delta = Some(delta);
    Ok(TransparencyReport { base, richer, delta })
}

pub fn transparency_loss<T: Scalar>(sc: &Scenario<T>, menu: &Menu<T>, richer: &EventFamily) -> Result<T> {
    transparency_report(sc, menu, richer, None).map(|r| r.delta)
}

/// Grid `0, step, 2·step, …` up to `hi`.
pub fn step_grid<T: Scalar>(step: T, hi: T) -> Result<Vec<T>> {
    if step <= T::zero() {
        return Err(Error::Precondition(format!("grid step must be positive, got {step}")));
    }
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let x = step * T::from_usize_lossy(k);
        if x > hi + T::comparison_tol() {
            break;
        }
        out.push(x);
        k += 1;
    }
    Ok(out)
}

fn show_payoff<T: Scalar>(payoff: &[T]) -> String {
    let parts: Vec<String> = payoff.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// All acts on the grid, then each act raised by `0.01` on one state.
fn search_acts<T: Scalar>(n: usize, grid: &[T], u: &UtilitySpec<T>) -> Result<Vec<(Act<T>, Vec<T>)>> {
    let k = grid.len();
    let total = k
        .checked_pow(n as u32)
        .filter(|c| *c <= 20_000)
        .ok_or_else(|| Error::Precondition(format!("grid of {k} points on {n} states is too large to search")))?;
    let bump = T::from_f64_lossy(0.01);
    let mut payoffs = Vec::with_capacity(total * (n + 1));
    for code in 0..total {
        let mut c = code;
        let p: Vec<T> = (0..n)
            .map(|_| {
                let x = grid[c % k];
                c /= k;
                x
            })
            .collect();
        payoffs.push(p);
    }
    for code in 0..total {
        for s in 0..n {
            let mut p = payoffs[code].clone();
            p[s] = p[s] + bump;
            payoffs.push(p);
        }
    }
    Ok(payoffs
        .into_iter()
        .filter_map(|p| {
            let utils = p.iter().map(|x| u.apply(*x)).collect::<Result<Vec<T>>>().ok()?;
            Some((Act::new(show_payoff(&p), p), utils))
        })
        .collect())
}

/// Uniform beliefs, then each state carrying all but `0.005` per other state.
pub fn candidate_beliefs<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    let eps = T::from_f64_lossy(0.005);
    let mut out = vec![vec![T::one() / T::from_usize_lossy(n); n]];
    if n > 1 {
        for s in 0..n {
            let mut mu = vec![eps; n];
            mu[s] = T::one() - eps * T::from_usize_lossy(n - 1);
            out.push(mu);
        }
    }
    out
}

/// A bare scenario used only for evaluation.
fn evaluator<T: Scalar>(
    space: &StateSpace,
    u: &UtilitySpec<T>,
    family: &EventFamily,
    beliefs: Vec<T>,
    model: ModelKind,
) -> Result<Scenario<T>> {
    Scenario::new(space.clone(), Vec::new(), u.clone(), beliefs, family.clone(), model)
}

struct ValueTable<T> {
    model: Vec<T>,
}

impl<T: Scalar> ValueTable<T> {
    fn new(sc: &Scenario<T>, acts: &[(Act<T>, Vec<T>)]) -> Self {
        Self {
            model: acts
                .iter()
                .map(|(_, u)| sc.value_of_utilities_as(sc.model(), u))
                .collect(),
        }
    }

    /// Loss of the two-act menu `{i, j}`, or `None` if the menu is not strict.
    fn pair_loss(&self, eu: &[T], i: usize, j: usize, tol: T) -> Option<T> {
        let (vi, vj) = (self.model[i], self.model[j]);
        if approx_eq(vi, vj, tol) {
            return None;
        }
        let chosen = if vi > vj { i } else { j };
        let best = if eu[i] >= eu[j] { eu[i] } else { eu[j] };
        Some(best - eu[chosen])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MenuWitness<T> {
    pub menu: Menu<T>,
    pub beliefs: Vec<T>,
    pub base: LossReport<T>,
    pub richer: LossReport<T>,
    pub delta: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndeterminacyWitnesses<T> {
    /// Enriching the family raises the loss.
    pub negative: MenuWitness<T>,
    /// Enriching the family lowers the loss.
    pub positive: MenuWitness<T>,
}

/// Two-act menus whose transparency loss has either sign, found by a
/// lexicographic search over grid acts and candidate beliefs.
pub fn find_indeterminacy_witnesses<T: Scalar>(
    space: &StateSpace,
    u: &UtilitySpec<T>,
    base: &EventFamily,
    richer: &EventFamily,
    grid: &[T],
    model: ModelKind,
) -> Result<IndeterminacyWitnesses<T>> {
    let n = space.len();
    let base = crate::decision::validate_verifiable(space, base)?;
    let richer = crate::decision::validate_verifiable(space, richer)?;
    let (cb, cr) = (union_class(&base), union_class(&richer));
    if !cb.is_subfamily_of(&cr) || cb == cr {
        return Err(Error::Precondition(
            "the richer family must strictly enlarge the union closure".into(),
        ));
    }
    if cr == EventFamily::all_nonempty(n) {
        return Err(Error::Precondition(
            "the richer family must not make every event verifiable".into(),
        ));
    }
    let acts = search_acts(n, grid, u)?;
    let mut negative: Option<MenuWitness<T>> = None;
    let mut positive: Option<MenuWitness<T>> = None;
    for beliefs in candidate_beliefs::<T>(n) {
        let sb = evaluator(space, u, &base, beliefs.clone(), model)?;
        let sr = evaluator(space, u, &richer, beliefs.clone(), model)?;
        let tol = sb.tolerance();
        let (tb, tr) = (ValueTable::new(&sb, &acts), ValueTable::new(&sr, &acts));
        let eu: Vec<T> = acts
            .iter()
            .map(|(_, u)| crate::decision::expected_value(&beliefs, u))
            .collect();
        'pairs: for i in 0..acts.len() {
            for j in i + 1..acts.len() {
                let (Some(lb), Some(lr)) = (tb.pair_loss(&eu, i, j, tol), tr.pair_loss(&eu, i, j, tol)) else {
                    continue;
                };
                let delta = lb - lr;
                let slot = if delta < -tol && negative.is_none() {
                    &mut negative
                } else if delta > tol && positive.is_none() {
                    &mut positive
                } else {
                    continue;
                };
                let menu = Menu::new(vec![acts[i].0.clone(), acts[j].0.clone()])?;
                let sb_full = sb.with_acts(menu.acts.clone())?;
                let report = transparency_report(&sb_full, &menu, &richer, None)?;
                if !approx_eq(report.delta, delta, tol) {
                    return Err(Error::Inconsistent(format!(
                        "search table gave {delta}, direct evaluation {}",
                        report.delta
                    )));
                }
                *slot = Some(MenuWitness {
                    menu,
                    beliefs: beliefs.clone(),
                    base: report.base,
                    richer: report.richer,
                    delta: report.delta,
                });
                if negative.is_some() && positive.is_some() {
                    break 'pairs;
                }
            }
        }
        if let (Some(neg), Some(pos)) = (&negative, &positive) {
            return Ok(IndeterminacyWitnesses {
                negative: neg.clone(),
                positive: pos.clone(),
            });
        }
    }
    Err(Error::NotFound(format!(
        "no menus with transparency loss of both signs among {} grid acts",
        acts.len()
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelPairLoss<T> {
    pub menu: Menu<T>,
    pub verification: LossReport<T>,
    pub obfuscation: LossReport<T>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum VoLossOutcome<T> {
    /// Full verifiability: both losses were zero on every sampled menu.
    AlwaysZero { menus_checked: u64, beliefs_checked: usize },
    Witnesses {
        beliefs: Vec<T>,
        /// Verification loses, obfuscation does not.
        verification_worse: ModelPairLoss<T>,
        /// Obfuscation loses, verification does not.
        obfuscation_worse: ModelPairLoss<T>,
    },
}

/// Either a certificate that both models always choose like expected
/// utility, or menus on which each model loses while the other does not.
pub fn find_vo_loss_witnesses<T: Scalar>(
    space: &StateSpace,
    u: &UtilitySpec<T>,
    family: &EventFamily,
    grid: &[T],
) -> Result<VoLossOutcome<T>> {
    let n = space.len();
    let family = crate::decision::validate_verifiable(space, family)?;
    let trivial = union_class(&family) == EventFamily::all_nonempty(n);
    let acts = search_acts(n, grid, u)?;
    let mut menus_checked = 0u64;
    let candidates = candidate_beliefs::<T>(n);
    for beliefs in &candidates {
        let sv = evaluator(space, u, &family, beliefs.clone(), ModelKind::Verification)?;
        let so = sv.with_model(ModelKind::Obfuscation);
        let tol = sv.tolerance();
        let (tv, to) = (ValueTable::new(&sv, &acts), ValueTable::new(&so, &acts));
        let eu: Vec<T> = acts
            .iter()
            .map(|(_, u)| crate::decision::expected_value(beliefs, u))
            .collect();
        let mut ver_worse: Option<(usize, usize)> = None;
        let mut obf_worse: Option<(usize, usize)> = None;
        'pairs: for i in 0..acts.len() {
            for j in i + 1..acts.len() {
                let (Some(lv), Some(lo)) = (tv.pair_loss(&eu, i, j, tol), to.pair_loss(&eu, i, j, tol)) else {
                    continue;
                };
                menus_checked += 1;
                if trivial {
                    if lv > tol || lo > tol {
                        return Err(Error::Inconsistent(format!(
                            "positive loss under full verifiability on {} vs {}",
                            acts[i].0.name, acts[j].0.name
                        )));
                    }
                    continue;
                }
                if lv > tol && lo <= tol && ver_worse.is_none() {
                    ver_worse = Some((i, j));
                } else if lo > tol && lv <= tol && obf_worse.is_none() {
                    obf_worse = Some((i, j));
                }
                if ver_worse.is_some() && obf_worse.is_some() {
                    break 'pairs;
                }
            }
        }
        if let (Some(a), Some(b)) = (ver_worse, obf_worse) {
            let build = |(i, j): (usize, usize)| -> Result<ModelPairLoss<T>> {
                let menu = Menu::new(vec![acts[i].0.clone(), acts[j].0.clone()])?;
                let scv = sv.with_acts(menu.acts.clone())?;
                let verification = welfare_loss(&scv, &menu, None)?;
                let obfuscation = welfare_loss(&scv.with_model(ModelKind::Obfuscation), &menu, None)?;
                Ok(ModelPairLoss {
                    menu,
                    verification,
                    obfuscation,
                })
            };
            let (vw, ow) = (build(a)?, build(b)?);
            if !(vw.verification.loss > tol && vw.obfuscation.loss <= tol)
                || !(ow.obfuscation.loss > tol && ow.verification.loss <= tol)
            {
                return Err(Error::Inconsistent(
                    "direct evaluation disagrees with the search table".into(),
                ));
            }
            return Ok(VoLossOutcome::Witnesses {
                beliefs: beliefs.clone(),
                verification_worse: vw,
                obfuscation_worse: ow,
            });
        }
    }
    if trivial {
        return Ok(VoLossOutcome::AlwaysZero {
            menus_checked,
            beliefs_checked: candidates.len(),
        });
    }
    Err(Error::NotFound(format!(
        "no menu pair separating the two models among {} grid acts",
        acts.len()
    )))
}

/// Attitude of the second utility relative to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskComparison {
    /// The second is more risk averse (`u2 ∘ u1⁻¹` concave).
    More,
    /// The second is less risk averse (`u2 ∘ u1⁻¹` convex).
    Less,
    /// Affine transforms of each other.
    Equal,
    Incomparable,
}

/// Discrete concavity of `u2 ∘ u1⁻¹` through the grid points.
pub fn compare_risk_aversion<T: Scalar>(
    u1: &UtilitySpec<T>,
    u2: &UtilitySpec<T>,
    grid: &[T],
) -> Result<RiskComparison> {
    let mut g = grid.to_vec();
    g.sort_by(|a, b| a.partial_cmp(b).expect("comparable grid values"));
    g.dedup();
    let a = g.iter().map(|x| u1.apply(*x)).collect::<Result<Vec<T>>>()?;
    let b = g.iter().map(|x| u2.apply(*x)).collect::<Result<Vec<T>>>()?;
    for w in 0..g.len().saturating_sub(1) {
        if a[w + 1] <= a[w] || b[w + 1] <= b[w] {
            return Err(Error::Utility(format!(
                "utilities are not strictly increasing between {} and {}",
                g[w],
                g[w + 1]
            )));
        }
    }
    let slopes: Vec<T> = (1..g.len()).map(|i| (b[i] - b[i - 1]) / (a[i] - a[i - 1])).collect();
    let tol = T::comparison_tol();
    let close = |x: T, y: T| {
        let scale = if x.abs() > y.abs() { x.abs() } else { y.abs() };
        let scale = if scale > T::one() { scale } else { T::one() };
        (x - y).abs() <= tol * scale
    };
    let mut falling = false;
    let mut rising = false;
    for w in slopes.windows(2) {
        if close(w[0], w[1]) {
            continue;
        }
        if w[1] < w[0] {
            falling = true;
        } else {
            rising = true;
        }
    }
    Ok(match (falling, rising) {
        (false, false) => RiskComparison::Equal,
        (true, false) => RiskComparison::More,
        (false, true) => RiskComparison::Less,
        (true, true) => RiskComparison::Incomparable,
    })
}

/// Union-closure relation of the first capacity's structure to the second's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifiabilityRelation {
    Subset,
    Superset,
    Equal,
    Incomparable,
}

fn nonnull_events<T: Scalar>(nu: &SetFunction<T>) -> Vec<bool> {
    let tol = T::comparison_tol();
    let relevant = mobius_transform(nu).positive_events(tol).support();
    nu.space()
        .events()
        .map(|f| nu.get(f) > tol || f.meets(relevant))
        .collect()
}

/// `ν2(E) = ν2(E−F)` implies `ν1(E) = ν1(E−F)` for every `F ⊆ E`.
fn indifferences_inherited<T: Scalar>(nu1: &SetFunction<T>, nu2: &SetFunction<T>) -> bool {
    let tol = T::comparison_tol();
    nu1.space().events().all(|e| {
        e.nonempty_subsets().all(|f| {
            let rest = e.difference(f);
            !approx_eq(nu2.get(e), nu2.get(rest), tol) || approx_eq(nu1.get(e), nu1.get(rest), tol)
        })
    })
}

/// Compares the verifiable structures behind two verification capacities,
/// by union closures and by the binary-act indifference test.
pub fn compare_verifiability<T: Scalar>(nu1: &SetFunction<T>, nu2: &SetFunction<T>) -> Result<VerifiabilityRelation> {
    if nu1.space().len() != nu2.space().len() {
        return Err(Error::Precondition("capacities live on different state spaces".into()));
    }
    if nonnull_events(nu1) != nonnull_events(nu2) {
        return Err(Error::NullEventMismatch);
    }
    let (c1, c2) = (
        recover_structure(nu1)?.union_closure,
        recover_structure(nu2)?.union_closure,
    );
    let by_closure = (c1.is_subfamily_of(&c2), c2.is_subfamily_of(&c1));
    let by_behavior = (indifferences_inherited(nu1, nu2), indifferences_inherited(nu2, nu1));
    if by_closure != by_behavior {
        return Err(Error::Inconsistent(format!(
            "closure comparison {by_closure:?} disagrees with indifference comparison {by_behavior:?}"
        )));
    }
    Ok(match by_closure {
        (true, true) => VerifiabilityRelation::Equal,
        (true, false) => VerifiabilityRelation::Subset,
        (false, true) => VerifiabilityRelation::Superset,
        (false, false) => VerifiabilityRelation::Incomparable,
    })
}

/// The union-closure class of a family, as used by the searches.
pub fn verifiable_class(family: &EventFamily) -> EventFamily {
    union_class(family)
}

/// Whether every non-empty event is a union of members.
pub fn is_full_verifiability(n: usize, family: &EventFamily) -> bool {
    union_class(family) == EventFamily::all_nonempty(n)
}
