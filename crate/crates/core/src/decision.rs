//! Scenarios and the evaluation functionals: expected utility, expected
//! verification utility and expected obfuscation utility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Event, EventFamily, StateSpace};
use crate::scalar::{approx_eq, max_of, min_of, sum_of, Scalar};
use crate::set_function::{choquet_by_level_sets, SetFunction};

/// Which functional a scenario is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Verification,
    Obfuscation,
    ExpectedUtility,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verification" => Ok(ModelKind::Verification),
            "obfuscation" => Ok(ModelKind::Obfuscation),
            "expected_utility" => Ok(ModelKind::ExpectedUtility),
            other => Err(Error::Parse(format!("unknown model `{other}`"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Verification => "verification",
            ModelKind::Obfuscation => "obfuscation",
            ModelKind::ExpectedUtility => "expected_utility",
        })
    }
}

/// Utility over consequences.
#[derive(Debug, Clone, PartialEq)]
pub enum UtilitySpec<T> {
    Identity,
    /// `x^exponent` on `x >= 0`.
    Power {
        exponent: f64,
    },
    /// Explicit `(consequence, utility)` pairs, sorted by consequence.
    Table(Vec<(T, T)>),
}

impl<T: Scalar> UtilitySpec<T> {
    pub fn table(mut entries: Vec<(T, T)>) -> Result<Self> {
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable consequences"));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Utility(format!("duplicate table key {}", w[0].0)));
            }
            if w[0].1 >= w[1].1 {
                return Err(Error::Utility(format!(
                    "table is not strictly increasing between {} and {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(UtilitySpec::Table(entries))
    }

    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Utility(format!(
                "power exponent must be positive, got {exponent}"
            )));
        }
        Ok(UtilitySpec::Power { exponent })
    }

    pub fn apply(&self, x: T) -> Result<T> {
        match self {
            UtilitySpec::Identity => Ok(x),
            UtilitySpec::Power { exponent } => {
                if x < T::zero() {
                    return Err(Error::Utility(format!("power utility undefined at {x}")));
                }
                Ok(x.powf(*exponent))
            }
            UtilitySpec::Table(entries) => entries
                .iter()
                .find(|(k, _)| approx_eq(*k, x, T::comparison_tol()))
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Utility(format!("no table entry for consequence {x}"))),
        }
    }

    /// The consequence with utility `y`.
    pub fn inverse(&self, y: T) -> Result<T> {
        match self {
            UtilitySpec::Identity => Ok(y),
            UtilitySpec::Power { exponent } => {
                if y < T::zero() {
                    return Err(Error::Utility(format!("power utility never reaches {y}")));
                }
                Ok(y.powf(1.0 / exponent))
            }
            UtilitySpec::Table(entries) => entries
                .iter()
                .find(|(_, v)| approx_eq(*v, y, T::comparison_tol()))
                .map(|(k, _)| *k)
                .ok_or_else(|| Error::Utility(format!("utility {y} is not attained by the table"))),
        }
    }

    /// Checks strict monotonicity on, and coverage of, the given consequences.
    pub fn validate_on(&self, consequences: &[T]) -> Result<()> {
        match self {
            UtilitySpec::Identity => Ok(()),
            UtilitySpec::Power { exponent } => {
                Self::power(*exponent)?;
                match consequences.iter().find(|x| **x < T::zero()) {
                    Some(x) => Err(Error::Utility(format!(
                        "power utility requires non-negative payoffs, got {x}"
                    ))),
                    None => Ok(()),
                }
            }
            UtilitySpec::Table(_) => {
                for x in consequences {
                    self.apply(*x)?;
                }
                Ok(())
            }
        }
    }

    /// Table keys, if any; otherwise `None`.
    pub fn table_keys(&self) -> Option<Vec<T>> {
        match self {
            UtilitySpec::Table(entries) => Some(entries.iter().map(|(k, _)| *k).collect()),
            _ => None,
        }
    }
}

/// A map from states to consequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Act<T> {
    pub name: String,
    pub payoff: Vec<T>,
}

impl<T: Scalar> Act<T> {
    pub fn new(name: impl Into<String>, payoff: Vec<T>) -> Self {
        Self {
            name: name.into(),
            payoff,
        }
    }

    pub fn constant(name: impl Into<String>, n: usize, x: T) -> Self {
        Self::new(name, vec![x; n])
    }

    /// `a_E b`: agrees with `a` on `e` and with `b` off `e`.
    pub fn composite(name: impl Into<String>, a: &[T], e: Event, b: &[T]) -> Self {
        let payoff = (0..a.len()).map(|s| if e.contains(s) { a[s] } else { b[s] }).collect();
        Self::new(name, payoff)
    }

    /// `γ F β` as a payoff vector.
    pub fn binary(n: usize, gamma: T, f: Event, beta: T) -> Vec<T> {
        (0..n).map(|s| if f.contains(s) { gamma } else { beta }).collect()
    }

    pub fn payoff(&self) -> &[T] {
        &self.payoff
    }
}

fn members_by_state(n: usize, family: &EventFamily) -> Vec<Vec<Event>> {
    (0..n)
        .map(|s| family.nonempty().filter(|e| e.contains(s)).collect())
        .collect()
}

fn uncovered(state: usize) -> Error {
    Error::validation(
        "verifiable",
        format!("state {state} is not covered by any verifiable event"),
    )
}

/// `Σ_s μ(s) · max_{E∈𝒱: s∈E} min_{t∈E} u_t` over the non-empty members of `family`.
pub fn verification_value<T: Scalar>(family: &EventFamily, beliefs: &[T], utils: &[T]) -> Result<T> {
    let mut total = T::zero();
    for (s, p) in beliefs.iter().enumerate() {
        let best = max_of(
            family
                .nonempty()
                .filter(|e| e.contains(s))
                .map(|e| min_of(e.states().map(|t| utils[t])).expect("non-empty")),
        )
        .ok_or_else(|| uncovered(s))?;
        total = total + *p * best;
    }
    Ok(total)
}

/// `Σ_s μ(s) · min_{E∈𝒱: s∈E} max_{t∈E} u_t` over the non-empty members of `family`.
pub fn obfuscation_value<T: Scalar>(family: &EventFamily, beliefs: &[T], utils: &[T]) -> Result<T> {
    let mut total = T::zero();
    for (s, p) in beliefs.iter().enumerate() {
        let worst = min_of(
            family
                .nonempty()
                .filter(|e| e.contains(s))
                .map(|e| max_of(e.states().map(|t| utils[t])).expect("non-empty")),
        )
        .ok_or_else(|| uncovered(s))?;
        total = total + *p * worst;
    }
    Ok(total)
}

pub fn expected_value<T: Scalar>(beliefs: &[T], utils: &[T]) -> T {
    sum_of(beliefs.iter().zip(utils).map(|(p, u)| *p * *u))
}

/// Validates a belief vector: non-negative entries summing to one.
pub fn validate_beliefs<T: Scalar>(n: usize, beliefs: &[T], path: &str) -> Result<()> {
    if beliefs.len() != n {
        return Err(Error::validation(
            path,
            format!("expected {n} entries, got {}", beliefs.len()),
        ));
    }
    for (s, p) in beliefs.iter().enumerate() {
        if *p < T::zero() || !p.is_finite_value() {
            return Err(Error::validation(
                format!("{path}[{s}]"),
                format!("invalid probability {p}"),
            ));
        }
    }
    let total = sum_of(beliefs.iter().copied());
    if !approx_eq(total, T::one(), T::validity_tol()) {
        return Err(Error::validation(path, format!("beliefs sum to {total}, not 1")));
    }
    Ok(())
}

/// Intersection-closes `family` and checks it contains the full state set.
pub fn validate_verifiable(space: &StateSpace, family: &EventFamily) -> Result<EventFamily> {
    for e in family.iter() {
        space.check_event(e)?;
    }
    let closed = family.close_under_intersection();
    if !closed.is_pi_system_with_support(space.full()) {
        return Err(Error::validation(
            "verifiable",
            "the family must contain the full state set",
        ));
    }
    Ok(closed)
}

/// A validated decision problem. Immutable once built.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    space: StateSpace,
    acts: Vec<Act<T>>,
    utility: UtilitySpec<T>,
    beliefs: Vec<T>,
    verifiable: EventFamily,
    model: ModelKind,
    tolerance: T,
    by_state: Vec<Vec<Event>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        space: StateSpace,
        acts: Vec<Act<T>>,
        utility: UtilitySpec<T>,
        beliefs: Vec<T>,
        verifiable: EventFamily,
        model: ModelKind,
    ) -> Result<Self> {
        let n = space.len();
        for (i, act) in acts.iter().enumerate() {
            if act.payoff.len() != n {
                return Err(Error::validation(
                    format!("acts.{}", act.name),
                    format!("expected {n} payoffs, got {}", act.payoff.len()),
                ));
            }
            if let Some(x) = act.payoff.iter().find(|x| !x.is_finite_value()) {
                return Err(Error::validation(
                    format!("acts.{}", act.name),
                    format!("non-finite payoff {x}"),
                ));
            }
            if acts[..i].iter().any(|b| b.name == act.name) {
                return Err(Error::validation(format!("acts.{}", act.name), "duplicate act name"));
            }
        }
        let payoffs: Vec<T> = acts.iter().flat_map(|a| a.payoff.iter().copied()).collect();
        utility
            .validate_on(&payoffs)
            .map_err(|e| Error::validation("utility", e.to_string()))?;
        validate_beliefs(n, &beliefs, "beliefs")?;
        let verifiable = validate_verifiable(&space, &verifiable)?;
        let by_state = members_by_state(n, &verifiable);
        Ok(Self {
            space,
            acts,
            utility,
            beliefs,
            verifiable,
            model,
            tolerance: T::comparison_tol(),
            by_state,
        })
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_model(&self, model: ModelKind) -> Self {
        Self { model, ..self.clone() }
    }

    pub fn with_verifiable(&self, verifiable: &EventFamily) -> Result<Self> {
        let verifiable = validate_verifiable(&self.space, verifiable)?;
        let by_state = members_by_state(self.space.len(), &verifiable);
        Ok(Self {
            verifiable,
            by_state,
            ..self.clone()
        })
    }

    pub fn with_beliefs(&self, beliefs: Vec<T>) -> Result<Self> {
        validate_beliefs(self.space.len(), &beliefs, "beliefs")?;
        Ok(Self {
            beliefs,
            ..self.clone()
        })
    }

    pub fn with_acts(&self, acts: Vec<Act<T>>) -> Result<Self> {
        Self::new(
            self.space.clone(),
            acts,
            self.utility.clone(),
            self.beliefs.clone(),
            self.verifiable.clone(),
            self.model,
        )
        .map(|s| s.with_tolerance(self.tolerance))
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn acts(&self) -> &[Act<T>] {
        &self.acts
    }

    pub fn act(&self, name: &str) -> Option<&Act<T>> {
        self.acts.iter().find(|a| a.name == name)
    }

    pub fn utility(&self) -> &UtilitySpec<T> {
        &self.utility
    }

    pub fn beliefs(&self) -> &[T] {
        &self.beliefs
    }

    /// The intersection-closed verifiable family.
    pub fn verifiable(&self) -> &EventFamily {
        &self.verifiable
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn utilities(&self, payoff: &[T]) -> Result<Vec<T>> {
        if payoff.len() != self.n() {
            return Err(Error::validation("act", format!("expected {} payoffs", self.n())));
        }
        payoff.iter().map(|x| self.utility.apply(*x)).collect()
    }

    fn verification_of_utils(&self, utils: &[T]) -> T {
        sum_of(self.by_state.iter().zip(&self.beliefs).map(|(members, p)| {
            let best = max_of(
                members
                    .iter()
                    .map(|e| min_of(e.states().map(|t| utils[t])).expect("non-empty")),
            )
            .expect("validated scenarios cover every state");
            *p * best
        }))
    }

    fn obfuscation_of_utils(&self, utils: &[T]) -> T {
        sum_of(self.by_state.iter().zip(&self.beliefs).map(|(members, p)| {
            let worst = min_of(
                members
                    .iter()
                    .map(|e| max_of(e.states().map(|t| utils[t])).expect("non-empty")),
            )
            .expect("validated scenarios cover every state");
            *p * worst
        }))
    }

    /// Value of a utility vector under `model`.
    pub fn value_of_utilities_as(&self, model: ModelKind, utils: &[T]) -> T {
        match model {
            ModelKind::Verification => self.verification_of_utils(utils),
            ModelKind::Obfuscation => self.obfuscation_of_utils(utils),
            ModelKind::ExpectedUtility => expected_value(&self.beliefs, utils),
        }
    }

    pub fn verification_utility(&self, payoff: &[T]) -> Result<T> {
        Ok(self.verification_of_utils(&self.utilities(payoff)?))
    }

    pub fn obfuscation_utility(&self, payoff: &[T]) -> Result<T> {
        Ok(self.obfuscation_of_utils(&self.utilities(payoff)?))
    }

    pub fn expected_utility(&self, payoff: &[T]) -> Result<T> {
        Ok(expected_value(&self.beliefs, &self.utilities(payoff)?))
    }

    /// Expected utility under an alternative belief vector.
    pub fn expected_utility_under(&self, beliefs: &[T], payoff: &[T]) -> Result<T> {
        Ok(expected_value(beliefs, &self.utilities(payoff)?))
    }

    /// Value under the scenario's own model.
    pub fn model_utility(&self, payoff: &[T]) -> Result<T> {
        Ok(self.value_of_utilities_as(self.model, &self.utilities(payoff)?))
    }

    /// Capacity value `ν(F)` of the scenario's model, from its closed form.
    pub fn binary_weight(&self, f: Event) -> T {
        let counted = |s: usize| -> bool {
            let members = &self.by_state[s];
            match self.model {
                ModelKind::Verification => members.iter().any(|e| e.is_subset_of(f)),
                ModelKind::Obfuscation => members.iter().all(|e| e.meets(f)),
                ModelKind::ExpectedUtility => f.contains(s),
            }
        };
        sum_of((0..self.n()).filter(|s| counted(*s)).map(|s| self.beliefs[s]))
    }

    /// `ν(F)·u(γ) + (1−ν(F))·u(β)` for `u(γ) ≥ u(β)`.
    pub fn evaluate_binary(&self, gamma: T, f: Event, beta: T) -> Result<T> {
        self.space.check_event(f)?;
        let (ug, ub) = (self.utility.apply(gamma)?, self.utility.apply(beta)?);
        if ug < ub {
            return Err(Error::BinaryOrder);
        }
        let w = self.binary_weight(f);
        Ok(w * ug + (T::one() - w) * ub)
    }

    /// The consequence `z` with `u(z) = (u(x) + u(y)) / 2`.
    pub fn preference_average(&self, x: T, y: T) -> Result<T> {
        let mid = (self.utility.apply(x)? + self.utility.apply(y)?) * T::half();
        self.utility.inverse(mid).map_err(|_| Error::MidpointNotRepresentable)
    }

    /// Pointwise preference average of two acts.
    pub fn preference_average_act(&self, a: &[T], b: &[T]) -> Result<Vec<T>> {
        a.iter().zip(b).map(|(x, y)| self.preference_average(*x, *y)).collect()
    }

    /// `u⁻¹` of the model value.
    pub fn certainty_equivalent(&self, payoff: &[T]) -> Result<T> {
        self.utility.inverse(self.model_utility(payoff)?)
    }

    /// Acts whose model value is within tolerance of the maximum.
    pub fn best_acts(&self) -> Result<Vec<usize>> {
        let values = self
            .acts
            .iter()
            .map(|a| self.model_utility(&a.payoff))
            .collect::<Result<Vec<T>>>()?;
        let Some(best) = max_of(values.iter().copied()) else {
            return Ok(Vec::new());
        };
        Ok((0..values.len())
            .filter(|i| approx_eq(values[*i], best, self.tolerance))
            .collect())
    }
}

/// Anything that assigns a value to utility vectors over a state space.
///
/// Axiom checkers work against this trait so they can be pointed at a
/// scenario or at a bare set function.
pub trait Preference<T: Scalar> {
    fn space(&self) -> &StateSpace;

    fn utility(&self, x: T) -> Result<T>;

    fn value_of_utilities(&self, utils: &[T]) -> T;

    fn tolerance(&self) -> T {
        T::comparison_tol()
    }

    /// Two consequences `(γ, β)` with `u(γ) > u(β)`.
    fn ranked_pair(&self) -> Result<(T, T)> {
        Ok((T::one(), T::zero()))
    }

    /// Value of the indicator of `e`.
    fn weight(&self, e: Event) -> T {
        let utils = Act::binary(self.space().len(), T::one(), e, T::zero());
        self.value_of_utilities(&utils)
    }

    fn value(&self, payoff: &[T]) -> Result<T> {
        let utils = payoff.iter().map(|x| self.utility(*x)).collect::<Result<Vec<T>>>()?;
        Ok(self.value_of_utilities(&utils))
    }
}

impl<T: Scalar> Preference<T> for Scenario<T> {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn utility(&self, x: T) -> Result<T> {
        self.utility.apply(x)
    }

    fn value_of_utilities(&self, utils: &[T]) -> T {
        self.value_of_utilities_as(self.model, utils)
    }

    fn tolerance(&self) -> T {
        self.tolerance
    }

    fn ranked_pair(&self) -> Result<(T, T)> {
        match &self.utility {
            UtilitySpec::Table(entries) if entries.len() >= 2 => Ok((entries[entries.len() - 1].0, entries[0].0)),
            UtilitySpec::Table(_) => Err(Error::NoRankedPair),
            _ => Ok((T::one(), T::zero())),
        }
    }
}

/// Choquet preference with identity utility over an arbitrary set function.
/// No capacity check: non-monotone inputs are allowed so checkers can be
/// exercised on them.
#[derive(Debug, Clone)]
pub struct ChoquetPreference<T> {
    pub capacity: SetFunction<T>,
}

impl<T: Scalar> Preference<T> for ChoquetPreference<T> {
    fn space(&self) -> &StateSpace {
        self.capacity.space()
    }

    fn utility(&self, x: T) -> Result<T> {
        Ok(x)
    }

    fn value_of_utilities(&self, utils: &[T]) -> T {
        choquet_by_level_sets(&self.capacity, utils)
    }

    fn weight(&self, e: Event) -> T {
        self.capacity.get(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    const S: u32 = 0b001;
    const T_: u32 = 0b010;
    const U: u32 = 0b100;
    const ALL: u32 = 0b111;

    const TREES: [f64; 3] = [70.0, 70.0, 10.0];
    const RECS: [f64; 3] = [60.0, 100.0, 10.0];
    const EFFICIENCY: [f64; 3] = [40.0, 40.0, 40.0];

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
            verifiable.iter().map(|b| Event(*b)).collect(),
            model,
        )
        .unwrap()
    }

    // Literal enumeration of the max-min (resp. min-max) selection per state.
    fn verification_oracle(family: &[u32], mu: &[f64], x: &[f64]) -> f64 {
        (0..mu.len())
            .map(|s| {
                let best = family
                    .iter()
                    .filter(|e| **e != 0 && *e >> s & 1 == 1)
                    .map(|e| {
                        (0..x.len())
                            .filter(|t| e >> t & 1 == 1)
                            .map(|t| x[t])
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                mu[s] * best
            })
            .sum()
    }

    fn obfuscation_oracle(family: &[u32], mu: &[f64], x: &[f64]) -> f64 {
        (0..mu.len())
            .map(|s| {
                let worst = family
                    .iter()
                    .filter(|e| **e != 0 && *e >> s & 1 == 1)
                    .map(|e| {
                        (0..x.len())
                            .filter(|t| e >> t & 1 == 1)
                            .map(|t| x[t])
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .fold(f64::INFINITY, f64::min);
                mu[s] * worst
            })
            .sum()
    }

    #[test]
    fn verification_ccr_values() {
        let fam = [S | T_, ALL];
        let mu = [0.2, 0.6, 0.2];
        let sc = ccr(mu, &fam, ModelKind::Verification);
        for (act, expected) in [(TREES, 58.0), (RECS, 50.0), (EFFICIENCY, 40.0)] {
            assert!((verification_oracle(&fam, &mu, &act) - expected).abs() < 1e-9);
            assert!((sc.verification_utility(&act).unwrap() - expected).abs() < 1e-9);
        }
        assert_eq!(sc.best_acts().unwrap(), vec![0]);
    }

    #[test]
    fn obfuscation_ccr_values() {
        let fam = [S | T_, U, ALL];
        let mu = [0.2, 0.6, 0.2];
        let sc = ccr(mu, &fam, ModelKind::Obfuscation);
        for (act, expected) in [(TREES, 58.0), (RECS, 82.0), (EFFICIENCY, 40.0)] {
            assert!((obfuscation_oracle(&fam, &mu, &act) - expected).abs() < 1e-9);
            assert!((sc.obfuscation_utility(&act).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn obfuscation_without_u_ignores_its_probability() {
        // With only {s,t} provable, RECs scores 100 whatever μ(u) is.
        for pu in [0.05, 0.5, 0.95] {
            let sc = ccr(
                [(1.0 - pu) / 2.0, (1.0 - pu) / 2.0, pu],
                &[S | T_, ALL],
                ModelKind::Obfuscation,
            );
            assert!((sc.obfuscation_utility(&RECS).unwrap() - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_acts_and_full_verifiability() {
        let sc = ccr([0.2, 0.6, 0.2], &[S | T_, ALL], ModelKind::Verification);
        assert!((sc.verification_utility(&[12.5; 3]).unwrap() - 12.5).abs() < 1e-12);
        assert!((sc.obfuscation_utility(&[12.5; 3]).unwrap() - 12.5).abs() < 1e-12);

        let all: Vec<u32> = (1..8).collect();
        let sc = ccr([0.2, 0.6, 0.2], &all, ModelKind::Verification);
        for act in [TREES, RECS, EFFICIENCY] {
            let eu = sc.expected_utility(&act).unwrap();
            assert_eq!(sc.verification_utility(&act).unwrap(), eu);
            assert_eq!(sc.obfuscation_utility(&act).unwrap(), eu);
        }
    }

    #[test]
    fn expected_utility_examples() {
        let sc = ccr([0.2, 0.6, 0.2], &[ALL], ModelKind::ExpectedUtility);
        assert!((sc.expected_utility(&TREES).unwrap() - (0.2 * 70.0 + 0.6 * 70.0 + 0.2 * 10.0)).abs() < 1e-12);
        assert!((sc.expected_utility(&EFFICIENCY).unwrap() - 40.0).abs() < 1e-12);
        let sc = sc.with_beliefs(vec![0.005, 0.99, 0.005]).unwrap();
        let oracle = 0.005 * 60.0 + 0.99 * 100.0 + 0.005 * 10.0;
        assert!((sc.expected_utility(&RECS).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 99.35).abs() < 1e-12);
    }

    #[test]
    fn duality_on_ccr() {
        let fam = EventFamily::new([Event(S | T_), Event(U), Event(ALL)]);
        let mu = [0.2, 0.6, 0.2];
        for act in [TREES, RECS, EFFICIENCY] {
            let neg: Vec<f64> = act.iter().map(|x| -x).collect();
            let obf = obfuscation_value(&fam, &mu, &act).unwrap();
            let ver = verification_value(&fam, &mu, &neg).unwrap();
            assert!((obf + ver).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_evaluation() {
        let sc = ccr([0.2, 0.6, 0.2], &[S | T_, ALL], ModelKind::Verification);
        let st = Event(S | T_);
        assert!((sc.binary_weight(st) - 0.8).abs() < 1e-12);
        assert!((sc.evaluate_binary(100.0, st, 0.0).unwrap() - (0.8 * 100.0 + 0.2 * 0.0)).abs() < 1e-12);
        assert_eq!(sc.evaluate_binary(100.0, Event(ALL), 3.0).unwrap(), 100.0);
        assert_eq!(sc.evaluate_binary(100.0, Event::EMPTY, 3.0).unwrap(), 3.0);
        assert_eq!(sc.evaluate_binary(1.0, st, 2.0), Err(Error::BinaryOrder));

        for model in [
            ModelKind::Verification,
            ModelKind::Obfuscation,
            ModelKind::ExpectedUtility,
        ] {
            let sc = sc.with_model(model);
            for f in sc.space().events() {
                let act = Act::binary(3, 90.0, f, 15.0);
                let direct = sc.model_utility(&act).unwrap();
                assert!((sc.evaluate_binary(90.0, f, 15.0).unwrap() - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn preference_averages() {
        let sc = ccr([0.2, 0.6, 0.2], &[ALL], ModelKind::Verification);
        assert_eq!(sc.preference_average(70.0, 10.0).unwrap(), 40.0);
        assert_eq!(sc.preference_average(33.0, 33.0).unwrap(), 33.0);

        let space = StateSpace::new(["s", "t", "u"]).unwrap();
        let sqrt = Scenario::new(
            space.clone(),
            vec![Act::new("Trees", TREES.to_vec())],
            UtilitySpec::power(0.5).unwrap(),
            vec![0.2, 0.6, 0.2],
            EventFamily::new([Event(ALL)]),
            ModelKind::Verification,
        )
        .unwrap();
        let oracle = ((70f64.sqrt() + 10f64.sqrt()) / 2.0).powi(2);
        let z = sqrt.preference_average(70.0, 10.0).unwrap();
        assert!((z - oracle).abs() < 1e-9);
        assert!((z - 33.2288).abs() < 1e-4);
        assert_eq!(sqrt.preference_average(25.0, 25.0).unwrap(), 25.0);

        let table = UtilitySpec::table(vec![(0.0, 0.0), (10.0, 1.0), (40.0, 2.0), (70.0, 4.0)]).unwrap();
        let tab = Scenario::new(
            space,
            vec![Act::new("a", vec![0.0, 10.0, 70.0])],
            table,
            vec![0.2, 0.6, 0.2],
            EventFamily::new([Event(ALL)]),
            ModelKind::Verification,
        )
        .unwrap();
        assert_eq!(tab.preference_average(70.0, 0.0).unwrap(), 40.0);
        assert_eq!(tab.preference_average(70.0, 10.0), Err(Error::MidpointNotRepresentable));
        assert_eq!(
            tab.preference_average_act(&[70.0, 10.0, 0.0], &[0.0, 10.0, 0.0])
                .unwrap(),
            vec![40.0, 10.0, 0.0]
        );
    }

    #[test]
    fn certainty_equivalents() {
        let sc = ccr([0.2, 0.6, 0.2], &[S | T_, ALL], ModelKind::Verification);
        assert_eq!(sc.certainty_equivalent(&[17.0; 3]).unwrap(), 17.0);
        assert!((sc.certainty_equivalent(&TREES).unwrap() - 58.0).abs() < 1e-9);
        let pessimist = ccr([0.2, 0.6, 0.2], &[ALL], ModelKind::Verification);
        for act in [TREES, RECS, EFFICIENCY] {
            let min = act.iter().copied().fold(f64::INFINITY, f64::min);
            assert_eq!(pessimist.certainty_equivalent(&act).unwrap(), min);
        }
    }

    #[test]
    fn validation_errors() {
        let space = StateSpace::new(["s", "t", "u"]).unwrap();
        let acts = vec![Act::new("a", vec![1.0, 2.0, 3.0])];
        let mk = |beliefs: Vec<f64>, fam: Vec<u32>| {
            Scenario::new(
                space.clone(),
                acts.clone(),
                UtilitySpec::Identity,
                beliefs,
                fam.into_iter().map(Event).collect(),
                ModelKind::Verification,
            )
        };
        assert!(mk(vec![0.5, 0.5, 0.5], vec![ALL]).is_err());
        assert!(mk(vec![1.2, -0.2, 0.0], vec![ALL]).is_err());
        assert!(mk(vec![0.2, 0.6, 0.2], vec![S | T_, T_ | U]).is_err());
        let ok = mk(vec![0.2, 0.6, 0.2], vec![S | T_, T_ | U, ALL]).unwrap();
        assert!(ok.verifiable().contains(Event(T_)));
        assert!(Scenario::new(
            space.clone(),
            vec![Act::new("a", vec![-1.0, 2.0, 3.0])],
            UtilitySpec::power(0.5).unwrap(),
            vec![0.2, 0.6, 0.2],
            EventFamily::new([Event(ALL)]),
            ModelKind::Verification
        )
        .is_err());
    }

    #[test]
    fn exact_rational_scenario() {
        let r = |a: i64, b: i64| Rational64::new(a, b);
        let sc = Scenario::new(
            StateSpace::new(["s", "t", "u"]).unwrap(),
            vec![Act::new("Trees", vec![r(70, 1), r(70, 1), r(10, 1)])],
            UtilitySpec::Identity,
            vec![r(1, 5), r(3, 5), r(1, 5)],
            EventFamily::new([Event(S | T_), Event(ALL)]),
            ModelKind::Verification,
        )
        .unwrap();
        assert_eq!(sc.model_utility(&sc.acts()[0].payoff).unwrap(), r(58, 1));
    }

    // Every intersection-closed family on three states that contains the full set.
    fn all_families_on_three() -> Vec<EventFamily> {
        let mut out: Vec<EventFamily> = (0u32..64)
            .map(|mask| {
                let members = (1..7u32).filter(|e| mask >> (e - 1) & 1 == 1).map(Event);
                EventFamily::new(members.chain([Event(ALL)])).close_under_intersection()
            })
            .collect();
        out.sort_by(|a, b| a.members().cmp(b.members()));
        out.dedup();
        out
    }

    #[test]
    fn sandwich_exhaustive_on_three_states() {
        let grid = [0.0, 5.0, 10.0];
        let mu = [0.25, 0.5, 0.25];
        for family in all_families_on_three() {
            for i in 0..27 {
                let act = [grid[i % 3], grid[i / 3 % 3], grid[i / 9]];
                let v = verification_value(&family, &mu, &act).unwrap();
                let o = obfuscation_value(&family, &mu, &act).unwrap();
                let e = expected_value(&mu, &act);
                let lo = act.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = act.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                assert!(lo <= v + 1e-12 && v <= e + 1e-12 && e <= o + 1e-12 && o <= hi + 1e-12);
                assert!(
                    (v - verification_oracle(
                        family.members().iter().map(|e| e.bits()).collect::<Vec<_>>().as_slice(),
                        &mu,
                        &act
                    ))
                    .abs()
                        < 1e-12
                );
            }
        }
    }

    mod properties {
        use super::*;
        use crate::corpus;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(400))]

            #[test]
            fn monotone_in_each_state(seed in any::<u64>(), n in 1usize..=4) {
                let mut rng = corpus::rng(seed);
                let sc = corpus::random_scenario(&mut rng, n, ModelKind::Verification);
                for act in sc.acts() {
                    let s = rng.gen_range(0..n);
                    let mut raised = act.payoff.clone();
                    raised[s] += rng.gen_range(0.0..50.0);
                    prop_assert!(sc.verification_utility(&raised).unwrap() >= sc.verification_utility(&act.payoff).unwrap() - 1e-12);
                    prop_assert!(sc.obfuscation_utility(&raised).unwrap() >= sc.obfuscation_utility(&act.payoff).unwrap() - 1e-12);
                }
            }

            #[test]
            fn sandwich(seed in any::<u64>(), n in 1usize..=4) {
                let sc = corpus::random_scenario(&mut corpus::rng(seed), n, ModelKind::Verification);
                for act in sc.acts() {
                    let v = sc.verification_utility(&act.payoff).unwrap();
                    let e = sc.expected_utility(&act.payoff).unwrap();
                    let o = sc.obfuscation_utility(&act.payoff).unwrap();
                    let lo = act.payoff.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = act.payoff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!(lo <= v + 1e-9 && v <= e + 1e-9 && e <= o + 1e-9 && o <= hi + 1e-9);
                }
            }

            #[test]
            fn obfuscation_is_dual_to_verification(seed in any::<u64>(), n in 1usize..=6) {
                let sc = corpus::random_scenario(&mut corpus::rng(seed), n, ModelKind::Obfuscation);
                for act in sc.acts() {
                    let neg: Vec<f64> = act.payoff.iter().map(|x| -x).collect();
                    let o = sc.obfuscation_utility(&act.payoff).unwrap();
                    let v = verification_value(sc.verifiable(), sc.beliefs(), &neg).unwrap();
                    prop_assert!((o + v).abs() <= 1e-12);
                }
            }

            #[test]
            fn coarsening_moves_values_toward_the_extremes(seed in any::<u64>(), n in 1usize..=5, keep in any::<u32>()) {
                let sc = corpus::random_scenario(&mut corpus::rng(seed), n, ModelKind::Verification);
                let members = sc.verifiable().members();
                let coarse: EventFamily = members
                    .iter()
                    .enumerate()
                    .filter(|(i, e)| keep >> (i % 32) & 1 == 1 || **e == sc.space().full())
                    .map(|(_, e)| *e)
                    .collect();
                let coarse = sc.with_verifiable(&coarse).unwrap();
                prop_assert!(coarse.verifiable().is_subfamily_of(sc.verifiable()));
                for act in sc.acts() {
                    prop_assert!(coarse.verification_utility(&act.payoff).unwrap() <= sc.verification_utility(&act.payoff).unwrap() + 1e-12);
                    prop_assert!(coarse.obfuscation_utility(&act.payoff).unwrap() >= sc.obfuscation_utility(&act.payoff).unwrap() - 1e-12);
                }
            }

            #[test]
            fn full_verifiability_collapses_to_expected_utility(seed in any::<u64>(), n in 1usize..=5) {
                let sc = corpus::random_scenario(&mut corpus::rng(seed), n, ModelKind::Verification);
                let sc = sc.with_verifiable(&EventFamily::all_nonempty(n)).unwrap();
                for act in sc.acts() {
                    let e = sc.expected_utility(&act.payoff).unwrap();
                    prop_assert_eq!(sc.verification_utility(&act.payoff).unwrap(), e);
                    prop_assert_eq!(sc.obfuscation_utility(&act.payoff).unwrap(), e);
                }
            }
        }
    }
}
