//! Set functions over the subset lattice: capacities, zeta/Möbius
//! transforms, modularity classification and Choquet integration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Event, EventFamily, StateSpace};
use crate::scalar::{min_of, Scalar};

/// A total map from events to scalars, stored densely by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction<T> {
    space: StateSpace,
    values: Vec<T>,
}

/// Möbius masses, stored densely by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusVector<T> {
    space: StateSpace,
    mass: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modularity {
    Modular,
    Supermodular,
    Submodular,
    Neither,
}

fn check_len(space: &StateSpace, len: usize) -> Result<()> {
    if len != space.event_count() {
        return Err(Error::validation(
            "values",
            format!("expected {} entries, got {len}", space.event_count()),
        ));
    }
    Ok(())
}

impl<T: Scalar> SetFunction<T> {
    pub fn new(space: StateSpace, values: Vec<T>) -> Result<Self> {
        check_len(&space, values.len())?;
        Ok(Self { space, values })
    }

    pub fn from_fn(space: StateSpace, f: impl FnMut(Event) -> T) -> Self {
        let values = space.events().map(f).collect();
        Self { space, values }
    }

    /// Additive set function generated by per-state weights.
    pub fn additive(space: StateSpace, atoms: &[T]) -> Self {
        assert_eq!(atoms.len(), space.len());
        Self::from_fn(space, |e| e.states().fold(T::zero(), |acc, s| acc + atoms[s]))
    }

    /// 1 on the full event, 0 elsewhere.
    pub fn min_capacity(space: StateSpace) -> Self {
        let full = space.full();
        Self::from_fn(space, |e| if e == full { T::one() } else { T::zero() })
    }

    /// 1 on every non-empty event.
    pub fn max_capacity(space: StateSpace) -> Self {
        Self::from_fn(space, |e| if e.is_empty() { T::zero() } else { T::one() })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, e: Event) -> T {
        self.values[e.index()]
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn is_grounded(&self) -> bool {
        self.values[0].abs() <= T::validity_tol()
    }

    pub fn is_normalized(&self) -> bool {
        (self.get(self.space.full()) - T::one()).abs() <= T::validity_tol()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    /// Some `(A, A ∪ {s})` with `f(A) > f(A ∪ {s})`; single-state steps suffice.
    pub fn monotonicity_violation(&self) -> Option<(Event, Event)> {
        let tol = T::validity_tol();
        for a in self.space.events() {
            for s in 0..self.n() {
                if !a.contains(s) {
                    let b = a.with(s);
                    if self.get(a) > self.get(b) + tol {
                        return Some((a, b));
                    }
                }
            }
        }
        None
    }

    /// Grounded, normalized and monotone.
    pub fn is_capacity(&self) -> bool {
        self.validate_capacity().is_ok()
    }

    pub fn validate_capacity(&self) -> Result<()> {
        if !self.is_grounded() {
            return Err(Error::NotACapacity("value on the empty event is not 0".into()));
        }
        if !self.is_normalized() {
            return Err(Error::NotACapacity("value on the full event is not 1".into()));
        }
        if let Some((a, b)) = self.monotonicity_violation() {
            return Err(Error::NotACapacity(format!(
                "f({}) > f({})",
                self.space.show(a),
                self.space.show(b)
            )));
        }
        Ok(())
    }

    /// Conjugate `A ↦ 1 - f(Ā)`.
    pub fn conjugate(&self) -> Self {
        let n = self.n();
        Self::from_fn(self.space.clone(), |e| T::one() - self.get(e.complement(n)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), |m, d| if d > m { d } else { m })
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.space == other.space && self.max_abs_diff(other) <= tol
    }
}

impl<T: Scalar> MobiusVector<T> {
    pub fn new(space: StateSpace, mass: Vec<T>) -> Result<Self> {
        check_len(&space, mass.len())?;
        Ok(Self { space, mass })
    }

    /// Masses given on a few events, zero elsewhere.
    pub fn from_masses(space: StateSpace, masses: &[(Event, T)]) -> Result<Self> {
        let mut mass = vec![T::zero(); space.event_count()];
        for &(e, m) in masses {
            space.check_event(e)?;
            mass[e.index()] = mass[e.index()] + m;
        }
        Ok(Self { space, mass })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn masses(&self) -> &[T] {
        &self.mass
    }

    pub fn get(&self, e: Event) -> T {
        self.mass[e.index()]
    }

    pub fn total(&self) -> T {
        self.mass.iter().fold(T::zero(), |a, b| a + *b)
    }

    /// Events carrying mass above `tol`.
    pub fn positive_events(&self, tol: T) -> EventFamily {
        self.space.events().filter(|e| self.get(*e) > tol).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), |m, d| if d > m { d } else { m })
    }
}

// In-place sum over subsets, one bit dimension at a time.
fn subset_sums<T: Scalar>(xs: &mut [T], n: usize) {
    for bit in 0..n {
        let step = 1usize << bit;
        for idx in 0..xs.len() {
            if idx & step != 0 {
                xs[idx] = xs[idx] + xs[idx ^ step];
            }
        }
    }
}

fn inverse_subset_sums<T: Scalar>(xs: &mut [T], n: usize) {
    for bit in 0..n {
        let step = 1usize << bit;
        for idx in 0..xs.len() {
            if idx & step != 0 {
                xs[idx] = xs[idx] - xs[idx ^ step];
            }
        }
    }
}

/// `f(E) = Σ_{A⊆E} m(A)`, in `O(n·2^n)`.
pub fn zeta_transform<T: Scalar>(m: &MobiusVector<T>) -> SetFunction<T> {
    let mut values = m.mass.clone();
    subset_sums(&mut values, m.space.len());
    SetFunction {
        space: m.space.clone(),
        values,
    }
}

/// The unique `m` with `zeta_transform(m) = f`, i.e.
/// `m(E) = Σ_{A⊆E} (-1)^{|E|-|A|} f(A)`.
pub fn mobius_transform<T: Scalar>(f: &SetFunction<T>) -> MobiusVector<T> {
    let mut mass = f.values.clone();
    inverse_subset_sums(&mut mass, f.space.len());
    MobiusVector {
        space: f.space.clone(),
        mass,
    }
}

/// Exhaustive pairwise comparison of `f(E∪F) + f(E∩F)` against `f(E) + f(F)`.
pub fn classify_modularity<T: Scalar>(f: &SetFunction<T>, domain: &EventFamily, tol: T) -> Modularity {
    let (mut sup, mut sub) = (true, true);
    let members = domain.members();
    for (i, &e) in members.iter().enumerate() {
        for &g in &members[i + 1..] {
            let lhs = f.get(e.union(g)) + f.get(e.intersection(g));
            let rhs = f.get(e) + f.get(g);
            if lhs < rhs - tol {
                sup = false;
            }
            if lhs > rhs + tol {
                sub = false;
            }
            if !sup && !sub {
                return Modularity::Neither;
            }
        }
    }
    match (sup, sub) {
        (true, true) => Modularity::Modular,
        (true, false) => Modularity::Supermodular,
        (false, true) => Modularity::Submodular,
        (false, false) => Modularity::Neither,
    }
}

/// Choquet integral by decreasing level sets:
/// `Σ_i x_(i) · (f(A_i) − f(A_{i−1}))` where `A_i` holds the `i` best states.
/// No capacity check; callers that need one use [`choquet_integral`].
pub fn choquet_by_level_sets<T: Scalar>(f: &SetFunction<T>, payoff: &[T]) -> T {
    assert_eq!(payoff.len(), f.n(), "payoff length must equal the number of states");
    let mut order: Vec<usize> = (0..payoff.len()).collect();
    order.sort_by(|&a, &b| payoff[b].partial_cmp(&payoff[a]).expect("payoffs are comparable"));
    let mut level = Event::EMPTY;
    let mut total = T::zero();
    for s in order {
        let next = level.with(s);
        total = total + payoff[s] * (f.get(next) - f.get(level));
        level = next;
    }
    total
}

/// Choquet integral through the Möbius representation `Σ_E m(E) · min_{s∈E} x(s)`.
pub fn choquet_by_mobius<T: Scalar>(m: &MobiusVector<T>, payoff: &[T]) -> T {
    assert_eq!(
        payoff.len(),
        m.space.len(),
        "payoff length must equal the number of states"
    );
    m.space
        .events()
        .filter(|e| !e.is_empty())
        .map(|e| m.get(e) * min_of(e.states().map(|s| payoff[s])).expect("non-empty event"))
        .fold(T::zero(), |a, b| a + b)
}

/// Choquet integral of `payoff` against the capacity `f`.
///
/// Both the level-set and the Möbius routes are evaluated; a disagreement
/// beyond `tol` is reported as an internal inconsistency. The level-set value
/// is returned.
pub fn choquet_integral<T: Scalar>(f: &SetFunction<T>, payoff: &[T], tol: T) -> Result<T> {
    f.validate_capacity()?;
    if payoff.len() != f.n() {
        return Err(Error::validation("payoff", "length differs from the number of states"));
    }
    let by_levels = choquet_by_level_sets(f, payoff);
    let by_mobius = choquet_by_mobius(&mobius_transform(f), payoff);
    if (by_levels - by_mobius).abs() > tol {
        return Err(Error::Inconsistent(format!(
            "Choquet routes disagree: {by_levels} vs {by_mobius}"
        )));
    }
    Ok(by_levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    const S: u32 = 0b001;
    const T_: u32 = 0b010;
    const U: u32 = 0b100;

    fn sp(n: usize) -> StateSpace {
        StateSpace::anonymous(n).unwrap()
    }

    // Direct summation over subsets, independent of the in-place transform.
    fn zeta_oracle<T: Scalar>(m: &MobiusVector<T>) -> Vec<T> {
        m.space()
            .events()
            .map(|e| e.subsets().fold(T::zero(), |acc, a| acc + m.get(a)))
            .collect()
    }

    #[test]
    fn zeta_examples() {
        let space = StateSpace::new(["s", "t"]).unwrap();
        let m =
            MobiusVector::from_masses(space, &[(Event(S), 0.3f64), (Event(T_), 0.2), (Event(S | T_), 0.5)]).unwrap();
        let f = zeta_transform(&m);
        assert_eq!(f.values(), zeta_oracle(&m).as_slice());
        assert!((f.get(Event(S)) - 0.3).abs() < 1e-12);
        assert!((f.get(Event(T_)) - 0.2).abs() < 1e-12);
        assert!((f.get(Event(S | T_)) - 1.0).abs() < 1e-12);

        let m = MobiusVector::from_masses(sp(3), &[(Event(S | T_), 0.8f64), (Event(S | T_ | U), 0.2)]).unwrap();
        let f = zeta_transform(&m);
        let oracle = zeta_oracle(&m);
        for e in f.space().events() {
            assert!((f.get(e) - oracle[e.index()]).abs() < 1e-12);
            if !Event(S | T_).is_subset_of(e) {
                assert_eq!(f.get(e), 0.0);
            }
        }
        assert!((f.get(Event(S | T_)) - 0.8).abs() < 1e-12);
        assert!((f.get(Event(S | T_ | U)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_singletons_are_additive() {
        let n = 4;
        let masses: Vec<_> = (0..n).map(|s| (Event::singleton(s), 0.25f64)).collect();
        let f = zeta_transform(&MobiusVector::from_masses(sp(n), &masses).unwrap());
        for e in f.space().events() {
            assert!((f.get(e) - 0.25 * e.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn mobius_examples() {
        let f = SetFunction::additive(sp(3), &[0.2f64, 0.6, 0.2]);
        let m = mobius_transform(&f);
        for e in f.space().events() {
            let expected = if e.len() == 1 {
                [0.2, 0.6, 0.2][e.states().next().unwrap()]
            } else {
                0.0
            };
            assert!((m.get(e) - expected).abs() < 1e-12);
        }

        let m0 = MobiusVector::from_masses(sp(3), &[(Event(S | T_), 0.8f64), (Event(S | T_ | U), 0.2)]).unwrap();
        let back = mobius_transform(&zeta_transform(&m0));
        assert!(back.max_abs_diff(&m0) < 1e-12);

        let f = SetFunction::<f64>::min_capacity(sp(2));
        let m = mobius_transform(&f);
        assert_eq!(m.masses(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn displayed_sign_convention_does_not_invert() {
        // m(E) = Σ_{A⊆E} (-1)^{|A|-1} f(A) fails to reproduce f under zeta.
        let f = SetFunction::<f64>::min_capacity(sp(2));
        let alt: Vec<f64> = f
            .space()
            .events()
            .map(|e| {
                e.subsets()
                    .map(|a| if a.len() % 2 == 1 { f.get(a) } else { -f.get(a) })
                    .sum()
            })
            .collect();
        let alt = MobiusVector::new(sp(2), alt).unwrap();
        assert!(zeta_transform(&alt).max_abs_diff(&f) > 0.1);
        assert!(zeta_transform(&mobius_transform(&f)).max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn modularity_examples() {
        let full = EventFamily::new(sp(3).events());
        assert_eq!(
            classify_modularity(&SetFunction::<f64>::min_capacity(sp(3)), &full, 1e-9),
            Modularity::Supermodular
        );
        assert_eq!(
            classify_modularity(&SetFunction::<f64>::max_capacity(sp(3)), &full, 1e-9),
            Modularity::Submodular
        );
        let add = SetFunction::additive(sp(3), &[0.1, 0.5, 0.4]);
        assert_eq!(classify_modularity(&add, &full, 1e-9), Modularity::Modular);
    }

    #[test]
    fn choquet_examples() {
        let space = StateSpace::new(["s", "t", "u"]).unwrap();
        let m = MobiusVector::from_masses(space.clone(), &[(Event(S | T_), 0.8f64), (Event(S | T_ | U), 0.2)]).unwrap();
        let mu = zeta_transform(&m);
        let trees = [70.0f64, 70.0, 10.0];
        let oracle = 0.8 * 70.0 + 0.2 * 10.0;
        assert!((choquet_integral(&mu, &trees, 1e-9).unwrap() - oracle).abs() < 1e-9);
        assert!((choquet_integral(&mu, &trees, 1e-9).unwrap() - 58.0).abs() < 1e-9);

        assert!((choquet_integral(&mu, &[7.5, 7.5, 7.5], 1e-9).unwrap() - 7.5).abs() < 1e-12);

        // Binary act: γ on F, β elsewhere.
        let f_ev = Event(S | T_);
        let (gamma, beta) = (100.0, 20.0);
        let payoff: Vec<f64> = (0..3).map(|s| if f_ev.contains(s) { gamma } else { beta }).collect();
        let expected = mu.get(f_ev) * gamma + (1.0 - mu.get(f_ev)) * beta;
        assert!((choquet_integral(&mu, &payoff, 1e-9).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn choquet_rejects_non_capacity() {
        let f = SetFunction::from_fn(sp(2), |e| {
            if e.len() == 1 {
                0.9
            } else if e.is_empty() {
                0.0
            } else {
                0.5
            }
        });
        assert!(matches!(
            choquet_integral(&f, &[1.0, 2.0], 1e-9),
            Err(Error::NotACapacity(_))
        ));
        let g = SetFunction::from_fn(sp(2), |e| e.len() as f64);
        assert!(choquet_integral(&g, &[1.0, 2.0], 1e-9).is_err());
    }

    #[test]
    fn exact_rational_round_trip() {
        let space = sp(4);
        let mut state = 7i64;
        let mass: Vec<Rational64> = space
            .events()
            .map(|_| {
                state = (state * 1103 + 12345) % 997;
                Rational64::new(state - 498, 97)
            })
            .collect();
        let m = MobiusVector::new(space, mass).unwrap();
        assert_eq!(mobius_transform(&zeta_transform(&m)), m);
    }

    #[test]
    fn f32_round_trip() {
        let m = MobiusVector::from_masses(sp(3), &[(Event(S), 0.25f32), (Event(S | U), 0.75)]).unwrap();
        assert!(mobius_transform(&zeta_transform(&m)).max_abs_diff(&m) < 1e-6);
    }

    fn random_capacity(n: usize, raw: &[f64]) -> SetFunction<f64> {
        // Non-negative Möbius masses normalised to one give a capacity.
        let total: f64 = raw[1..1 << n].iter().sum::<f64>().max(1e-9);
        let mut mass: Vec<f64> = raw[..1 << n].iter().map(|x| x / total).collect();
        mass[0] = 0.0;
        if total <= 1e-9 {
            mass[(1 << n) - 1] = 1.0;
        }
        zeta_transform(&MobiusVector::new(sp(n), mass).unwrap())
    }

    proptest! {
        #[test]
        fn round_trip_random(n in 1usize..=8, seed in prop::collection::vec(-1.0f64..1.0, 256)) {
            let m = MobiusVector::new(sp(n), seed[..1 << n].to_vec()).unwrap();
            prop_assert!(mobius_transform(&zeta_transform(&m)).max_abs_diff(&m) < 1e-9);
            prop_assert!(zeta_transform(&m).values().iter().zip(zeta_oracle(&m)).all(|(a, b)| (a - b).abs() < 1e-9));
        }

        #[test]
        fn choquet_routes_agree(n in 1usize..=6, raw in prop::collection::vec(0.0f64..1.0, 64), payoff in prop::collection::vec(-50.0f64..50.0, 6)) {
            let f = random_capacity(n, &raw);
            let x = &payoff[..n];
            let a = choquet_by_level_sets(&f, x);
            let b = choquet_by_mobius(&mobius_transform(&f), x);
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn comonotonic_additivity(n in 1usize..=6, raw in prop::collection::vec(0.0f64..1.0, 64),
                                  base in prop::collection::vec(0.0f64..10.0, 6), g1 in 0.0f64..3.0, g2 in -2.0f64..3.0) {
            let f = random_capacity(n, &raw);
            // Two nondecreasing transforms of one base vector are comonotonic.
            let a: Vec<f64> = base[..n].iter().map(|x| g1 * x).collect();
            let b: Vec<f64> = base[..n].iter().map(|x| x * x + g2).collect();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lhs = choquet_by_level_sets(&f, &sum);
            let rhs = choquet_by_level_sets(&f, &a) + choquet_by_level_sets(&f, &b);
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn additive_is_modular(atoms in prop::collection::vec(0.0f64..1.0, 4)) {
            let f = SetFunction::additive(sp(4), &atoms);
            let full = EventFamily::new(sp(4).events());
            prop_assert_eq!(classify_modularity(&f, &full, 1e-9), Modularity::Modular);
        }
    }
}
