//! Recovering the verifiable structure and beliefs from a capacity.

use serde::{Deserialize, Serialize};

use crate::decision::{Act, ModelKind, Scenario, UtilitySpec};
use crate::error::{Error, Result};
use crate::lattice::{Event, EventFamily};
use crate::scalar::{approx_eq, sum_of, Scalar};
use crate::set_function::{mobius_transform, MobiusVector, SetFunction};

/// Which kind of critical event is scanned for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Min,
    Max,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Mode::Min),
            "max" => Ok(Mode::Max),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

/// The capacity of a scenario's model: `ν(F)` is the value of the indicator of `F`.
pub fn induced_capacity<T: Scalar>(sc: &Scenario<T>) -> SetFunction<T> {
    let n = sc.n();
    SetFunction::from_fn(sc.space().clone(), |f| {
        sc.value_of_utilities_as(sc.model(), &Act::binary(n, T::one(), f, T::zero()))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult<T> {
    /// Events with positive Möbius mass.
    pub verifiable_core: EventFamily,
    pub union_closure: EventFamily,
    /// Smallest core member containing each state; `None` for irrelevant states.
    pub phi: Vec<Option<Event>>,
    pub eta: Vec<T>,
    pub irrelevant_states: Event,
    pub mobius: MobiusVector<T>,
}

impl<T: Scalar> IdentificationResult<T> {
    /// The verification family rebuilt from the core.
    pub fn rebuilt_family(&self) -> EventFamily {
        self.verifiable_core
            .with(self.mobius.space().full())
            .close_under_intersection()
    }

    /// Verification capacity generated by `(core, η)`.
    pub fn rebuilt_capacity(&self) -> SetFunction<T> {
        let space = self.mobius.space().clone();
        SetFunction::from_fn(space, |f| {
            sum_of(
                self.phi
                    .iter()
                    .zip(&self.eta)
                    .filter(|(phi, _)| phi.is_some_and(|p| p.is_subset_of(f)))
                    .map(|(_, w)| *w),
            )
        })
    }

    /// Scenario with the same acts and utility as `sc` but beliefs `η` and the
    /// rebuilt family.
    pub fn rebuild_scenario(&self, sc: &Scenario<T>) -> Result<Scenario<T>> {
        Scenario::new(
            sc.space().clone(),
            sc.acts().to_vec(),
            sc.utility().clone(),
            self.eta.clone(),
            self.rebuilt_family(),
            ModelKind::Verification,
        )
    }
}

/// Reads off core, φ and η from a verification capacity.
pub fn recover_structure<T: Scalar>(nu: &SetFunction<T>) -> Result<IdentificationResult<T>> {
    nu.validate_capacity()?;
    let tol = T::comparison_tol();
    let space = nu.space();
    let n = space.len();
    let m = mobius_transform(nu);
    let core = m.positive_events(tol);
    let support = core.support();
    for e in support.nonempty_subsets() {
        if m.get(e) < -tol {
            return Err(Error::NotAVerificationCapacity(format!(
                "negative mass {} on {}",
                m.get(e),
                space.show(e)
            )));
        }
    }

    let mut phi = vec![None; n];
    for (s, slot) in phi.iter_mut().enumerate() {
        let minimal = core.minimal_members_containing(s);
        match minimal.as_slice() {
            [] => {}
            [e] => *slot = Some(*e),
            _ => {
                let shown: Vec<String> = minimal.iter().map(|e| space.show(*e)).collect();
                return Err(Error::NotAVerificationCapacity(format!(
                    "state {} has several minimal core events: {}",
                    space.name(s),
                    shown.join(", ")
                )));
            }
        }
    }

    let eta: Vec<T> = phi
        .iter()
        .map(|p| match p {
            None => T::zero(),
            Some(e) => {
                let share = phi.iter().filter(|q| **q == Some(*e)).count();
                m.get(*e) / T::from_usize_lossy(share)
            }
        })
        .collect();
    let total = sum_of(eta.iter().copied());
    if !approx_eq(total, T::one(), tol) {
        return Err(Error::NotAVerificationCapacity(format!(
            "recovered beliefs sum to {total}"
        )));
    }

    Ok(IdentificationResult {
        union_closure: core.close_under_union(),
        verifiable_core: core,
        phi,
        eta,
        irrelevant_states: support.complement(n),
        mobius: m,
    })
}

/// Shared state for scanning critical events of a single capacity.
struct CriticalScan<'a, T> {
    nu: &'a SetFunction<T>,
    relevant: Event,
    tol: T,
}

impl<'a, T: Scalar> CriticalScan<'a, T> {
    fn new(nu: &'a SetFunction<T>) -> Self {
        let tol = T::comparison_tol();
        let relevant = mobius_transform(nu).positive_events(tol).support();
        Self { nu, relevant, tol }
    }

    fn nonnull(&self, f: Event) -> bool {
        self.nu.get(f) > self.tol || f.meets(self.relevant)
    }

    fn min_increasing(&self, e: Event) -> bool {
        if e.is_empty() || !e.is_subset_of(self.relevant) {
            return false;
        }
        let top = self.nu.get(e);
        e.nonempty_subsets()
            .filter(|f| self.nonnull(*f))
            .all(|f| top > self.nu.get(e.difference(f)) + self.tol)
    }
}

/// Shrinking `e` by any nonnull part strictly lowers `ν`.
pub fn is_min_increasing<T: Scalar>(nu: &SetFunction<T>, e: Event) -> bool {
    CriticalScan::new(nu).min_increasing(e)
}

/// Enlarging `e` by any nonnull part of its complement strictly raises `ν`.
/// Same as the complement being min-increasing for the conjugate capacity.
pub fn is_max_increasing<T: Scalar>(nu: &SetFunction<T>, e: Event) -> bool {
    CriticalScan::new(&nu.conjugate()).min_increasing(e.complement(nu.n()))
}

pub fn critical_family<T: Scalar>(nu: &SetFunction<T>, mode: Mode) -> EventFamily {
    match mode {
        Mode::Min => {
            let scan = CriticalScan::new(nu);
            nu.space().events().filter(|e| scan.min_increasing(*e)).collect()
        }
        Mode::Max => {
            let conj = nu.conjugate();
            let scan = CriticalScan::new(&conj);
            let n = nu.n();
            nu.space()
                .events()
                .filter(|e| scan.min_increasing(e.complement(n)))
                .collect()
        }
    }
}

fn probability<T: Scalar>(beliefs: &[T], e: Event) -> T {
    sum_of(e.states().map(|s| beliefs[s]))
}

/// Whether two (structure, beliefs) pairs describe the same verification
/// preference: equal union closures, and beliefs agreeing on every closure
/// member and its complement.
pub fn same_preferences<T: Scalar>(
    first: (&IdentificationResult<T>, &[T]),
    second: (&IdentificationResult<T>, &[T]),
    tol: T,
) -> bool {
    let (r1, mu1) = first;
    let (r2, mu2) = second;
    if r1.mobius.space().len() != r2.mobius.space().len() || r1.union_closure != r2.union_closure {
        return false;
    }
    let n = r1.mobius.space().len();
    r1.union_closure.iter().all(|e| {
        approx_eq(probability(mu1, e), probability(mu2, e), tol)
            && approx_eq(
                probability(mu1, e.complement(n)),
                probability(mu2, e.complement(n)),
                tol,
            )
    })
}

/// Whether `u2 = θ·u1 + φ` with `θ > 0` on the given consequences.
pub fn affinely_equivalent<T: Scalar>(u1: &UtilitySpec<T>, u2: &UtilitySpec<T>, points: &[T], tol: T) -> Result<bool> {
    let a = points.iter().map(|x| u1.apply(*x)).collect::<Result<Vec<T>>>()?;
    let b = points.iter().map(|x| u2.apply(*x)).collect::<Result<Vec<T>>>()?;
    let Some(j) = (1..a.len()).find(|j| !approx_eq(a[*j], a[0], tol)) else {
        return Ok(b.iter().all(|y| approx_eq(*y, b[0], tol)));
    };
    let theta = (b[j] - b[0]) / (a[j] - a[0]);
    if theta <= T::zero() {
        return Ok(false);
    }
    let shift = b[0] - theta * a[0];
    Ok(a.iter().zip(&b).all(|(x, y)| approx_eq(theta * *x + shift, *y, tol)))
}
