//! Seeded generators for random verifiable families, beliefs and scenarios.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::{Act, ModelKind, Scenario, UtilitySpec};
use crate::lattice::{Event, EventFamily, StateSpace};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random intersection-closed family on `n` states that contains the full set.
pub fn random_pi_system(rng: &mut impl Rng, n: usize) -> EventFamily {
    let full = Event::full(n);
    let extra = rng.gen_range(0..=n + 1);
    let mut members = vec![full];
    for _ in 0..extra {
        let bits = rng.gen_range(1..=full.bits());
        members.push(Event(bits));
    }
    EventFamily::new(members).close_under_intersection()
}

/// Strictly positive beliefs summing to one.
pub fn random_beliefs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut mu: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // Push the rounding residue onto the largest entry so the sum is 1 to the last bit
    // as far as possible.
    let residue = 1.0 - mu.iter().sum::<f64>();
    let (imax, _) = mu
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, x)| if *x > acc.1 { (i, *x) } else { acc });
    mu[imax] += residue;
    mu
}

/// Acts drawn from `grid`.
pub fn random_acts(rng: &mut impl Rng, n: usize, count: usize, grid: &[f64]) -> Vec<Act<f64>> {
    (0..count)
        .map(|i| {
            Act::new(
                format!("a{i}"),
                (0..n).map(|_| *grid.choose(rng).expect("non-empty grid")).collect(),
            )
        })
        .collect()
}

/// A random scenario with identity utility and integer payoffs in `0..=100`.
pub fn random_scenario(rng: &mut impl Rng, n: usize, model: ModelKind) -> Scenario<f64> {
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 10.0).collect();
    let acts = random_acts(rng, n, 3, &grid);
    Scenario::new(
        StateSpace::anonymous(n).expect("small n"),
        acts,
        UtilitySpec::Identity,
        random_beliefs(rng, n),
        random_pi_system(rng, n),
        model,
    )
    .expect("generated scenarios are valid")
}
