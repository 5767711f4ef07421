//! Decision making under partial verifiability: event lattices, capacities,
//! verification and obfuscation functionals, identification of the
//! verifiable structure, axiom checkers and welfare analytics.

pub mod axioms;
pub mod corpus;
pub mod decision;
pub mod error;
pub mod identification;
pub mod io;
pub mod lattice;
pub mod scalar;
pub mod set_function;
pub mod welfare;

pub use axioms::{
    are_comonotonic, check_biseparable_grid, check_comonotonic_independence, check_critical_event_modularity,
    check_submodularity, check_supermodularity, classify_event, Axiom, AxiomReport, EventClass, EventKind,
    SamplingPlan, Witness,
};
pub use decision::{
    expected_value, obfuscation_value, verification_value, Act, ChoquetPreference, ModelKind, Preference, Scenario,
    UtilitySpec,
};
pub use error::{Error, Result};
pub use identification::{
    critical_family, induced_capacity, is_max_increasing, is_min_increasing, recover_structure, same_preferences,
    IdentificationResult, Mode,
};
pub use lattice::{Event, EventFamily, StateSpace, MAX_STATES};
pub use scalar::Scalar;
pub use set_function::{
    choquet_by_level_sets, choquet_by_mobius, choquet_integral, classify_modularity, mobius_transform, zeta_transform,
    MobiusVector, Modularity, SetFunction,
};

pub use welfare::{
    compare_risk_aversion, compare_verifiability, find_indeterminacy_witnesses, find_vo_loss_witnesses,
    transparency_loss, transparency_report, welfare_loss, LossReport, Menu, RiskComparison, VerifiabilityRelation,
    VoLossOutcome,
};

pub use num_rational::Rational64;

pub type SetFunctionF64 = SetFunction<f64>;
pub type SetFunctionF32 = SetFunction<f32>;
pub type SetFunctionExact = SetFunction<Rational64>;
pub type MobiusVectorF64 = MobiusVector<f64>;
pub type ScenarioF64 = Scenario<f64>;
pub type ScenarioF32 = Scenario<f32>;
pub type ScenarioExact = Scenario<Rational64>;
pub type AxiomReportF64 = AxiomReport<f64>;
pub type LossReportF64 = LossReport<f64>;
pub type IdentificationResultF64 = IdentificationResult<f64>;
