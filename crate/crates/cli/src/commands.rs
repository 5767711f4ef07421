use std::fmt;
use std::path::Path;

use serde_json::{json, Map, Value};
use veriobs_core::axioms::{capacity_of, even_grid, SamplingPlan};
use veriobs_core::io;
use veriobs_core::welfare::{compare_risk_aversion, step_grid, IndeterminacyWitnesses};
use veriobs_core::{
    check_biseparable_grid, check_comonotonic_independence, check_critical_event_modularity, check_submodularity,
    check_supermodularity, compare_verifiability, critical_family, find_indeterminacy_witnesses,
    find_vo_loss_witnesses, induced_capacity, recover_structure, transparency_report, welfare_loss, AxiomReport,
    ChoquetPreference, Error, Menu, Mode, ModelKind, Preference, Scalar, Scenario, SetFunction, UtilitySpec,
    VoLossOutcome,
};

use crate::{Cli, Command, Search};

pub struct Outcome {
    pub report: Value,
    pub code: u8,
}

#[derive(Debug)]
pub enum CliError {
    Read { path: String, message: String },
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Core(Error::NotFound(_)) => 3,
            CliError::Core(Error::NotACapacity(_) | Error::NotAVerificationCapacity(_) | Error::NullEventMismatch) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Read { path, message } => write!(f, "cannot read {path}: {message}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Eval { scenario } => eval(cli, scenario),
        Command::Identify { input } => identify(cli, input),
        Command::Axioms { input, mode } => axioms(cli, input, *mode),
        Command::Welfare { scenario, search, menu } => welfare(cli, scenario, *search, menu),
        Command::Compare { first, second } => compare(cli, first, second),
        Command::Demo => crate::demo::run(cli),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub enum Input {
    Scenario(Scenario<f64>),
    Capacity(SetFunction<f64>),
}

/// Applies `--model` and `--tolerance` to a scenario.
pub fn configure(cli: &Cli, mut sc: Scenario<f64>) -> CliResult<Scenario<f64>> {
    if let Some(model) = cli.model {
        sc = sc.with_model(model);
    }
    if let Some(tol) = cli.tolerance {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(CliError::Usage(format!(
                "--tolerance must be a non-negative number, got {tol}"
            )));
        }
        sc = sc.with_tolerance(tol);
    }
    Ok(sc)
}

fn load_scenario(cli: &Cli, path: &Path) -> CliResult<Scenario<f64>> {
    configure(cli, io::parse_scenario(&read(path)?)?)
}

/// A file with a `values` object is a capacity; anything else is read as a scenario.
fn load_input(cli: &Cli, path: &Path) -> CliResult<Input> {
    let text = read(path)?;
    let is_capacity = serde_json::from_str::<Value>(&text)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("values")))
        .unwrap_or(false);
    if is_capacity {
        if cli.tolerance.is_some() {
            return Err(CliError::Usage("--tolerance applies to scenario inputs only".into()));
        }
        if cli.model.is_some() {
            return Err(CliError::Usage("--model applies to scenario inputs only".into()));
        }
        Ok(Input::Capacity(io::parse_capacity(&text)?))
    } else {
        Ok(Input::Scenario(configure(cli, io::parse_scenario(&text)?)?))
    }
}

/// Report header shared by every command.
pub fn envelope(command: &str, cli: &Cli, tolerance: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), Value::from(command));
    m.insert("seed".into(), Value::from(cli.seed));
    m.insert("tolerance".into(), Value::from(tolerance));
    m
}

fn true_beliefs(cli: &Cli, sc: &Scenario<f64>) -> CliResult<Option<Vec<f64>>> {
    cli.true_beliefs
        .as_deref()
        .map(|p| Ok(io::parse_beliefs(&read(p)?, sc.space())?))
        .transpose()
}

fn eval(cli: &Cli, path: &Path) -> CliResult<Outcome> {
    let sc = load_scenario(cli, path)?;
    let truth = true_beliefs(cli, &sc)?;
    let eu_beliefs = truth.as_deref().unwrap_or(sc.beliefs());
    let mut rows = Vec::with_capacity(sc.acts().len());
    for act in sc.acts() {
        rows.push(json!({
            "act": act.name,
            "model_value": sc.model_utility(&act.payoff)?,
            "expected_utility": sc.expected_utility_under(eu_beliefs, &act.payoff)?,
            "certainty_equivalent": sc.certainty_equivalent(&act.payoff).ok(),
        }));
    }
    let best = sc.best_acts()?;
    let mut r = envelope("eval", cli, sc.tolerance());
    r.insert("model".into(), json!(sc.model()));
    r.insert("beliefs".into(), io::per_state_json(sc.space(), sc.beliefs()));
    if let Some(mu) = &truth {
        r.insert("true_beliefs".into(), io::per_state_json(sc.space(), mu));
    }
    r.insert("verifiable".into(), io::family_json(sc.space(), sc.verifiable()));
    r.insert("acts".into(), Value::Array(rows));
    r.insert(
        "best".into(),
        best.iter().map(|i| Value::from(sc.acts()[*i].name.clone())).collect(),
    );
    if let Some(i) = best.first() {
        r.insert("best_value".into(), json!(sc.model_utility(&sc.acts()[*i].payoff)?));
    }
    Ok(Outcome {
        report: Value::Object(r),
        code: 0,
    })
}

/// The verification capacity behind an input. Obfuscation scenarios are
/// mapped to the conjugate of their capacity.
fn verification_capacity(input: &Input) -> (SetFunction<f64>, &'static str) {
    match input {
        Input::Capacity(f) => (f.clone(), "capacity"),
        Input::Scenario(sc) => {
            let nu = induced_capacity(sc);
            match sc.model() {
                ModelKind::Obfuscation => (nu.conjugate(), "conjugate of the scenario's obfuscation capacity"),
                _ => (nu, "scenario capacity"),
            }
        }
    }
}

fn input_tolerance(input: &Input) -> f64 {
    match input {
        Input::Scenario(sc) => sc.tolerance(),
        Input::Capacity(_) => f64::comparison_tol(),
    }
}

fn identify(cli: &Cli, path: &Path) -> CliResult<Outcome> {
    let input = load_input(cli, path)?;
    let (nu, source) = verification_capacity(&input);
    let result = recover_structure(&nu)?;
    let space = nu.space();
    let mut r = envelope("identify", cli, input_tolerance(&input));
    r.insert("source".into(), Value::from(source));
    if let Value::Object(body) = io::identification_json(space, &result) {
        r.extend(body);
    }
    r.insert(
        "critical_events".into(),
        io::family_json(space, &critical_family(&nu, Mode::Min)),
    );
    Ok(Outcome {
        report: Value::Object(r),
        code: 0,
    })
}

/// `lo, lo + step, …, hi`, or five even points when no step is given.
fn payoff_grid(lo: f64, hi: f64, step: Option<f64>) -> CliResult<Vec<f64>> {
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let Some(step) = step else {
        return Ok(even_grid(lo, hi, 5));
    };
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(format!("--grid must be a positive step, got {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1000 {
        return Err(CliError::Usage(format!(
            "--grid {step} gives {count} points; use a coarser step"
        )));
    }
    let mut grid: Vec<f64> = (0..count).map(|k| lo + step * k as f64).collect();
    if hi - grid[count - 1] > 1e-9 {
        grid.push(hi);
    }
    Ok(grid)
}

pub fn scenario_grid(sc: &Scenario<f64>, step: Option<f64>) -> CliResult<Vec<f64>> {
    if let Some(keys) = sc.utility().table_keys() {
        return Ok(keys);
    }
    let all = sc.acts().iter().flat_map(|a| a.payoff.iter().copied());
    let lo = all.clone().fold(f64::INFINITY, f64::min);
    let hi = all.fold(f64::NEG_INFINITY, f64::max);
    payoff_grid(lo, hi, step)
}

fn run_axioms<P: Preference<f64>>(
    pref: &P,
    nu: &SetFunction<f64>,
    mode: Mode,
    eu: bool,
    grid: &[f64],
    seed: u64,
) -> CliResult<Vec<AxiomReport<f64>>> {
    let mut reports = Vec::new();
    if eu {
        reports.push(check_supermodularity(pref));
        reports.push(check_submodularity(pref));
    } else if mode == Mode::Min {
        reports.push(check_supermodularity(pref));
        reports.push(check_critical_event_modularity(nu, Mode::Min));
    } else {
        reports.push(check_submodularity(pref));
        reports.push(check_critical_event_modularity(nu, Mode::Max));
    }
    let plan = SamplingPlan::default_for(pref.space().len(), grid.to_vec(), seed);
    reports.push(check_comonotonic_independence(pref, &plan)?);
    reports.push(check_biseparable_grid(pref, grid)?);
    Ok(reports)
}

fn axioms(cli: &Cli, path: &Path, mode: Mode) -> CliResult<Outcome> {
    let input = load_input(cli, path)?;
    let mut r = envelope("axioms", cli, input_tolerance(&input));
    let (reports, grid, space) = match &input {
        Input::Scenario(sc) => {
            let grid = scenario_grid(sc, cli.grid)?;
            let (mode, eu) = match sc.model() {
                ModelKind::Verification => (Mode::Min, false),
                ModelKind::Obfuscation => (Mode::Max, false),
                ModelKind::ExpectedUtility => (Mode::Min, true),
            };
            r.insert("model".into(), json!(sc.model()));
            let nu = capacity_of(sc);
            (
                run_axioms(sc, &nu, mode, eu, &grid, cli.seed)?,
                grid,
                sc.space().clone(),
            )
        }
        Input::Capacity(f) => {
            let grid = payoff_grid(0.0, 1.0, cli.grid)?;
            r.insert("mode".into(), json!(mode));
            let pref = ChoquetPreference { capacity: f.clone() };
            (
                run_axioms(&pref, f, mode, false, &grid, cli.seed)?,
                grid,
                f.space().clone(),
            )
        }
    };
    let all_hold = reports.iter().all(|a| a.holds);
    r.insert("grid".into(), json!(grid));
    r.insert("all_hold".into(), Value::from(all_hold));
    r.insert(
        "reports".into(),
        reports.iter().map(|a| io::axiom_report_json(&space, a)).collect(),
    );
    Ok(Outcome {
        report: Value::Object(r),
        code: if all_hold { 0 } else { 2 },
    })
}

fn load_richer(cli: &Cli, sc: &Scenario<f64>) -> CliResult<Option<veriobs_core::EventFamily>> {
    cli.richer
        .as_deref()
        .map(|p| Ok(io::parse_family(&read(p)?, sc.space())?))
        .transpose()
}

/// Consequence grid for witness searches: `0, step, …` up to the largest payoff.
fn search_grid(sc: &Scenario<f64>, step: Option<f64>) -> CliResult<Vec<f64>> {
    if let Some(keys) = sc.utility().table_keys() {
        return Ok(keys);
    }
    let hi = sc
        .acts()
        .iter()
        .flat_map(|a| a.payoff.iter().copied())
        .fold(0.0, f64::max);
    let hi = if hi > 0.0 { hi } else { 1.0 };
    Ok(step_grid(step.unwrap_or(hi / 10.0), hi)?)
}

fn welfare(cli: &Cli, path: &Path, search: Option<Search>, names: &[String]) -> CliResult<Outcome> {
    let sc = load_scenario(cli, path)?;
    let richer = load_richer(cli, &sc)?;
    let space = sc.space().clone();
    let mut r = envelope("welfare", cli, sc.tolerance());
    r.insert("model".into(), json!(sc.model()));
    r.insert("verifiable".into(), io::family_json(&space, sc.verifiable()));
    match search {
        None => {
            let menu = if names.is_empty() {
                Menu::all(&sc)?
            } else {
                Menu::from_names(&sc, names)?
            };
            let truth = true_beliefs(cli, &sc)?;
            r.insert("menu".into(), io::menu_json(&menu));
            match richer {
                None => {
                    let loss = welfare_loss(&sc, &menu, truth.as_deref())?;
                    r.insert("loss".into(), io::loss_report_json(&loss));
                }
                Some(family) => {
                    let t = transparency_report(&sc, &menu, &family, truth.as_deref())?;
                    r.insert("richer_verifiable".into(), io::family_json(&space, &family));
                    r.insert("loss".into(), io::loss_report_json(&t.base));
                    r.insert("richer_loss".into(), io::loss_report_json(&t.richer));
                    r.insert("transparency_loss".into(), json!(t.delta));
                }
            }
        }
        Some(Search::Indeterminacy) => {
            let family = richer.ok_or_else(|| CliError::Usage("--search indeterminacy needs --richer".into()))?;
            let grid = search_grid(&sc, cli.grid)?;
            let IndeterminacyWitnesses { negative, positive } =
                find_indeterminacy_witnesses(&space, sc.utility(), sc.verifiable(), &family, &grid, sc.model())?;
            r.insert("richer_verifiable".into(), io::family_json(&space, &family));
            r.insert("grid".into(), json!(grid));
            r.insert("negative".into(), io::menu_witness_json(&space, &negative));
            r.insert("positive".into(), io::menu_witness_json(&space, &positive));
        }
        Some(Search::VoLoss) => {
            let grid = search_grid(&sc, cli.grid)?;
            r.insert("grid".into(), json!(grid));
            match find_vo_loss_witnesses(&space, sc.utility(), sc.verifiable(), &grid)? {
                VoLossOutcome::AlwaysZero {
                    menus_checked,
                    beliefs_checked,
                } => {
                    r.insert("outcome".into(), Value::from("always_zero"));
                    r.insert("menus_checked".into(), Value::from(menus_checked));
                    r.insert("beliefs_checked".into(), Value::from(beliefs_checked));
                }
                VoLossOutcome::Witnesses {
                    beliefs,
                    verification_worse,
                    obfuscation_worse,
                } => {
                    r.insert("outcome".into(), Value::from("witnesses"));
                    r.insert("beliefs".into(), io::per_state_json(&space, &beliefs));
                    r.insert("verification_worse".into(), io::model_pair_json(&verification_worse));
                    r.insert("obfuscation_worse".into(), io::model_pair_json(&obfuscation_worse));
                }
            }
        }
    }
    Ok(Outcome {
        report: Value::Object(r),
        code: 0,
    })
}

fn utility_name(u: &UtilitySpec<f64>) -> Value {
    match u {
        UtilitySpec::Identity => json!("identity"),
        UtilitySpec::Power { exponent } => json!(format!("power {exponent}")),
        UtilitySpec::Table(_) => json!("table"),
    }
}

fn compare(cli: &Cli, first: &Path, second: &Path) -> CliResult<Outcome> {
    let a = load_input(cli, first)?;
    let b = load_input(cli, second)?;
    let ((nu1, src1), (nu2, src2)) = (verification_capacity(&a), verification_capacity(&b));
    if nu1.space() != nu2.space() {
        return Err(CliError::Usage("the two inputs have different state spaces".into()));
    }
    let relation = compare_verifiability(&nu1, &nu2)?;
    let mut r = envelope("compare", cli, input_tolerance(&a).max(input_tolerance(&b)));
    r.insert("first_source".into(), Value::from(src1));
    r.insert("second_source".into(), Value::from(src2));
    r.insert("verifiability".into(), json!(relation));
    if let (Input::Scenario(s1), Input::Scenario(s2)) = (&a, &b) {
        let mut points = scenario_grid(s1, cli.grid)?;
        points.extend(scenario_grid(s2, cli.grid)?);
        let risk = compare_risk_aversion(s1.utility(), s2.utility(), &points)?;
        r.insert("first_utility".into(), utility_name(s1.utility()));
        r.insert("second_utility".into(), utility_name(s2.utility()));
        r.insert("risk_aversion".into(), json!(risk));
    }
    Ok(Outcome {
        report: Value::Object(r),
        code: 0,
    })
}
