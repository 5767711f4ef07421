//! JSON file formats: scenarios, capacities, event families and belief vectors.
//!
//! Events are written as label lists (families) or comma-joined label
//! strings (capacity keys). Labels come out in state order and are accepted
//! in any order.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::axioms::{AxiomReport, Witness};
use crate::decision::{Act, ModelKind, Scenario, UtilitySpec};
use crate::error::{Error, Result};
use crate::identification::IdentificationResult;
use crate::lattice::{Event, EventFamily, StateSpace};
use crate::set_function::SetFunction;
use crate::welfare::{LossReport, Menu, MenuWitness, ModelPairLoss};

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e)))
}

fn typed<T: for<'de> Deserialize<'de>>(value: Value, path: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::validation(path, e.to_string()))
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::validation(path, "expected an object"))
}

fn number(value: &Value, path: &str) -> Result<f64> {
    match value.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(Error::validation(path, "expected a finite number")),
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            let at = if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            };
            return Err(Error::validation(at, "unknown field"));
        }
    }
    Ok(())
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| {
        let at = if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        };
        Error::validation(at, "missing field")
    })
}

fn parse_space(obj: &Map<String, Value>) -> Result<StateSpace> {
    let names: Vec<String> = typed(required(obj, "states", "")?.clone(), "states")?;
    StateSpace::new(names).map_err(|e| Error::validation("states", e.to_string()))
}

/// Reads `{label: number}` into a per-state vector; every state must appear.
fn per_state(space: &StateSpace, value: &Value, path: &str) -> Result<Vec<f64>> {
    let obj = object(value, path)?;
    let mut out = vec![None; space.len()];
    for (label, v) in obj {
        let at = format!("{path}.{label}");
        let s = space
            .index_of(label)
            .map_err(|_| Error::validation(&at, "unknown state"))?;
        out[s] = Some(number(v, &at)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(s, x)| x.ok_or_else(|| Error::validation(format!("{path}.{}", space.name(s)), "missing state")))
        .collect()
}

fn parse_family_value(space: &StateSpace, value: &Value, path: &str) -> Result<EventFamily> {
    let members = value
        .as_array()
        .ok_or_else(|| Error::validation(path, "expected a list of label lists"))?;
    let mut events = Vec::with_capacity(members.len());
    for (i, m) in members.iter().enumerate() {
        let at = format!("{path}[{i}]");
        let labels: Vec<String> = typed(m.clone(), &at)?;
        let e = space
            .event_from_labels(&labels)
            .map_err(|e| Error::validation(&at, e.to_string()))?;
        events.push(e);
    }
    Ok(EventFamily::new(events))
}

fn parse_utility(value: &Value) -> Result<UtilitySpec<f64>> {
    let obj = object(value, "utility")?;
    let kind = required(obj, "kind", "utility")?
        .as_str()
        .ok_or_else(|| Error::validation("utility.kind", "expected a string"))?;
    let wrap = |e: Error| Error::validation("utility", e.to_string());
    match kind {
        "identity" => {
            check_keys(obj, &["kind"], "utility")?;
            Ok(UtilitySpec::Identity)
        }
        "power" => {
            check_keys(obj, &["kind", "exponent"], "utility")?;
            let rho = number(required(obj, "exponent", "utility")?, "utility.exponent")?;
            UtilitySpec::power(rho).map_err(wrap)
        }
        "table" => {
            check_keys(obj, &["kind", "map"], "utility")?;
            let map = object(required(obj, "map", "utility")?, "utility.map")?;
            let mut entries = Vec::with_capacity(map.len());
            for (k, v) in map {
                let at = format!("utility.map.{k}");
                let x: f64 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::validation(&at, "table keys must be numbers"))?;
                entries.push((x, number(v, &at)?));
            }
            UtilitySpec::table(entries).map_err(wrap)
        }
        other => Err(Error::validation(
            "utility.kind",
            format!("unknown utility kind `{other}`"),
        )),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario<f64>> {
    let root = parse_json(text)?;
    let obj = object(&root, "$")?;
    check_keys(
        obj,
        &[
            "states",
            "acts",
            "utility",
            "beliefs",
            "verifiable",
            "model",
            "tolerance",
        ],
        "",
    )?;
    let space = parse_space(obj)?;
    let acts_obj = object(required(obj, "acts", "")?, "acts")?;
    if acts_obj.is_empty() {
        return Err(Error::validation("acts", "at least one act is required"));
    }
    let acts = acts_obj
        .iter()
        .map(|(name, v)| Ok(Act::new(name.clone(), per_state(&space, v, &format!("acts.{name}"))?)))
        .collect::<Result<Vec<_>>>()?;
    let utility = parse_utility(required(obj, "utility", "")?)?;
    let beliefs = per_state(&space, required(obj, "beliefs", "")?, "beliefs")?;
    let verifiable = parse_family_value(&space, required(obj, "verifiable", "")?, "verifiable")?;
    let model: ModelKind = typed(required(obj, "model", "")?.clone(), "model")?;
    let sc = Scenario::new(space, acts, utility, beliefs, verifiable, model)?;
    match obj.get("tolerance") {
        None => Ok(sc),
        Some(v) => {
            let tol = number(v, "tolerance")?;
            if tol < 0.0 {
                return Err(Error::validation("tolerance", "must be non-negative"));
            }
            Ok(sc.with_tolerance(tol))
        }
    }
}

fn utility_json(u: &UtilitySpec<f64>) -> Value {
    match u {
        UtilitySpec::Identity => json!({"kind": "identity"}),
        UtilitySpec::Power { exponent } => json!({"kind": "power", "exponent": exponent}),
        UtilitySpec::Table(entries) => {
            let map: Map<String, Value> = entries.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect();
            json!({"kind": "table", "map": map})
        }
    }
}

pub fn per_state_json(space: &StateSpace, values: &[f64]) -> Value {
    Value::Object(
        space
            .names()
            .iter()
            .zip(values)
            .map(|(n, v)| (n.clone(), Value::from(*v)))
            .collect(),
    )
}

pub fn family_json(space: &StateSpace, family: &EventFamily) -> Value {
    serde_json::to_value(space.family_labels(family)).expect("labels serialise")
}

pub fn scenario_to_json(sc: &Scenario<f64>) -> Value {
    let space = sc.space();
    let acts: Map<String, Value> = sc
        .acts()
        .iter()
        .map(|a| (a.name.clone(), per_state_json(space, &a.payoff)))
        .collect();
    json!({
        "states": space.names(),
        "acts": acts,
        "utility": utility_json(sc.utility()),
        "beliefs": per_state_json(space, sc.beliefs()),
        "verifiable": family_json(space, sc.verifiable()),
        "model": sc.model(),
        "tolerance": sc.tolerance(),
    })
}

/// Comma-joined labels in state order; `""` for the empty event.
pub fn event_key(space: &StateSpace, e: Event) -> String {
    space.labels(e).join(",")
}

fn parse_event_key(space: &StateSpace, key: &str, path: &str) -> Result<Event> {
    if key.trim().is_empty() {
        return Ok(Event::EMPTY);
    }
    let mut e = Event::EMPTY;
    for label in key.split(',') {
        let s = space
            .index_of(label.trim())
            .map_err(|_| Error::validation(path, format!("unknown state `{}`", label.trim())))?;
        if e.contains(s) {
            return Err(Error::validation(
                path,
                format!("state `{}` listed twice", label.trim()),
            ));
        }
        e = e.with(s);
    }
    Ok(e)
}

/// `{"states": [...], "values": {"s,t": 0.8, ...}}`. Every non-empty event
/// needs a value; the empty key is optional and must be 0.
pub fn parse_capacity(text: &str) -> Result<SetFunction<f64>> {
    let root = parse_json(text)?;
    let obj = object(&root, "$")?;
    check_keys(obj, &["states", "values"], "")?;
    let space = parse_space(obj)?;
    let values = object(required(obj, "values", "")?, "values")?;
    let mut slots: Vec<Option<f64>> = vec![None; space.event_count()];
    for (key, v) in values {
        let at = format!("values.{key}");
        let e = parse_event_key(&space, key, &at)?;
        if slots[e.index()].is_some() {
            return Err(Error::validation(&at, "event given twice"));
        }
        slots[e.index()] = Some(number(v, &at)?);
    }
    match slots[0] {
        None => slots[0] = Some(0.0),
        Some(x) if x != 0.0 => return Err(Error::validation("values.", "the empty event must have value 0")),
        Some(_) => {}
    }
    let values = slots
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            x.ok_or_else(|| {
                Error::validation(
                    format!("values.{}", event_key(&space, Event(i as u32))),
                    "missing event",
                )
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    SetFunction::new(space, values)
}

pub fn capacity_to_json(f: &SetFunction<f64>) -> Value {
    let space = f.space();
    let values: Map<String, Value> = space
        .events()
        .filter(|e| !e.is_empty())
        .map(|e| (event_key(space, e), Value::from(f.get(e))))
        .collect();
    json!({"states": space.names(), "values": values})
}

/// A family as a bare list of label lists, or an object with a
/// `verifiable` (or `family`) list.
pub fn parse_family(text: &str, space: &StateSpace) -> Result<EventFamily> {
    let root = parse_json(text)?;
    match &root {
        Value::Array(_) => parse_family_value(space, &root, "$"),
        Value::Object(obj) => {
            if let Some(states) = obj.get("states") {
                let names: Vec<String> = typed(states.clone(), "states")?;
                if names.as_slice() != space.names() {
                    return Err(Error::validation("states", "does not match the scenario's states"));
                }
            }
            let key = ["verifiable", "family"]
                .into_iter()
                .find(|k| obj.contains_key(*k))
                .ok_or_else(|| Error::validation("verifiable", "missing field"))?;
            check_keys(obj, &["states", key], "")?;
            parse_family_value(space, &obj[key], key)
        }
        _ => Err(Error::validation("$", "expected a list or an object")),
    }
}

/// `{state: probability}`, optionally wrapped as `{"beliefs": {...}}`.
pub fn parse_beliefs(text: &str, space: &StateSpace) -> Result<Vec<f64>> {
    let root = parse_json(text)?;
    let obj = object(&root, "$")?;
    let (value, path) = match obj.get("beliefs") {
        Some(inner) if obj.len() == 1 => (inner, "beliefs"),
        _ => (&root, "beliefs"),
    };
    let mu = per_state(space, value, path)?;
    crate::decision::validate_beliefs(space.len(), &mu, path)?;
    Ok(mu)
}

/// Event as a list of labels in state order.
pub fn event_json(space: &StateSpace, e: Event) -> Value {
    Value::from(space.labels(e))
}

pub fn witness_json(space: &StateSpace, w: &Witness<f64>) -> Value {
    match w {
        Witness::Independence { a, b, c, direct, mixed } => json!({
            "kind": "independence", "a": a, "b": b, "c": c, "direct": direct, "mixed": mixed,
        }),
        Witness::EventPair {
            e,
            f,
            supermodular,
            joint,
            separate,
        } => json!({
            "kind": "event_pair",
            "e": event_json(space, *e),
            "f": event_json(space, *f),
            "direction": if *supermodular { "supermodular" } else { "submodular" },
            "joint": joint,
            "separate": separate,
        }),
        Witness::Modularity {
            mode,
            e,
            f,
            condition,
            probe,
            lhs,
            rhs,
        } => json!({
            "kind": "modularity",
            "mode": mode,
            "e": event_json(space, *e),
            "f": event_json(space, *f),
            "condition": condition,
            "probe": probe.map(|a| event_json(space, a)),
            "lhs": lhs,
            "rhs": rhs,
        }),
        Witness::Dominance {
            better,
            worse,
            better_value,
            worse_value,
        } => json!({
            "kind": "dominance", "better": better, "worse": worse,
            "better_value": better_value, "worse_value": worse_value,
        }),
        Witness::Eventwise {
            event,
            preferred,
            other,
            preferred_value,
            other_value,
        } => json!({
            "kind": "eventwise",
            "event": event_json(space, *event),
            "preferred": preferred,
            "other": other,
            "preferred_value": preferred_value,
            "other_value": other_value,
        }),
    }
}

pub fn axiom_report_json(space: &StateSpace, r: &AxiomReport<f64>) -> Value {
    json!({
        "axiom": r.axiom,
        "holds": r.holds,
        "violations": r.violations,
        "samples_checked": r.samples_checked,
        "seed": r.seed,
        "witnesses": r.witnesses.iter().map(|w| witness_json(space, w)).collect::<Vec<_>>(),
        "non_vacuity": r.non_vacuity.as_ref().map(|w| witness_json(space, w)),
    })
}

pub fn identification_json(space: &StateSpace, r: &IdentificationResult<f64>) -> Value {
    let phi: Map<String, Value> = space
        .names()
        .iter()
        .zip(&r.phi)
        .map(|(n, p)| (n.clone(), p.map_or(Value::Null, |e| event_json(space, e))))
        .collect();
    let mobius: Map<String, Value> = space
        .events()
        .filter(|e| !e.is_empty() && r.mobius.get(*e) != 0.0)
        .map(|e| (event_key(space, e), Value::from(r.mobius.get(e))))
        .collect();
    json!({
        "verifiable_core": family_json(space, &r.verifiable_core),
        "union_closure": family_json(space, &r.union_closure),
        "phi": phi,
        "eta": per_state_json(space, &r.eta),
        "irrelevant_states": event_json(space, r.irrelevant_states),
        "mobius": mobius,
    })
}

pub fn menu_json(menu: &Menu<f64>) -> Value {
    Value::Object(
        menu.acts
            .iter()
            .map(|a| (a.name.clone(), Value::from(a.payoff.clone())))
            .collect(),
    )
}

pub fn loss_report_json(r: &LossReport<f64>) -> Value {
    serde_json::to_value(r).expect("loss reports serialise")
}

pub fn menu_witness_json(space: &StateSpace, w: &MenuWitness<f64>) -> Value {
    json!({
        "menu": menu_json(&w.menu),
        "beliefs": per_state_json(space, &w.beliefs),
        "base": loss_report_json(&w.base),
        "richer": loss_report_json(&w.richer),
        "delta": w.delta,
    })
}

pub fn model_pair_json(p: &ModelPairLoss<f64>) -> Value {
    json!({
        "menu": menu_json(&p.menu),
        "verification": loss_report_json(&p.verification),
        "obfuscation": loss_report_json(&p.obfuscation),
    })
}
