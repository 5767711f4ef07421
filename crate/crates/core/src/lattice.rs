//! Finite state spaces, events as bitmasks, and event families.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of states. Exhaustive scans are `O(4^n)`.
pub const MAX_STATES: usize = 16;

/// An ordered list of distinct, non-empty state labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_STATES {
            return Err(Error::StateSpace(format!(
                "expected 1..={MAX_STATES} states, got {}",
                names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::StateSpace("state labels must be non-empty".into()));
            }
            if name.contains(',') {
                return Err(Error::StateSpace(format!("state label `{name}` contains a comma")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::StateSpace(format!("duplicate state label `{name}`")));
            }
        }
        Ok(Self { names })
    }

    /// Space with states labelled `s0, s1, ...`.
    pub fn anonymous(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("s{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, state: usize) -> &str {
        &self.names[state]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == label)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    pub fn full(&self) -> Event {
        Event::full(self.len())
    }

    /// Number of events, `2^n`.
    pub fn event_count(&self) -> usize {
        1 << self.len()
    }

    /// All events in numeric order, including the empty event.
    pub fn events(&self) -> impl Iterator<Item = Event> {
        (0..self.event_count() as u32).map(Event)
    }

    pub fn contains_event(&self, e: Event) -> bool {
        e.0 >> self.len() == 0
    }

    pub fn check_event(&self, e: Event) -> Result<Event> {
        if self.contains_event(e) {
            Ok(e)
        } else {
            Err(Error::EventOutOfRange { n: self.len() })
        }
    }

    pub fn event_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        labels
            .iter()
            .try_fold(Event::EMPTY, |acc, l| Ok(acc.with(self.index_of(l.as_ref())?)))
    }

    /// Labels of the states in `e`, in state order.
    pub fn labels(&self, e: Event) -> Vec<String> {
        e.states().map(|i| self.names[i].clone()).collect()
    }

    /// Labels of every member, in the family's canonical order.
    pub fn family_labels(&self, family: &EventFamily) -> Vec<Vec<String>> {
        family.iter().map(|e| self.labels(e)).collect()
    }

    pub fn family_from_labels<S: AsRef<str>>(&self, members: &[Vec<S>]) -> Result<EventFamily> {
        members
            .iter()
            .map(|m| self.event_from_labels(m))
            .collect::<Result<Vec<_>>>()
            .map(EventFamily::new)
    }

    /// Human rendering such as `{s,t}`.
    pub fn show(&self, e: Event) -> String {
        format!("{{{}}}", self.labels(e).join(","))
    }
}

impl TryFrom<Vec<String>> for StateSpace {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        StateSpace::new(v)
    }
}

impl From<StateSpace> for Vec<String> {
    fn from(s: StateSpace) -> Self {
        s.names
    }
}

/// A subset of state indices, bit `i` set iff state `i` is in the event.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub u32);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub fn full(n: usize) -> Event {
        debug_assert!(n <= MAX_STATES);
        Event(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(state: usize) -> Event {
        Event(1 << state)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, state: usize) -> bool {
        self.0 >> state & 1 == 1
    }

    pub fn with(self, state: usize) -> Event {
        Event(self.0 | 1 << state)
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn difference(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    /// Complement relative to a space of `n` states.
    pub fn complement(self, n: usize) -> Event {
        Event(!self.0 & Event::full(n).0)
    }

    pub fn is_subset_of(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(self, other: Event) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn meets(self, other: Event) -> bool {
        self.0 & other.0 != 0
    }

    /// State indices in increasing order.
    pub fn states(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// Every subset of `self`, including `∅` and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Event> {
        let mask = self.0;
        let mut next = Some(mask);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & mask) };
            Some(Event(cur))
        })
    }

    /// Non-empty subsets of `self`.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = Event> {
        self.subsets().filter(|e| !e.is_empty())
    }

    fn canonical_key(self) -> (u32, u32) {
        (self.0.count_ones(), self.0)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Event({:#b})", self.0)
    }
}

/// Deduplicated events in canonical order: popcount ascending, then bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Event>", into = "Vec<Event>")]
pub struct EventFamily {
    members: Vec<Event>,
}

impl EventFamily {
    pub fn new(members: impl IntoIterator<Item = Event>) -> Self {
        let mut members: Vec<Event> = members.into_iter().collect();
        members.sort_by_key(|e| e.canonical_key());
        members.dedup();
        Self { members }
    }

    /// All non-empty events of an `n`-state space.
    pub fn all_nonempty(n: usize) -> Self {
        Self::new((1..1u32 << n).map(Event))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Event] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = Event> + '_ {
        self.members.iter().copied()
    }

    /// Members other than `∅`.
    pub fn nonempty(&self) -> impl Iterator<Item = Event> + '_ {
        self.iter().filter(|e| !e.is_empty())
    }

    pub fn contains(&self, e: Event) -> bool {
        self.members
            .binary_search_by_key(&e.canonical_key(), |m| m.canonical_key())
            .is_ok()
    }

    pub fn with(&self, e: Event) -> Self {
        Self::new(self.iter().chain(std::iter::once(e)))
    }

    pub fn is_subfamily_of(&self, other: &EventFamily) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    /// Union of all members.
    pub fn support(&self) -> Event {
        self.iter().fold(Event::EMPTY, Event::union)
    }

    /// Smallest superset closed under pairwise intersection.
    pub fn close_under_intersection(&self) -> EventFamily {
        self.close_under(Event::intersection)
    }

    /// Smallest superset closed under pairwise union.
    pub fn close_under_union(&self) -> EventFamily {
        self.close_under(Event::union)
    }

    // For an associative, commutative, idempotent operation the closure is
    // reached by combining closure elements with the generators only.
    fn close_under(&self, op: fn(Event, Event) -> Event) -> EventFamily {
        let generators = &self.members;
        let mut seen: HashSet<Event> = generators.iter().copied().collect();
        let mut frontier: Vec<Event> = generators.clone();
        let mut all = generators.clone();
        while let Some(x) = frontier.pop() {
            for &g in generators {
                let y = op(x, g);
                if seen.insert(y) {
                    frontier.push(y);
                    all.push(y);
                }
            }
        }
        EventFamily::new(all)
    }

    pub fn is_intersection_closed(&self) -> bool {
        self.iter()
            .all(|a| self.iter().all(|b| self.contains(a.intersection(b))))
    }

    pub fn is_union_closed(&self) -> bool {
        self.iter().all(|a| self.iter().all(|b| self.contains(a.union(b))))
    }

    /// True iff the family is intersection-closed and has `support` as a member.
    pub fn is_pi_system_with_support(&self, support: Event) -> bool {
        self.contains(support) && self.is_intersection_closed()
    }

    /// `⊆`-minimal members containing `state`, skipping `∅`.
    pub fn minimal_members_containing(&self, state: usize) -> Vec<Event> {
        let containing: Vec<Event> = self.iter().filter(|e| e.contains(state)).collect();
        containing
            .iter()
            .copied()
            .filter(|e| !containing.iter().any(|f| f.is_proper_subset_of(*e)))
            .collect()
    }
}

impl From<Vec<Event>> for EventFamily {
    fn from(v: Vec<Event>) -> Self {
        EventFamily::new(v)
    }
}

impl From<EventFamily> for Vec<Event> {
    fn from(f: EventFamily) -> Self {
        f.members
    }
}

impl FromIterator<Event> for EventFamily {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        EventFamily::new(iter)
    }
}
