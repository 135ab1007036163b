//! Dated events, the rules connecting them to fluents, and selection of the
//! events that bracket a query time.
//!
//! Bracketing semantics for a query interval `Q = [qs, qe]`:
//! * the initiator is the latest one strictly before `qs`;
//! * the terminator is the earliest one strictly after `qe`;
//! * a terminator at any time in `[T1, qe]` breaks the bracket (a terminator
//!   simultaneous with an initiator wins).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::kb::{Fluent, Kb};
use crate::sexpr::Sexpr;
use crate::time::{TimeInterval, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("duplicate event id {0}")]
    DuplicateId(String),
    #[error("unknown event {0}")]
    UnknownEvent(String),
    #[error("bad fluent template {0}: exactly one ?variable is required")]
    BadTemplate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub event_type: String,
    pub time: TimePoint,
    pub roles: BTreeMap<String, String>,
}

impl Event {
    pub fn new<K: Into<String>, V: Into<String>>(
        id: impl Into<String>,
        event_type: impl Into<String>,
        time: TimePoint,
        roles: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        Event {
            id: id.into(),
            event_type: event_type.into(),
            time,
            roles: roles.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(event :id {} :type {} :time {} :roles (", self.id, self.event_type, self.time)?;
        for (i, (role, who)) in self.roles.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({role} {who})")?;
        }
        f.write_str("))")
    }
}

/// An event type starts a risk period for the role player entering `state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskPeriodRule {
    pub event_type: String,
    pub role: String,
    pub state: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectKind {
    Initiates,
    Terminates,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateArg {
    Hole,
    Entity(String),
}

/// A fluent with exactly one hole, filled by a role player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FluentTemplate {
    /// `(isa ?x C)`, written as a bare collection name in rule files.
    Isa(String),
    Rel { predicate: String, args: Vec<TemplateArg> },
}

impl FluentTemplate {
    pub fn from_sexpr(e: &Sexpr) -> Result<Self, EventError> {
        let bad = || EventError::BadTemplate(e.to_string());
        if let Some(c) = e.as_atom() {
            return Ok(FluentTemplate::Isa(c.to_string()));
        }
        let items = e.as_list().ok_or_else(bad)?;
        match e.head() {
            Some("isa") if items.len() == 3 && items[1].is_variable() => {
                Ok(FluentTemplate::Isa(items[2].to_string()))
            }
            Some("rel") if items.len() >= 3 => {
                let predicate = items[1].as_atom().ok_or_else(bad)?.to_string();
                let args: Vec<TemplateArg> = items[2..]
                    .iter()
                    .map(|a| match a.as_atom() {
                        Some(v) if v.starts_with('?') => Ok(TemplateArg::Hole),
                        Some(v) => Ok(TemplateArg::Entity(v.to_string())),
                        None => Err(bad()),
                    })
                    .collect::<Result<_, _>>()?;
                if args.iter().filter(|a| **a == TemplateArg::Hole).count() != 1 {
                    return Err(bad());
                }
                Ok(FluentTemplate::Rel { predicate, args })
            }
            _ => Err(bad()),
        }
    }

    pub fn instantiate(&self, player: &str) -> Fluent {
        match self {
            FluentTemplate::Isa(c) => Fluent::isa(player, c.clone()),
            FluentTemplate::Rel { predicate, args } => Fluent::rel(
                predicate.clone(),
                args.iter().map(|a| match a {
                    TemplateArg::Hole => player.to_string(),
                    TemplateArg::Entity(e) => e.clone(),
                }),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectScope {
    /// A specific event affects a specific fluent.
    Instance { event_id: String, fluent: Fluent },
    /// Every event of a type affects the template filled by a role player.
    Type {
        event_type: String,
        role: String,
        template: FluentTemplate,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectRule {
    pub kind: EffectKind,
    pub scope: EffectScope,
}

#[derive(Debug, Clone, Default)]
pub struct EventStore {
    events: Vec<Event>,
    by_id: HashMap<String, usize>,
    by_player: HashMap<String, Vec<usize>>,
    risk_rules: Vec<RiskPeriodRule>,
    effects: Vec<EffectRule>,
}

impl EventStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_event(&mut self, event: Event) -> Result<(), EventError> {
        if self.by_id.contains_key(&event.id) {
            return Err(EventError::DuplicateId(event.id));
        }
        let idx = self.events.len();
        self.by_id.insert(event.id.clone(), idx);
        let players: BTreeSet<&String> = event.roles.values().collect();
        for p in players {
            self.by_player.entry(p.clone()).or_default().push(idx);
        }
        self.events.push(event);
        Ok(())
    }

    pub fn add_risk_rule(&mut self, rule: RiskPeriodRule) {
        self.risk_rules.push(rule);
    }

    pub fn add_effect(&mut self, rule: EffectRule) {
        self.effects.push(rule);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.by_id.get(id).map(|&i| &self.events[i])
    }

    pub fn involves(&self, entity: &str) -> bool {
        self.by_player.contains_key(entity)
    }

    /// Instance-level rules must name stored events.
    pub fn validate(&self) -> Result<(), EventError> {
        for rule in &self.effects {
            if let EffectScope::Instance { event_id, .. } = &rule.scope {
                if !self.by_id.contains_key(event_id) {
                    return Err(EventError::UnknownEvent(event_id.clone()));
                }
            }
        }
        Ok(())
    }

    fn type_matches(kb: &Kb, event_type: &str, rule_type: &str) -> bool {
        event_type == rule_type || kb.genls_by_distance(event_type).iter().any(|(g, _)| g == rule_type)
    }

    /// Events in which any argument of `f` plays a role, deduplicated.
    fn candidate_events<'a>(&'a self, f: &Fluent) -> Vec<&'a Event> {
        let players: Vec<&str> = match f {
            Fluent::Isa { entity, .. } => vec![entity.as_str()],
            Fluent::Rel { args, .. } => args.iter().map(String::as_str).collect(),
        };
        let mut idx: Vec<usize> = players
            .iter()
            .filter_map(|p| self.by_player.get(*p))
            .flatten()
            .copied()
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|i| &self.events[i]).collect()
    }

    /// Start times of the risk periods for `f`, ascending, one per event.
    pub fn risk_starts(&self, f: &Fluent, kb: &Kb) -> Vec<TimePoint> {
        let Fluent::Isa { entity, collection } = f else {
            return Vec::new();
        };
        let rules: Vec<&RiskPeriodRule> = self.risk_rules.iter().filter(|r| &r.state == collection).collect();
        if rules.is_empty() {
            return Vec::new();
        }
        let mut times: Vec<TimePoint> = self
            .candidate_events(f)
            .into_iter()
            .filter(|e| {
                rules.iter().any(|r| {
                    e.roles.get(&r.role) == Some(entity) && Self::type_matches(kb, &e.event_type, &r.event_type)
                })
            })
            .map(|e| e.time)
            .collect();
        times.sort_unstable();
        times
    }

    /// Latest risk-period start not after `not_after`.
    pub fn last_risk_start(&self, f: &Fluent, not_after: TimePoint, kb: &Kb) -> Option<TimePoint> {
        self.risk_starts(f, kb).into_iter().filter(|&t| t <= not_after).max()
    }

    fn affects(&self, e: &Event, f: &Fluent, kind: EffectKind, kb: &Kb) -> bool {
        self.effects.iter().filter(|r| r.kind == kind).any(|r| match &r.scope {
            EffectScope::Instance { event_id, fluent } => event_id == &e.id && fluent == f,
            EffectScope::Type {
                event_type,
                role,
                template,
            } => e.roles.get(role).is_some_and(|player| {
                Self::type_matches(kb, &e.event_type, event_type) && &template.instantiate(player) == f
            }),
        })
    }

    fn effect_events<'a>(&'a self, f: &Fluent, kind: EffectKind, kb: &Kb) -> Vec<&'a Event> {
        let mut out: Vec<&Event> = self
            .candidate_events(f)
            .into_iter()
            .filter(|e| self.affects(e, f, kind, kb))
            .collect();
        out.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.id.cmp(&b.id)));
        out
    }

    /// Events initiating `f`, sorted by time then id.
    pub fn initiators<'a>(&'a self, f: &Fluent, kb: &Kb) -> Vec<&'a Event> {
        self.effect_events(f, EffectKind::Initiates, kb)
    }

    /// Events terminating `f`, sorted by time then id.
    pub fn terminators<'a>(&'a self, f: &Fluent, kb: &Kb) -> Vec<&'a Event> {
        self.effect_events(f, EffectKind::Terminates, kb)
    }

    /// `isa` fluents about `entity` that some stored event initiates, with
    /// the initiation times.
    pub fn initiated_isa_fluents(&self, entity: &str, kb: &Kb) -> Vec<(Fluent, TimePoint)> {
        let mut out = Vec::new();
        for &i in self.by_player.get(entity).into_iter().flatten() {
            let e = &self.events[i];
            for rule in self.effects.iter().filter(|r| r.kind == EffectKind::Initiates) {
                let f = match &rule.scope {
                    EffectScope::Instance { event_id, fluent } if event_id == &e.id => fluent.clone(),
                    EffectScope::Type {
                        event_type,
                        role,
                        template: template @ FluentTemplate::Isa(_),
                    } if e.roles.get(role).map(String::as_str) == Some(entity)
                        && Self::type_matches(kb, &e.event_type, event_type) =>
                    {
                        template.instantiate(entity)
                    }
                    _ => continue,
                };
                if matches!(&f, Fluent::Isa { entity: who, .. } if who == entity) {
                    out.push((f, e.time));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn timeline<'a>(&'a self, f: &Fluent, kb: &Kb) -> Timeline<'a> {
        Timeline {
            initiators: self.initiators(f, kb),
            terminators: self.terminators(f, kb),
        }
    }
}

/// The initiating and terminating events of one fluent.
#[derive(Debug, Clone, Default)]
pub struct Timeline<'a> {
    pub initiators: Vec<&'a Event>,
    pub terminators: Vec<&'a Event>,
}

impl<'a> Timeline<'a> {
    pub fn is_empty(&self) -> bool {
        self.initiators.is_empty() && self.terminators.is_empty()
    }

    /// Latest initiator strictly before `t`; ties go to the smallest id.
    pub fn latest_initiator_before(&self, t: TimePoint) -> Option<&'a Event> {
        let best = self.initiators.iter().filter(|e| e.time < t).map(|e| e.time).max()?;
        self.initiators.iter().copied().find(|e| e.time == best)
    }

    /// Earliest terminator strictly after `t`; ties go to the smallest id.
    pub fn earliest_terminator_after(&self, t: TimePoint) -> Option<&'a Event> {
        self.terminators.iter().copied().find(|e| e.time > t)
    }

    pub fn any_terminator_within(&self, from: TimePoint, to: TimePoint) -> bool {
        self.terminators.iter().any(|e| from <= e.time && e.time <= to)
    }

    /// Tightest initiator/terminator pair around `q`, if no terminator
    /// interrupts the span between the initiator and the end of `q`.
    pub fn select_bracketing(&self, q: &TimeInterval) -> Option<(&'a Event, &'a Event)> {
        let init = self.latest_initiator_before(q.start())?;
        let term = self.earliest_terminator_after(q.end())?;
        if self.any_terminator_within(init.time, q.end()) {
            return None;
        }
        Some((init, term))
    }
}
