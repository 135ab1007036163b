//! Ontology (collections, predicates, hierarchy links, temporal-semantic
//! markers) and temporally qualified assertions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::sexpr::Sexpr;
use crate::time::TimeInterval;

/// Collection whose assertions record an entity's lifespan.
pub const EXISTENCE_COLLECTION: &str = "BiologicalLivingObject";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("adding ({kind} {from} {to}) would create a cycle")]
    Cycle {
        kind: LinkKind,
        from: String,
        to: String,
    },
    #[error("predicate {predicate} has arity {expected}, used with {found} arguments")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("collection {0} cannot be both Initial and Terminal")]
    ConflictingMarkers(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("fluent {0} is not ground")]
    NotGround(String),
    #[error("malformed fluent: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marker {
    TimeDependent,
    Initial,
    Terminal,
    Bidirectional,
}

impl Marker {
    pub fn parse(s: &str) -> Option<Marker> {
        match s {
            "TimeDependent" => Some(Marker::TimeDependent),
            "Initial" => Some(Marker::Initial),
            "Terminal" => Some(Marker::Terminal),
            "Bidirectional" => Some(Marker::Bidirectional),
            _ => None,
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Marker::TimeDependent => "TimeDependent",
            Marker::Initial => "Initial",
            Marker::Terminal => "Terminal",
            Marker::Bidirectional => "Bidirectional",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Collection {
    pub name: String,
    pub markers: BTreeSet<Marker>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub time_dependent: bool,
}

/// A ground time-varying sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fluent {
    Isa { entity: String, collection: String },
    Rel { predicate: String, args: Vec<String> },
}

impl Fluent {
    pub fn isa(entity: impl Into<String>, collection: impl Into<String>) -> Self {
        Fluent::Isa {
            entity: entity.into(),
            collection: collection.into(),
        }
    }

    pub fn rel<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Fluent::Rel {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// The entity the fluent is about: the instance for `isa`, the first
    /// argument for relations.
    pub fn subject(&self) -> &str {
        match self {
            Fluent::Isa { entity, .. } => entity,
            Fluent::Rel { args, .. } => args.first().map(String::as_str).unwrap_or(""),
        }
    }

    pub fn collection(&self) -> Option<&str> {
        match self {
            Fluent::Isa { collection, .. } => Some(collection),
            Fluent::Rel { .. } => None,
        }
    }

    /// Parses `(isa E C)` or `(rel p E1 E2 ...)`. Compound terms in the
    /// collection position, such as `(FrequentPerformerFn Smoking)`, are
    /// kept as their canonical text.
    pub fn from_sexpr(e: &Sexpr) -> Result<Fluent, KbError> {
        let items = e
            .as_list()
            .ok_or_else(|| KbError::Malformed(e.to_string()))?;
        let fluent = match e.head() {
            Some("isa") if items.len() == 3 => {
                let entity = items[1]
                    .as_atom()
                    .ok_or_else(|| KbError::Malformed(e.to_string()))?;
                Fluent::isa(entity, items[2].to_string())
            }
            Some("rel") if items.len() >= 3 => {
                let predicate = items[1]
                    .as_atom()
                    .ok_or_else(|| KbError::Malformed(e.to_string()))?;
                let args = items[2..]
                    .iter()
                    .map(|a| a.as_atom().map(str::to_string))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| KbError::Malformed(e.to_string()))?;
                Fluent::rel(predicate, args)
            }
            _ => return Err(KbError::Malformed(e.to_string())),
        };
        if !fluent.is_ground() {
            return Err(KbError::NotGround(fluent.to_string()));
        }
        Ok(fluent)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Fluent::Isa { entity, collection } => !entity.starts_with('?') && !collection.contains('?'),
            Fluent::Rel { predicate, args } => {
                !predicate.starts_with('?') && args.iter().all(|a| !a.starts_with('?'))
            }
        }
    }
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fluent::Isa { entity, collection } => write!(f, "(isa {entity} {collection})"),
            Fluent::Rel { predicate, args } => {
                write!(f, "(rel {predicate}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssertionId(pub usize);

impl fmt::Display for AssertionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub id: AssertionId,
    pub fluent: Fluent,
    pub microtheory: String,
    pub time: TimeInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    Genls,
    GenlPreds,
    DisjointWith,
    FollowingStageTypes,
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkKind::Genls => "genls",
            LinkKind::GenlPreds => "genlPreds",
            LinkKind::DisjointWith => "disjointWith",
            LinkKind::FollowingStageTypes => "followingStageTypes",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyLink {
    pub kind: LinkKind,
    pub from: String,
    pub to: String,
}

impl OntologyLink {
    pub fn new(kind: LinkKind, from: impl Into<String>, to: impl Into<String>) -> Self {
        OntologyLink {
            kind,
            from: from.into(),
            to: to.into(),
        }
    }
}

/// Directed graph over symbols with both edge directions indexed.
#[derive(Debug, Clone, Default)]
struct Hierarchy {
    up: BTreeMap<String, BTreeSet<String>>,
    down: BTreeMap<String, BTreeSet<String>>,
}

impl Hierarchy {
    fn reachable(&self, start: &str, edges: &BTreeMap<String, BTreeSet<String>>) -> Vec<(String, usize)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(start.to_string());
        queue.push_back((start.to_string(), 0usize));
        while let Some((node, dist)) = queue.pop_front() {
            if let Some(next) = edges.get(&node) {
                for n in next {
                    if seen.insert(n.clone()) {
                        queue.push_back((n.clone(), dist + 1));
                    }
                }
            }
            out.push((node, dist));
        }
        out
    }

    fn ancestors(&self, start: &str) -> Vec<(String, usize)> {
        self.reachable(start, &self.up)
    }

    fn descendants(&self, start: &str) -> Vec<(String, usize)> {
        self.reachable(start, &self.down)
    }

    fn add(&mut self, kind: LinkKind, from: &str, to: &str) -> Result<(), KbError> {
        if from == to || self.ancestors(to).iter().any(|(n, _)| n == from) {
            return Err(KbError::Cycle {
                kind,
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        self.up.entry(from.to_string()).or_default().insert(to.to_string());
        self.down.entry(to.to_string()).or_default().insert(from.to_string());
        Ok(())
    }
}

/// Ontology plus assertions. Single writer while loading; read-only and
/// shareable across threads afterwards.
#[derive(Debug, Clone, Default)]
pub struct Kb {
    collections: BTreeMap<String, Collection>,
    predicates: BTreeMap<String, Predicate>,
    genls: Hierarchy,
    genl_preds: Hierarchy,
    disjoint: BTreeSet<(String, String)>,
    following: BTreeSet<(String, String)>,
    assertions: Vec<Assertion>,
    by_subject: HashMap<String, Vec<usize>>,
    entities: HashSet<String>,
}

impl Kb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_collection(&mut self, name: &str) {
        self.collections
            .entry(name.to_string())
            .or_insert_with(|| Collection {
                name: name.to_string(),
                markers: BTreeSet::new(),
            });
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize, time_dependent: bool) -> Result<(), KbError> {
        match self.predicates.get_mut(name) {
            Some(p) if p.arity != arity => Err(KbError::ArityMismatch {
                predicate: name.to_string(),
                expected: p.arity,
                found: arity,
            }),
            Some(p) => {
                p.time_dependent |= time_dependent;
                Ok(())
            }
            None => {
                self.predicates.insert(
                    name.to_string(),
                    Predicate {
                        name: name.to_string(),
                        arity,
                        time_dependent,
                    },
                );
                Ok(())
            }
        }
    }

    pub fn add_marker(&mut self, collection: &str, marker: Marker) -> Result<(), KbError> {
        self.declare_collection(collection);
        let c = self.collections.get_mut(collection).expect("declared above");
        let clash = match marker {
            Marker::Initial => c.markers.contains(&Marker::Terminal),
            Marker::Terminal => c.markers.contains(&Marker::Initial),
            _ => false,
        };
        if clash {
            return Err(KbError::ConflictingMarkers(collection.to_string()));
        }
        c.markers.insert(marker);
        Ok(())
    }

    pub fn add_link(&mut self, link: OntologyLink) -> Result<(), KbError> {
        let OntologyLink { kind, from, to } = link;
        match kind {
            LinkKind::Genls => {
                self.declare_collection(&from);
                self.declare_collection(&to);
                self.genls.add(kind, &from, &to)
            }
            LinkKind::GenlPreds => {
                for p in [&from, &to] {
                    if !self.predicates.contains_key(p.as_str()) {
                        return Err(KbError::UnknownSymbol(p.clone()));
                    }
                }
                self.genl_preds.add(kind, &from, &to)
            }
            LinkKind::DisjointWith => {
                self.declare_collection(&from);
                self.declare_collection(&to);
                let pair = if from <= to { (from, to) } else { (to, from) };
                self.disjoint.insert(pair);
                Ok(())
            }
            LinkKind::FollowingStageTypes => {
                self.declare_collection(&from);
                self.declare_collection(&to);
                self.following.insert((from, to));
                Ok(())
            }
        }
    }

    /// Stores an assertion, auto-declaring its collection or predicate.
    pub fn add_assertion(
        &mut self,
        fluent: Fluent,
        microtheory: &str,
        time: TimeInterval,
    ) -> Result<AssertionId, KbError> {
        if !fluent.is_ground() {
            return Err(KbError::NotGround(fluent.to_string()));
        }
        match &fluent {
            Fluent::Isa { collection, .. } => self.declare_collection(collection),
            Fluent::Rel { predicate, args } => {
                if args.is_empty() {
                    return Err(KbError::Malformed(fluent.to_string()));
                }
                self.declare_predicate(predicate, args.len(), false)?
            }
        }
        if let Fluent::Rel { args, .. } = &fluent {
            self.entities.extend(args.iter().cloned());
        }
        self.entities.insert(fluent.subject().to_string());
        let id = AssertionId(self.assertions.len());
        self.by_subject
            .entry(fluent.subject().to_string())
            .or_default()
            .push(self.assertions.len());
        self.assertions.push(Assertion {
            id,
            fluent,
            microtheory: microtheory.to_string(),
            time,
        });
        Ok(id)
    }

    pub fn collection(&self, name: &str) -> Option<&Collection> {
        self.collections.get(name)
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.get(name)
    }

    pub fn has_marker(&self, collection: &str, marker: Marker) -> bool {
        self.collections
            .get(collection)
            .is_some_and(|c| c.markers.contains(&marker))
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    /// Records an entity mentioned outside an assertion, such as in a rule.
    pub fn declare_entity(&mut self, entity: &str) {
        self.entities.insert(entity.to_string());
    }

    pub fn is_known_entity(&self, entity: &str) -> bool {
        self.entities.contains(entity)
    }

    /// Assertions whose subject is `entity`, in insertion order.
    pub fn assertions_about<'a>(&'a self, entity: &str) -> impl Iterator<Item = &'a Assertion> + 'a {
        self.by_subject
            .get(entity)
            .into_iter()
            .flatten()
            .map(move |&i| &self.assertions[i])
    }

    /// Assertions of exactly `fluent`.
    pub fn assertions_of<'a>(&'a self, fluent: &'a Fluent) -> impl Iterator<Item = &'a Assertion> + 'a {
        self.assertions_about(fluent.subject())
            .filter(move |a| &a.fluent == fluent)
    }

    /// Reflexive-transitive closure of `genls` above `c`.
    pub fn genls_closure(&self, c: &str) -> Result<BTreeSet<String>, KbError> {
        if !self.collections.contains_key(c) {
            return Err(KbError::UnknownSymbol(c.to_string()));
        }
        Ok(self.genls.ancestors(c).into_iter().map(|(n, _)| n).collect())
    }

    /// Generalizations of `c` (itself first) with their `genls` distance.
    pub fn genls_by_distance(&self, c: &str) -> Vec<(String, usize)> {
        self.genls.ancestors(c)
    }

    pub fn genl_preds_closure(&self, p: &str) -> Result<BTreeSet<String>, KbError> {
        if !self.predicates.contains_key(p) {
            return Err(KbError::UnknownSymbol(p.to_string()));
        }
        Ok(self.genl_preds.ancestors(p).into_iter().map(|(n, _)| n).collect())
    }

    pub fn genl_preds_by_distance(&self, p: &str) -> Vec<(String, usize)> {
        self.genl_preds.ancestors(p)
    }

    /// True iff a stored assertion at least as specific as `f` has an
    /// interval subsuming `at`.
    pub fn holds_known(&self, f: &Fluent, at: &TimeInterval) -> bool {
        self.supporting_assertions(f).any(|a| a.time.subsumes(at))
    }

    /// Assertions that entail `f` over their interval: same subject, with the
    /// stored collection (predicate) a specialization of the queried one.
    pub fn supporting_assertions<'a>(&'a self, f: &'a Fluent) -> impl Iterator<Item = &'a Assertion> + 'a {
        let specializations: BTreeSet<String> = match f {
            Fluent::Isa { collection, .. } => self.genls.descendants(collection),
            Fluent::Rel { predicate, .. } => self.genl_preds.descendants(predicate),
        }
        .into_iter()
        .map(|(n, _)| n)
        .collect();
        self.assertions_about(f.subject())
            .filter(move |a| match (&a.fluent, f) {
                (
                    Fluent::Isa { collection: stored, .. },
                    Fluent::Isa { .. },
                ) => specializations.contains(stored),
                (
                    Fluent::Rel { predicate: stored, args: stored_args },
                    Fluent::Rel { args, .. },
                ) => stored_args == args && specializations.contains(stored),
                _ => false,
            })
    }

    /// Whether two `isa` fluents about the same entity cannot hold together:
    /// their collections or any of their generalizations are disjoint or
    /// ordered stages.
    pub fn incompatible(&self, p: &Fluent, q: &Fluent) -> bool {
        let (
            Fluent::Isa { entity: e1, collection: c1 },
            Fluent::Isa { entity: e2, collection: c2 },
        ) = (p, q)
        else {
            return false;
        };
        if e1 != e2 || c1 == c2 {
            return false;
        }
        let up1 = self.genls.ancestors(c1);
        let up2 = self.genls.ancestors(c2);
        up1.iter().any(|(a, _)| {
            up2.iter().any(|(b, _)| {
                let pair = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                self.disjoint.contains(&pair)
                    || self.following.contains(&(a.clone(), b.clone()))
                    || self.following.contains(&(b.clone(), a.clone()))
            })
        })
    }

    /// Whether stage `earlier` (or a generalization) precedes stage `later`.
    pub fn precedes_stage(&self, earlier: &str, later: &str) -> bool {
        let up1 = self.genls.ancestors(earlier);
        let up2 = self.genls.ancestors(later);
        up1.iter()
            .any(|(a, _)| up2.iter().any(|(b, _)| self.following.contains(&(a.clone(), b.clone()))))
    }

    /// Hull of the entity's lifespan assertions, if any.
    pub fn existence(&self, entity: &str) -> Option<TimeInterval> {
        self.assertions_about(entity)
            .filter(|a| a.fluent.collection() == Some(EXISTENCE_COLLECTION))
            .map(|a| a.time)
            .reduce(|acc, t| acc.hull(&t))
    }

    /// Whether every symbol in `f` is known to the store.
    pub fn knows_fluent_symbols(&self, f: &Fluent) -> Result<(), KbError> {
        match f {
            Fluent::Isa { collection, .. } => {
                if !self.collections.contains_key(collection) {
                    return Err(KbError::UnknownSymbol(collection.clone()));
                }
            }
            Fluent::Rel { predicate, args } => match self.predicates.get(predicate) {
                None => return Err(KbError::UnknownSymbol(predicate.clone())),
                Some(p) if p.arity != args.len() => {
                    return Err(KbError::ArityMismatch {
                        predicate: predicate.clone(),
                        expected: p.arity,
                        found: args.len(),
                    })
                }
                Some(_) => {}
            },
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn years(a: i32, b: i32) -> TimeInterval {
        TimeInterval::year(a).unwrap().hull(&TimeInterval::year(b).unwrap())
    }

    #[test]
    fn genls_two_cycle_is_rejected() {
        let mut kb = Kb::new();
        kb.add_link(OntologyLink::new(LinkKind::Genls, "Cat", "Mammal")).unwrap();
        let err = kb.add_link(OntologyLink::new(LinkKind::Genls, "Mammal", "Cat")).unwrap_err();
        assert!(matches!(err, KbError::Cycle { .. }));
    }

    #[test]
    fn stores_tony_greig_and_einstein() {
        let mut kb = Kb::new();
        let id = kb
            .add_assertion(Fluent::isa("TonyGreig", "Cricketer"), "PeopleDataMt", years(1972, 1977))
            .unwrap();
        assert_eq!(kb.assertions()[id.0].microtheory, "PeopleDataMt");
        kb.declare_predicate("owns", 2, true).unwrap();
        kb.add_assertion(Fluent::rel("owns", ["Einstein", "Car780"]), "PeopleDataMt", years(1950, 1950))
            .unwrap();
        let err = kb
            .add_assertion(Fluent::rel("owns", ["Einstein"]), "PeopleDataMt", years(1950, 1950))
            .unwrap_err();
        assert!(matches!(err, KbError::ArityMismatch { expected: 2, found: 1, .. }));
    }

    #[test]
    fn genls_closure_examples() {
        let mut kb = Kb::new();
        kb.add_link(OntologyLink::new(LinkKind::Genls, "Cat", "Mammal")).unwrap();
        kb.add_link(OntologyLink::new(LinkKind::Genls, "Mammal", "Animal")).unwrap();
        kb.declare_collection("X");
        for (a, b) in [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")] {
            kb.add_link(OntologyLink::new(LinkKind::Genls, a, b)).unwrap();
        }
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(kb.genls_closure("Cat").unwrap(), set(&["Cat", "Mammal", "Animal"]));
        assert_eq!(kb.genls_closure("X").unwrap(), set(&["X"]));
        assert_eq!(kb.genls_closure("A").unwrap(), set(&["A", "B", "C", "D"]));
        assert!(kb.genls_closure("Nope").is_err());
    }

    #[test]
    fn genl_preds_closure_examples() {
        let mut kb = Kb::new();
        for p in ["owns", "possesses", "controls", "alone"] {
            kb.declare_predicate(p, 2, true).unwrap();
        }
        kb.add_link(OntologyLink::new(LinkKind::GenlPreds, "owns", "possesses")).unwrap();
        kb.add_link(OntologyLink::new(LinkKind::GenlPreds, "possesses", "controls")).unwrap();
        assert_eq!(kb.genl_preds_closure("alone").unwrap().len(), 1);
        assert_eq!(kb.genl_preds_closure("possesses").unwrap().len(), 2);
        assert_eq!(kb.genl_preds_closure("owns").unwrap().len(), 3);
    }

    #[test]
    fn holds_known_examples() {
        let mut kb = Kb::new();
        kb.add_assertion(Fluent::isa("McCarthy", "Professor"), "PeopleDataMt", years(1998, 1998))
            .unwrap();
        assert!(kb.holds_known(&Fluent::isa("McCarthy", "Professor"), &years(1998, 1998)));
        assert!(!kb.holds_known(&Fluent::isa("McCarthy", "Professor"), &years(2000, 2000)));

        kb.add_link(OntologyLink::new(LinkKind::Genls, "Cat", "Mammal")).unwrap();
        kb.add_assertion(Fluent::isa("Tom", "Cat"), "PeopleDataMt", years(1990, 1995)).unwrap();
        assert!(kb.holds_known(&Fluent::isa("Tom", "Mammal"), &years(1991, 1991)));
        assert!(!kb.holds_known(&Fluent::isa("Tom", "Cat"), &years(1989, 1991)));
    }

    #[test]
    fn holds_known_through_genl_preds() {
        let mut kb = Kb::new();
        kb.declare_predicate("owns", 2, true).unwrap();
        kb.declare_predicate("possesses", 2, true).unwrap();
        kb.add_link(OntologyLink::new(LinkKind::GenlPreds, "owns", "possesses")).unwrap();
        kb.add_assertion(Fluent::rel("owns", ["Ann", "Car1"]), "M", years(1990, 1992)).unwrap();
        assert!(kb.holds_known(&Fluent::rel("possesses", ["Ann", "Car1"]), &years(1991, 1991)));
        assert!(!kb.holds_known(&Fluent::rel("possesses", ["Ann", "Car2"]), &years(1991, 1991)));
    }

    #[test]
    fn incompatibility_examples() {
        let mut kb = Kb::new();
        kb.add_link(OntologyLink::new(LinkKind::DisjointWith, "HumanInfant", "Professor")).unwrap();
        kb.add_link(OntologyLink::new(LinkKind::FollowingStageTypes, "Professor", "RetiredPerson"))
            .unwrap();
        kb.add_link(OntologyLink::new(LinkKind::Genls, "EmeritusProfessor", "RetiredPerson"))
            .unwrap();
        let x = |c: &str| Fluent::isa("X", c);
        assert!(kb.incompatible(&x("HumanInfant"), &x("Professor")));
        assert!(kb.incompatible(&x("Professor"), &x("HumanInfant")));
        assert!(kb.incompatible(&x("Professor"), &x("RetiredPerson")));
        assert!(kb.incompatible(&x("EmeritusProfessor"), &x("Professor")));
        assert!(!kb.incompatible(&Fluent::isa("X", "Cat"), &Fluent::isa("Y", "Dog")));
        assert!(!kb.incompatible(&x("Professor"), &x("Professor")));
        assert!(kb.precedes_stage("Professor", "EmeritusProfessor"));
        assert!(!kb.precedes_stage("EmeritusProfessor", "Professor"));
    }

    #[test]
    fn conflicting_markers() {
        let mut kb = Kb::new();
        kb.add_marker("Graduate", Marker::Terminal).unwrap();
        assert!(kb.add_marker("Graduate", Marker::Initial).is_err());
        assert!(kb.add_marker("Graduate", Marker::TimeDependent).is_ok());
    }

    #[test]
    fn fluent_parse_and_display() {
        let e = crate::sexpr::parse_one("(isa Fred (FrequentPerformerFn Smoking))").unwrap();
        let f = Fluent::from_sexpr(&e).unwrap();
        assert_eq!(f.collection(), Some("(FrequentPerformerFn Smoking)"));
        assert_eq!(f.to_string(), "(isa Fred (FrequentPerformerFn Smoking))");
        let e = crate::sexpr::parse_one("(rel owns ?x Car1)").unwrap();
        assert!(matches!(Fluent::from_sexpr(&e), Err(KbError::NotGround(_))));
    }
}
