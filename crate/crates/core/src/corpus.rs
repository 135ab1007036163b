//! Loading KB, event, hazard and query files into an immutable [`Corpus`].
//!
//! Every file is a sequence of S-expression statements with `;` comments.
//! Statements of any kind may appear in any file; the `--kb`, `--events`
//! and `--hazards` split is a convention.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::events::{EffectKind, EffectRule, EffectScope, Event, EventStore, FluentTemplate, RiskPeriodRule};
use crate::hazard::{FixedDurationRule, FluentPattern, HazardRegistry, HazardSpec};
use crate::kb::{Fluent, Kb, LinkKind, Marker, OntologyLink};
use crate::projector::Mode;
use crate::sexpr::{parse_forms, parse_one, split_keywords, Sexpr};
use crate::time::{parse_duration_days, TimeInterval, TimePoint};

pub const DEFAULT_MICROTHEORY: &str = "BaseKB";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{source_name}:{line}: {message}")]
pub struct LoadError {
    pub source_name: String,
    pub line: usize,
    pub message: String,
}

/// KB, events and hazards loaded together.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub kb: Kb,
    pub events: EventStore,
    pub hazards: HazardRegistry,
}

/// Parses a time form: a date (`1988-07-01`), a bare year (`1990`),
/// `(year 1990)` or `(interval A B)` whose endpoints are any of these.
pub fn parse_time_form(e: &Sexpr) -> Result<TimeInterval, String> {
    match e {
        Sexpr::Atom(a) => {
            if let Ok(year) = a.parse::<i32>() {
                return TimeInterval::year(year).map_err(|err| err.to_string());
            }
            a.parse::<TimePoint>()
                .map(TimeInterval::point)
                .map_err(|err| err.to_string())
        }
        Sexpr::List(items) => match (e.head(), items.len()) {
            (Some("year"), 2) => {
                let year: i32 = items[1]
                    .as_atom()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| format!("bad year in {e}"))?;
                TimeInterval::year(year).map_err(|err| err.to_string())
            }
            (Some("interval"), 3) => {
                let a = parse_time_form(&items[1])?;
                let b = parse_time_form(&items[2])?;
                TimeInterval::new(a.start(), b.end()).map_err(|err| err.to_string())
            }
            _ => Err(format!("unrecognized time form {e}")),
        },
    }
}

pub fn parse_time_text(text: &str) -> Result<TimeInterval, String> {
    let e = parse_one(text).map_err(|err| err.message)?;
    parse_time_form(&e)
}

pub fn parse_fluent_text(text: &str) -> Result<Fluent, String> {
    let e = parse_one(text).map_err(|err| err.message)?;
    Fluent::from_sexpr(&e).map_err(|err| err.to_string())
}

fn atom<'a>(e: &'a Sexpr, what: &str) -> Result<&'a str, String> {
    e.as_atom().ok_or_else(|| format!("expected {what}, found {e}"))
}

fn keyword<'a>(keywords: &[(&str, &'a Sexpr)], key: &str) -> Option<&'a Sexpr> {
    keywords.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), LoadError> {
        let text = std::fs::read_to_string(path).map_err(|err| LoadError {
            source_name: path.display().to_string(),
            line: 0,
            message: err.to_string(),
        })?;
        self.load_str(&text, &path.display().to_string())
    }

    pub fn load_str(&mut self, text: &str, source_name: &str) -> Result<(), LoadError> {
        let forms = parse_forms(text).map_err(|err| LoadError {
            source_name: source_name.to_string(),
            line: err.line,
            message: err.message,
        })?;
        for form in forms {
            self.statement(&form.expr).map_err(|message| LoadError {
                source_name: source_name.to_string(),
                line: form.line,
                message,
            })?;
        }
        Ok(())
    }

    /// Cross-statement checks, run once all files are loaded.
    pub fn finish(&self) -> Result<(), LoadError> {
        self.events.validate().map_err(|err| LoadError {
            source_name: "<corpus>".into(),
            line: 0,
            message: err.to_string(),
        })
    }

    /// Loads and validates a set of files.
    pub fn from_files<P: AsRef<Path>>(paths: &[P]) -> Result<Corpus, LoadError> {
        let mut c = Corpus::new();
        for p in paths {
            c.load_file(p.as_ref())?;
        }
        c.finish()?;
        Ok(c)
    }

    pub fn from_texts(texts: &[(&str, &str)]) -> Result<Corpus, LoadError> {
        let mut c = Corpus::new();
        for (name, text) in texts {
            c.load_str(text, name)?;
        }
        c.finish()?;
        Ok(c)
    }

    /// Whether the collection/predicate and every entity of `f` are known.
    pub fn check_symbols(&self, f: &Fluent) -> Result<(), String> {
        self.kb.knows_fluent_symbols(f).map_err(|e| e.to_string())?;
        let entities: Vec<&String> = match f {
            Fluent::Isa { entity, .. } => vec![entity],
            Fluent::Rel { args, .. } => args.iter().collect(),
        };
        for e in entities {
            if !self.kb.is_known_entity(e) && !self.events.involves(e) {
                return Err(format!("unknown symbol {e}"));
            }
        }
        Ok(())
    }

    fn statement(&mut self, e: &Sexpr) -> Result<(), String> {
        let items = e.as_list().ok_or_else(|| format!("expected a statement, found {e}"))?;
        let head = e.head().ok_or_else(|| format!("statement without a head symbol: {e}"))?;
        let args = &items[1..];
        let link = |kind| -> Result<OntologyLink, String> {
            match args {
                [a, b] => Ok(OntologyLink::new(kind, a.to_string(), b.to_string())),
                _ => Err(format!("({head} A B) takes two arguments")),
            }
        };
        match head {
            "genls" => self.kb.add_link(link(LinkKind::Genls)?).map_err(|e| e.to_string()),
            "genlPreds" => self.kb.add_link(link(LinkKind::GenlPreds)?).map_err(|e| e.to_string()),
            "disjointWith" => self.kb.add_link(link(LinkKind::DisjointWith)?).map_err(|e| e.to_string()),
            "followingStageTypes" => self
                .kb
                .add_link(link(LinkKind::FollowingStageTypes)?)
                .map_err(|e| e.to_string()),
            "collection" => {
                for a in args {
                    self.kb.declare_collection(&a.to_string());
                }
                Ok(())
            }
            "marker" => match args {
                [c, m] => {
                    let marker = Marker::parse(atom(m, "marker")?)
                        .ok_or_else(|| format!("unknown marker {m}"))?;
                    self.kb.add_marker(&c.to_string(), marker).map_err(|e| e.to_string())
                }
                _ => Err("(marker C Initial|Terminal|Bidirectional|TimeDependent)".into()),
            },
            "predicate" => {
                let (name, arity, flag) = match args {
                    [n, a] => (n, a, None),
                    [n, a, f] => (n, a, Some(atom(f, "flag")?)),
                    _ => return Err("(predicate name arity [time-dependent])".into()),
                };
                let arity: usize = atom(arity, "arity")?
                    .parse()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| format!("bad arity {arity}"))?;
                let td = match flag {
                    None => false,
                    Some("time-dependent") => true,
                    Some(other) => return Err(format!("unknown predicate flag {other}")),
                };
                self.kb
                    .declare_predicate(atom(name, "predicate name")?, arity, td)
                    .map_err(|e| e.to_string())
            }
            "assert" => {
                let (positional, keywords) = split_keywords(args)?;
                let [fluent] = positional.as_slice() else {
                    return Err("(assert :mt M :time T fluent) takes one fluent".into());
                };
                let fluent = Fluent::from_sexpr(fluent).map_err(|e| e.to_string())?;
                let mt = match keyword(&keywords, "mt") {
                    Some(m) => m.to_string(),
                    None => DEFAULT_MICROTHEORY.to_string(),
                };
                let time = match keyword(&keywords, "time") {
                    Some(t) => parse_time_form(t)?,
                    None => TimeInterval::ALWAYS,
                };
                self.kb.add_assertion(fluent, &mt, time).map(|_| ()).map_err(|e| e.to_string())
            }
            "event" => {
                let (positional, keywords) = split_keywords(args)?;
                if !positional.is_empty() {
                    return Err("event takes only keyword arguments".into());
                }
                let id = atom(keyword(&keywords, "id").ok_or("event is missing :id")?, "event id")?;
                let ty = keyword(&keywords, "type").ok_or("event is missing :type")?.to_string();
                let time = atom(keyword(&keywords, "time").ok_or("event is missing :time")?, "date")?
                    .parse::<TimePoint>()
                    .map_err(|e| e.to_string())?;
                let mut roles = Vec::new();
                if let Some(r) = keyword(&keywords, "roles") {
                    for pair in r.as_list().ok_or("bad :roles")? {
                        match pair.as_list() {
                            Some([role, who]) => roles.push((atom(role, "role")?, atom(who, "entity")?)),
                            _ => return Err(format!("bad role binding {pair}")),
                        }
                    }
                }
                self.events
                    .add_event(Event::new(id, ty, time, roles))
                    .map_err(|e| e.to_string())
            }
            "risk-rule" => match args {
                [t, r, s] => {
                    self.events.add_risk_rule(RiskPeriodRule {
                        event_type: t.to_string(),
                        role: atom(r, "role")?.to_string(),
                        state: s.to_string(),
                    });
                    Ok(())
                }
                _ => Err("(risk-rule EventType role State)".into()),
            },
            "initiates-rule" | "terminates-rule" => match args {
                [t, r, template] => {
                    self.events.add_effect(EffectRule {
                        kind: if head == "initiates-rule" {
                            EffectKind::Initiates
                        } else {
                            EffectKind::Terminates
                        },
                        scope: EffectScope::Type {
                            event_type: t.to_string(),
                            role: atom(r, "role")?.to_string(),
                            template: {
                                let template = FluentTemplate::from_sexpr(template).map_err(|e| e.to_string())?;
                                declare_template(&mut self.kb, &template)?;
                                template
                            },
                        },
                    });
                    Ok(())
                }
                _ => Err(format!("({head} EventType role template)")),
            },
            "initiates" | "terminates" => match args {
                [id, fluent] => {
                    self.events.add_effect(EffectRule {
                        kind: if head == "initiates" {
                            EffectKind::Initiates
                        } else {
                            EffectKind::Terminates
                        },
                        scope: EffectScope::Instance {
                            event_id: atom(id, "event id")?.to_string(),
                            fluent: {
                                let fluent = Fluent::from_sexpr(fluent).map_err(|e| e.to_string())?;
                                declare_fluent(&mut self.kb, &fluent)?;
                                fluent
                            },
                        },
                    });
                    Ok(())
                }
                _ => Err(format!("({head} EventId fluent)")),
            },
            "hazard" => {
                let spec = HazardSpec::from_sexpr(e).map_err(|e| e.to_string())?;
                match &spec.pattern {
                    FluentPattern::Collection(c) => self.kb.declare_collection(c),
                    FluentPattern::Argument { collection, .. } => self.kb.declare_collection(collection),
                    FluentPattern::Predicate(_) => {}
                }
                self.hazards.insert(spec).map_err(|e| e.to_string())
            }
            "persists-for" => match args {
                [fluent, start, duration] => {
                    let fluent = Fluent::from_sexpr(fluent).map_err(|e| e.to_string())?;
                    declare_fluent(&mut self.kb, &fluent)?;
                    let start = atom(start, "date")?.parse::<TimePoint>().map_err(|e| e.to_string())?;
                    let days = parse_duration_days(atom(duration, "duration")?).map_err(|e| e.to_string())?;
                    let rule = FixedDurationRule::new(fluent, start, days).map_err(|e| e.to_string())?;
                    self.hazards.add_fixed_duration(rule);
                    Ok(())
                }
                _ => Err("(persists-for fluent date duration)".into()),
            },
            other => Err(format!("unknown statement `{other}`")),
        }
    }
}

/// One line of a query file.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub id: String,
    pub set: String,
    pub mode: Mode,
    pub alpha: Option<f64>,
    pub time: TimeInterval,
    pub fluent: Fluent,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(query :id {} :set {} :mode {}", self.id, self.set, self.mode)?;
        if let Some(a) = self.alpha {
            write!(f, " :alpha {a}")?;
        }
        let time = if self.time.start() == self.time.end() {
            self.time.start().to_string()
        } else {
            self.time.to_string()
        };
        write!(f, " :time {} {})", time, self.fluent)
    }
}

/// Parses `(query [:id I] [:set S] [:mode m1|m2] [:alpha a] :time T fluent)`.
pub fn parse_queries(text: &str, source_name: &str) -> Result<Vec<Query>, LoadError> {
    let forms = parse_forms(text).map_err(|err| LoadError {
        source_name: source_name.to_string(),
        line: err.line,
        message: err.message,
    })?;
    forms
        .iter()
        .enumerate()
        .map(|(i, form)| {
            parse_query(&form.expr, i).map_err(|message| LoadError {
                source_name: source_name.to_string(),
                line: form.line,
                message,
            })
        })
        .collect()
}

fn parse_query(e: &Sexpr, index: usize) -> Result<Query, String> {
    if e.head() != Some("query") {
        return Err(format!("expected (query ...), found {e}"));
    }
    let (positional, keywords) = split_keywords(&e.as_list().expect("has head")[1..])?;
    let [fluent] = positional.as_slice() else {
        return Err("query takes exactly one fluent".into());
    };
    let mode = match keyword(&keywords, "mode") {
        Some(m) => atom(m, "mode")?.parse::<Mode>()?,
        None => Mode::M2,
    };
    let alpha = keyword(&keywords, "alpha")
        .map(|a| atom(a, "alpha")?.parse::<f64>().map_err(|e| e.to_string()))
        .transpose()?;
    Ok(Query {
        id: match keyword(&keywords, "id") {
            Some(v) => atom(v, "id")?.to_string(),
            None => format!("q{}", index + 1),
        },
        set: match keyword(&keywords, "set") {
            Some(v) => v.to_string(),
            None => "default".to_string(),
        },
        mode,
        alpha,
        time: parse_time_form(keyword(&keywords, "time").ok_or("query is missing :time")?)?,
        fluent: Fluent::from_sexpr(fluent).map_err(|e| e.to_string())?,
    })
}

fn declare_fluent(kb: &mut Kb, f: &Fluent) -> Result<(), String> {
    match f {
        Fluent::Isa { entity, collection } => {
            kb.declare_entity(entity);
            kb.declare_collection(collection);
            Ok(())
        }
        Fluent::Rel { predicate, args } => {
            args.iter().for_each(|a| kb.declare_entity(a));
            kb.declare_predicate(predicate, args.len(), false)
                .map_err(|e| e.to_string())
        }
    }
}

fn declare_template(kb: &mut Kb, t: &FluentTemplate) -> Result<(), String> {
    match t {
        FluentTemplate::Isa(c) => {
            kb.declare_collection(c);
            Ok(())
        }
        FluentTemplate::Rel { predicate, args } => kb
            .declare_predicate(predicate, args.len(), false)
            .map_err(|e| e.to_string()),
    }
}
