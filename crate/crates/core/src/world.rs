//! Seeded synthetic worlds with known ground truth.
//!
//! Each individual gets a birth date, a lifespan drawn from an age-indexed
//! mortality table, and life histories in five themes (cricket career,
//! marriages, professorship and retirement, car ownership, graduation).
//! Durations are drawn from the same hazard specs that are written to the
//! hazard file. Only a random subset of the truth is exposed: each calendar
//! year of a true interval becomes an assertion with probability
//! `observation_density`, and each initiating or terminating event is
//! emitted with probability `event_density`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Query;
use crate::events::Event;
use crate::hazard::{hazard_at, Baseline, Covariate, FluentPattern, HazardSpec};
use crate::kb::{Fluent, EXISTENCE_COLLECTION};
use crate::projector::Mode;
use crate::time::{TimeInterval, TimePoint};

pub const YEAR: i64 = 365;

/// File names written by [`World::write_dir`].
pub const KB_FILE: &str = "world.kb";
pub const EVENTS_FILE: &str = "world.events";
pub const HAZARDS_FILE: &str = "world.hazards";
pub const QUERIES_FILE: &str = "queries.txt";
pub const ANSWERS_FILE: &str = "answers.csv";
pub const TRUTH_FILE: &str = "truth.csv";

pub const QUERY_SETS: [&str; 5] = ["cricketer", "married", "professor", "owns", "graduate"];

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("{0} must lie in (0, 1]")]
    Density(&'static str),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub seed: u64,
    pub n_individuals: usize,
    /// Probability that each calendar-year chunk of a true interval is
    /// exposed as an assertion.
    pub observation_density: f64,
    /// Probability that each initiating or terminating event is exposed.
    pub event_density: f64,
    pub queries_per_set: usize,
    pub positive_fraction: f64,
    /// Age by which virtually every cricketer has retired.
    pub retirement_age: u32,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            seed: 42,
            n_individuals: 1000,
            observation_density: 0.3,
            event_density: 0.5,
            queries_per_set: 200,
            positive_fraction: 0.5,
            retirement_age: 45,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), WorldError> {
        let ok = |d: f64| d > 0.0 && d <= 1.0;
        if !ok(self.observation_density) {
            return Err(WorldError::Density("observation density"));
        }
        if !ok(self.event_density) {
            return Err(WorldError::Density("event density"));
        }
        if !(0.0..=1.0).contains(&self.positive_fraction) {
            return Err(WorldError::Density("positive fraction"));
        }
        Ok(())
    }
}

/// Rounds a hazard so the emitted text and the sampler agree exactly.
fn round6(h: f64) -> f64 {
    (h * 1e6).round() / 1e6
}

fn isa(c: &str) -> FluentPattern {
    FluentPattern::Collection(c.to_string())
}

/// Yearly mortality by age with a smoking covariate.
pub fn mortality_spec() -> HazardSpec {
    let table = (1..=120).map(|age| round6((1e-4 * (0.09 * age as f64).exp()).min(1.0))).collect();
    HazardSpec::new(
        isa(EXISTENCE_COLLECTION),
        YEAR,
        Baseline::Table(table),
        vec![Covariate {
            pattern: isa("Smoker"),
            beta: 0.3,
        }],
    )
    .expect("valid")
}

/// Age-indexed cricket retirement hazard: logistic in age, centred seven
/// years before `retirement_age` with a two-year scale.
pub fn cricketer_spec(retirement_age: u32) -> HazardSpec {
    let centre = retirement_age as f64 - 7.0;
    let table = (1..=100)
        .map(|age| round6(1.0 / (1.0 + (-(age as f64 - centre) / 2.0).exp())))
        .collect();
    HazardSpec::new(isa("Cricketer"), YEAR, Baseline::Table(table), Vec::new()).expect("valid")
}

pub fn married_spec() -> HazardSpec {
    HazardSpec::new(
        isa("Married"),
        YEAR,
        Baseline::Table(vec![0.05]),
        vec![Covariate {
            pattern: isa("Smoker"),
            beta: 0.5,
        }],
    )
    .expect("valid")
}

pub fn professor_spec() -> HazardSpec {
    HazardSpec::constant(isa("Professor"), YEAR, 0.06).expect("valid")
}

pub fn car_ownership_spec() -> HazardSpec {
    let pattern = FluentPattern::Argument {
        predicate: "owns".into(),
        position: 2,
        collection: "Automobile".into(),
    };
    HazardSpec::constant(pattern, YEAR, 0.15).expect("valid")
}

pub fn ownership_spec() -> HazardSpec {
    HazardSpec::constant(FluentPattern::Predicate("owns".into()), YEAR, 0.4).expect("valid")
}

/// Draws the period of the terminating event by inverting the cumulative
/// event-time pmf `h_k S(k-1)`, conditioned on survival through `after`
/// periods. `None` when no event happens by `horizon`.
pub fn sample_event_period<R: Rng>(spec: &HazardSpec, x: &[bool], after: u32, horizon: u32, rng: &mut R) -> Option<u32> {
    let u: f64 = rng.gen();
    let mut surv = 1.0;
    let mut cum = 0.0;
    for k in after + 1..=horizon {
        let h = hazard_at(spec, k, x).expect("covariate count matches");
        cum += h * surv;
        if u < cum {
            return Some(k);
        }
        surv *= 1.0 - h;
    }
    None
}

/// Time of the terminating event for a state entered at `origin` and known
/// to hold on `from`, drawn from `spec` with constant covariates `x`.
fn sample_end<R: Rng>(
    spec: &HazardSpec,
    x: &[bool],
    origin: TimePoint,
    from: TimePoint,
    horizon: u32,
    rng: &mut R,
) -> Option<TimePoint> {
    let scheme = spec.scheme(origin);
    let after = if from <= origin {
        0
    } else {
        scheme.period_index(from).expect("after origin") - 1
    };
    let k = sample_event_period(spec, x, after, horizon, rng)?;
    let span = scheme.period_span(k).expect("k >= 1");
    let lo = span.start().max(from.plus_days(1));
    if lo > span.end() {
        return Some(from.plus_days(1));
    }
    Some(TimePoint::from_day_number(
        rng.gen_range(lo.day_number()..=span.end().day_number()),
    ))
}

fn day_in<R: Rng>(iv: &TimeInterval, rng: &mut R) -> TimePoint {
    TimePoint::from_day_number(rng.gen_range(iv.start().day_number()..=iv.end().day_number()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TruthRow {
    pub set: &'static str,
    pub fluent: Fluent,
    pub interval: TimeInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub config: WorldConfig,
    pub kb_text: String,
    pub events_text: String,
    pub hazards_text: String,
    pub queries: Vec<Query>,
    /// Query id to ground-truth verdict.
    pub answers: Vec<(String, bool)>,
    pub truth: Vec<TruthRow>,
    /// Existence interval per individual.
    pub lifespans: BTreeMap<String, TimeInterval>,
}

struct Builder<'c> {
    cfg: &'c WorldConfig,
    rng: ChaCha8Rng,
    kb: String,
    events: String,
    truth: Vec<TruthRow>,
    lifespans: BTreeMap<String, TimeInterval>,
    next_event: usize,
    next_car: usize,
}

impl Builder<'_> {
    fn assert(&mut self, mt: &str, time: &TimeInterval, f: &Fluent) {
        let t = if time.start() == time.end() {
            time.start().to_string()
        } else {
            time.to_string()
        };
        writeln!(self.kb, "(assert :mt {mt} :time {t} {f})").expect("string write");
    }

    /// Emits `(event ...)` with probability `density`; returns its id.
    fn event(&mut self, ty: &str, time: TimePoint, roles: &[(&str, &str)], always: bool) -> Option<String> {
        if !always && !self.rng.gen_bool(self.cfg.event_density) {
            return None;
        }
        self.next_event += 1;
        let id = format!("E{:06}", self.next_event);
        let e = Event::new(id.clone(), ty, time, roles.iter().copied());
        writeln!(self.events, "{e}").expect("string write");
        Some(id)
    }

    /// Records a true interval and exposes its calendar-year chunks.
    fn truth(&mut self, set: &'static str, fluent: Fluent, interval: TimeInterval) {
        for year in interval.start().year()..=interval.end().year() {
            let chunk = TimeInterval::year(year)
                .expect("valid year")
                .intersect(&interval)
                .expect("year overlaps interval");
            if self.rng.gen_bool(self.cfg.observation_density) {
                self.assert("ObservationMt", &chunk, &fluent);
            }
        }
        self.truth.push(TruthRow { set, fluent, interval });
    }

    fn at_age<R: Rng>(birth: TimePoint, lo: i64, hi: i64, rng: &mut R) -> TimePoint {
        birth.plus_days(rng.gen_range(lo..=hi) * YEAR + rng.gen_range(0..YEAR))
    }

    fn person(&mut self, idx: usize, specs: &Specs) {
        let p = format!("P{idx:04}");
        let first = TimePoint::from_ymd(1900, 1, 1).expect("valid").day_number();
        let last = TimePoint::from_ymd(1960, 12, 31).expect("valid").day_number();
        let birth = TimePoint::from_day_number(self.rng.gen_range(first..=last));
        let smoker = self.rng.gen_bool(0.3);
        let x = [smoker];
        let death = sample_end(&specs.mortality, &x, birth, birth, 120, &mut self.rng)
            .unwrap_or(birth.plus_days(120 * YEAR));
        let life = TimeInterval::new(birth, death).expect("death after birth");
        self.lifespans.insert(p.clone(), life);

        self.assert("PeopleDataMt", &life, &Fluent::isa(&p, EXISTENCE_COLLECTION));
        self.assert(
            "PeopleDataMt",
            &TimeInterval::new(birth, birth.plus_days(YEAR - 1)).expect("ordered"),
            &Fluent::isa(&p, "HumanInfant"),
        );
        if smoker {
            self.assert("PeopleDataMt", &life, &Fluent::isa(&p, "Smoker"));
        }
        self.event("BirthEvent", birth, &[("child", &p)], true);

        // Cricket career, with an age-indexed retirement hazard.
        if self.rng.gen_bool(0.3) {
            let debut = Self::at_age(birth, 18, 23, &mut self.rng);
            if debut < death {
                let retire = sample_end(&specs.cricketer, &[], birth, debut, 100, &mut self.rng);
                let end = retire.map_or(death, |r| r.min(death));
                self.event("CricketDebutEvent", debut, &[("player", &p)], false);
                if retire.is_some_and(|r| r < death) {
                    self.event("CricketRetirementEvent", end, &[("player", &p)], false);
                }
                self.truth("cricketer", Fluent::isa(&p, "Cricketer"), TimeInterval::new(debut, end).expect("ordered"));
            }
        }

        // Marriages: divorce hazard from the wedding, up to three marriages.
        if self.rng.gen_bool(0.7) {
            let mut wedding = Self::at_age(birth, 20, 35, &mut self.rng);
            for _ in 0..3 {
                if wedding >= death {
                    break;
                }
                let divorce = sample_end(&specs.married, &x, wedding, wedding, 120, &mut self.rng);
                self.event("WeddingEvent", wedding, &[("spouse", &p)], false);
                let end = match divorce {
                    Some(d) if d < death => {
                        self.event("DivorceEvent", d, &[("spouse", &p)], false);
                        d
                    }
                    _ => death,
                };
                self.truth("married", Fluent::isa(&p, "Married"), TimeInterval::new(wedding, end).expect("ordered"));
                if end == death || !self.rng.gen_bool(0.3) {
                    break;
                }
                wedding = end.plus_days(self.rng.gen_range(YEAR..=5 * YEAR));
            }
        }

        // Professorship ending in retirement, a terminal stage.
        if self.rng.gen_bool(0.25) {
            let hire = Self::at_age(birth, 28, 40, &mut self.rng);
            if hire < death {
                let retire = sample_end(&specs.professor, &[], hire, hire, 120, &mut self.rng);
                self.event("HiringEvent", hire, &[("employee", &p)], false);
                match retire {
                    Some(r) if r < death => {
                        self.event("RetirementEvent", r, &[("retiree", &p)], false);
                        self.truth("professor", Fluent::isa(&p, "Professor"), TimeInterval::new(hire, r).expect("ordered"));
                        self.truth(
                            "retired",
                            Fluent::isa(&p, "RetiredPerson"),
                            TimeInterval::new(r.plus_days(1).min(death), death).expect("ordered"),
                        );
                    }
                    _ => self.truth("professor", Fluent::isa(&p, "Professor"), TimeInterval::new(hire, death).expect("ordered")),
                }
            }
        }

        // A sequence of owned cars, one at a time.
        if self.rng.gen_bool(0.8) {
            let mut buy = Self::at_age(birth, 18, 30, &mut self.rng);
            while buy < death {
                self.next_car += 1;
                let car = format!("Car{:05}", self.next_car);
                self.assert("BaseKB", &TimeInterval::ALWAYS, &Fluent::isa(&car, "Automobile"));
                let owns = Fluent::rel("owns", [p.clone(), car.clone()]);
                let sell = sample_end(&specs.car, &[], buy, buy, 120, &mut self.rng);
                if let Some(id) = self.event("PurchaseEvent", buy, &[("buyer", &p), ("item", &car)], false) {
                    writeln!(self.events, "(initiates {id} {owns})").expect("string write");
                }
                let end = match sell {
                    Some(s) if s < death => {
                        if let Some(id) = self.event("SaleEvent", s, &[("seller", &p), ("item", &car)], false) {
                            writeln!(self.events, "(terminates {id} {owns})").expect("string write");
                        }
                        s
                    }
                    _ => death,
                };
                self.truth("owns", owns, TimeInterval::new(buy, end).expect("ordered"));
                if end == death {
                    break;
                }
                buy = end.plus_days(self.rng.gen_range(1..=2 * YEAR));
            }
        }

        // Graduation, after which one stays a graduate.
        if self.rng.gen_bool(0.4) {
            let grad = Self::at_age(birth, 21, 25, &mut self.rng);
            if grad < death {
                self.event("GraduationEvent", grad, &[("graduate", &p)], false);
                self.truth("graduate", Fluent::isa(&p, "Graduate"), TimeInterval::new(grad, death).expect("ordered"));
            }
        }
    }
}

struct Specs {
    mortality: HazardSpec,
    cricketer: HazardSpec,
    married: HazardSpec,
    professor: HazardSpec,
    car: HazardSpec,
    generic_owns: HazardSpec,
}

const ONTOLOGY: &str = "\
(genls Cricketer Athlete)
(genls Athlete Person)
(genls Professor Person)
(genls RetiredPerson Person)
(genls Graduate Person)
(genls Automobile Vehicle)
(predicate owns 2 time-dependent)
(marker Graduate Terminal)
(marker RetiredPerson Terminal)
(followingStageTypes Professor RetiredPerson)
(disjointWith HumanInfant Professor)
";

const EVENT_RULES: &str = "\
(genls CricketRetirementEvent RetirementEvent)
(risk-rule BirthEvent child Cricketer)
(initiates-rule CricketDebutEvent player Cricketer)
(terminates-rule CricketRetirementEvent player Cricketer)
(initiates-rule WeddingEvent spouse Married)
(terminates-rule DivorceEvent spouse Married)
(initiates-rule HiringEvent employee Professor)
(risk-rule HiringEvent employee Professor)
(terminates-rule RetirementEvent retiree Professor)
(initiates-rule RetirementEvent retiree RetiredPerson)
(initiates-rule GraduationEvent graduate Graduate)
";

/// Generates a world. Output depends only on `config`.
pub fn generate(config: &WorldConfig) -> Result<World, WorldError> {
    config.validate()?;
    let specs = Specs {
        mortality: mortality_spec(),
        cricketer: cricketer_spec(config.retirement_age),
        married: married_spec(),
        professor: professor_spec(),
        car: car_ownership_spec(),
        generic_owns: ownership_spec(),
    };
    let mut b = Builder {
        cfg: config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        kb: format!("; synthetic world, seed {}\n{ONTOLOGY}", config.seed),
        events: format!("; synthetic events, seed {}\n{EVENT_RULES}", config.seed),
        truth: Vec::new(),
        lifespans: BTreeMap::new(),
        next_event: 0,
        next_car: 0,
    };
    for i in 1..=config.n_individuals {
        b.person(i, &specs);
    }

    let mut hazards = format!("; hazards, seed {}\n", config.seed);
    for s in [
        &specs.mortality,
        &specs.cricketer,
        &specs.married,
        &specs.professor,
        &specs.car,
        &specs.generic_owns,
    ] {
        writeln!(hazards, "{s}").expect("string write");
    }

    // Query sampling uses its own stream so the world does not depend on
    // the query count.
    let mut qrng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5155_4552_5953);
    let (queries, answers) = sample_queries(&b.truth, &b.lifespans, config, &mut qrng);
    Ok(World {
        config: config.clone(),
        kb_text: b.kb,
        events_text: b.events,
        hazards_text: hazards,
        queries,
        answers,
        truth: b.truth,
        lifespans: b.lifespans,
    })
}

/// Point queries per theme: positives at a day inside a true interval,
/// negatives at a day inside the individual's existence but outside every
/// true interval of that fluent. Individuals never holding the fluent are
/// not queried, so no query is decidable from the lifespan alone.
pub fn sample_queries<R: Rng>(
    truth: &[TruthRow],
    lifespans: &BTreeMap<String, TimeInterval>,
    config: &WorldConfig,
    rng: &mut R,
) -> (Vec<Query>, Vec<(String, bool)>) {
    let mut by_fluent: BTreeMap<(&str, &Fluent), Vec<TimeInterval>> = BTreeMap::new();
    for row in truth {
        by_fluent.entry((row.set, &row.fluent)).or_default().push(row.interval);
    }
    let mut queries = Vec::new();
    let mut answers = Vec::new();
    for set in QUERY_SETS {
        let rows: Vec<&TruthRow> = truth.iter().filter(|r| r.set == set).collect();
        let fluents: Vec<(&Fluent, &Vec<TimeInterval>)> = by_fluent
            .iter()
            .filter(|((s, _), _)| *s == set)
            .map(|((_, f), v)| (*f, v))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let n_pos = (config.queries_per_set as f64 * config.positive_fraction).round() as usize;
        let mut made = 0;
        let mut attempts = 0;
        while made < config.queries_per_set && attempts < config.queries_per_set * 1000 {
            attempts += 1;
            let positive = made < n_pos;
            let (fluent, t) = if positive {
                let row = rows.choose(rng).expect("non-empty");
                (&row.fluent, day_in(&row.interval, rng))
            } else {
                let (fluent, ivs) = fluents.choose(rng).expect("non-empty");
                let life = lifespans[fluent.subject()];
                let t = day_in(&life, rng);
                if ivs.iter().any(|iv| iv.contains(t)) {
                    continue;
                }
                (*fluent, t)
            };
            made += 1;
            let id = format!("{set}-{made:03}");
            queries.push(Query {
                id: id.clone(),
                set: set.to_string(),
                mode: Mode::M2,
                alpha: None,
                time: TimeInterval::point(t),
                fluent: fluent.clone(),
            });
            answers.push((id, positive));
        }
    }
    (queries, answers)
}

impl World {
    pub fn queries_text(&self) -> String {
        let mut out = format!("; queries, seed {}\n", self.config.seed);
        for q in &self.queries {
            writeln!(out, "{q}").expect("string write");
        }
        out
    }

    pub fn answers_csv(&self) -> String {
        let mut out = String::from("query_id,truth\n");
        for (id, t) in &self.answers {
            writeln!(out, "{id},{}", if *t { "True" } else { "False" }).expect("string write");
        }
        out
    }

    pub fn truth_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["set", "fluent", "start", "end"]).expect("in memory");
        for r in &self.truth {
            w.write_record([
                r.set.to_string(),
                r.fluent.to_string(),
                r.interval.start().to_string(),
                r.interval.end().to_string(),
            ])
            .expect("in memory");
        }
        String::from_utf8(w.into_inner().expect("in memory")).expect("utf8")
    }

    /// `(file name, contents)` for every output file.
    pub fn files(&self) -> Vec<(&'static str, String)> {
        vec![
            (KB_FILE, self.kb_text.clone()),
            (EVENTS_FILE, self.events_text.clone()),
            (HAZARDS_FILE, self.hazards_text.clone()),
            (QUERIES_FILE, self.queries_text()),
            (ANSWERS_FILE, self.answers_csv()),
            (TRUTH_FILE, self.truth_csv()),
        ]
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), WorldError> {
        let io = |path: &Path, source| WorldError::Io {
            path: path.display().to_string(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (name, text) in self.files() {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_queries, Corpus};

    fn small() -> WorldConfig {
        WorldConfig {
            n_individuals: 120,
            queries_per_set: 40,
            ..WorldConfig::default()
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.files(), b.files());
        let c = generate(&WorldConfig { seed: 7, ..small() }).unwrap();
        assert_ne!(a.kb_text, c.kb_text);
    }

    #[test]
    fn outputs_load_and_queries_parse() {
        let w = generate(&small()).unwrap();
        let corpus = Corpus::from_texts(&[
            (KB_FILE, w.kb_text.as_str()),
            (EVENTS_FILE, w.events_text.as_str()),
            (HAZARDS_FILE, w.hazards_text.as_str()),
        ])
        .unwrap();
        let qs = parse_queries(&w.queries_text(), QUERIES_FILE).unwrap();
        assert_eq!(qs, w.queries);
        for q in &qs {
            corpus.check_symbols(&q.fluent).unwrap();
        }
    }

    #[test]
    fn positive_negative_balance_and_lifespan_filter() {
        let w = generate(&small()).unwrap();
        for set in QUERY_SETS {
            let ids: Vec<&(String, bool)> = w.answers.iter().filter(|(id, _)| id.starts_with(set)).collect();
            let pos = ids.iter().filter(|(_, t)| *t).count();
            assert_eq!(ids.len(), 40, "{set}");
            assert!((pos as i64 - 20).abs() <= 1, "{set}: {pos}");
        }
        let truth: BTreeMap<&str, bool> = w.answers.iter().map(|(i, t)| (i.as_str(), *t)).collect();
        for q in &w.queries {
            let life = w.lifespans[q.fluent.subject()];
            assert!(life.subsumes(&q.time));
            let holds = w
                .truth
                .iter()
                .any(|r| r.fluent == q.fluent && r.interval.subsumes(&q.time));
            assert_eq!(holds, truth[q.id.as_str()]);
        }
    }

    #[test]
    fn observations_lie_inside_truth() {
        let w = generate(&small()).unwrap();
        let corpus = Corpus::from_texts(&[(KB_FILE, w.kb_text.as_str()), (EVENTS_FILE, w.events_text.as_str())]).unwrap();
        for a in corpus.kb.assertions() {
            if a.microtheory != "ObservationMt" {
                continue;
            }
            assert!(
                w.truth.iter().any(|r| r.fluent == a.fluent && r.interval.subsumes(&a.time)),
                "{} at {}",
                a.fluent,
                a.time
            );
        }
        // No professor interval after a retirement interval.
        for r in w.truth.iter().filter(|r| r.set == "retired") {
            let prof = Fluent::isa(r.fluent.subject(), "Professor");
            for p in w.truth.iter().filter(|p| p.fluent == prof) {
                assert!(p.interval.end() < r.interval.start() || p.interval.end() == r.interval.start().minus_days(1));
            }
        }
    }

    #[test]
    fn full_density_observes_everything() {
        let cfg = WorldConfig {
            observation_density: 1.0,
            ..small()
        };
        let w = generate(&cfg).unwrap();
        let corpus = Corpus::from_texts(&[(KB_FILE, w.kb_text.as_str())]).unwrap();
        for (q, (_, truth)) in w.queries.iter().zip(&w.answers) {
            assert_eq!(corpus.kb.holds_known(&q.fluent, &q.time), *truth, "{q}");
        }
    }

    #[test]
    fn cricketer_curve_falls_by_retirement_age() {
        let spec = cricketer_spec(45);
        let traj = crate::hazard::CovariateTrajectory::none();
        assert!(crate::hazard::survival(&spec, 45, &traj).unwrap() < 0.05);
        assert!(crate::hazard::survival(&spec, 25, &traj).unwrap() > 0.95);
    }
}
