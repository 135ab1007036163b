//! Random single-fluent timelines and a brute-force reference projector.
//!
//! The reference recomputes every survival product from scratch and picks
//! event pairs by enumerating all of them, so it shares no code with the
//! library beyond the time types.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tproj_core::{Corpus, TimeInterval, TimePoint};

pub const HORIZON: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Init,
    Term,
    Risk,
}

#[derive(Debug, Clone)]
pub struct Ev {
    pub id: String,
    pub kind: Kind,
    pub time: TimePoint,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub events: Vec<Ev>,
    pub assertions: Vec<TimeInterval>,
    pub table: Option<Vec<f64>>,
    pub period_days: i64,
    pub query: TimeInterval,
    pub alpha: f64,
}

fn day(offset: i64) -> TimePoint {
    TimePoint::from_ymd(2000, 1, 1).unwrap().plus_days(offset)
}

pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    let span = 3650;
    // A small pool of shared times makes simultaneous events common.
    let pool: Vec<i64> = (0..6).map(|_| rng.gen_range(0..span)).collect();
    let n_events = rng.gen_range(0..=12);
    let mut ids: Vec<usize> = (1..=n_events).collect();
    ids.shuffle(rng);
    let events = ids
        .into_iter()
        .map(|i| {
            let kind = match rng.gen_range(0..10) {
                0..=4 => Kind::Init,
                5..=8 => Kind::Term,
                _ => Kind::Risk,
            };
            let t = if rng.gen_bool(0.4) {
                *pool.choose(rng).unwrap()
            } else {
                rng.gen_range(0..span)
            };
            Ev {
                id: format!("E{i:02}"),
                kind,
                time: day(t),
            }
        })
        .collect();
    let assertions = (0..rng.gen_range(0..=2))
        .map(|_| {
            let s = rng.gen_range(0..span);
            TimeInterval::new(day(s), day(s + rng.gen_range(0..500))).unwrap()
        })
        .collect();
    let table = rng.gen_bool(0.9).then(|| {
        (0..rng.gen_range(1..=6))
            .map(|_| if rng.gen_bool(0.05) { 0.0 } else { (rng.gen_range(0.02..0.6f64) * 1000.0).round() / 1000.0 })
            .collect()
    });
    let qs = rng.gen_range(0..span);
    Scenario {
        events,
        assertions,
        table,
        period_days: *[30i64, 91, 365].choose(rng).unwrap(),
        query: TimeInterval::new(day(qs), day(qs + rng.gen_range(0..400))).unwrap(),
        alpha: [0.2, 0.5, 0.8][rng.gen_range(0..3)],
    }
}

impl Scenario {
    pub fn text(&self) -> String {
        let mut s = String::from(
            "(initiates-rule StartEvent who Active)\n(terminates-rule StopEvent who Active)\n(risk-rule RiskEvent who Active)\n",
        );
        for e in &self.events {
            let ty = match e.kind {
                Kind::Init => "StartEvent",
                Kind::Term => "StopEvent",
                Kind::Risk => "RiskEvent",
            };
            s += &format!("(event :id {} :type {ty} :time {} :roles ((who A)))\n", e.id, e.time);
        }
        for a in &self.assertions {
            s += &format!("(assert :time {a} (isa A Active))\n");
        }
        s += "(collection Active)\n(assert :time 1999-01-01 (isa A Thing))\n";
        if let Some(t) = &self.table {
            let vals: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            s += &format!("(hazard :for (isa ?x Active) :period {} :h ({}))\n", self.period_days, vals.join(" "));
        }
        s
    }

    pub fn corpus(&self) -> Corpus {
        Corpus::from_texts(&[("scenario", &self.text())]).unwrap()
    }

    fn of(&self, kind: Kind) -> Vec<&Ev> {
        self.events.iter().filter(|e| e.kind == kind).collect()
    }

    /// Latest initiator strictly before `t`, smallest id among ties.
    pub fn ref_c2(&self, t: TimePoint) -> Option<&Ev> {
        let mut best: Option<&Ev> = None;
        for e in self.of(Kind::Init) {
            if e.time < t {
                best = match best {
                    Some(b) if (b.time, std::cmp::Reverse(&b.id)) >= (e.time, std::cmp::Reverse(&e.id)) => Some(b),
                    _ => Some(e),
                };
            }
        }
        best
    }

    /// Earliest terminator strictly after `t`, smallest id among ties.
    pub fn ref_c3(&self, t: TimePoint) -> Option<&Ev> {
        let mut best: Option<&Ev> = None;
        for e in self.of(Kind::Term) {
            if e.time > t {
                best = match best {
                    Some(b) if (b.time, &b.id) <= (e.time, &e.id) => Some(b),
                    _ => Some(e),
                };
            }
        }
        best
    }

    /// All pairs (initiator before Q, terminator after Q) with no terminator
    /// from the initiator through the end of Q; prefer the latest initiator,
    /// then the earliest terminator, then smallest ids.
    pub fn ref_c1(&self) -> Option<(&Ev, &Ev)> {
        let q = self.query;
        let terms = self.of(Kind::Term);
        let mut best: Option<(&Ev, &Ev)> = None;
        for i in self.of(Kind::Init) {
            for t in &terms {
                let ok = i.time < q.start()
                    && t.time > q.end()
                    && !terms.iter().any(|x| i.time <= x.time && x.time <= q.end());
                if !ok {
                    continue;
                }
                let key = |p: (&Ev, &Ev)| {
                    (
                        std::cmp::Reverse(p.0.time),
                        p.0.id.clone(),
                        p.1.time,
                        p.1.id.clone(),
                    )
                };
                best = match best {
                    Some(b) if key(b) <= key((i, t)) => Some(b),
                    _ => Some((i, *t)),
                };
            }
        }
        best
    }

    fn hazard(&self, j: u32) -> f64 {
        let t = self.table.as_ref().unwrap();
        t[(j as usize - 1).min(t.len() - 1)]
    }

    /// Largest k <= HORIZON with S(k) > alpha, each S(k) recomputed.
    pub fn ref_kstar(&self) -> u32 {
        let mut best = 0;
        for k in 0..=HORIZON {
            let mut s = 1.0;
            for j in 1..=k {
                s *= 1.0 - self.hazard(j);
            }
            if s > self.alpha {
                best = k;
            }
        }
        best
    }

    fn risk_origin(&self, at: TimePoint) -> TimePoint {
        if let Some(r) = self.of(Kind::Risk).iter().map(|e| e.time).filter(|&t| t <= at).max() {
            return r;
        }
        let terms = self.of(Kind::Term);
        self.of(Kind::Init)
            .iter()
            .map(|e| e.time)
            .filter(|&t| t <= at && !terms.iter().any(|x| t <= x.time && x.time <= at))
            .max()
            .unwrap_or(at)
    }

    fn span(&self, start: TimePoint, origin: TimePoint) -> TimeInterval {
        let end = origin.plus_days(self.ref_kstar() as i64 * self.period_days);
        TimeInterval::new(start, end.max(start)).unwrap()
    }

    /// Reference projection: `(interval, source tag)`.
    pub fn ref_project(&self) -> (Option<TimeInterval>, Option<&'static str>) {
        let q = self.query;
        let has_spec = self.table.is_some();
        if let Some((i, t)) = self.ref_c1() {
            let ev = TimeInterval::new(i.time, t.time).unwrap();
            if !has_spec {
                return (Some(ev), Some("event-bracket"));
            }
            let origin = self
                .of(Kind::Risk)
                .iter()
                .map(|e| e.time)
                .filter(|&x| x <= q.start())
                .max()
                .unwrap_or(i.time);
            let hz = self.span(origin, origin);
            if ev.subsumes(&hz) {
                return if hz.subsumes(&q) {
                    (Some(hz), Some("hazard-subsumed"))
                } else {
                    (None, Some("hazard-subsumed"))
                };
            }
            return (Some(ev), Some("event-bracket"));
        }
        if !has_spec {
            return (None, None);
        }
        let inits = self.of(Kind::Init);
        let terms = self.of(Kind::Term);
        let any_events = !inits.is_empty() || !terms.is_empty();
        if any_events && terms.is_empty() {
            if let Some(i) = self.ref_c2(q.start()) {
                let iv = self.span(i.time, self.risk_origin(i.time));
                if iv.subsumes(&q) {
                    return (Some(iv), Some("forward-from-event"));
                }
            }
        }
        if any_events && inits.is_empty() {
            if let Some(t) = self.ref_c3(q.end()) {
                let iv = TimeInterval::new(t.time.minus_days(self.ref_kstar() as i64 * self.period_days), t.time).unwrap();
                if iv.subsumes(&q) {
                    return (Some(iv), Some("backward-from-event"));
                }
            }
        }
        let mut anchors: Vec<TimeInterval> = self.assertions.clone();
        anchors.extend(inits.iter().map(|e| TimeInterval::point(e.time)));
        let Some(anchor) = anchors
            .iter()
            .copied()
            .filter(|a| a.start() <= q.start())
            .max_by_key(|a| (a.start(), a.end()))
        else {
            return (None, Some("hazard-only"));
        };
        if terms.iter().any(|t| anchor.end() <= t.time && t.time <= q.end()) {
            return (None, Some("hazard-only"));
        }
        let fe = self.span(anchor.start(), self.risk_origin(anchor.start()));
        let iv = TimeInterval::new(anchor.start(), fe.end().max(anchor.end())).unwrap();
        if iv.subsumes(&q) {
            (Some(iv), Some("hazard-only"))
        } else {
            (None, Some("hazard-only"))
        }
    }
}
