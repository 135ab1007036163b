//! Temporal projection: extends a fluent's known intervals using event
//! brackets, hazard-derived persistence, temporal-semantic markers and
//! fixed-duration defaults, then truncates against incompatible facts.
//!
//! The decision procedure, for fluent `f` and query interval `Q`:
//!
//! 0. a marker interval or an uncontradicted fixed-duration default that
//!    subsumes `Q` is returned as is;
//! 1. if an initiator/terminator pair brackets `Q`, the event interval is
//!    returned unless it subsumes the hazard interval from the risk start,
//!    in which case the hazard interval is preferred;
//! 2. if all known events initiate `f`, the hazard interval forward from the
//!    latest initiator before `Q` is used when it subsumes `Q`;
//! 3. symmetrically, if all events terminate `f`, the interval backward from
//!    the earliest terminator after `Q`;
//! 4. otherwise a hazard interval forward from the latest known-true anchor;
//! 5. hazard-derived intervals (steps 2-4) are truncated by incompatible
//!    facts and stage orderings.
//!
//! Projections are never written back into the store.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::Corpus;
use crate::events::Timeline;
use crate::hazard::{
    backward_interval, fixed_duration_interval, forward_interval, hazard_at, marker_interval, resolve_hazard,
    CovariateTrajectory, FluentPattern, HazardError, HazardSpec, DEFAULT_HORIZON,
};
use crate::kb::Fluent;
use crate::time::{PeriodScheme, TimeInterval, TimePoint};

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("threshold {0} must lie strictly between 0 and 1")]
    InvalidThreshold(f64),
    #[error("{0}")]
    UnknownSymbol(String),
    #[error("no hazard spec applies to {0}")]
    NoHazard(String),
    #[error("{0} is not known to hold at or before the requested time")]
    NoAnchor(String),
    #[error("{fluent} is terminated at {at} after it was last known to hold")]
    Terminated { fluent: String, at: TimePoint },
    #[error("{fluent} conflicts with incompatible {other} during the query interval")]
    Contradiction { fluent: String, other: String },
    #[error(transparent)]
    Hazard(#[from] HazardError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Lookup with hierarchy closure and temporal subsumption only.
    M1,
    /// M1 plus temporal projection.
    M2,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(Mode::M1),
            "m2" => Ok(Mode::M2),
            _ => Err(format!("unknown mode `{s}` (expected m1 or m2)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::M1 => "m1",
            Mode::M2 => "m2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    EventBracket,
    HazardSubsumed,
    ForwardFromEvent,
    BackwardFromEvent,
    HazardOnly,
    FixedDuration,
    Marker,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::EventBracket => "event-bracket",
            Source::HazardSubsumed => "hazard-subsumed",
            Source::ForwardFromEvent => "forward-from-event",
            Source::BackwardFromEvent => "backward-from-event",
            Source::HazardOnly => "hazard-only",
            Source::FixedDuration => "fixed-duration",
            Source::Marker => "marker",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    /// Always subsumes the query interval when present.
    pub interval: Option<TimeInterval>,
    pub source: Option<Source>,
    pub truncated: bool,
    /// Human-readable record of the decisions taken.
    pub trace: Vec<String>,
}

impl fmt::Display for ProjectionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.interval, &self.source) {
            (Some(iv), Some(src)) => write!(f, "{iv} source={src} truncated={}", self.truncated),
            (None, Some(src)) => write!(f, "unknown (last step: {src})"),
            _ => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "True",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub verdict: Verdict,
    pub interval: Option<TimeInterval>,
    /// `None` for stored knowledge, the projection source otherwise.
    pub projected: Option<Source>,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if let Some(iv) = self.interval {
            write!(f, " {iv}")?;
        }
        match (self.verdict, self.projected) {
            (Verdict::True, Some(src)) => write!(f, " source={src}"),
            (Verdict::True, None) => f.write_str(" source=known"),
            _ => Ok(()),
        }
    }
}

/// Read-only view over a corpus answering projection queries.
#[derive(Debug, Clone, Copy)]
pub struct Projector<'a> {
    corpus: &'a Corpus,
    horizon: u32,
}

struct Run<'a> {
    trace: Vec<String>,
    timeline: Timeline<'a>,
    anchors: Vec<TimeInterval>,
}

impl<'a> Run<'a> {
    fn note(&mut self, msg: impl Into<String>) {
        self.trace.push(msg.into());
    }

    fn finish(self, interval: Option<TimeInterval>, source: Option<Source>, truncated: bool) -> ProjectionResult {
        ProjectionResult {
            interval,
            source,
            truncated,
            trace: self.trace,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), ProjectionError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ProjectionError::InvalidThreshold(alpha))
    }
}

impl<'a> Projector<'a> {
    pub fn new(corpus: &'a Corpus) -> Self {
        Projector {
            corpus,
            horizon: DEFAULT_HORIZON,
        }
    }

    pub fn with_horizon(mut self, horizon: u32) -> Self {
        self.horizon = horizon.max(1);
        self
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Covariate indicators for `subject` over periods counted forward from
    /// `origin`, or backward from it when `backward` is set.
    fn trajectory(&self, spec: &HazardSpec, subject: &str, origin: TimePoint, backward: bool) -> CovariateTrajectory {
        if spec.covariates.is_empty() {
            return CovariateTrajectory::none();
        }
        let kb = &self.corpus.kb;
        let spans: Vec<Vec<TimeInterval>> = spec
            .covariates
            .iter()
            .map(|c| match &c.pattern {
                FluentPattern::Collection(col) => {
                    let probe = Fluent::isa(subject, col.clone());
                    kb.supporting_assertions(&probe).map(|a| a.time).collect()
                }
                _ => Vec::new(),
            })
            .collect();
        if !backward {
            return CovariateTrajectory::from_spans(&spec.scheme(origin), &spans, self.horizon);
        }
        let len = spec.period_days;
        let rows = (1..=self.horizon as i64)
            .map(|j| {
                let span = TimeInterval::new(origin.minus_days(j * len), origin.minus_days((j - 1) * len))
                    .expect("ordered");
                spans.iter().map(|s| s.iter().any(|iv| iv.overlaps(&span))).collect()
            })
            .collect();
        CovariateTrajectory::from_rows(rows)
    }

    /// `[start, R + k*·len]` for risk origin `R <= start`; an unbounded
    /// survival curve is capped at the horizon.
    fn forward_span(
        &self,
        spec: &HazardSpec,
        f: &Fluent,
        start: TimePoint,
        origin: TimePoint,
        alpha: f64,
    ) -> Result<TimeInterval, ProjectionError> {
        let traj = self.trajectory(spec, f.subject(), origin, false);
        let end = match forward_interval(spec, origin, &traj, alpha, self.horizon) {
            Ok(iv) => iv.end(),
            Err(HazardError::Unbounded { .. }) => origin.plus_days(self.horizon as i64 * spec.period_days),
            Err(e) => return Err(e.into()),
        };
        Ok(TimeInterval::new(start, end.max(start)).expect("ordered"))
    }

    fn backward_span(
        &self,
        spec: &HazardSpec,
        f: &Fluent,
        end: TimePoint,
        alpha: f64,
    ) -> Result<TimeInterval, ProjectionError> {
        let traj = self.trajectory(spec, f.subject(), end, true);
        match backward_interval(spec, end, &traj, alpha, self.horizon) {
            Ok(iv) => Ok(iv),
            Err(HazardError::Unbounded { .. }) => Ok(TimeInterval::new(
                end.minus_days(self.horizon as i64 * spec.period_days),
                end,
            )
            .expect("ordered")),
            Err(e) => Err(e.into()),
        }
    }

    /// Known-true intervals of exactly `f`: stored assertions plus the days
    /// of initiating events, sorted.
    fn anchors(&self, f: &Fluent, timeline: &Timeline<'_>) -> Vec<TimeInterval> {
        let mut anchors: Vec<TimeInterval> = self.corpus.kb.assertions_of(f).map(|a| a.time).collect();
        anchors.extend(timeline.initiators.iter().map(|e| TimeInterval::point(e.time)));
        anchors.sort();
        anchors.dedup();
        anchors
    }

    /// Latest anchor starting at or before `t` (ties: longest).
    fn latest_anchor(anchors: &[TimeInterval], t: TimePoint) -> Option<TimeInterval> {
        anchors.iter().copied().filter(|a| a.start() <= t).max_by_key(|a| (a.start(), a.end()))
    }

    /// Risk-period origin for a fluent known true from `at`: the last risk
    /// start, else the latest uninterrupted initiator, else `at` itself.
    fn risk_origin(&self, f: &Fluent, timeline: &Timeline<'_>, at: TimePoint) -> TimePoint {
        if let Some(r) = self.corpus.events.last_risk_start(f, at, &self.corpus.kb) {
            return r;
        }
        timeline
            .initiators
            .iter()
            .filter(|e| e.time <= at && !timeline.any_terminator_within(e.time, at))
            .map(|e| e.time)
            .max()
            .unwrap_or(at)
    }

    /// Runs the projection procedure for `f` over `q`.
    pub fn temporally_project(&self, f: &Fluent, q: &TimeInterval, alpha: f64) -> Result<ProjectionResult, ProjectionError> {
        check_alpha(alpha)?;
        self.corpus.check_symbols(f).map_err(ProjectionError::UnknownSymbol)?;
        let kb = &self.corpus.kb;
        let timeline = self.corpus.events.timeline(f, kb);
        let anchors = self.anchors(f, &timeline);
        let mut run = Run {
            trace: Vec::new(),
            timeline,
            anchors,
        };
        run.note(format!("query {f} over {q}, alpha {alpha}"));

        // Step 0: near-deterministic knowledge.
        if let Some(iv) = self.marker_step(f, q, &run.anchors) {
            run.note(format!("step 0: marker interval {iv} subsumes the query"));
            return Ok(run.finish(Some(iv), Some(Source::Marker), false));
        }
        if let Some(iv) = fixed_duration_interval(f, self.corpus.hazards.fixed_rules(), q.start()) {
            if !iv.subsumes(q) {
                run.note(format!("step 0: fixed-duration interval {iv} does not subsume the query"));
            } else if run.timeline.any_terminator_within(iv.start(), iv.end()) {
                run.note(format!("step 0: fixed-duration interval {iv} overridden by a terminating event"));
            } else {
                run.note(format!("step 0: fixed-duration interval {iv} subsumes the query"));
                return Ok(run.finish(Some(iv), Some(Source::FixedDuration), false));
            }
        }

        let resolution = resolve_hazard(f, &self.corpus.hazards, kb);
        let spec = resolution.map(|r| r.spec);
        match spec {
            Some(s) => run.note(format!("hazard spec {}", s.pattern)),
            None => run.note("no hazard spec applies"),
        }

        // Step 1: event bracket.
        if let Some((init, term)) = run.timeline.select_bracketing(q) {
            let event_iv = TimeInterval::new(init.time, term.time).expect("init precedes term");
            run.note(format!(
                "step 1a: bracket {}@{} .. {}@{} gives {event_iv}",
                init.id, init.time, term.id, term.time
            ));
            let Some(spec) = spec else {
                run.note("step 1c: no hazard interval; returning event interval");
                return Ok(run.finish(Some(event_iv), Some(Source::EventBracket), false));
            };
            let origin = self
                .corpus
                .events
                .last_risk_start(f, q.start(), kb)
                .unwrap_or(init.time);
            let hazard_iv = self.forward_span(spec, f, origin, origin, alpha)?;
            run.note(format!("step 1b: hazard interval from {origin} is {hazard_iv}"));
            if event_iv.subsumes(&hazard_iv) {
                if hazard_iv.subsumes(q) {
                    run.note("step 1c: event interval subsumes hazard interval; returning hazard interval");
                    return Ok(run.finish(Some(hazard_iv), Some(Source::HazardSubsumed), false));
                }
                run.note("step 1c: event interval subsumes hazard interval, which misses the query; unknown");
                return Ok(run.finish(None, Some(Source::HazardSubsumed), false));
            }
            run.note("step 1c: event interval does not subsume hazard interval; returning event interval");
            return Ok(run.finish(Some(event_iv), Some(Source::EventBracket), false));
        }
        run.note("step 1: no bracketing pair");

        let Some(spec) = spec else {
            run.note("no hazard spec; unknown");
            return Ok(run.finish(None, None, false));
        };

        // Step 2: every known event initiates f.
        if !run.timeline.is_empty() && run.timeline.terminators.is_empty() {
            match run.timeline.latest_initiator_before(q.start()) {
                Some(init) => {
                    let origin = self.risk_origin(f, &run.timeline, init.time);
                    let iv = self.forward_span(spec, f, init.time, origin, alpha)?;
                    run.note(format!("step 2: forward from {}@{} gives {iv}", init.id, init.time));
                    if iv.subsumes(q) {
                        return self.finish_truncated(run, f, q, iv, alpha, Source::ForwardFromEvent);
                    }
                    run.note("step 2: does not subsume the query");
                }
                None => run.note("step 2: no initiator before the query"),
            }
        }

        // Step 3: every known event terminates f.
        if !run.timeline.is_empty() && run.timeline.initiators.is_empty() {
            match run.timeline.earliest_terminator_after(q.end()) {
                Some(term) => {
                    let iv = self.backward_span(spec, f, term.time, alpha)?;
                    run.note(format!("step 3: backward from {}@{} gives {iv}", term.id, term.time));
                    if iv.subsumes(q) {
                        return self.finish_truncated(run, f, q, iv, alpha, Source::BackwardFromEvent);
                    }
                    run.note("step 3: does not subsume the query");
                }
                None => run.note("step 3: no terminator after the query"),
            }
        }

        // Step 4: hazard interval around the latest known-true anchor.
        let Some(anchor) = Self::latest_anchor(&run.anchors, q.start()) else {
            run.note("step 4: no anchor at or before the query; unknown");
            return Ok(run.finish(None, Some(Source::HazardOnly), false));
        };
        if let Some(t) = run
            .timeline
            .terminators
            .iter()
            .find(|e| anchor.end() <= e.time && e.time <= q.end())
        {
            run.note(format!("step 4: anchor {anchor} is followed by terminator {}@{}; unknown", t.id, t.time));
            return Ok(run.finish(None, Some(Source::HazardOnly), false));
        }
        let origin = self.risk_origin(f, &run.timeline, anchor.start());
        let fwd = self.forward_span(spec, f, anchor.start(), origin, alpha)?;
        let iv = TimeInterval::new(anchor.start(), fwd.end().max(anchor.end())).expect("ordered");
        run.note(format!("step 4: anchor {anchor}, risk origin {origin}, hazard interval {iv}"));
        if !iv.subsumes(q) {
            run.note("step 4: does not subsume the query; unknown");
            return Ok(run.finish(None, Some(Source::HazardOnly), false));
        }
        self.finish_truncated(run, f, q, iv, alpha, Source::HazardOnly)
    }

    fn finish_truncated(
        &self,
        mut run: Run<'_>,
        f: &Fluent,
        q: &TimeInterval,
        iv: TimeInterval,
        alpha: f64,
        source: Source,
    ) -> Result<ProjectionResult, ProjectionError> {
        match self.truncate_by_constraints(iv, f, q, alpha) {
            Ok(cut) if cut == iv => {
                run.note("step 5: no applicable constraints");
                Ok(run.finish(Some(iv), Some(source), false))
            }
            Ok(cut) => {
                run.note(format!("step 5: truncated to {cut}"));
                Ok(run.finish(Some(cut), Some(source), true))
            }
            Err(ProjectionError::Contradiction { other, .. }) => {
                run.note(format!("step 5: contradicted by {other}; unknown"));
                Ok(run.finish(None, Some(source), true))
            }
            Err(e) => Err(e),
        }
    }

    fn marker_step(&self, f: &Fluent, q: &TimeInterval, anchors: &[TimeInterval]) -> Option<TimeInterval> {
        anchors
            .iter()
            .filter_map(|a| marker_interval(f, a, &self.corpus.kb))
            .filter(|iv| iv.subsumes(q))
            .max_by_key(|iv| iv.len_days())
    }

    /// Shrinks `interval` to the largest sub-interval around `q` that avoids
    /// every time an incompatible fluent is known (or projected by its own
    /// hazard) to hold, and respects stage orderings.
    pub fn truncate_by_constraints(
        &self,
        interval: TimeInterval,
        f: &Fluent,
        q: &TimeInterval,
        alpha: f64,
    ) -> Result<TimeInterval, ProjectionError> {
        check_alpha(alpha)?;
        let Fluent::Isa { entity, collection } = f else {
            return Ok(interval);
        };
        let kb = &self.corpus.kb;
        let events = &self.corpus.events;

        // Incompatible fluents and when each is known to hold.
        let mut known: std::collections::BTreeMap<Fluent, Vec<TimeInterval>> = Default::default();
        for a in kb.assertions_about(entity) {
            if a.fluent.collection().is_some() && kb.incompatible(f, &a.fluent) {
                known.entry(a.fluent.clone()).or_default().push(a.time);
            }
        }
        for (g, t) in events.initiated_isa_fluents(entity, kb) {
            if kb.incompatible(f, &g) {
                known.entry(g).or_default().push(TimeInterval::point(t));
            }
        }

        let (mut lo, mut hi) = (interval.start(), interval.end());
        let contradiction = |g: &Fluent| ProjectionError::Contradiction {
            fluent: f.to_string(),
            other: g.to_string(),
        };
        for (g, times) in &known {
            let mut regions = times.clone();
            if let Some(res) = resolve_hazard(g, &self.corpus.hazards, kb) {
                let tl = events.timeline(g, kb);
                for k in times {
                    let origin = self.risk_origin(g, &tl, k.start());
                    let fwd = self.forward_span(res.spec, g, k.start(), origin, alpha)?;
                    regions.push(TimeInterval::new(k.start(), fwd.end().max(k.end())).expect("ordered"));
                }
            }
            for r in &regions {
                if r.overlaps(q) {
                    return Err(contradiction(g));
                }
                if r.end() < q.start() {
                    lo = lo.max(r.end().plus_days(1));
                } else {
                    hi = hi.min(r.start().minus_days(1));
                }
            }
            let g_col = g.collection().expect("isa fluent");
            if kb.precedes_stage(collection, g_col) {
                let earliest = times.iter().map(|t| t.start()).min().expect("non-empty");
                if earliest <= q.end() {
                    return Err(contradiction(g));
                }
                hi = hi.min(earliest.minus_days(1));
            }
            if kb.precedes_stage(g_col, collection) {
                let latest = times.iter().map(|t| t.end()).max().expect("non-empty");
                if latest >= q.start() {
                    return Err(contradiction(g));
                }
                lo = lo.max(latest.plus_days(1));
            }
        }
        Ok(TimeInterval::new(lo, hi).expect("query stays inside"))
    }

    /// Probability that `f` still holds at `t`, given it was last known to
    /// hold at the latest anchor `T0 <= t`: survival from the risk origin
    /// through the period containing `t`, conditioned on survival up to the
    /// period containing `T0`.
    pub fn prob_holds(&self, f: &Fluent, t: TimePoint) -> Result<f64, ProjectionError> {
        self.corpus.check_symbols(f).map_err(ProjectionError::UnknownSymbol)?;
        let kb = &self.corpus.kb;
        let timeline = self.corpus.events.timeline(f, kb);
        let anchors = self.anchors(f, &timeline);
        let anchor = Self::latest_anchor(&anchors, t).ok_or_else(|| ProjectionError::NoAnchor(f.to_string()))?;
        if anchors.iter().any(|a| a.contains(t)) {
            return Ok(1.0);
        }
        let t0 = anchor.end();
        if let Some(e) = timeline.terminators.iter().find(|e| t0 <= e.time && e.time <= t) {
            return Err(ProjectionError::Terminated {
                fluent: f.to_string(),
                at: e.time,
            });
        }
        let spec = resolve_hazard(f, &self.corpus.hazards, kb)
            .ok_or_else(|| ProjectionError::NoHazard(f.to_string()))?
            .spec;
        let origin = self.risk_origin(f, &timeline, anchor.start());
        let scheme: PeriodScheme = spec.scheme(origin);
        let traj = self.trajectory(spec, f.subject(), origin, false);
        let n = spec.covariates.len();
        let k_t = scheme.period_index(t).map_err(|_| ProjectionError::NoAnchor(f.to_string()))?;
        let known_through = match scheme.period_index(t0) {
            Ok(m) => m - 1,
            Err(_) => 0,
        };
        let mut p = 1.0;
        for j in (known_through + 1)..=k_t {
            p *= 1.0 - hazard_at(spec, j, &traj.at(j, n))?;
        }
        Ok(p)
    }

    /// M1: stored knowledge only. M2: stored knowledge, else projection.
    pub fn answer(&self, f: &Fluent, q: &TimeInterval, mode: Mode, alpha: f64) -> Answer {
        if let Some(a) = self.corpus.kb.supporting_assertions(f).find(|a| a.time.subsumes(q)) {
            return Answer {
                verdict: Verdict::True,
                interval: Some(a.time),
                projected: None,
            };
        }
        let unknown = Answer {
            verdict: Verdict::Unknown,
            interval: None,
            projected: None,
        };
        if mode == Mode::M1 {
            return unknown;
        }
        match self.temporally_project(f, q, alpha) {
            Ok(ProjectionResult {
                interval: Some(iv),
                source,
                ..
            }) if iv.subsumes(q) => Answer {
                verdict: Verdict::True,
                interval: Some(iv),
                projected: source,
            },
            _ => unknown,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str) -> Corpus {
        Corpus::from_texts(&[("test", text)]).unwrap()
    }

    fn d(s: &str) -> TimePoint {
        s.parse().unwrap()
    }

    fn iv(a: &str, b: &str) -> TimeInterval {
        TimeInterval::new(d(a), d(b)).unwrap()
    }

    const FRED: &str = r#"
(initiates-rule WeddingEvent groom Married)
(terminates-rule DivorceEvent groom Married)
(event :id W1 :type WeddingEvent :time 1988-07-01 :roles ((groom Fred) (bride Mary)))
(event :id D1 :type DivorceEvent :time 1998-03-15 :roles ((groom Fred) (bride Mary)))
"#;

    #[test]
    fn fred_event_bracket_wins_over_long_hazard() {
        // (1 - 0.033)^20 = 0.511 > 0.5 >= (1 - 0.033)^21 = 0.494
        let c = corpus(&format!("{FRED}(hazard :for (isa ?x Married) :period 365 :h (0.033))"));
        let p = Projector::new(&c);
        let r = p
            .temporally_project(&Fluent::isa("Fred", "Married"), &TimeInterval::year(1992).unwrap(), 0.5)
            .unwrap();
        assert_eq!(r.source, Some(Source::EventBracket));
        assert_eq!(r.interval, Some(iv("1988-07-01", "1998-03-15")));
    }

    #[test]
    fn fred_short_hazard_is_preferred() {
        // 0.9^6 = 0.531 > 0.5 >= 0.9^7 = 0.478
        let c = corpus(&format!("{FRED}(hazard :for (isa ?x Married) :period 365 :h (0.1))"));
        let p = Projector::new(&c);
        let r = p
            .temporally_project(&Fluent::isa("Fred", "Married"), &TimeInterval::year(1992).unwrap(), 0.5)
            .unwrap();
        assert_eq!(r.source, Some(Source::HazardSubsumed));
        assert_eq!(r.interval, Some(TimeInterval::new(d("1988-07-01"), d("1988-07-01").plus_days(6 * 365)).unwrap()));
        // Same bracket, but the query falls after the preferred hazard interval.
        let r = p
            .temporally_project(&Fluent::isa("Fred", "Married"), &TimeInterval::year(1997).unwrap(), 0.5)
            .unwrap();
        assert_eq!(r.interval, None);
    }

    const MCCARTHY: &str = r#"
(followingStageTypes Professor RetiredPerson)
(disjointWith HumanInfant Professor)
(assert :mt PeopleDataMt :time (year 1998) (isa McCarthy Professor))
(assert :mt PeopleDataMt :time (year 2001) (isa McCarthy RetiredPerson))
(hazard :for (isa ?x Professor) :period 365 :h (0.08))
"#;

    #[test]
    fn mccarthy_professor_interval_is_cut_before_retirement() {
        let c = corpus(MCCARTHY);
        let p = Projector::new(&c);
        let prof = Fluent::isa("McCarthy", "Professor");
        // 0.92^8 = 0.513 > 0.5: unconstrained projection reaches 2006.
        let r = p.temporally_project(&prof, &TimeInterval::year(1999).unwrap(), 0.5).unwrap();
        assert!(r.truncated);
        assert_eq!(r.interval, Some(iv("1998-01-01", "2000-12-31")));
        assert!(p.answer(&prof, &TimeInterval::point(d("2000-06-01")), Mode::M2, 0.5).verdict == Verdict::True);
        assert_eq!(p.answer(&prof, &TimeInterval::point(d("2001-06-01")), Mode::M2, 0.5).verdict, Verdict::Unknown);
        assert_eq!(p.answer(&prof, &TimeInterval::point(d("2003-06-01")), Mode::M2, 0.5).verdict, Verdict::Unknown);
    }

    #[test]
    fn truncation_examples() {
        let c = corpus(MCCARTHY);
        let p = Projector::new(&c);
        let prof = Fluent::isa("McCarthy", "Professor");
        let q = TimeInterval::year(1998).unwrap();
        let wide = iv("1994-01-01", "2005-12-31");
        assert_eq!(p.truncate_by_constraints(wide, &prof, &q, 0.5).unwrap(), iv("1994-01-01", "2000-12-31"));
        let cat = Fluent::isa("McCarthy", "Cat");
        assert_eq!(p.truncate_by_constraints(wide, &cat, &q, 0.5).unwrap(), wide);
        let q2001 = TimeInterval::year(2001).unwrap();
        assert!(matches!(
            p.truncate_by_constraints(wide, &prof, &q2001, 0.5),
            Err(ProjectionError::Contradiction { .. })
        ));
    }

    #[test]
    fn incompatible_fluent_hazard_removes_its_projection() {
        let c = corpus(
            r#"
(disjointWith Bachelor Married)
(assert :time 1990-01-01 (isa Al Married))
(assert :time 1995-01-01 (isa Al Bachelor))
(hazard :for (isa ?x Married) :period 365 :h (0.05))
(hazard :for (isa ?x Bachelor) :period 365 :h (0.2))
"#,
        );
        let p = Projector::new(&c);
        let married = Fluent::isa("Al", "Married");
        let cut = p
            .truncate_by_constraints(iv("1990-01-01", "2003-01-01"), &married, &TimeInterval::point(d("1991-01-01")), 0.5)
            .unwrap();
        assert_eq!(cut, iv("1990-01-01", "1994-12-31"));
        // Bachelor hazard projects 0.8^3 > 0.5 past 1995, so 1997 is contradicted.
        assert!(p
            .truncate_by_constraints(iv("1990-01-01", "2003-01-01"), &married, &TimeInterval::point(d("1997-06-01")), 0.5)
            .is_err());
        assert!(p
            .truncate_by_constraints(iv("1990-01-01", "2003-01-01"), &married, &TimeInterval::point(d("1998-06-01")), 0.5)
            .is_ok());
    }

    #[test]
    fn prob_holds_examples() {
        let c = corpus(
            r#"
(assert :time 1990-01-01 (isa Ann Employee))
(hazard :for (isa ?x Employee) :period 365 :h (0.2))
(terminates-rule FiringEvent employee Employee)
(event :id F1 :type FiringEvent :time 1996-01-01 :roles ((employee Bob)))
(assert :time 1990-01-01 (isa Bob Employee))
"#,
        );
        let p = Projector::new(&c);
        let ann = Fluent::isa("Ann", "Employee");
        // t in period 3 after the anchor: 0.8^3
        let t = d("1990-01-01").plus_days(2 * 365 + 10);
        assert!((p.prob_holds(&ann, t).unwrap() - 0.512).abs() < 1e-12);
        assert_eq!(p.prob_holds(&ann, d("1990-01-01")).unwrap(), 1.0);
        assert!(matches!(p.prob_holds(&ann, d("1980-01-01")), Err(ProjectionError::NoAnchor(_))));
        let bob = Fluent::isa("Bob", "Employee");
        assert!(matches!(p.prob_holds(&bob, d("1997-01-01")), Err(ProjectionError::Terminated { .. })));
    }

    #[test]
    fn answer_modes() {
        let c = corpus(
            r#"
(assert :mt PeopleDataMt :time (interval (year 1972) (year 1977)) (isa TonyGreig Cricketer))
(assert :mt PeopleDataMt :time (year 1990) (isa Fred Employee))
(hazard :for (isa ?x Employee) :period 365 :h (0.1))
"#,
        );
        let p = Projector::new(&c);
        let tony = Fluent::isa("TonyGreig", "Cricketer");
        let y1973 = TimeInterval::year(1973).unwrap();
        assert_eq!(p.answer(&tony, &y1973, Mode::M1, 0.5).verdict, Verdict::True);
        assert_eq!(p.answer(&tony, &y1973, Mode::M2, 0.5).verdict, Verdict::True);

        let fred = Fluent::isa("Fred", "Employee");
        let y1992 = TimeInterval::year(1992).unwrap();
        assert_eq!(p.answer(&fred, &y1992, Mode::M1, 0.5).verdict, Verdict::Unknown);
        let m2 = p.answer(&fred, &y1992, Mode::M2, 0.5);
        assert_eq!(m2.verdict, Verdict::True);
        assert_eq!(m2.projected, Some(Source::HazardOnly));

        let y2010 = TimeInterval::year(2010).unwrap();
        assert_eq!(p.answer(&fred, &y2010, Mode::M1, 0.5).verdict, Verdict::Unknown);
        assert_eq!(p.answer(&fred, &y2010, Mode::M2, 0.5).verdict, Verdict::Unknown);
    }

    #[test]
    fn rejects_bad_threshold_and_unknown_symbols() {
        let c = corpus("(assert :time 1990 (isa Fred Employee))");
        let p = Projector::new(&c);
        let fred = Fluent::isa("Fred", "Employee");
        let q = TimeInterval::year(1991).unwrap();
        assert!(matches!(p.temporally_project(&fred, &q, 1.0), Err(ProjectionError::InvalidThreshold(_))));
        assert!(matches!(p.temporally_project(&fred, &q, 0.0), Err(ProjectionError::InvalidThreshold(_))));
        assert!(matches!(
            p.temporally_project(&Fluent::isa("Fred", "Pilot"), &q, 0.5),
            Err(ProjectionError::UnknownSymbol(_))
        ));
        let r = p.temporally_project(&fred, &q, 0.5).unwrap();
        assert_eq!(r.interval, None);
    }

    #[test]
    fn steps_two_and_three() {
        let c = corpus(
            r#"
(initiates-rule HiringEvent employee Employee)
(terminates-rule FiringEvent employee Employee)
(event :id H1 :type HiringEvent :time 1990-01-01 :roles ((employee Ann)))
(event :id F1 :type FiringEvent :time 2000-01-01 :roles ((employee Bob)))
(hazard :for (isa ?x Employee) :period 365 :h (0.2))
"#,
        );
        let p = Projector::new(&c);
        let ann = Fluent::isa("Ann", "Employee");
        let r = p.temporally_project(&ann, &TimeInterval::year(1991).unwrap(), 0.5).unwrap();
        assert_eq!(r.source, Some(Source::ForwardFromEvent));
        assert_eq!(r.interval, Some(TimeInterval::new(d("1990-01-01"), d("1990-01-01").plus_days(3 * 365)).unwrap()));
        let r = p.temporally_project(&ann, &TimeInterval::year(1999).unwrap(), 0.5).unwrap();
        assert_eq!(r.interval, None);

        let bob = Fluent::isa("Bob", "Employee");
        let r = p.temporally_project(&bob, &TimeInterval::year(1998).unwrap(), 0.5).unwrap();
        assert_eq!(r.source, Some(Source::BackwardFromEvent));
        assert_eq!(r.interval, Some(TimeInterval::new(d("2000-01-01").minus_days(3 * 365), d("2000-01-01")).unwrap()));
    }

    #[test]
    fn fixed_duration_and_override() {
        let c = corpus(
            r#"
(persists-for (isa Clinton UnitedStatesPresident) 1993-01-21 1460)
(persists-for (isa Nixon UnitedStatesPresident) 1973-01-20 1460)
(terminates-rule ResignationEvent resignee UnitedStatesPresident)
(event :id R1 :type ResignationEvent :time 1974-08-09 :roles ((resignee Nixon)))
"#,
        );
        let p = Projector::new(&c);
        let clinton = Fluent::isa("Clinton", "UnitedStatesPresident");
        let r = p.temporally_project(&clinton, &TimeInterval::year(1995).unwrap(), 0.5).unwrap();
        assert_eq!(r.source, Some(Source::FixedDuration));
        assert_eq!(r.interval, Some(iv("1993-01-21", "1997-01-20")));
        let nixon = Fluent::isa("Nixon", "UnitedStatesPresident");
        let r = p.temporally_project(&nixon, &TimeInterval::point(d("1976-01-01")), 0.5).unwrap();
        assert_eq!(r.interval, None);
    }
}
