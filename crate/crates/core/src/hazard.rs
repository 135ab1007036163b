//! Discrete-time hazard functions and the intervals they imply.
//!
//! A [`HazardSpec`] gives the conditional probability `h_j` that a state is
//! terminated in period `j` given it survived periods `1..j-1`. Survival
//! through `k` periods is `Π (1 - h_j)` and the event-time mass at `k` is
//! `h_k · Π_{j<k} (1 - h_j)`. Covariates rescale the hazard on the logit
//! scale: `h = 1 / (1 + e^{-α_j} · e^{-Σ β·x})`.

use std::collections::BTreeMap;
use std::fmt;

use log::warn;
use thiserror::Error;

use crate::kb::{Fluent, Kb, Marker};
use crate::sexpr::Sexpr;
use crate::time::{PeriodScheme, TimeInterval, TimePoint};

pub const DEFAULT_HORIZON: u32 = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HazardError {
    #[error("expected {expected} covariate indicators, got {found}")]
    CovariateMismatch { expected: usize, found: usize },
    #[error("survival stays above the threshold for all {horizon} periods")]
    Unbounded { horizon: u32 },
    #[error("threshold {0} must lie strictly between 0 and 1")]
    InvalidThreshold(f64),
    #[error("invalid hazard spec: {0}")]
    InvalidSpec(String),
}

/// What a hazard spec (or covariate) applies to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FluentPattern {
    /// `(isa ?x C)`
    Collection(String),
    /// `(rel p N C)`: predicate `p` whose `N`th argument (1-based) is an
    /// instance of `C`.
    Argument {
        predicate: String,
        position: usize,
        collection: String,
    },
    /// `(rel p)`
    Predicate(String),
}

impl FluentPattern {
    pub fn from_sexpr(e: &Sexpr) -> Result<Self, HazardError> {
        let bad = || HazardError::InvalidSpec(format!("bad pattern {e}"));
        let items = e.as_list().ok_or_else(bad)?;
        match (e.head(), items.len()) {
            (Some("isa"), 3) if items[1].is_variable() => {
                Ok(FluentPattern::Collection(items[2].to_string()))
            }
            (Some("rel"), 2) => Ok(FluentPattern::Predicate(items[1].as_atom().ok_or_else(bad)?.to_string())),
            (Some("rel"), 4) => {
                let position: usize = items[2].as_atom().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                if position == 0 {
                    return Err(bad());
                }
                Ok(FluentPattern::Argument {
                    predicate: items[1].as_atom().ok_or_else(bad)?.to_string(),
                    position,
                    collection: items[3].to_string(),
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FluentPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluentPattern::Collection(c) => write!(f, "(isa ?x {c})"),
            FluentPattern::Argument {
                predicate,
                position,
                collection,
            } => write!(f, "(rel {predicate} {position} {collection})"),
            FluentPattern::Predicate(p) => write!(f, "(rel {p})"),
        }
    }
}

/// Per-period baseline; the last value extends to all later periods.
#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Table(Vec<f64>),
    Logistic(Vec<f64>),
}

impl Baseline {
    fn value(values: &[f64], j: u32) -> f64 {
        let idx = (j as usize - 1).min(values.len() - 1);
        values[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covariate {
    pub pattern: FluentPattern,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardSpec {
    pub pattern: FluentPattern,
    pub period_days: i64,
    pub baseline: Baseline,
    pub covariates: Vec<Covariate>,
}

impl HazardSpec {
    pub fn new(
        pattern: FluentPattern,
        period_days: i64,
        baseline: Baseline,
        covariates: Vec<Covariate>,
    ) -> Result<Self, HazardError> {
        if period_days < 1 {
            return Err(HazardError::InvalidSpec("period must be at least one day".into()));
        }
        match &baseline {
            Baseline::Table(h) if h.is_empty() => {
                return Err(HazardError::InvalidSpec("empty hazard table".into()))
            }
            Baseline::Table(h) => {
                if let Some(bad) = h.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(HazardError::InvalidSpec(format!("hazard {bad} outside [0, 1]")));
                }
            }
            Baseline::Logistic(a) if a.is_empty() => {
                return Err(HazardError::InvalidSpec("empty intercept list".into()))
            }
            Baseline::Logistic(a) => {
                if a.iter().any(|v| v.is_nan()) {
                    return Err(HazardError::InvalidSpec("NaN intercept".into()));
                }
            }
        }
        for (i, c) in covariates.iter().enumerate() {
            if !matches!(c.pattern, FluentPattern::Collection(_)) {
                return Err(HazardError::InvalidSpec(format!(
                    "covariate {} must be an (isa ?x C) pattern",
                    c.pattern
                )));
            }
            if covariates[..i].iter().any(|o| o.pattern == c.pattern) {
                return Err(HazardError::InvalidSpec(format!("duplicate covariate {}", c.pattern)));
            }
        }
        Ok(HazardSpec {
            pattern,
            period_days,
            baseline,
            covariates,
        })
    }

    /// Constant-hazard table spec, handy for tests and fixtures.
    pub fn constant(pattern: FluentPattern, period_days: i64, h: f64) -> Result<Self, HazardError> {
        Self::new(pattern, period_days, Baseline::Table(vec![h]), Vec::new())
    }

    pub fn scheme(&self, origin: TimePoint) -> PeriodScheme {
        PeriodScheme::new(origin, self.period_days).expect("period validated on construction")
    }

    /// Parses `(hazard :for P :period N :h (...) | :alpha (...) [:cov ((P β) ...)])`.
    pub fn from_sexpr(e: &Sexpr) -> Result<Self, HazardError> {
        let bad = |m: &str| HazardError::InvalidSpec(format!("{m} in {e}"));
        if e.head() != Some("hazard") {
            return Err(bad("expected (hazard ...)"));
        }
        let items = e.as_list().expect("head implies list");
        let (positional, keywords) = crate::sexpr::split_keywords(&items[1..]).map_err(|m| bad(&m))?;
        if !positional.is_empty() {
            return Err(bad("unexpected positional argument"));
        }
        let mut pattern = None;
        let mut period = None;
        let mut baseline = None;
        let mut covariates = Vec::new();
        for (key, value) in keywords {
            match key {
                "for" => pattern = Some(FluentPattern::from_sexpr(value)?),
                "period" => {
                    let text = value.as_atom().ok_or_else(|| bad("bad :period"))?;
                    period = Some(crate::time::parse_duration_days(text).map_err(|err| bad(&err.to_string()))?);
                }
                "h" | "alpha" => {
                    let values = parse_numbers(value).ok_or_else(|| bad("bad number list"))?;
                    baseline = Some(if key == "h" {
                        Baseline::Table(values)
                    } else {
                        Baseline::Logistic(values)
                    });
                }
                "cov" => {
                    for entry in value.as_list().ok_or_else(|| bad("bad :cov"))? {
                        match entry.as_list() {
                            Some([p, beta]) => covariates.push(Covariate {
                                pattern: FluentPattern::from_sexpr(p)?,
                                beta: beta
                                    .as_atom()
                                    .and_then(|s| s.parse().ok())
                                    .ok_or_else(|| bad("bad covariate coefficient"))?,
                            }),
                            _ => return Err(bad("covariate entries are (pattern beta)")),
                        }
                    }
                }
                other => return Err(bad(&format!("unknown keyword :{other}"))),
            }
        }
        HazardSpec::new(
            pattern.ok_or_else(|| bad("missing :for"))?,
            period.ok_or_else(|| bad("missing :period"))?,
            baseline.ok_or_else(|| bad("missing :h or :alpha"))?,
            covariates,
        )
    }
}

fn parse_numbers(e: &Sexpr) -> Option<Vec<f64>> {
    e.as_list()?
        .iter()
        .map(|x| x.as_atom().and_then(|s| s.parse::<f64>().ok()))
        .collect()
}

impl fmt::Display for HazardSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(hazard :for {} :period {}", self.pattern, self.period_days)?;
        let (key, values) = match &self.baseline {
            Baseline::Table(h) => ("h", h),
            Baseline::Logistic(a) => ("alpha", a),
        };
        write!(f, " :{key} (")?;
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")?;
        if !self.covariates.is_empty() {
            f.write_str(" :cov (")?;
            for (i, c) in self.covariates.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "({} {})", c.pattern, c.beta)?;
            }
            f.write_str(")")?;
        }
        f.write_str(")")
    }
}

/// Covariate indicators per period; periods without a row are all-absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CovariateTrajectory {
    rows: Vec<Vec<bool>>,
}

impl CovariateTrajectory {
    pub fn none() -> Self {
        Self::default()
    }

    /// `rows[j - 1]` holds the indicators for period `j`.
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Self {
        CovariateTrajectory { rows }
    }

    /// Covariate `i` is present in period `j` iff one of `spans[i]`
    /// overlaps that period.
    pub fn from_spans(scheme: &PeriodScheme, spans: &[Vec<TimeInterval>], n_periods: u32) -> Self {
        if spans.iter().all(Vec::is_empty) {
            return Self::none();
        }
        let rows = (1..=n_periods)
            .map(|j| {
                let span = scheme.period_span(j).expect("j >= 1");
                spans.iter().map(|s| s.iter().any(|iv| iv.overlaps(&span))).collect()
            })
            .collect();
        CovariateTrajectory { rows }
    }

    /// Indicators for period `j`, zero-filled to `n` covariates when absent.
    pub fn at(&self, j: u32, n: usize) -> std::borrow::Cow<'_, [bool]> {
        match self.rows.get(j as usize - 1) {
            Some(row) => std::borrow::Cow::Borrowed(row),
            None => std::borrow::Cow::Owned(vec![false; n]),
        }
    }

    /// Reverses period numbering over the first `n_periods` rows, for
    /// projecting backwards from an end point.
    pub fn reversed(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.reverse();
        CovariateTrajectory { rows }
    }
}

fn logistic(alpha: f64, eta: f64) -> f64 {
    1.0 / (1.0 + (-alpha).exp() * (-eta).exp())
}

fn logit(h: f64) -> f64 {
    (h / (1.0 - h)).ln()
}

/// Hazard for period `j` under covariate indicators `x`.
pub fn hazard_at(spec: &HazardSpec, j: u32, x: &[bool]) -> Result<f64, HazardError> {
    assert!(j >= 1, "periods are numbered from 1");
    if x.len() != spec.covariates.len() {
        return Err(HazardError::CovariateMismatch {
            expected: spec.covariates.len(),
            found: x.len(),
        });
    }
    let eta: f64 = spec
        .covariates
        .iter()
        .zip(x)
        .filter(|(_, &on)| on)
        .map(|(c, _)| c.beta)
        .sum();
    let any_on = x.iter().any(|&on| on);
    Ok(match &spec.baseline {
        Baseline::Table(h) if !any_on => Baseline::value(h, j),
        Baseline::Table(h) => logistic(logit(Baseline::value(h, j)), eta),
        Baseline::Logistic(a) => logistic(Baseline::value(a, j), eta),
    })
}

/// `Pr(T > k)`.
pub fn survival(spec: &HazardSpec, k: u32, traj: &CovariateTrajectory) -> Result<f64, HazardError> {
    let n = spec.covariates.len();
    let mut s = 1.0;
    for j in 1..=k {
        s *= 1.0 - hazard_at(spec, j, &traj.at(j, n))?;
    }
    Ok(s)
}

/// `Pr(T = k)` for `k >= 1`.
pub fn event_time_pmf(spec: &HazardSpec, k: u32, traj: &CovariateTrajectory) -> Result<f64, HazardError> {
    assert!(k >= 1, "event periods are numbered from 1");
    let n = spec.covariates.len();
    Ok(hazard_at(spec, k, &traj.at(k, n))? * survival(spec, k - 1, traj)?)
}

/// Largest `k` with `survival(k) > alpha`.
pub fn survival_cutoff(
    spec: &HazardSpec,
    traj: &CovariateTrajectory,
    alpha: f64,
    horizon: u32,
) -> Result<u32, HazardError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(HazardError::InvalidThreshold(alpha));
    }
    let n = spec.covariates.len();
    let mut s = 1.0;
    for k in 1..=horizon {
        s *= 1.0 - hazard_at(spec, k, &traj.at(k, n))?;
        if s <= alpha {
            return Ok(k - 1);
        }
    }
    Err(HazardError::Unbounded { horizon })
}

/// `[start, start + k*·len]`, `k*` the last period boundary whose survival
/// exceeds `alpha`.
pub fn forward_interval(
    spec: &HazardSpec,
    start: TimePoint,
    traj: &CovariateTrajectory,
    alpha: f64,
    horizon: u32,
) -> Result<TimeInterval, HazardError> {
    let k = survival_cutoff(spec, traj, alpha, horizon)?;
    Ok(TimeInterval::new(start, start.plus_days(k as i64 * spec.period_days)).expect("k >= 0"))
}

/// Mirror of [`forward_interval`] ending at `end`; `traj` is indexed by
/// periods counted backwards from `end`.
pub fn backward_interval(
    spec: &HazardSpec,
    end: TimePoint,
    traj: &CovariateTrajectory,
    alpha: f64,
    horizon: u32,
) -> Result<TimeInterval, HazardError> {
    let k = survival_cutoff(spec, traj, alpha, horizon)?;
    Ok(TimeInterval::new(end.minus_days(k as i64 * spec.period_days), end).expect("k >= 0"))
}

/// Interval implied by the collection's Initial / Terminal / Bidirectional
/// marker and the entity's lifespan.
pub fn marker_interval(f: &Fluent, known_at: &TimeInterval, kb: &Kb) -> Option<TimeInterval> {
    let Fluent::Isa { entity, collection } = f else {
        return None;
    };
    let life = kb.existence(entity)?;
    let interval = if kb.has_marker(collection, Marker::Initial) {
        TimeInterval::new(life.start(), known_at.end())
    } else if kb.has_marker(collection, Marker::Terminal) {
        TimeInterval::new(known_at.start(), life.end())
    } else if kb.has_marker(collection, Marker::Bidirectional) {
        Ok(life)
    } else {
        return None;
    };
    interval.ok()
}

/// State that holds for a fixed duration from a date unless contradicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedDurationRule {
    pub fluent: Fluent,
    pub start: TimePoint,
    pub duration_days: i64,
}

impl FixedDurationRule {
    pub fn new(fluent: Fluent, start: TimePoint, duration_days: i64) -> Result<Self, HazardError> {
        if duration_days <= 0 {
            return Err(HazardError::InvalidSpec("duration must be positive".into()));
        }
        Ok(FixedDurationRule {
            fluent,
            start,
            duration_days,
        })
    }

    pub fn interval(&self) -> TimeInterval {
        TimeInterval::new(self.start, self.start.plus_days(self.duration_days)).expect("positive duration")
    }
}

/// `[start, start + duration]` of the matching rule with the latest start
/// not after `at`.
pub fn fixed_duration_interval(f: &Fluent, rules: &[FixedDurationRule], at: TimePoint) -> Option<TimeInterval> {
    rules
        .iter()
        .filter(|r| &r.fluent == f && r.start <= at)
        .max_by_key(|r| (r.start, r.duration_days))
        .map(FixedDurationRule::interval)
}

/// Hazard specs and fixed-duration defaults, immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct HazardRegistry {
    specs: BTreeMap<FluentPattern, HazardSpec>,
    fixed: Vec<FixedDurationRule>,
}

/// Outcome of [`resolve_hazard`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution<'a> {
    pub spec: &'a HazardSpec,
    /// Several patterns matched at the same specificity.
    pub ambiguous: bool,
}

impl HazardRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, spec: HazardSpec) -> Result<(), HazardError> {
        if self.specs.contains_key(&spec.pattern) {
            return Err(HazardError::InvalidSpec(format!("duplicate spec for {}", spec.pattern)));
        }
        self.specs.insert(spec.pattern.clone(), spec);
        Ok(())
    }

    pub fn add_fixed_duration(&mut self, rule: FixedDurationRule) {
        self.fixed.push(rule);
    }

    pub fn get(&self, pattern: &FluentPattern) -> Option<&HazardSpec> {
        self.specs.get(pattern)
    }

    pub fn specs(&self) -> impl Iterator<Item = &HazardSpec> {
        self.specs.values()
    }

    pub fn fixed_rules(&self) -> &[FixedDurationRule] {
        &self.fixed
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty() && self.fixed.is_empty()
    }
}

/// Picks the first candidate list with any registered spec; among equally
/// specific candidates the lexicographically smallest pattern wins.
fn pick<'a>(registry: &'a HazardRegistry, tiers: Vec<Vec<FluentPattern>>) -> Option<Resolution<'a>> {
    for tier in tiers {
        let mut hits: Vec<&HazardSpec> = tier.iter().filter_map(|p| registry.get(p)).collect();
        if hits.is_empty() {
            continue;
        }
        hits.sort_by_key(|s| s.pattern.to_string());
        hits.dedup_by_key(|s| s.pattern.to_string());
        let ambiguous = hits.len() > 1;
        if ambiguous {
            warn!(
                "ambiguous hazard specs {:?}; using {}",
                hits.iter().map(|s| s.pattern.to_string()).collect::<Vec<_>>(),
                hits[0].pattern
            );
        }
        return Some(Resolution {
            spec: hits[0],
            ambiguous,
        });
    }
    None
}

/// Groups `(name, distance)` pairs into tiers of equal distance.
fn tiers_by_distance<T>(items: Vec<(usize, T)>) -> Vec<Vec<T>> {
    let mut grouped: BTreeMap<usize, Vec<T>> = BTreeMap::new();
    for (d, item) in items {
        grouped.entry(d).or_default().push(item);
    }
    grouped.into_values().collect()
}

/// Most specific hazard spec for `f`.
///
/// For relations: argument-specific specs `(p, N, C)` with `C` the nearest
/// generalization of a type of the `N`th filler, then the bare predicate and
/// its generalizations. For `isa` fluents: the collection, then its
/// generalizations nearest first.
pub fn resolve_hazard<'a>(f: &Fluent, registry: &'a HazardRegistry, kb: &Kb) -> Option<Resolution<'a>> {
    match f {
        Fluent::Isa { collection, .. } => {
            let candidates = kb
                .genls_by_distance(collection)
                .into_iter()
                .map(|(c, d)| (d, FluentPattern::Collection(c)))
                .collect();
            pick(registry, tiers_by_distance(candidates))
        }
        Fluent::Rel { predicate, args } => {
            let mut argument = Vec::new();
            for (i, filler) in args.iter().enumerate() {
                for a in kb.assertions_about(filler) {
                    if let Some(c) = a.fluent.collection() {
                        for (g, d) in kb.genls_by_distance(c) {
                            argument.push((
                                d,
                                FluentPattern::Argument {
                                    predicate: predicate.clone(),
                                    position: i + 1,
                                    collection: g,
                                },
                            ));
                        }
                    }
                }
            }
            // Keep each pattern at its smallest distance.
            argument.sort();
            let mut seen = std::collections::BTreeSet::new();
            argument.retain(|(_, p)| seen.insert(p.clone()));
            let mut tiers = tiers_by_distance(argument);
            let bare: Vec<(usize, FluentPattern)> = kb
                .genl_preds_by_distance(predicate)
                .into_iter()
                .map(|(p, d)| (d, FluentPattern::Predicate(p)))
                .collect();
            tiers.extend(tiers_by_distance(bare));
            pick(registry, tiers)
        }
    }
}
