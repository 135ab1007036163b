//! Fitting discrete-time hazard models from episode data.
//!
//! Episodes are expanded into person-period records, aggregated into
//! `(period, covariates)` cells, and the logistic hazard model is fitted by
//! maximum likelihood with per-period (optionally pooled) intercepts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::hazard::{Baseline, Covariate, FluentPattern, HazardSpec};
use crate::time::{PeriodScheme, TimeInterval, TimePoint};

/// Probabilities are clamped to `[H_EPS, 1 - H_EPS]` inside logarithms.
const H_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("episode for {individual}: {message}")]
    InvalidEpisode { individual: String, message: String },
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },
    #[error("expected {expected} parameters, found {found}")]
    ParameterMismatch { expected: usize, found: usize },
    #[error("no person-period records to fit")]
    NoRecords,
    #[error("fit did not converge after {iterations} iterations; pass force to export anyway")]
    NotConverged { iterations: usize },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub individual: String,
    pub risk_start: TimePoint,
    pub observed_until: TimePoint,
    /// `None` when censored.
    pub event_time: Option<TimePoint>,
    pub covariates: Vec<(usize, TimeInterval)>,
}

impl Episode {
    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |message: String| LearnError::InvalidEpisode {
            individual: self.individual.clone(),
            message,
        };
        if self.risk_start >= self.observed_until {
            return Err(bad(format!(
                "risk start {} is not before end of observation {}",
                self.risk_start, self.observed_until
            )));
        }
        if let Some(t) = self.event_time {
            if t <= self.risk_start {
                return Err(bad(format!("event at {t} is not after risk start {}", self.risk_start)));
            }
            if t > self.observed_until {
                return Err(bad(format!("event at {t} is after end of observation {}", self.observed_until)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonPeriodRecord {
    pub individual: String,
    pub period: u32,
    pub x: Vec<bool>,
    pub event: bool,
}

/// One record per period from 1 through the event period, or through the
/// last fully observed period for censored episodes. A covariate is on in a
/// period when any of its spans overlaps the period.
pub fn build_person_period(episodes: &[Episode], period_days: i64) -> Result<Vec<PersonPeriodRecord>, LearnError> {
    let n_cov = episodes
        .iter()
        .flat_map(|e| e.covariates.iter().map(|(i, _)| i + 1))
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    for ep in episodes {
        ep.validate()?;
        let scheme = PeriodScheme::new(ep.risk_start, period_days).map_err(|e| LearnError::InvalidEpisode {
            individual: ep.individual.clone(),
            message: e.to_string(),
        })?;
        let last = match ep.event_time {
            Some(t) => scheme.period_index(t).expect("event after risk start"),
            None => scheme.complete_periods_until(ep.observed_until),
        };
        for j in 1..=last {
            let span = scheme.period_span(j).expect("j >= 1");
            let mut x = vec![false; n_cov];
            for (i, iv) in &ep.covariates {
                if iv.overlaps(&span) {
                    x[*i] = true;
                }
            }
            out.push(PersonPeriodRecord {
                individual: ep.individual.clone(),
                period: j,
                x,
                event: ep.event_time.is_some() && j == last,
            });
        }
    }
    Ok(out)
}

fn logistic(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

fn log_terms(h: f64) -> (f64, f64) {
    let h = h.clamp(H_EPS, 1.0 - H_EPS);
    (h.ln(), (1.0 - h).ln())
}

fn linear(alpha: &[f64], beta: &[f64], r: &PersonPeriodRecord) -> Result<f64, LearnError> {
    if r.x.len() != beta.len() {
        return Err(LearnError::ParameterMismatch {
            expected: beta.len(),
            found: r.x.len(),
        });
    }
    if alpha.is_empty() {
        return Err(LearnError::ParameterMismatch { expected: 1, found: 0 });
    }
    let a = alpha[(r.period as usize - 1).min(alpha.len() - 1)];
    Ok(a + beta.iter().zip(&r.x).filter(|(_, &on)| on).map(|(b, _)| b).sum::<f64>())
}

/// `Σ EVENT·ln h + (1 − EVENT)·ln(1 − h)` with `h` the logistic hazard of
/// intercept `alpha[j-1]` (the last intercept covers later periods) plus the
/// active coefficients.
pub fn log_likelihood(alpha: &[f64], beta: &[f64], records: &[PersonPeriodRecord]) -> Result<f64, LearnError> {
    let mut ll = 0.0;
    for r in records {
        let (lh, l1h) = log_terms(logistic(linear(alpha, beta, r)?));
        ll += if r.event { lh } else { l1h };
    }
    Ok(ll)
}

/// Analytic gradient of [`log_likelihood`] with respect to `(alpha, beta)`.
pub fn gradient(alpha: &[f64], beta: &[f64], records: &[PersonPeriodRecord]) -> Result<(Vec<f64>, Vec<f64>), LearnError> {
    let mut ga = vec![0.0; alpha.len()];
    let mut gb = vec![0.0; beta.len()];
    for r in records {
        let resid = r.event as u8 as f64 - logistic(linear(alpha, beta, r)?);
        ga[(r.period as usize - 1).min(alpha.len() - 1)] += resid;
        for (g, &on) in gb.iter_mut().zip(&r.x) {
            if on {
                *g += resid;
            }
        }
    }
    Ok((ga, gb))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Convergence threshold on the max-norm of the projected gradient.
    pub tolerance: f64,
    /// Parameters are capped at `±bound`; reaching it flags separation.
    pub bound: f64,
    /// Merge periods without events into a neighbouring period group.
    pub pool_sparse: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iterations: 500,
            tolerance: 1e-6,
            bound: 20.0,
            pool_sparse: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// One intercept per period group.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Inclusive period ranges covered by each intercept.
    pub groups: Vec<(u32, u32)>,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Some parameter hit the bound.
    pub separation: bool,
    /// Indexed by period - 1.
    pub at_risk: Vec<u64>,
    pub events: Vec<u64>,
}

impl FitResult {
    pub fn n_periods(&self) -> u32 {
        self.at_risk.len() as u32
    }

    /// Intercept for period `j` (later periods reuse the last group).
    pub fn period_alpha(&self, j: u32) -> f64 {
        self.groups
            .iter()
            .position(|&(lo, hi)| lo <= j && j <= hi)
            .map(|g| self.alpha[g])
            .unwrap_or(*self.alpha.last().expect("at least one group"))
    }

    /// Baseline hazard (all covariates off) for period `j`.
    pub fn period_hazard(&self, j: u32) -> f64 {
        logistic(self.period_alpha(j))
    }
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "converged={} iterations={} log_likelihood={:.6} separation={}",
            self.converged, self.iterations, self.log_likelihood, self.separation
        )?;
        writeln!(f, "{:>6} {:>10} {:>8} {:>8} {:>7}", "period", "alpha", "h", "at_risk", "events")?;
        for j in 1..=self.n_periods() {
            writeln!(
                f,
                "{:>6} {:>10.5} {:>8.5} {:>8} {:>7}",
                j,
                self.period_alpha(j),
                self.period_hazard(j),
                self.at_risk[j as usize - 1],
                self.events[j as usize - 1]
            )?;
        }
        for (i, b) in self.beta.iter().enumerate() {
            writeln!(f, "beta[{i}] = {b:.5}")?;
        }
        Ok(())
    }
}

/// Aggregated records: `(group, covariates) -> (at risk, events)`.
struct Cells {
    cells: Vec<(usize, Vec<bool>, f64, f64)>,
    n_groups: usize,
    n_cov: usize,
}

impl Cells {
    fn n_params(&self) -> usize {
        self.n_groups + self.n_cov
    }

    fn eta(&self, theta: &[f64], g: usize, x: &[bool]) -> f64 {
        theta[g]
            + x.iter()
                .enumerate()
                .filter(|(_, &on)| on)
                .map(|(k, _)| theta[self.n_groups + k])
                .sum::<f64>()
    }

    fn ll(&self, theta: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|(g, x, n, e)| {
                let (lh, l1h) = log_terms(logistic(self.eta(theta, *g, x)));
                e * lh + (n - e) * l1h
            })
            .sum()
    }

    /// Log-likelihood, gradient and (negative definite) Hessian.
    fn evaluate(&self, theta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let p = self.n_params();
        let mut grad = DVector::zeros(p);
        let mut hess = DMatrix::zeros(p, p);
        let mut ll = 0.0;
        let mut idx = Vec::with_capacity(1 + self.n_cov);
        for (g, x, n, e) in &self.cells {
            let h = logistic(self.eta(theta, *g, x));
            let (lh, l1h) = log_terms(h);
            ll += e * lh + (n - e) * l1h;
            idx.clear();
            idx.push(*g);
            idx.extend(x.iter().enumerate().filter(|(_, &on)| on).map(|(k, _)| self.n_groups + k));
            let resid = e - n * h;
            let w = n * h * (1.0 - h);
            for &a in &idx {
                grad[a] += resid;
                for &b in &idx {
                    hess[(a, b)] -= w;
                }
            }
        }
        (ll, grad, hess)
    }
}

/// Period groups: each period on its own, or with event-free periods merged
/// into the preceding group (the following one for a leading run).
fn period_groups(events: &[u64], pool: bool) -> Vec<(u32, u32)> {
    let n = events.len() as u32;
    if !pool {
        return (1..=n).map(|j| (j, j)).collect();
    }
    let mut groups: Vec<(u32, u32, u64)> = Vec::new();
    for j in 1..=n {
        let e = events[j as usize - 1];
        match groups.last_mut() {
            Some(last) if e == 0 || last.2 == 0 => {
                last.1 = j;
                last.2 += e;
            }
            _ => groups.push((j, j, e)),
        }
    }
    groups.into_iter().map(|(lo, hi, _)| (lo, hi)).collect()
}

/// Maximum-likelihood fit of per-group intercepts and covariate
/// coefficients by damped Newton ascent with backtracking line search,
/// falling back to diagonally scaled gradient steps when the Hessian is not
/// negative definite. Parameters are kept inside `±config.bound`.
pub fn fit(records: &[PersonPeriodRecord], config: &FitConfig) -> Result<FitResult, LearnError> {
    let n_periods = records.iter().map(|r| r.period).max().ok_or(LearnError::NoRecords)?;
    let n_cov = records[0].x.len();
    if let Some(r) = records.iter().find(|r| r.x.len() != n_cov) {
        return Err(LearnError::ParameterMismatch {
            expected: n_cov,
            found: r.x.len(),
        });
    }
    let mut at_risk = vec![0u64; n_periods as usize];
    let mut events = vec![0u64; n_periods as usize];
    for r in records {
        at_risk[r.period as usize - 1] += 1;
        events[r.period as usize - 1] += r.event as u64;
    }
    let groups = period_groups(&events, config.pool_sparse);
    let mut group_of = vec![0usize; n_periods as usize];
    for (g, &(lo, hi)) in groups.iter().enumerate() {
        for j in lo..=hi {
            group_of[j as usize - 1] = g;
        }
    }

    let mut agg: BTreeMap<(usize, Vec<bool>), (f64, f64)> = BTreeMap::new();
    for r in records {
        let cell = agg.entry((group_of[r.period as usize - 1], r.x.clone())).or_default();
        cell.0 += 1.0;
        cell.1 += r.event as u8 as f64;
    }
    let cells = Cells {
        cells: agg.into_iter().map(|((g, x), (n, e))| (g, x, n, e)).collect(),
        n_groups: groups.len(),
        n_cov,
    };

    // Start from the empirical group hazards with no covariate effects.
    let bound = config.bound;
    let mut theta: Vec<f64> = groups
        .iter()
        .map(|&(lo, hi)| {
            let n: u64 = at_risk[lo as usize - 1..hi as usize].iter().sum();
            let e: u64 = events[lo as usize - 1..hi as usize].iter().sum();
            // Groups without events (or without survivors) have their
            // estimate at infinity; they start pinned at the bound.
            if e == 0 {
                return -bound;
            }
            if e == n {
                return bound;
            }
            let h = e as f64 / n as f64;
            (h / (1.0 - h)).ln()
        })
        .chain(std::iter::repeat_n(0.0, n_cov))
        .collect();

    let p = cells.n_params();
    let mut converged = false;
    let mut iterations = 0;
    let mut ll = cells.ll(&theta);
    while iterations < config.max_iterations {
        let (cur, grad, hess) = cells.evaluate(&theta);
        ll = cur;
        // Coordinates pinned at a bound with the gradient pointing outwards.
        let free: Vec<usize> = (0..p)
            .filter(|&i| !((theta[i] <= -bound && grad[i] < 0.0) || (theta[i] >= bound && grad[i] > 0.0)))
            .collect();
        let pg_norm = free.iter().map(|&i| grad[i].abs()).fold(0.0, f64::max);
        if pg_norm < config.tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut dir = vec![0.0; p];
        let m = free.len();
        let neg_h = DMatrix::from_fn(m, m, |a, b| -hess[(free[a], free[b])]);
        let g_free = DVector::from_fn(m, |a, _| grad[free[a]]);
        let newton = neg_h.clone().cholesky().map(|c| c.solve(&g_free));
        match newton {
            Some(d) if d.dot(&g_free) > 0.0 => {
                for (a, &i) in free.iter().enumerate() {
                    dir[i] = d[a];
                }
            }
            _ => {
                for (a, &i) in free.iter().enumerate() {
                    dir[i] = grad[i] / neg_h[(a, a)].max(1e-8);
                }
            }
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = theta
                .iter()
                .zip(&dir)
                .map(|(t, d)| (t + step * d).clamp(-bound, bound))
                .collect();
            let moved: f64 = cand.iter().zip(&theta).zip(grad.iter()).map(|((c, t), g)| (c - t) * g).sum();
            let cand_ll = cells.ll(&cand);
            if cand_ll >= ll + 1e-4 * moved && cand_ll >= ll {
                accepted = Some((cand, cand_ll));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((cand, cand_ll)) => {
                let stalled = cand == theta;
                theta = cand;
                ll = cand_ll;
                if stalled {
                    break;
                }
            }
            None => break,
        }
    }
    if !converged {
        log::warn!("hazard fit stopped after {iterations} iterations without converging");
    }
    let separation = theta.iter().any(|t| t.abs() >= bound);
    if separation {
        log::warn!("parameter reached the bound of {bound}; data may be separated");
    }
    let beta = theta.split_off(groups.len());
    Ok(FitResult {
        alpha: theta,
        beta,
        groups,
        log_likelihood: ll,
        converged,
        iterations,
        separation,
        at_risk,
        events,
    })
}

/// Hazard spec with one logistic intercept per observed period and the
/// fitted coefficients attached to `covariates` in index order.
pub fn export_spec(
    fit: &FitResult,
    pattern: FluentPattern,
    period_days: i64,
    covariates: &[FluentPattern],
    force: bool,
) -> Result<HazardSpec, LearnError> {
    if !fit.converged && !force {
        return Err(LearnError::NotConverged {
            iterations: fit.iterations,
        });
    }
    if covariates.len() != fit.beta.len() {
        return Err(LearnError::ParameterMismatch {
            expected: fit.beta.len(),
            found: covariates.len(),
        });
    }
    let alpha = (1..=fit.n_periods()).map(|j| fit.period_alpha(j)).collect();
    let covs = covariates
        .iter()
        .zip(&fit.beta)
        .map(|(p, &beta)| Covariate {
            pattern: p.clone(),
            beta,
        })
        .collect();
    HazardSpec::new(pattern, period_days, Baseline::Logistic(alpha), covs)
        .map_err(|e| LearnError::Io(e.to_string()))
}

fn parse_covariate_token(tok: &str) -> Result<(usize, TimeInterval), String> {
    let (idx, span) = tok
        .split_once(':')
        .ok_or_else(|| format!("covariate `{tok}` is not idx:start..end"))?;
    let (a, b) = span
        .split_once("..")
        .ok_or_else(|| format!("covariate `{tok}` is not idx:start..end"))?;
    let idx = idx.parse::<usize>().map_err(|_| format!("bad covariate index `{idx}`"))?;
    let a: TimePoint = a.parse().map_err(|e| format!("{e}"))?;
    let b: TimePoint = b.parse().map_err(|e| format!("{e}"))?;
    let iv = TimeInterval::new(a, b).map_err(|e| e.to_string())?;
    Ok((idx, iv))
}

/// Reads `individual,risk_start,observed_until,event_time,covariates` rows
/// (header required; empty `event_time` means censored; covariates are
/// space-separated `idx:start..end` tokens).
pub fn read_episodes<R: Read>(reader: R, source_name: &str) -> Result<Vec<Episode>, LearnError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| LearnError::Parse {
            source_name: source_name.to_string(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let err = |message: String| LearnError::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        if row.len() < 3 {
            return Err(err(format!("expected at least 3 fields, found {}", row.len())));
        }
        let date = |i: usize| -> Result<TimePoint, LearnError> { row[i].parse().map_err(|e| err(format!("{e}"))) };
        let event_time = match row.get(3) {
            Some(s) if !s.is_empty() => Some(date(3)?),
            _ => None,
        };
        let covariates = row
            .get(4)
            .unwrap_or("")
            .split_whitespace()
            .map(parse_covariate_token)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let ep = Episode {
            individual: row[0].to_string(),
            risk_start: date(1)?,
            observed_until: date(2)?,
            event_time,
            covariates,
        };
        ep.validate().map_err(|e| err(e.to_string()))?;
        out.push(ep);
    }
    Ok(out)
}

pub fn write_episodes<W: Write>(writer: W, episodes: &[Episode]) -> Result<(), LearnError> {
    let io = |e: csv::Error| LearnError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["individual", "risk_start", "observed_until", "event_time", "covariates"])
        .map_err(io)?;
    for ep in episodes {
        let covs: Vec<String> = ep
            .covariates
            .iter()
            .map(|(i, iv)| format!("{i}:{}..{}", iv.start(), iv.end()))
            .collect();
        w.write_record([
            ep.individual.clone(),
            ep.risk_start.to_string(),
            ep.observed_until.to_string(),
            ep.event_time.map(|t| t.to_string()).unwrap_or_default(),
            covs.join(" "),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| LearnError::Io(e.to_string()))
}
