//! Scoring query sets in M1 and M2 against an answer key.
//!
//! Verdicts are True or Unknown. Unknown counts as wrong against a True key
//! and right against a False key; the engine never answers False.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{Corpus, Query};
use crate::hazard::{survival, CovariateTrajectory};
use crate::projector::{Mode, Projector, Verdict};
use crate::time::TimeInterval;

pub const REPORT_FILE: &str = "report.csv";
pub const VERDICTS_FILE: &str = "verdicts.csv";
pub const CURVES_FILE: &str = "curves.csv";
pub const TOTAL: &str = "total";

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{source_name}:{line}: {message}")]
    Answers {
        source_name: String,
        line: u64,
        message: String,
    },
    #[error("query {0} has no entry in the answer key")]
    MissingAnswer(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryVerdict {
    pub id: String,
    pub set: String,
    pub mode: Mode,
    pub truth: bool,
    pub verdict: Verdict,
    pub interval: Option<TimeInterval>,
    pub source: String,
}

impl QueryVerdict {
    pub fn correct(&self) -> bool {
        (self.verdict == Verdict::True) == self.truth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetScore {
    pub set: String,
    pub mode: Mode,
    pub n: usize,
    pub correct: usize,
}

impl SetScore {
    pub fn pct_correct(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.n as f64
        }
    }
}

/// Relative improvement in percent: 28% to 56% is 100%.
pub fn improvement(m1_pct: f64, m2_pct: f64) -> Option<f64> {
    (m1_pct > 0.0).then(|| (m2_pct - m1_pct) / m1_pct * 100.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Per set and mode in first-appearance order, then one total per mode.
    pub scores: Vec<SetScore>,
    pub verdicts: Vec<QueryVerdict>,
    /// Queries skipped because they mention unknown symbols.
    pub invalid: Vec<(String, String)>,
}

impl EvalReport {
    pub fn score(&self, set: &str, mode: Mode) -> Option<&SetScore> {
        self.scores.iter().find(|s| s.set == set && s.mode == mode)
    }

    pub fn report_csv(&self) -> String {
        let mut out = String::from("query_set,mode,n,pct_correct,improvement\n");
        for s in &self.scores {
            let imp = match s.mode {
                Mode::M1 => "-".to_string(),
                Mode::M2 => match self.score(&s.set, Mode::M1).and_then(|m1| improvement(m1.pct_correct(), s.pct_correct())) {
                    Some(v) => format!("{v:.2}"),
                    None => "NA".to_string(),
                },
            };
            writeln!(out, "{},{},{},{:.2},{}", s.set, s.mode, s.n, s.pct_correct(), imp).expect("string write");
        }
        out
    }

    pub fn verdicts_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["query_id", "set", "mode", "truth", "verdict", "correct", "interval", "source"])
            .expect("in memory");
        for v in &self.verdicts {
            w.write_record([
                v.id.clone(),
                v.set.clone(),
                v.mode.to_string(),
                if v.truth { "True" } else { "False" }.to_string(),
                v.verdict.to_string(),
                v.correct().to_string(),
                v.interval.map(|i| i.to_string()).unwrap_or_default(),
                v.source.clone(),
            ])
            .expect("in memory");
        }
        String::from_utf8(w.into_inner().expect("in memory")).expect("utf8")
    }
}

/// Reads `query_id,truth` rows with a header; truth is True or False.
pub fn read_answers(text: &str, source_name: &str) -> Result<BTreeMap<String, bool>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for row in rdr.records() {
        let err = |line: u64, message: String| EvalError::Answers {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let row = row.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let truth = match row.get(1).map(str::to_ascii_lowercase).as_deref() {
            Some("true") => true,
            Some("false") => false,
            other => return Err(err(line, format!("truth must be True or False, found {other:?}"))),
        };
        out.insert(row[0].to_string(), truth);
    }
    Ok(out)
}

/// Answers every valid query in each mode concurrently over the shared
/// corpus. A query's own `:alpha` overrides `alpha`; its `:mode` is ignored.
pub fn run_eval(
    corpus: &Corpus,
    queries: &[Query],
    answers: &BTreeMap<String, bool>,
    modes: &[Mode],
    alpha: f64,
) -> Result<EvalReport, EvalError> {
    let projector = Projector::new(corpus);
    let mut invalid = Vec::new();
    let mut valid = Vec::new();
    for q in queries {
        let truth = *answers.get(&q.id).ok_or_else(|| EvalError::MissingAnswer(q.id.clone()))?;
        match corpus.check_symbols(&q.fluent) {
            Ok(()) => valid.push((q, truth)),
            Err(msg) => invalid.push((q.id.clone(), msg)),
        }
    }
    if !invalid.is_empty() {
        log::warn!("{} queries mention unknown symbols and were skipped", invalid.len());
    }

    let jobs: Vec<(&Query, bool, Mode)> = valid
        .iter()
        .flat_map(|&(q, t)| modes.iter().map(move |&m| (q, t, m)))
        .collect();
    let verdicts: Vec<QueryVerdict> = jobs
        .par_iter()
        .map(|&(q, truth, mode)| {
            let a = projector.answer(&q.fluent, &q.time, mode, q.alpha.unwrap_or(alpha));
            QueryVerdict {
                id: q.id.clone(),
                set: q.set.clone(),
                mode,
                truth,
                verdict: a.verdict,
                interval: a.interval,
                source: match (a.verdict, a.projected) {
                    (Verdict::Unknown, _) => String::new(),
                    (Verdict::True, None) => "known".into(),
                    (Verdict::True, Some(s)) => s.to_string(),
                },
            }
        })
        .collect();

    let mut sets: Vec<&str> = Vec::new();
    for (q, _) in &valid {
        if !sets.contains(&q.set.as_str()) {
            sets.push(&q.set);
        }
    }
    let mut scores = Vec::new();
    for set in sets.iter().copied().chain([TOTAL]) {
        for &mode in modes {
            let rows = verdicts.iter().filter(|v| v.mode == mode && (set == TOTAL || v.set == set));
            let (n, correct) = rows.fold((0, 0), |(n, c), v| (n + 1, c + v.correct() as usize));
            scores.push(SetScore {
                set: set.to_string(),
                mode,
                n,
                correct,
            });
        }
    }
    Ok(EvalReport {
        scores,
        verdicts,
        invalid,
    })
}

/// `pattern,period,survival` for periods `0..=periods` of every hazard spec
/// with all covariates off.
pub fn curves_csv(corpus: &Corpus, periods: u32) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pattern", "period", "survival"]).expect("in memory");
    let none = CovariateTrajectory::none();
    for spec in corpus.hazards.specs() {
        let mut s = 1.0;
        for k in 0..=periods {
            if k > 0 {
                s = survival(spec, k, &none).unwrap_or(s);
            }
            w.write_record([spec.pattern.to_string(), k.to_string(), format!("{s:.10}")])
                .expect("in memory");
        }
    }
    String::from_utf8(w.into_inner().expect("in memory")).expect("utf8")
}

/// Writes `report.csv`, `verdicts.csv` and `curves.csv` into `dir`.
pub fn emit_report(report: &EvalReport, corpus: &Corpus, dir: &Path) -> Result<(), EvalError> {
    let io = |path: &Path, source| EvalError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (name, text) in [
        (REPORT_FILE, report.report_csv()),
        (VERDICTS_FILE, report.verdicts_csv()),
        (CURVES_FILE, curves_csv(corpus, 100)),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| io(&path, e))?;
    }
    Ok(())
}
