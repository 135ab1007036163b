//! Day-granular time points, closed intervals and numbered risk periods.
//!
//! Every temporal qualification in the engine reduces to a [`TimePoint`]
//! (a day number) or a closed [`TimeInterval`]. A [`PeriodScheme`] splits
//! the time after a risk-period origin into half-open periods
//! `(origin + (j-1)·len, origin + j·len]`, numbered from 1.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("invalid date `{0}` (expected YYYY-MM-DD)")]
    InvalidDate(String),
    #[error("invalid duration `{0}`")]
    InvalidDuration(String),
    #[error("interval start {start} is after end {end}")]
    Inverted { start: TimePoint, end: TimePoint },
    #[error("{t} is not after the risk-period origin {origin}")]
    BeforeRiskPeriod { origin: TimePoint, t: TimePoint },
    #[error("period length must be at least one day")]
    ZeroPeriod,
    #[error("period index must be at least 1")]
    ZeroIndex,
}

/// Days since 1970-01-01.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(i64);

const UNIX_EPOCH_FROM_CE: i64 = 719_163;

impl TimePoint {
    pub const fn from_day_number(days: i64) -> Self {
        TimePoint(days)
    }

    pub const fn day_number(self) -> i64 {
        self.0
    }

    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<Self, TimeError> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(Self::from_date)
            .ok_or_else(|| TimeError::InvalidDate(format!("{year:04}-{month:02}-{day:02}")))
    }

    fn from_date(date: NaiveDate) -> Self {
        TimePoint(date.num_days_from_ce() as i64 - UNIX_EPOCH_FROM_CE)
    }

    fn to_date(self) -> Option<NaiveDate> {
        i32::try_from(self.0 + UNIX_EPOCH_FROM_CE)
            .ok()
            .and_then(NaiveDate::from_num_days_from_ce_opt)
    }

    pub fn year(self) -> i32 {
        self.to_date().map(|d| d.year()).unwrap_or(i32::MAX)
    }

    pub fn plus_days(self, days: i64) -> Self {
        TimePoint(self.0 + days)
    }

    pub fn minus_days(self, days: i64) -> Self {
        TimePoint(self.0 - days)
    }

    pub fn days_since(self, earlier: TimePoint) -> i64 {
        self.0 - earlier.0
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_date() {
            Some(d) => write!(f, "{:04}-{:02}-{:02}", d.year(), d.month(), d.day()),
            None => write!(f, "day#{}", self.0),
        }
    }
}

impl FromStr for TimePoint {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TimeError::InvalidDate(s.to_string());
        // Leading sign is not part of the accepted form; split on the two dashes.
        let mut parts = s.splitn(3, '-');
        let (y, m, d) = match (parts.next(), parts.next(), parts.next()) {
            (Some(y), Some(m), Some(d)) if !y.is_empty() => (y, m, d),
            _ => return Err(bad()),
        };
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        let day: u32 = d.parse().map_err(|_| bad())?;
        TimePoint::from_ymd(year, month, day).map_err(|_| bad())
    }
}

/// Closed interval `[start, end]` of days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeInterval {
    start: TimePoint,
    end: TimePoint,
}

impl TimeInterval {
    /// Stand-in for eternal (time-independent) assertions.
    pub const ALWAYS: TimeInterval = TimeInterval {
        start: TimePoint(-719_162),
        end: TimePoint(2_932_896),
    };

    pub fn new(start: TimePoint, end: TimePoint) -> Result<Self, TimeError> {
        if start > end {
            return Err(TimeError::Inverted { start, end });
        }
        Ok(TimeInterval { start, end })
    }

    pub fn point(t: TimePoint) -> Self {
        TimeInterval { start: t, end: t }
    }

    /// The full calendar year `[Jan 1, Dec 31]`.
    pub fn year(year: i32) -> Result<Self, TimeError> {
        Ok(TimeInterval {
            start: TimePoint::from_ymd(year, 1, 1)?,
            end: TimePoint::from_ymd(year, 12, 31)?,
        })
    }

    pub fn start(&self) -> TimePoint {
        self.start
    }

    pub fn end(&self) -> TimePoint {
        self.end
    }

    pub fn len_days(&self) -> i64 {
        self.end.days_since(self.start) + 1
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn subsumes(&self, inner: &TimeInterval) -> bool {
        subsumes(self, inner)
    }

    pub fn overlaps(&self, other: &TimeInterval) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn intersect(&self, other: &TimeInterval) -> Option<TimeInterval> {
        intersect(self, other)
    }

    pub fn hull(&self, other: &TimeInterval) -> TimeInterval {
        TimeInterval {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(interval {} {})", self.start, self.end)
    }
}

/// True iff `inner` lies entirely within `outer`.
pub fn subsumes(outer: &TimeInterval, inner: &TimeInterval) -> bool {
    outer.start <= inner.start && inner.end <= outer.end
}

pub fn intersect(a: &TimeInterval, b: &TimeInterval) -> Option<TimeInterval> {
    let start = a.start.max(b.start);
    let end = a.end.min(b.end);
    (start <= end).then_some(TimeInterval { start, end })
}

/// Numbered periods after a risk-period origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeriodScheme {
    origin: TimePoint,
    period_days: i64,
}

impl PeriodScheme {
    pub fn new(origin: TimePoint, period_days: i64) -> Result<Self, TimeError> {
        if period_days < 1 {
            return Err(TimeError::ZeroPeriod);
        }
        Ok(PeriodScheme {
            origin,
            period_days,
        })
    }

    pub fn origin(&self) -> TimePoint {
        self.origin
    }

    pub fn period_days(&self) -> i64 {
        self.period_days
    }

    /// 1-based index of the period containing `t`.
    pub fn period_index(&self, t: TimePoint) -> Result<u32, TimeError> {
        let elapsed = t.days_since(self.origin);
        if elapsed <= 0 {
            return Err(TimeError::BeforeRiskPeriod {
                origin: self.origin,
                t,
            });
        }
        // ceil(elapsed / len) for positive elapsed
        Ok(((elapsed - 1) / self.period_days + 1) as u32)
    }

    /// Closed-day rendering of period `j`: the day after the open boundary
    /// through the closing day.
    pub fn period_span(&self, j: u32) -> Result<TimeInterval, TimeError> {
        if j == 0 {
            return Err(TimeError::ZeroIndex);
        }
        let j = j as i64;
        Ok(TimeInterval {
            start: self.origin.plus_days((j - 1) * self.period_days + 1),
            end: self.origin.plus_days(j * self.period_days),
        })
    }

    /// Closing day of period `k` (the origin itself for `k = 0`).
    pub fn boundary(&self, k: u32) -> TimePoint {
        self.origin.plus_days(k as i64 * self.period_days)
    }

    /// Number of periods that end on or before `t`.
    pub fn complete_periods_until(&self, t: TimePoint) -> u32 {
        let elapsed = t.days_since(self.origin);
        if elapsed <= 0 {
            0
        } else {
            (elapsed / self.period_days) as u32
        }
    }
}

/// Parses duration literals: a bare day count (`365`), `Nd`, `Nday(s)`,
/// `Nmonth(s)` (30 days each) or `Nyear(s)` (365 days each).
pub fn parse_duration_days(s: &str) -> Result<i64, TimeError> {
    let bad = || TimeError::InvalidDuration(s.to_string());
    let split = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let n: i64 = num.parse().map_err(|_| bad())?;
    let per = match unit {
        "" | "d" | "day" | "days" => 1,
        "month" | "months" => 30,
        "year" | "years" => 365,
        _ => return Err(bad()),
    };
    if n <= 0 {
        return Err(bad());
    }
    Ok(n * per)
}
