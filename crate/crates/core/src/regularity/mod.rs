//! Numerical checkers for the regularity and growth conditions, with
//! witnesses.
//!
//! Every checker evaluates its inequality on a tower-spaced grid and applies
//! one rule. Samples past the last defined value are dropped; the rest is the
//! sampled range. A condition is satisfied on that range when it holds on an
//! unbroken tail of at least [`MIN_TAIL`] samples reaching its top, and the
//! witness threshold is the first sample of that tail. Otherwise the last
//! explicit failure is a counterexample, unless the range was cut short by
//! undefined values (the model's domain ended before the question could be
//! settled) or there is no failure at all: then the verdict is inconclusive. Comparisons too close to call at tower precision break a
//! tail without counting as failures.

mod checks;

use std::fmt;
use std::str::FromStr;

pub use checks::*;

use crate::error::{Error, Result};
use crate::tower::{TowerReal, MANTISSA_TOL};

/// Samples in the holding tail needed for `SATISFIED_ON_RANGE`: half a level
/// of the default grid.
pub const MIN_TAIL: usize = 32;

/// Default menu of `k` values searched for log-regularity conditions.
pub const DEFAULT_K_GRID: [f64; 6] = [1.25, 1.5, 2.0, 3.0, 5.0, 10.0];

/// Default menu of `eps` values.
pub const DEFAULT_EPS_MENU: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    SatisfiedOnRange,
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SatisfiedOnRange => "SATISFIED_ON_RANGE",
            Verdict::Violated => "VIOLATED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "SATISFIED_ON_RANGE" => Ok(Verdict::SatisfiedOnRange),
            "VIOLATED" => Ok(Verdict::Violated),
            "INCONCLUSIVE" => Ok(Verdict::Inconclusive),
            other => Err(Error::Parse(format!("unknown verdict `{other}`"))),
        }
    }
}

/// Result of evaluating an inequality at one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    /// Both sides agree to within tower precision, so the sample cannot
    /// decide the inequality (typically factors absorbed at high levels).
    Tied,
    /// Some quantity is undefined there (an iterated log of a non-positive
    /// number, a radius outside a truncated series' domain, ...).
    Undefined,
}

impl Outcome {
    /// `lhs >= rhs`.
    pub fn ge(lhs: Result<TowerReal>, rhs: Result<TowerReal>) -> Self {
        Self::compare(lhs, rhs)
    }

    /// `lhs > rhs`. Same as [`ge`](Self::ge) at tower precision, kept for
    /// readability at call sites of strict inequalities.
    pub fn gt(lhs: Result<TowerReal>, rhs: Result<TowerReal>) -> Self {
        Self::compare(lhs, rhs)
    }

    fn compare(lhs: Result<TowerReal>, rhs: Result<TowerReal>) -> Self {
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a.approx_eq(&b, MANTISSA_TOL) => Outcome::Tied,
            (Ok(a), Ok(b)) => Self::from_bool(a > b),
            _ => Outcome::Undefined,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }

    /// Both conditions: any failure fails, then undefined, then tied.
    pub fn and(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Fails, _) | (_, Outcome::Fails) => Outcome::Fails,
            (Outcome::Undefined, _) | (_, Outcome::Undefined) => Outcome::Undefined,
            (Outcome::Tied, _) | (_, Outcome::Tied) => Outcome::Tied,
            _ => Outcome::Holds,
        }
    }
}

/// The finite-range decision for one inequality on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    pub verdict: Verdict,
    /// First sample of the holding tail.
    pub threshold: Option<TowerReal>,
    /// Last sample where the inequality failed.
    pub counterexample: Option<TowerReal>,
    /// Samples where the inequality was defined.
    pub samples: usize,
    pub range: Option<(TowerReal, TowerReal)>,
}

impl Scan {
    pub fn run(points: &[TowerReal], mut cond: impl FnMut(&TowerReal) -> Outcome) -> Scan {
        let outcomes: Vec<Outcome> = points.iter().map(&mut cond).collect();
        Self::from_outcomes(points, &outcomes)
    }

    pub fn from_outcomes(points: &[TowerReal], outcomes: &[Outcome]) -> Scan {
        debug_assert_eq!(points.len(), outcomes.len());
        let outcomes_len = outcomes.len();
        let samples = outcomes.iter().filter(|o| **o != Outcome::Undefined).count();
        let end = outcomes
            .iter()
            .rposition(|o| *o != Outcome::Undefined)
            .map_or(0, |i| i + 1);
        let (points, outcomes) = (&points[..end], &outcomes[..end]);
        let range = points.first().zip(points.last()).map(|(a, b)| (*a, *b));
        let tail_start = outcomes
            .iter()
            .rposition(|o| *o != Outcome::Holds)
            .map_or(0, |i| i + 1);
        let counterexample = outcomes
            .iter()
            .rposition(|o| *o == Outcome::Fails)
            .map(|i| points[i]);
        let (verdict, threshold) = if end > 0 && points.len() - tail_start >= MIN_TAIL {
            (Verdict::SatisfiedOnRange, Some(points[tail_start]))
        } else if counterexample.is_some() && end == outcomes_len {
            (Verdict::Violated, None)
        } else {
            (Verdict::Inconclusive, None)
        };
        Scan {
            verdict,
            threshold,
            counterexample: if verdict == Verdict::Violated {
                counterexample
            } else {
                None
            },
            samples,
            range,
        }
    }

    pub fn witness(&self, k: Option<f64>, var: &'static str) -> Witness {
        match (self.verdict, self.threshold, self.counterexample) {
            (Verdict::SatisfiedOnRange, Some(at), _) => Witness::Threshold { k, var, at },
            (Verdict::Violated, _, Some(at)) => Witness::Counterexample {
                k,
                var,
                at,
                step: None,
            },
            _ => Witness::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    None,
    /// The inequality holds at every sample from `at` on.
    Threshold {
        k: Option<f64>,
        var: &'static str,
        at: TowerReal,
    },
    /// The inequality fails at `at` (at iterate `step`, for iterated checks).
    Counterexample {
        k: Option<f64>,
        var: &'static str,
        at: TowerReal,
        step: Option<u32>,
    },
}

impl Witness {
    pub fn k(&self) -> Option<f64> {
        match self {
            Witness::None => None,
            Witness::Threshold { k, .. } | Witness::Counterexample { k, .. } => *k,
        }
    }

    pub fn point(&self) -> Option<TowerReal> {
        match self {
            Witness::None => None,
            Witness::Threshold { at, .. } | Witness::Counterexample { at, .. } => Some(*at),
        }
    }

    fn render(&self, value: impl Fn(&TowerReal) -> String) -> String {
        let k_part = |k: &Option<f64>| k.map(|k| format!("k={k} ")).unwrap_or_default();
        match self {
            Witness::None => String::new(),
            Witness::Threshold { k, var, at } => format!("{}{var}={}", k_part(k), value(at)),
            Witness::Counterexample { k, var, at, step } => {
                let step = step.map(|n| format!(" n={n}")).unwrap_or_default();
                format!("counterexample {}{var}={}{step}", k_part(k), value(at))
            }
        }
    }

    /// Tower form, used in CSV cells.
    pub fn to_cell(&self) -> String {
        self.render(|t| t.to_string())
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(human_magnitude))
    }
}

/// Decimal form for magnitudes that fit, tower form otherwise.
pub fn human_magnitude(t: &TowerReal) -> String {
    if t.level() <= 3 {
        let x = t.to_f64();
        if x.is_finite() && x.abs() < 1e6 {
            let s = format!("{x:.6}");
            let s = s.trim_end_matches('0').trim_end_matches('.');
            return s.to_string();
        }
        if x.is_finite() {
            return format!("{x:.6e}");
        }
    }
    t.to_string()
}

/// Condition parameters with a CSV column of their own.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReportParams {
    pub m: Option<u32>,
    pub eps: Option<f64>,
    pub k: Option<f64>,
    pub q: Option<f64>,
    pub n: Option<u32>,
}

/// Verdict of one part of a check: one `k`, one branch, the hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct SubReport {
    pub label: String,
    pub verdict: Verdict,
    pub witness: Witness,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition_id: String,
    pub fn_name: String,
    pub params: ReportParams,
    pub verdict: Verdict,
    pub witness: Witness,
    pub range: Option<(TowerReal, TowerReal)>,
    pub samples: usize,
    pub details: Vec<SubReport>,
    /// Remaining parameters and caveats, for human output.
    pub note: String,
}

impl ConditionReport {
    fn from_scan(
        condition_id: &str,
        fn_name: &str,
        params: ReportParams,
        scan: &Scan,
        var: &'static str,
    ) -> Self {
        ConditionReport {
            condition_id: condition_id.to_string(),
            fn_name: fn_name.to_string(),
            params,
            verdict: scan.verdict,
            witness: scan.witness(params.k, var),
            range: scan.range,
            samples: scan.samples,
            details: Vec::new(),
            note: String::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// `VERDICT witness`, e.g. `SATISFIED_ON_RANGE k=3 R=9.076`.
    pub fn summary(&self) -> String {
        let w = self.witness.to_string();
        if w.is_empty() {
            self.verdict.to_string()
        } else {
            format!("{} {w}", self.verdict)
        }
    }

    pub fn to_row(&self) -> ReportRow {
        let (lo, hi) = self.range.unzip();
        ReportRow {
            condition_id: self.condition_id.clone(),
            fn_name: self.fn_name.clone(),
            m: self.params.m,
            eps: self.params.eps,
            k: self.witness.k().or(self.params.k),
            q: self.params.q,
            n: self.params.n,
            verdict: self.verdict,
            witness: self.witness.to_cell(),
            range_lo: lo,
            range_hi: hi,
        }
    }
}

pub const REPORT_HEADER: &str = "condition_id,fn,m,eps,k,q,n,verdict,witness,range_lo,range_hi";

/// One line of the reports CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub condition_id: String,
    pub fn_name: String,
    pub m: Option<u32>,
    pub eps: Option<f64>,
    pub k: Option<f64>,
    pub q: Option<f64>,
    pub n: Option<u32>,
    pub verdict: Verdict,
    pub witness: String,
    pub range_lo: Option<TowerReal>,
    pub range_hi: Option<TowerReal>,
}

fn cell<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

fn parse_cell<T: FromStr>(s: &str, column: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("bad `{column}` cell `{s}`")))
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.condition_id,
            self.fn_name,
            cell(&self.m),
            cell(&self.eps),
            cell(&self.k),
            cell(&self.q),
            cell(&self.n),
            self.verdict,
            self.witness,
            cell(&self.range_lo),
            cell(&self.range_hi),
        )
    }
}

impl FromStr for ReportRow {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(Error::Parse(format!(
                "expected 11 report columns, got {}",
                cols.len()
            )));
        }
        Ok(ReportRow {
            condition_id: cols[0].to_string(),
            fn_name: cols[1].to_string(),
            m: parse_cell(cols[2], "m")?,
            eps: parse_cell(cols[3], "eps")?,
            k: parse_cell(cols[4], "k")?,
            q: parse_cell(cols[5], "q")?,
            n: parse_cell(cols[6], "n")?,
            verdict: cols[7].parse()?,
            witness: cols[8].to_string(),
            range_lo: parse_cell(cols[9], "range_lo")?,
            range_hi: parse_cell(cols[10], "range_hi")?,
        })
    }
}
