//! Level-index magnitudes.
//!
//! A [`TowerReal`] stores a real as `exp^level(mantissa)`. In canonical form a
//! tower with `level >= 1` keeps its mantissa in `[1, e)`, and level 0 holds
//! every value below `e` (including zero and negatives, which only arise as
//! logarithms of values below one). Canonical bands are disjoint and ordered,
//! so the real ordering is the lexicographic order on `(level, mantissa)` and
//! `log` is an exact level decrement.
//!
//! Only the operations the growth formulas need are provided: `log`, `exp`,
//! positive powers and positive scalar multiples. There is no tower addition.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative mantissa tolerance used for ties.
pub const MANTISSA_TOL: f64 = 1e-9;

/// Magnitudes up to this bound are handled in plain `f64` by the
/// mixed-precision helpers.
pub(crate) const F64_SAFE: f64 = 1e300;

const E: f64 = std::f64::consts::E;

/// Largest `f64` strictly below `e`.
fn below_e() -> f64 {
    f64::from_bits(E.to_bits() - 1)
}

#[derive(Clone, Copy, Debug)]
pub struct TowerReal {
    level: u32,
    mantissa: f64,
}

impl TowerReal {
    pub const ZERO: TowerReal = TowerReal { level: 0, mantissa: 0.0 };
    pub const ONE: TowerReal = TowerReal { level: 0, mantissa: 1.0 };

    /// Brings `exp^level(mantissa)` to canonical form.
    pub fn normalize(level: u32, mantissa: f64) -> Result<Self> {
        if !mantissa.is_finite() {
            return Err(Error::domain(format!(
                "non-finite mantissa {mantissa} at level {level}"
            )));
        }
        let mut level = level;
        let mut mantissa = mantissa;
        while level > 0 && mantissa < 1.0 {
            mantissa = mantissa.exp();
            level -= 1;
            if mantissa >= E {
                mantissa = below_e();
            }
        }
        while mantissa >= E {
            // ln(x) >= 1 for x >= e; clamp away rounding below the band.
            mantissa = mantissa.ln().max(1.0);
            level += 1;
        }
        Ok(TowerReal { level, mantissa })
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Self::normalize(0, x)
    }

    /// `exp^n(x)` without going through `f64` for the outer layers.
    pub fn exp_tower(n: u32, x: f64) -> Result<Self> {
        Self::normalize(n, x)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn is_zero(&self) -> bool {
        self.level == 0 && self.mantissa == 0.0
    }

    pub fn is_positive(&self) -> bool {
        self.level > 0 || self.mantissa > 0.0
    }

    /// The represented value, `+inf` once it leaves `f64` range.
    pub fn to_f64(&self) -> f64 {
        let mut x = self.mantissa;
        for _ in 0..self.level {
            x = x.exp();
            if x.is_infinite() {
                return f64::INFINITY;
            }
        }
        x
    }

    /// The value as `f64` when it does not exceed [`F64_SAFE`].
    pub(crate) fn small_value(&self) -> Option<f64> {
        if self.level > 3 {
            return None;
        }
        let x = self.to_f64();
        (x <= F64_SAFE).then_some(x)
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<Self> {
        if self.level >= 1 {
            return Ok(TowerReal {
                level: self.level - 1,
                mantissa: self.mantissa,
            });
        }
        if self.mantissa <= 0.0 {
            return Err(Error::domain(format!("log of non-positive value {self}")));
        }
        Self::normalize(0, self.mantissa.ln())
    }

    pub fn exp(&self) -> Result<Self> {
        if self.level >= 1 {
            Ok(TowerReal {
                level: self.level + 1,
                mantissa: self.mantissa,
            })
        } else {
            Self::normalize(1, self.mantissa)
        }
    }

    /// `n`-fold logarithm. Errors report how many logs succeeded before the
    /// argument became non-positive.
    pub fn ln_n(&self, n: u32) -> Result<Self> {
        let mut v = *self;
        for depth in 1..=n {
            v = v
                .ln()
                .map_err(|_| Error::domain(format!("log^{depth} of {self} undefined")))?;
        }
        Ok(v)
    }

    pub fn exp_n(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Ok(*self);
        }
        if self.level >= 1 {
            return Ok(TowerReal {
                level: self.level + n,
                mantissa: self.mantissa,
            });
        }
        Self::normalize(n, self.mantissa)
    }

    /// `a * self` for `a > 0`.
    pub fn scale(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::param(format!("scale factor must be positive, got {a}")));
        }
        if a == 1.0 {
            return Ok(*self);
        }
        if self.level == 0 {
            return Self::normalize(0, a * self.mantissa);
        }
        self.ln()?.offset(a.ln())?.exp()
    }

    /// `self^k` for `k > 0`; `self` must be non-negative.
    pub fn pow(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::param(format!("exponent must be positive, got {k}")));
        }
        if self.is_zero() {
            return Ok(Self::ZERO);
        }
        if self.level == 0 && self.mantissa < 0.0 {
            return Err(Error::domain(format!("power of negative value {self}")));
        }
        if k == 1.0 {
            return Ok(*self);
        }
        self.ln()?.scale(k)?.exp()
    }

    /// `self + delta` for a scalar offset. Once the tower exceeds the `f64`
    /// range the offset is below mantissa resolution and the tower is
    /// returned unchanged.
    pub(crate) fn offset(&self, delta: f64) -> Result<Self> {
        if delta == 0.0 {
            return Ok(*self);
        }
        if self.level == 0 {
            return Self::normalize(0, self.mantissa + delta);
        }
        match self.small_value() {
            Some(x) => Self::normalize(0, x + delta),
            None => Ok(*self),
        }
    }

    /// Ordering with ties: values whose mantissas agree to relative `tol`
    /// (after bringing both to the higher of adjacent levels) compare equal.
    /// Towers two or more levels apart are ordered by level alone.
    pub fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs());
        match self.level.abs_diff(other.level) {
            0 => {
                if close(self.mantissa, other.mantissa) {
                    Ordering::Equal
                } else {
                    self.mantissa.total_cmp(&other.mantissa)
                }
            }
            1 => {
                let (low, high, flip) = if self.level < other.level {
                    (self, other, false)
                } else {
                    (other, self, true)
                };
                if low.mantissa <= 0.0 {
                    return if flip { Ordering::Greater } else { Ordering::Less };
                }
                let lifted = low.mantissa.ln();
                let ord = if close(lifted, high.mantissa) {
                    Ordering::Equal
                } else {
                    lifted.total_cmp(&high.mantissa)
                };
                if flip {
                    ord.reverse()
                } else {
                    ord
                }
            }
            _ => self.level.cmp(&other.level),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.cmp_tol(other, tol) == Ordering::Equal
    }

    /// `self >= other`, counting ties within [`MANTISSA_TOL`] as satisfied.
    pub fn ge_tol(&self, other: &Self) -> bool {
        self.cmp_tol(other, MANTISSA_TOL) != Ordering::Less
    }

    /// `self > other`, counting ties within [`MANTISSA_TOL`] as violations.
    pub fn gt_tol(&self, other: &Self) -> bool {
        self.cmp_tol(other, MANTISSA_TOL) == Ordering::Greater
    }
}

impl PartialEq for TowerReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TowerReal {}

impl PartialOrd for TowerReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TowerReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level
            .cmp(&other.level)
            .then(self.mantissa.total_cmp(&other.mantissa))
    }
}

impl fmt::Display for TowerReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({};{:?})", self.level, self.mantissa)
    }
}

impl FromStr for TowerReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected T(level;mantissa), got `{s}`"));
        let inner = s
            .trim()
            .strip_prefix("T(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (level, mantissa) = inner.split_once(';').ok_or_else(bad)?;
        let level: u32 = level.trim().parse().map_err(|_| bad())?;
        let mantissa: f64 = mantissa.trim().parse().map_err(|_| bad())?;
        Self::normalize(level, mantissa)
    }
}

/// Parses either the tower form `T(l;m)` or a plain decimal number.
pub fn parse_magnitude(s: &str) -> Result<TowerReal> {
    let s = s.trim();
    if s.starts_with("T(") {
        return s.parse();
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("not a number or tower: `{s}`")))?;
    TowerReal::from_f64(x)
}
