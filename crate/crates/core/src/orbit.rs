//! Orbits of catalog functions and their escape-speed classification.
//!
//! Orbits are computed in complex `f64` until the modulus passes a ceiling.
//! Beyond it, an iterate on the positive real axis of a function that maps
//! that ray into itself continues exactly as `x -> M(x)` in tower arithmetic;
//! anything else stops with one last magnitude from `log |f(z)|`.
//!
//! Every verdict is a certificate for the computed prefix of the orbit only.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::growthfn::GrowthModel;
use crate::tower::TowerReal;

pub const DEFAULT_CEILING: f64 = 1e15;
/// Angle below which an iterate counts as on the positive real axis.
pub const RAY_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_ELL_MAX: u32 = 8;
pub const DEFAULT_HORIZON: u32 = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub start: Complex64,
    /// `|f^j(start)|` for `j = 0..=steps`.
    pub magnitudes: Vec<TowerReal>,
    /// First step produced by the real tower backend.
    pub backend_switch_index: Option<usize>,
    /// The complex orbit passed the ceiling.
    pub escaped_level0: bool,
}

impl OrbitRecord {
    pub fn last(&self) -> &TowerReal {
        self.magnitudes.last().expect("orbit has its start")
    }

    /// `step,magnitude` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,magnitude\n");
        for (j, m) in self.magnitudes.iter().enumerate() {
            out.push_str(&format!("{j},{m}\n"));
        }
        out
    }
}

/// Computes `horizon` steps of the orbit of `z` (fewer if it leaves the
/// representable range off the positive ray, or the model's trusted disc).
pub fn iterate(f: &GrowthModel, z: Complex64, horizon: u32, ceiling: f64) -> Result<OrbitRecord> {
    let map = f
        .complex_map()
        .ok_or_else(|| Error::param(format!("`{}` has no complex evaluator", f.name())))?;
    if horizon < 1 {
        return Err(Error::param("horizon must be at least 1"));
    }
    if !(ceiling.is_finite() && ceiling > 1.0 && ceiling < 1e300) {
        return Err(Error::param("ceiling must lie in (1, 1e300)"));
    }
    let mut magnitudes = Vec::with_capacity(horizon as usize + 1);
    magnitudes.push(TowerReal::from_f64(z.norm())?);
    let mut record = OrbitRecord {
        start: z,
        magnitudes,
        backend_switch_index: None,
        escaped_level0: false,
    };
    let mut cur = z;
    let trusted = f.max_radius().unwrap_or(f64::INFINITY);
    for step in 1..=horizon as usize {
        if cur.norm() > trusted {
            break;
        }
        let next = map.eval(cur);
        let modulus = next.norm();
        if modulus.is_finite() && modulus <= ceiling {
            record.magnitudes.push(TowerReal::from_f64(modulus)?);
            cur = next;
            continue;
        }
        record.escaped_level0 = true;
        let log_abs = map.log_abs(cur);
        if !log_abs.is_finite() {
            return Err(Error::Overflow(format!("log |f(z)| not finite at z = {cur}")));
        }
        record.magnitudes.push(TowerReal::from_f64(log_abs)?.exp()?);
        let on_ray = cur.re > 0.0 && cur.im.abs() <= RAY_TOLERANCE * cur.re;
        if on_ray && f.preserves_positive_ray() {
            record.backend_switch_index = Some(step);
            let mut x = *record.last();
            for _ in step + 1..=horizon as usize {
                x = f.max_modulus(&x)?;
                record.magnitudes.push(x);
            }
        }
        break;
    }
    Ok(record)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EscapeVerdict {
    Fast,
    QuiteFast,
    Qm(u32),
    EscapingUnclassified,
    NotEscapedByHorizon,
}

impl fmt::Display for EscapeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EscapeVerdict::Fast => f.write_str("FAST"),
            EscapeVerdict::QuiteFast => f.write_str("QUITE_FAST"),
            EscapeVerdict::Qm(m) => write!(f, "QM({m})"),
            EscapeVerdict::EscapingUnclassified => f.write_str("ESCAPING_UNCLASSIFIED"),
            EscapeVerdict::NotEscapedByHorizon => f.write_str("NOT_ESCAPED_BY_HORIZON"),
        }
    }
}

impl FromStr for EscapeVerdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FAST" => Ok(EscapeVerdict::Fast),
            "QUITE_FAST" => Ok(EscapeVerdict::QuiteFast),
            "ESCAPING_UNCLASSIFIED" => Ok(EscapeVerdict::EscapingUnclassified),
            "NOT_ESCAPED_BY_HORIZON" => Ok(EscapeVerdict::NotEscapedByHorizon),
            _ => s
                .strip_prefix("QM(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|m| m.parse().ok())
                .map(EscapeVerdict::Qm)
                .ok_or_else(|| Error::Parse(format!("unknown escape verdict `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EscapeClass {
    pub verdict: EscapeVerdict,
    pub m: Option<u32>,
    pub eps: Option<f64>,
    pub ell: Option<u32>,
    pub horizon: u32,
    pub r_used: TowerReal,
}

impl fmt::Display for EscapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if let Some(m) = self.m {
            write!(f, " m={m}")?;
        }
        if let Some(eps) = self.eps {
            write!(f, " eps={eps}")?;
        }
        if let Some(ell) = self.ell {
            write!(f, " ell={ell}")?;
        }
        write!(f, " horizon={} R={}", self.horizon, self.r_used)
    }
}

/// Menus searched by the classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyParams {
    pub m_list: Vec<u32>,
    pub eps_list: Vec<f64>,
    pub ell_max: u32,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            m_list: vec![1, 2, 3],
            eps_list: crate::regularity::DEFAULT_EPS_MENU.to_vec(),
            ell_max: DEFAULT_ELL_MAX,
        }
    }
}

impl ClassifyParams {
    fn validate(&self) -> Result<()> {
        if self.m_list.is_empty() || self.m_list.contains(&0) {
            return Err(Error::param("m list must be nonempty with m >= 1"));
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::param("eps list must be nonempty within (0, 1)"));
        }
        Ok(())
    }
}

/// Which defining inequality a threshold sequence belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Condition {
    Fast,
    Qm { m: u32, eps: f64 },
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Fast => f.write_str("FAST"),
            Condition::Qm { m, eps } => write!(f, "QM(m={m},eps={eps})"),
        }
    }
}

/// Threshold sequences `M^n(R)` and `mu_{m,eps}^n(R)`, computed once and
/// shared across orbits.
#[derive(Clone, Debug)]
pub struct Thresholds {
    r: TowerReal,
    len: usize,
    fast: Vec<TowerReal>,
    /// Only the `(m, eps)` rows where `log^m M(R) >= 0` and
    /// `mu_{m,eps}(R) > R`, so the sequence increases and stays below `M^n(R)`.
    qm: Vec<(Condition, Vec<TowerReal>)>,
    params: ClassifyParams,
}

/// The defined prefix of `r, step(r), step(step(r)), ...`, at most `len` long.
fn sequence(len: usize, r: TowerReal, step: impl Fn(&TowerReal) -> Result<TowerReal>) -> Vec<TowerReal> {
    let mut out = Vec::with_capacity(len);
    let mut x = r;
    out.push(x);
    while out.len() < len {
        match step(&x) {
            Ok(next) => x = next,
            Err(_) => break,
        }
        out.push(x);
    }
    out
}

impl Thresholds {
    /// Sequences long enough for orbits of `horizon` steps.
    pub fn new(f: &GrowthModel, r: TowerReal, horizon: u32, params: &ClassifyParams) -> Result<Self> {
        params.validate()?;
        let len = horizon as usize + 1;
        let fast = sequence(len, r, |x| f.max_modulus(x));
        let mut qm = Vec::new();
        for &m in &params.m_list {
            let applicable = f
                .iterated_log_max_modulus(m, &r)
                .is_ok_and(|l| l.ge_tol(&TowerReal::ZERO));
            if !applicable {
                continue;
            }
            for &eps in &params.eps_list {
                let grows = f.mu(m, eps, &r).is_ok_and(|v| v > r);
                if !grows {
                    continue;
                }
                qm.push((Condition::Qm { m, eps }, sequence(len, r, |x| f.mu(m, eps, x))));
            }
        }
        Ok(Thresholds {
            r,
            len,
            fast,
            qm,
            params: params.clone(),
        })
    }

    pub fn r(&self) -> TowerReal {
        self.r
    }

    pub fn rows(&self) -> impl Iterator<Item = (Condition, &[TowerReal])> {
        std::iter::once((Condition::Fast, self.fast.as_slice()))
            .chain(self.qm.iter().map(|(c, s)| (*c, s.as_slice())))
    }

    fn sequence_for(&self, cond: Condition) -> Option<&[TowerReal]> {
        self.rows().find(|(c, _)| *c == cond).map(|(_, s)| s)
    }

    /// `|f^{n+ell}(z)| >= seq[n]` for every `n` with `n + ell` in the orbit.
    /// A sequence too short to cover the orbit does not hold.
    fn holds(seq: &[TowerReal], mags: &[TowerReal], ell: usize) -> bool {
        ell < mags.len()
            && seq.len() >= mags.len() - ell
            && mags[ell..]
                .iter()
                .zip(seq)
                .all(|(mag, t)| mag.ge_tol(t))
    }

    pub fn classify(&self, record: &OrbitRecord) -> Result<EscapeClass> {
        let mags = &record.magnitudes;
        if mags.len() > self.len {
            return Err(Error::param("orbit is longer than the threshold sequences"));
        }
        let horizon = (mags.len() - 1) as u32;
        let class = |verdict, m, eps, ell| EscapeClass {
            verdict,
            m,
            eps,
            ell,
            horizon,
            r_used: self.r,
        };
        if !(*record.last() > self.r) {
            return Ok(class(EscapeVerdict::NotEscapedByHorizon, None, None, None));
        }
        let ells = 0..=self.params.ell_max as usize;
        for ell in ells.clone() {
            if Self::holds(&self.fast, mags, ell) {
                return Ok(class(EscapeVerdict::Fast, None, None, Some(ell as u32)));
            }
        }
        let mut ms = self.params.m_list.clone();
        ms.sort_unstable();
        ms.dedup();
        let mut epss = self.params.eps_list.clone();
        epss.sort_by(|a, b| b.total_cmp(a));
        for m in ms {
            for &eps in &epss {
                let Some(seq) = self.sequence_for(Condition::Qm { m, eps }) else {
                    continue;
                };
                for ell in ells.clone() {
                    if Self::holds(seq, mags, ell) {
                        let verdict = if m == 1 {
                            EscapeVerdict::QuiteFast
                        } else {
                            EscapeVerdict::Qm(m)
                        };
                        return Ok(class(verdict, Some(m), Some(eps), Some(ell as u32)));
                    }
                }
            }
        }
        Ok(class(EscapeVerdict::EscapingUnclassified, None, None, None))
    }

    pub fn audit(&self, record: &OrbitRecord) -> Vec<AuditRow> {
        let mut rows = Vec::new();
        for ell in 0..=self.params.ell_max {
            for (condition, seq) in self.rows() {
                rows.push(AuditRow {
                    condition,
                    ell,
                    holds: Self::holds(seq, &record.magnitudes, ell as usize),
                });
            }
        }
        rows
    }
}

/// Strongest verdict whose defining inequality holds along the orbit.
pub fn classify_escape(
    f: &GrowthModel,
    record: &OrbitRecord,
    r: &TowerReal,
    params: &ClassifyParams,
) -> Result<EscapeClass> {
    let horizon = (record.magnitudes.len() - 1) as u32;
    Thresholds::new(f, *r, horizon, params)?.classify(record)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditRow {
    pub condition: Condition,
    pub ell: u32,
    pub holds: bool,
}

/// Truth table of every defining inequality over the computed orbit.
pub fn hierarchy_audit(
    f: &GrowthModel,
    record: &OrbitRecord,
    r: &TowerReal,
    params: &ClassifyParams,
) -> Result<Vec<AuditRow>> {
    let horizon = (record.magnitudes.len() - 1) as u32;
    Ok(Thresholds::new(f, *r, horizon, params)?.audit(record))
}

/// True when some `ell` has FAST holding but a QM row failing.
pub fn audit_breaks_nesting(rows: &[AuditRow]) -> bool {
    rows.iter().any(|fast| {
        fast.condition == Condition::Fast
            && fast.holds
            && rows
                .iter()
                .any(|q| q.ell == fast.ell && q.condition != Condition::Fast && !q.holds)
    })
}

pub const CLASSIFICATION_HEADER: &str = "fn,re,im,verdict,m,eps,ell,horizon";

/// One line of the classifications CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationRow {
    pub fn_name: String,
    pub re: f64,
    pub im: f64,
    pub verdict: EscapeVerdict,
    pub m: Option<u32>,
    pub eps: Option<f64>,
    pub ell: Option<u32>,
    pub horizon: u32,
}

impl ClassificationRow {
    pub fn new(fn_name: &str, z: Complex64, class: &EscapeClass) -> Self {
        ClassificationRow {
            fn_name: fn_name.to_string(),
            re: z.re,
            im: z.im,
            verdict: class.verdict,
            m: class.m,
            eps: class.eps,
            ell: class.ell,
            horizon: class.horizon,
        }
    }
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

fn parse_opt<T: FromStr>(s: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("bad cell `{s}`")))
}

impl fmt::Display for ClassificationRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{}",
            self.fn_name,
            self.re,
            self.im,
            self.verdict,
            opt(&self.m),
            opt(&self.eps),
            opt(&self.ell),
            self.horizon
        )
    }
}

impl FromStr for ClassificationRow {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let c: Vec<&str> = line.split(',').collect();
        if c.len() != 8 {
            return Err(Error::Parse(format!(
                "expected 8 classification columns, got {}",
                c.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))
        };
        Ok(ClassificationRow {
            fn_name: c[0].to_string(),
            re: num(c[1])?,
            im: num(c[2])?,
            verdict: c[3].parse()?,
            m: parse_opt(c[4])?,
            eps: parse_opt(c[5])?,
            ell: parse_opt(c[6])?,
            horizon: c[7]
                .parse()
                .map_err(|_| Error::Parse(format!("bad horizon `{}`", c[7])))?,
        })
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi` (spaces ignored).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex number `{s}`"));
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im))
}
