//! Function catalog: one `[name]` section per entry with `kind`, `params`,
//! optional `R_min`, and expected verdicts `expect.<condition>[.m<m>]`.

use std::path::Path;

use super::{ClosedForm, GrowthKind, GrowthModel, PiecewisePhiSpec, PowerSeries};
use crate::error::{Error, Result};
use crate::kv::{Document, Section};
use crate::regularity::Verdict;
use crate::tower::{parse_magnitude, TowerReal};

pub const BUILTIN_CATALOG: &str = "\
# Built-in catalog. R_min is computed when absent.

[exp]
kind = closed_form
params = exp
expect.strong_log = SATISFIED_ON_RANGE
expect.m_log.m1 = SATISFIED_ON_RANGE
expect.m_log.m2 = SATISFIED_ON_RANGE
expect.m_log.m3 = SATISFIED_ON_RANGE

[lambda_exp_0.25]
kind = closed_form
params = lambda_exp lambda=0.25
expect.strong_log = SATISFIED_ON_RANGE
expect.m_log.m1 = SATISFIED_ON_RANGE
expect.m_log.m2 = SATISFIED_ON_RANGE
expect.m_log.m3 = SATISFIED_ON_RANGE

[lambda_exp_1]
kind = closed_form
params = lambda_exp lambda=1
expect.strong_log = SATISFIED_ON_RANGE
expect.m_log.m1 = SATISFIED_ON_RANGE
expect.m_log.m2 = SATISFIED_ON_RANGE
expect.m_log.m3 = SATISFIED_ON_RANGE

[cosh]
kind = closed_form
params = cosh
expect.strong_log = SATISFIED_ON_RANGE
expect.m_log.m1 = SATISFIED_ON_RANGE
expect.m_log.m2 = SATISFIED_ON_RANGE
expect.m_log.m3 = SATISFIED_ON_RANGE

# Truncated Taylor series, trusted only up to |z| = 20.
[cosh_series]
kind = power_series
params = taylor=cosh degree=60 max_radius=20

[exp_square]
kind = closed_form
params = exp_square
expect.strong_log = SATISFIED_ON_RANGE
expect.m_log.m1 = SATISFIED_ON_RANGE
expect.m_log.m2 = SATISFIED_ON_RANGE
expect.m_log.m3 = SATISFIED_ON_RANGE

# Order 0: fails the positive lower order hypothesis.
[poly6]
kind = power_series
params = taylor=exp degree=6
expect.strong_log = VIOLATED
expect.m_log.m1 = VIOLATED
expect.m_log.m2 = VIOLATED
expect.m_log.m3 = VIOLATED

# Growth curve only: t1 = 10, t_{n+1} = exp(t_n).
[piecewise_phi]
kind = piecewise_phi
params = t1=10
expect.strong_log = VIOLATED
expect.m_log.m1 = VIOLATED
expect.m_log.m2 = SATISFIED_ON_RANGE
expect.lemma52 = SATISFIED_ON_RANGE
";

/// An expected verdict for a condition, optionally restricted to one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub condition: String,
    pub m: Option<u32>,
    pub verdict: Verdict,
}

impl Expectation {
    pub fn applies_to(&self, condition: &str, m: Option<u32>) -> bool {
        self.condition == condition && (self.m.is_none() || self.m == m)
    }

    fn key(&self) -> String {
        match self.m {
            Some(m) => format!("expect.{}.m{m}", self.condition),
            None => format!("expect.{}", self.condition),
        }
    }

    fn parse(key: &str, value: &str) -> Result<Self> {
        let rest = key.strip_prefix("expect.").expect("caller checks prefix");
        let (condition, m) = match rest.rsplit_once(".m") {
            Some((c, m)) if !m.is_empty() && m.bytes().all(|b| b.is_ascii_digit()) => {
                (c, Some(m.parse().map_err(|_| Error::Parse(format!("bad depth in `{key}`")))?))
            }
            _ => (rest, None),
        };
        Ok(Expectation {
            condition: condition.to_string(),
            m,
            verdict: value.parse()?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub model: GrowthModel,
    pub params: String,
    pub expectations: Vec<Expectation>,
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        self.model.name()
    }

    pub fn expected(&self, condition: &str, m: Option<u32>) -> Option<Verdict> {
        self.expectations
            .iter()
            .rev()
            .find(|e| e.applies_to(condition, m))
            .map(|e| e.verdict)
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_CATALOG).expect("built-in catalog parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let mut entries = Vec::new();
        for section in doc.named() {
            if entries.iter().any(|e: &CatalogEntry| e.name() == section.name) {
                return Err(Error::Parse(format!("duplicate catalog entry `{}`", section.name)));
            }
            entries.push(parse_entry(section)?);
        }
        if entries.is_empty() {
            return Err(Error::Parse("catalog has no entries".into()));
        }
        Ok(Catalog { entries })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    pub fn model(&self, name: &str) -> Result<&GrowthModel> {
        Ok(&self.get(name)?.model)
    }

    /// Catalog text with every `R_min` filled in.
    pub fn render(&self) -> String {
        let mut doc = Document::default();
        doc.sections.push(Section::new(""));
        for e in &self.entries {
            let mut s = Section::new(e.name());
            s.push("kind", e.model.kind().label());
            s.push("params", e.params.clone());
            s.push("R_min", e.model.r_min().to_string());
            for x in &e.expectations {
                s.push(x.key(), x.verdict.to_string());
            }
            doc.sections.push(s);
        }
        doc.render()
    }
}

fn parse_entry(section: &Section) -> Result<CatalogEntry> {
    let name = &section.name;
    let field = |key: &str| {
        section
            .get(key)
            .ok_or_else(|| Error::Parse(format!("entry `{name}` is missing `{key}`")))
    };
    let kind_name = field("kind")?;
    let params = section.get("params").unwrap_or("").to_string();
    let kind = parse_kind(kind_name, &params)
        .map_err(|e| Error::Parse(format!("entry `{name}`: {e}")))?;
    let mut model = GrowthModel::new(name.clone(), kind)?;
    if let Some(r) = section.get("R_min") {
        model = model.with_r_min(parse_magnitude(r)?);
    }
    let expectations = section
        .entries
        .iter()
        .filter(|(k, _)| k.starts_with("expect."))
        .map(|(k, v)| Expectation::parse(k, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(CatalogEntry {
        model,
        params,
        expectations,
    })
}

/// Splits `head key=value ...` into the head word and its key/value pairs.
fn split_params(params: &str) -> (Option<&str>, Vec<(&str, &str)>) {
    let mut head = None;
    let mut pairs = Vec::new();
    for tok in params.split_whitespace() {
        match tok.split_once('=') {
            Some(kv) => pairs.push(kv),
            None if head.is_none() => head = Some(tok),
            None => pairs.push((tok, "")),
        }
    }
    (head, pairs)
}

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}` must be a number, got `{value}`")))
}

pub fn parse_kind(kind: &str, params: &str) -> Result<GrowthKind> {
    let (head, pairs) = split_params(params);
    let lookup = |key: &str| pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    if let Some((k, _)) = pairs.iter().find(|(_, v)| v.is_empty()) {
        return Err(Error::Parse(format!("unexpected parameter `{k}`")));
    }
    match kind {
        "closed_form" => {
            let form = match head {
                Some("exp") => ClosedForm::Exp,
                Some("cosh") => ClosedForm::Cosh,
                Some("exp_square") => ClosedForm::ExpSquare,
                Some("lambda_exp") => {
                    let lambda = number("lambda", lookup("lambda").unwrap_or("1"))?;
                    if !(lambda > 0.0 && lambda.is_finite()) {
                        return Err(Error::Parse("lambda must be positive".into()));
                    }
                    ClosedForm::ScaledExp { lambda }
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown closed form `{}`",
                        other.unwrap_or("")
                    )))
                }
            };
            Ok(GrowthKind::ClosedFormLogM(form))
        }
        "power_series" => {
            let max_radius = lookup("max_radius").map(|v| number("max_radius", v)).transpose()?;
            let series = if let Some(name) = lookup("taylor") {
                let degree = lookup("degree")
                    .ok_or_else(|| Error::Parse("taylor series needs `degree`".into()))?;
                let degree = degree
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad degree `{degree}`")))?;
                PowerSeries::taylor(name, degree, max_radius)?
            } else if let Some(list) = lookup("coeffs") {
                let coeffs = list
                    .split(',')
                    .map(|c| number("coeffs", c.trim()))
                    .collect::<Result<Vec<_>>>()?;
                PowerSeries::new(coeffs, max_radius)?
            } else {
                return Err(Error::Parse("power series needs `taylor` or `coeffs`".into()));
            };
            Ok(GrowthKind::PowerSeries(series))
        }
        "piecewise_phi" => {
            if head == Some("base_only") {
                return Ok(GrowthKind::PiecewisePhi(PiecewisePhiSpec::base_only()));
            }
            let t1 = lookup("t1").map(|v| number("t1", v)).transpose()?;
            Ok(GrowthKind::PiecewisePhi(PiecewisePhiSpec::new(
                t1.unwrap_or(super::DEFAULT_T1),
            )?))
        }
        other => Err(Error::Parse(format!("unknown kind `{other}`"))),
    }
}

impl GrowthModel {
    /// Replaces the computed `R_min` with a stored one.
    pub fn with_r_min(mut self, r_min: TowerReal) -> Self {
        self.r_min = r_min;
        self
    }
}
