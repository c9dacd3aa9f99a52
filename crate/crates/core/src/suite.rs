//! The full battery over a catalog: regularity checks per entry, orbit
//! classification of fixed and random seeds, and comparison with the
//! catalog's expected verdicts.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::Result;
use crate::exec::map_ordered;
use crate::growthfn::{Catalog, CatalogEntry, GrowthKind};
use crate::orbit::{iterate, ClassificationRow, Thresholds, CLASSIFICATION_HEADER, DEFAULT_CEILING};
use crate::regularity::{
    check_lemma52_transfer, check_m_log_regular, check_strong_log_regular, ConditionReport,
    Verdict, REPORT_HEADER,
};

/// `k` used for the `lemma52` rows.
pub const LEMMA52_K: f64 = 2.0;
/// Seeds classified for every function in addition to the random ones.
pub const FIXED_SEEDS: [Complex64; 2] = [Complex64::new(0.0, 0.0), Complex64::new(10.0, 0.0)];
/// Random seeds are drawn from this square.
pub const SEED_BOX: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub fn_name: String,
    pub condition_id: String,
    pub m: Option<u32>,
    pub eps: Option<f64>,
    pub expected: Verdict,
    pub got: Verdict,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub reports: Vec<ConditionReport>,
    pub classifications: Vec<ClassificationRow>,
    pub mismatches: Vec<Mismatch>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn reports_csv(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\n");
        for r in &self.reports {
            out.push_str(&r.to_row().to_string());
            out.push('\n');
        }
        out
    }

    pub fn classifications_csv(&self) -> String {
        let mut out = format!("{CLASSIFICATION_HEADER}\n");
        for c in &self.classifications {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    /// Writes `reports.csv` and `classifications.csv`, returning their paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let reports = dir.join("reports.csv");
        let classes = dir.join("classifications.csv");
        fs::write(&reports, self.reports_csv())?;
        fs::write(&classes, self.classifications_csv())?;
        Ok((reports, classes))
    }
}

#[derive(Clone, Copy, Debug)]
enum Task<'a> {
    StrongLog(&'a CatalogEntry, f64),
    MLog(&'a CatalogEntry, u32, f64),
    Lemma52(&'a CatalogEntry, f64),
}

fn run_task(task: &Task<'_>, cfg: &RunConfig) -> Result<ConditionReport> {
    match *task {
        Task::StrongLog(e, eps) => check_strong_log_regular(&e.model, eps, &cfg.k_menu),
        Task::MLog(e, m, eps) => check_m_log_regular(&e.model, m, eps, &cfg.k_menu),
        Task::Lemma52(e, eps) => check_lemma52_transfer(&e.model, eps, LEMMA52_K),
    }
}

/// Seeds for one function: the fixed ones, then random points of the box.
pub fn seeds(cfg: &RunConfig, fn_index: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(fn_index as u64));
    let mut out = FIXED_SEEDS.to_vec();
    for _ in 0..cfg.seeds_per_fn {
        let re = rng.random_range(-SEED_BOX..=SEED_BOX);
        let im = rng.random_range(-SEED_BOX..=SEED_BOX);
        out.push(Complex64::new(re, im));
    }
    out
}

fn classify_entry(
    entry: &CatalogEntry,
    index: usize,
    cfg: &RunConfig,
) -> Result<Vec<ClassificationRow>> {
    if entry.model.complex_map().is_none() {
        return Ok(Vec::new());
    }
    let params = cfg.classify_params();
    let r = entry.model.r_min();
    let thresholds = Thresholds::new(&entry.model, r, cfg.horizon, &params)?;
    let mut rows = Vec::new();
    for z in seeds(cfg, index) {
        // Series entries with a truncation radius cannot follow every orbit.
        let Ok(record) = iterate(&entry.model, z, cfg.horizon, DEFAULT_CEILING) else {
            continue;
        };
        let class = thresholds.classify(&record)?;
        rows.push(ClassificationRow::new(entry.name(), z, &class));
    }
    Ok(rows)
}

pub fn run_suite(catalog: &Catalog, cfg: &RunConfig) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let par = cfg.parallelism();
    let mut tasks = Vec::new();
    for e in catalog.entries() {
        for &eps in &cfg.eps_menu {
            tasks.push(Task::StrongLog(e, eps));
        }
        for &m in &cfg.m_list {
            for &eps in &cfg.eps_menu {
                tasks.push(Task::MLog(e, m, eps));
            }
        }
        if matches!(e.model.kind(), GrowthKind::PiecewisePhi(_)) {
            for &eps in &cfg.eps_menu {
                tasks.push(Task::Lemma52(e, eps));
            }
        }
    }
    let reports = map_ordered(&tasks, par, |t| run_task(t, cfg))?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let indexed: Vec<(usize, &CatalogEntry)> = catalog.entries().iter().enumerate().collect();
    let classifications = map_ordered(&indexed, par, |(i, e)| classify_entry(e, *i, cfg))?
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut mismatches = Vec::new();
    for (task, report) in tasks.iter().zip(&reports) {
        let (entry, m) = match *task {
            Task::StrongLog(e, _) | Task::Lemma52(e, _) => (e, None),
            Task::MLog(e, m, _) => (e, Some(m)),
        };
        let Some(expected) = entry.expected(&report.condition_id, m) else {
            continue;
        };
        let contradicts = matches!(
            (expected, report.verdict),
            (Verdict::SatisfiedOnRange, Verdict::Violated)
                | (Verdict::Violated, Verdict::SatisfiedOnRange)
        );
        if contradicts {
            mismatches.push(Mismatch {
                fn_name: entry.name().to_string(),
                condition_id: report.condition_id.clone(),
                m,
                eps: report.params.eps,
                expected,
                got: report.verdict,
            });
        }
    }
    Ok(SuiteOutcome {
        reports,
        classifications,
        mismatches,
    })
}
