//! Run configuration: the unnamed section of a `key = value` file.
//!
//! ```text
//! catalog = catalog.kv
//! output_dir = out
//! eps_menu = 0.25, 0.5, 0.75
//! k_menu = 1.25, 1.5, 2, 3, 5, 10
//! m_list = 1, 2, 3
//! horizon = 40
//! ell_max = 8
//! seed = 7
//! seeds_per_fn = 16
//! threads = 4
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::kv::Document;
use crate::orbit::{ClassifyParams, DEFAULT_ELL_MAX, DEFAULT_HORIZON};
use crate::regularity::{DEFAULT_EPS_MENU, DEFAULT_K_GRID};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// `None` selects the built-in catalog.
    pub catalog_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub eps_menu: Vec<f64>,
    pub k_menu: Vec<f64>,
    pub m_list: Vec<u32>,
    pub horizon: u32,
    pub ell_max: u32,
    pub seed: u64,
    /// Random seeds classified per function by `suite`.
    pub seeds_per_fn: usize,
    /// Worker threads; `None` uses every core. `ESCAPE_SPEC_THREADS` caps both.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            catalog_path: None,
            output_dir: PathBuf::from("out"),
            eps_menu: DEFAULT_EPS_MENU.to_vec(),
            k_menu: DEFAULT_K_GRID.to_vec(),
            m_list: vec![1, 2, 3],
            horizon: DEFAULT_HORIZON,
            ell_max: DEFAULT_ELL_MAX,
            seed: 7,
            seeds_per_fn: 16,
            threads: None,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("`{key}`: bad entry `{}`", s.trim())))
        })
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}`: bad value `{value}`")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let mut cfg = RunConfig::default();
        for (key, value) in &doc.root().entries {
            match key.as_str() {
                "catalog" => cfg.catalog_path = Some(PathBuf::from(value)),
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "eps_menu" => cfg.eps_menu = list(key, value)?,
                "k_menu" => cfg.k_menu = list(key, value)?,
                "m_list" => cfg.m_list = list(key, value)?,
                "horizon" => cfg.horizon = scalar(key, value)?,
                "ell_max" => cfg.ell_max = scalar(key, value)?,
                "seed" => cfg.seed = scalar(key, value)?,
                "seeds_per_fn" => cfg.seeds_per_fn = scalar(key, value)?,
                "threads" => cfg.threads = Some(scalar(key, value)?),
                other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps_menu.is_empty() || self.eps_menu.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::param("eps_menu must be nonempty within (0, 1)"));
        }
        if self.k_menu.is_empty() || self.k_menu.iter().any(|&k| !(k > 1.0 && k.is_finite())) {
            return Err(Error::param("k_menu must be nonempty with every k > 1"));
        }
        if self.m_list.is_empty() || self.m_list.contains(&0) {
            return Err(Error::param("m_list must be nonempty with m >= 1"));
        }
        if self.horizon < 1 {
            return Err(Error::param("horizon must be at least 1"));
        }
        Ok(())
    }

    pub fn classify_params(&self) -> ClassifyParams {
        ClassifyParams {
            m_list: self.m_list.clone(),
            eps_list: self.eps_menu.clone(),
            ell_max: self.ell_max,
        }
    }

    pub fn parallelism(&self) -> Parallelism {
        match self.threads {
            Some(n) => Parallelism::threads_capped(n),
            None => Parallelism::from_env(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::parse("seed = 11\nk_menu = 2, 3\nhorizon = 12\nthreads = 1\n").unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.k_menu, vec![2.0, 3.0]);
        assert_eq!(cfg.horizon, 12);
        assert_eq!(cfg.eps_menu, DEFAULT_EPS_MENU.to_vec());
        assert!(RunConfig::parse("eps_menu = 1.5\n").is_err());
        assert!(RunConfig::parse("horizon = 0\n").is_err());
        assert!(RunConfig::parse("colour = red\n").is_err());
        assert!(RunConfig::parse("k_menu = 2, x\n").is_err());
    }
}
