use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use escape_speed::config::RunConfig;
use escape_speed::growthfn::{estimate_order, psi_m, Catalog};
use escape_speed::orbit::{
    classify_escape, iterate, ClassificationRow, ClassifyParams, CLASSIFICATION_HEADER,
    DEFAULT_CEILING, DEFAULT_ELL_MAX,
};
use escape_speed::regularity::{self as reg, ConditionReport, REPORT_HEADER};
use escape_speed::render::{render, Palette, Parallelism, RenderJob};
use escape_speed::suite::run_suite;
use escape_speed::tower::parse_magnitude;
use escape_speed::{GrowthModel, TowerReal};

/// `print!` that reports write failures instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout(), $($arg)*)
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)
    };
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

/// Escape-speed growth maps, regularity checks and orbit classification.
#[derive(Parser)]
#[command(name = "escape-speed", version)]
struct Cli {
    /// Catalog file; the built-in catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog entries with kinds and R_min.
    Catalog {
        /// Print the catalog file form instead of the table.
        #[arg(long)]
        raw: bool,
    },
    /// Evaluate a growth map and print it in tower form.
    Eval(EvalArgs),
    /// Run one condition checker.
    Check(CheckArgs),
    /// Iterate one seed and classify its escape speed.
    Classify(ClassifyArgs),
    /// Classify a rectangle of seeds and write a PPM image.
    Render(RenderArgs),
    /// Run the full battery over the catalog and write CSV reports.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    LogM,
    M,
    Mu,
    IterateMu,
    IterateM,
    Phi,
    PhiEps,
    Psi,
    Order,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long = "fn")]
    fn_name: Option<String>,
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Radius or time argument, decimal or `T(level;mantissa)`.
    #[arg(long, alias = "t")]
    r: Option<String>,
    /// Iteration count, or the shift n of psi_m.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// One of theorem22, lemma23, m_log, m_weak, strong_log,
    /// growth_condition, psi_phi, lemma34, lemma52.
    condition: String,
    #[arg(long = "fn")]
    fn_name: Option<String>,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Comma-separated k menu (a single k for lemma52).
    #[arg(long, value_delimiter = ',')]
    k: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long = "q-tilde", default_value_t = 1.1)]
    q_tilde: f64,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    d: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, value_delimiter = ',')]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    b: Vec<f64>,
    /// Base radius for m_weak; R_min when omitted.
    #[arg(long = "R")]
    base: Option<String>,
    #[arg(long, default_value_t = 20)]
    horizon: u32,
    /// Print the per-k and per-branch details.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long = "fn")]
    fn_name: String,
    #[arg(long)]
    z: String,
    /// Base radius R; R_min when omitted.
    #[arg(long = "R")]
    base: Option<String>,
    #[arg(long, default_value_t = 40)]
    horizon: u32,
    #[arg(long = "ell-max", default_value_t = DEFAULT_ELL_MAX)]
    ell_max: u32,
    /// Write the orbit as `step,magnitude` CSV.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "fn")]
    fn_name: String,
    #[arg(long, default_value = "0")]
    center: String,
    #[arg(long, default_value_t = 10.0)]
    width: f64,
    #[arg(long, default_value_t = 10.0)]
    height: f64,
    #[arg(long, default_value_t = 128)]
    px: usize,
    #[arg(long, default_value_t = 128)]
    py: usize,
    #[arg(long = "R")]
    base: Option<String>,
    #[arg(long, default_value_t = 30)]
    horizon: u32,
    #[arg(long = "ell-max", default_value_t = DEFAULT_ELL_MAX)]
    ell_max: u32,
    #[arg(long)]
    out: PathBuf,
    /// Also write the verdict histogram as CSV.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Worker threads (capped by ESCAPE_SPEC_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Run configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load_catalog(path: Option<&PathBuf>) -> anyhow::Result<Catalog> {
    match path {
        None => Ok(Catalog::builtin()),
        Some(p) => Catalog::load(p).with_context(|| format!("loading catalog {}", p.display())),
    }
}

fn model<'a>(cat: &'a Catalog, name: Option<&str>) -> anyhow::Result<&'a GrowthModel> {
    let name = name.context("--fn is required")?;
    Ok(cat.model(name)?)
}

fn magnitude(s: &str) -> anyhow::Result<TowerReal> {
    parse_magnitude(s).with_context(|| format!("bad magnitude `{s}`"))
}

fn cmd_catalog(cat: &Catalog, raw: bool) -> anyhow::Result<()> {
    if raw {
        out!("{}", cat.render())?;
        return Ok(());
    }
    outln!("{:<18} {:<14} {:<40} R_min", "name", "kind", "params")?;
    for e in cat.entries() {
        outln!(
            "{:<18} {:<14} {:<40} {}",
            e.name(),
            e.model.kind().label(),
            e.params,
            e.model.r_min()
        )?;
    }
    Ok(())
}

fn cmd_eval(cat: &Catalog, a: &EvalArgs) -> anyhow::Result<()> {
    let arg = || -> anyhow::Result<TowerReal> { magnitude(a.r.as_deref().context("--r is required")?) };
    if let Op::Psi = a.op {
        outln!("{}", psi_m(a.n, a.m, a.p, &arg()?)?)?;
        return Ok(());
    }
    let f = model(cat, a.fn_name.as_deref())?;
    let v = match a.op {
        Op::LogM => f.max_modulus_log(&arg()?)?,
        Op::M => f.max_modulus(&arg()?)?,
        Op::Mu => f.mu(a.m, a.eps, &arg()?)?,
        Op::IterateMu => f.iterate_mu(a.m, a.eps, &arg()?, a.n)?,
        Op::IterateM => f.iterate_max_modulus(&arg()?, a.n)?,
        Op::Phi => f.phi_m(a.m, &arg()?)?,
        Op::PhiEps => f.phi_m_eps(a.m, a.eps, &arg()?)?,
        Op::Order => {
            let radii: Vec<TowerReal> = (1..=16)
                .map(|i| TowerReal::from_f64(10f64.powi(i)))
                .collect::<Result<_, _>>()?;
            let est = estimate_order(f, &radii)?;
            outln!(
                "order estimate {} lower-order estimate {} (sampled on r = 1e1..1e16)",
                est.order, est.lower_order
            )?;
            return Ok(());
        }
        Op::Psi => unreachable!(),
    };
    outln!("{v}")?;
    Ok(())
}

fn run_check(cat: &Catalog, a: &CheckArgs) -> anyhow::Result<ConditionReport> {
    let ks = if a.k.is_empty() {
        reg::DEFAULT_K_GRID.to_vec()
    } else {
        a.k.clone()
    };
    let f = || model(cat, a.fn_name.as_deref());
    let report = match a.condition.as_str() {
        "theorem22" => reg::check_theorem22(f()?, a.m, a.eps, a.c, a.q, a.n)?,
        "lemma23" => {
            let n = a.a.len();
            reg::check_lemma23(n, a.p, &a.a, &a.b, None)?
        }
        "m_log" => reg::check_m_log_regular(f()?, a.m, a.eps, &ks)?,
        "strong_log" => reg::check_strong_log_regular(f()?, a.eps, &ks)?,
        "m_weak" => {
            let f = f()?;
            let base = match &a.base {
                Some(s) => magnitude(s)?,
                None => f.r_min(),
            };
            reg::check_m_weak_regular(f, a.m, a.eps, &base, a.horizon)?
        }
        "growth_condition" => reg::check_growth_condition(f()?, a.m, a.n, a.q, a.q_tilde)?,
        "psi_phi" => reg::check_psi_phi(f()?, a.m, a.n, a.q, a.q_tilde, a.p, a.d)?,
        "lemma34" => reg::check_lemma34(a.n.max(1), a.d, a.q)?,
        "lemma52" => {
            let k = a.k.first().copied().unwrap_or(2.0);
            reg::check_lemma52_transfer(f()?, a.eps, k)?
        }
        other => bail!(UsageError(format!("unknown condition `{other}`"))),
    };
    Ok(report)
}

fn cmd_check(cat: &Catalog, a: &CheckArgs) -> anyhow::Result<()> {
    let report = run_check(cat, a)?;
    outln!("{}", report.summary())?;
    if !report.note.is_empty() {
        outln!("# {}", report.note)?;
    }
    if a.verbose {
        for d in &report.details {
            outln!("#   {}: {} {}", d.label, d.verdict, d.witness)?;
        }
    }
    outln!("{REPORT_HEADER}")?;
    outln!("{}", report.to_row())?;
    Ok(())
}

fn cmd_classify(cat: &Catalog, a: &ClassifyArgs) -> anyhow::Result<()> {
    let f = cat.model(&a.fn_name)?;
    let z = escape_speed::orbit::parse_complex(&a.z)?;
    let base = match &a.base {
        Some(s) => magnitude(s)?,
        None => f.r_min(),
    };
    let record = iterate(f, z, a.horizon, DEFAULT_CEILING)?;
    let params = ClassifyParams {
        ell_max: a.ell_max,
        ..ClassifyParams::default()
    };
    let class = classify_escape(f, &record, &base, &params)?;
    outln!("{class}")?;
    outln!("{CLASSIFICATION_HEADER}")?;
    outln!("{}", ClassificationRow::new(f.name(), z, &class))?;
    if let Some(path) = &a.dump {
        fs::write(path, record.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_render(cat: &Catalog, a: &RenderArgs) -> anyhow::Result<()> {
    let f = cat.model(&a.fn_name)?.clone();
    let r = match &a.base {
        Some(s) => magnitude(s)?,
        None => f.r_min(),
    };
    let job = RenderJob {
        model: f,
        center: escape_speed::orbit::parse_complex(&a.center)?,
        width: a.width,
        height: a.height,
        pixels_x: a.px,
        pixels_y: a.py,
        r,
        horizon: a.horizon,
        ceiling: DEFAULT_CEILING,
        classify: ClassifyParams {
            ell_max: a.ell_max,
            ..ClassifyParams::default()
        },
        palette: Palette::default(),
    };
    let par = match a.threads {
        Some(n) => Parallelism::threads_capped(n),
        None => Parallelism::from_env(),
    };
    let out = render(&job, par)?;
    let mut file = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    out.write_ppm(&mut file)?;
    file.flush()?;
    if let Some(path) = &a.histogram {
        fs::write(path, out.histogram_csv())?;
    }
    for (k, v) in &out.histogram {
        outln!("{k} {v}")?;
    }
    Ok(())
}

fn cmd_suite(cli_catalog: Option<&PathBuf>, a: &SuiteArgs) -> anyhow::Result<bool> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(out) = &a.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let catalog_path = cli_catalog.or(cfg.catalog_path.as_ref()).cloned();
    let cat = load_catalog(catalog_path.as_ref()).map_err(|e| e.context(MissingCatalog))?;
    let outcome = run_suite(&cat, &cfg)?;
    let (reports, classes) = outcome.write(&cfg.output_dir)?;
    outln!(
        "{} reports -> {}\n{} classifications -> {}",
        outcome.reports.len(),
        reports.display(),
        outcome.classifications.len(),
        classes.display()
    )?;
    for m in &outcome.mismatches {
        outln!(
            "MISMATCH {} {} m={} eps={}: expected {}, got {}",
            m.fn_name,
            m.condition_id,
            m.m.map(|m| m.to_string()).unwrap_or_else(|| "-".into()),
            m.eps.map(|e| e.to_string()).unwrap_or_else(|| "-".into()),
            m.expected,
            m.got
        )?;
    }
    Ok(outcome.passed())
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
struct MissingCatalog;

impl std::fmt::Display for MissingCatalog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("catalog unavailable")
    }
}

impl std::error::Error for MissingCatalog {}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Command::Suite(a) = &cli.cmd {
        return cmd_suite(cli.catalog.as_ref(), a);
    }
    let cat = load_catalog(cli.catalog.as_ref()).map_err(|e| e.context(MissingCatalog))?;
    match &cli.cmd {
        Command::Catalog { raw } => cmd_catalog(&cat, *raw)?,
        Command::Eval(a) => cmd_eval(&cat, a)?,
        Command::Check(a) => cmd_check(&cat, a)?,
        Command::Classify(a) => cmd_classify(&cat, a)?,
        Command::Render(a) => cmd_render(&cat, a)?,
        Command::Suite(_) => unreachable!(),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
