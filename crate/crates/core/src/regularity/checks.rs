use super::{ConditionReport, Outcome, ReportParams, Scan, SubReport, Verdict, Witness};
use crate::error::{Error, Result};
use crate::growthfn::{psi_m, GrowthKind, GrowthModel, PiecewisePhiSpec};
use crate::grid::Grid;
use crate::tower::TowerReal;

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::param(msg))
    }
}

fn require_eps(eps: f64) -> Result<()> {
    require(eps > 0.0 && eps < 1.0, format!("eps must lie in (0, 1), got {eps}"))
}

fn require_k_grid(ks: &[f64]) -> Result<()> {
    require(!ks.is_empty(), "k grid is empty")?;
    require(
        ks.iter().all(|&k| k > 1.0 && k.is_finite()),
        "every k must exceed 1",
    )
}

/// `c * r`.
fn times(c: f64, v: &TowerReal) -> Result<TowerReal> {
    v.scale(c)
}

/// Under `M(r) >= exp^{n+1}((log^n r)^q)`, `mu_{m,eps}(r) > c r`
/// for large `r`. Reports the least radius from which both hold.
pub fn check_theorem22(
    f: &GrowthModel,
    m: u32,
    eps: f64,
    c: f64,
    q: f64,
    n: u32,
) -> Result<ConditionReport> {
    require(m >= 2, "theorem22 needs m >= 2")?;
    require_eps(eps)?;
    require(c > 1.0, "c must exceed 1")?;
    require(q > 0.0, "q must be positive")?;
    let grid = f.radius_grid();
    let hyp = Scan::run(grid.points(), |r| {
        Outcome::ge(
            f.max_modulus(r),
            r.ln_n(n).and_then(|x| x.pow(q)).and_then(|x| x.exp_n(n + 1)),
        )
    });
    let concl = Scan::run(grid.points(), |r| {
        Outcome::gt(f.mu(m, eps, r), times(c, r))
    });
    let params = ReportParams {
        m: Some(m),
        eps: Some(eps),
        q: Some(q),
        n: Some(n),
        ..Default::default()
    };
    let mut report = match hyp.verdict {
        Verdict::SatisfiedOnRange => {
            let mut r = ConditionReport::from_scan("theorem22", f.name(), params, &concl, "R");
            if let (Some(a), Some(b)) = (hyp.threshold, concl.threshold) {
                r.witness = Witness::Threshold {
                    k: None,
                    var: "R",
                    at: a.max(b),
                };
            }
            r
        }
        _ => ConditionReport::from_scan("theorem22", f.name(), params, &hyp, "R")
            .with_note("hypothesis not established"),
    };
    report.details = vec![
        sub("hypothesis", &hyp, None, "R"),
        sub("conclusion", &concl, None, "R"),
    ];
    if report.note.is_empty() {
        report.note = format!("c={c}");
    }
    Ok(report)
}

fn sub(label: impl Into<String>, scan: &Scan, k: Option<f64>, var: &'static str) -> SubReport {
    SubReport {
        label: label.into(),
        verdict: scan.verdict,
        witness: scan.witness(k, var),
        samples: scan.samples,
    }
}

/// Left side of the iterated-log inequality,
/// `a_1 log(a_2 log(... log(a_n r)))`.
pub fn lemma23_lhs(a: &[f64], r: &TowerReal) -> Result<TowerReal> {
    let (last, rest) = a.split_last().ok_or_else(|| Error::param("empty coefficients"))?;
    let mut x = r.scale(*last)?;
    for &ai in rest.iter().rev() {
        x = x.ln()?.scale(ai)?;
    }
    Ok(x)
}

/// Right side, `log(b_1 log(... log((b_n r)^p)))`.
pub fn lemma23_rhs(b: &[f64], p: f64, r: &TowerReal) -> Result<TowerReal> {
    let (last, rest) = b.split_last().ok_or_else(|| Error::param("empty coefficients"))?;
    let mut y = r.scale(*last)?.pow(p)?;
    for &bi in rest.iter().rev() {
        y = y.ln()?.scale(bi)?;
    }
    y.ln()
}

/// `a_1 log(a_2 ... log(a_n r)) >= log(b_1 ... log((b_n r)^p))` on the
/// default grid, or on `grid` when given.
pub fn check_lemma23(
    n: usize,
    p: f64,
    a: &[f64],
    b: &[f64],
    grid: Option<&Grid>,
) -> Result<ConditionReport> {
    require(n >= 1, "n must be at least 1")?;
    require(p >= 1.0, "p must be at least 1")?;
    require(a.len() == n && b.len() == n, "need n coefficients a and b")?;
    require(
        a.iter().chain(b).all(|&x| x > 0.0 && x.is_finite()),
        "coefficients must be positive",
    )?;
    let default = Grid::default();
    let grid = grid.unwrap_or(&default);
    let scan = Scan::run(grid.points(), |r| {
        Outcome::ge(lemma23_lhs(a, r), lemma23_rhs(b, p, r))
    });
    let params = ReportParams {
        n: Some(n as u32),
        ..Default::default()
    };
    Ok(
        ConditionReport::from_scan("lemma23", "-", params, &scan, "R")
            .with_note(format!("p={p} a={a:?} b={b:?}")),
    )
}

/// Shared search over a menu of `k`: the first `k` (in menu order) whose
/// scan is satisfied gives the witness; if every `k` is violated the last
/// counterexample is reported.
fn k_search(
    id: &str,
    f: &GrowthModel,
    mut params: ReportParams,
    ks: &[f64],
    grid: &Grid,
    cond: impl Fn(f64, &TowerReal) -> Outcome,
) -> ConditionReport {
    let mut details = Vec::new();
    let mut scans = Vec::new();
    for &k in ks {
        let scan = Scan::run(grid.points(), |r| cond(k, r));
        details.push(sub(format!("k={k}"), &scan, Some(k), "R"));
        scans.push((k, scan));
    }
    let chosen = scans
        .iter()
        .find(|(_, s)| s.verdict == Verdict::SatisfiedOnRange)
        .or_else(|| {
            scans
                .iter()
                .all(|(_, s)| s.verdict == Verdict::Violated)
                .then(|| scans.last())
                .flatten()
        });
    let mut report = match chosen {
        Some((k, scan)) => {
            params.k = Some(*k);
            ConditionReport::from_scan(id, f.name(), params, scan, "R")
        }
        None => {
            let samples = scans.iter().map(|(_, s)| s.samples).max().unwrap_or(0);
            ConditionReport {
                condition_id: id.to_string(),
                fn_name: f.name().to_string(),
                params,
                verdict: Verdict::Inconclusive,
                witness: Witness::None,
                range: grid.first().zip(grid.last()).map(|(a, b)| (*a, *b)),
                samples,
                details: Vec::new(),
                note: String::new(),
            }
        }
    };
    report.details = details;
    report
}

/// m-log-regularity: `mu_{m,eps}(exp^{m-1}(r^k)) >= exp^{m-1}(M(r)^k)`.
pub fn check_m_log_regular(
    f: &GrowthModel,
    m: u32,
    eps: f64,
    k_grid: &[f64],
) -> Result<ConditionReport> {
    require(m >= 1, "m must be at least 1")?;
    require_eps(eps)?;
    require_k_grid(k_grid)?;
    let grid = f.radius_grid();
    let params = ReportParams {
        m: Some(m),
        eps: Some(eps),
        ..Default::default()
    };
    Ok(k_search("m_log", f, params, k_grid, &grid, |k, r| {
        Outcome::ge(
            m_log_lhs(f, m, eps, k, r),
            m_log_rhs(f, m, k, r),
        )
    }))
}

pub fn m_log_lhs(f: &GrowthModel, m: u32, eps: f64, k: f64, r: &TowerReal) -> Result<TowerReal> {
    f.mu(m, eps, &r.pow(k)?.exp_n(m - 1)?)
}

pub fn m_log_rhs(f: &GrowthModel, m: u32, k: f64, r: &TowerReal) -> Result<TowerReal> {
    f.max_modulus(r)?.pow(k)?.exp_n(m - 1)
}

/// Strong log-regularity: `log M(r^k) >= (k log M(r))^{1/eps}`.
pub fn check_strong_log_regular(
    f: &GrowthModel,
    eps: f64,
    k_grid: &[f64],
) -> Result<ConditionReport> {
    require_eps(eps)?;
    require_k_grid(k_grid)?;
    let grid = f.radius_grid();
    let params = ReportParams {
        eps: Some(eps),
        ..Default::default()
    };
    Ok(k_search("strong_log", f, params, k_grid, &grid, |k, r| {
        Outcome::ge(strong_log_lhs(f, k, r), strong_log_rhs(f, eps, k, r))
    }))
}

pub fn strong_log_lhs(f: &GrowthModel, k: f64, r: &TowerReal) -> Result<TowerReal> {
    f.max_modulus_log(&r.pow(k)?)
}

pub fn strong_log_rhs(f: &GrowthModel, eps: f64, k: f64, r: &TowerReal) -> Result<TowerReal> {
    f.max_modulus_log(r)?.scale(k)?.pow(1.0 / eps)
}

/// Outcome of `mu^n(r) >= M^n(R)` for `n = 1..=horizon`, with the first
/// failing `n`.
fn weak_orbit(
    f: &GrowthModel,
    m: u32,
    eps: f64,
    start: &TowerReal,
    targets: &[Result<TowerReal>],
) -> (Outcome, Option<u32>) {
    let mut x = *start;
    for (i, target) in targets.iter().enumerate() {
        x = match f.mu(m, eps, &x) {
            Ok(v) => v,
            Err(_) => return (Outcome::Undefined, None),
        };
        let target = match target {
            Ok(t) => Ok(*t),
            Err(_) => return (Outcome::Undefined, None),
        };
        match Outcome::ge(Ok(x), target) {
            Outcome::Holds => {}
            o => return (o, Some(i as u32 + 1)),
        }
    }
    (Outcome::Holds, None)
}

fn weak_targets(f: &GrowthModel, base: &TowerReal, horizon: u32) -> Vec<Result<TowerReal>> {
    (1..=horizon)
        .map(|n| f.iterate_max_modulus(base, n))
        .collect()
}

/// m-weak-regularity to a finite horizon: the least sampled `r >= R` with
/// `mu_{m,eps}^n(r) >= M^n(R)` for every `n <= horizon`.
pub fn check_m_weak_regular(
    f: &GrowthModel,
    m: u32,
    eps: f64,
    base: &TowerReal,
    horizon: u32,
) -> Result<ConditionReport> {
    require(m >= 1, "m must be at least 1")?;
    require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]")?;
    require(horizon >= 1, "horizon must be at least 1")?;
    let targets = weak_targets(f, base, horizon);
    let grid = f.radius_grid().from_threshold(base);
    let mut steps = Vec::new();
    let outcomes: Vec<Outcome> = grid
        .points()
        .iter()
        .map(|r| {
            let (o, step) = weak_orbit(f, m, eps, r, &targets);
            steps.push(step);
            o
        })
        .collect();
    let scan = Scan::from_outcomes(grid.points(), &outcomes);
    let params = ReportParams {
        m: Some(m),
        eps: Some(eps),
        n: Some(horizon),
        ..Default::default()
    };
    let mut report = ConditionReport::from_scan("m_weak", f.name(), params, &scan, "r");
    if let Witness::Counterexample { at, step, .. } = &mut report.witness {
        *step = grid.index_of(at).and_then(|i| steps[i]);
    }
    Ok(report.with_note(format!("finite horizon N={horizon}, R={base}")))
}

/// The m-weak inequality at a single starting value.
pub fn check_m_weak_at(
    f: &GrowthModel,
    m: u32,
    eps: f64,
    base: &TowerReal,
    start: &TowerReal,
    horizon: u32,
) -> Result<ConditionReport> {
    require(m >= 1, "m must be at least 1")?;
    require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]")?;
    require(horizon >= 1, "horizon must be at least 1")?;
    let targets = weak_targets(f, base, horizon);
    let (outcome, step) = weak_orbit(f, m, eps, start, &targets);
    let (verdict, witness) = match outcome {
        Outcome::Holds => (
            Verdict::SatisfiedOnRange,
            Witness::Threshold {
                k: None,
                var: "r",
                at: *start,
            },
        ),
        Outcome::Fails => (
            Verdict::Violated,
            Witness::Counterexample {
                k: None,
                var: "r",
                at: *start,
                step,
            },
        ),
        Outcome::Tied | Outcome::Undefined => (Verdict::Inconclusive, Witness::None),
    };
    Ok(ConditionReport {
        condition_id: "m_weak".into(),
        fn_name: f.name().to_string(),
        params: ReportParams {
            m: Some(m),
            eps: Some(eps),
            n: Some(horizon),
            ..Default::default()
        },
        verdict,
        witness,
        range: Some((*start, *start)),
        samples: 1,
        details: Vec::new(),
        note: format!("finite horizon N={horizon}, R={base}"),
    })
}

/// Lower and upper sides of the growth sandwich,
/// `exp^{n+m-1}((log^{n+m-2} t)^q)`.
pub fn growth_bound(n: u32, m: u32, q: f64, t: &TowerReal) -> Result<TowerReal> {
    t.ln_n(n + m - 2)?.pow(q)?.exp_n(n + m - 1)
}

fn sandwich_scan(f: &GrowthModel, m: u32, n: u32, q: f64, q_tilde: f64, grid: &Grid) -> Scan {
    Scan::run(grid.points(), |t| {
        let Ok(phi) = f.phi_m(m, t) else {
            return Outcome::Undefined;
        };
        let lower = Outcome::ge(Ok(phi), growth_bound(n, m, q, t));
        let upper = Outcome::ge(growth_bound(n, m, q_tilde, t), Ok(phi));
        lower.and(upper)
    })
}

fn check_growth_args(m: u32, n: u32, q: f64, q_tilde: f64) -> Result<()> {
    require(m >= 1, "m must be at least 1")?;
    require(n + m >= 2, "need n + m >= 2")?;
    require(q > 0.0 && q < 1.0, "q must lie in (0, 1)")?;
    require(q_tilde > 0.0, "q~ must be positive")
}

/// Growth sandwich
/// `exp^{n+m-1}((log^{n+m-2} t)^q) <= phi_m(t) <= exp^{n+m-1}((log^{n+m-2} t)^q~)`.
pub fn check_growth_condition(
    f: &GrowthModel,
    m: u32,
    n: u32,
    q: f64,
    q_tilde: f64,
) -> Result<ConditionReport> {
    check_growth_args(m, n, q, q_tilde)?;
    let grid = f.time_grid();
    let scan = sandwich_scan(f, m, n, q, q_tilde, &grid);
    let params = ReportParams {
        m: Some(m),
        q: Some(q),
        n: Some(n),
        ..Default::default()
    };
    Ok(
        ConditionReport::from_scan("growth_condition", f.name(), params, &scan, "t0")
            .with_note(format!("q~={q_tilde}")),
    )
}

/// The growth sandwich for every `(n, q)` pair.
pub fn growth_condition_sweep(
    f: &GrowthModel,
    m: u32,
    ns: &[u32],
    qs: &[f64],
    q_tilde: f64,
) -> Result<Vec<ConditionReport>> {
    let mut out = Vec::new();
    for &n in ns {
        for &q in qs {
            out.push(check_growth_condition(f, m, n, q, q_tilde)?);
        }
    }
    Ok(out)
}

/// The sandwich, then `phi_m(psi_m(t)) >= psi_m(phi_m(t))^d`.
pub fn check_psi_phi(
    f: &GrowthModel,
    m: u32,
    n: u32,
    q: f64,
    q_tilde: f64,
    p: f64,
    d: f64,
) -> Result<ConditionReport> {
    check_growth_args(m, n, q, q_tilde)?;
    require(p * q > 1.0, "need p q > 1")?;
    require(d > 1.0, "d must exceed 1")?;
    let grid = f.time_grid();
    let sandwich = sandwich_scan(f, m, n, q, q_tilde, &grid);
    let concl = Scan::run(grid.points(), |t| {
        let lhs = psi_m(n, m, p, t).and_then(|s| f.phi_m(m, &s));
        let rhs = f
            .phi_m(m, t)
            .and_then(|x| psi_m(n, m, p, &x))
            .and_then(|x| x.pow(d));
        Outcome::ge(lhs, rhs)
    });
    let params = ReportParams {
        m: Some(m),
        q: Some(q),
        n: Some(n),
        ..Default::default()
    };
    let mut report = match sandwich.verdict {
        Verdict::SatisfiedOnRange => {
            let mut r = ConditionReport::from_scan("psi_phi", f.name(), params, &concl, "t0");
            if let (Some(a), Some(b)) = (sandwich.threshold, concl.threshold) {
                r.witness = Witness::Threshold {
                    k: None,
                    var: "t0",
                    at: a.max(b),
                };
            }
            r.with_note(format!("q~={q_tilde} p={p} d={d}"))
        }
        _ => ConditionReport::from_scan("psi_phi", f.name(), params, &sandwich, "t0")
            .with_note("growth condition not established"),
    };
    report.details = vec![
        sub("growth_condition", &sandwich, None, "t0"),
        sub("conclusion", &concl, None, "t0"),
    ];
    Ok(report)
}

pub fn lemma34_lhs(n: u32, q: f64, r: &TowerReal) -> Result<TowerReal> {
    r.pow(q)?.ln_n(n)
}

pub fn lemma34_rhs(n: u32, d: f64, q: f64, r: &TowerReal) -> Result<TowerReal> {
    r.ln_n(n)?.pow(q)?.scale(d)
}

/// Strict `log^n(r^q) > d (log^n r)^q`.
pub fn check_lemma34(n: u32, d: f64, q: f64) -> Result<ConditionReport> {
    require(n >= 1, "n must be at least 1")?;
    require(d > 0.0, "d must be positive")?;
    require(q > 0.0 && q < 1.0, "q must lie in (0, 1)")?;
    let grid = Grid::default();
    let scan = Scan::run(grid.points(), |r| {
        Outcome::gt(lemma34_lhs(n, q, r), lemma34_rhs(n, d, q, r))
    });
    let params = ReportParams {
        q: Some(q),
        n: Some(n),
        ..Default::default()
    };
    Ok(ConditionReport::from_scan("lemma34", "-", params, &scan, "R").with_note(format!("d={d}")))
}

pub fn lemma52_lhs(spec: &PiecewisePhiSpec, k: f64, t: &TowerReal) -> Result<TowerReal> {
    spec.eval(&t.scale(k)?.exp()?)
}

pub fn lemma52_rhs(spec: &PiecewisePhiSpec, eps: f64, k: f64, t: &TowerReal) -> Result<TowerReal> {
    spec.eval(t)?.scale(k / eps)?.exp()
}

/// Transfer condition `phi(e^{k t}) >= exp((k/eps) phi(t))` on a
/// piecewise growth curve, reported per branch: the base curve `mu` off the
/// chords, and each chord the grid resolves.
pub fn check_lemma52_transfer(f: &GrowthModel, eps: f64, k: f64) -> Result<ConditionReport> {
    let GrowthKind::PiecewisePhi(spec) = f.kind() else {
        return Err(Error::param(format!(
            "lemma52 needs a piecewise growth curve, `{}` is {}",
            f.name(),
            f.kind().label()
        )));
    };
    require(eps > 0.0 && eps <= 1.0, format!("eps must lie in (0, 1], got {eps}"))?;
    require(k > 1.0, "k must exceed 1")?;
    let grid = f.time_grid();
    let points = grid.points();
    let outcomes: Vec<Outcome> = points
        .iter()
        .map(|t| Outcome::ge(lemma52_lhs(spec, k, t), lemma52_rhs(spec, eps, k, t)))
        .collect();
    let scan = Scan::from_outcomes(points, &outcomes);
    let params = ReportParams {
        eps: Some(eps),
        k: Some(k),
        ..Default::default()
    };
    let mut report = ConditionReport::from_scan("lemma52", f.name(), params, &scan, "t1");

    let branch_of = |t: &TowerReal| spec.segment_containing(t).map(|s| s.index);
    let mut branches: Vec<Option<u32>> = points.iter().map(branch_of).collect();
    branches.sort();
    branches.dedup();
    for branch in branches {
        let (bp, bo): (Vec<TowerReal>, Vec<Outcome>) = points
            .iter()
            .zip(&outcomes)
            .filter(|(t, _)| branch_of(t) == branch)
            .map(|(t, o)| (*t, *o))
            .unzip();
        let s = Scan::from_outcomes(&bp, &bo);
        let label = match branch {
            None => "mu".to_string(),
            Some(n) => format!("segment{n}"),
        };
        report.details.push(sub(label, &s, Some(k), "t1"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(x: f64) -> TowerReal {
        TowerReal::from_f64(x).unwrap()
    }

    #[test]
    fn lemma23_sides() {
        // n = 1: a r vs log((b r)^p)
        let r = tr(5.0);
        assert!((lemma23_lhs(&[2.0], &r).unwrap().to_f64() - 10.0).abs() < 1e-12);
        let rhs = lemma23_rhs(&[1.0], 2.0, &r).unwrap().to_f64();
        assert!((rhs - 2.0 * 5f64.ln()).abs() < 1e-14);
        // n = 2: a1 log(a2 r) vs log(b1 log((b2 r)^p))
        let lhs = lemma23_lhs(&[0.5, 0.5], &tr(100.0)).unwrap().to_f64();
        assert!((lhs - 0.5 * 50f64.ln()).abs() < 1e-14);
        let rhs = lemma23_rhs(&[1.0, 1.0], 1.0, &tr(100.0)).unwrap().to_f64();
        assert!((rhs - 100f64.ln().ln()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = GrowthModel::exp();
        assert!(check_theorem22(&f, 1, 0.5, 2.0, 0.5, 0).is_err());
        assert!(check_m_log_regular(&f, 1, 1.5, &[2.0]).is_err());
        assert!(check_strong_log_regular(&f, 0.5, &[0.5]).is_err());
        assert!(check_lemma34(1, 2.0, 1.5).is_err());
        assert!(check_psi_phi(&f, 2, 0, 0.4, 1.1, 2.0, 2.0).is_err());
        assert!(check_lemma23(2, 1.0, &[1.0], &[1.0, 1.0], None).is_err());
        assert!(check_lemma52_transfer(&f, 0.5, 2.0).is_err());
    }

    #[test]
    fn m_log_sides_for_exp() {
        let f = GrowthModel::exp();
        // m = 1: eps r^k vs k r in the exponent
        let lhs = m_log_lhs(&f, 1, 0.5, 2.0, &tr(3.0)).unwrap().to_f64();
        assert!((lhs.ln() - 4.5).abs() < 1e-12);
        let rhs = m_log_rhs(&f, 1, 2.0, &tr(3.0)).unwrap().to_f64();
        assert!((rhs.ln() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn theorem22_hypothesis_fails_for_polynomial() {
        let kind = crate::growthfn::parse_kind("power_series", "taylor=exp degree=6").unwrap();
        let f = GrowthModel::new("poly6", kind).unwrap();
        let rep = check_theorem22(&f, 2, 0.5, 2.0, 0.5, 0).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        assert_eq!(rep.details[0].verdict, Verdict::Violated);
    }
}
