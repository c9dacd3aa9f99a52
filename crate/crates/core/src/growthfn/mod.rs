//! Entire functions through their maximum modulus `M(r)`, and the derived
//! growth maps used to compare escape speeds:
//!
//! * `mu_{m,eps}(r) = exp^m(eps * log^m M(r))`
//! * `phi_m(t) = log^{m-1} M(exp^{m-1}(t))` and `phi_{m,eps} = phi_m^eps`
//! * `psi_m(t) = exp^{n+m-1}((log^{n+m-1} t)^p)`
//!
//! All values are [`TowerReal`]s so iterates stay representable.

mod catalog;
mod closed;
mod phi;
mod series;

use num_complex::Complex64;

pub use catalog::{parse_kind, Catalog, CatalogEntry, Expectation, BUILTIN_CATALOG};
pub use closed::ClosedForm;
pub use phi::{PiecewisePhiSpec, Segment, DEFAULT_T1};
pub use series::PowerSeries;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::tower::TowerReal;

/// `iterate_max_modulus` switches to the conjugated route past this many steps.
pub const CONJUGATION_THRESHOLD: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthKind {
    ClosedFormLogM(ClosedForm),
    PowerSeries(PowerSeries),
    PiecewisePhi(PiecewisePhiSpec),
}

impl GrowthKind {
    pub fn label(&self) -> &'static str {
        match self {
            GrowthKind::ClosedFormLogM(_) => "closed_form",
            GrowthKind::PowerSeries(_) => "power_series",
            GrowthKind::PiecewisePhi(_) => "piecewise_phi",
        }
    }
}

/// A complex evaluator for the functions that have one.
#[derive(Clone, Copy, Debug)]
pub enum ComplexMap<'a> {
    Closed(ClosedForm),
    Series(&'a PowerSeries),
}

impl ComplexMap<'_> {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            ComplexMap::Closed(c) => c.eval(z),
            ComplexMap::Series(s) => s.eval(z),
        }
    }

    pub fn log_abs(&self, z: Complex64) -> f64 {
        match self {
            ComplexMap::Closed(c) => c.log_abs(z),
            ComplexMap::Series(s) => s.log_abs(z),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GrowthModel {
    name: String,
    kind: GrowthKind,
    r_min: TowerReal,
}

impl GrowthModel {
    /// Builds a model and locates `R_min`, the least radius beyond which
    /// `M(r) > r` on the default grid (refined by bisection).
    pub fn new(name: impl Into<String>, kind: GrowthKind) -> Result<Self> {
        let mut model = GrowthModel {
            name: name.into(),
            kind,
            r_min: TowerReal::ONE,
        };
        model.r_min = model.locate_r_min()?;
        Ok(model)
    }

    pub fn exp() -> Self {
        Self::new("exp", GrowthKind::ClosedFormLogM(ClosedForm::Exp)).expect("builtin")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &GrowthKind {
        &self.kind
    }

    pub fn r_min(&self) -> TowerReal {
        self.r_min
    }

    pub fn complex_map(&self) -> Option<ComplexMap<'_>> {
        match &self.kind {
            GrowthKind::ClosedFormLogM(c) => Some(ComplexMap::Closed(*c)),
            GrowthKind::PowerSeries(s) => Some(ComplexMap::Series(s)),
            GrowthKind::PiecewisePhi(_) => None,
        }
    }

    /// Whether `f` maps `(0, inf)` into itself with `f(x) = M(x)` there.
    pub fn preserves_positive_ray(&self) -> bool {
        match &self.kind {
            GrowthKind::ClosedFormLogM(ClosedForm::ScaledExp { lambda }) => *lambda > 0.0,
            GrowthKind::ClosedFormLogM(_) => true,
            GrowthKind::PowerSeries(s) => s.preserves_positive_ray(),
            GrowthKind::PiecewisePhi(_) => false,
        }
    }

    /// Radius beyond which the model is not trusted (truncated series).
    pub fn max_radius(&self) -> Option<f64> {
        match &self.kind {
            GrowthKind::PowerSeries(s) => s.max_radius(),
            _ => None,
        }
    }

    /// `log M(r)`.
    pub fn max_modulus_log(&self, r: &TowerReal) -> Result<TowerReal> {
        match &self.kind {
            GrowthKind::ClosedFormLogM(c) => c.log_max_modulus(r),
            GrowthKind::PowerSeries(s) => s.log_max_modulus(r),
            GrowthKind::PiecewisePhi(spec) => {
                if !r.is_positive() {
                    return Err(Error::domain(format!("radius must be positive, got {r}")));
                }
                let t = r.ln()?;
                if t.level() == 0 && t.mantissa() < 0.0 {
                    return Err(Error::domain(format!(
                        "radius {r} below the curve's domain r >= 1"
                    )));
                }
                spec.eval(&t)
            }
        }
    }

    pub fn max_modulus(&self, r: &TowerReal) -> Result<TowerReal> {
        self.max_modulus_log(r)?.exp()
    }

    /// `log^m M(r)`, with the failing depth reported when a log is undefined.
    pub fn iterated_log_max_modulus(&self, m: u32, r: &TowerReal) -> Result<TowerReal> {
        if m == 0 {
            return self.max_modulus(r);
        }
        let mut v = self.max_modulus_log(r)?;
        for depth in 2..=m {
            v = v.ln().map_err(|_| Error::IteratedLog { depth })?;
        }
        Ok(v)
    }

    /// `mu_{m,eps}(r) = exp^m(eps * log^m M(r))`.
    pub fn mu(&self, m: u32, eps: f64, r: &TowerReal) -> Result<TowerReal> {
        check_depth(m)?;
        check_eps(eps)?;
        self.iterated_log_max_modulus(m, r)?.scale(eps)?.exp_n(m)
    }

    pub fn iterate_mu(&self, m: u32, eps: f64, r: &TowerReal, n: u32) -> Result<TowerReal> {
        let mut x = *r;
        for _ in 0..n {
            x = self.mu(m, eps, &x)?;
        }
        Ok(x)
    }

    /// `M^n(r)`. Past [`CONJUGATION_THRESHOLD`] steps this iterates `phi_2`
    /// on `log r` instead, using `M^n(r) = exp(phi_2^n(log r))`.
    pub fn iterate_max_modulus(&self, r: &TowerReal, n: u32) -> Result<TowerReal> {
        if n > CONJUGATION_THRESHOLD {
            self.iterate_max_modulus_conjugated(r, n, 2)
        } else {
            self.iterate_max_modulus_direct(r, n)
        }
    }

    pub fn iterate_max_modulus_direct(&self, r: &TowerReal, n: u32) -> Result<TowerReal> {
        let mut x = *r;
        for _ in 0..n {
            x = self.max_modulus(&x)?;
        }
        Ok(x)
    }

    /// `M^n(r) = exp^{m-1}(phi_m^n(log^{m-1} r))`.
    pub fn iterate_max_modulus_conjugated(
        &self,
        r: &TowerReal,
        n: u32,
        m: u32,
    ) -> Result<TowerReal> {
        check_depth(m)?;
        let mut t = r.ln_n(m - 1)?;
        for _ in 0..n {
            t = self.phi_m(m, &t)?;
        }
        t.exp_n(m - 1)
    }

    /// `phi_m(t) = log^{m-1} M(exp^{m-1}(t))`.
    pub fn phi_m(&self, m: u32, t: &TowerReal) -> Result<TowerReal> {
        check_depth(m)?;
        let x = t.exp_n(m - 1)?;
        self.iterated_log_max_modulus(m - 1, &x)
    }

    /// `phi_{m,eps}(t) = phi_m(t)^eps`.
    pub fn phi_m_eps(&self, m: u32, eps: f64, t: &TowerReal) -> Result<TowerReal> {
        check_eps(eps)?;
        self.phi_m(m, t)?.pow(eps)
    }

    /// Model-specific sample radii, added to grids so the chords of a
    /// piecewise curve are resolved.
    pub fn refinement_radii(&self) -> Vec<TowerReal> {
        self.refinement_times()
            .into_iter()
            .filter_map(|t| t.exp().ok())
            .collect()
    }

    /// Like [`refinement_radii`](Self::refinement_radii) in `t = log r`.
    pub fn refinement_times(&self) -> Vec<TowerReal> {
        match &self.kind {
            GrowthKind::PiecewisePhi(spec) => spec.refinement_times(),
            _ => Vec::new(),
        }
    }

    /// Default radius grid for this model: tower grid plus refinement.
    pub fn radius_grid(&self) -> Grid {
        Grid::default().merged(self.refinement_radii())
    }

    pub fn time_grid(&self) -> Grid {
        Grid::default().merged(self.refinement_times())
    }

    fn exceeds_identity(&self, r: &TowerReal) -> bool {
        self.max_modulus(r).map(|m| m > *r).unwrap_or(false)
    }

    fn locate_r_min(&self) -> Result<TowerReal> {
        let grid = Grid::default();
        let pts: Vec<TowerReal> = grid
            .points()
            .iter()
            .copied()
            .filter(|r| self.max_modulus_log(r).is_ok())
            .collect();
        if pts.is_empty() {
            return Err(Error::domain(format!("model `{}` has no valid radius", self.name)));
        }
        let last_fail = pts.iter().rposition(|r| !self.exceeds_identity(r));
        match last_fail {
            None => Ok(pts[0]),
            Some(i) if i + 1 == pts.len() => Err(Error::domain(format!(
                "M(r) > r never holds on the sampled range for `{}`",
                self.name
            ))),
            Some(i) => {
                let (mut lo, mut hi) = (pts[i].to_f64(), pts[i + 1].to_f64());
                if !hi.is_finite() {
                    return Ok(pts[i + 1]);
                }
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.exceeds_identity(&TowerReal::from_f64(mid)?) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                TowerReal::from_f64(hi)
            }
        }
    }
}

/// `psi_m(t) = exp^{n+m-1}((log^{n+m-1} t)^p)`.
pub fn psi_m(n: u32, m: u32, p: f64, t: &TowerReal) -> Result<TowerReal> {
    check_depth(m)?;
    let depth = n + m - 1;
    t.ln_n(depth)?.pow(p)?.exp_n(depth)
}

/// Sampled growth-order statistics of `log log M(r) / log r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderEstimate {
    /// Largest sampled ratio, an estimate of the order.
    pub order: f64,
    /// Smallest sampled ratio, an estimate of the lower order.
    pub lower_order: f64,
}

/// Sampled estimates of order and lower order. These are finite-sample
/// statistics, not the limits themselves.
pub fn estimate_order(f: &GrowthModel, radii: &[TowerReal]) -> Result<OrderEstimate> {
    if radii.len() < 10 {
        return Err(Error::param(format!(
            "need at least 10 radii, got {}",
            radii.len()
        )));
    }
    let lo = radii.iter().min().expect("nonempty");
    let hi = radii.iter().max().expect("nonempty");
    if *lo <= TowerReal::ONE {
        return Err(Error::param("radii must exceed 1"));
    }
    let decades = match (hi.ln()?.small_value(), lo.ln()?.small_value()) {
        (Some(a), Some(b)) => (a - b) / std::f64::consts::LN_10,
        _ => f64::INFINITY,
    };
    if decades < 6.0 {
        return Err(Error::param(format!(
            "radii must span at least 6 decades, got {decades:.2}"
        )));
    }
    let mut order = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    for r in radii {
        let num = f.max_modulus_log(r)?.ln()?;
        let den = r.ln()?;
        let ratio = tower_ratio(&num, &den)?;
        order = order.max(ratio);
        lower = lower.min(ratio);
    }
    Ok(OrderEstimate {
        order,
        lower_order: lower,
    })
}

/// `a / b` for `b > 0`, going through logs when either side is huge.
fn tower_ratio(a: &TowerReal, b: &TowerReal) -> Result<f64> {
    if let (Some(x), Some(y)) = (a.small_value(), b.small_value()) {
        return Ok(x / y);
    }
    if !a.is_positive() {
        return Ok(0.0);
    }
    let (la, lb) = (a.ln()?, b.ln()?);
    match (la.small_value(), lb.small_value()) {
        (Some(x), Some(y)) => Ok((x - y).exp()),
        _ => Ok(if la > lb { f64::INFINITY } else { 0.0 }),
    }
}

fn check_depth(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::param("depth m must be at least 1"));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(())
}
