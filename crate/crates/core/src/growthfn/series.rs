//! Maximum modulus of a power series by sampling the circle `|z| = r`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tower::TowerReal;

pub const CIRCLE_SAMPLES: usize = 1024;
/// Number of best-sampled angles refined by golden-section search.
pub const REFINE_ROUNDS: usize = 3;
const GOLDEN_ITERS: usize = 60;

/// A finite real power series `sum a_n z^n`. A polynomial is exact at every
/// radius; a truncated Taylor series carries the radius up to which the
/// truncation is trusted.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
    max_radius: Option<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>, max_radius: Option<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("power series coefficients must be finite"));
        }
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::param("power series must have a nonzero coefficient"));
        }
        if let Some(rmax) = max_radius {
            if rmax.is_nan() || rmax <= 0.0 {
                return Err(Error::param("max_radius must be positive"));
            }
        }
        Ok(PowerSeries { coeffs, max_radius })
    }

    /// Taylor polynomial of degree `degree` for `exp` or `cosh`.
    pub fn taylor(name: &str, degree: usize, max_radius: Option<f64>) -> Result<Self> {
        let mut fact = 1.0f64;
        let mut coeffs = Vec::with_capacity(degree + 1);
        for n in 0..=degree {
            if n > 0 {
                fact *= n as f64;
            }
            let c = match name {
                "exp" => 1.0 / fact,
                "cosh" if n % 2 == 0 => 1.0 / fact,
                "cosh" => 0.0,
                other => return Err(Error::param(format!("no Taylor series for `{other}`"))),
            };
            coeffs.push(c);
        }
        Self::new(coeffs, max_radius)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_radius(&self) -> Option<f64> {
        self.max_radius
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when every coefficient is non-negative, so the positive ray maps
    /// into itself and `M(r) = f(r)`.
    pub fn preserves_positive_ray(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0.0) && self.coeffs.iter().any(|&c| c > 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `ln |f(z)|`, scaled by the leading term for `|z| > 1` so it stays
    /// finite where `f(z)` overflows.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r <= 1.0 {
            return self.eval(z).norm().ln();
        }
        let d = self.degree();
        let lead = self.coeffs[d];
        self.scaled_reversed(z.inv()).norm().ln() + lead.abs().ln() + d as f64 * r.ln()
    }

    /// `f(z) / (a_d z^d)` evaluated as a polynomial in `w = 1/z`.
    fn scaled_reversed(&self, w: Complex64) -> Complex64 {
        let lead = *self.coeffs.last().expect("nonempty");
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c / lead)
    }

    fn log_abs_on_circle(&self, r: f64, theta: f64) -> f64 {
        self.log_abs(Complex64::from_polar(r, theta))
    }

    /// `ln M(r)` by 1024-point sampling refined around the best angles.
    pub fn log_max_modulus(&self, r: &TowerReal) -> Result<TowerReal> {
        if !r.is_positive() {
            return Err(Error::domain(format!("radius must be positive, got {r}")));
        }
        if let Some(rmax) = self.max_radius {
            if *r > TowerReal::from_f64(rmax)? {
                return Err(Error::domain(format!(
                    "radius {r} beyond truncation radius {rmax}"
                )));
            }
        }
        let Some(x) = r.small_value() else {
            // 1/r underflows: only the leading term is visible.
            let d = self.degree() as f64;
            let lead = self.coeffs[self.degree()].abs().ln();
            return r.ln()?.scale(d)?.offset(lead);
        };
        TowerReal::from_f64(self.sampled_log_max(x))
    }

    fn sampled_log_max(&self, r: f64) -> f64 {
        let step = TAU / CIRCLE_SAMPLES as f64;
        let mut samples: Vec<(f64, f64)> = (0..CIRCLE_SAMPLES)
            .map(|i| {
                let theta = i as f64 * step;
                (self.log_abs_on_circle(r, theta), theta)
            })
            .collect();
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = samples[0].0;
        for &(_, theta) in samples.iter().take(REFINE_ROUNDS) {
            let refined = golden_max(|t| self.log_abs_on_circle(r, t), theta - step, theta + step);
            best = best.max(refined);
        }
        best
    }
}

/// Maximum of a unimodal function on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    fc.max(fd)
}
