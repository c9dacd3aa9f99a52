//! Real growth curve `phi(t) = log M(e^t)` made of `mu(t) = exp(sqrt t)` with
//! linear chords on `[t_{n+1}^{3/4}, t_{n+1}]`, where `t_{n+1} = exp(t_n)`.
//!
//! Chord values are evaluated in log space. When `ln t_{n+1}` leaves the `f64`
//! range the chord is indistinguishable at tower precision from its right end
//! value everywhere past its left end, and is evaluated that way.

use crate::error::{Error, Result};
use crate::tower::TowerReal;

/// First breakpoint used by the built-in catalog.
pub const DEFAULT_T1: f64 = 10.0;

/// Extra samples placed across each chord, and just past it.
const CHORD_SAMPLES: usize = 64;
const POST_CHORD_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiecewisePhiSpec {
    t1: f64,
    with_segments: bool,
}

/// One chord `[left, right]` with `right = t_{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub index: u32,
    pub left: TowerReal,
    pub right: TowerReal,
}

impl Segment {
    pub fn contains(&self, t: &TowerReal) -> bool {
        self.left <= *t && *t <= self.right
    }

    /// `(ln left, ln right)` when both fit in `f64`. Both come from the end
    /// towers themselves: the chord is so steep near its left end that one
    /// rounding step in `t` moves it far off `mu(left)`.
    pub fn log_bounds(&self) -> Option<(f64, f64)> {
        let la = self.left.ln().ok()?.small_value()?;
        let lb = self.right.ln().ok()?.small_value()?;
        Some((la, lb))
    }
}

impl PiecewisePhiSpec {
    pub fn new(t1: f64) -> Result<Self> {
        // Chords must start after the previous breakpoint: exp(0.75 t1) > t1.
        if !(t1 > 1.0 && t1.is_finite()) {
            return Err(Error::param(format!("t1 must exceed 1, got {t1}")));
        }
        Ok(PiecewisePhiSpec {
            t1,
            with_segments: true,
        })
    }

    /// The base curve `mu(t) = exp(sqrt t)` with no chords.
    pub fn base_only() -> Self {
        PiecewisePhiSpec {
            t1: DEFAULT_T1,
            with_segments: false,
        }
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn has_segments(&self) -> bool {
        self.with_segments
    }

    /// Breakpoint `t_n` (1-based) as a tower: `exp^{n-1}(t1)`.
    pub fn breakpoint(&self, n: u32) -> TowerReal {
        TowerReal::exp_tower(n.saturating_sub(1), self.t1).expect("finite t1")
    }

    /// Chord `n >= 1`, spanning `[t_{n+1}^{3/4}, t_{n+1}]`.
    pub fn segment(&self, n: u32) -> Segment {
        let right = self.breakpoint(n + 1);
        let left = right.pow(0.75).expect("positive breakpoint");
        Segment {
            index: n,
            left,
            right,
        }
    }

    pub fn segment_containing(&self, t: &TowerReal) -> Option<Segment> {
        if !self.with_segments {
            return None;
        }
        let mut n = 1;
        loop {
            let seg = self.segment(n);
            if *t < seg.left {
                return None;
            }
            if *t <= seg.right {
                return Some(seg);
            }
            n += 1;
        }
    }

    /// `mu(t) = exp(t^{1/2})`.
    pub fn base(t: &TowerReal) -> Result<TowerReal> {
        t.pow(0.5)?.exp()
    }

    /// Sample times resolving every chord whose ends have `f64` logs:
    /// uniform in `ln t` across the chord, then a short run past it.
    pub fn refinement_times(&self) -> Vec<TowerReal> {
        if !self.with_segments {
            return Vec::new();
        }
        let mut out = Vec::new();
        for n in 1.. {
            let Some((la, lb)) = self.segment(n).log_bounds() else {
                break;
            };
            let across = (0..=CHORD_SAMPLES)
                .map(|i| la + (lb - la) * i as f64 / CHORD_SAMPLES as f64);
            let after = (1..=POST_CHORD_SAMPLES)
                .map(|i| lb + 0.25 * lb * i as f64 / POST_CHORD_SAMPLES as f64);
            out.extend(
                across
                    .chain(after)
                    .filter_map(|lt| TowerReal::exp_tower(1, lt).ok()),
            );
        }
        out
    }

    pub fn eval(&self, t: &TowerReal) -> Result<TowerReal> {
        if t.level() == 0 && t.mantissa() < 0.0 {
            return Err(Error::domain(format!("phi undefined at negative t = {t}")));
        }
        match self.segment_containing(t) {
            Some(seg) => chord_value(&seg, t),
            None => Self::base(t),
        }
    }
}

fn chord_value(seg: &Segment, t: &TowerReal) -> Result<TowerReal> {
    let Some((la, lb)) = seg.log_bounds() else {
        return if *t == seg.left {
            PiecewisePhiSpec::base(&seg.left)
        } else {
            PiecewisePhiSpec::base(&seg.right)
        };
    };
    let lt = t
        .ln()?
        .small_value()
        .ok_or_else(|| Error::domain("chord argument outside f64 log range"))?;
    if lt <= la {
        return PiecewisePhiSpec::base(&seg.left);
    }
    // phi = (1 - w) mu(a) + w mu(b),  w = (t - a) / (b - a)
    let ln_num = lt + (-(la - lt).exp_m1()).ln();
    let ln_den = lb + (-(la - lb).exp_m1()).ln();
    let ln_w = (ln_num - ln_den).min(0.0);
    let ln_mu_a = TowerReal::exp_tower(1, 0.5 * la)?;
    let ln_mu_b = TowerReal::exp_tower(1, 0.5 * lb)?;
    let upper = ln_mu_b.offset(ln_w)?;
    let w = ln_w.exp();
    let ln_phi = if w < 1.0 {
        let lower = ln_mu_a.offset((-w).ln_1p())?;
        log_sum_exp(&upper, &lower)?
    } else {
        upper
    };
    ln_phi.exp()
}

/// `ln(e^a + e^b)`; beyond `f64` range the smaller term is invisible.
fn log_sum_exp(a: &TowerReal, b: &TowerReal) -> Result<TowerReal> {
    match (a.small_value(), b.small_value()) {
        (Some(x), Some(y)) => {
            let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
            TowerReal::from_f64(hi + (lo - hi).exp().ln_1p())
        }
        _ => Ok(*a.max(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::MANTISSA_TOL;

    fn tr(x: f64) -> TowerReal {
        TowerReal::from_f64(x).unwrap()
    }

    /// Direct f64 chord for the first segment, where every value fits.
    fn chord_f64(t: f64) -> f64 {
        let b = 10f64.exp();
        let a = b.powf(0.75);
        let mu = |x: f64| x.sqrt().exp();
        mu(a) + (t - a) * (mu(b) - mu(a)) / (b - a)
    }

    #[test]
    fn breakpoints_follow_exp_recursion() {
        let spec = PiecewisePhiSpec::new(10.0).unwrap();
        assert!((spec.breakpoint(1).to_f64() - 10.0).abs() < 1e-12);
        assert!((spec.breakpoint(2).to_f64() - 10f64.exp()).abs() < 1e-8);
        assert_eq!(spec.breakpoint(3), spec.breakpoint(2).exp().unwrap());
        let s1 = spec.segment(1);
        assert!((s1.left.to_f64() - 7.5f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn first_segment_matches_f64_chord() {
        let spec = PiecewisePhiSpec::new(10.0).unwrap();
        for t in [1900.0, 2500.0, 9000.0, 15000.0, 22000.0] {
            let got = spec.eval(&tr(t)).unwrap().to_f64();
            let want = chord_f64(t);
            assert!(((got - want) / want).abs() < 1e-11, "t={t}: {got} vs {want}");
        }
        // Off the chords the curve is mu.
        let off = spec.eval(&tr(500.0)).unwrap().to_f64();
        assert!(((off - 500f64.sqrt().exp()) / off).abs() < 1e-13);
    }

    #[test]
    fn continuous_at_chord_ends() {
        let spec = PiecewisePhiSpec::new(10.0).unwrap();
        for n in 1..=3 {
            let seg = spec.segment(n);
            for end in [seg.left, seg.right] {
                let on_chord = chord_value(&seg, &end).unwrap();
                let base = PiecewisePhiSpec::base(&end).unwrap();
                assert!(on_chord.approx_eq(&base, MANTISSA_TOL), "segment {n} at {end}");
            }
        }
        // Evaluating through `eval` at the ends lands on the base curve too.
        let seg = spec.segment(1);
        for end in [seg.left, seg.right] {
            let v = spec.eval(&end).unwrap();
            assert!(v.approx_eq(&PiecewisePhiSpec::base(&end).unwrap(), MANTISSA_TOL));
        }
    }

    #[test]
    fn chord_lies_above_convex_base() {
        let spec = PiecewisePhiSpec::new(10.0).unwrap();
        let seg = spec.segment(2);
        let (la, lb) = seg.log_bounds().unwrap();
        for frac in [0.01, 0.3, 0.7, 0.99] {
            let t = TowerReal::exp_tower(1, la + frac * (lb - la)).unwrap();
            assert!(seg.contains(&t));
            let phi = spec.eval(&t).unwrap();
            assert!(phi >= PiecewisePhiSpec::base(&t).unwrap());
        }
    }

    #[test]
    fn base_only_has_no_segments() {
        let spec = PiecewisePhiSpec::base_only();
        let t = tr(5000.0);
        assert_eq!(spec.eval(&t).unwrap(), PiecewisePhiSpec::base(&t).unwrap());
        assert!(PiecewisePhiSpec::new(0.5).is_err());
        assert!(spec.eval(&tr(-1.0)).is_err());
    }
}
