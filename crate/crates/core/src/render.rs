//! Plane renderings of escape classification.
//!
//! Pixel `(i, j)` samples `center + w (i/px - 1/2) + i h (1/2 - j/py)`, so
//! with an even height the middle row lies exactly on `Im z = Im center`.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use crate::exec::Parallelism;
use crate::exec::map_ordered;
use crate::growthfn::GrowthModel;
use crate::orbit::{iterate, ClassifyParams, EscapeClass, EscapeVerdict, Thresholds};
use crate::tower::TowerReal;

pub type Rgb = [u8; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Palette {
    pub fast: Rgb,
    pub quite_fast: Rgb,
    pub unclassified: Rgb,
    pub not_escaped: Rgb,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            fast: [255, 255, 255],
            quite_fast: [255, 255, 0],
            unclassified: [0, 0, 255],
            not_escaped: [0, 0, 0],
        }
    }
}

impl Palette {
    pub fn color(&self, verdict: EscapeVerdict) -> Rgb {
        match verdict {
            EscapeVerdict::Fast => self.fast,
            EscapeVerdict::QuiteFast => self.quite_fast,
            // orange darkening toward red as m grows
            EscapeVerdict::Qm(m) => {
                let g = 165i64 - 45 * (i64::from(m) - 2);
                [255, g.clamp(0, 255) as u8, 0]
            }
            EscapeVerdict::EscapingUnclassified => self.unclassified,
            EscapeVerdict::NotEscapedByHorizon => self.not_escaped,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RenderJob {
    pub model: GrowthModel,
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub pixels_x: usize,
    pub pixels_y: usize,
    pub r: TowerReal,
    pub horizon: u32,
    pub ceiling: f64,
    pub classify: ClassifyParams,
    pub palette: Palette,
}

impl RenderJob {
    pub fn validate(&self) -> Result<()> {
        if self.pixels_x == 0 || self.pixels_y == 0 {
            return Err(Error::param("resolution must be at least 1x1"));
        }
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            return Err(Error::param("rectangle must have positive finite size"));
        }
        if self.model.complex_map().is_none() {
            return Err(Error::param(format!(
                "`{}` has no complex evaluator",
                self.model.name()
            )));
        }
        Ok(())
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let x = self.center.re + self.width * (i as f64 / self.pixels_x as f64 - 0.5);
        let y = self.center.im + self.height * (0.5 - j as f64 / self.pixels_y as f64);
        Complex64::new(x, y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOutput {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB bytes.
    pub pixels: Vec<u8>,
    pub classes: Vec<EscapeVerdict>,
    pub histogram: BTreeMap<String, u64>,
}

impl RenderOutput {
    pub fn verdict_at(&self, i: usize, j: usize) -> EscapeVerdict {
        self.classes[j * self.width + i]
    }

    pub fn write_ppm(&self, mut out: impl Write) -> Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)?;
        Ok(())
    }

    pub fn ppm_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.pixels.len() + 32);
        self.write_ppm(&mut buf).expect("writing to memory");
        buf
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("verdict,count\n");
        for (k, v) in &self.histogram {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

fn classify_point(job: &RenderJob, thresholds: &Thresholds, z: Complex64) -> EscapeVerdict {
    // Orbits that cannot be evaluated count as not escaped.
    iterate(&job.model, z, job.horizon, job.ceiling)
        .and_then(|rec| thresholds.classify(&rec))
        .map_or(EscapeVerdict::NotEscapedByHorizon, |c: EscapeClass| c.verdict)
}

fn render_row(job: &RenderJob, thresholds: &Thresholds, j: usize) -> Vec<EscapeVerdict> {
    (0..job.pixels_x)
        .map(|i| classify_point(job, thresholds, job.point(i, j)))
        .collect()
}

pub fn render(job: &RenderJob, par: Parallelism) -> Result<RenderOutput> {
    job.validate()?;
    let thresholds = Thresholds::new(&job.model, job.r, job.horizon, &job.classify)?;
    let rows: Vec<usize> = (0..job.pixels_y).collect();
    let rows = map_ordered(&rows, par, |&j| render_row(job, &thresholds, j))?;
    let classes: Vec<EscapeVerdict> = rows.into_iter().flatten().collect();
    let mut pixels = Vec::with_capacity(classes.len() * 3);
    let mut histogram = BTreeMap::new();
    for v in &classes {
        pixels.extend_from_slice(&job.palette.color(*v));
        *histogram.entry(v.to_string()).or_insert(0) += 1;
    }
    Ok(RenderOutput {
        width: job.pixels_x,
        height: job.pixels_y,
        pixels,
        classes,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growthfn::{ClosedForm, GrowthKind};
    use crate::orbit::DEFAULT_CEILING;

    fn job(model: GrowthModel, center: Complex64, px: usize, py: usize) -> RenderJob {
        RenderJob {
            model,
            center,
            width: 10.0,
            height: 10.0,
            pixels_x: px,
            pixels_y: py,
            r: TowerReal::from_f64(2.0).unwrap(),
            horizon: 30,
            ceiling: DEFAULT_CEILING,
            classify: ClassifyParams::default(),
            palette: Palette::default(),
        }
    }

    #[test]
    fn axis_row_is_fast() {
        let j = job(GrowthModel::exp(), Complex64::new(5.0, 0.0), 16, 16);
        assert_eq!(j.point(8, 8), Complex64::new(5.0, 0.0));
        let out = render(&j, Parallelism::Sequential).unwrap();
        for i in 0..16 {
            if j.point(i, 8).re >= 2.0 {
                assert_eq!(out.verdict_at(i, 8), EscapeVerdict::Fast, "pixel {i}");
            }
        }
        assert_eq!(out.histogram.values().sum::<u64>(), 256);
        let ppm = out.ppm_bytes();
        assert!(ppm.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(ppm.len(), 13 + 16 * 16 * 3);
    }

    #[test]
    fn single_non_escaping_pixel() {
        let f = GrowthModel::new(
            "l",
            GrowthKind::ClosedFormLogM(ClosedForm::ScaledExp { lambda: 0.25 }),
        )
        .unwrap();
        let mut j = job(f.clone(), Complex64::new(0.0, 0.0), 1, 1);
        j.r = f.r_min();
        let out = render(&j, Parallelism::Threads(2)).unwrap();
        assert_eq!(out.pixels, vec![0, 0, 0]);
        assert_eq!(out.histogram.get("NOT_ESCAPED_BY_HORIZON"), Some(&1));
    }

    #[test]
    fn palette_ramp() {
        let p = Palette::default();
        assert_eq!(p.color(EscapeVerdict::Qm(2)), [255, 165, 0]);
        assert_eq!(p.color(EscapeVerdict::Qm(3)), [255, 120, 0]);
        assert_eq!(p.color(EscapeVerdict::Qm(9)), [255, 0, 0]);
    }
}
