//! Sample grids for tail statements.
//!
//! Conditions of the form "for r large enough" are monotone-tail claims, so
//! radii are spaced uniformly in tower mantissa: `per_level` points across
//! each band `exp^level([1, e))`.

use std::ops::RangeInclusive;

use crate::tower::TowerReal;

pub const DEFAULT_LEVELS: RangeInclusive<u32> = 0..=3;
pub const DEFAULT_PER_LEVEL: usize = 64;

#[derive(Clone, Debug)]
pub struct Grid {
    points: Vec<TowerReal>,
}

impl Grid {
    pub fn tower(levels: RangeInclusive<u32>, per_level: usize) -> Self {
        let span = std::f64::consts::E - 1.0;
        let points = levels
            .flat_map(|level| {
                (0..per_level).map(move |i| {
                    let m = 1.0 + span * i as f64 / per_level as f64;
                    TowerReal::normalize(level, m).expect("finite mantissa")
                })
            })
            .collect();
        Grid { points }
    }

    pub fn from_points(mut points: Vec<TowerReal>) -> Self {
        points.sort();
        points.dedup_by(|a, b| a.approx_eq(b, 1e-13));
        Grid { points }
    }

    /// Adds extra sample points, keeping the grid sorted and deduplicated.
    pub fn merged(self, extra: impl IntoIterator<Item = TowerReal>) -> Self {
        let mut points = self.points;
        points.extend(extra);
        Self::from_points(points)
    }

    /// Keeps the points `>= lo`.
    pub fn from_threshold(self, lo: &TowerReal) -> Self {
        Grid {
            points: self.points.into_iter().filter(|p| p >= lo).collect(),
        }
    }

    pub fn points(&self) -> &[TowerReal] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<&TowerReal> {
        self.points.first()
    }

    pub fn last(&self) -> Option<&TowerReal> {
        self.points.last()
    }

    /// Index of the first point `>= value` (or `len()` if none).
    pub fn index_at_or_above(&self, value: &TowerReal) -> usize {
        self.points.partition_point(|p| p < value)
    }

    pub fn index_of(&self, value: &TowerReal) -> Option<usize> {
        self.points.iter().position(|p| p == value)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::tower(DEFAULT_LEVELS, DEFAULT_PER_LEVEL)
    }
}
