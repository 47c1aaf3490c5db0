//! Problem data model: instances, route sets, schedules, the slip-time rule
//! and the independent schedule validator.

mod format;
mod instance;
mod schedule;
mod solution;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{read_instance, write_instance};
pub use instance::{Instance, Params, SquareMatrix};
pub use schedule::{Schedule, ScheduleDocument, TaskRecord, VehicleRecord, VehicleStats};
pub use solution::Solution;
pub use validate::{validate_schedule, Location, Violation, ViolationKind, ViolationReport};

/// Absolute tolerance, in seconds, used when checking schedule feasibility.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-6;

/// A planar coordinate in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point::new(self.x * factor, self.y * factor)
    }
}

/// Minimum start-time separation required between two sweeps `d` meters
/// apart: falls linearly from `w_max` at zero distance to zero at `d_max`.
pub fn slip_time(d: f64, w_max: f64, d_max: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be non-negative, got {d}"
        )));
    }
    if !(d_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "d_max must be positive, got {d_max}"
        )));
    }
    if !(w_max >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "w_max must be non-negative, got {w_max}"
        )));
    }
    Ok(slip_time_unchecked(d, w_max, d_max))
}

#[inline]
pub(crate) fn slip_time_unchecked(d: f64, w_max: f64, d_max: f64) -> f64 {
    if d < d_max {
        (w_max - w_max / d_max * d).max(0.0)
    } else {
        0.0
    }
}

/// Mean over all points of the distance to the nearest other point.
pub fn avg_nearest_neighbor_distance(coords: &[Point]) -> Result<f64> {
    if coords.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "nearest-neighbor distance needs at least 2 points, got {}",
            coords.len()
        )));
    }
    let total: f64 = coords
        .iter()
        .enumerate()
        .map(|(i, p)| {
            coords
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| p.distance(q))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / coords.len() as f64)
}
