//! Location and depth of the transmission dip on each side of zero delay.

use super::{check_increasing, RatioPoint, BASELINE_MIN_DELAY};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

const ZERO_DELAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideDip {
    /// Parabola-refined delay of the minimum (fs).
    pub tau_min: f64,
    pub ratio_min: f64,
    /// `1 - R_min`, relative to the long-delay level.
    pub depth_vs_long: f64,
    /// `(R(0) - R_min) / R(0)`.
    pub depth_vs_zero: f64,
}

/// `None` on a side means its lowest point sits at the edge of the window or on
/// a plateau, so no interior minimum exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipMetrics {
    pub ratio_at_zero: f64,
    pub left: Option<SideDip>,
    pub right: Option<SideDip>,
}

impl DipMetrics {
    pub fn degenerate(&self) -> bool {
        self.left.is_none() || self.right.is_none()
    }

    /// Mean of the two side minima positions as a positive delay, if both exist.
    pub fn mean_abs_tau_min(&self) -> Option<f64> {
        Some(0.5 * (self.left?.tau_min.abs() + self.right?.tau_min.abs()))
    }
}

/// Vertex of the parabola through three points, clamped to their span.
fn vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (d1, d2) = (x[0] - x[1], x[2] - x[1]);
    let (e1, e2) = (y[0] - y[1], y[2] - y[1]);
    // y - y1 = b u + c u² in u = x - x1
    let det = d1 * d2 * (d2 - d1);
    let c = (e2 * d1 - e1 * d2) / det;
    let b = (e1 * d2 * d2 - e2 * d1 * d1) / det;
    if !(c > 0.0) {
        return (x[1], y[1]);
    }
    let u = (-b / (2.0 * c)).clamp(d1.min(d2), d1.max(d2));
    (x[1] + u, y[1] + b * u + c * u * u)
}

/// Finds the interior minimum of `side`, where `side[0]` is the zero-delay point
/// and the rest run outward.
fn side_minimum(side: &[(f64, f64)], r0: f64) -> Option<SideDip> {
    let (k, _) = side
        .iter()
        .enumerate()
        .skip(1)
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    if k + 1 >= side.len() {
        return None;
    }
    let (prev, here, next) = (side[k - 1], side[k], side[k + 1]);
    if !(here.1 < prev.1 && here.1 < next.1) {
        return None;
    }
    let (tau_min, ratio_min) = vertex([prev.0, here.0, next.0], [prev.1, here.1, next.1]);
    Some(SideDip {
        tau_min,
        ratio_min,
        depth_vs_long: 1.0 - ratio_min,
        depth_vs_zero: (r0 - ratio_min) / r0,
    })
}

/// Dip metrics of a ratio series that contains `τ = 0` and reaches `±20 fs`.
pub fn dip_metrics(points: &[RatioPoint]) -> Result<DipMetrics> {
    check_increasing(points.iter().map(|p| p.delay))?;
    let zero = points
        .iter()
        .position(|p| p.delay.abs() <= ZERO_DELAY_TOLERANCE)
        .ok_or_else(|| Error::Contract("series has no point at zero delay".into()))?;
    let (first, last) = (points[0].delay, points[points.len() - 1].delay);
    if first > -BASELINE_MIN_DELAY || last < BASELINE_MIN_DELAY {
        return Err(Error::Contract(format!(
            "series must cover ±{BASELINE_MIN_DELAY} fs, spans [{first}, {last}]"
        )));
    }
    if points.iter().any(|p| !p.ratio.is_finite()) {
        return Err(Error::Contract("non-finite ratio".into()));
    }
    let r0 = points[zero].ratio;
    let right: Vec<(f64, f64)> = points[zero..].iter().map(|p| (p.delay, p.ratio)).collect();
    let left: Vec<(f64, f64)> = points[..=zero].iter().rev().map(|p| (p.delay, p.ratio)).collect();
    Ok(DipMetrics { ratio_at_zero: r0, left: side_minimum(&left, r0), right: side_minimum(&right, r0) })
}
