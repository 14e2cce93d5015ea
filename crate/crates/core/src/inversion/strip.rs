//! Strip, box and decay estimates from indicator profiles.

use super::grid::SamplingGrid;
use super::indicator::IndicatorField;
use crate::error::{Error, Result};
use crate::geometry::{Mat3, Strip, UnitVec, Vec3};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Fit window for the decay slope, as distances from the strip.
pub const DECAY_WINDOW: (f64, f64) = (1.0, 5.0);

fn line_of(field: &IndicatorField) -> Result<(Vec3, UnitVec, Vec<f64>)> {
    match &field.grid {
        SamplingGrid::Line { origin, direction, .. } => {
            Ok((*origin, *direction, field.grid.line_parameters().unwrap_or_default()))
        }
        g => Err(Error::invalid(format!("expected a line profile, got grid {g}"))),
    }
}

/// Outermost crossings of `threshold * max` along the profile line,
/// linearly interpolated, as a strip with normal equal to the line direction.
pub fn strip_estimate(profile: &IndicatorField, threshold: f64) -> Result<Strip> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let (origin, direction, ts) = line_of(profile)?;
    let v = &profile.values;
    let max = profile.max();
    if max <= 0.0 {
        return Err(Error::EmptyProfile);
    }
    let level = threshold * max;
    let first = v.iter().position(|&x| x >= level).unwrap_or(0);
    let last = v.iter().rposition(|&x| x >= level).unwrap_or(0);
    if first == 0 || last + 1 == v.len() {
        return Err(Error::DegenerateStrip(format!(
            "profile is above {threshold} of its maximum at the end of the line, so only one crossing was found"
        )));
    }
    let cross = |i: usize, j: usize| {
        // v[i] < level <= v[j]
        let s = (level - v[i]) / (v[j] - v[i]);
        ts[i] + s * (ts[j] - ts[i])
    };
    let offset = origin.dot(*direction);
    Strip::new(direction, offset + cross(first - 1, first), offset + cross(last + 1, last))
}

/// Intersection of three strips: `{y : lo_j <= n_j . y <= hi_j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxEstimate {
    pub center: Vec3,
    /// Rows are the strip normals.
    pub normals: Mat3,
    pub half_widths: [f64; 3],
}

impl BoxEstimate {
    pub fn contains(&self, y: Vec3) -> bool {
        let local = self.normals.mul_vec(y - self.center);
        (0..3).all(|i| local.get(i).abs() <= self.half_widths[i])
    }
}

pub fn box_estimate(strips: &[Strip; 3]) -> Result<BoxEstimate> {
    let normals = Mat3::from_rows(*strips[0].normal, *strips[1].normal, *strips[2].normal);
    let det = normals.det();
    if det.abs() <= 1e-6 {
        return Err(Error::DegenerateNormals { det });
    }
    let mids = Vec3::new(strips[0].mid(), strips[1].mid(), strips[2].mid());
    let center = normals
        .solve(mids)
        .ok_or(Error::DegenerateNormals { det })?;
    Ok(BoxEstimate {
        center,
        normals,
        half_widths: strips.map(|s| s.width() / 2.0),
    })
}

/// Least-squares slope of `log I` against `log dist(z, strip)` for
/// distances in [`DECAY_WINDOW`] on both sides of the strip.
pub fn decay_profile(field: &IndicatorField, strip: &Strip) -> Result<f64> {
    let (origin, direction, ts) = line_of(field)?;
    let align = direction.dot(*strip.normal);
    if (align.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("profile line must run along the strip normal"));
    }
    // positions along the strip normal
    let s: Vec<f64> = ts.iter().map(|t| (origin + *direction * *t).dot(*strip.normal)).collect();
    let (smin, smax) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let reach = DECAY_WINDOW.1;
    if smin > strip.lo - reach || smax < strip.hi + reach {
        return Err(Error::invalid(format!(
            "profile covers [{smin}, {smax}] but must extend {reach} beyond the strip [{}, {}]",
            strip.lo, strip.hi
        )));
    }
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (pos, value) in s.iter().zip(&field.values) {
        let dist = if *pos < strip.lo {
            strip.lo - pos
        } else if *pos > strip.hi {
            pos - strip.hi
        } else {
            continue;
        };
        if dist < DECAY_WINDOW.0 || dist > DECAY_WINDOW.1 || *value <= 0.0 {
            continue;
        }
        let (x, y) = (dist.ln(), value.ln());
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if n < 2.0 || denom <= 0.0 {
        return Err(Error::invalid("too few profile samples in the decay window"));
    }
    Ok((n * sxy - sx * sy) / denom)
}
