//! Incident direction sets closed under negation, and polarization rules.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{UnitVec, Vec3};

/// Components below this magnitude do not decide the canonical sign.
const CANONICAL_ZERO: f64 = 1e-12;

/// Below this `|d x e3|` the polarization falls back to `d x e1`.
const POLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinatePlane {
    Xy,
    Xz,
    Yz,
}

impl CoordinatePlane {
    /// Orthonormal in-plane axes.
    pub fn axes(self) -> (Vec3, Vec3) {
        let (e1, e2, e3) = (UnitVec::E1.vec(), UnitVec::E2.vec(), UnitVec::E3.vec());
        match self {
            CoordinatePlane::Xy => (e1, e2),
            CoordinatePlane::Xz => (e1, e3),
            CoordinatePlane::Yz => (e2, e3),
        }
    }
}

impl fmt::Display for CoordinatePlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoordinatePlane::Xy => "xy",
            CoordinatePlane::Xz => "xz",
            CoordinatePlane::Yz => "yz",
        })
    }
}

impl FromStr for CoordinatePlane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" => Ok(CoordinatePlane::Xy),
            "xz" => Ok(CoordinatePlane::Xz),
            "yz" => Ok(CoordinatePlane::Yz),
            _ => Err(Error::invalid(format!("unknown coordinate plane '{s}' (expected xy, xz or yz)"))),
        }
    }
}

/// Unit directions closed under `v -> -v`, with the generator that made them.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    pub directions: Vec<UnitVec>,
    pub tag: String,
}

impl DirectionSet {
    pub fn empty() -> Self {
        DirectionSet {
            directions: Vec::new(),
            tag: "empty".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Parses `circle:<plane>:<n>` or `sphere:<n>`.
impl FromStr for DirectionSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let count = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad direction count '{t}' in '{s}'")))
        };
        match parts.as_slice() {
            ["circle", plane, n] => directions_circle(count(n)?, plane.parse()?),
            ["sphere", n] => directions_sphere(count(n)?),
            _ => Err(Error::invalid(format!(
                "bad direction spec '{s}' (expected circle:<xy|xz|yz>:<n> or sphere:<n>)"
            ))),
        }
    }
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "direction count must be even and at least 2 so the set is closed under negation, got {n}"
        )));
    }
    Ok(())
}

/// `n` directions at angles `2 pi j / n` in a coordinate plane. The second
/// half is the exact negation of the first.
pub fn directions_circle(n: usize, plane: CoordinatePlane) -> Result<DirectionSet> {
    check_even(n)?;
    let (u, v) = plane.axes();
    let half: Vec<UnitVec> = (0..n / 2)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            UnitVec::new_unchecked(u * t.cos() + v * t.sin())
        })
        .collect();
    let mut directions = half.clone();
    directions.extend(half.into_iter().map(|d| -d));
    Ok(DirectionSet {
        directions,
        tag: format!("circle:{plane}:{n}"),
    })
}

/// `n / 2` Fibonacci-lattice points on the upper hemisphere followed by
/// their antipodes. The azimuth advances by half the golden turn, so the
/// antipodes interleave with the lattice instead of crowding it near the
/// equator.
pub fn directions_sphere(n: usize) -> Result<DirectionSet> {
    check_even(n)?;
    let m = n / 2;
    let step = PI * (5f64.sqrt() - 1.0) / 2.0;
    let half: Vec<UnitVec> = (0..m)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = step * i as f64;
            UnitVec::new_unchecked(Vec3::new(r * phi.cos(), r * phi.sin(), z))
        })
        .collect();
    let mut directions = half.clone();
    directions.extend(half.into_iter().map(|d| -d));
    Ok(DirectionSet {
        directions,
        tag: format!("sphere:{n}"),
    })
}

/// `d` or `-d`, whichever has a positive leading nonzero component.
pub fn canonical_direction(d: UnitVec) -> UnitVec {
    let lead = d
        .to_array()
        .into_iter()
        .find(|c| c.abs() > CANONICAL_ZERO)
        .unwrap_or(1.0);
    if lead < 0.0 {
        -d
    } else {
        d
    }
}

/// `normalize(c x e3)` for the canonical representative `c` of `d`, or
/// `normalize(c x e1)` near the poles. Equal for `d` and `-d`.
pub fn default_polarization(d: UnitVec) -> UnitVec {
    let c = canonical_direction(d);
    let v = c.cross(UnitVec::E3.vec());
    let v = if v.norm() < POLE_TOL {
        c.cross(UnitVec::E1.vec())
    } else {
        v
    };
    UnitVec::new_unchecked(v / v.norm())
}

/// Rule assigning the polarization of each incident direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Polarization {
    Default,
    /// The default vector rotated about the canonical direction by this many
    /// radians.
    Rotated(f64),
}

impl Polarization {
    pub fn for_direction(&self, d: UnitVec) -> UnitVec {
        let p = default_polarization(d);
        match *self {
            Polarization::Default => p,
            Polarization::Rotated(angle) => {
                let c = canonical_direction(d);
                let q = c.cross(*p);
                let v = *p * angle.cos() + q * angle.sin();
                UnitVec::new_unchecked(v / v.norm())
            }
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::Default => f.write_str("default"),
            Polarization::Rotated(a) => write!(f, "rotate:{}", a.to_degrees()),
        }
    }
}

/// Parses `default` or `rotate:<degrees>`.
impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "default" {
            return Ok(Polarization::Default);
        }
        s.strip_prefix("rotate:")
            .and_then(|deg| deg.parse::<f64>().ok())
            .filter(|deg| deg.is_finite())
            .map(|deg| Polarization::Rotated(deg.to_radians()))
            .ok_or_else(|| Error::invalid(format!("bad polarization rule '{s}' (expected default or rotate:<deg>)")))
    }
}
