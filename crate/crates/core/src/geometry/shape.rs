//! Analytic obstacles: balls, (rotated) ellipsoids and disjoint unions.
//!
//! Shapes have a compact text form used on the command line and in dataset
//! headers:
//!
//! ```text
//! ball:0.8@0,0,1.5                     radius @ center
//! ellipsoid:1.0,0.4,0.7                semi-axes, centered at the origin
//! ellipsoid:1,0.4,0.7@0,0,0~0,0,1,30   rotated 30 degrees about e3
//! ball:0.8@0,0,1.5+ball:0.8@0,0,-1.5   disjoint union
//! ```
//!
//! A rotation after `~` is either an axis and an angle in degrees (4 numbers)
//! or a row-major matrix (9 numbers).

use std::fmt;
use std::str::FromStr;

use super::strip::Strip;
use super::vector::{Mat3, UnitVec, Vec3};
use crate::error::{Error, Result};

/// Orthogonality tolerance for ellipsoid rotations.
pub const ROTATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball {
        center: Vec3,
        radius: f64,
    },
    Ellipsoid {
        center: Vec3,
        semi_axes: [f64; 3],
        rotation: Mat3,
    },
    Union(Vec<Shape>),
}

impl Shape {
    pub fn ball(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Shape::Ball { center, radius })
    }

    pub fn ellipsoid(center: Vec3, semi_axes: [f64; 3], rotation: Mat3) -> Result<Self> {
        if semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) || !center.is_finite() {
            return Err(Error::invalid(format!(
                "ellipsoid semi-axes must be positive, got {semi_axes:?}"
            )));
        }
        let defect = rotation.orthogonality_defect();
        if defect > ROTATION_TOL {
            return Err(Error::invalid(format!(
                "ellipsoid rotation is not orthogonal (defect {defect:.3e})"
            )));
        }
        Ok(Shape::Ellipsoid {
            center,
            semi_axes,
            rotation,
        })
    }

    /// Axis-aligned ellipsoid.
    pub fn aligned_ellipsoid(center: Vec3, semi_axes: [f64; 3]) -> Result<Self> {
        Self::ellipsoid(center, semi_axes, Mat3::IDENTITY)
    }

    /// Union of pairwise disjoint parts. Nested unions are flattened.
    pub fn union(parts: Vec<Shape>) -> Result<Self> {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Shape::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.is_empty() {
            return Err(Error::invalid("union needs at least one part"));
        }
        for i in 0..flat.len() {
            for j in (i + 1)..flat.len() {
                if !disjoint(&flat[i], &flat[j]) {
                    return Err(Error::invalid(format!("union parts {i} and {j} overlap")));
                }
            }
        }
        if flat.len() == 1 {
            return Ok(flat.pop().unwrap());
        }
        Ok(Shape::Union(flat))
    }

    /// The primitive (non-union) parts.
    pub fn parts(&self) -> Vec<&Shape> {
        match self {
            Shape::Union(parts) => parts.iter().collect(),
            other => vec![other],
        }
    }

    /// Centers and radii when every part is a ball.
    pub fn balls(&self) -> Option<Vec<(Vec3, f64)>> {
        self.parts()
            .into_iter()
            .map(|p| match p {
                Shape::Ball { center, radius } => Some((*center, *radius)),
                _ => None,
            })
            .collect()
    }

    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match self {
            Shape::Ball { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
            Shape::Ellipsoid { semi_axes, .. } => {
                4.0 / 3.0 * PI * semi_axes[0] * semi_axes[1] * semi_axes[2]
            }
            Shape::Union(parts) => parts.iter().map(Shape::volume).sum(),
        }
    }

    /// Center of a primitive part, or the volume-weighted centroid of a union.
    pub fn center(&self) -> Vec3 {
        match self {
            Shape::Ball { center, .. } | Shape::Ellipsoid { center, .. } => *center,
            Shape::Union(parts) => {
                let total = self.volume();
                parts
                    .iter()
                    .fold(Vec3::ZERO, |acc, p| acc + p.center() * (p.volume() / total))
            }
        }
    }

    /// Radius of a ball around [`Shape::center`] enclosing a primitive part.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Shape::Ball { radius, .. } => *radius,
            Shape::Ellipsoid { semi_axes, .. } => semi_axes.iter().cloned().fold(0.0, f64::max),
            Shape::Union(parts) => {
                let c = self.center();
                parts
                    .iter()
                    .map(|p| p.center().distance(c) + p.bounding_radius())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Implicit function, negative inside, zero on the boundary. For
    /// primitives this is `|A^{-1}(y - c)|^2 - 1` with `A` the stretch map.
    pub fn level(&self, y: Vec3) -> f64 {
        match self {
            Shape::Ball { center, radius } => (y - *center).norm_sqr() / (radius * radius) - 1.0,
            Shape::Ellipsoid {
                center,
                semi_axes,
                rotation,
            } => {
                let local = rotation.transpose().mul_vec(y - *center);
                (local.x / semi_axes[0]).powi(2)
                    + (local.y / semi_axes[1]).powi(2)
                    + (local.z / semi_axes[2]).powi(2)
                    - 1.0
            }
            Shape::Union(parts) => parts
                .iter()
                .map(|p| p.level(y))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, y: Vec3) -> bool {
        self.level(y) < 0.0
    }

    /// Smallest slab `{y : lo <= y.theta <= hi}` containing the closure of the shape.
    pub fn strip_hull(&self, theta: UnitVec) -> Strip {
        let (lo, hi) = self.support_interval(theta);
        Strip::new(theta, lo, hi).expect("support interval is ordered")
    }

    fn support_interval(&self, theta: UnitVec) -> (f64, f64) {
        match self {
            Shape::Ball { center, radius } => {
                let c = center.dot(*theta);
                (c - radius, c + radius)
            }
            Shape::Ellipsoid {
                center,
                semi_axes,
                rotation,
            } => {
                let local = rotation.transpose().mul_vec(*theta);
                let half = Vec3::new(
                    semi_axes[0] * local.x,
                    semi_axes[1] * local.y,
                    semi_axes[2] * local.z,
                )
                .norm();
                let c = center.dot(*theta);
                (c - half, c + half)
            }
            Shape::Union(parts) => parts.iter().map(|p| p.support_interval(theta)).fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), (a, b)| (lo.min(a), hi.max(b)),
            ),
        }
    }
}

fn disjoint(a: &Shape, b: &Shape) -> bool {
    if let (Shape::Ball { center: c1, radius: r1 }, Shape::Ball { center: c2, radius: r2 }) = (a, b)
    {
        return c1.distance(*c2) > r1 + r2;
    }
    if a.center().distance(b.center()) > a.bounding_radius() + b.bounding_radius() {
        return true;
    }
    // Close ellipsoids: probe each surface against the other's interior.
    let probe = |s: &Shape, t: &Shape| {
        let mesh = super::mesh::mesh_shape(s, 0.05 * s.bounding_radius()).expect("valid shape");
        !mesh.vertices.iter().any(|v| t.level(*v) <= 0.0) && !t.contains(s.center())
    };
    probe(a, b) && probe(b, a)
}

fn fmt_vec(v: Vec3) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Ball { center, radius } => {
                write!(f, "ball:{radius}")?;
                if *center != Vec3::ZERO {
                    write!(f, "@{}", fmt_vec(*center))?;
                }
                Ok(())
            }
            Shape::Ellipsoid {
                center,
                semi_axes,
                rotation,
            } => {
                write!(f, "ellipsoid:{},{},{}", semi_axes[0], semi_axes[1], semi_axes[2])?;
                if *center != Vec3::ZERO || *rotation != Mat3::IDENTITY {
                    write!(f, "@{}", fmt_vec(*center))?;
                }
                if *rotation != Mat3::IDENTITY {
                    let m: Vec<String> = rotation.0.iter().flatten().map(|x| x.to_string()).collect();
                    write!(f, "~{}", m.join(","))?;
                }
                Ok(())
            }
            Shape::Union(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join("+"))
            }
        }
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number '{t}' in shape spec")))
        })
        .collect()
}

fn parse_vec3(s: &str) -> Result<Vec3> {
    let v = parse_numbers(s)?;
    if v.len() != 3 {
        return Err(Error::invalid(format!("expected 3 coordinates, got '{s}'")));
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn parse_part(spec: &str) -> Result<Shape> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("shape '{spec}' lacks a kind prefix")))?;
    let (body, rotation) = match rest.split_once('~') {
        Some((b, r)) => (b, Some(r)),
        None => (rest, None),
    };
    let (params, center) = match body.split_once('@') {
        Some((p, c)) => (p, parse_vec3(c)?),
        None => (body, Vec3::ZERO),
    };
    match kind.trim() {
        "ball" | "sphere" => {
            if rotation.is_some() {
                return Err(Error::invalid("balls take no rotation"));
            }
            let r = parse_numbers(params)?;
            if r.len() != 1 {
                return Err(Error::invalid(format!("ball needs one radius, got '{params}'")));
            }
            Shape::ball(center, r[0])
        }
        "ellipsoid" => {
            let a = parse_numbers(params)?;
            if a.len() != 3 {
                return Err(Error::invalid(format!(
                    "ellipsoid needs three semi-axes, got '{params}'"
                )));
            }
            let rot = match rotation {
                None => Mat3::IDENTITY,
                Some(r) => {
                    let v = parse_numbers(r)?;
                    match v.len() {
                        4 => Mat3::rotation(
                            UnitVec::from_xyz(v[0], v[1], v[2])?,
                            v[3].to_radians(),
                        ),
                        9 => Mat3([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]]),
                        _ => {
                            return Err(Error::invalid(
                                "rotation needs axis+angle (4 numbers) or a matrix (9)",
                            ))
                        }
                    }
                }
            };
            Shape::ellipsoid(center, [a[0], a[1], a[2]], rot)
        }
        other => Err(Error::invalid(format!("unknown shape kind '{other}'"))),
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split('+')
            .map(|p| parse_part(p.trim()))
            .collect::<Result<Vec<_>>>()?;
        Shape::union(parts)
    }
}
