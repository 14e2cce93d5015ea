//! Sampling grids and the frequency quadrature.

use std::fmt;
use std::str::FromStr;

use crate::dataset::Band;
use crate::error::{Error, Result};
use crate::geometry::{UnitVec, Vec3};

/// Composite trapezoid rule on the uniform band nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FrequencyQuadrature {
    pub fn trapezoid(band: Band) -> Self {
        let h = band.step();
        let n = band.n_k;
        let weights = (0..n)
            .map(|j| if j == 0 || j + 1 == n { h / 2.0 } else { h })
            .collect();
        FrequencyQuadrature {
            nodes: band.nodes(),
            weights,
        }
    }
}

/// Points at which an indicator is sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingGrid {
    /// The plane `x_axis = value`. `u` and `v` run over the two remaining
    /// axes in increasing order; `u` varies fastest.
    Plane {
        axis: usize,
        value: f64,
        u_range: (f64, f64),
        v_range: (f64, f64),
        resolution: (usize, usize),
    },
    /// `origin + t direction` for `t` in `range`.
    Line {
        origin: Vec3,
        direction: UnitVec,
        range: (f64, f64),
        resolution: usize,
    },
    /// Axis-aligned box, `x` fastest.
    Box {
        lo: Vec3,
        hi: Vec3,
        resolution: [usize; 3],
    },
}

fn check_range(name: &str, (a, b): (f64, f64)) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!("{name} extent [{a}, {b}] is empty")));
    }
    Ok(())
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("grid resolution must be at least 2, got {n}")));
    }
    Ok(())
}

fn lin(range: (f64, f64), n: usize, i: usize) -> f64 {
    if i + 1 == n {
        range.1
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

impl SamplingGrid {
    pub fn plane(axis: usize, value: f64, u_range: (f64, f64), v_range: (f64, f64), resolution: (usize, usize)) -> Result<Self> {
        if axis > 2 {
            return Err(Error::invalid(format!("plane axis must be 0, 1 or 2, got {axis}")));
        }
        if !value.is_finite() {
            return Err(Error::invalid("plane offset must be finite"));
        }
        check_range("u", u_range)?;
        check_range("v", v_range)?;
        check_resolution(resolution.0)?;
        check_resolution(resolution.1)?;
        Ok(SamplingGrid::Plane {
            axis,
            value,
            u_range,
            v_range,
            resolution,
        })
    }

    pub fn line(origin: Vec3, direction: UnitVec, range: (f64, f64), resolution: usize) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::invalid("line origin must be finite"));
        }
        check_range("line", range)?;
        check_resolution(resolution)?;
        Ok(SamplingGrid::Line {
            origin,
            direction,
            range,
            resolution,
        })
    }

    pub fn cuboid(lo: Vec3, hi: Vec3, resolution: [usize; 3]) -> Result<Self> {
        for i in 0..3 {
            check_range("box", (lo.get(i), hi.get(i)))?;
            check_resolution(resolution[i])?;
        }
        Ok(SamplingGrid::Box { lo, hi, resolution })
    }

    /// The two in-plane axes of `x_axis = const`.
    pub fn plane_axes(axis: usize) -> (usize, usize) {
        match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    /// Sample counts per grid dimension.
    pub fn dims(&self) -> Vec<usize> {
        match self {
            SamplingGrid::Plane { resolution, .. } => vec![resolution.0, resolution.1],
            SamplingGrid::Line { resolution, .. } => vec![*resolution],
            SamplingGrid::Box { resolution, .. } => resolution.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Vec3 {
        match self {
            SamplingGrid::Plane {
                axis,
                value,
                u_range,
                v_range,
                resolution,
            } => {
                let (iu, iv) = (index % resolution.0, index / resolution.0);
                let (a, b) = Self::plane_axes(*axis);
                let mut c = [0.0; 3];
                c[*axis] = *value;
                c[a] = lin(*u_range, resolution.0, iu);
                c[b] = lin(*v_range, resolution.1, iv);
                Vec3::from_array(c)
            }
            SamplingGrid::Line {
                origin,
                direction,
                range,
                resolution,
            } => *origin + **direction * lin(*range, *resolution, index),
            SamplingGrid::Box { lo, hi, resolution } => {
                let idx = [
                    index % resolution[0],
                    (index / resolution[0]) % resolution[1],
                    index / (resolution[0] * resolution[1]),
                ];
                Vec3::from_array(std::array::from_fn(|i| {
                    lin((lo.get(i), hi.get(i)), resolution[i], idx[i])
                }))
            }
        }
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Line parameters `t`; `None` for other grids.
    pub fn line_parameters(&self) -> Option<Vec<f64>> {
        match self {
            SamplingGrid::Line { range, resolution, .. } => {
                Some((0..*resolution).map(|i| lin(*range, *resolution, i)).collect())
            }
            _ => None,
        }
    }
}

fn axis_name(axis: usize) -> String {
    format!("x{}", axis + 1)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SamplingGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingGrid::Plane {
                axis,
                value,
                u_range,
                v_range,
                resolution,
            } => write!(
                f,
                "plane:{}={}:{}:{},{}",
                axis_name(*axis),
                value,
                join(&[u_range.0, u_range.1, v_range.0, v_range.1]),
                resolution.0,
                resolution.1
            ),
            SamplingGrid::Line {
                origin,
                direction,
                range,
                resolution,
            } => write!(
                f,
                "line:{}:{}:{}:{}",
                join(&origin.to_array()),
                join(&direction.to_array()),
                join(&[range.0, range.1]),
                resolution
            ),
            SamplingGrid::Box { lo, hi, resolution } => write!(
                f,
                "box:{}:{}:{},{},{}",
                join(&lo.to_array()),
                join(&hi.to_array()),
                resolution[0],
                resolution[1],
                resolution[2]
            ),
        }
    }
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number '{t}' in grid spec")))
        })
        .collect()
}

fn counts(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad resolution '{t}' in grid spec")))
        })
        .collect()
}

fn parse_axis(s: &str) -> Result<usize> {
    match s {
        "x1" | "x" => Ok(0),
        "x2" | "y" => Ok(1),
        "x3" | "z" => Ok(2),
        _ => Err(Error::invalid(format!("unknown axis '{s}' (expected x1, x2 or x3)"))),
    }
}

fn parse_vec3(s: &str) -> Result<Vec3> {
    match numbers(s)?.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(Error::invalid(format!("expected three comma-separated numbers, got '{s}'"))),
    }
}

/// Unit vectors are kept bit-exact; anything else is normalized.
pub(crate) fn parse_direction(s: &str) -> Result<UnitVec> {
    let v = parse_vec3(s)?;
    UnitVec::new(v).or_else(|_| UnitVec::normalize(v))
}

/// Parses
/// `plane:<axis>=<value>:<a,b[,c,d]>:<n[,m]>`,
/// `line:<x,y,z>:<dx,dy,dz>:<a,b>:<n>` or
/// `box:<x,y,z>:<x,y,z>:<n[,m,l]>`.
impl FromStr for SamplingGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid(format!("bad grid spec '{s}'"));
        match parts.as_slice() {
            ["plane", eq, extent, res] => {
                let (axis, value) = eq.split_once('=').ok_or_else(bad)?;
                let value = numbers(value)?.first().copied().ok_or_else(bad)?;
                let ext = numbers(extent)?;
                let (u, v) = match ext.as_slice() {
                    [a, b] => ((*a, *b), (*a, *b)),
                    [a, b, c, d] => ((*a, *b), (*c, *d)),
                    _ => return Err(bad()),
                };
                let res = match counts(res)?.as_slice() {
                    [n] => (*n, *n),
                    [n, m] => (*n, *m),
                    _ => return Err(bad()),
                };
                SamplingGrid::plane(parse_axis(axis)?, value, u, v, res)
            }
            ["line", origin, dir, extent, res] => {
                let ext = numbers(extent)?;
                let [a, b] = ext.as_slice() else { return Err(bad()) };
                let n = match counts(res)?.as_slice() {
                    [n] => *n,
                    _ => return Err(bad()),
                };
                SamplingGrid::line(parse_vec3(origin)?, parse_direction(dir)?, (*a, *b), n)
            }
            ["box", lo, hi, res] => {
                let res = match counts(res)?.as_slice() {
                    [n] => [*n; 3],
                    [a, b, c] => [*a, *b, *c],
                    _ => return Err(bad()),
                };
                SamplingGrid::cuboid(parse_vec3(lo)?, parse_vec3(hi)?, res)
            }
            _ => Err(bad()),
        }
    }
}
