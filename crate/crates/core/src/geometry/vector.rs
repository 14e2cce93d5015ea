//! Real and complex 3-vectors, unit directions and 3x3 matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Deref, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|v| - 1` accepted for unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Component `i` (0, 1 or 2).
    pub fn get(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec(Vec3);

impl UnitVec {
    pub const E1: UnitVec = UnitVec(Vec3::new(1.0, 0.0, 0.0));
    pub const E2: UnitVec = UnitVec(Vec3::new(0.0, 1.0, 0.0));
    pub const E3: UnitVec = UnitVec(Vec3::new(0.0, 0.0, 1.0));

    /// Accepts `v` only if it already has unit length.
    pub fn new(v: Vec3) -> Result<Self> {
        if !v.is_finite() || (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!("{v} is not a unit vector")));
        }
        Ok(UnitVec(v))
    }

    /// Normalizes `v`; fails for zero or non-finite input.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid(format!("cannot normalize {v}")));
        }
        Ok(UnitVec(v / n))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::normalize(Vec3::new(x, y, z))
    }

    /// Wraps without checking; callers guarantee unit length.
    pub(crate) fn new_unchecked(v: Vec3) -> Self {
        UnitVec(v)
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    /// Whether `self` and `other` coincide to within `tol` per component.
    pub fn approx_eq(self, other: UnitVec, tol: f64) -> bool {
        let d = self.0 - other.0;
        d.x.abs() <= tol && d.y.abs() <= tol && d.z.abs() <= tol
    }
}

impl Neg for UnitVec {
    type Output = UnitVec;
    fn neg(self) -> UnitVec {
        UnitVec(-self.0)
    }
}

impl Deref for UnitVec {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

impl fmt::Display for UnitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Self {
        Mat3([r0.to_array(), r1.to_array(), r2.to_array()])
    }

    /// Rotation by `angle` radians about `axis` (right-handed).
    pub fn rotation(axis: UnitVec, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let (x, y, z) = (axis.x, axis.y, axis.z);
        Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3::from_rows(self.col(0), self.col(1), self.col(2))
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn mul_mat(&self, o: &Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.row(i).dot(o.col(j));
            }
        }
        Mat3(m)
    }

    pub fn det(&self) -> f64 {
        self.row(0).dot(self.row(1).cross(self.row(2)))
    }

    /// Largest entry of `|M^T M - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.transpose().mul_mat(self);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.0[i][j] - target).abs());
            }
        }
        worst
    }

    /// Solves `M x = b` by Cramer's rule; `None` when singular.
    pub fn solve(&self, b: Vec3) -> Option<Vec3> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let (c0, c1, c2) = (self.col(0), self.col(1), self.col(2));
        Some(Vec3::new(
            b.dot(c1.cross(c2)) / det,
            c0.dot(b.cross(c2)) / det,
            c0.dot(c1.cross(b)) / det,
        ))
    }
}

/// A complex 3-vector (field amplitudes).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec3(pub [Complex64; 3]);

impl CVec3 {
    pub const ZERO: CVec3 = CVec3([Complex64::new(0.0, 0.0); 3]);

    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        CVec3([x, y, z])
    }

    /// `v * s` for a real vector and complex scalar.
    pub fn from_real(v: Vec3, s: Complex64) -> Self {
        CVec3([s * v.x, s * v.y, s * v.z])
    }

    pub fn re(&self) -> Vec3 {
        Vec3::new(self.0[0].re, self.0[1].re, self.0[2].re)
    }

    pub fn im(&self) -> Vec3 {
        Vec3::new(self.0[0].im, self.0[1].im, self.0[2].im)
    }

    pub fn from_parts(re: Vec3, im: Vec3) -> Self {
        CVec3([
            Complex64::new(re.x, im.x),
            Complex64::new(re.y, im.y),
            Complex64::new(re.z, im.z),
        ])
    }

    pub fn conj(&self) -> CVec3 {
        CVec3(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, s: Complex64) -> CVec3 {
        CVec3(self.0.map(|c| c * s))
    }

    /// Bilinear product with a real vector (no conjugation).
    pub fn dot_real(&self, v: Vec3) -> Complex64 {
        self.0[0] * v.x + self.0[1] * v.y + self.0[2] * v.z
    }

    /// `self x v` for a real vector `v`.
    pub fn cross_real(&self, v: Vec3) -> CVec3 {
        let [a, b, c] = self.0;
        CVec3([b * v.z - c * v.y, c * v.x - a * v.z, a * v.y - b * v.x])
    }

    /// Euclidean norm over the three complex components.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, o: CVec3) -> CVec3 {
        CVec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for CVec3 {
    fn add_assign(&mut self, o: CVec3) {
        *self = *self + o;
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, o: CVec3) -> CVec3 {
        CVec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3(self.0.map(|c| -c))
    }
}
