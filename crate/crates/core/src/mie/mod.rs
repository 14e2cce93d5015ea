//! Exact far field of a perfectly conducting ball from the vector spherical
//! wave series.
//!
//! With `x = ka`, the conductor coefficients are `a_n = psi_n'(x) / xi_n'(x)`
//! and `b_n = psi_n(x) / xi_n(x)` (Riccati-Bessel `psi_n = x j_n`,
//! `xi_n = x h_n^(1)`), combined into the amplitude functions `S_1`, `S_2`.
//! In the incidence frame (`e_z = d`, `e_x = p`) the far field is
//!
//! ```text
//! E_inf = (4 pi i / k) [S_2(theta) cos(phi) e_theta - S_1(theta) sin(phi) e_phi]
//! ```
//!
//! which matches `E^s ~ exp(ik|x|) / (4 pi |x|) E_inf`. A ball centered at `c`
//! picks up the phase `exp(ik (d - xhat) . c)`.

pub mod bessel;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CVec3, Shape, UnitVec, Vec3};
use crate::physical_optics::IncidenceConfig;
use bessel::{spherical_jn, spherical_yn};

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieParams {
    pub radius: f64,
    pub center: Vec3,
    pub truncation_tol: f64,
    /// `None` selects `ceil(ka + 8 (ka)^(1/3) + 10)`.
    pub max_order: Option<usize>,
}

impl MieParams {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("Mie radius must be positive, got {radius}")));
        }
        Ok(MieParams {
            radius,
            center,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            max_order: None,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid(format!("truncation tolerance must be positive, got {tol}")));
        }
        self.truncation_tol = tol;
        Ok(self)
    }

    pub fn max_order_for(&self, k: f64) -> usize {
        self.max_order.unwrap_or_else(|| {
            let x = k * self.radius;
            (x + 8.0 * x.cbrt() + 10.0).ceil() as usize
        })
    }
}

/// Scattering coefficients of one ball at one wave number.
#[derive(Debug, Clone)]
pub struct MieCoefficients {
    pub k: f64,
    pub radius: f64,
    /// `a[n - 1]`, `b[n - 1]` for `n = 1..=order`.
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl MieCoefficients {
    /// Coefficients up to the first order `n >= ka` whose term bound
    /// `(2n + 1)(|a_n| + |b_n|)` drops below the tolerance.
    pub fn converged(params: &MieParams, k: f64) -> Result<Self> {
        let max_order = params.max_order_for(k);
        let full = Self::with_order(params.radius, k, max_order);
        let x = k * params.radius;
        let mut tail = f64::INFINITY;
        for n in 1..=max_order {
            tail = term_bound(&full, n);
            if n as f64 >= x && tail < params.truncation_tol {
                return Ok(full.truncated(n));
            }
        }
        Err(Error::Truncation { max_order, tail })
    }

    /// Coefficients for `n = 1..=order` regardless of convergence.
    pub fn with_order(radius: f64, k: f64, order: usize) -> Self {
        let x = k * radius;
        let j = spherical_jn(order, x);
        let y = spherical_yn(order, x);
        let psi = |n: usize| x * j[n];
        let xi = |n: usize| Complex64::new(x * j[n], x * y[n]);
        let mut a = Vec::with_capacity(order);
        let mut b = Vec::with_capacity(order);
        for n in 1..=order {
            let nf = n as f64;
            let dpsi = psi(n - 1) - nf * psi(n) / x;
            let dxi = xi(n - 1) - xi(n) * (nf / x);
            a.push(dpsi / dxi);
            b.push(psi(n) / xi(n));
        }
        MieCoefficients { k, radius, a, b }
    }

    fn truncated(mut self, order: usize) -> Self {
        self.a.truncate(order);
        self.b.truncate(order);
        self
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// `(S_1, S_2)` at `mu = cos(theta)`.
    pub fn amplitudes(&self, mu: f64) -> (Complex64, Complex64) {
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        let (mut pi_prev, mut pi_n) = (0.0f64, 1.0f64);
        for n in 1..=self.order() {
            let nf = n as f64;
            if n > 1 {
                let next = ((2.0 * nf - 1.0) * mu * pi_n - nf * pi_prev) / (nf - 1.0);
                pi_prev = pi_n;
                pi_n = next;
            }
            let tau = nf * mu * pi_n - (nf + 1.0) * pi_prev;
            let w = (2.0 * nf + 1.0) / (nf * (nf + 1.0));
            let (a, b) = (self.a[n - 1], self.b[n - 1]);
            s1 += (a * pi_n + b * tau) * w;
            s2 += (a * tau + b * pi_n) * w;
        }
        (s1, s2)
    }

    /// Far field of the ball centered at the origin.
    pub fn far_field_at_origin(&self, xhat: UnitVec, cfg: &IncidenceConfig) -> CVec3 {
        let ez = *cfg.d;
        let ex = *cfg.p;
        let ey = ez.cross(ex);
        let (lx, ly, lz) = (xhat.dot(ex), xhat.dot(ey), xhat.dot(ez));
        let rho = lx.hypot(ly);
        let mu = lz.clamp(-1.0, 1.0);
        // Along the axis the field is continuous in the phi = 0 limit.
        let (cos_phi, sin_phi) = if rho < 1e-14 { (1.0, 0.0) } else { (lx / rho, ly / rho) };
        let e_theta = ex * (mu * cos_phi) + ey * (mu * sin_phi) - ez * rho;
        let e_phi = ey * cos_phi - ex * sin_phi;
        let (s1, s2) = self.amplitudes(mu);
        let pref = Complex64::new(0.0, 4.0 * PI / self.k);
        CVec3::from_real(e_theta, pref * s2 * cos_phi) - CVec3::from_real(e_phi, pref * s1 * sin_phi)
    }

    /// Far field of the ball centered at `center`. `cfg.k` must match `self.k`.
    pub fn far_field(&self, center: Vec3, xhat: UnitVec, cfg: &IncidenceConfig) -> CVec3 {
        debug_assert!(cfg.k == self.k);
        self.far_field_at_origin(xhat, cfg)
            .scale(translation_phase(center, xhat, cfg))
    }
}

fn term_bound(c: &MieCoefficients, n: usize) -> f64 {
    (2 * n + 1) as f64 * (c.a[n - 1].norm() + c.b[n - 1].norm())
}

fn translation_phase(center: Vec3, xhat: UnitVec, cfg: &IncidenceConfig) -> Complex64 {
    Complex64::cis(cfg.k * (*cfg.d - *xhat).dot(center))
}

/// Exact PEC-ball far field with the series truncated adaptively.
pub fn mie_far_field(params: &MieParams, xhat: UnitVec, cfg: &IncidenceConfig) -> Result<CVec3> {
    Ok(MieCoefficients::converged(params, cfg.k)?.far_field(params.center, xhat, cfg))
}

/// Far field with the series cut at a fixed `order`.
pub fn mie_far_field_with_order(
    params: &MieParams,
    order: usize,
    xhat: UnitVec,
    cfg: &IncidenceConfig,
) -> CVec3 {
    MieCoefficients::with_order(params.radius, cfg.k, order).far_field(params.center, xhat, cfg)
}

/// Far field of a union of balls by superposing single-ball fields. There is
/// no multiple-scattering coupling between the parts.
pub fn superposed_far_field(shape: &Shape, xhat: UnitVec, cfg: &IncidenceConfig) -> Result<CVec3> {
    let balls = shape
        .balls()
        .ok_or_else(|| Error::UnsupportedShape(format!("Mie series needs balls, got {shape}")))?;
    let mut total = CVec3::ZERO;
    for (center, radius) in balls {
        total += mie_far_field(&MieParams::new(center, radius)?, xhat, cfg)?;
    }
    Ok(total)
}
