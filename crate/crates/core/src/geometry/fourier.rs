//! Closed-form Fourier transforms of obstacle characteristic functions,
//! `chi_hat(xi) = \int_D exp(i xi . y) dy`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::shape::Shape;
use super::vector::Vec3;

/// Below this argument the ball profile switches to its Taylor series.
const SERIES_CUTOFF: f64 = 1e-3;

/// Transform of the unit ball as a function of `rho = |xi|`:
/// `4 pi (sin rho - rho cos rho) / rho^3`.
pub fn unit_ball_profile(rho: f64) -> f64 {
    let rho = rho.abs();
    if rho < SERIES_CUTOFF {
        let r2 = rho * rho;
        // sum_{n>=1} (-1)^{n+1} 2n/(2n+1)! rho^{2n-2}
        let series = 1.0 / 3.0
            + r2 * (-1.0 / 30.0
                + r2 * (1.0 / 840.0
                    + r2 * (-1.0 / 45_360.0 + r2 * (1.0 / 3_991_680.0 - r2 / 518_918_400.0))));
        4.0 * PI * series
    } else {
        4.0 * PI * (rho.sin() - rho * rho.cos()) / (rho * rho * rho)
    }
}

/// `\int_D exp(i xi . y) dy` for any supported shape.
pub fn fourier_characteristic(shape: &Shape, xi: Vec3) -> Complex64 {
    match shape {
        Shape::Ball { center, radius } => {
            let phase = Complex64::cis(xi.dot(*center));
            phase * radius.powi(3) * unit_ball_profile(xi.norm() * radius)
        }
        Shape::Ellipsoid {
            center,
            semi_axes,
            rotation,
        } => {
            // y = c + R diag(a) x maps the unit ball onto the ellipsoid.
            let local = rotation.transpose().mul_vec(xi);
            let stretched = Vec3::new(
                semi_axes[0] * local.x,
                semi_axes[1] * local.y,
                semi_axes[2] * local.z,
            );
            let jac = semi_axes[0] * semi_axes[1] * semi_axes[2];
            Complex64::cis(xi.dot(*center)) * jac * unit_ball_profile(stretched.norm())
        }
        Shape::Union(parts) => parts.iter().map(|p| fourier_characteristic(p, xi)).sum(),
    }
}
