use std::f64::consts::PI;

use backscatter::geometry::{UnitVec, Vec3};
use backscatter::mie::{mie_far_field, MieParams};
use backscatter::physical_optics::IncidenceConfig;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for m in 2..=n {
                    let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let rule = gauss_legendre(10);
    let s: f64 = rule.iter().map(|(x, w)| w * x.powi(18)).sum();
    assert!((s - 2.0 / 19.0).abs() < 1e-14);
}

#[test]
fn extinction_equals_scattering() {
    let d = UnitVec::from_xyz(0.2, 0.4, -0.6).unwrap();
    let p = UnitVec::normalize(d.cross(Vec3::new(1.0, 0.0, 0.0))).unwrap();
    for (radius, k) in [(1.0, 0.5), (0.8, 4.0), (1.0, 10.0)] {
        let params = MieParams::new(Vec3::new(0.3, -0.2, 0.1), radius).unwrap();
        let cfg = IncidenceConfig::new(d, p, k).unwrap();
        let forward = mie_far_field(&params, d, &cfg).unwrap();
        let extinction = forward.dot_real(*p).im / k;

        let n_mu = 80;
        let n_phi = 160;
        let mut scattering = 0.0;
        for (mu, w) in gauss_legendre(n_mu) {
            let s = (1.0 - mu * mu).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let xhat = UnitVec::from_xyz(s * phi.cos(), s * phi.sin(), mu).unwrap();
                let e = mie_far_field(&params, xhat, &cfg).unwrap();
                scattering += w * (2.0 * PI / n_phi as f64) * e.norm().powi(2);
            }
        }
        scattering /= 16.0 * PI * PI;
        let rel = (extinction - scattering).abs() / extinction;
        assert!(rel < 1e-6, "ka = {}: ext {extinction}, sca {scattering}", radius * k);
    }
}
