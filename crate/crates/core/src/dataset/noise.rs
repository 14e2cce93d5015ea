use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{DataSet, NoiseInfo};
use crate::error::{Error, Result};
use crate::geometry::CVec3;

/// Distribution of the perturbation inside the radius `level * M(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Uniform in the 6-dimensional ball.
    #[default]
    Ball,
    /// Uniform on its boundary sphere.
    Sphere,
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseMode::Ball => "ball",
            NoiseMode::Sphere => "sphere",
        })
    }
}

impl FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(NoiseMode::Ball),
            "sphere" => Ok(NoiseMode::Sphere),
            _ => Err(Error::invalid(format!("unknown noise mode '{s}' (expected ball or sphere)"))),
        }
    }
}

/// Adds uniform noise from the 6-dimensional ball of radius `level * M(d)`,
/// where `M(d)` is the largest `|e_inf|` over the band for that direction.
pub fn add_noise(ds: &DataSet, level: f64, seed: u64) -> Result<DataSet> {
    add_noise_with_mode(ds, level, seed, NoiseMode::Ball)
}

/// Record `i` draws from its own ChaCha stream `i` under `seed`, so the
/// result does not depend on thread scheduling.
pub fn add_noise_with_mode(ds: &DataSet, level: f64, seed: u64, mode: NoiseMode) -> Result<DataSet> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::invalid(format!("noise level must be nonnegative, got {level}")));
    }
    if ds.provenance().noise.is_some() {
        return Err(Error::invalid("dataset already carries noise"));
    }
    let n_k = ds.band().n_k;
    let amplitude: Vec<f64> = (0..ds.groups().len())
        .map(|g| {
            ds.group_records(g)
                .iter()
                .map(|r| r.e_inf.norm())
                .fold(0.0, f64::max)
        })
        .collect();

    let fields = ds
        .records()
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let radius = level * amplitude[i / n_k];
            if radius == 0.0 {
                return r.e_inf;
            }
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            r.e_inf + sample(&mut rng, radius, mode)
        })
        .collect();

    let mut provenance = ds.provenance().clone();
    provenance.noise = Some(NoiseInfo { level, mode, seed });
    Ok(ds.with_fields(fields, provenance))
}

fn sample<R: Rng>(rng: &mut R, radius: f64, mode: NoiseMode) -> CVec3 {
    let g: [f64; 6] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = match mode {
        NoiseMode::Ball => radius * rng.random::<f64>().powf(1.0 / 6.0),
        NoiseMode::Sphere => radius,
    };
    let s = r / norm;
    CVec3::new(
        Complex64::new(g[0] * s, g[1] * s),
        Complex64::new(g[2] * s, g[3] * s),
        Complex64::new(g[4] * s, g[5] * s),
    )
}
