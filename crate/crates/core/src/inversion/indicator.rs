//! The direct sampling indicator
//!
//! ```text
//! I_d(z) = | \int_K p . U_inf(xhat, d, p, k) / (4k^2) exp(-ik (d - xhat) . z) dk |^2
//! ```
//!
//! and its direction-weighted sums `I^p(z) = sum_d I_d(z) / max|I_d|^p`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{FrequencyQuadrature, SamplingGrid};
use crate::dataset::{Band, DataSet, MATCH_TOL};
use crate::error::{Error, Result};
use crate::geometry::{UnitVec, Vec3};
use crate::physical_optics::u_infty_combine;

/// Indicator samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    /// Incident directions that contributed.
    pub directions: Vec<UnitVec>,
    /// Weighting power for aggregated fields.
    pub power: Option<f64>,
    pub band: Band,
}

impl IndicatorField {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

/// Per-direction integrand: `w_j s(k_j)` and `phi = d - xhat`.
struct Kernel {
    phi: Vec3,
    amplitudes: Vec<Complex64>,
    ks: Vec<f64>,
}

impl Kernel {
    fn new(ds: &DataSet, g: usize, quad: &FrequencyQuadrature) -> Result<Self> {
        let group = ds.groups()[g];
        let fwd = ds.group_records(g);
        let bwd = ds.group_records(group.partner);
        let amplitudes = fwd
            .iter()
            .zip(bwd)
            .zip(&quad.weights)
            .map(|((a, b), w)| {
                if (a.k - b.k).abs() > MATCH_TOL * a.k {
                    return Err(Error::Grid(format!(
                        "wave numbers {} and {} differ across the pair for {}",
                        a.k, b.k, group.d
                    )));
                }
                let u = u_infty_combine(a.e_inf, b.e_inf);
                Ok(u.dot_real(*group.p) * (w / (4.0 * a.k * a.k)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Kernel {
            phi: *group.d - *group.xhat,
            amplitudes,
            ks: fwd.iter().map(|r| r.k).collect(),
        })
    }

    fn eval(&self, z: Vec3) -> f64 {
        let t = self.phi.dot(z);
        self.amplitudes
            .iter()
            .zip(&self.ks)
            .map(|(a, k)| a * Complex64::cis(-k * t))
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// `I_d` on `grid` for the pair containing incident direction `d`.
pub fn indicator_single(ds: &DataSet, d: UnitVec, grid: &SamplingGrid) -> Result<IndicatorField> {
    Ok(indicator_fields(ds, &[d], grid)?.remove(0))
}

/// `I_d` for several directions in one pass over the grid.
pub fn indicator_fields(ds: &DataSet, dirs: &[UnitVec], grid: &SamplingGrid) -> Result<Vec<IndicatorField>> {
    let quad = FrequencyQuadrature::trapezoid(ds.band());
    let kernels = dirs
        .iter()
        .map(|&d| Kernel::new(ds, ds.find_group(d)?, &quad))
        .collect::<Result<Vec<_>>>()?;
    let points = grid.points();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&z| kernels.iter().map(|k| k.eval(z)).collect())
        .collect();
    Ok(dirs
        .iter()
        .enumerate()
        .map(|(i, &d)| IndicatorField {
            grid: grid.clone(),
            values: rows.iter().map(|r| r[i]).collect(),
            directions: vec![d],
            power: None,
            band: ds.band(),
        })
        .collect())
}

pub const SUPPORTED_POWERS: [f64; 3] = [0.0, 0.5, 1.0];

pub fn check_power(power: f64) -> Result<()> {
    if !SUPPORTED_POWERS.contains(&power) {
        return Err(Error::invalid(format!("indicator power must be 0, 0.5 or 1, got {power}")));
    }
    Ok(())
}

/// `sum_d I_d / max|I_d|^power`, summed in the order given.
pub fn indicator_aggregate(fields: &[IndicatorField], power: f64) -> Result<IndicatorField> {
    check_power(power)?;
    let first = fields
        .first()
        .ok_or_else(|| Error::invalid("no indicator fields to aggregate"))?;
    let mut values = vec![0.0; first.values.len()];
    let mut directions = Vec::new();
    for f in fields {
        if f.grid != first.grid || f.values.len() != values.len() {
            return Err(Error::Grid(format!(
                "cannot aggregate fields on {} and {}",
                first.grid, f.grid
            )));
        }
        let max = f.max();
        if power > 0.0 && max == 0.0 {
            let names: Vec<String> = f.directions.iter().map(|d| d.to_string()).collect();
            return Err(Error::DegenerateField {
                direction: names.join(", "),
            });
        }
        let scale = if power == 0.0 { 1.0 } else { max.powf(-power) };
        for (acc, v) in values.iter_mut().zip(&f.values) {
            *acc += v * scale;
        }
        directions.extend_from_slice(&f.directions);
    }
    Ok(IndicatorField {
        grid: first.grid.clone(),
        values,
        directions,
        power: Some(power),
        band: first.band,
    })
}

/// `I^power` over every incident direction of the dataset.
pub fn indicator(ds: &DataSet, grid: &SamplingGrid, power: f64) -> Result<IndicatorField> {
    check_power(power)?;
    if ds.is_empty() {
        return Err(Error::invalid("dataset has no records"));
    }
    indicator_aggregate(&indicator_fields(ds, &ds.directions(), grid)?, power)
}

/// Replaces every `e_inf` by `(e . e_inf) p`, keeping only the scalar
/// projection onto `e`.
pub fn scalar_projection_mode(ds: &DataSet, e: UnitVec) -> Result<DataSet> {
    for g in ds.groups() {
        let dot = e.dot(*g.p);
        if dot.abs() <= 1e-6 {
            return Err(Error::Conditioning { dot: dot.abs() });
        }
    }
    let n_k = ds.band().n_k;
    let fields = ds
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let p = ds.groups()[i / n_k].p;
            crate::geometry::CVec3::from_real(*p, r.e_inf.dot_real(*e))
        })
        .collect();
    let mut provenance = ds.provenance().clone();
    provenance.scalar_projection = Some(e);
    Ok(ds.with_fields(fields, provenance))
}
