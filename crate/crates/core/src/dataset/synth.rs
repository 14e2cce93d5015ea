use std::collections::HashMap;

use rayon::prelude::*;

use super::{Band, DataSet, DirectionSet, FarFieldRecord, Method, Polarization, Provenance};
use crate::error::{Error, Result};
use crate::geometry::{mesh_shape, CVec3, Shape, Vec3};
use crate::mie::{MieCoefficients, MieParams};
use crate::physical_optics::{u_infty_analytic, IncidenceConfig, PoSurface, PANELS_PER_WAVELENGTH};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub polarization: Polarization,
    /// PO mesh edge bound; `None` uses `lambda_min / 8`.
    pub po_max_edge: Option<f64>,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            polarization: Polarization::Default,
            po_max_edge: None,
        }
    }
}

/// Backscatter data (`xhat = -d`) for every direction and every node of the
/// band, with the default polarization rule.
pub fn synthesize(shape: &Shape, dirs: &DirectionSet, band: Band, method: Method) -> Result<DataSet> {
    synthesize_with(shape, dirs, band, method, &SynthesisOptions::default())
}

pub fn synthesize_with(
    shape: &Shape,
    dirs: &DirectionSet,
    band: Band,
    method: Method,
    opts: &SynthesisOptions,
) -> Result<DataSet> {
    if !(band.k_min < band.k_max) {
        return Err(Error::invalid(format!(
            "synthesis needs k_min < k_max, got [{}, {}]",
            band.k_min, band.k_max
        )));
    }
    let balls = shape.balls();
    if method == Method::Mie && balls.is_none() {
        return Err(Error::UnsupportedShape(format!(
            "the Mie series needs every part to be a ball, got {shape}"
        )));
    }

    let mut provenance = Provenance::new(method, shape.to_string());
    provenance.polarization = opts.polarization.to_string();
    let ks = band.nodes();
    let configs: Vec<IncidenceConfig> = dirs
        .directions
        .iter()
        .flat_map(|&d| {
            let p = opts.polarization.for_direction(d);
            ks.iter().map(move |&k| IncidenceConfig { d, p, k })
        })
        .collect();

    let fields: Vec<CVec3> = match method {
        Method::Analytic => configs
            .par_iter()
            .map(|c| u_infty_analytic(shape, -c.d, c).scale(0.5.into()))
            .collect(),
        Method::Po => {
            let max_edge = opts
                .po_max_edge
                .unwrap_or(band.wavelength_min() / PANELS_PER_WAVELENGTH);
            let surface = PoSurface::new(&mesh_shape(shape, max_edge)?);
            surface.check_refinement(band.k_max)?;
            provenance.mesh_max_edge = Some(surface.max_edge());
            let lit: Vec<Vec<usize>> = dirs.directions.par_iter().map(|&d| surface.lit_set(d)).collect();
            configs
                .par_iter()
                .enumerate()
                .map(|(i, c)| surface.far_field_on(&lit[i / ks.len()], -c.d, c))
                .collect()
        }
        Method::Mie => {
            let balls = balls.unwrap_or_default();
            provenance.uncoupled_superposition = balls.len() > 1;
            let tables = mie_tables(&balls, &ks)?;
            configs
                .par_iter()
                .enumerate()
                .map(|(i, c)| {
                    let j = i % ks.len();
                    balls.iter().fold(CVec3::ZERO, |acc, &(center, radius)| {
                        acc + tables[&(radius.to_bits(), j)].far_field(center, -c.d, c)
                    })
                })
                .collect()
        }
    };

    let records = configs
        .iter()
        .zip(fields)
        .map(|(c, e)| FarFieldRecord::new(c.k, c.d, -c.d, c.p, e))
        .collect::<Result<Vec<_>>>()?;
    DataSet::new(records, band, provenance)
}

/// Converged coefficients per distinct radius and wave-number node.
fn mie_tables(
    balls: &[(Vec3, f64)],
    ks: &[f64],
) -> Result<HashMap<(u64, usize), MieCoefficients>> {
    let mut radii: Vec<f64> = balls.iter().map(|b| b.1).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let jobs: Vec<(f64, usize)> = radii
        .iter()
        .flat_map(|&r| (0..ks.len()).map(move |j| (r, j)))
        .collect();
    jobs.par_iter()
        .map(|&(r, j)| {
            let params = MieParams::new(Vec3::ZERO, r)?;
            Ok(((r.to_bits(), j), MieCoefficients::converged(&params, ks[j])?))
        })
        .collect()
}
