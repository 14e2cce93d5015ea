//! Direct sampling inversion: indicators, strips and boxes.

mod export;
mod grid;
mod indicator;
mod strip;

pub use export::{read_field_csv, write_field_csv};
pub use grid::{FrequencyQuadrature, SamplingGrid};
pub use indicator::{
    check_power, indicator, indicator_aggregate, indicator_fields, indicator_single, scalar_projection_mode,
    IndicatorField, SUPPORTED_POWERS,
};
pub use strip::{box_estimate, decay_profile, strip_estimate, BoxEstimate, DECAY_WINDOW, DEFAULT_THRESHOLD};

use crate::dataset::DataSet;
use crate::error::{Error, Result};
use crate::geometry::{UnitVec, Vec3};

/// Strip normal `(d - xhat) / |d - xhat|` for the group with incident
/// direction `d`.
pub fn strip_normal(ds: &DataSet, d: UnitVec) -> Result<UnitVec> {
    let g = ds.groups()[ds.find_group(d)?];
    UnitVec::normalize(*g.d - *g.xhat)
        .map_err(|_| Error::invalid(format!("forward data (xhat = d) at {d} defines no strip")))
}

/// Profile of `I_d` along its strip normal through `origin`.
pub fn profile_line(
    ds: &DataSet,
    d: UnitVec,
    origin: Vec3,
    range: (f64, f64),
    resolution: usize,
) -> Result<IndicatorField> {
    let grid = SamplingGrid::line(origin, strip_normal(ds, d)?, range, resolution)?;
    indicator_single(ds, d, &grid)
}
