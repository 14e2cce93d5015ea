//! Far-field datasets: records, paired-direction bookkeeping, direction sets,
//! polarization rules, synthesis, noise and the text interchange format.

pub mod directions;
mod io;
mod noise;
mod synth;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{CVec3, UnitVec};
use crate::physical_optics::ORTHOGONALITY_TOL;

pub use directions::{
    canonical_direction, default_polarization, directions_circle, directions_sphere,
    CoordinatePlane, DirectionSet, Polarization,
};
pub use io::{read_dataset, read_dataset_from, write_dataset, write_dataset_to, SCHEMA_VERSION};
pub use noise::{add_noise, add_noise_with_mode, NoiseMode};
pub use synth::{synthesize, synthesize_with, SynthesisOptions};

/// Tolerance used to match opposite directions and grid nodes.
pub const MATCH_TOL: f64 = 1e-12;

/// One far-field sample `E_inf(xhat, d, p, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldRecord {
    pub k: f64,
    pub d: UnitVec,
    pub xhat: UnitVec,
    pub p: UnitVec,
    pub e_inf: CVec3,
}

impl FarFieldRecord {
    pub fn new(k: f64, d: UnitVec, xhat: UnitVec, p: UnitVec, e_inf: CVec3) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("wave number must be positive, got {k}")));
        }
        if d.dot(*p).abs() >= ORTHOGONALITY_TOL {
            return Err(Error::invalid(format!("polarization {p} not orthogonal to {d}")));
        }
        if !e_inf.is_finite() {
            return Err(Error::invalid(format!("non-finite far field at k = {k}, d = {d}")));
        }
        Ok(FarFieldRecord { k, d, xhat, p, e_inf })
    }
}

/// Uniform wave-number grid with `n_k` nodes spanning `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
}

impl Band {
    /// `k_min == k_max` is accepted as a degenerate band.
    pub fn new(k_min: f64, k_max: f64, n_k: usize) -> Result<Self> {
        if !(k_min > 0.0 && k_min.is_finite() && k_max.is_finite()) {
            return Err(Error::invalid(format!("band limits must be positive, got [{k_min}, {k_max}]")));
        }
        if k_min > k_max {
            return Err(Error::invalid(format!("k_min {k_min} exceeds k_max {k_max}")));
        }
        if n_k < 2 {
            return Err(Error::invalid(format!("band needs at least 2 nodes, got {n_k}")));
        }
        Ok(Band { k_min, k_max, n_k })
    }

    pub fn step(&self) -> f64 {
        (self.k_max - self.k_min) / (self.n_k - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_k)
            .map(|j| if j + 1 == self.n_k { self.k_max } else { self.k_min + h * j as f64 })
            .collect()
    }

    pub fn wavelength_min(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Po,
    Analytic,
    Mie,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Po => "po",
            Method::Analytic => "analytic",
            Method::Mie => "mie",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "po" => Ok(Method::Po),
            "analytic" => Ok(Method::Analytic),
            "mie" => Ok(Method::Mie),
            _ => Err(Error::invalid(format!("unknown method '{s}' (expected po, analytic or mie)"))),
        }
    }
}

/// Noise applied to a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseInfo {
    pub level: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

/// Where the data came from and what was done to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub method: Method,
    pub shape: String,
    pub polarization: String,
    pub noise: Option<NoiseInfo>,
    /// Several balls superposed without multiple-scattering coupling.
    pub uncoupled_superposition: bool,
    pub mesh_max_edge: Option<f64>,
    /// Set when every field was replaced by its projection onto this vector.
    pub scalar_projection: Option<UnitVec>,
}

impl Provenance {
    pub fn new(method: Method, shape: impl Into<String>) -> Self {
        Provenance {
            method,
            shape: shape.into(),
            polarization: "default".into(),
            noise: None,
            uncoupled_superposition: false,
            mesh_max_edge: None,
            scalar_projection: None,
        }
    }
}

/// Records sharing one `(d, xhat, p)` over the full wave-number grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionGroup {
    pub d: UnitVec,
    pub xhat: UnitVec,
    pub p: UnitVec,
    /// Index of the first record; the group holds `band.n_k` consecutive records.
    pub start: usize,
    /// Index of the group for `(-d, -xhat)`.
    pub partner: usize,
}

/// Validated far-field data. Records are stored group by group with
/// ascending `k`, and every group has a partner with opposite `d` and `xhat`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    records: Vec<FarFieldRecord>,
    band: Band,
    groups: Vec<DirectionGroup>,
    provenance: Provenance,
}

impl DataSet {
    /// Groups and sorts `records`, then checks the grid and pairing
    /// invariants.
    pub fn new(records: Vec<FarFieldRecord>, band: Band, provenance: Provenance) -> Result<Self> {
        let mut keys: Vec<(UnitVec, UnitVec)> = Vec::new();
        let mut members: Vec<Vec<FarFieldRecord>> = Vec::new();
        for r in records {
            match keys
                .iter()
                .position(|(d, x)| d.approx_eq(r.d, MATCH_TOL) && x.approx_eq(r.xhat, MATCH_TOL))
            {
                Some(i) => members[i].push(r),
                None => {
                    keys.push((r.d, r.xhat));
                    members.push(vec![r]);
                }
            }
        }

        let nodes = band.nodes();
        let mut groups = Vec::with_capacity(keys.len());
        let mut sorted = Vec::with_capacity(members.len() * band.n_k);
        for ((d, xhat), mut list) in keys.iter().copied().zip(members) {
            list.sort_by(|a, b| a.k.total_cmp(&b.k));
            if list.len() != nodes.len()
                || list
                    .iter()
                    .zip(&nodes)
                    .any(|(r, k)| (r.k - k).abs() > MATCH_TOL * band.k_max)
            {
                let ks: Vec<f64> = list.iter().map(|r| r.k).collect();
                return Err(Error::Grid(format!(
                    "direction {d} has {} samples not matching the band {}..{} with {} nodes (got {ks:?})",
                    list.len(),
                    band.k_min,
                    band.k_max,
                    band.n_k
                )));
            }
            let p = list[0].p;
            if let Some(r) = list.iter().find(|r| !r.p.approx_eq(p, MATCH_TOL)) {
                return Err(Error::Pairing(format!(
                    "direction {d} mixes polarizations {p} and {}",
                    r.p
                )));
            }
            groups.push(DirectionGroup {
                d,
                xhat,
                p,
                start: sorted.len(),
                partner: usize::MAX,
            });
            sorted.extend(list);
        }

        for i in 0..groups.len() {
            let g = groups[i];
            let partner = groups
                .iter()
                .position(|h| h.d.approx_eq(-g.d, MATCH_TOL) && h.xhat.approx_eq(-g.xhat, MATCH_TOL))
                .ok_or_else(|| {
                    Error::Pairing(format!("direction {} has no opposite direction {}", g.d, -g.d))
                })?;
            if !groups[partner].p.approx_eq(g.p, MATCH_TOL) {
                return Err(Error::Pairing(format!(
                    "directions {} and {} carry different polarizations {} and {}",
                    g.d, groups[partner].d, g.p, groups[partner].p
                )));
            }
            groups[i].partner = partner;
        }

        Ok(DataSet {
            records: sorted,
            band,
            groups,
            provenance,
        })
    }

    pub fn records(&self) -> &[FarFieldRecord] {
        &self.records
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn groups(&self) -> &[DirectionGroup] {
        &self.groups
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Index pairs `(i, j)` with `i < j` of opposite groups.
    pub fn direction_pairs(&self) -> Vec<(usize, usize)> {
        self.groups
            .iter()
            .enumerate()
            .filter(|(i, g)| *i < g.partner)
            .map(|(i, g)| (i, g.partner))
            .collect()
    }

    /// Records of group `g`, ascending in `k`.
    pub fn group_records(&self, g: usize) -> &[FarFieldRecord] {
        let start = self.groups[g].start;
        &self.records[start..start + self.band.n_k]
    }

    /// The group with incident direction `d` (the first one, if several
    /// observation directions share it).
    pub fn find_group(&self, d: UnitVec) -> Result<usize> {
        self.groups
            .iter()
            .position(|g| g.d.approx_eq(d, MATCH_TOL))
            .ok_or_else(|| Error::Pairing(format!("no data for incident direction {d}")))
    }

    /// Incident directions, one per group.
    pub fn directions(&self) -> Vec<UnitVec> {
        self.groups.iter().map(|g| g.d).collect()
    }

    /// Same records with new field values; grouping is unchanged.
    pub(crate) fn with_fields(&self, fields: Vec<CVec3>, provenance: Provenance) -> DataSet {
        debug_assert_eq!(fields.len(), self.records.len());
        let records = self
            .records
            .iter()
            .zip(fields)
            .map(|(r, e_inf)| FarFieldRecord { e_inf, ..*r })
            .collect();
        DataSet {
            records,
            band: self.band,
            groups: self.groups.clone(),
            provenance,
        }
    }
}
