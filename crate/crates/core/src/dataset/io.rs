//! Line-oriented text format.
//!
//! ```text
//! # backscatter-dataset schema=1
//! # band: <k_min> <k_max> <n_k>
//! # method: po
//! # shape: ellipsoid:1,0.4,0.7
//! # ...
//! # pairs: 0-20 1-21 ...
//! k dx dy dz xx xy xz px py pz re_x re_y re_z im_x im_y im_z
//! ```
//!
//! Numbers carry 17 significant digits, so a write/read cycle is exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Band, DataSet, FarFieldRecord, Method, NoiseInfo, Provenance};
use crate::error::{Error, Result};
use crate::geometry::{CVec3, UnitVec, Vec3};

pub const SCHEMA_VERSION: u32 = 1;
const MAGIC: &str = "backscatter-dataset";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn vec3(v: Vec3) -> String {
    format!("{} {} {}", num(v.x), num(v.y), num(v.z))
}

pub fn write_dataset_to<W: Write>(ds: &DataSet, mut out: W) -> Result<()> {
    let band = ds.band();
    let prov = ds.provenance();
    writeln!(out, "# {MAGIC} schema={SCHEMA_VERSION}")?;
    writeln!(out, "# band: {} {} {}", num(band.k_min), num(band.k_max), band.n_k)?;
    writeln!(out, "# method: {}", prov.method)?;
    writeln!(out, "# shape: {}", prov.shape)?;
    writeln!(out, "# polarization: {}", prov.polarization)?;
    match prov.noise {
        Some(n) => writeln!(out, "# noise: {} {} {}", num(n.level), n.mode, n.seed)?,
        None => writeln!(out, "# noise: none")?,
    }
    writeln!(out, "# uncoupled-superposition: {}", prov.uncoupled_superposition)?;
    match prov.mesh_max_edge {
        Some(h) => writeln!(out, "# mesh-max-edge: {}", num(h))?,
        None => writeln!(out, "# mesh-max-edge: none")?,
    }
    match prov.scalar_projection {
        Some(e) => writeln!(out, "# scalar-projection: {}", vec3(*e))?,
        None => writeln!(out, "# scalar-projection: none")?,
    }
    let pairs: Vec<String> = ds
        .direction_pairs()
        .iter()
        .map(|(i, j)| format!("{i}-{j}"))
        .collect();
    writeln!(out, "# pairs: {}", pairs.join(" "))?;
    writeln!(out, "# columns: k dx dy dz xx xy xz px py pz re_x re_y re_z im_x im_y im_z")?;
    for r in ds.records() {
        writeln!(
            out,
            "{} {} {} {} {} {}",
            num(r.k),
            vec3(*r.d),
            vec3(*r.xhat),
            vec3(*r.p),
            vec3(r.e_inf.re()),
            vec3(r.e_inf.im())
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_dataset(ds: &DataSet, path: impl AsRef<Path>) -> Result<()> {
    write_dataset_to(ds, BufWriter::new(File::create(path)?))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<DataSet> {
    read_dataset_from(BufReader::new(File::open(path)?))
}

#[derive(Default)]
struct Header {
    schema: Option<u32>,
    band: Option<Band>,
    method: Option<Method>,
    shape: Option<String>,
    polarization: Option<String>,
    noise: Option<NoiseInfo>,
    uncoupled: bool,
    mesh_max_edge: Option<f64>,
    scalar_projection: Option<UnitVec>,
    pairs: Option<Vec<(usize, usize)>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_err(line, format!("bad number '{s}'")))
}

fn parse_vec3(line: usize, s: &str) -> Result<Vec3> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| parse_f64(line, t))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(parse_err(line, format!("expected 3 numbers, got '{s}'"))),
    }
}

fn parse_unit(line: usize, v: Vec3) -> Result<UnitVec> {
    UnitVec::new(v).map_err(|e| parse_err(line, e.to_string()))
}

impl Header {
    fn apply(&mut self, line: usize, text: &str) -> Result<()> {
        if let Some(rest) = text.strip_prefix(MAGIC) {
            let v = rest
                .trim()
                .strip_prefix("schema=")
                .and_then(|v| v.parse::<u32>().ok())
                .ok_or_else(|| parse_err(line, "bad schema field"))?;
            if v != SCHEMA_VERSION {
                return Err(parse_err(line, format!("unsupported schema version {v}")));
            }
            self.schema = Some(v);
            return Ok(());
        }
        let Some((key, value)) = text.split_once(':') else {
            return Ok(());
        };
        let value = value.trim();
        let none = value == "none";
        match key.trim() {
            "band" => {
                let f: Vec<&str> = value.split_whitespace().collect();
                let [a, b, n] = f.as_slice() else {
                    return Err(parse_err(line, "band needs k_min k_max n_k"));
                };
                let n = n.parse::<usize>().map_err(|_| parse_err(line, format!("bad node count '{n}'")))?;
                let band = Band::new(parse_f64(line, a)?, parse_f64(line, b)?, n)
                    .map_err(|e| parse_err(line, e.to_string()))?;
                self.band = Some(band);
            }
            "method" => self.method = Some(value.parse().map_err(|e: Error| parse_err(line, e.to_string()))?),
            "shape" => self.shape = Some(value.to_string()),
            "polarization" => self.polarization = Some(value.to_string()),
            "noise" if !none => {
                let f: Vec<&str> = value.split_whitespace().collect();
                let [level, mode, seed] = f.as_slice() else {
                    return Err(parse_err(line, "noise needs level mode seed"));
                };
                self.noise = Some(NoiseInfo {
                    level: parse_f64(line, level)?,
                    mode: mode.parse().map_err(|e: Error| parse_err(line, e.to_string()))?,
                    seed: seed.parse().map_err(|_| parse_err(line, format!("bad seed '{seed}'")))?,
                });
            }
            "uncoupled-superposition" => {
                self.uncoupled = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad flag '{value}'")))?
            }
            "mesh-max-edge" if !none => self.mesh_max_edge = Some(parse_f64(line, value)?),
            "scalar-projection" if !none => {
                self.scalar_projection = Some(parse_unit(line, parse_vec3(line, value)?)?)
            }
            "pairs" => {
                let pairs = value
                    .split_whitespace()
                    .map(|t| {
                        t.split_once('-')
                            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                            .ok_or_else(|| parse_err(line, format!("bad pair '{t}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.pairs = Some(pairs);
            }
            _ => {}
        }
        Ok(())
    }
}

fn parse_record(line: usize, text: &str) -> Result<FarFieldRecord> {
    let v: Vec<f64> = text
        .split_whitespace()
        .map(|t| parse_f64(line, t))
        .collect::<Result<_>>()?;
    if v.len() != 16 {
        return Err(parse_err(line, format!("expected 16 numbers, got {}", v.len())));
    }
    let at = |i: usize| Vec3::new(v[i], v[i + 1], v[i + 2]);
    FarFieldRecord::new(
        v[0],
        parse_unit(line, at(1))?,
        parse_unit(line, at(4))?,
        parse_unit(line, at(7))?,
        CVec3::from_parts(at(10), at(13)),
    )
    .map_err(|e| parse_err(line, e.to_string()))
}

pub fn read_dataset_from<R: Read>(input: R) -> Result<DataSet> {
    let mut header = Header::default();
    let mut records = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            header.apply(line_no, comment.trim())?;
        } else {
            if header.schema.is_none() {
                return Err(parse_err(line_no, "record before the dataset header"));
            }
            records.push(parse_record(line_no, text)?);
        }
    }
    if header.schema.is_none() {
        return Err(parse_err(1, "missing dataset header"));
    }
    let band = header.band.ok_or_else(|| parse_err(1, "missing band header"))?;
    let method = header.method.ok_or_else(|| parse_err(1, "missing method header"))?;
    let mut provenance = Provenance::new(method, header.shape.unwrap_or_default());
    if let Some(p) = header.polarization {
        provenance.polarization = p;
    }
    provenance.noise = header.noise;
    provenance.uncoupled_superposition = header.uncoupled;
    provenance.mesh_max_edge = header.mesh_max_edge;
    provenance.scalar_projection = header.scalar_projection;

    let ds = DataSet::new(records, band, provenance)?;
    if let Some(pairs) = header.pairs {
        if pairs != ds.direction_pairs() {
            return Err(Error::Pairing(format!(
                "header pairs {pairs:?} disagree with the records {:?}",
                ds.direction_pairs()
            )));
        }
    }
    Ok(ds)
}
