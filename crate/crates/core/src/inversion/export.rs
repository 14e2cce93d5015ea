//! CSV form of an indicator field.
//!
//! ```text
//! # grid: plane:x3=0:-3,3,-3,3:201,201
//! # band: 10 20 40
//! # power: 0.5
//! # directions: 40
//! x,y,z,value
//! ```

use std::io::{BufRead, BufReader, Read, Write};

use super::grid::SamplingGrid;
use super::indicator::IndicatorField;
use crate::dataset::Band;
use crate::error::{Error, Result};
use crate::geometry::UnitVec;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_field_csv<W: Write>(field: &IndicatorField, mut out: W) -> Result<()> {
    writeln!(out, "# grid: {}", field.grid)?;
    let b = field.band;
    writeln!(out, "# band: {} {} {}", b.k_min, b.k_max, b.n_k)?;
    match field.power {
        Some(p) => writeln!(out, "# power: {p}")?,
        None => writeln!(out, "# power: single")?,
    }
    writeln!(out, "# directions: {}", field.directions.len())?;
    writeln!(out, "x,y,z,value")?;
    for (z, v) in field.grid.points().iter().zip(&field.values) {
        writeln!(out, "{},{},{},{}", num(z.x), num(z.y), num(z.z), num(*v))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a field written by [`write_field_csv`]. Contributing directions are
/// not stored, so `directions` comes back empty.
pub fn read_field_csv<R: Read>(input: R) -> Result<IndicatorField> {
    let mut grid: Option<SamplingGrid> = None;
    let mut band: Option<Band> = None;
    let mut power = None;
    let mut values = Vec::new();
    let err = |line: usize, message: String| Error::Parse { line, message };
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let n = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text == "x,y,z,value" {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            let Some((key, value)) = comment.split_once(':') else { continue };
            let value = value.trim();
            match key.trim() {
                "grid" => grid = Some(value.parse().map_err(|e: Error| err(n, e.to_string()))?),
                "band" => {
                    let f: Vec<&str> = value.split_whitespace().collect();
                    let parsed = match f.as_slice() {
                        [a, b, c] => a
                            .parse()
                            .ok()
                            .zip(b.parse().ok())
                            .zip(c.parse().ok())
                            .and_then(|((a, b), c)| Band::new(a, b, c).ok()),
                        _ => None,
                    };
                    band = Some(parsed.ok_or_else(|| err(n, format!("bad band '{value}'")))?);
                }
                "power" if value != "single" => {
                    power = Some(value.parse::<f64>().map_err(|_| err(n, format!("bad power '{value}'")))?)
                }
                _ => {}
            }
            continue;
        }
        let cols: Vec<&str> = text.split(',').collect();
        if cols.len() != 4 {
            return Err(err(n, format!("expected 4 columns, got {}", cols.len())));
        }
        let v = cols[3]
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| err(n, format!("bad indicator value '{}'", cols[3])))?;
        values.push(v);
    }
    let grid = grid.ok_or_else(|| err(1, "missing '# grid:' line".into()))?;
    if values.len() != grid.len() {
        return Err(Error::Grid(format!(
            "grid {grid} has {} points but the file holds {} values",
            grid.len(),
            values.len()
        )));
    }
    Ok(IndicatorField {
        grid,
        values,
        directions: Vec::<UnitVec>::new(),
        power,
        band: band.unwrap_or(Band {
            k_min: 0.0,
            k_max: 0.0,
            n_k: 0,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid: SamplingGrid = "plane:x3=0:-1,1:3,2".parse().unwrap();
        let field = IndicatorField {
            values: (0..6).map(|i| (i as f64).sqrt() / 7.0).collect(),
            grid,
            directions: vec![UnitVec::E1],
            power: Some(0.5),
            band: Band::new(10.0, 20.0, 40).unwrap(),
        };
        let mut buf = Vec::new();
        write_field_csv(&field, &mut buf).unwrap();
        let back = read_field_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values, field.values);
        assert_eq!(back.grid, field.grid);
        assert_eq!(back.band, field.band);
        assert_eq!(back.power, Some(0.5));
    }

    #[test]
    fn malformed_rows_and_counts() {
        let text = "# grid: line:0,0,0:0,0,1:-1,1:2\n0,0,-1,0.5\n0,0,1\n";
        assert!(matches!(read_field_csv(text.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let text = "# grid: line:0,0,0:0,0,1:-1,1:3\n0,0,-1,0.5\n";
        assert!(matches!(read_field_csv(text.as_bytes()), Err(Error::Grid(_))));
        assert!(read_field_csv("0,0,0,1\n".as_bytes()).is_err());
    }
}
