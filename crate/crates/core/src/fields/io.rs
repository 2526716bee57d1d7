//! CSV files for fields (`x,y,value`) and polylines (`component_id,vertex_id,x,y`).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::contour::{Contours, Polyline};
use crate::fields::{Grid2, ScalarField};

/// Fixed 17-significant-digit float formatting used by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_field_to<W: Write>(w: W, field: &ScalarField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "value"])?;
    let g = field.grid();
    for k in 0..g.len() {
        let p = g.node_point(k);
        out.write_record([fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(field.at(k))])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_field(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    write_field_to(File::create(path)?, field)
}

/// Parses a full-grid field file; the grid is inferred from the coordinates.
pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_field_from(file).map_err(|e| match e {
        Error::FieldFile { reason, .. } => Error::FieldFile {
            path: path.to_path_buf(),
            reason,
        },
        Error::Csv(c) => Error::FieldFile {
            path: path.to_path_buf(),
            reason: c.to_string(),
        },
        other => other,
    })
}

pub fn read_field_from<R: Read>(r: R) -> Result<ScalarField> {
    let bad = |reason: String| Error::FieldFile {
        path: Default::default(),
        reason,
    };
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers()?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["x", "y", "value"] {
        return Err(bad(format!("expected header x,y,value, got {header:?}")));
    }
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(bad(format!("row {} has {} columns", n + 1, rec.len())));
        }
        let mut v = [0.0; 3];
        for (c, s) in rec.iter().enumerate() {
            v[c] = s
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("row {}: {e}", n + 1)))?;
            if !v[c].is_finite() {
                return Err(bad(format!("row {}: non-finite value", n + 1)));
            }
        }
        rows.push(v);
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let y_first = rows[0][1];
    let scale = rows.iter().fold(1.0f64, |m, r| m.max(r[0].abs()).max(r[1].abs()));
    let nx = rows
        .iter()
        .take_while(|r| (r[1] - y_first).abs() <= 1e-12 * scale)
        .count();
    if nx < 2 || rows.len() % nx != 0 {
        return Err(bad(format!(
            "{} rows do not form a full grid with {nx} columns",
            rows.len()
        )));
    }
    let ny = rows.len() / nx;
    let last = rows[rows.len() - 1];
    let grid = Grid2::new(nx, ny, [rows[0][0], y_first, last[0], last[1]])
        .map_err(|e| bad(e.to_string()))?;
    for (k, r) in rows.iter().enumerate() {
        let p = grid.node_point(k);
        if (p[0] - r[0]).abs() > 1e-6 * grid.h() || (p[1] - r[1]).abs() > 1e-6 * grid.h() {
            return Err(bad(format!(
                "row {} at ({}, {}) is off the inferred grid",
                k + 1,
                r[0],
                r[1]
            )));
        }
    }
    ScalarField::new(grid, rows.iter().map(|r| r[2]).collect())
}

pub fn write_polylines_to<W: Write>(w: W, contours: &Contours) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["component_id", "vertex_id", "x", "y"])?;
    for (c, poly) in contours.polylines.iter().enumerate() {
        for (v, p) in poly.points.iter().enumerate() {
            out.write_record([c.to_string(), v.to_string(), fmt_f64(p[0]), fmt_f64(p[1])])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_polylines(path: impl AsRef<Path>, contours: &Contours) -> Result<()> {
    write_polylines_to(File::create(path)?, contours)
}

/// Reads polylines back; closedness is not stored and is reported as `false`.
pub fn read_polylines(path: impl AsRef<Path>) -> Result<Vec<Polyline>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out: Vec<Polyline> = Vec::new();
    for rec in rd.deserialize() {
        let (c, _v, x, y): (usize, usize, f64, f64) = rec?;
        while out.len() <= c {
            out.push(Polyline {
                points: Vec::new(),
                closed: false,
            });
        }
        out[c].points.push([x, y]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{contour::interface_extract, LevelSet};

    #[test]
    fn field_round_trip_is_bit_exact() {
        let g = Grid2::new(9, 8, [-0.5, 0.0, 0.5, 0.875]).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() + y / 3.0);
        let mut buf = Vec::new();
        write_field_to(&mut buf, &f).unwrap();
        let back = read_field_from(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert!(back.grid().same_layout(&g));
    }

    #[test]
    fn rejects_truncated_file() {
        let text = "x,y,value\n0,0,1\n1,0,1\n2,0,1\n0,1,1\n";
        assert!(matches!(read_field_from(text.as_bytes()), Err(Error::FieldFile { .. })));
        assert!(read_field_from("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn polyline_csv_layout() {
        let g = Grid2::new(17, 17, [-1.0, -1.0, 1.0, 1.0]).unwrap();
        let c = interface_extract(&LevelSet::from_fn(g, |_, y| y - 0.01));
        let mut buf = Vec::new();
        write_polylines_to(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("component_id,vertex_id,x,y\n0,0,"));
        assert_eq!(text.lines().count(), 1 + c.vertex_count());
    }
}
