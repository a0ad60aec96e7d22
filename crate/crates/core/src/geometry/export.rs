//! Field and mesh file formats.
//!
//! * CSV field: header `c1,c2,c3,value`, one row per finite sample in storage
//!   order, unphysical samples omitted.
//! * JSON field: metadata plus a flat `values` array in storage order with
//!   `null` for unphysical samples.
//! * OBJ mesh: a `# level` comment, then `v x y z` records and 1-based
//!   `f i j k` records.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_resolution, IsoMesh, Measure, ScalarField};
use crate::error::{Error, Result};

pub const FIELD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Csv,
    Json,
}

impl FieldFormat {
    /// Chooses JSON for `.json` paths and CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => FieldFormat::Json,
            _ => FieldFormat::Csv,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldDocument {
    schema_version: u32,
    r: f64,
    s: f64,
    measure: Option<Measure>,
    n: usize,
    origin: f64,
    spacing: f64,
    layout: String,
    values: Vec<Option<f64>>,
}

const LAYOUT: &str = "c1-fastest";

pub fn write_field_csv<W: Write>(field: &ScalarField, mut out: W) -> std::io::Result<()> {
    writeln!(out, "c1,c2,c3,value")?;
    for (idx, v) in field.values.iter().enumerate() {
        if v.is_finite() {
            let [c1, c2, c3] = field.point(idx);
            writeln!(out, "{c1},{c2},{c3},{v}")?;
        }
    }
    out.flush()
}

pub fn write_field_json<W: Write>(field: &ScalarField, out: W) -> serde_json::Result<()> {
    let doc = FieldDocument {
        schema_version: FIELD_SCHEMA_VERSION,
        r: field.r,
        s: field.s,
        measure: field.measure,
        n: field.n,
        origin: ScalarField::ORIGIN,
        spacing: field.spacing(),
        layout: LAYOUT.to_string(),
        values: field
            .values
            .iter()
            .map(|v| v.is_finite().then_some(*v))
            .collect(),
    };
    serde_json::to_writer(out, &doc)
}

pub fn field_from_json(text: &str) -> std::result::Result<ScalarField, String> {
    let doc: FieldDocument = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if doc.layout != LAYOUT {
        return Err(format!("unsupported layout '{}'", doc.layout));
    }
    check_resolution(doc.n).map_err(|e| e.to_string())?;
    if doc.values.len() != doc.n.pow(3) {
        return Err(format!(
            "expected {} values, found {}",
            doc.n.pow(3),
            doc.values.len()
        ));
    }
    Ok(ScalarField {
        r: doc.r,
        s: doc.s,
        measure: doc.measure,
        n: doc.n,
        values: doc
            .values
            .into_iter()
            .map(|v| v.unwrap_or(f64::NAN))
            .collect(),
    })
}

pub fn read_field_json(path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    field_from_json(&text).map_err(|reason| Error::MalformedField {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn write_mesh_obj<W: Write>(mesh: &IsoMesh, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# level {}", mesh.level)?;
    for [x, y, z] in &mesh.vertices {
        writeln!(out, "v {x} {y} {z}")?;
    }
    for [a, b, c] in &mesh.triangles {
        writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1)?;
    }
    out.flush()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn export_field(field: &ScalarField, path: &Path, format: FieldFormat) -> Result<()> {
    let out = create(path)?;
    match format {
        FieldFormat::Csv => write_field_csv(field, out).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        FieldFormat::Json => write_field_json(field, out).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        }),
    }
}

pub fn export_mesh(mesh: &IsoMesh, path: &Path) -> Result<()> {
    write_mesh_obj(mesh, create(path)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_field;
    use crate::par::Execution;

    #[test]
    fn empty_mesh_is_valid_obj() {
        let mut buf = Vec::new();
        write_mesh_obj(
            &IsoMesh {
                level: 0.6,
                ..IsoMesh::default()
            },
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# level 0.6\n");
    }

    #[test]
    fn obj_indices_are_one_based() {
        let mesh = IsoMesh {
            level: 0.5,
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.25, -1.0]],
            sources: vec![[0, 1]; 3],
            triangles: vec![[0, 1, 2]],
        };
        let mut buf = Vec::new();
        write_mesh_obj(&mesh, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# level 0.5\nv 0 0 0\nv 1 0 0\nv 0 0.25 -1\nf 1 2 3\n"
        );
    }

    #[test]
    fn two_point_grid_csv() {
        let field = sample_field(0.0, 0.0, Measure::Physicality, 2, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&field, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "c1,c2,c3,value");
        assert_eq!(lines[1], "-1,-1,-1,0");

        let gmqd = sample_field(0.0, 0.0, Measure::Gmqd, 2, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&gmqd, &mut buf).unwrap();
        // Only the four Bell vertices are physical.
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }

    #[test]
    fn json_round_trip_preserves_values() {
        let field = sample_field(0.4, 0.1, Measure::Concurrence, 9, Execution::default()).unwrap();
        let mut buf = Vec::new();
        write_field_json(&field, &mut buf).unwrap();
        let back = field_from_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.n, field.n);
        assert_eq!(back.measure, Some(Measure::Concurrence));
        for (a, b) in field.values.iter().zip(&back.values) {
            assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
    }

    #[test]
    fn io_errors_carry_path() {
        let field = sample_field(0.0, 0.0, Measure::Gmqd, 2, Execution::Sequential).unwrap();
        let path = Path::new("/nonexistent-dir/field.csv");
        let err = export_field(&field, path, FieldFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/field.csv"));
        assert!(field_from_json("{\"bad\": 1}").is_err());
    }
}
