//! Wavefront OBJ, restricted to `v` and `f` records.

use std::io::{BufRead, Write};

use surfdenoise_core::{TriMesh, Vec3};

use super::format_significant;
use crate::error::{Error, Result};

/// Digits written per coordinate.
pub const SIGNIFICANT_DIGITS: usize = 9;

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad number `{tok}`")))
}

fn parse_index(tok: &str, count: usize, line: usize) -> Result<usize> {
    // only the position part of `v/vt/vn` matters
    let head = tok.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| Error::parse(line, format!("bad vertex index `{tok}`")))?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        count as i64 + raw
    } else {
        return Err(Error::parse(line, "vertex index 0"));
    };
    if idx < 0 || idx as usize >= count {
        return Err(Error::parse(
            line,
            format!("vertex index {raw} out of range ({count} vertices so far)"),
        ));
    }
    Ok(idx as usize)
}

/// Reads a mesh. Polygons are fan-triangulated from their first corner;
/// duplicate vertices are kept as they are.
pub fn read_obj<R: BufRead>(reader: R) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let content = line.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some("v") => {
                let c: Vec<&str> = toks.collect();
                if c.len() < 3 {
                    return Err(Error::parse(lineno, "vertex with <3 coordinates"));
                }
                vertices.push(Vec3::new(
                    parse_f64(c[0], lineno)?,
                    parse_f64(c[1], lineno)?,
                    parse_f64(c[2], lineno)?,
                ));
            }
            Some("f") => {
                let idx = toks
                    .map(|t| parse_index(t, vertices.len(), lineno))
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() < 3 {
                    return Err(Error::parse(lineno, "face with <3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriMesh::new(vertices, faces)?)
}

/// Writes `v` records then 1-based `f` records.
pub fn write_obj<W: Write>(mesh: &TriMesh, w: &mut W) -> Result<()> {
    writeln!(w, "# {} vertices, {} faces", mesh.num_vertices(), mesh.num_faces())?;
    for v in mesh.vertices() {
        writeln!(
            w,
            "v {} {} {}",
            format_significant(v.x, SIGNIFICANT_DIGITS),
            format_significant(v.y, SIGNIFICANT_DIGITS),
            format_significant(v.z, SIGNIFICANT_DIGITS)
        )?;
    }
    for f in mesh.faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}
