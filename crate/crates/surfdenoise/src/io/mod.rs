//! Mesh and point-cloud file formats.
//!
//! OBJ is read and written, PLY (ASCII) is read only, XYZ is read and
//! written. The format is chosen by file extension.

pub mod obj;
pub mod ply;
pub mod xyz;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use surfdenoise_core::cloud::PointCloud;
use surfdenoise_core::TriMesh;

use crate::error::{Error, Result};

/// Kind of geometry a file holds, judged by its extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
    Xyz,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Format> {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("obj") => Ok(Format::Obj),
            Some("ply") => Ok(Format::Ply),
            Some("xyz") | Some("pts") => Ok(Format::Xyz),
            _ => Err(Error::Invalid(format!(
                "{}: unknown file type (expected .obj, .ply or .xyz)",
                path.display()
            ))),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::from(e).in_file(path))
}

/// Loads a triangle mesh from an OBJ or PLY file.
pub fn load_mesh(path: &Path) -> Result<TriMesh> {
    let result = match Format::from_path(path)? {
        Format::Obj => obj::read_obj(open(path)?),
        Format::Ply => ply::read_ply(open(path)?).and_then(|p| p.into_mesh()),
        Format::Xyz => return Err(Error::Invalid(format!("{}: not a mesh format", path.display()))),
    };
    result.map_err(|e| e.in_file(path))
}

/// Saves a mesh as OBJ.
pub fn save_mesh(mesh: &TriMesh, path: &Path) -> Result<()> {
    if Format::from_path(path)? != Format::Obj {
        return Err(Error::Invalid(format!("{}: meshes are written as .obj", path.display())));
    }
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::from(e).in_file(path))?);
    obj::write_obj(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Loads a point cloud from XYZ or a vertex-only PLY file.
pub fn load_cloud(path: &Path) -> Result<PointCloud> {
    let result = match Format::from_path(path)? {
        Format::Xyz => xyz::read_xyz(open(path)?),
        Format::Ply => ply::read_ply(open(path)?).and_then(|p| p.into_cloud()),
        Format::Obj => return Err(Error::Invalid(format!("{}: not a point-cloud format", path.display()))),
    };
    result.map_err(|e| e.in_file(path))
}

/// Saves points (and normals if present) as XYZ.
pub fn save_cloud(cloud: &PointCloud, path: &Path) -> Result<()> {
    if Format::from_path(path)? != Format::Xyz {
        return Err(Error::Invalid(format!("{}: point clouds are written as .xyz or .pts", path.display())));
    }
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::from(e).in_file(path))?);
    xyz::write_xyz(cloud.points(), cloud.normals(), &mut w)?;
    w.flush()?;
    Ok(())
}

/// `x` with `digits` significant digits in plain decimal notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let exponent = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.5, 9), "0.5");
        assert_eq!(format_significant(-1.0 / 3.0, 9), "-0.333333333");
        assert_eq!(format_significant(123456.789012, 9), "123456.789");
        assert_eq!(format_significant(0.0, 9), "0");
        assert_eq!(format_significant(-1e-20, 3), "-0.00000000000000000001");
    }
}
