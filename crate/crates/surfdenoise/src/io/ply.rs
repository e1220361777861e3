//! ASCII PLY reader for `vertex` and `face` elements.

use std::io::BufRead;

use surfdenoise_core::cloud::PointCloud;
use surfdenoise_core::{TriMesh, Vec3};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Property {
    Scalar(String),
    List(String),
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

/// Contents of a PLY file.
#[derive(Debug, Clone, Default)]
pub struct PlyData {
    pub vertices: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
    /// Polygons as read, before triangulation.
    pub faces: Vec<Vec<usize>>,
}

impl PlyData {
    /// Fan-triangulates the polygons into a mesh.
    pub fn into_mesh(self) -> Result<TriMesh> {
        let mut tris = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(Error::Invalid(format!("face {fi} with <3 vertices")));
            }
            for k in 1..f.len() - 1 {
                tris.push([f[0], f[k], f[k + 1]]);
            }
        }
        Ok(TriMesh::new(self.vertices, tris)?)
    }

    pub fn into_cloud(self) -> Result<PointCloud> {
        match self.normals {
            Some(n) => Ok(PointCloud::with_normals(self.vertices, n)?),
            None => Ok(PointCloud::new(self.vertices)),
        }
    }
}

fn prop_name(p: &Property) -> &str {
    match p {
        Property::Scalar(n) | Property::List(n) => n,
    }
}

pub fn read_ply<R: BufRead>(reader: R) -> Result<PlyData> {
    let mut lines = reader.lines().enumerate().map(|(n, l)| (n + 1, l));
    let mut next = move || -> Result<Option<(usize, String)>> {
        match lines.next() {
            Some((n, l)) => Ok(Some((n, l?))),
            None => Ok(None),
        }
    };
    match next()? {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(Error::parse(1, "missing `ply` magic")),
    }
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let Some((n, line)) = next()? else {
            return Err(Error::parse(0, "unterminated header"));
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["format", "ascii", ..] => {}
            ["format", other, ..] => return Err(Error::parse(n, format!("unsupported format `{other}`"))),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count.parse().map_err(|_| Error::parse(n, "bad element count"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", _, _, name] => match elements.last_mut() {
                Some(e) => e.properties.push(Property::List(name.to_string())),
                None => return Err(Error::parse(n, "property before element")),
            },
            ["property", _, name] => match elements.last_mut() {
                Some(e) => e.properties.push(Property::Scalar(name.to_string())),
                None => return Err(Error::parse(n, "property before element")),
            },
            ["end_header"] => break,
            _ => return Err(Error::parse(n, format!("unexpected header line `{line}`"))),
        }
    }

    let mut data = PlyData::default();
    for el in &elements {
        let pos = |name: &str| el.properties.iter().position(|p| prop_name(p) == name);
        let xyz = [pos("x"), pos("y"), pos("z")];
        let nxyz = [pos("nx"), pos("ny"), pos("nz")];
        let has_normals = el.name == "vertex" && nxyz.iter().all(Option::is_some);
        let face_list = el
            .properties
            .iter()
            .position(|p| matches!(p, Property::List(n) if n == "vertex_indices" || n == "vertex_index"));
        let mut normals = Vec::new();
        for _ in 0..el.count {
            let Some((n, line)) = next()? else {
                return Err(Error::parse(0, format!("truncated `{}` element", el.name)));
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let mut cursor = 0;
            let mut scalars: Vec<f64> = Vec::with_capacity(el.properties.len());
            let mut list = Vec::new();
            for (pi, p) in el.properties.iter().enumerate() {
                let take = |cursor: &mut usize| -> Result<&str> {
                    let t = toks.get(*cursor).ok_or_else(|| Error::parse(n, "too few values"))?;
                    *cursor += 1;
                    Ok(t)
                };
                match p {
                    Property::Scalar(_) => {
                        let t = take(&mut cursor)?;
                        scalars.push(t.parse().map_err(|_| Error::parse(n, format!("bad number `{t}`")))?);
                    }
                    Property::List(_) => {
                        let t = take(&mut cursor)?;
                        let len: usize = t.parse().map_err(|_| Error::parse(n, "bad list length"))?;
                        let mut items = Vec::with_capacity(len);
                        for _ in 0..len {
                            let t = take(&mut cursor)?;
                            items.push(
                                t.parse::<usize>()
                                    .map_err(|_| Error::parse(n, format!("bad index `{t}`")))?,
                            );
                        }
                        if Some(pi) == face_list {
                            list = items;
                        }
                        scalars.push(f64::NAN);
                    }
                }
            }
            if el.name == "vertex" {
                let get = |i: Option<usize>| {
                    i.map(|i| scalars[i])
                        .ok_or_else(|| Error::parse(n, "vertex without x/y/z"))
                };
                data.vertices.push(Vec3::new(get(xyz[0])?, get(xyz[1])?, get(xyz[2])?));
                if has_normals {
                    normals.push(Vec3::new(get(nxyz[0])?, get(nxyz[1])?, get(nxyz[2])?));
                }
            } else if el.name == "face" {
                if face_list.is_none() {
                    return Err(Error::parse(n, "face element without vertex_indices"));
                }
                data.faces.push(list);
            }
        }
        if has_normals {
            data.normals = Some(normals);
        }
    }
    Ok(data)
}
