//! Synthetic test shapes with known clean geometry.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{sqrt, Vec3};
use crate::mesh::TriMesh;

/// Which synthetic shape to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    /// Axis-aligned cube with an `n x n` vertex grid per side; every grid
    /// quad is split into four triangles around its center.
    Cube(usize),
    /// Flat `n x n` vertex grid in the `z = 0` plane, one diagonal per quad.
    Plane(usize),
    /// Subdivided icosahedron projected to the sphere.
    Icosphere(usize),
    /// Extruded pentagonal wedge: a convex block with sharp 90 degree edges
    /// and two softer creases, midpoint-subdivided `level` times.
    FandiskLike(usize),
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Cube(_) => "cube",
            ShapeKind::Plane(_) => "plane",
            ShapeKind::Icosphere(_) => "icosphere",
            ShapeKind::FandiskLike(_) => "fandisk-like",
        }
    }
}

/// Builds a shape; `scale` is the cube side, plane side, sphere radius, or
/// wedge half-length.
pub fn make_shape(kind: ShapeKind, scale: f64) -> Result<TriMesh> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::ArgumentOutOfRange {
            what: "shape scale",
            value: scale,
        });
    }
    match kind {
        ShapeKind::Cube(n) => {
            require_n(n)?;
            cube(n, scale)
        }
        ShapeKind::Plane(n) => {
            require_n(n)?;
            plane(n, scale)
        }
        ShapeKind::Icosphere(level) => icosphere(level, scale),
        ShapeKind::FandiskLike(level) => fandisk_like(level, scale),
    }
}

fn require_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::ArgumentOutOfRange {
            what: "grid resolution",
            value: n as f64,
        });
    }
    Ok(())
}

fn plane(n: usize, scale: f64) -> Result<TriMesh> {
    let m = (n - 1) as f64;
    let mut vertices = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertices.push(Vec3::new(
                (i as f64 / m - 0.5) * scale,
                (j as f64 / m - 0.5) * scale,
                0.0,
            ));
        }
    }
    let id = |i: usize, j: usize| j * n + i;
    let mut faces = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, faces)
}

fn cube(n: usize, scale: f64) -> Result<TriMesh> {
    let m = (n - 1) as i64;
    // (fixed axis, fixed value, u axis, v axis) with u x v pointing outward
    let sides: [(usize, i64, usize, usize); 6] = [
        (0, m, 1, 2),
        (0, 0, 2, 1),
        (1, m, 2, 0),
        (1, 0, 0, 2),
        (2, m, 0, 1),
        (2, 0, 1, 0),
    ];
    let mut lattice: BTreeMap<[i64; 3], usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let to_pos = |c: [f64; 3]| Vec3::new(c[0], c[1], c[2]) * (scale / m as f64) - Vec3::new(0.5, 0.5, 0.5) * scale;
    let mut faces = Vec::new();
    for &(axis, value, u, v) in &sides {
        let mut corner = |a: i64, b: i64, vertices: &mut Vec<Vec3>| -> usize {
            let mut c = [0i64; 3];
            c[axis] = value;
            c[u] = a;
            c[v] = b;
            *lattice.entry(c).or_insert_with(|| {
                vertices.push(to_pos([c[0] as f64, c[1] as f64, c[2] as f64]));
                vertices.len() - 1
            })
        };
        for b in 0..m {
            for a in 0..m {
                let c00 = corner(a, b, &mut vertices);
                let c10 = corner(a + 1, b, &mut vertices);
                let c11 = corner(a + 1, b + 1, &mut vertices);
                let c01 = corner(a, b + 1, &mut vertices);
                let mut center = [0.0f64; 3];
                center[axis] = value as f64;
                center[u] = a as f64 + 0.5;
                center[v] = b as f64 + 0.5;
                vertices.push(to_pos(center));
                let ctr = vertices.len() - 1;
                faces.extend_from_slice(&[[c00, c10, ctr], [c10, c11, ctr], [c11, c01, ctr], [c01, c00, ctr]]);
            }
        }
    }
    TriMesh::new(vertices, faces)
}

struct Subdivider {
    vertices: Vec<Vec3>,
    midpoints: BTreeMap<(usize, usize), usize>,
}

impl Subdivider {
    fn midpoint(&mut self, a: usize, b: usize, project: bool) -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&i) = self.midpoints.get(&key) {
            return i;
        }
        let mut p = (self.vertices[a] + self.vertices[b]) * 0.5;
        if project {
            p = p / p.norm();
        }
        self.vertices.push(p);
        let i = self.vertices.len() - 1;
        self.midpoints.insert(key, i);
        i
    }

    fn refine(&mut self, faces: &[[usize; 3]], project: bool) -> Vec<[usize; 3]> {
        self.midpoints.clear();
        let mut out = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in faces {
            let ab = self.midpoint(a, b, project);
            let bc = self.midpoint(b, c, project);
            let ca = self.midpoint(c, a, project);
            out.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        out
    }
}

fn icosphere(level: usize, radius: f64) -> Result<TriMesh> {
    let t = (1.0 + sqrt(5.0)) / 2.0;
    let raw = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ];
    let vertices = raw
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z))
        .map(|p| p / p.norm())
        .collect();
    let mut faces: Vec<[usize; 3]> = alloc::vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut sub = Subdivider {
        vertices,
        midpoints: BTreeMap::new(),
    };
    for _ in 0..level {
        faces = sub.refine(&faces, true);
    }
    let vertices = sub.vertices.into_iter().map(|p| p * radius).collect();
    TriMesh::new(vertices, faces)
}

fn fandisk_like(level: usize, scale: f64) -> Result<TriMesh> {
    // profile in the xz-plane, extruded along y
    let profile = [(0.0, 0.0), (2.0, 0.0), (2.0, 0.5), (1.2, 1.0), (0.0, 1.0)];
    let center = Vec3::new(1.0, 0.5, 0.5);
    let mut vertices = Vec::new();
    for &y in &[0.0, 1.0] {
        for &(x, z) in &profile {
            vertices.push(Vec3::new(x, y, z));
        }
    }
    let k = profile.len();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for i in 0..k {
        let j = (i + 1) % k;
        faces.push([i, j, k + j]);
        faces.push([i, k + j, k + i]);
    }
    for cap in 0..2 {
        let base = cap * k;
        let c = (0..k).map(|i| vertices[base + i]).fold(Vec3::ZERO, |a, b| a + b) / k as f64;
        vertices.push(c);
        let ci = vertices.len() - 1;
        for i in 0..k {
            faces.push([base + i, base + (i + 1) % k, ci]);
        }
    }
    // orient outward: the wedge is convex, so every face must point away from its center
    let body = vertices.iter().fold(Vec3::ZERO, |a, &b| a + b) / vertices.len() as f64;
    for f in &mut faces {
        let [a, b, c] = f.map(|v| vertices[v]);
        let n = (b - a).cross(c - a);
        if n.dot((a + b + c) / 3.0 - body) < 0.0 {
            f.swap(1, 2);
        }
    }
    let mut sub = Subdivider {
        vertices,
        midpoints: BTreeMap::new(),
    };
    for _ in 0..level {
        faces = sub.refine(&faces, false);
    }
    let vertices = sub.vertices.into_iter().map(|p| (p - center) * scale).collect();
    TriMesh::new(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn cube_two_has_24_faces_and_unit_volume() {
        let m = make_shape(ShapeKind::Cube(2), 1.0).unwrap();
        assert_eq!(m.num_faces(), 24);
        assert_eq!(m.num_vertices(), 14);
        assert!((m.volume() - 1.0).abs() < 1e-12);
        let m = make_shape(ShapeKind::Cube(3), 2.0).unwrap();
        assert!((m.volume() - 8.0).abs() < 1e-12);
        assert!(m.is_manifold());
        assert!(m.edges().iter().all(|e| e.faces.len() == 2), "cube is watertight");
    }

    #[test]
    fn plane_three() {
        let m = make_shape(ShapeKind::Plane(3), 1.0).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_faces(), 8);
        assert!(m.face_normals().iter().all(|&n| n == Vec3::Z));
    }

    #[test]
    fn icosphere_volume() {
        let m = make_shape(ShapeKind::Icosphere(2), 1.0).unwrap();
        assert_eq!(m.num_faces(), 320);
        let v = m.volume();
        let exact = 4.0 * PI / 3.0;
        assert!((v - exact).abs() / exact < 0.05, "volume {v}");
        assert!(m.edges().iter().all(|e| e.faces.len() == 2));
    }

    #[test]
    fn fandisk_is_closed_and_outward() {
        let m = make_shape(ShapeKind::FandiskLike(2), 1.0).unwrap();
        assert!(m.edges().iter().all(|e| e.faces.len() == 2));
        // extruded pentagon of area 1.2 + 0.8*0.75 + ... computed by shoelace
        let profile = [(0.0, 0.0), (2.0, 0.0), (2.0, 0.5), (1.2, 1.0), (0.0, 1.0)];
        let mut area = 0.0;
        for i in 0..5 {
            let (a, b) = (profile[i], profile[(i + 1) % 5]);
            area += a.0 * b.1 - b.0 * a.1;
        }
        area = (area / 2.0f64).abs();
        assert!((m.volume() - area).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(make_shape(ShapeKind::Cube(1), 1.0).is_err());
        assert!(make_shape(ShapeKind::Plane(0), 1.0).is_err());
        assert!(make_shape(ShapeKind::Plane(3), 0.0).is_err());
    }
}
