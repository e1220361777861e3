//! Indexed triangle mesh with cached face fields and adjacency.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{acos, cos, sqrt, Vec3};
use crate::spatial::KdTree;

/// Faces below `DEGENERATE_AREA_FACTOR * l_e^2` are rejected.
pub const DEGENERATE_AREA_FACTOR: f64 = 1e-14;

/// An undirected edge `(a, b)` with `a < b` and the faces that contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub faces: Vec<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.faces.len() == 1
    }
}

/// Triangle mesh. Connectivity is fixed after construction; vertex
/// positions change only through [`TriMesh::set_vertices`], which rebuilds
/// the face fields.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    face_normals: Vec<Vec3>,
    face_centroids: Vec<Vec3>,
    face_areas: Vec<f64>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_ring: Vec<Vec<usize>>,
    edge_ring: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    mean_edge_length: f64,
}

/// How face neighborhoods are formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeighborhoodMode {
    /// Faces sharing at least one vertex.
    SharedVertexRing,
    /// Faces sharing an edge.
    SharedEdgeRing,
    /// Faces whose centroid lies within `r` of the center face's centroid.
    CentroidRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodSpec {
    pub mode: NeighborhoodMode,
    pub include_self: bool,
}

impl NeighborhoodSpec {
    pub const fn new(mode: NeighborhoodMode, include_self: bool) -> Self {
        NeighborhoodSpec { mode, include_self }
    }

    pub fn validate(&self) -> Result<()> {
        if let NeighborhoodMode::CentroidRadius(r) = self.mode {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::ArgumentOutOfRange {
                    what: "neighborhood radius",
                    value: r,
                });
            }
        }
        Ok(())
    }
}

impl TriMesh {
    /// Validates indices and face areas and builds every cache.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&v) = f.iter().find(|&&v| v >= n) {
                return Err(Error::VertexIndexOutOfRange {
                    face: fi,
                    vertex: v,
                    count: n,
                });
            }
        }
        let order: Vec<usize> = (0..faces.len()).collect();
        let (vertex_faces, edges) = build_incidence(n, &faces, &order);
        let mut mesh = TriMesh {
            vertex_ring: ring_from_vertex_faces(&faces, &vertex_faces),
            edge_ring: ring_from_edges(faces.len(), &edges),
            vertex_neighbors: vertex_neighbors_from_edges(n, &edges),
            vertices,
            faces,
            face_normals: Vec::new(),
            face_centroids: Vec::new(),
            face_areas: Vec::new(),
            vertex_faces,
            edges,
            mean_edge_length: 0.0,
        };
        mesh.recompute_face_fields()?;
        Ok(mesh)
    }

    /// A mesh with the same connectivity and new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::LengthMismatch {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        let mut m = self.clone();
        m.vertices = vertices;
        m.recompute_face_fields()?;
        Ok(m)
    }

    /// Replaces vertex positions in place and rebuilds the face fields.
    pub fn set_vertices(&mut self, vertices: Vec<Vec3>) -> Result<()> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::LengthMismatch {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        self.vertices = vertices;
        self.recompute_face_fields()
    }

    /// Rebuilds normals, centroids, areas and the mean edge length from the
    /// current vertex positions.
    pub fn recompute_face_fields(&mut self) -> Result<()> {
        self.mean_edge_length = if self.edges.is_empty() {
            0.0
        } else {
            let total: f64 = self
                .edges
                .iter()
                .map(|e| self.vertices[e.vertices[0]].distance(self.vertices[e.vertices[1]]))
                .sum();
            total / self.edges.len() as f64
        };
        let min_area = DEGENERATE_AREA_FACTOR * self.mean_edge_length * self.mean_edge_length;
        let nf = self.faces.len();
        let mut normals = Vec::with_capacity(nf);
        let mut centroids = Vec::with_capacity(nf);
        let mut areas = Vec::with_capacity(nf);
        let mut degenerate = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let [a, b, c] = f.map(|v| self.vertices[v]);
            let cr = (b - a).cross(c - a);
            let len = cr.norm();
            let area = 0.5 * len;
            centroids.push((a + b + c) / 3.0);
            areas.push(area);
            if area <= min_area || !area.is_finite() || len == 0.0 {
                degenerate.push(fi);
                normals.push(Vec3::Z);
            } else {
                normals.push(cr / len);
            }
        }
        if !degenerate.is_empty() {
            return Err(Error::DegenerateFaces(degenerate));
        }
        self.face_normals = normals;
        self.face_centroids = centroids;
        self.face_areas = areas;
        Ok(())
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn face_normals(&self) -> &[Vec3] {
        &self.face_normals
    }

    pub fn face_centroids(&self) -> &[Vec3] {
        &self.face_centroids
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    /// Faces incident to each vertex, ascending.
    pub fn vertex_faces(&self) -> &[Vec<usize>] {
        &self.vertex_faces
    }

    /// One-ring vertex neighbors of each vertex, ascending.
    pub fn vertex_neighbors(&self) -> &[Vec<usize>] {
        &self.vertex_neighbors
    }

    /// Unique undirected edges, sorted by vertex pair.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Arithmetic mean of the unique undirected edge lengths.
    pub fn mean_edge_length(&self) -> f64 {
        self.mean_edge_length
    }

    pub fn is_manifold(&self) -> bool {
        self.edges.iter().all(|e| e.faces.len() <= 2)
    }

    pub(crate) fn ensure_manifold(&self) -> Result<()> {
        match self.edges.iter().find(|e| e.faces.len() > 2) {
            Some(e) => Err(Error::NonManifoldEdge(e.vertices[0], e.vertices[1])),
            None => Ok(()),
        }
    }

    /// Face neighborhood of `face`, ascending. Contains `face` iff
    /// `spec.include_self`.
    pub fn face_neighbors(&self, face: usize, spec: &NeighborhoodSpec) -> Result<Vec<usize>> {
        if face >= self.faces.len() {
            return Err(Error::FaceIndexOutOfRange(face));
        }
        spec.validate()?;
        let mut out = match spec.mode {
            NeighborhoodMode::SharedVertexRing => self.vertex_ring[face].clone(),
            NeighborhoodMode::SharedEdgeRing => self.edge_ring[face].clone(),
            NeighborhoodMode::CentroidRadius(r) => {
                let c = self.face_centroids[face];
                let r2 = r * r;
                (0..self.faces.len())
                    .filter(|&j| j != face && self.face_centroids[j].distance_squared(c) <= r2)
                    .collect()
            }
        };
        if spec.include_self {
            let pos = out.partition_point(|&j| j < face);
            out.insert(pos, face);
        }
        Ok(out)
    }

    /// Neighborhoods of every face at once (a kd-tree serves the radius mode).
    pub fn all_face_neighbors(&self, spec: &NeighborhoodSpec) -> Result<Vec<Vec<usize>>> {
        spec.validate()?;
        match spec.mode {
            NeighborhoodMode::CentroidRadius(r) => {
                let tree = KdTree::new(&self.face_centroids);
                Ok((0..self.faces.len())
                    .map(|i| {
                        let mut v = tree.within_radius(self.face_centroids[i], r);
                        if !spec.include_self {
                            v.retain(|&j| j != i);
                        } else if v.binary_search(&i).is_err() {
                            let pos = v.partition_point(|&j| j < i);
                            v.insert(pos, i);
                        }
                        v
                    })
                    .collect())
            }
            _ => (0..self.faces.len()).map(|i| self.face_neighbors(i, spec)).collect(),
        }
    }

    /// Signed enclosed volume, `sum det(v0, v1, v2) / 6`.
    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|v| self.vertices[v]);
                a.dot(b.cross(c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Interior edges whose adjacent face normals differ by at least
    /// `threshold_degrees`. Boundary edges are never reported.
    pub fn dihedral_feature_edges(&self, threshold_degrees: f64) -> Result<Vec<[usize; 2]>> {
        self.ensure_manifold()?;
        let threshold = threshold_degrees.to_radians();
        Ok(self
            .edges
            .iter()
            .filter(|e| {
                e.faces.len() == 2 && self.face_normals[e.faces[0]].angle(self.face_normals[e.faces[1]]) >= threshold
            })
            .map(|e| e.vertices)
            .collect())
    }

    /// Per-vertex mean curvature magnitude from the cotangent Laplacian.
    ///
    /// `kappa = |sum_j (cot a_ij + cot b_ij)(p_j - p_i)| / (4 A / 3)` with `A`
    /// the area of the incident faces. Boundary vertices get 0.
    pub fn vertex_mean_curvature(&self) -> Result<Vec<f64>> {
        self.ensure_manifold()?;
        let nv = self.vertices.len();
        let mut lap = vec![Vec3::ZERO; nv];
        let mut boundary = vec![false; nv];
        for e in &self.edges {
            let [a, b] = e.vertices;
            if e.is_boundary() {
                boundary[a] = true;
                boundary[b] = true;
            }
            let mut w = 0.0;
            for &f in &e.faces {
                let opp = self.faces[f].iter().copied().find(|&v| v != a && v != b).unwrap_or(a);
                let (pa, pb, po) = (self.vertices[a], self.vertices[b], self.vertices[opp]);
                let (u, v) = (pa - po, pb - po);
                let cr = u.cross(v).norm();
                if cr > 0.0 {
                    w += u.dot(v) / cr;
                }
            }
            let d = self.vertices[b] - self.vertices[a];
            lap[a] += d * w;
            lap[b] -= d * w;
        }
        Ok((0..nv)
            .map(|i| {
                let area: f64 = self.vertex_faces[i].iter().map(|&f| self.face_areas[f]).sum();
                if boundary[i] || area <= 0.0 {
                    0.0
                } else {
                    lap[i].norm() / (4.0 * area / 3.0)
                }
            })
            .collect())
    }

    /// Per-face curvature: mean of the face's vertex curvatures.
    pub fn face_mean_curvature(&self) -> Result<Vec<f64>> {
        let kv = self.vertex_mean_curvature()?;
        Ok(self
            .faces
            .iter()
            .map(|f| (kv[f[0]] + kv[f[1]] + kv[f[2]]) / 3.0)
            .collect())
    }
}

/// Vertex-to-face incidence and unique edges, accumulating faces in `order`.
/// Every list is sorted afterwards, so the result does not depend on `order`.
pub(crate) fn build_incidence(nv: usize, faces: &[[usize; 3]], order: &[usize]) -> (Vec<Vec<usize>>, Vec<Edge>) {
    let mut vertex_faces = vec![Vec::new(); nv];
    let mut edge_map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &fi in order {
        let f = faces[fi];
        for k in 0..3 {
            vertex_faces[f[k]].push(fi);
            let (a, b) = (f[k], f[(k + 1) % 3]);
            let key = if a < b { (a, b) } else { (b, a) };
            edge_map.entry(key).or_default().push(fi);
        }
    }
    for list in &mut vertex_faces {
        list.sort_unstable();
        list.dedup();
    }
    let edges = edge_map
        .into_iter()
        .filter(|((a, b), _)| a != b)
        .map(|((a, b), mut faces)| {
            faces.sort_unstable();
            Edge {
                vertices: [a, b],
                faces,
            }
        })
        .collect();
    (vertex_faces, edges)
}

fn ring_from_vertex_faces(faces: &[[usize; 3]], vertex_faces: &[Vec<usize>]) -> Vec<Vec<usize>> {
    faces
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            let mut ring: Vec<usize> = f
                .iter()
                .flat_map(|&v| vertex_faces[v].iter().copied())
                .filter(|&j| j != fi)
                .collect();
            ring.sort_unstable();
            ring.dedup();
            ring
        })
        .collect()
}

fn ring_from_edges(nf: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut ring = vec![Vec::new(); nf];
    for e in edges {
        for &a in &e.faces {
            for &b in &e.faces {
                if a != b {
                    ring[a].push(b);
                }
            }
        }
    }
    for r in &mut ring {
        r.sort_unstable();
        r.dedup();
    }
    ring
}

fn vertex_neighbors_from_edges(nv: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut nb = vec![Vec::new(); nv];
    for e in edges {
        nb[e.vertices[0]].push(e.vertices[1]);
        nb[e.vertices[1]].push(e.vertices[0]);
    }
    for n in &mut nb {
        n.sort_unstable();
    }
    nb
}

/// Which quantity a normal-difference value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalArgKind {
    /// `|n_i - n_j|`, in `[0, 2]`.
    EuclideanDistance,
    /// The angle between the normals, in `[0, pi]`.
    AngleRadians,
    /// `arccos(n_i . n_j)`; equal to the angle for unit normals.
    ArccosDot,
}

/// The three equivalent measures of the difference between two unit normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalArgs {
    pub distance: f64,
    pub angle: f64,
    pub arccos_dot: f64,
}

/// Converts between normal distance and angle via the law of cosines,
/// `angle = arccos(1 - d^2 / 2)`.
pub fn convert_normal_args(value: f64, from: NormalArgKind) -> Result<NormalArgs> {
    match from {
        NormalArgKind::EuclideanDistance => {
            if !(0.0..=2.0).contains(&value) {
                return Err(Error::ArgumentOutOfRange {
                    what: "normal distance",
                    value,
                });
            }
            let angle = acos((1.0 - value * value / 2.0).clamp(-1.0, 1.0));
            Ok(NormalArgs {
                distance: value,
                angle,
                arccos_dot: angle,
            })
        }
        NormalArgKind::AngleRadians | NormalArgKind::ArccosDot => {
            if !(0.0..=core::f64::consts::PI).contains(&value) {
                return Err(Error::ArgumentOutOfRange {
                    what: "normal angle",
                    value,
                });
            }
            let distance = sqrt((2.0 - 2.0 * cos(value)).max(0.0));
            Ok(NormalArgs {
                distance,
                angle: value,
                arccos_dot: value,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn triangle() -> TriMesh {
        TriMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    pub(crate) fn unit_cube() -> TriMesh {
        let v = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let f = vec![
            [0, 2, 1],
            [1, 2, 3], // z = 0
            [4, 5, 6],
            [5, 7, 6], // z = 1
            [0, 1, 4],
            [1, 5, 4], // y = 0
            [2, 6, 3],
            [3, 6, 7], // y = 1
            [0, 4, 2],
            [2, 4, 6], // x = 0
            [1, 3, 5],
            [3, 7, 5], // x = 1
        ];
        TriMesh::new(v, f).unwrap()
    }

    #[test]
    fn single_triangle_fields() {
        let m = triangle();
        assert_eq!(m.face_normals()[0], Vec3::Z);
        let c = m.face_centroids()[0];
        assert!((c - Vec3::new(1.0 / 3.0, 1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.face_areas()[0], 0.5);
    }

    #[test]
    fn rejects_out_of_range_and_degenerate() {
        let v = vec![Vec3::ZERO, Vec3::X, Vec3::Y];
        assert!(matches!(
            TriMesh::new(v.clone(), vec![[0, 1, 3]]),
            Err(Error::VertexIndexOutOfRange { face: 0, vertex: 3, .. })
        ));
        let v2 = vec![Vec3::ZERO, Vec3::X, Vec3::X * 2.0, Vec3::Y];
        assert_eq!(
            TriMesh::new(v2, vec![[0, 1, 3], [0, 1, 2]]).unwrap_err(),
            Error::DegenerateFaces(vec![1])
        );
    }

    #[test]
    fn cube_mean_edge_length_over_18_edges() {
        let m = unit_cube();
        assert_eq!(m.edges().len(), 18);
        let expected = (12.0 + 6.0 * SQRT_2) / 18.0;
        assert!((m.mean_edge_length() - expected).abs() < 1e-15);
    }

    #[test]
    fn cube_volume_and_mirror() {
        let m = unit_cube();
        assert!((m.volume() - 1.0).abs() < 1e-12);
        let mirrored: Vec<Vec3> = m.vertices().iter().map(|p| Vec3::new(-p.x, p.y, p.z)).collect();
        let mm = m.with_vertices(mirrored).unwrap();
        assert!((mm.volume() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cube_feature_edges() {
        let m = unit_cube();
        let fe = m.dihedral_feature_edges(70.0).unwrap();
        assert_eq!(fe.len(), 12);
        for [a, b] in fe {
            let d = m.vertices()[a] - m.vertices()[b];
            // geometric cube edges are axis-aligned
            let nonzero = [d.x, d.y, d.z].iter().filter(|c| c.abs() > 0.0).count();
            assert_eq!(nonzero, 1);
        }
        assert_eq!(m.dihedral_feature_edges(0.0).unwrap().len(), 18);
    }

    #[test]
    fn translation_and_rotation_equivariance() {
        let m = unit_cube();
        let t = Vec3::new(0.3, -2.0, 5.0);
        let mt = m.with_vertices(m.vertices().iter().map(|&p| p + t).collect()).unwrap();
        for i in 0..m.num_faces() {
            assert!((mt.face_normals()[i] - m.face_normals()[i]).norm() < 1e-12);
            assert!((mt.face_centroids()[i] - (m.face_centroids()[i] + t)).norm() < 1e-12);
        }
        let r = crate::math::Mat3::rotation(Vec3::new(1.0, -1.0, 0.5), 0.9);
        let mr = m
            .with_vertices(m.vertices().iter().map(|&p| r.apply(p)).collect())
            .unwrap();
        for i in 0..m.num_faces() {
            assert!((mr.face_normals()[i] - r.apply(m.face_normals()[i])).norm() < 1e-9);
        }
    }

    #[test]
    fn recompute_is_bit_identical() {
        let mut m = unit_cube();
        let before = m.face_normals().to_vec();
        m.recompute_face_fields().unwrap();
        assert_eq!(before, m.face_normals());
    }

    #[test]
    fn incidence_independent_of_build_order() {
        let m = unit_cube();
        let fwd: Vec<usize> = (0..m.num_faces()).collect();
        let rev: Vec<usize> = (0..m.num_faces()).rev().collect();
        let shuffled = vec![5, 0, 11, 3, 8, 1, 9, 2, 10, 4, 7, 6];
        let a = build_incidence(m.num_vertices(), m.faces(), &fwd);
        for order in [rev, shuffled] {
            assert_eq!(a, build_incidence(m.num_vertices(), m.faces(), &order));
        }
    }

    #[test]
    fn neighborhood_symmetry_and_self() {
        let m = unit_cube();
        for mode in [NeighborhoodMode::SharedVertexRing, NeighborhoodMode::SharedEdgeRing] {
            let spec = NeighborhoodSpec::new(mode, false);
            for i in 0..m.num_faces() {
                let ni = m.face_neighbors(i, &spec).unwrap();
                assert!(!ni.contains(&i));
                for &j in &ni {
                    assert!(m.face_neighbors(j, &spec).unwrap().contains(&i));
                }
            }
        }
        let tiny = NeighborhoodSpec::new(NeighborhoodMode::CentroidRadius(1e-3), true);
        assert_eq!(m.face_neighbors(4, &tiny).unwrap(), vec![4]);
        assert_eq!(m.all_face_neighbors(&tiny).unwrap()[4], vec![4]);
        assert!(m.face_neighbors(99, &tiny).is_err());
    }

    #[test]
    fn radius_neighborhood_batch_matches_single() {
        let m = unit_cube();
        let spec = NeighborhoodSpec::new(NeighborhoodMode::CentroidRadius(0.8), false);
        let all = m.all_face_neighbors(&spec).unwrap();
        for (i, ring) in all.iter().enumerate() {
            assert_eq!(*ring, m.face_neighbors(i, &spec).unwrap());
        }
    }

    #[test]
    fn non_manifold_rejected_by_curvature() {
        let v = vec![Vec3::ZERO, Vec3::X, Vec3::Y, -Vec3::Y, Vec3::Z];
        let m = TriMesh::new(v, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap();
        assert!(!m.is_manifold());
        assert_eq!(m.vertex_mean_curvature().unwrap_err(), Error::NonManifoldEdge(0, 1));
    }

    #[test]
    fn normal_argument_conversion() {
        let a = convert_normal_args(SQRT_2, NormalArgKind::EuclideanDistance).unwrap();
        assert!((a.angle - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(
            convert_normal_args(0.0, NormalArgKind::EuclideanDistance)
                .unwrap()
                .angle,
            0.0
        );
        let p = convert_normal_args(2.0, NormalArgKind::EuclideanDistance).unwrap();
        assert!((p.angle - PI).abs() < 1e-15);
        let back = convert_normal_args(FRAC_PI_2, NormalArgKind::AngleRadians).unwrap();
        assert!((back.distance - SQRT_2).abs() < 1e-15);
        assert_eq!(back.arccos_dot, back.angle);
        assert!(convert_normal_args(2.5, NormalArgKind::EuclideanDistance).is_err());
        assert!(convert_normal_args(-0.1, NormalArgKind::ArccosDot).is_err());
    }

    #[test]
    fn empty_mesh_is_valid() {
        let m = TriMesh::new(Vec::new(), Vec::new()).unwrap();
        assert_eq!(m.num_faces(), 0);
        assert_eq!(m.mean_edge_length(), 0.0);
        assert_eq!(m.volume(), 0.0);
    }
}
