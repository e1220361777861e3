//! Vertex positions from filtered face normals, and the uniform Laplacian
//! baseline.

use alloc::vec::Vec;

use crate::bench::Warnings;
use crate::error::{Error, Result};
use crate::filter::{filter_normals, FilterSpec, NormalField};
use crate::math::Vec3;
use crate::mesh::TriMesh;
use crate::par::map_indices;

fn centroids(vertices: &[Vec3], faces: &[[usize; 3]]) -> Vec<Vec3> {
    faces
        .iter()
        .map(|f| (vertices[f[0]] + vertices[f[1]] + vertices[f[2]]) / 3.0)
        .collect()
}

fn check_step(what: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ArgumentOutOfRange { what, value });
    }
    Ok(())
}

/// Moves every vertex toward the planes of its incident faces:
///
/// ```text
/// p_i <- p_i + step / |F(i)| * sum_{j in F(i)} n_j (n_j . (c_j - p_i))
/// ```
///
/// Centroids come from the positions of the previous iteration. Vertices
/// without incident faces stay in place and are counted once.
pub fn update_vertices(
    mesh: &TriMesh,
    normals: &[Vec3],
    iterations: usize,
    step: f64,
) -> Result<(Vec<Vec3>, Warnings)> {
    mesh.ensure_manifold()?;
    check_step("vertex update step", step)?;
    if normals.len() != mesh.num_faces() {
        return Err(Error::LengthMismatch {
            expected: mesh.num_faces(),
            got: normals.len(),
        });
    }
    let faces = mesh.faces();
    let incident = mesh.vertex_faces();
    let warnings = Warnings {
        isolated_vertices: incident.iter().filter(|f| f.is_empty()).count(),
        ..Warnings::default()
    };
    let mut p = mesh.vertices().to_vec();
    for _ in 0..iterations {
        let c = centroids(&p, faces);
        p = map_indices(p.len(), |i| {
            let fs = &incident[i];
            if fs.is_empty() {
                return p[i];
            }
            let mut d = Vec3::ZERO;
            for &j in fs {
                d += normals[j] * normals[j].dot(c[j] - p[i]);
            }
            p[i] + d * (step / fs.len() as f64)
        });
    }
    Ok((p, warnings))
}

/// `sum_i sum_{j in F(i)} (n_j . (c_j - p_i))^2` for the given positions.
pub fn orthogonality_residual(mesh: &TriMesh, vertices: &[Vec3], normals: &[Vec3]) -> Result<f64> {
    if vertices.len() != mesh.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: mesh.num_vertices(),
            got: vertices.len(),
        });
    }
    if normals.len() != mesh.num_faces() {
        return Err(Error::LengthMismatch {
            expected: mesh.num_faces(),
            got: normals.len(),
        });
    }
    let c = centroids(vertices, mesh.faces());
    Ok(mesh
        .vertex_faces()
        .iter()
        .enumerate()
        .map(|(i, fs)| {
            fs.iter()
                .map(|&j| {
                    let h = normals[j].dot(c[j] - vertices[i]);
                    h * h
                })
                .sum::<f64>()
        })
        .sum())
}

/// Uniform Laplacian smoothing `p_i <- p_i + lambda (mean(ring) - p_i)`.
pub fn laplacian_smooth(mesh: &TriMesh, iterations: usize, lambda: f64) -> Result<Vec<Vec3>> {
    check_step("laplacian lambda", lambda)?;
    let ring = mesh.vertex_neighbors();
    let mut p = mesh.vertices().to_vec();
    for _ in 0..iterations {
        p = map_indices(p.len(), |i| {
            let r = &ring[i];
            if r.is_empty() {
                return p[i];
            }
            let mean = r.iter().fold(Vec3::ZERO, |a, &j| a + p[j]) / r.len() as f64;
            p[i] + (mean - p[i]) * lambda
        });
    }
    Ok(p)
}

/// Output of [`denoise_two_stage`].
#[derive(Debug, Clone)]
pub struct Denoised {
    pub mesh: TriMesh,
    pub normals: NormalField,
    pub warnings: Warnings,
}

/// Normal filtering followed by the vertex update.
pub fn denoise_two_stage(mesh: &TriMesh, spec: &FilterSpec, vertex_iterations: usize, step: f64) -> Result<Denoised> {
    let normals = filter_normals(mesh, spec)?;
    let (vertices, mut warnings) = update_vertices(mesh, &normals.normals, vertex_iterations, step)?;
    warnings.merge(normals.warnings);
    Ok(Denoised {
        mesh: mesh.with_vertices(vertices)?,
        normals,
        warnings,
    })
}
