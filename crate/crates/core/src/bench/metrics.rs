//! Quality metrics of a denoising run against ground truth.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::mesh::TriMesh;

/// Counters of recoverable per-element fallbacks during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Warnings {
    /// Face or point updates skipped because the weighted sum vanished.
    pub zero_weight: usize,
    /// Vertices without incident faces left in place by the vertex update.
    pub isolated_vertices: usize,
    /// Points without neighbors left in place by the position update.
    pub empty_neighborhoods: usize,
}

impl Warnings {
    pub fn merge(&mut self, other: Warnings) {
        self.zero_weight += other.zero_weight;
        self.isolated_vertices += other.isolated_vertices;
        self.empty_neighborhoods += other.empty_neighborhoods;
    }

    pub fn total(&self) -> usize {
        self.zero_weight + self.isolated_vertices + self.empty_neighborhoods
    }
}

/// Comparison of a candidate surface with its ground truth.
///
/// Volumes are `volume_before` for the ground truth and `volume_after` for
/// the candidate; for point clouds they are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mean_angular_error_deg: f64,
    pub max_angular_error_deg: f64,
    /// Mean angular error over faces touching a ground-truth feature edge
    /// (NaN when there are none).
    pub feature_mean_angular_error_deg: f64,
    pub mean_vertex_distance: f64,
    pub volume_before: f64,
    pub volume_after: f64,
    /// `(after - before) / before`; NaN when the ground truth has no volume.
    pub relative_volume_change: f64,
    /// Feature edges detected on the candidate.
    pub feature_edge_count: usize,
    /// Feature edges detected on the ground truth.
    pub truth_feature_edge_count: usize,
    pub warnings: Warnings,
}

fn angle_stats(truth: &[Vec3], candidate: &[Vec3]) -> (Vec<f64>, f64, f64) {
    let errs: Vec<f64> = truth
        .iter()
        .zip(candidate)
        .map(|(a, b)| a.angle(*b).to_degrees())
        .collect();
    let mean = if errs.is_empty() {
        0.0
    } else {
        errs.iter().sum::<f64>() / errs.len() as f64
    };
    let max = errs.iter().copied().fold(0.0, f64::max);
    (errs, mean, max)
}

fn mean_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(p, q)| p.distance(*q)).sum::<f64>() / a.len() as f64
}

/// Faces incident to at least one edge of `edges`.
pub fn faces_adjacent_to_edges(mesh: &TriMesh, edges: &[[usize; 2]]) -> Vec<usize> {
    let wanted: BTreeSet<[usize; 2]> = edges.iter().copied().collect();
    let mut faces: BTreeSet<usize> = BTreeSet::new();
    for e in mesh.edges() {
        if wanted.contains(&e.vertices) {
            faces.extend(e.faces.iter().copied());
        }
    }
    faces.into_iter().collect()
}

/// Compares two meshes with identical connectivity.
pub fn compare(truth: &TriMesh, candidate: &TriMesh, feature_threshold_deg: f64) -> Result<MetricsReport> {
    if truth.faces() != candidate.faces() || truth.num_vertices() != candidate.num_vertices() {
        return Err(Error::ConnectivityMismatch);
    }
    let (errs, mean, max) = angle_stats(truth.face_normals(), candidate.face_normals());
    let truth_features = truth.dihedral_feature_edges(feature_threshold_deg)?;
    let feature_faces = faces_adjacent_to_edges(truth, &truth_features);
    let feature_mean = if feature_faces.is_empty() {
        f64::NAN
    } else {
        feature_faces.iter().map(|&f| errs[f]).sum::<f64>() / feature_faces.len() as f64
    };
    let before = truth.volume();
    let after = candidate.volume();
    let relative = if before.abs() > 0.0 {
        (after - before) / before
    } else {
        f64::NAN
    };
    Ok(MetricsReport {
        mean_angular_error_deg: mean,
        max_angular_error_deg: max,
        feature_mean_angular_error_deg: feature_mean,
        mean_vertex_distance: mean_distance(truth.vertices(), candidate.vertices()),
        volume_before: before,
        volume_after: after,
        relative_volume_change: relative,
        feature_edge_count: candidate.dihedral_feature_edges(feature_threshold_deg)?.len(),
        truth_feature_edge_count: truth_features.len(),
        warnings: Warnings::default(),
    })
}

/// Compares two point clouds of equal size, point by point.
pub fn compare_clouds(
    truth_points: &[Vec3],
    truth_normals: &[Vec3],
    points: &[Vec3],
    normals: &[Vec3],
) -> Result<MetricsReport> {
    for (expected, got) in [
        (truth_points.len(), points.len()),
        (truth_points.len(), truth_normals.len()),
        (truth_points.len(), normals.len()),
    ] {
        if expected != got {
            return Err(Error::LengthMismatch { expected, got });
        }
    }
    let (_, mean, max) = angle_stats(truth_normals, normals);
    Ok(MetricsReport {
        mean_angular_error_deg: mean,
        max_angular_error_deg: max,
        feature_mean_angular_error_deg: f64::NAN,
        mean_vertex_distance: mean_distance(truth_points, points),
        volume_before: 0.0,
        volume_after: 0.0,
        relative_volume_change: f64::NAN,
        feature_edge_count: 0,
        truth_feature_edge_count: 0,
        warnings: Warnings::default(),
    })
}
