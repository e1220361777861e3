use alloc::vec::Vec;

use super::median::{vector_directional_median, vector_median, weighted_vector_median};
use super::{FilterArgument, FilterSpec, MeshMethod, SpatialSigma, SpatialWeight};
use crate::bench::Warnings;
use crate::error::{Error, Result};
use crate::math::{exp, Vec3};
use crate::mesh::{NeighborhoodSpec, TriMesh};
use crate::par::map_indices;

/// Weighted sums shorter than this keep the previous normal.
pub const ZERO_WEIGHT_EPS: f64 = 1e-12;

/// Filtered per-face unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    pub normals: Vec<Vec3>,
    /// Passes applied.
    pub iterations: usize,
    pub warnings: Warnings,
}

struct Context<'a> {
    mesh: &'a TriMesh,
    spec: &'a FilterSpec,
    neighbors: Vec<Vec<usize>>,
    sigma_d: Vec<f64>,
    curvature_arg: Vec<f64>,
}

fn with_self(mut list: Vec<usize>, i: usize) -> Vec<usize> {
    if let Err(pos) = list.binary_search(&i) {
        list.insert(pos, i);
    }
    list
}

impl<'a> Context<'a> {
    fn new(mesh: &'a TriMesh, spec: &'a FilterSpec) -> Result<Self> {
        spec.validate()?;
        let mut neighbors = mesh.all_face_neighbors(&spec.neighborhood)?;
        if matches!(
            spec.method,
            MeshMethod::YagouMedian | MeshMethod::YagouWeightedMedian | MeshMethod::ShenFuzzyMedian
        ) {
            neighbors = neighbors
                .into_iter()
                .enumerate()
                .map(|(i, l)| with_self(l, i))
                .collect();
        }
        let sigma_d = if spec.spatial == SpatialWeight::Gaussian {
            spatial_sigmas(mesh, &neighbors, spec.spatial_sigma)
        } else {
            Vec::new()
        };
        let curvature_arg = if spec.argument == FilterArgument::CurvatureTimesEdge {
            let l = mesh.mean_edge_length();
            mesh.face_mean_curvature()?.into_iter().map(|k| k * l).collect()
        } else {
            Vec::new()
        };
        Ok(Context {
            mesh,
            spec,
            neighbors,
            sigma_d,
            curvature_arg,
        })
    }

    fn spatial(&self, i: usize, j: usize) -> f64 {
        match self.spec.spatial {
            SpatialWeight::None => 1.0,
            SpatialWeight::Area => self.mesh.face_areas()[j],
            SpatialWeight::Gaussian => {
                let c = self.mesh.face_centroids();
                let s = self.sigma_d[i];
                exp(-c[i].distance_squared(c[j]) / (2.0 * s * s))
            }
        }
    }

    fn argument(&self, i: usize, j: usize, normals: &[Vec3], guidance: &[Vec3]) -> f64 {
        match self.spec.argument {
            FilterArgument::EuclideanNormalDistance => normals[i].distance(normals[j]),
            FilterArgument::AngleRadians => normals[i].angle(normals[j]),
            FilterArgument::AnglePerDistance => {
                if i == j {
                    return 0.0;
                }
                let a = normals[i].angle(normals[j]);
                let c = self.mesh.face_centroids();
                let d = c[i].distance(c[j]);
                if d > 0.0 {
                    a / d
                } else if a == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            FilterArgument::CurvatureTimesEdge => self.curvature_arg[j],
            FilterArgument::GuidanceDistance => guidance[i].distance(guidance[j]),
        }
    }

    fn guidance(&self, normals: &[Vec3]) -> Vec<Vec3> {
        if self.spec.argument != FilterArgument::GuidanceDistance {
            return Vec::new();
        }
        guidance_from(self.mesh, &self.neighbors, normals, self.spec.guidance_threshold)
    }

    /// One pass; returns new normals and the count of zero-weight faces.
    fn pass(&self, normals: &[Vec3]) -> (Vec<Vec3>, usize) {
        let guidance = self.guidance(normals);
        let out: Vec<(Vec3, bool)> = map_indices(normals.len(), |i| {
            let updated = match self.spec.method {
                MeshMethod::YagouMedian => self.median(i, normals),
                MeshMethod::YagouWeightedMedian => self.weighted_median(i, normals),
                MeshMethod::ShenFuzzyMedian => self.shen(i, normals),
                MeshMethod::GradientDescent => self.descent(i, normals),
                _ => self.average(i, normals, &guidance),
            };
            match updated {
                Some(n) => (n, false),
                None => (normals[i], true),
            }
        });
        let warnings = out.iter().filter(|(_, w)| *w).count();
        (out.into_iter().map(|(n, _)| n).collect(), warnings)
    }

    fn average(&self, i: usize, normals: &[Vec3], guidance: &[Vec3]) -> Option<Vec3> {
        let nb = &self.neighbors[i];
        let raw: Vec<Option<f64>> = nb
            .iter()
            .map(|&j| self.spec.range_kernel.weight(self.argument(i, j, normals, guidance)))
            .collect();
        let weights = substitute_undefined(&raw);
        let mut sum = Vec3::ZERO;
        for (&j, w) in nb.iter().zip(weights) {
            sum += normals[j] * (w * self.spatial(i, j));
        }
        sum.try_normalize(ZERO_WEIGHT_EPS)
    }

    fn median(&self, i: usize, normals: &[Vec3]) -> Option<Vec3> {
        let set: Vec<Vec3> = self.neighbors[i].iter().map(|&j| normals[j]).collect();
        vector_median(&set).ok().map(|p| set[p])
    }

    fn weighted_median(&self, i: usize, normals: &[Vec3]) -> Option<Vec3> {
        let nb = &self.neighbors[i];
        let set: Vec<Vec3> = nb.iter().map(|&j| normals[j]).collect();
        let raw: Vec<Option<f64>> = set
            .iter()
            .map(|n| self.spec.range_kernel.weight(normals[i].distance(*n)))
            .collect();
        let weights = substitute_undefined(&raw);
        weighted_vector_median(&set, &weights).ok().map(|p| set[p])
    }

    fn shen(&self, i: usize, normals: &[Vec3]) -> Option<Vec3> {
        let nb = &self.neighbors[i];
        let set: Vec<Vec3> = nb.iter().map(|&j| normals[j]).collect();
        let vd = set[vector_directional_median(&set).ok()?];
        let mut sum = Vec3::ZERO;
        for n in &set {
            sum += *n * self.spec.range_kernel.weight_or(n.distance(vd), 0.0);
        }
        sum.try_normalize(ZERO_WEIGHT_EPS)
    }

    fn descent(&self, i: usize, normals: &[Vec3]) -> Option<Vec3> {
        let ni = normals[i];
        let mut step = Vec3::ZERO;
        for &j in &self.neighbors[i] {
            let d = normals[j] - ni;
            let x = d.norm();
            if x > 0.0 {
                let psi = self.spec.range_kernel.psi(x).unwrap_or(0.0);
                step += d * (psi / x);
            }
        }
        (ni + step * self.spec.step_lambda).try_normalize(ZERO_WEIGHT_EPS)
    }
}

/// Replaces undefined weights (L1 family at `x = 0`) by the largest finite
/// weight of the neighborhood, or 1 when no weight is positive.
fn substitute_undefined(raw: &[Option<f64>]) -> Vec<f64> {
    if raw.iter().all(Option::is_some) {
        return raw.iter().map(|w| w.unwrap_or(0.0)).collect();
    }
    let max = raw
        .iter()
        .flatten()
        .copied()
        .filter(|w| w.is_finite())
        .fold(0.0, f64::max);
    let fill = if max > 0.0 { max } else { 1.0 };
    raw.iter().map(|w| w.unwrap_or(fill)).collect()
}

fn spatial_sigmas(mesh: &TriMesh, neighbors: &[Vec<usize>], mode: SpatialSigma) -> Vec<f64> {
    let c = mesh.face_centroids();
    let per_face: Vec<(f64, usize)> = neighbors
        .iter()
        .enumerate()
        .map(|(i, nb)| {
            let others = nb.iter().filter(|&&j| j != i);
            let (sum, count) = others.fold((0.0, 0usize), |(s, n), &j| (s + c[i].distance(c[j]), n + 1));
            (sum, count)
        })
        .collect();
    let (total, pairs) = per_face.iter().fold((0.0, 0usize), |(s, n), &(a, b)| (s + a, n + b));
    let global = if pairs > 0 && total > 0.0 {
        total / pairs as f64
    } else {
        1.0
    };
    match mode {
        SpatialSigma::Fixed(s) => alloc::vec![s; neighbors.len()],
        SpatialSigma::AutoGlobal => alloc::vec![global; neighbors.len()],
        SpatialSigma::Auto => per_face
            .into_iter()
            .map(|(sum, n)| if n > 0 && sum > 0.0 { sum / n as f64 } else { global })
            .collect(),
    }
}

fn guidance_from(mesh: &TriMesh, neighbors: &[Vec<usize>], normals: &[Vec3], threshold: f64) -> Vec<Vec3> {
    let areas = mesh.face_areas();
    map_indices(normals.len(), |i| {
        let ni = normals[i];
        let mut sum = Vec3::ZERO;
        let mut self_seen = false;
        for &j in &neighbors[i] {
            self_seen |= j == i;
            if j == i || ni.angle(normals[j]) < threshold {
                sum += normals[j] * areas[j];
            }
        }
        if !self_seen {
            sum += ni * areas[i];
        }
        sum.try_normalize(ZERO_WEIGHT_EPS).unwrap_or(ni)
    })
}

fn unit_normals(normals: &[Vec3]) -> Result<Vec<Vec3>> {
    normals
        .iter()
        .map(|n| {
            n.try_normalize(ZERO_WEIGHT_EPS).ok_or(Error::ArgumentOutOfRange {
                what: "normal length",
                value: n.norm(),
            })
        })
        .collect()
}

/// Runs `spec.iterations` passes starting from the mesh's face normals.
pub fn filter_normals(mesh: &TriMesh, spec: &FilterSpec) -> Result<NormalField> {
    filter_normals_from(mesh, mesh.face_normals(), spec)
}

/// Runs `spec.iterations` passes starting from `initial` normals; geometry
/// (centroids, areas, curvature) comes from `mesh`.
pub fn filter_normals_from(mesh: &TriMesh, initial: &[Vec3], spec: &FilterSpec) -> Result<NormalField> {
    if initial.len() != mesh.num_faces() {
        return Err(Error::LengthMismatch {
            expected: mesh.num_faces(),
            got: initial.len(),
        });
    }
    let ctx = Context::new(mesh, spec)?;
    let mut normals = unit_normals(initial)?;
    let mut warnings = Warnings::default();
    for _ in 0..spec.iterations {
        let (next, zero) = ctx.pass(&normals);
        warnings.zero_weight += zero;
        normals = next;
    }
    Ok(NormalField {
        normals,
        iterations: spec.iterations,
        warnings,
    })
}

/// Guidance normals: the area-weighted mean of the normals in the
/// neighborhood (plus the face itself) within `angle_threshold` of the
/// face's normal.
pub fn guidance_normals(mesh: &TriMesh, neighborhood: &NeighborhoodSpec, angle_threshold: f64) -> Result<NormalField> {
    if !(angle_threshold > 0.0 && angle_threshold <= core::f64::consts::PI) {
        return Err(Error::ArgumentOutOfRange {
            what: "guidance threshold",
            value: angle_threshold,
        });
    }
    let neighbors = mesh.all_face_neighbors(neighborhood)?;
    Ok(NormalField {
        normals: guidance_from(mesh, &neighbors, mesh.face_normals(), angle_threshold),
        iterations: 0,
        warnings: Warnings::default(),
    })
}

/// `sum_i sum_{j in Omega_i} rho(x_ij) f(d_ij)` for the given field.
pub fn energy(mesh: &TriMesh, normals: &[Vec3], spec: &FilterSpec) -> Result<f64> {
    if normals.len() != mesh.num_faces() {
        return Err(Error::LengthMismatch {
            expected: mesh.num_faces(),
            got: normals.len(),
        });
    }
    let ctx = Context::new(mesh, spec)?;
    let guidance = ctx.guidance(normals);
    let per_face: Vec<f64> = map_indices(normals.len(), |i| {
        ctx.neighbors[i]
            .iter()
            .map(|&j| ctx.spec.range_kernel.rho(ctx.argument(i, j, normals, &guidance)) * ctx.spatial(i, j))
            .sum()
    });
    Ok(per_face.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{add_mesh_noise, make_shape, ShapeKind};
    use crate::kernels::{Kernel, KernelKind};
    use crate::math::{exp, Mat3};
    use crate::mesh::NeighborhoodMode;
    use alloc::vec;

    fn two_faces(tilt: Vec3) -> (TriMesh, Vec<Vec3>) {
        // two faces sharing an edge; normals supplied explicitly
        let m = TriMesh::new(
            vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::new(1.0, 1.0, 0.0)],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        (m, vec![Vec3::Z, tilt])
    }

    #[test]
    fn hand_evaluated_single_neighbor() {
        let (m, n) = two_faces(Vec3::X);
        let spec = FilterSpec::preset(MeshMethod::GenericUnilateral, 1.0)
            .unwrap()
            .with_iterations(1)
            .unwrap();
        let out = filter_normals_from(&m, &n, &spec).unwrap();
        let w0 = 2.0;
        let w1 = 2.0 * exp(-2.0);
        let expected = Vec3::new(w1, 0.0, w0) / libm::sqrt(w0 * w0 + w1 * w1);
        assert!((out.normals[0] - expected).norm() < 1e-15);
        assert!((out.normals[0].x - 0.13411).abs() < 1e-5);
        assert!((out.normals[0].z - 0.99097).abs() < 1e-5);
    }

    #[test]
    fn constant_field_is_fixed_for_every_method() {
        let m = make_shape(ShapeKind::Plane(5), 1.0).unwrap();
        for method in MeshMethod::ALL {
            let spec = FilterSpec::preset(method, method.default_sigma()).unwrap();
            let out = filter_normals(&m, &spec).unwrap();
            for n in &out.normals {
                assert!((*n - Vec3::Z).norm() < 1e-12, "{}", method.name());
            }
            assert_eq!(out.warnings.zero_weight, 0);
        }
    }

    #[test]
    fn yagou_mean_is_generic_l2_with_area() {
        let m = add_mesh_noise(&make_shape(ShapeKind::Cube(4), 1.0).unwrap(), 0.2, 3).unwrap();
        let a = filter_normals(&m, &FilterSpec::preset(MeshMethod::YagouMean, 1.0).unwrap()).unwrap();
        let mut g = FilterSpec::preset(MeshMethod::GenericUnilateral, 1.0).unwrap();
        g.range_kernel = Kernel::new(KernelKind::L2, 1.0).unwrap();
        g.spatial = SpatialWeight::Area;
        let b = filter_normals(&m, &g).unwrap();
        assert_eq!(a.normals, b.normals);
    }

    #[test]
    fn box_floor_weight_beyond_sigma() {
        let (m, n) = two_faces(Vec3::X);
        let spec = FilterSpec::preset(MeshMethod::YadavBox2017, 0.5)
            .unwrap()
            .with_iterations(1)
            .unwrap();
        let out = filter_normals_from(&m, &n, &spec).unwrap();
        let expected = (Vec3::Z + Vec3::X * 0.1).try_normalize(0.0).unwrap();
        assert!((out.normals[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn zero_weight_keeps_previous() {
        // Tukey with tiny sigma gives zero weight to the neighbor; excluding
        // self leaves nothing to average
        let (m, n) = two_faces(Vec3::X);
        let mut spec = FilterSpec::preset(MeshMethod::GenericUnilateral, 0.01)
            .unwrap()
            .with_iterations(1)
            .unwrap();
        spec.range_kernel = Kernel::new(KernelKind::Tukey, 0.01).unwrap();
        spec.neighborhood = NeighborhoodSpec::new(NeighborhoodMode::SharedEdgeRing, false);
        let out = filter_normals_from(&m, &n, &spec).unwrap();
        assert_eq!(out.normals, n);
        assert_eq!(out.warnings.zero_weight, 2);
    }

    #[test]
    fn l1_self_weight_dominates() {
        let (m, n) = two_faces(Vec3::new(1.0, 0.0, 1.0));
        let mut spec = FilterSpec::preset(MeshMethod::GenericUnilateral, 1.0)
            .unwrap()
            .with_iterations(1)
            .unwrap();
        spec.range_kernel = Kernel::new(KernelKind::L1, 1.0).unwrap();
        let out = filter_normals_from(&m, &n, &spec).unwrap();
        // self takes the neighbor's weight, so the result is the bisector
        let expected = (Vec3::Z + n[1].try_normalize(0.0).unwrap()).try_normalize(0.0).unwrap();
        assert!((out.normals[0] - expected).norm() < 1e-12);
    }

    #[test]
    fn symmetric_pair_averages_to_center() {
        let t = 0.4f64;
        let m = TriMesh::new(
            vec![
                Vec3::new(-1.0, 0.0, 0.0),
                Vec3::ZERO,
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(2.0, 1.0, 0.0),
            ],
            vec![[0, 1, 3], [1, 2, 3], [2, 4, 3]],
        )
        .unwrap();
        let n = vec![
            Vec3::new(libm::sin(t), 0.0, libm::cos(t)),
            Vec3::Z,
            Vec3::new(-libm::sin(t), 0.0, libm::cos(t)),
        ];
        let mut spec = FilterSpec::preset(MeshMethod::GenericUnilateral, 1.0)
            .unwrap()
            .with_iterations(1)
            .unwrap();
        spec.neighborhood = NeighborhoodSpec::new(NeighborhoodMode::SharedEdgeRing, true);
        let out = filter_normals_from(&m, &n, &spec).unwrap();
        assert!((out.normals[1] - Vec3::Z).norm() < 1e-15);
    }

    #[test]
    fn guidance_at_cube_edge_stays_on_its_side() {
        let m = make_shape(ShapeKind::Cube(4), 1.0).unwrap();
        let nb = NeighborhoodSpec::new(NeighborhoodMode::SharedVertexRing, true);
        let g = guidance_normals(&m, &nb, 70f64.to_radians()).unwrap();
        for (a, b) in g.normals.iter().zip(m.face_normals()) {
            assert!((*a - *b).norm() < 1e-12);
        }
        let plain = guidance_normals(&m, &nb, core::f64::consts::PI).unwrap();
        let moved = plain
            .normals
            .iter()
            .zip(m.face_normals())
            .filter(|(a, b)| (**a - **b).norm() > 1e-6)
            .count();
        assert!(moved > 0);
    }

    #[test]
    fn pair_energy_is_twice_rho() {
        let (m, n) = two_faces(Vec3::X);
        let mut spec = FilterSpec::preset(MeshMethod::GenericUnilateral, 1.0).unwrap();
        spec.neighborhood = NeighborhoodSpec::new(NeighborhoodMode::SharedEdgeRing, false);
        let e = energy(&m, &n, &spec).unwrap();
        assert!((e - 2.0 * spec.range_kernel.rho(libm::sqrt(2.0))).abs() < 1e-15);
        assert_eq!(energy(&m, &[Vec3::Z, Vec3::Z], &spec).unwrap(), 0.0);
    }

    #[test]
    fn gradient_descent_zero_step_is_identity() {
        let m = add_mesh_noise(&make_shape(ShapeKind::Cube(3), 1.0).unwrap(), 0.2, 9).unwrap();
        let spec = FilterSpec::preset(MeshMethod::GradientDescent, 1.0)
            .unwrap()
            .with_step(0.0)
            .unwrap();
        let out = filter_normals(&m, &spec).unwrap();
        for (a, b) in out.normals.iter().zip(m.face_normals()) {
            assert!((*a - *b).norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_equivariance_of_zheng() {
        let m = add_mesh_noise(&make_shape(ShapeKind::Cube(4), 1.0).unwrap(), 0.1, 42).unwrap();
        let r = Mat3::rotation(Vec3::new(1.0, 2.0, 0.5), 0.9);
        let rm = m
            .with_vertices(m.vertices().iter().map(|&p| r.apply(p)).collect())
            .unwrap();
        let spec = FilterSpec::preset(MeshMethod::ZhengBilateral, 0.35).unwrap();
        let a = filter_normals(&m, &spec).unwrap();
        let b = filter_normals(&rm, &spec).unwrap();
        for (x, y) in a.normals.iter().zip(&b.normals) {
            assert!(r.apply(*x).angle(*y) < 1e-9);
        }
    }
}
