//! Seeded Gaussian noise in random directions.
//!
//! Point `i` draws from its own ChaCha stream (`seed`, stream `i`), so the
//! result is independent of evaluation order or thread count.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::mesh::TriMesh;
use crate::par::map_indices;

/// Displacement `m u` for point `index`: `m ~ N(0, sigma^2)` and `u`
/// uniform on the unit sphere (a normalized standard Gaussian triple).
pub fn noise_displacement(seed: u64, index: usize, sigma: f64) -> Vec3 {
    if sigma == 0.0 {
        return Vec3::ZERO;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let magnitude: f64 = StandardNormal.sample(&mut rng);
    let direction = loop {
        let g = Vec3::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        );
        if let Some(u) = g.try_normalize(1e-12) {
            break u;
        }
    };
    direction * (magnitude * sigma)
}

/// Displaces every point by [`noise_displacement`] with absolute scale `sigma`.
pub fn perturb_points(points: &[Vec3], sigma: f64, seed: u64) -> Result<Vec<Vec3>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::ArgumentOutOfRange {
            what: "noise sigma",
            value: sigma,
        });
    }
    Ok(map_indices(points.len(), |i| {
        points[i] + noise_displacement(seed, i, sigma)
    }))
}

/// Noisy copy of `mesh` with `sigma_n = sigma_factor * l_e`.
pub fn add_mesh_noise(mesh: &TriMesh, sigma_factor: f64, seed: u64) -> Result<TriMesh> {
    if !(sigma_factor >= 0.0 && sigma_factor.is_finite()) {
        return Err(Error::ArgumentOutOfRange {
            what: "noise factor",
            value: sigma_factor,
        });
    }
    let sigma = sigma_factor * mesh.mean_edge_length();
    mesh.with_vertices(perturb_points(mesh.vertices(), sigma, seed)?)
}
