//! Vector medians over sets of unit normals.

use crate::error::{Error, Result};
use crate::math::Vec3;

fn argmin_by<F: Fn(usize) -> f64>(n: usize, cost: F) -> usize {
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for i in 0..n {
        let c = cost(i);
        // strict comparison keeps the lowest position on ties
        if c < best_cost {
            best = i;
            best_cost = c;
        }
    }
    best
}

/// Position of the member minimizing `sum_j |m - n_j|`; ties go to the
/// lowest position.
pub fn vector_median(normals: &[Vec3]) -> Result<usize> {
    if normals.is_empty() {
        return Err(Error::Empty);
    }
    Ok(argmin_by(normals.len(), |i| {
        normals.iter().map(|n| normals[i].distance(*n)).sum()
    }))
}

/// Position of the member minimizing `sum_j w_j |m - n_j|`.
pub fn weighted_vector_median(normals: &[Vec3], weights: &[f64]) -> Result<usize> {
    if normals.is_empty() {
        return Err(Error::Empty);
    }
    if weights.len() != normals.len() {
        return Err(Error::LengthMismatch {
            expected: normals.len(),
            got: weights.len(),
        });
    }
    Ok(argmin_by(normals.len(), |i| {
        normals
            .iter()
            .zip(weights)
            .map(|(n, w)| w * normals[i].distance(*n))
            .sum()
    }))
}

/// Position of the member minimizing the sum of angles to all members.
pub fn vector_directional_median(normals: &[Vec3]) -> Result<usize> {
    if normals.is_empty() {
        return Err(Error::Empty);
    }
    Ok(argmin_by(normals.len(), |i| {
        normals.iter().map(|n| normals[i].angle(*n)).sum()
    }))
}
