//! Normal filters and position updates on point sets.
//!
//! Normals are averaged over neighborhoods that include the point itself.
//! The spatial weight is `exp(-d^2 / sigma_d^2)` and the range weight the
//! Gaussian (or box) kernel on a per-method normal difference.

use alloc::format;
use alloc::vec::Vec;

use crate::bench::Warnings;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::math::{exp, sqrt, Vec3};
use crate::par::map_indices;
use crate::spatial::KdTree;

const ZERO_WEIGHT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointMethod {
    /// Gaussian on the normal angle and on distance.
    LiBilateral,
    /// Gaussian on the distance between guidance normals and on distance.
    ZhengGuidedPC,
    /// Normals are kept; only positions move.
    DigneBilateral,
    /// Gaussian on `|n_i - n_j|` and on distance.
    ZhengRolling,
    /// Box of floor 0 on the normal angle, no spatial weight.
    YadavVNVT,
}

impl PointMethod {
    pub const ALL: [PointMethod; 5] = [
        PointMethod::LiBilateral,
        PointMethod::ZhengGuidedPC,
        PointMethod::DigneBilateral,
        PointMethod::ZhengRolling,
        PointMethod::YadavVNVT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PointMethod::LiBilateral => "li-bilateral",
            PointMethod::ZhengGuidedPC => "zheng-guided-pc",
            PointMethod::DigneBilateral => "digne-bilateral",
            PointMethod::ZhengRolling => "zheng-rolling",
            PointMethod::YadavVNVT => "yadav-vnvt",
        }
    }

    pub fn from_name(name: &str) -> Option<PointMethod> {
        PointMethod::ALL.iter().copied().find(|m| m.name() == name)
    }

    /// True when sigma is an angle in radians.
    pub fn uses_angle(self) -> bool {
        matches!(self, PointMethod::LiBilateral | PointMethod::YadavVNVT)
    }

    pub fn default_sigma(self) -> PointSigma {
        match self {
            PointMethod::LiBilateral | PointMethod::DigneBilateral => PointSigma::Auto,
            PointMethod::YadavVNVT => PointSigma::Fixed(core::f64::consts::FRAC_PI_6),
            _ => PointSigma::Fixed(0.35),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointNeighborhood {
    /// The point and its `k` nearest neighbors.
    Knn(usize),
    /// Every point within the radius, the point included.
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointSigma {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFilterSpec {
    pub method: PointMethod,
    pub sigma: PointSigma,
    pub sigma_d: PointSigma,
    pub neighborhood: PointNeighborhood,
    pub iterations: usize,
}

impl PointFilterSpec {
    /// The preset with its default sigma, automatic `sigma_d`, 10 nearest
    /// neighbors and 10 iterations.
    pub fn preset(method: PointMethod) -> PointFilterSpec {
        PointFilterSpec {
            method,
            sigma: method.default_sigma(),
            sigma_d: PointSigma::Auto,
            neighborhood: PointNeighborhood::Knn(10),
            iterations: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidSpec("iterations must be positive".into()));
        }
        for (what, s) in [("sigma", self.sigma), ("sigma_d", self.sigma_d)] {
            if let PointSigma::Fixed(v) = s {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::ArgumentOutOfRange { what, value: v });
                }
            }
        }
        if self.sigma == PointSigma::Auto
            && !matches!(self.method, PointMethod::LiBilateral | PointMethod::DigneBilateral)
        {
            return Err(Error::InvalidSpec(format!(
                "method {} needs an explicit sigma",
                self.method.name()
            )));
        }
        match self.neighborhood {
            PointNeighborhood::Knn(0) => Err(Error::KOutOfRange { k: 0, count: 0 }),
            PointNeighborhood::Radius(r) if !(r > 0.0 && r.is_finite()) => Err(Error::ArgumentOutOfRange {
                what: "neighborhood radius",
                value: r,
            }),
            _ => Ok(()),
        }
    }
}

/// Neighborhood radius heuristic `l * sqrt(20 / |P|)` with `l` the bounding
/// box diagonal.
pub fn digne_default_radius(cloud: &PointCloud) -> f64 {
    if cloud.is_empty() {
        return 0.0;
    }
    cloud.bounding_diagonal() * sqrt(20.0 / cloud.len() as f64)
}

/// Neighbors of every point, the point included, ascending by index.
fn neighborhoods(tree: &KdTree, hood: PointNeighborhood) -> Result<Vec<Vec<usize>>> {
    let pts = tree.points();
    if let PointNeighborhood::Knn(k) = hood {
        if k >= pts.len() {
            return Err(Error::KOutOfRange { k, count: pts.len() });
        }
    }
    Ok(map_indices(pts.len(), |i| match hood {
        PointNeighborhood::Knn(k) => {
            let mut v: Vec<usize> = tree.knn(pts[i], k, Some(i)).into_iter().map(|n| n.index).collect();
            v.push(i);
            v.sort_unstable();
            v
        }
        PointNeighborhood::Radius(r) => tree.within_radius(pts[i], r),
    }))
}

fn mean_neighbor_distance(points: &[Vec3], nb: &[Vec<usize>]) -> f64 {
    let (sum, n) = nb.iter().enumerate().fold((0.0, 0usize), |(s, n), (i, l)| {
        let others = l.iter().filter(|&&j| j != i);
        others.fold((s, n), |(s, n), &j| (s + points[i].distance(points[j]), n + 1))
    });
    if n > 0 && sum > 0.0 {
        sum / n as f64
    } else {
        1.0
    }
}

/// Per-point spatial scales.
fn spatial_sigmas(spec: &PointFilterSpec, points: &[Vec3], nb: &[Vec<usize>]) -> Vec<f64> {
    match (spec.sigma_d, spec.method) {
        (PointSigma::Fixed(s), _) => alloc::vec![s; points.len()],
        (PointSigma::Auto, PointMethod::LiBilateral) => {
            let fallback = mean_neighbor_distance(points, nb);
            (0..points.len())
                .map(|i| {
                    let r = match spec.neighborhood {
                        PointNeighborhood::Radius(r) => r,
                        PointNeighborhood::Knn(_) => {
                            nb[i].iter().map(|&j| points[i].distance(points[j])).fold(0.0, f64::max)
                        }
                    };
                    if r > 0.0 {
                        r / 2.0
                    } else {
                        fallback
                    }
                })
                .collect()
        }
        (PointSigma::Auto, _) => alloc::vec![mean_neighbor_distance(points, nb); points.len()],
    }
}

/// Population standard deviation of the normal angle over all neighbor
/// pairs; 1 when it vanishes.
fn angle_spread(normals: &[Vec3], nb: &[Vec<usize>]) -> f64 {
    let angles: Vec<f64> = nb
        .iter()
        .enumerate()
        .flat_map(|(i, l)| {
            l.iter()
                .filter(move |&&j| j != i)
                .map(move |&j| normals[i].angle(normals[j]))
        })
        .collect();
    if angles.is_empty() {
        return 1.0;
    }
    let mean = angles.iter().sum::<f64>() / angles.len() as f64;
    let var = angles.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / angles.len() as f64;
    let s = sqrt(var);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn spatial_weight(d2: f64, sigma_d: f64) -> f64 {
    exp(-d2 / (sigma_d * sigma_d))
}

/// Filtered point normals and warning counters.
#[derive(Debug, Clone, PartialEq)]
pub struct PointNormals {
    pub normals: Vec<Vec3>,
    pub warnings: Warnings,
}

/// Runs `spec.iterations` passes of the method's normal filter.
pub fn filter_point_normals(cloud: &PointCloud, spec: &PointFilterSpec) -> Result<PointNormals> {
    spec.validate()?;
    let initial = cloud.normals().ok_or(Error::MissingNormals)?;
    if spec.method == PointMethod::DigneBilateral {
        return Ok(PointNormals {
            normals: initial.to_vec(),
            warnings: Warnings::default(),
        });
    }
    let points = cloud.points();
    let nb = neighborhoods(cloud.index(), spec.neighborhood)?;
    let sigma_d = spatial_sigmas(spec, points, &nb);
    let sigma = match spec.sigma {
        PointSigma::Fixed(s) => s,
        PointSigma::Auto => angle_spread(initial, &nb),
    };
    let range = if spec.method == PointMethod::YadavVNVT {
        Kernel::boxed(sigma, 0.0)?
    } else {
        Kernel::gaussian(sigma)?
    };
    let spatial = |i: usize, j: usize| match spec.method {
        PointMethod::YadavVNVT => 1.0,
        _ => spatial_weight(points[i].distance_squared(points[j]), sigma_d[i]),
    };

    let mut normals = initial.to_vec();
    let mut warnings = Warnings::default();
    for _ in 0..spec.iterations {
        let guidance: Vec<Vec3> = if spec.method == PointMethod::ZhengGuidedPC {
            map_indices(points.len(), |i| {
                let mut g = Vec3::ZERO;
                for &j in &nb[i] {
                    g += normals[j] * spatial(i, j);
                }
                g.try_normalize(ZERO_WEIGHT_EPS).unwrap_or(normals[i])
            })
        } else {
            Vec::new()
        };
        let out: Vec<Option<Vec3>> = map_indices(points.len(), |i| {
            let mut sum = Vec3::ZERO;
            for &j in &nb[i] {
                let x = match spec.method {
                    PointMethod::LiBilateral | PointMethod::YadavVNVT => normals[i].angle(normals[j]),
                    PointMethod::ZhengGuidedPC => guidance[i].distance(guidance[j]),
                    _ => normals[i].distance(normals[j]),
                };
                sum += normals[j] * (range.weight_or(x, 0.0) * spatial(i, j));
            }
            sum.try_normalize(ZERO_WEIGHT_EPS)
        });
        let mut next = Vec::with_capacity(out.len());
        for (i, n) in out.into_iter().enumerate() {
            match n {
                Some(n) => next.push(n),
                None => {
                    warnings.zero_weight += 1;
                    next.push(normals[i]);
                }
            }
        }
        normals = next;
    }
    Ok(PointNormals { normals, warnings })
}

/// Moves points along their (fixed) normals toward their neighbors:
///
/// ```text
/// p_i <- p_i + (sum w_ij n_i.(p_j - p_i)) / (sum w_ij) n_i
/// w_ij = exp(-|p_i - p_j|^2 / sigma_d^2) g(|n_i.(p_j - p_i)|)
/// ```
///
/// with `g` Gaussian and, by default, `sigma = sigma_d = r / 3`. The
/// neighborhood excludes the point itself and the kd-tree is rebuilt every
/// iteration. An explicit `sigma`/`sigma_d` overrides the default only for
/// [`PointMethod::DigneBilateral`].
pub fn update_point_positions(
    cloud: &PointCloud,
    normals: &[Vec3],
    spec: &PointFilterSpec,
) -> Result<(Vec<Vec3>, Warnings)> {
    spec.validate()?;
    if normals.len() != cloud.len() {
        return Err(Error::LengthMismatch {
            expected: cloud.len(),
            got: normals.len(),
        });
    }
    let r = match spec.neighborhood {
        PointNeighborhood::Radius(r) => r,
        PointNeighborhood::Knn(_) => digne_default_radius(cloud),
    };
    let default = if r > 0.0 { r / 3.0 } else { 1.0 };
    let pick = |s: PointSigma| match (spec.method, s) {
        (PointMethod::DigneBilateral, PointSigma::Fixed(v)) => v,
        _ => default,
    };
    let range = Kernel::gaussian(pick(spec.sigma))?;
    let sigma_d = pick(spec.sigma_d);

    let mut points = cloud.points().to_vec();
    let mut warnings = Warnings::default();
    for _ in 0..spec.iterations {
        let tree = KdTree::new(&points);
        let nb = neighborhoods(&tree, spec.neighborhood)?;
        let moved: Vec<Option<Vec3>> = map_indices(points.len(), |i| {
            let (p, n) = (points[i], normals[i]);
            let (mut num, mut den) = (0.0, 0.0);
            for &j in nb[i].iter().filter(|&&j| j != i) {
                let h = n.dot(points[j] - p);
                let w = spatial_weight(p.distance_squared(points[j]), sigma_d) * range.weight_or(h.abs(), 0.0);
                num += w * h;
                den += w;
            }
            if den > 0.0 {
                Some(p + n * (num / den))
            } else {
                None
            }
        });
        let mut next = Vec::with_capacity(points.len());
        for (i, m) in moved.into_iter().enumerate() {
            match m {
                Some(q) => next.push(q),
                None => {
                    warnings.empty_neighborhoods += 1;
                    next.push(points[i]);
                }
            }
        }
        points = next;
    }
    Ok((points, warnings))
}
