//! Point clouds: storage, neighbor queries and PCA normal estimation.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::{symmetric_eigen, Vec3};
use crate::par::map_indices;
use crate::spatial::KdTree;

/// Points with optional unit normals and a kd-tree over the points.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<Vec3>,
    normals: Option<Vec<Vec3>>,
    index: KdTree,
    diagonal: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        let index = KdTree::new(&points);
        let diagonal = bounding_diagonal(&points);
        PointCloud {
            points,
            normals: None,
            index,
            diagonal,
        }
    }

    /// Cloud with normals; each normal is normalized and must be nonzero.
    pub fn with_normals(points: Vec<Vec3>, normals: Vec<Vec3>) -> Result<Self> {
        let mut c = PointCloud::new(points);
        c.set_normals(normals)?;
        Ok(c)
    }

    pub fn set_normals(&mut self, normals: Vec<Vec3>) -> Result<()> {
        if normals.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                got: normals.len(),
            });
        }
        let mut out = Vec::with_capacity(normals.len());
        for n in normals {
            out.push(n.try_normalize(1e-300).ok_or(Error::ArgumentOutOfRange {
                what: "normal length",
                value: 0.0,
            })?);
        }
        self.normals = Some(out);
        Ok(())
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn normals(&self) -> Option<&[Vec3]> {
        self.normals.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self) -> &KdTree {
        &self.index
    }

    /// Length of the axis-aligned bounding box diagonal.
    pub fn bounding_diagonal(&self) -> f64 {
        self.diagonal
    }

    /// The `k` nearest points to point `i`, excluding `i`, sorted by distance
    /// then index.
    pub fn knn(&self, i: usize, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k >= self.points.len() {
            return Err(Error::KOutOfRange {
                k,
                count: self.points.len(),
            });
        }
        Ok(self
            .index
            .knn(self.points[i], k, Some(i))
            .into_iter()
            .map(|n| n.index)
            .collect())
    }

    /// Points within `r` of point `i` (including `i`), ascending.
    pub fn within_radius(&self, i: usize, r: f64) -> Vec<usize> {
        self.index.within_radius(self.points[i], r)
    }

    /// Mean distance from each point to its nearest neighbor.
    pub fn mean_spacing(&self) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        let d: Vec<f64> = map_indices(self.points.len(), |i| {
            self.index
                .knn(self.points[i], 1, Some(i))
                .first()
                .map_or(0.0, |n| crate::math::sqrt(n.distance_squared))
        });
        d.iter().sum::<f64>() / d.len() as f64
    }
}

fn bounding_diagonal(points: &[Vec3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    (hi - lo).norm()
}

#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    node: usize,
    parent: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // min-heap on (cost, node)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.node.cmp(&self.node))
            .then(other.parent.cmp(&self.parent))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Unoriented PCA normals: the smallest-eigenvalue eigenvector of the
/// covariance of each point's `k`-neighborhood (point included).
pub fn pca_normals_unoriented(cloud: &PointCloud, k: usize) -> Result<Vec<Vec3>> {
    if k < 3 || k >= cloud.len() {
        return Err(Error::KOutOfRange { k, count: cloud.len() });
    }
    let tol = 1e-12 * cloud.bounding_diagonal();
    let pts = cloud.points();
    let results: Vec<Result<Vec3>> = map_indices(pts.len(), |i| {
        let nbrs = cloud.index.knn(pts[i], k, Some(i));
        if nbrs.iter().all(|n| crate::math::sqrt(n.distance_squared) <= tol) {
            return Err(Error::RankDeficientNeighborhood(i));
        }
        let mut members: Vec<Vec3> = Vec::with_capacity(k + 1);
        members.push(pts[i]);
        members.extend(nbrs.iter().map(|n| pts[n.index]));
        let mean = members.iter().fold(Vec3::ZERO, |a, &b| a + b) / members.len() as f64;
        let mut c = [[0.0; 3]; 3];
        for p in &members {
            let d = *p - mean;
            for r in 0..3 {
                for s in 0..3 {
                    c[r][s] += d[r] * d[s];
                }
            }
        }
        let (_, vecs) = symmetric_eigen(c);
        Ok(vecs[0])
    });
    results.into_iter().collect()
}

/// PCA normals with orientation propagated over a minimum spanning tree of
/// the symmetric kNN graph (edge cost `1 - |n_i . n_j|`). Each connected
/// component is seeded at its highest-z point, oriented toward `+z`.
pub fn estimate_normals_pca(cloud: &PointCloud, k: usize) -> Result<Vec<Vec3>> {
    let mut normals = pca_normals_unoriented(cloud, k)?;
    let n = cloud.len();
    let pts = cloud.points();
    let mut adj: Vec<Vec<usize>> = map_indices(n, |i| {
        cloud.index.knn(pts[i], k, Some(i)).iter().map(|m| m.index).collect()
    });
    for i in 0..n {
        for idx in 0..adj[i].len() {
            let j = adj[i][idx];
            if !adj[j].contains(&i) {
                adj[j].push(i);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }

    let mut visited = vec![false; n];
    // seeds in order of decreasing z, ties by index
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by(|&a, &b| pts[b].z.total_cmp(&pts[a].z).then(a.cmp(&b)));
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        if normals[seed].z < 0.0 {
            normals[seed] = -normals[seed];
        }
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry {
            cost: 0.0,
            node: seed,
            parent: seed,
        });
        while let Some(HeapEntry { node, parent, .. }) = heap.pop() {
            if visited[node] {
                continue;
            }
            visited[node] = true;
            if node != parent && normals[node].dot(normals[parent]) < 0.0 {
                normals[node] = -normals[node];
            }
            for &j in &adj[node] {
                if !visited[j] {
                    let cost = 1.0 - normals[node].dot(normals[j]).abs();
                    heap.push(HeapEntry {
                        cost,
                        node: j,
                        parent: node,
                    });
                }
            }
        }
    }
    Ok(normals)
}

/// Flips each normal to agree in sign with the matching reference normal.
pub fn orient_toward(normals: &mut [Vec3], reference: &[Vec3]) -> Result<()> {
    if normals.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            got: normals.len(),
        });
    }
    for (n, r) in normals.iter_mut().zip(reference) {
        if n.dot(*r) < 0.0 {
            *n = -*n;
        }
    }
    Ok(())
}
