//! Face-normal filtering on triangle meshes.
//!
//! One pass replaces every face normal by
//!
//! ```text
//! n_i <- normalize( sum_{j in Omega_i} g(x_ij) f(d_ij) n_j )
//! ```
//!
//! where `x_ij` is a normal-difference argument, `g` the weight of the range
//! kernel and `f` an optional spatial weight on the centroid distance
//! `d_ij`. Passes are double-buffered and neighborhoods are accumulated in
//! ascending face order, so the output does not depend on thread count.
//! The median presets and the gradient-descent mode replace the average.

mod engine;
mod median;

use alloc::format;

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelKind, MESH_BOX_FLOOR};
use crate::mesh::{NeighborhoodMode, NeighborhoodSpec};

pub use engine::{energy, filter_normals, filter_normals_from, guidance_normals, NormalField};
pub use median::{vector_directional_median, vector_median, weighted_vector_median};

/// Filtering method. Each preset pins its kernel, argument and spatial
/// weight; the generic methods accept any combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeshMethod {
    GenericUnilateral,
    GenericBilateral,
    BelyaevOhtake,
    YagouMean,
    YagouMedian,
    YagouWeightedMedian,
    YadavBox2017,
    ShenFuzzyMedian,
    TasdizenDiffusion,
    CentinSignoroni,
    ZhengBilateral,
    ZhangGuided,
    YadavTukey2018,
    GradientDescent,
}

impl MeshMethod {
    pub const ALL: [MeshMethod; 14] = [
        MeshMethod::GenericUnilateral,
        MeshMethod::GenericBilateral,
        MeshMethod::BelyaevOhtake,
        MeshMethod::YagouMean,
        MeshMethod::YagouMedian,
        MeshMethod::YagouWeightedMedian,
        MeshMethod::YadavBox2017,
        MeshMethod::ShenFuzzyMedian,
        MeshMethod::TasdizenDiffusion,
        MeshMethod::CentinSignoroni,
        MeshMethod::ZhengBilateral,
        MeshMethod::ZhangGuided,
        MeshMethod::YadavTukey2018,
        MeshMethod::GradientDescent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshMethod::GenericUnilateral => "generic-unilateral",
            MeshMethod::GenericBilateral => "generic-bilateral",
            MeshMethod::BelyaevOhtake => "belyaev-ohtake",
            MeshMethod::YagouMean => "yagou-mean",
            MeshMethod::YagouMedian => "yagou-median",
            MeshMethod::YagouWeightedMedian => "yagou-weighted-median",
            MeshMethod::YadavBox2017 => "yadav-box-2017",
            MeshMethod::ShenFuzzyMedian => "shen-fuzzy-median",
            MeshMethod::TasdizenDiffusion => "tasdizen-diffusion",
            MeshMethod::CentinSignoroni => "centin-signoroni",
            MeshMethod::ZhengBilateral => "zheng-bilateral",
            MeshMethod::ZhangGuided => "zhang-guided",
            MeshMethod::YadavTukey2018 => "yadav-tukey-2018",
            MeshMethod::GradientDescent => "gradient-descent",
        }
    }

    pub fn from_name(name: &str) -> Option<MeshMethod> {
        MeshMethod::ALL.iter().copied().find(|m| m.name() == name)
    }

    /// True when the method's argument is an angle (sigma in radians).
    pub fn uses_angle(self) -> bool {
        matches!(
            self,
            MeshMethod::BelyaevOhtake | MeshMethod::YadavBox2017 | MeshMethod::TasdizenDiffusion
        )
    }

    /// Default range scale for a unit-sized model with noise of 0.2 to 0.3
    /// `l_e`. For [`MeshMethod::BelyaevOhtake`] it is in radians per model
    /// unit.
    pub fn default_sigma(self) -> f64 {
        match self {
            MeshMethod::GenericUnilateral | MeshMethod::GenericBilateral => 0.5,
            MeshMethod::BelyaevOhtake => 5.0,
            MeshMethod::YagouMean | MeshMethod::YagouMedian => 1.0,
            MeshMethod::YagouWeightedMedian => 1.2,
            MeshMethod::YadavBox2017 => core::f64::consts::FRAC_PI_6,
            MeshMethod::ShenFuzzyMedian => 0.5,
            MeshMethod::TasdizenDiffusion => 0.7,
            MeshMethod::CentinSignoroni => 0.1,
            MeshMethod::ZhengBilateral => 0.55,
            MeshMethod::ZhangGuided => 0.5,
            MeshMethod::YadavTukey2018 => 1.1,
            MeshMethod::GradientDescent => 0.5,
        }
    }
}

/// Quantity fed to the range kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterArgument {
    /// `|n_i - n_j|`.
    EuclideanNormalDistance,
    /// `angle(n_i, n_j)` in radians.
    AngleRadians,
    /// `angle(n_i, n_j) / |c_i - c_j|`; 0 for the face itself.
    AnglePerDistance,
    /// `kappa_j * l_e`, the neighbor's mean curvature of the input mesh
    /// times the mean edge length.
    CurvatureTimesEdge,
    /// `|G_i - G_j|` on guidance normals recomputed every pass.
    GuidanceDistance,
}

impl FilterArgument {
    pub fn name(self) -> &'static str {
        match self {
            FilterArgument::EuclideanNormalDistance => "distance",
            FilterArgument::AngleRadians => "angle",
            FilterArgument::AnglePerDistance => "angle-per-distance",
            FilterArgument::CurvatureTimesEdge => "curvature",
            FilterArgument::GuidanceDistance => "guidance",
        }
    }

    pub fn from_name(name: &str) -> Option<FilterArgument> {
        [
            FilterArgument::EuclideanNormalDistance,
            FilterArgument::AngleRadians,
            FilterArgument::AnglePerDistance,
            FilterArgument::CurvatureTimesEdge,
            FilterArgument::GuidanceDistance,
        ]
        .into_iter()
        .find(|a| a.name() == name)
    }
}

/// Spatial factor `f(d_ij)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpatialWeight {
    /// `f = 1` (unilateral).
    None,
    /// `f = area(f_j)`.
    Area,
    /// `f = exp(-d^2 / (2 sigma_d^2))`.
    Gaussian,
}

impl SpatialWeight {
    pub fn name(self) -> &'static str {
        match self {
            SpatialWeight::None => "none",
            SpatialWeight::Area => "area",
            SpatialWeight::Gaussian => "gaussian",
        }
    }

    pub fn from_name(name: &str) -> Option<SpatialWeight> {
        [SpatialWeight::None, SpatialWeight::Area, SpatialWeight::Gaussian]
            .into_iter()
            .find(|a| a.name() == name)
    }
}

/// Scale of the Gaussian spatial weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialSigma {
    /// Per face: mean centroid distance from the face to its neighbors.
    Auto,
    /// Mean centroid distance over all neighbor pairs of the mesh.
    AutoGlobal,
    Fixed(f64),
}

/// Everything needed to run a normal filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub method: MeshMethod,
    pub range_kernel: Kernel,
    pub argument: FilterArgument,
    pub spatial: SpatialWeight,
    pub spatial_sigma: SpatialSigma,
    pub neighborhood: NeighborhoodSpec,
    pub iterations: usize,
    /// Step of the gradient-descent mode, in `[0, 1]`.
    pub step_lambda: f64,
    /// Guidance cutoff angle in radians, in `(0, pi]`.
    pub guidance_threshold: f64,
}

/// Default cutoff of the guidance average.
pub const DEFAULT_GUIDANCE_THRESHOLD: f64 = core::f64::consts::FRAC_PI_6;

impl FilterSpec {
    /// The preset for `method` with range scale `sigma`, 20 iterations and
    /// shared-vertex neighborhoods including the face itself.
    pub fn preset(method: MeshMethod, sigma: f64) -> Result<FilterSpec> {
        use FilterArgument as A;
        use MeshMethod as M;
        use SpatialWeight as S;
        let (kind, argument, spatial) = match method {
            M::GenericUnilateral => (KernelKind::Gaussian, A::EuclideanNormalDistance, S::None),
            M::GenericBilateral => (KernelKind::Gaussian, A::EuclideanNormalDistance, S::Gaussian),
            M::BelyaevOhtake => (KernelKind::Gaussian, A::AnglePerDistance, S::None),
            M::YagouMean => (KernelKind::L2, A::EuclideanNormalDistance, S::Area),
            M::YagouMedian => (KernelKind::L1, A::EuclideanNormalDistance, S::None),
            M::YagouWeightedMedian => (KernelKind::TruncatedL1, A::EuclideanNormalDistance, S::None),
            M::YadavBox2017 => (KernelKind::Box, A::AngleRadians, S::None),
            M::ShenFuzzyMedian => (KernelKind::Gaussian, A::EuclideanNormalDistance, S::None),
            M::TasdizenDiffusion => (KernelKind::Gaussian, A::AngleRadians, S::None),
            M::CentinSignoroni => (KernelKind::CentinRational, A::CurvatureTimesEdge, S::None),
            M::ZhengBilateral => (KernelKind::Gaussian, A::EuclideanNormalDistance, S::Gaussian),
            M::ZhangGuided => (KernelKind::Gaussian, A::GuidanceDistance, S::Gaussian),
            M::YadavTukey2018 => (KernelKind::Tukey, A::EuclideanNormalDistance, S::Gaussian),
            M::GradientDescent => (KernelKind::Gaussian, A::EuclideanNormalDistance, S::None),
        };
        let range_kernel = if kind == KernelKind::Box {
            Kernel::boxed(sigma, MESH_BOX_FLOOR)?
        } else {
            Kernel::new(kind, sigma)?
        };
        let mode = if method == M::TasdizenDiffusion {
            NeighborhoodMode::SharedEdgeRing
        } else {
            NeighborhoodMode::SharedVertexRing
        };
        let spec = FilterSpec {
            method,
            range_kernel,
            argument,
            spatial,
            spatial_sigma: SpatialSigma::Auto,
            neighborhood: NeighborhoodSpec::new(mode, true),
            iterations: 20,
            step_lambda: 0.05,
            guidance_threshold: DEFAULT_GUIDANCE_THRESHOLD,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_iterations(mut self, iterations: usize) -> Result<FilterSpec> {
        self.iterations = iterations;
        self.validate()?;
        Ok(self)
    }

    pub fn with_neighborhood(mut self, neighborhood: NeighborhoodSpec) -> Result<FilterSpec> {
        self.neighborhood = neighborhood;
        self.validate()?;
        Ok(self)
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Result<FilterSpec> {
        self.range_kernel = kernel;
        self.validate()?;
        Ok(self)
    }

    pub fn with_spatial_sigma(mut self, sigma: SpatialSigma) -> Result<FilterSpec> {
        self.spatial_sigma = sigma;
        self.validate()?;
        Ok(self)
    }

    pub fn with_step(mut self, lambda: f64) -> Result<FilterSpec> {
        self.step_lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    /// Checks ranges and the combinations pinned by the method.
    pub fn validate(&self) -> Result<()> {
        use FilterArgument as A;
        use MeshMethod as M;
        use SpatialWeight as S;
        self.neighborhood.validate()?;
        if self.iterations == 0 {
            return Err(Error::InvalidSpec("iterations must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.step_lambda) {
            return Err(Error::ArgumentOutOfRange {
                what: "gradient step lambda",
                value: self.step_lambda,
            });
        }
        let t = self.guidance_threshold;
        if !(t > 0.0 && t <= core::f64::consts::PI) {
            return Err(Error::ArgumentOutOfRange {
                what: "guidance threshold",
                value: t,
            });
        }
        if let SpatialSigma::Fixed(s) = self.spatial_sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::ArgumentOutOfRange {
                    what: "spatial sigma",
                    value: s,
                });
            }
        }
        let pinned: Option<(KernelKind, A, S)> = match self.method {
            M::GenericUnilateral => {
                if self.spatial == S::Gaussian {
                    return Err(self.mismatch("spatial weight none or area"));
                }
                None
            }
            M::GenericBilateral => {
                if self.spatial != S::Gaussian {
                    return Err(self.mismatch("gaussian spatial weight"));
                }
                None
            }
            M::BelyaevOhtake => Some((KernelKind::Gaussian, A::AnglePerDistance, S::None)),
            M::YagouMean => Some((KernelKind::L2, A::EuclideanNormalDistance, S::Area)),
            M::YagouMedian => Some((KernelKind::L1, A::EuclideanNormalDistance, S::None)),
            M::YagouWeightedMedian => Some((KernelKind::TruncatedL1, A::EuclideanNormalDistance, S::None)),
            M::YadavBox2017 => Some((KernelKind::Box, A::AngleRadians, S::None)),
            M::ShenFuzzyMedian => Some((KernelKind::Gaussian, A::EuclideanNormalDistance, S::None)),
            M::TasdizenDiffusion => Some((KernelKind::Gaussian, A::AngleRadians, S::None)),
            M::CentinSignoroni => Some((KernelKind::CentinRational, A::CurvatureTimesEdge, S::None)),
            M::ZhengBilateral => Some((KernelKind::Gaussian, A::EuclideanNormalDistance, S::Gaussian)),
            M::ZhangGuided => Some((KernelKind::Gaussian, A::GuidanceDistance, S::Gaussian)),
            M::YadavTukey2018 => Some((KernelKind::Tukey, A::EuclideanNormalDistance, S::Gaussian)),
            M::GradientDescent => {
                if self.range_kernel.kind().undefined_at_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "gradient descent needs a differentiable kernel, got {}",
                        self.range_kernel.kind().name()
                    )));
                }
                if self.argument != A::EuclideanNormalDistance || self.spatial != S::None {
                    return Err(self.mismatch("distance argument without spatial weight"));
                }
                None
            }
        };
        if let Some((kind, argument, spatial)) = pinned {
            if self.range_kernel.kind() != kind || self.argument != argument || self.spatial != spatial {
                return Err(self.mismatch(&format!(
                    "kernel {}, argument {}, spatial {}",
                    kind.name(),
                    argument.name(),
                    spatial.name()
                )));
            }
        }
        Ok(())
    }

    fn mismatch(&self, expected: &str) -> Error {
        Error::InvalidSpec(format!("method {} requires {expected}", self.method.name()))
    }
}
