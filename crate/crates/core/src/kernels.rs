//! M-estimator kernels as `(rho, psi, g)` triples.
//!
//! For a residual `x >= 0` each kernel exposes
//!
//! - the error norm `rho(x)`,
//! - the influence function `psi(x) = rho'(x)`,
//! - the anisotropic weight `g(x) = psi(x) / x`, the factor actually used
//!   when averaging normals.
//!
//! Constant factors follow the closed forms of the classic estimator table
//! (so the Gaussian weight is `2/sigma^2 * exp(-x^2/sigma^2)`, not
//! `exp(-x^2/sigma^2)`). Filters normalize their weighted sums, so a common
//! factor never changes a filtered normal, but absolute weights are not
//! comparable across kinds.
//!
//! The `L1` and `TruncatedL1` kernels have no influence or weight at
//! `x = 0`; [`Kernel::psi`] and [`Kernel::weight`] return `None` there.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{atan, exp, ln_1p, sqrt};

/// Which estimator a [`Kernel`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    /// `rho = x^2`, independent of sigma.
    L2,
    /// `x^2` below `sqrt(sigma)`, `sigma` beyond.
    TruncatedL2,
    /// `rho = |x|`, independent of sigma.
    L1,
    /// `|x|` below sigma, `sigma` beyond.
    TruncatedL1,
    /// Huber's minimax norm, quadratic core and linear tails.
    HuberMinimax,
    Lorentzian,
    Gaussian,
    /// Tukey's biweight.
    Tukey,
    /// Box weight: 1 below sigma, `box_floor` beyond.
    Box,
    /// Rational weight `sigma^2 / ((sigma - x)^2 + sigma^2)` beyond sigma, 1 below.
    CentinRational,
}

impl KernelKind {
    pub const ALL: [KernelKind; 10] = [
        KernelKind::L2,
        KernelKind::TruncatedL2,
        KernelKind::L1,
        KernelKind::TruncatedL1,
        KernelKind::HuberMinimax,
        KernelKind::Lorentzian,
        KernelKind::Gaussian,
        KernelKind::Tukey,
        KernelKind::Box,
        KernelKind::CentinRational,
    ];

    /// Stable lowercase name used by the CLI and the spec file format.
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::L2 => "l2",
            KernelKind::TruncatedL2 => "truncated-l2",
            KernelKind::L1 => "l1",
            KernelKind::TruncatedL1 => "truncated-l1",
            KernelKind::HuberMinimax => "huber",
            KernelKind::Lorentzian => "lorentzian",
            KernelKind::Gaussian => "gaussian",
            KernelKind::Tukey => "tukey",
            KernelKind::Box => "box",
            KernelKind::CentinRational => "centin",
        }
    }

    pub fn from_name(name: &str) -> Option<KernelKind> {
        KernelKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// True for the kinds whose influence is undefined at zero.
    pub fn undefined_at_zero(self) -> bool {
        matches!(self, KernelKind::L1 | KernelKind::TruncatedL1)
    }

    /// Where the piecewise definition switches branches, if anywhere.
    pub fn breakpoint(self, sigma: f64) -> Option<f64> {
        match self {
            KernelKind::L2 | KernelKind::L1 | KernelKind::Lorentzian | KernelKind::Gaussian => None,
            KernelKind::TruncatedL2 => Some(sqrt(sigma)),
            _ => Some(sigma),
        }
    }
}

/// Default floor of the box kernel on meshes.
pub const MESH_BOX_FLOOR: f64 = 0.1;

/// An M-estimator with its scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    sigma: f64,
    box_floor: f64,
}

impl Kernel {
    /// Builds a kernel; `Box` gets the mesh floor of 0.1.
    pub fn new(kind: KernelKind, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidSigma(sigma));
        }
        Ok(Kernel {
            kind,
            sigma,
            box_floor: MESH_BOX_FLOOR,
        })
    }

    /// Box kernel with an explicit floor in `[0, 1]`.
    pub fn boxed(sigma: f64, floor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&floor) {
            return Err(Error::InvalidBoxFloor(floor));
        }
        let mut k = Kernel::new(KernelKind::Box, sigma)?;
        k.box_floor = floor;
        Ok(k)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Kernel::new(KernelKind::Gaussian, sigma)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn box_floor(&self) -> f64 {
        self.box_floor
    }

    /// Same kind and floor, different scale.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        let mut k = Kernel::new(self.kind, sigma)?;
        k.box_floor = self.box_floor;
        Ok(k)
    }

    /// Error norm `rho(x)`. Negative inputs are folded to `|x|`.
    pub fn rho(&self, x: f64) -> f64 {
        let x = x.abs();
        let s = self.sigma;
        match self.kind {
            KernelKind::L2 => x * x,
            KernelKind::TruncatedL2 => {
                if x < sqrt(s) {
                    x * x
                } else {
                    s
                }
            }
            KernelKind::L1 => x,
            KernelKind::TruncatedL1 => {
                if x < s {
                    x
                } else {
                    s
                }
            }
            KernelKind::HuberMinimax => {
                if x < s {
                    x * x / (2.0 * s) + s / 2.0
                } else {
                    x
                }
            }
            KernelKind::Lorentzian => ln_1p(0.5 * (x / s) * (x / s)),
            KernelKind::Gaussian => 1.0 - exp(-(x * x) / (s * s)),
            KernelKind::Tukey => {
                if x < s {
                    let r2 = (x / s) * (x / s);
                    r2 - r2 * r2 + r2 * r2 * r2 / 3.0
                } else {
                    1.0 / 3.0
                }
            }
            // integral of x' g(x') from 0 to x
            KernelKind::Box => {
                if x < s {
                    0.5 * x * x
                } else {
                    0.5 * s * s + 0.5 * self.box_floor * (x * x - s * s)
                }
            }
            KernelKind::CentinRational => {
                if x < s {
                    0.5 * x * x
                } else {
                    let u = (x - s) / s;
                    s * s * (0.5 + 0.5 * ln_1p(u * u) + atan(u))
                }
            }
        }
    }

    /// Influence function `psi(x) = rho'(x)`; `None` for the L1 family at zero.
    pub fn psi(&self, x: f64) -> Option<f64> {
        let x = x.abs();
        let s = self.sigma;
        let v = match self.kind {
            KernelKind::L2 => 2.0 * x,
            KernelKind::TruncatedL2 => {
                if x < sqrt(s) {
                    2.0 * x
                } else {
                    0.0
                }
            }
            KernelKind::L1 => {
                if x == 0.0 {
                    return None;
                }
                1.0
            }
            KernelKind::TruncatedL1 => {
                if x == 0.0 {
                    return None;
                }
                if x < s {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::HuberMinimax => {
                if x < s {
                    x / s
                } else {
                    1.0
                }
            }
            KernelKind::Lorentzian => 2.0 * x / (2.0 * s * s + x * x),
            KernelKind::Gaussian => 2.0 * x / (s * s) * exp(-(x * x) / (s * s)),
            KernelKind::Tukey => {
                if x < s {
                    let q = 1.0 - (x / s) * (x / s);
                    2.0 * x / (s * s) * q * q
                } else {
                    0.0
                }
            }
            KernelKind::Box => {
                if x < s {
                    x
                } else {
                    self.box_floor * x
                }
            }
            KernelKind::CentinRational => {
                if x < s {
                    x
                } else {
                    let u = x - s;
                    x * s * s / (u * u + s * s)
                }
            }
        };
        Some(v)
    }

    /// Anisotropic weight `g(x) = psi(x) / x`, with its limit at `x = 0`.
    ///
    /// Returns `None` for the L1 family at `x = 0`.
    pub fn weight(&self, x: f64) -> Option<f64> {
        let x = x.abs();
        let s = self.sigma;
        let v = match self.kind {
            KernelKind::L2 => 2.0,
            KernelKind::TruncatedL2 => {
                if x < sqrt(s) {
                    2.0
                } else {
                    0.0
                }
            }
            KernelKind::L1 => {
                if x == 0.0 {
                    return None;
                }
                1.0 / x
            }
            KernelKind::TruncatedL1 => {
                if x == 0.0 {
                    return None;
                }
                if x < s {
                    1.0 / x
                } else {
                    0.0
                }
            }
            KernelKind::HuberMinimax => {
                if x < s {
                    1.0 / s
                } else {
                    1.0 / x
                }
            }
            KernelKind::Lorentzian => 2.0 / (2.0 * s * s + x * x),
            KernelKind::Gaussian => 2.0 / (s * s) * exp(-(x * x) / (s * s)),
            KernelKind::Tukey => {
                if x < s {
                    let q = 1.0 - (x / s) * (x / s);
                    2.0 / (s * s) * q * q
                } else {
                    0.0
                }
            }
            KernelKind::Box => {
                if x < s {
                    1.0
                } else {
                    self.box_floor
                }
            }
            KernelKind::CentinRational => {
                if x < s {
                    1.0
                } else {
                    let u = x - s;
                    s * s / (u * u + s * s)
                }
            }
        };
        Some(v)
    }

    /// Weight with the L1 singularity replaced by `fallback`.
    #[inline]
    pub fn weight_or(&self, x: f64, fallback: f64) -> f64 {
        self.weight(x).unwrap_or(fallback)
    }

    /// `n` equally spaced samples of `(rho, psi, g)` on `[0, x_max]`.
    pub fn sample_table(&self, x_max: f64, n: usize) -> Result<Vec<KernelSample>> {
        if n < 2 {
            return Err(Error::ArgumentOutOfRange {
                what: "sample count",
                value: n as f64,
            });
        }
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::ArgumentOutOfRange {
                what: "x_max",
                value: x_max,
            });
        }
        let last = (n - 1) as f64;
        Ok((0..n)
            .map(|k| {
                let x = if k == n - 1 { x_max } else { x_max * k as f64 / last };
                KernelSample {
                    x,
                    rho: self.rho(x),
                    psi: self.psi(x),
                    g: self.weight(x),
                }
            })
            .collect())
    }
}

/// One row of a sampled kernel table. `None` marks an undefined value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub x: f64,
    pub rho: f64,
    pub psi: Option<f64>,
    pub g: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, PI};

    fn k(kind: KernelKind, s: f64) -> Kernel {
        Kernel::new(kind, s).unwrap()
    }

    #[test]
    fn rejects_bad_sigma() {
        assert_eq!(Kernel::new(KernelKind::Gaussian, 0.0), Err(Error::InvalidSigma(0.0)));
        assert!(Kernel::new(KernelKind::Tukey, -1.0).is_err());
        assert!(Kernel::new(KernelKind::Tukey, f64::NAN).is_err());
        assert!(Kernel::boxed(1.0, 1.5).is_err());
    }

    #[test]
    fn rho_examples() {
        let g = k(KernelKind::Gaussian, 1.0);
        assert_eq!(g.rho(0.0), 0.0);
        assert!((g.rho(1.0) - (1.0 - 1.0 / E)).abs() < 1e-15);
        assert!((g.rho(1.0) - 0.6321206).abs() < 1e-7);
        assert_eq!(k(KernelKind::Tukey, 1.0).rho(2.0), 1.0 / 3.0);
        // The closed form 0.1 (x^2 + 9 sigma^2) is twice the integral of x g(x).
        let b = Kernel::boxed(1.0, 0.1).unwrap();
        assert!((2.0 * b.rho(2.0) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let h = k(KernelKind::HuberMinimax, 1.0);
        assert_eq!(h.psi(0.5), Some(0.5));
        assert_eq!(h.psi(2.0), Some(1.0));
        let g = k(KernelKind::Gaussian, 1.0).psi(10.0).unwrap();
        let expected = 20.0 * libm::exp(-100.0);
        assert!((g - expected).abs() <= 1e-12 * expected);
        assert!((g - 7.44e-43).abs() < 1e-44);
        assert_eq!(k(KernelKind::Tukey, 1.0).psi(1.5), Some(0.0));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(k(KernelKind::Lorentzian, 1.0).weight(0.0), Some(1.0));
        assert_eq!(k(KernelKind::L1, 1.0).weight(2.0), Some(0.5));
        let b = Kernel::boxed(PI / 6.0, 0.1).unwrap();
        assert_eq!(b.weight(PI / 4.0), Some(0.1));
    }

    #[test]
    fn weight_limits_at_zero() {
        let s = 0.7;
        assert_eq!(k(KernelKind::L2, s).weight(0.0), Some(2.0));
        assert_eq!(k(KernelKind::Gaussian, s).weight(0.0), Some(2.0 / (s * s)));
        assert_eq!(k(KernelKind::Lorentzian, s).weight(0.0), Some(1.0 / (s * s)));
        assert_eq!(k(KernelKind::Tukey, s).weight(0.0), Some(2.0 / (s * s)));
        assert_eq!(k(KernelKind::HuberMinimax, s).weight(0.0), Some(1.0 / s));
        assert_eq!(k(KernelKind::Box, s).weight(0.0), Some(1.0));
        assert_eq!(k(KernelKind::CentinRational, s).weight(0.0), Some(1.0));
        assert_eq!(k(KernelKind::L1, s).weight(0.0), None);
        assert_eq!(k(KernelKind::TruncatedL1, s).weight(0.0), None);
        assert_eq!(k(KernelKind::L1, s).psi(0.0), None);
        assert_eq!(k(KernelKind::TruncatedL1, s).psi(0.0), None);
    }

    #[test]
    fn truncated_l2_threshold_is_sqrt_sigma() {
        let t = k(KernelKind::TruncatedL2, 0.25);
        assert_eq!(t.rho(0.4), 0.4 * 0.4);
        assert_eq!(t.rho(0.6), 0.25);
        assert_eq!(t.weight(0.6), Some(0.0));
    }

    #[test]
    fn sample_table_endpoints_and_huber_plateau() {
        let rows = k(KernelKind::Gaussian, 1.0).sample_table(4.0, 2).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].x, 0.0);
        assert_eq!(rows[1].x, 4.0);

        let rows = k(KernelKind::HuberMinimax, 0.25).sample_table(2.0, 9).unwrap();
        assert_eq!(rows[0].g, Some(4.0));
        assert_eq!(rows[4].x, 1.0);
        assert_eq!(rows[4].g, Some(1.0));

        let rows = k(KernelKind::L1, 1.0).sample_table(1.0, 3).unwrap();
        assert_eq!(rows[0].psi, None);
        assert_eq!(rows[0].g, None);
        assert!(k(KernelKind::L1, 1.0).sample_table(1.0, 1).is_err());
    }

    #[test]
    fn table_rows_satisfy_identity() {
        for kind in KernelKind::ALL {
            for row in k(kind, 0.8).sample_table(4.0, 41).unwrap() {
                if let (Some(psi), Some(g)) = (row.psi, row.g) {
                    assert!((g * row.x - psi).abs() < 1e-12, "{kind:?} at {}", row.x);
                }
            }
        }
    }

    #[test]
    fn boundedness() {
        for i in 0..400 {
            let x = i as f64 * 0.05;
            assert!(k(KernelKind::Gaussian, 1.0).rho(x) <= 1.0);
            assert!(k(KernelKind::Tukey, 1.0).rho(x) <= 1.0 / 3.0 + 1e-15);
            assert!(k(KernelKind::TruncatedL2, 2.0).rho(x) <= 2.0);
            assert!(k(KernelKind::TruncatedL1, 2.0).rho(x) <= 2.0);
        }
    }
}
