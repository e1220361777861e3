//! Feature-preserving surface denoising built on robust M-estimators.
//!
//! Every normal filter in this crate is an instance of one weighted average:
//! each face (or point) normal is replaced by the normalized sum of its
//! neighbors' normals, weighted by a range weight `g(x)` taken from an
//! M-estimator and optionally by an isotropic spatial weight `f(d)`.
//! The [`kernels`] module provides the estimators as `(rho, psi, g)`
//! triples; [`filter`] and [`point_filter`] provide the filtering engines
//! and the published method presets; [`vertex_update`] moves vertices to
//! agree with filtered normals; [`bench`] holds shapes, noise and metrics.
//!
//! The crate is `no_std` (with `alloc`). Enable the `parallel` feature to
//! spread per-face and per-point work over a rayon pool; results do not
//! depend on the number of threads.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bench;
pub mod cloud;
pub mod error;
pub mod filter;
pub mod kernels;
pub mod math;
pub mod mesh;
mod par;
pub mod point_filter;
pub mod spatial;
pub mod vertex_update;

pub use error::{Error, Result};
pub use kernels::{Kernel, KernelKind};
pub use math::Vec3;
pub use mesh::TriMesh;
