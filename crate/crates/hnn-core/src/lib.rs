//! Restoration of 3-order tensor images with a Haar-domain nuclear norm.
//!
//! The regularizer takes the 2-D slice-wise Haar transform of a tensor image,
//! then sums the nuclear norms of the mode-3 unfoldings of the four wavelet
//! coefficient tensors, modeling low-rank structure separately for the
//! coarse-grained approximation and the fine-grained details. Two ADMM
//! solvers minimize it: [`solver::hnn_mc`] completes partially observed
//! tensors (inpainting) and [`solver::hnn_rpca`] splits observations into a
//! low-rank part plus sparse noise (denoising).
//!
//! Supporting modules provide dense tensor algebra ([`tensor`]), the fast
//! Haar transform ([`haar`]), singular value thresholding ([`prox`]),
//! synthetic experiment harnesses ([`experiments`]), quality metrics
//! ([`metrics`]), and a small binary tensor file format ([`io`]).

pub mod error;
pub mod experiments;
pub mod haar;
pub mod io;
pub mod metrics;
pub mod prox;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{Matrix, Mode, Tensor3, TuckerSpec};
