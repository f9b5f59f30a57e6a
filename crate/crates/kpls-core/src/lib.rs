//! Kernel partial least squares (KPLS) and kernel conjugate gradient (KCG)
//! regression for stationary, possibly long-range dependent time series.
//!
//! The crate provides:
//!
//! - bounded reproducing kernels and the rescaled kernel matrix
//!   `K_n = n⁻¹[k(X_t, X_s)]` ([`kernels`]);
//! - the Krylov-subspace estimator family indexed by the inner-product order
//!   `r` (`r = 0` ⇒ KPLS, `r = 1` ⇒ KCG) with full iterate and residual
//!   traces ([`krylov`]);
//! - early-stopping rules (cumulative-sum, discrepancy, and oracle forms) and
//!   the associated rate/threshold constants ([`stopping`]);
//! - stationary Gaussian path generation with iid, geometric, or polynomially
//!   decaying (long-memory) autocorrelation ([`gaussian_process`]);
//! - closed-form theory helpers: smoothing building blocks `L_μ` for
//!   source-condition targets, the Gaussian-kernel spectrum and effective
//!   dimensionality, dependence constants, and concentration quantities
//!   ([`source_theory`]);
//! - L²(Pˣ) error evaluation by Gauss–Hermite quadrature and empirical rate
//!   fitting ([`evaluation`]);
//! - a deterministic, seedable Monte Carlo harness with CSV reports
//!   ([`harness`]).
//!
//! Numerics are generic over the [`scalar::Scalar`] float abstraction
//! (`f32`/`f64`); the aliases below fix the common `f64` case.

// `!(x > 0)` is the deliberate validation idiom here: it rejects NaN along
// with non-positive values, which `x <= 0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluation;
pub mod gaussian_process;
pub mod harness;
pub mod kernels;
pub mod krylov;
pub mod linalg;
pub mod scalar;
pub mod source_theory;
pub mod stopping;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` kernel specification.
pub type KernelSpec = kernels::KernelSpec<f64>;
/// `f64` sample.
pub type Sample = kernels::Sample<f64>;
/// `f64` dense matrix.
pub type Matrix = linalg::Matrix<f64>;
/// `f64` fit trace.
pub type FitTrace = krylov::FitTrace<f64>;
/// `f64` autocorrelation model.
pub type AcfSpec = gaussian_process::AcfSpec<f64>;
/// `f64` autocorrelation family.
pub type AcfKind = gaussian_process::AcfKind<f64>;
/// `f64` covariance factor.
pub type CovarianceFactor = gaussian_process::CovarianceFactor<f64>;
/// `f64` stopping rule.
pub type StoppingSpec = stopping::StoppingSpec<f64>;
/// `f64` rate parameters.
pub type RateParams = stopping::RateParams<f64>;
/// `f64` source-function specification.
pub type SourceFunctionSpec = source_theory::SourceFunctionSpec<f64>;
/// `f64` Gaussian-kernel eigenvalue pair.
pub type GaussEigenPair = source_theory::GaussEigenPair<f64>;
/// `f64` quadrature rule.
pub type QuadratureRule = evaluation::QuadratureRule<f64>;
