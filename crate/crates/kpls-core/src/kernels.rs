//! Bounded reproducing kernels and the rescaled kernel matrix.
//!
//! The kernel matrix returned by [`kernel_matrix`] carries the `1/n` rescaling
//! baked in: entry `(t, s)` is `n⁻¹ k(X_t, X_s)`. Every downstream formula in
//! this crate assumes that convention, so it is applied exactly once, here.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{s, Scalar};
use serde::{Deserialize, Serialize};

/// Kernel families supported by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `k(x,y) = exp(−l‖x−y‖²)`
    Gaussian,
    /// `k(x,y) = max(0, 1 − √l‖x−y‖)` (conventional compact-support form)
    Triangular,
    /// `k(x,y) = max(0, 1 − l‖x−y‖²)` (conventional compact-support form)
    Epanechnikov,
}

/// A bounded reproducing kernel: family, bandwidth `l`, and uniform bound κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec<T> {
    pub kind: KernelKind,
    /// The `l` in `k(x,y) = exp(−l‖x−y‖²)`; strictly positive.
    pub bandwidth: T,
    /// Uniform bound on `|k|`; equals 1 for all three built-in families.
    pub kappa: T,
}

impl<T: Scalar> KernelSpec<T> {
    /// Gaussian kernel with the given bandwidth (κ = 1).
    pub fn gaussian(bandwidth: T) -> Result<Self> {
        Self::new(KernelKind::Gaussian, bandwidth)
    }

    /// Triangular kernel with the given bandwidth (κ = 1).
    pub fn triangular(bandwidth: T) -> Result<Self> {
        Self::new(KernelKind::Triangular, bandwidth)
    }

    /// Epanechnikov kernel with the given bandwidth (κ = 1).
    pub fn epanechnikov(bandwidth: T) -> Result<Self> {
        Self::new(KernelKind::Epanechnikov, bandwidth)
    }

    fn new(kind: KernelKind, bandwidth: T) -> Result<Self> {
        let spec = Self { kind, bandwidth, kappa: T::one() };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > T::zero()) || !self.bandwidth.is_finite() {
            return Err(Error::Input(format!(
                "kernel bandwidth must be positive and finite, got {}",
                self.bandwidth
            )));
        }
        if !(self.kappa > T::zero()) || !self.kappa.is_finite() {
            return Err(Error::Input(format!(
                "kernel bound kappa must be positive and finite, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// A regression sample: `n×d` input matrix (rows are observations) plus the
/// length-`n` response vector.
#[derive(Debug, Clone)]
pub struct Sample<T> {
    pub inputs: Matrix<T>,
    pub responses: Vec<T>,
}

impl<T: Scalar> Sample<T> {
    /// Validates shapes and finiteness.
    pub fn new(inputs: Matrix<T>, responses: Vec<T>) -> Result<Self> {
        if inputs.rows() == 0 {
            return Err(Error::Input("sample must contain at least one observation".into()));
        }
        if inputs.rows() != responses.len() {
            return Err(Error::Input(format!(
                "{} input rows but {} responses",
                inputs.rows(),
                responses.len()
            )));
        }
        if !inputs.all_finite() || !responses.iter().all(|v| v.is_finite()) {
            return Err(Error::Input("sample contains non-finite entries".into()));
        }
        Ok(Self { inputs, responses })
    }

    /// One-dimensional convenience constructor.
    pub fn from_series(xs: &[T], ys: &[T]) -> Result<Self> {
        let inputs = Matrix::from_fn(xs.len(), 1, |i, _| xs[i]);
        Self::new(inputs, ys.to_vec())
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

/// Evaluates `k(x, y)` for two points of the same dimension.
pub fn eval_kernel<T: Scalar>(spec: &KernelSpec<T>, x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::Input(format!(
            "kernel arguments have dimensions {} and {}",
            x.len(),
            y.len()
        )));
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(Error::Input("kernel arguments must be finite".into()));
    }
    Ok(eval_unchecked(spec, x, y))
}

/// Kernel evaluation without the shape checks; callers guarantee equal finite
/// dimensions.
#[inline]
pub(crate) fn eval_unchecked<T: Scalar>(spec: &KernelSpec<T>, x: &[T], y: &[T]) -> T {
    let dist2: T = x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum();
    match spec.kind {
        KernelKind::Gaussian => (-spec.bandwidth * dist2).exp(),
        KernelKind::Triangular => {
            (T::one() - spec.bandwidth.sqrt() * dist2.sqrt()).max(T::zero())
        }
        KernelKind::Epanechnikov => (T::one() - spec.bandwidth * dist2).max(T::zero()),
    }
}

/// Assembles the rescaled kernel matrix `K_n = n⁻¹ [k(X_t, X_s)]`.
///
/// The upper triangle is computed and mirrored, so the result is exactly
/// symmetric.
pub fn kernel_matrix<T: Scalar>(spec: &KernelSpec<T>, inputs: &Matrix<T>) -> Result<Matrix<T>> {
    spec.validate()?;
    let n = inputs.rows();
    if n == 0 {
        return Err(Error::Input("kernel matrix needs at least one input row".into()));
    }
    if !inputs.all_finite() {
        return Err(Error::Input("kernel matrix inputs must be finite".into()));
    }
    let inv_n = T::one() / s::<T>(n as f64);
    let mut k = Matrix::zeros(n, n);
    for t in 0..n {
        for st in t..n {
            let v = inv_n * eval_unchecked(spec, inputs.row(t), inputs.row(st));
            k[(t, st)] = v;
            k[(st, t)] = v;
        }
    }
    Ok(k)
}
