//! Stationary Gaussian time-series generation with prescribed autocorrelation,
//! plus the empirical ACF estimator.
//!
//! Paths are drawn as `L·z` where `L` is the lower Cholesky factor of the
//! Toeplitz covariance `[τ_{|i−j|}]·σ²` and `z` is standard normal from a
//! seeded generator, so every path is a pure function of `(factor, seed)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{s, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Autocorrelation families.
///
/// The geometric family is the AR(1)-like `ρ_h = φ^h` (a source that writes
/// `0.9^{−h}` is unbounded and cannot be an ACF; the decaying form is the only
/// consistent reading). The polynomial family `ρ_h = (1+h)^{−q}` saturates the
/// long-memory envelope `|ρ_h| ≤ (h+1)^{−q}` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcfKind<T> {
    Iid,
    Geometric { phi: T },
    Polynomial { q: T },
}

/// An autocorrelation model: family plus the variance scales.
///
/// The marginal variance of the generated process is `tau0 · sigma2`
/// (autocovariance `τ_h = tau0·ρ_h`, innovation scale `sigma2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcfSpec<T> {
    pub kind: AcfKind<T>,
    pub tau0: T,
    pub sigma2: T,
}

impl<T: Scalar> AcfSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > T::zero()) || !self.tau0.is_finite() {
            return Err(Error::Input(format!("tau0 must be positive, got {}", self.tau0)));
        }
        if !(self.sigma2 > T::zero()) || !self.sigma2.is_finite() {
            return Err(Error::Input(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        match self.kind {
            AcfKind::Geometric { phi } => {
                if !(phi > T::zero() && phi < T::one()) {
                    return Err(Error::Input(format!("geometric phi must lie in (0,1), got {phi}")));
                }
            }
            AcfKind::Polynomial { q } => {
                if !(q > T::zero()) || !q.is_finite() {
                    return Err(Error::Input(format!("polynomial q must be positive, got {q}")));
                }
            }
            AcfKind::Iid => {}
        }
        Ok(())
    }

    /// Short label used in reports.
    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            AcfKind::Iid => "iid",
            AcfKind::Geometric { .. } => "geometric",
            AcfKind::Polynomial { .. } => "polynomial",
        }
    }

    /// The family parameter (φ or q), zero for iid; used in report rows.
    pub fn kind_parameter(&self) -> T {
        match self.kind {
            AcfKind::Iid => T::zero(),
            AcfKind::Geometric { phi } => phi,
            AcfKind::Polynomial { q } => q,
        }
    }
}

/// Autocorrelation `ρ_h` at lag `h ≥ 0`.
pub fn acf<T: Scalar>(spec: &AcfSpec<T>, h: usize) -> T {
    match spec.kind {
        AcfKind::Iid => {
            if h == 0 {
                T::one()
            } else {
                T::zero()
            }
        }
        AcfKind::Geometric { phi } => phi.powi(h as i32),
        AcfKind::Polynomial { q } => s::<T>(1.0 + h as f64).powf(-q),
    }
}

/// Lower Cholesky factor of the process covariance, with the jitter used to
/// obtain it.
#[derive(Debug, Clone)]
pub struct CovarianceFactor<T> {
    pub n: usize,
    pub factor: Matrix<T>,
    pub jitter_used: T,
}

/// Jitter ladder tried (relative to the variance scale) when the plain
/// factorization fails.
const JITTERS: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// Factors the `n×n` Toeplitz covariance `[τ_{|i−j|}]·σ²`.
pub fn covariance_factor<T: Scalar>(spec: &AcfSpec<T>, n: usize) -> Result<CovarianceFactor<T>> {
    spec.validate()?;
    if n < 1 {
        return Err(Error::Input("covariance factor needs n ≥ 1".into()));
    }
    let scale = spec.tau0 * spec.sigma2;
    let cov = Matrix::from_fn(n, n, |i, j| {
        scale * acf(spec, i.abs_diff(j))
    });
    for jitter in JITTERS {
        let j = s::<T>(jitter) * scale;
        let attempt = if jitter == 0.0 {
            cov.clone()
        } else {
            let mut c = cov.clone();
            for i in 0..n {
                c[(i, i)] = c[(i, i)] + j;
            }
            c
        };
        if let Some(l) = attempt.cholesky() {
            return Ok(CovarianceFactor { n, factor: l, jitter_used: j });
        }
    }
    Err(Error::Spectrum {
        smallest_eigenvalue: cov.smallest_eigenvalue_estimate().to_f64_c(),
    })
}

/// Draws one path `L·z` with `z` standard normal from a ChaCha generator
/// seeded by `seed`. Deterministic given `(factor, seed)`.
pub fn sample_path<T: Scalar>(factor: &CovarianceFactor<T>, seed: u64) -> Vec<T>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let z: Vec<T> = (0..factor.n).map(|_| StandardNormal.sample(&mut rng)).collect();
    factor.factor.matvec(&z)
}

/// Biased empirical autocorrelation estimator
/// `ρ̂_h = Σ_t (x_t−x̄)(x_{t+h}−x̄) / Σ_t (x_t−x̄)²` for `h = 0…max_lag`.
pub fn empirical_acf<T: Scalar>(series: &[T], max_lag: usize) -> Result<Vec<T>> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::Input(format!("max_lag {max_lag} must be < series length {n}")));
    }
    let mean = series.iter().copied().sum::<T>() / s::<T>(n as f64);
    let centered: Vec<T> = series.iter().map(|&x| x - mean).collect();
    let denom: T = centered.iter().map(|&c| c * c).sum();
    if denom <= T::zero() {
        return Err(Error::Degenerate("constant series has no autocorrelation".into()));
    }
    Ok((0..=max_lag)
        .map(|h| {
            let num: T = (0..n - h).map(|t| centered[t] * centered[t + h]).sum();
            num / denom
        })
        .collect())
}
