//! Early-stopping rules and their rate/threshold constants.
//!
//! Three rules are provided: the cumulative-sum rule (smallest `a ≥ 1` with
//! `Σ_{i=0}^a r_i⁻² ≥ threshold⁻²`, fed with the H-norm residuals of the r=0
//! trace and the index-0 residual `√(yᵀKy/n)` prepended), its discrepancy
//! reformulation on the r=1 trace (`first a with r_a ≤ threshold`), and the
//! oracle rule (argmin of per-iteration errors, simulation only).
//!
//! Index convention: traces are 1-based; slot 0 of the residual sequence
//! handed to the sum rule holds the α=0 residual.

use crate::error::{Error, Result};
use crate::scalar::{s, Scalar};
use serde::{Deserialize, Serialize};

/// Which stopping rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoppingForm {
    /// Cumulative inverse-square residual sum rule.
    Sum,
    /// Discrepancy principle on the r=1 residual trace.
    Discrepancy,
    /// Error-minimizing oracle (simulation only).
    Oracle,
}

/// A stopping rule: form, threshold (the product `C·γ_n` or `C·ζ_n`), and the
/// largest admissible index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingSpec<T> {
    pub form: StoppingForm,
    pub threshold: T,
    pub max_index: usize,
}

impl<T: Scalar> StoppingSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > T::zero()) || !self.threshold.is_finite() {
            return Err(Error::Input(format!(
                "stopping threshold must be positive, got {}",
                self.threshold
            )));
        }
        if self.max_index < 1 {
            return Err(Error::Input("stopping max_index must be at least 1".into()));
        }
        Ok(())
    }
}

/// Constants entering the theoretical thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateParams<T> {
    /// Dependence exponent q > 0.
    pub q: T,
    /// Source parameter r ≥ 1/2.
    pub r: T,
    /// Source norm bound R.
    pub big_r: T,
    /// Kernel bound κ.
    pub kappa: T,
    /// Concentration constants.
    pub c_delta: T,
    pub c_eps: T,
    pub c_psi: T,
    /// Regularization scale λ_n and effective dimensionality d_{λ_n}.
    pub lambda_n: T,
    pub d_lambda: T,
}

impl<T: Scalar> RateParams<T> {
    pub fn validate(&self) -> Result<()> {
        let all_pos = [
            self.q,
            self.big_r,
            self.kappa,
            self.c_delta,
            self.c_eps,
            self.c_psi,
            self.lambda_n,
            self.d_lambda,
        ]
        .iter()
        .all(|v| *v > T::zero() && v.is_finite());
        if !all_pos {
            return Err(Error::Input("rate parameters must all be positive and finite".into()));
        }
        if self.r < s(0.5) {
            return Err(Error::Input(format!("source parameter r must be ≥ 1/2, got {}", self.r)));
        }
        Ok(())
    }
}

/// The dependence-adjusted concentration rate γ_n(q).
///
/// `n⁻¹ᐟ²` for q > 1, `n⁻¹ᐟ² log¹ᐟ²(n)` at q = 1, `n⁻ᑫᐟ²` for q ∈ (0,1).
/// The q = 1 branch reads the source's `log(1/2 n)` as the square root of the
/// logarithm, which is the only reading consistent with the q = 1 bound
/// `n⁻¹ log n` on the squared rate.
pub fn gamma_n<T: Scalar>(q: T, n: usize) -> Result<T> {
    if !(q > T::zero()) || !q.is_finite() {
        return Err(Error::Input(format!("dependence exponent q must be positive, got {q}")));
    }
    if n < 2 {
        return Err(Error::Input(format!("gamma_n needs n ≥ 2, got {n}")));
    }
    let nf = s::<T>(n as f64);
    let one = T::one();
    Ok(if q > one {
        one / nf.sqrt()
    } else if q == one {
        nf.ln().sqrt() / nf.sqrt()
    } else {
        nf.powf(-q / s(2.0))
    })
}

/// `ζ_n = max(√(λ_n · d_λ) · γ, λ_n^{r+1/2})`.
pub fn zeta_n<T: Scalar>(lambda_n: T, d_lambda: T, gamma: T, r: T) -> Result<T> {
    let pos = lambda_n > T::zero() && d_lambda > T::zero() && gamma > T::zero();
    if !pos || r < s(0.5) {
        return Err(Error::Input(
            "zeta_n needs positive lambda_n, d_lambda, gamma and r ≥ 1/2".into(),
        ));
    }
    Ok(((lambda_n * d_lambda).sqrt() * gamma).max(lambda_n.powf(r + s(0.5))))
}

/// Threshold `C·γ` with `C = C_ε + κ^{r−1/2}(r+1/2)R{1 + C_δ}`.
pub fn threshold_theorem1<T: Scalar>(p: &RateParams<T>, gamma: T) -> Result<T> {
    p.validate()?;
    let half = s::<T>(0.5);
    let c = p.c_eps
        + p.kappa.powf(p.r - half) * (p.r + half) * p.big_r * (T::one() + p.c_delta);
    Ok(c * gamma)
}

/// Threshold `C·ζ` with
/// `C = 4R·max{1, C_ψ², (r−1/2)κ^{r−3/2}C_δ, 2⁻¹ᐟ²R⁻¹C_ψC_ε}`.
pub fn threshold_theorem2<T: Scalar>(p: &RateParams<T>, zeta: T) -> Result<T> {
    p.validate()?;
    let half = s::<T>(0.5);
    let m = T::one()
        .max(p.c_psi * p.c_psi)
        .max((p.r - half) * p.kappa.powf(p.r - s(1.5)) * p.c_delta)
        .max(p.c_psi * p.c_eps / (s::<T>(2.0).sqrt() * p.big_r));
    Ok(s::<T>(4.0) * p.big_r * m * zeta)
}

/// Outcome of a data-driven stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingOutcome {
    /// Chosen 1-based iteration index (the last index when not reached).
    pub index: usize,
    /// True if the rule actually fired within the sequence.
    pub reached: bool,
}

/// Cumulative-sum stopping rule.
///
/// `h_residuals[0]` must be the index-0 residual (α = 0); the returned index
/// is the smallest `a ∈ [1, len−1]` with `Σ_{i=0}^a h_residuals[i]⁻² ≥
/// threshold⁻²`. A residual of exactly zero makes the rule fire there
/// (infinite summand).
pub fn stopping_index_sum<T: Scalar>(h_residuals: &[T], threshold: T) -> Result<StoppingOutcome> {
    if h_residuals.len() < 2 {
        return Err(Error::Input(
            "sum rule needs the index-0 residual plus at least one iteration".into(),
        ));
    }
    if !(threshold > T::zero()) {
        return Err(Error::Input(format!("threshold must be positive, got {threshold}")));
    }
    if h_residuals.iter().any(|r| *r < T::zero() || !r.is_finite()) {
        return Err(Error::Input("residuals must be non-negative and finite".into()));
    }
    let target = threshold.powi(-2);
    let mut acc = T::zero();
    let mut fired_by_zero = false;
    for (a, r) in h_residuals.iter().enumerate() {
        if *r == T::zero() {
            fired_by_zero = true;
        } else {
            acc = acc + r.powi(-2);
        }
        if a >= 1 && (fired_by_zero || acc >= target) {
            return Ok(StoppingOutcome { index: a, reached: true });
        }
    }
    Ok(StoppingOutcome { index: h_residuals.len() - 1, reached: false })
}

/// Discrepancy-form stopping rule on the r=1 residual trace.
///
/// Slot 0 of `h_residuals_r1` is ignored (index-0 placeholder); the returned
/// index is the smallest `a ≥ 1` with `h_residuals_r1[a] ≤ threshold`.
pub fn stopping_index_discrepancy<T: Scalar>(
    h_residuals_r1: &[T],
    threshold: T,
) -> Result<StoppingOutcome> {
    if h_residuals_r1.len() < 2 {
        return Err(Error::Input(
            "discrepancy rule needs the index-0 slot plus at least one iteration".into(),
        ));
    }
    // Slot 0 is an ignored placeholder and may be anything (e.g. ∞).
    if h_residuals_r1.iter().skip(1).any(|r| !r.is_finite()) {
        return Err(Error::Input("residuals must be finite".into()));
    }
    for (a, r) in h_residuals_r1.iter().enumerate().skip(1) {
        if *r <= threshold {
            return Ok(StoppingOutcome { index: a, reached: true });
        }
    }
    Ok(StoppingOutcome { index: h_residuals_r1.len() - 1, reached: false })
}

/// Oracle rule: 1-based argmin of the per-iteration errors, ties broken toward
/// the smallest index.
pub fn oracle_stopping_index<T: Scalar>(errors: &[T]) -> Result<usize> {
    if errors.is_empty() {
        return Err(Error::Input("oracle rule needs a non-empty error sequence".into()));
    }
    let mut best = 0usize;
    for (i, e) in errors.iter().enumerate() {
        if *e < errors[best] {
            best = i;
        }
    }
    Ok(best + 1)
}
