//! Closed-form theory helpers: smoothing building blocks `L_μ` for
//! constructing source-condition targets, the Gaussian-kernel spectrum and
//! effective dimensionality, dependence constants `C(q)`, ACF sums, and the
//! bivariate-normal concentration quantity `θ(ρ)`.

use crate::error::{Error, Result};
use crate::gaussian_process::{acf, AcfSpec};
use crate::kernels::{eval_kernel, KernelSpec};
use crate::scalar::{s, Scalar};
use crate::stopping::gamma_n;
use serde::{Deserialize, Serialize};

/// A target function built from μ-fold kernel smoothing blocks:
/// `f(x) = normalization⁻¹ Σ_i c_i L_μ(x, z_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceFunctionSpec<T> {
    /// Smoothing order μ = r − 1/2 (μ ≥ 1 for the closed form; μ = 0 is the
    /// raw kernel, an extension of the matrix construction).
    pub mu: u32,
    pub bandwidth_l: T,
    pub sigma2_x: T,
    pub centers: Vec<T>,
    pub coefficients: Vec<T>,
    /// Divisor applied to the weighted sum.
    pub normalization: T,
}

/// Normalization divisor for [`SourceFunctionSpec::benchmark`], chosen so the
/// benchmark target attains a minimum of exactly −0.35.
pub const BENCHMARK_NORMALIZATION: f64 = 5.708377422735619;

impl<T: Scalar> SourceFunctionSpec<T> {
    /// The built-in three-bump benchmark target
    /// `f(x) ∝ 3·L̄₄(x,−4) − 2·L̄₄(x,3) + 1.5·L̄₄(x,9)` with `l = 2`,
    /// `σ_x² = 4`, where `L̄₄(·,z) = L₄(·,z)/√(L₈(z,z))` is the
    /// peak-normalized smoothing bump (raw `L₄(·,z)` heights decay
    /// super-exponentially in `|z|`, which would reduce the sum to a single
    /// bump). The overall normalization is chosen so that `min f = −0.35`;
    /// the range is within `[−0.35, 0.65]`.
    pub fn benchmark() -> Self {
        let weights = [3.0, -2.0, 1.5];
        let centers = [-4.0, 3.0, 9.0];
        let coefficients = weights
            .iter()
            .zip(&centers)
            .map(|(&w, &z)| {
                let peak_sq = l_mu(s::<T>(z), s::<T>(z), 8, s::<T>(2.0), s::<T>(4.0))
                    .expect("fixed benchmark parameters are valid");
                s::<T>(w) / peak_sq.sqrt()
            })
            .collect();
        Self {
            mu: 4,
            bandwidth_l: s(2.0),
            sigma2_x: s(4.0),
            centers: centers.iter().map(|&z| s(z)).collect(),
            coefficients,
            normalization: s(BENCHMARK_NORMALIZATION),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.len() != self.coefficients.len() {
            return Err(Error::Input(format!(
                "{} centers but {} coefficients",
                self.centers.len(),
                self.coefficients.len()
            )));
        }
        if !(self.bandwidth_l > T::zero()) || !(self.sigma2_x > T::zero()) {
            return Err(Error::Input("bandwidth_l and sigma2_x must be positive".into()));
        }
        if !(self.normalization > T::zero()) || !self.normalization.is_finite() {
            return Err(Error::Input(format!(
                "normalization must be positive, got {}",
                self.normalization
            )));
        }
        if !self
            .centers
            .iter()
            .chain(&self.coefficients)
            .all(|v| v.is_finite())
        {
            return Err(Error::Input("centers and coefficients must be finite".into()));
        }
        // H-norm proxy Σ_{i,j} c_i c_j k(z_i, z_j) must be finite and ≥ 0.
        let kernel = KernelSpec::gaussian(self.bandwidth_l)?;
        let mut proxy = T::zero();
        for (i, &ci) in self.coefficients.iter().enumerate() {
            for (j, &cj) in self.coefficients.iter().enumerate() {
                proxy = proxy
                    + ci * cj * eval_kernel(&kernel, &[self.centers[i]], &[self.centers[j]])?;
            }
        }
        if !proxy.is_finite() || proxy < -s::<T>(1e-10) {
            return Err(Error::Input(format!("norm proxy {proxy} is not non-negative")));
        }
        Ok(())
    }
}

/// Determinants of the tridiagonal matrix Λ (diagonal `σ_x⁻² + 2l` except a
/// last entry of `l`, off-diagonal `−l`, size `(μ+1)×(μ+1)`) and of its
/// leading `μ×μ` block, via the three-term recurrence
/// `d_k = a_k d_{k−1} − l² d_{k−2}`.
pub fn tridiag_dets<T: Scalar>(mu: u32, l: T, sigma2_x: T) -> Result<(T, T)> {
    if mu < 1 {
        return Err(Error::Input(format!("tridiag_dets needs mu ≥ 1, got {mu}")));
    }
    if !(l > T::zero()) || !(sigma2_x > T::zero()) {
        return Err(Error::Input("l and sigma2_x must be positive".into()));
    }
    let interior = T::one() / sigma2_x + s::<T>(2.0) * l;
    let m = mu as usize;
    // d[k] = leading k×k determinant; diagonal entries a_1..a_μ = interior,
    // a_{μ+1} = l.
    let mut d_prev = T::one();
    let mut d_cur = interior;
    for k in 2..=(m + 1) {
        let diag = if k == m + 1 { l } else { interior };
        let next = diag * d_cur - l * l * d_prev;
        d_prev = d_cur;
        d_cur = next;
    }
    Ok((d_cur, d_prev))
}

/// The μ-fold smoothing block
/// `L_μ(x,z) = exp[−½{detΛ̃·(x²+z²) − 2(2l)^{μ+1}xz}/detΛ̃₁:μ]`,
/// where Λ̃ is the tridiagonal matrix of [`tridiag_dets`] evaluated at the
/// *doubled* bandwidth `2l`.
///
/// The doubling reconciles the quadratic-form convention
/// `exp(−l u²) = exp(−½·(2l)·u²)` with the Gaussian integration identities
/// behind the closed form; with it, `L_μ` matches the μ-fold iterated
/// expectation `E…E{Πk(Y_ν,Y_{ν+1})k(x,Y₁)}` of the bandwidth-`l` kernel to
/// machine precision (see the quadrature-oracle tests), while the un-doubled
/// form does not.
pub fn l_mu<T: Scalar>(x: T, z: T, mu: u32, l: T, sigma2_x: T) -> Result<T> {
    let two_l = s::<T>(2.0) * l;
    let (det, det_sub) = tridiag_dets(mu, two_l, sigma2_x)?;
    let cross = two_l.powi(mu as i32 + 1);
    let quad = (det * (x * x + z * z) - s::<T>(2.0) * cross * x * z) / det_sub;
    Ok((-quad / s::<T>(2.0)).exp())
}

/// Evaluates a [`SourceFunctionSpec`] at a point.
pub fn eval_source<T: Scalar>(spec: &SourceFunctionSpec<T>, x: T) -> Result<T> {
    spec.validate()?;
    let mut sum = T::zero();
    for (&c, &z) in spec.coefficients.iter().zip(&spec.centers) {
        sum = sum + c * l_mu(x, z, spec.mu, spec.bandwidth_l, spec.sigma2_x)?;
    }
    Ok(sum / spec.normalization)
}

/// Geometric spectrum of the Gaussian-kernel smoothing operator under a
/// `N(0, σ_x²)` design: eigenvalues `μ_i = a·b^{i−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussEigenPair<T> {
    pub a: T,
    pub b: T,
    /// β = 4·l·σ_x².
    pub beta: T,
}

/// Closed-form `a = √2(1+β+√(1+β))^{−1/2}`, `b = β/(1+β+√(1+2β))` with
/// `β = 4lσ_x²`.
pub fn gauss_kernel_eigs<T: Scalar>(l: T, sigma2_x: T) -> Result<GaussEigenPair<T>> {
    if !(l > T::zero()) || !(sigma2_x > T::zero()) {
        return Err(Error::Input("l and sigma2_x must be positive".into()));
    }
    let beta = s::<T>(4.0) * l * sigma2_x;
    let a = s::<T>(2.0).sqrt() / (T::one() + beta + (T::one() + beta).sqrt()).sqrt();
    let b = beta / (T::one() + beta + (T::one() + s::<T>(2.0) * beta).sqrt());
    Ok(GaussEigenPair { a, b, beta })
}

/// Effective dimensionality `d_λ = Σ_{i=0}^∞ {1 + a⁻¹b⁻ⁱλ}⁻¹`, truncated when
/// a term drops below `tol`.
pub fn effective_dim<T: Scalar>(lambda: T, pair: &GaussEigenPair<T>, tol: T) -> Result<T> {
    if !(lambda > T::zero()) || !(tol > T::zero()) {
        return Err(Error::Input("lambda and tol must be positive".into()));
    }
    if !(pair.b > T::zero() && pair.b < T::one() && pair.a > T::zero()) {
        return Err(Error::Input("eigen pair must satisfy a > 0, 0 < b < 1".into()));
    }
    let mut sum = T::zero();
    let mut binv = T::one();
    // Terms decay geometrically once a⁻¹b⁻ⁱλ ≫ 1, so this converges fast.
    for _ in 0..100_000 {
        let term = T::one() / (T::one() + lambda * binv / pair.a);
        sum = sum + term;
        if term < tol {
            break;
        }
        binv = binv / pair.b;
    }
    Ok(sum)
}

/// Upper bound `d_λ ≤ D·log(1 + a/λ)` with
/// `D = 2·log⁻¹(b⁻¹)·max{1, log⁻¹(1+a)}`, valid for `λ ∈ (0, 1]`.
pub fn effective_dim_bound<T: Scalar>(lambda: T, pair: &GaussEigenPair<T>) -> Result<T> {
    if !(lambda > T::zero() && lambda <= T::one()) {
        return Err(Error::Input(format!("bound is proven only for lambda in (0,1], got {lambda}")));
    }
    let d = s::<T>(2.0) / (T::one() / pair.b).ln()
        * T::one().max(T::one() / (T::one() + pair.a).ln());
    Ok(d * (T::one() + pair.a / lambda).ln())
}

/// Riemann ζ(s) for s > 1 by direct summation with Euler–Maclaurin tail
/// correction (absolute accuracy ~1e-12, no special-function dependency).
pub fn riemann_zeta<T: Scalar>(q: T) -> Result<T> {
    if !(q > T::one()) {
        return Err(Error::Input(format!("riemann_zeta needs q > 1, got {q}")));
    }
    let n = 20usize;
    let nf = s::<T>(n as f64);
    let mut sum = T::zero();
    for k in 1..n {
        sum = sum + s::<T>(k as f64).powf(-q);
    }
    let tail = nf.powf(T::one() - q) / (q - T::one())
        + nf.powf(-q) / s::<T>(2.0)
        + q * nf.powf(-q - T::one()) / s::<T>(12.0)
        - q * (q + T::one()) * (q + s::<T>(2.0)) * nf.powf(-q - s::<T>(3.0)) / s::<T>(720.0)
        + q * (q + T::one())
            * (q + s::<T>(2.0))
            * (q + s::<T>(3.0))
            * (q + s::<T>(4.0))
            * nf.powf(-q - s::<T>(5.0))
            / s::<T>(30_240.0);
    Ok(sum + tail)
}

/// The dependence constant `C(q)`: `ζ(q)` for q > 1, `5 − log 4` at q = 1,
/// `2(1−q)⁻¹ − (2−q)⁻¹ + (2−q)⁻¹2^{2−q}` for q ∈ (0,1).
pub fn acf_sum_constant<T: Scalar>(q: T) -> Result<T> {
    if !(q > T::zero()) || !q.is_finite() {
        return Err(Error::Input(format!("q must be positive, got {q}")));
    }
    let one = T::one();
    let two = s::<T>(2.0);
    Ok(if q > one {
        riemann_zeta(q)?
    } else if q == one {
        s::<T>(5.0) - s::<T>(4.0).ln()
    } else {
        two / (one - q) - one / (two - q) + two.powf(two - q) / (two - q)
    })
}

/// The exact weighted ACF sum `n⁻² Σ_{h=1}^{n−1} (n−h)|ρ_h|`.
pub fn acf_weighted_sum<T: Scalar>(spec: &AcfSpec<T>, n: usize) -> Result<T> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Input(format!("acf_weighted_sum needs n ≥ 2, got {n}")));
    }
    let nf = s::<T>(n as f64);
    let mut sum = T::zero();
    for h in 1..n {
        sum = sum + s::<T>((n - h) as f64) * acf(spec, h).abs();
    }
    Ok(sum / (nf * nf))
}

/// Checks the dependence inequality `acf_weighted_sum ≤ C(q)·γ_n(q)²` for a
/// polynomial ACF with exponent `q` (the constant's defining property).
pub fn acf_inequality_holds<T: Scalar>(q: T, n: usize) -> Result<bool> {
    let spec = AcfSpec {
        kind: crate::gaussian_process::AcfKind::Polynomial { q },
        tau0: T::one(),
        sigma2: T::one(),
    };
    let lhs = acf_weighted_sum(&spec, n)?;
    let g = gamma_n(q, n)?;
    Ok(lhs <= acf_sum_constant(q)? * g * g)
}

/// The bivariate-normal concentration quantity
/// `θ(ρ) = 1 + (1−ρ²)^{−d/2} − 2^{d+1}(4−ρ²)^{−d/2}` (even in ρ).
pub fn theta<T: Scalar>(rho: T, d: u32) -> Result<T> {
    if !(rho.abs() < T::one()) {
        return Err(Error::Input(format!("theta needs |rho| < 1, got {rho}")));
    }
    let df = s::<T>(d as f64);
    let r2 = rho * rho;
    Ok(T::one() + (T::one() - r2).powf(-df / s(2.0))
        - s::<T>(2.0).powf(df + T::one()) * (s::<T>(4.0) - r2).powf(-df / s(2.0)))
}

/// The quadratic-domination coefficient
/// `C = d[(1−ρ*²)^{−d/2−1} − 2^{d+1}(4−ρ*²)^{−d/2−1}]` with which
/// `θ(ρ) ≤ C·ρ²` for `0 ≤ ρ ≤ ρ*`.
pub fn theta_quad_coefficient<T: Scalar>(rho_star: T, d: u32) -> Result<T> {
    if !(rho_star >= T::zero() && rho_star < T::one()) {
        return Err(Error::Input(format!("rho_star must lie in [0,1), got {rho_star}")));
    }
    let df = s::<T>(d as f64);
    let r2 = rho_star * rho_star;
    let e = -df / s::<T>(2.0) - T::one();
    Ok(df * ((T::one() - r2).powf(e) - s::<T>(2.0).powf(df + T::one()) * (s::<T>(4.0) - r2).powf(e)))
}

/// Both circulating variants of the dependence prefactor exponent in the
/// polynomial-ACF concentration constant, `(1−4^{−q})^{−(d+2)/4}` and
/// `(1−4^{−q})^{−(d−2)/4}`.
///
/// Published derivations disagree on the sign of the `±2` in the exponent;
/// rather than silently choosing, both values are returned as
/// `(d_plus_2_variant, d_minus_2_variant)`.
pub fn dependence_prefactor_variants<T: Scalar>(q: T, d: u32) -> Result<(T, T)> {
    if !(q > T::zero()) {
        return Err(Error::Input(format!("q must be positive, got {q}")));
    }
    let base = T::one() - s::<T>(4.0).powf(-q);
    let df = s::<T>(d as f64);
    let plus = base.powf(-(df + s::<T>(2.0)) / s::<T>(4.0));
    let minus = base.powf(-(df - s::<T>(2.0)) / s::<T>(4.0));
    Ok((plus, minus))
}
