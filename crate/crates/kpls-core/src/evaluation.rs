//! L²(Pˣ) error against the Gaussian design density, via Gauss–Hermite
//! quadrature, plus empirical convergence-rate fitting.

use crate::error::{Error, Result};
use crate::scalar::{s, Scalar};

/// A Gauss–Hermite rule: nodes and weights for ∫ g(x)·e^{−x²} dx ≈ Σ wᵢ g(xᵢ).
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub order: usize,
}

impl<T: Scalar> QuadratureRule<T> {
    /// Computes the order-`n` Gauss–Hermite rule by Newton iteration on the
    /// orthonormal Hermite recurrence.
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::Input(format!("quadrature order must be ≥ 2, got {order}")));
        }
        let n = order;
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = s::<T>(n as f64);
        let pi_quarter = s::<T>(std::f64::consts::PI).powf(s(-0.25));
        let m = n.div_ceil(2);
        let mut z = T::zero();
        for i in 0..m {
            // Standard initial guesses for the largest roots, then stepping
            // inwards from previously found ones.
            z = match i {
                0 => {
                    (s::<T>(2.0) * nf + T::one()).sqrt()
                        - s::<T>(1.85575) * (s::<T>(2.0) * nf + T::one()).powf(s(-1.0 / 6.0))
                }
                1 => z - s::<T>(1.14) * nf.powf(s(0.426)) / z,
                2 => s::<T>(1.86) * z - s::<T>(0.86) * nodes[0],
                3 => s::<T>(1.91) * z - s::<T>(0.91) * nodes[1],
                _ => s::<T>(2.0) * z - nodes[i - 2],
            };
            let mut pp = T::zero();
            for _ in 0..200 {
                // Evaluate the orthonormal Hermite polynomial and derivative.
                let mut p1 = pi_quarter;
                let mut p2 = T::zero();
                for j in 1..=n {
                    let jf = s::<T>(j as f64);
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (s::<T>(2.0) / jf).sqrt() * p2
                        - ((jf - T::one()) / jf).sqrt() * p3;
                }
                pp = (s::<T>(2.0) * nf).sqrt() * p2;
                let dz = p1 / pp;
                z = z - dz;
                if dz.abs() <= s::<T>(1e-15) * z.abs().max(T::one()) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = s::<T>(2.0) / (pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(Self { nodes, weights, order })
    }

    /// ∫ g dN(0, σ²) ≈ π⁻¹ᐟ² Σ wᵢ g(√(2σ²)·xᵢ).
    pub fn integrate_gaussian(
        &self,
        sigma2: T,
        mut g: impl FnMut(T) -> T,
    ) -> Result<T> {
        if !(sigma2 > T::zero()) {
            return Err(Error::Input(format!("sigma2 must be positive, got {sigma2}")));
        }
        let scale = (s::<T>(2.0) * sigma2).sqrt();
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = g(scale * x);
            if !v.is_finite() {
                return Err(Error::Evaluation(format!(
                    "integrand returned non-finite value at x = {}",
                    scale * x
                )));
            }
            acc = acc + w * v;
        }
        Ok(acc / s::<T>(std::f64::consts::PI).sqrt())
    }
}

/// Squared L²(Pˣ) distance `∫ (estimate − target)² dN(0, σ_x²)` by
/// Gauss–Hermite quadrature of the given order.
pub fn l2_error<T: Scalar>(
    mut estimate: impl FnMut(T) -> T,
    mut target: impl FnMut(T) -> T,
    sigma2_x: T,
    rule_order: usize,
) -> Result<T> {
    if rule_order < 16 {
        return Err(Error::Input(format!("rule_order must be ≥ 16, got {rule_order}")));
    }
    let rule = QuadratureRule::gauss_hermite(rule_order)?;
    let v = rule.integrate_gaussian(sigma2_x, |x| {
        let d = estimate(x) - target(x);
        d * d
    })?;
    Ok(v.max(T::zero()))
}

/// Ordinary least squares of `log error` on `log n`; returns
/// `(slope, intercept)`. The slope is the empirical rate exponent.
pub fn rate_fit<T: Scalar>(ns: &[usize], errors: &[T]) -> Result<(T, T)> {
    if ns.len() != errors.len() {
        return Err(Error::Input(format!(
            "{} sample sizes but {} errors",
            ns.len(),
            errors.len()
        )));
    }
    if ns.len() < 3 {
        return Err(Error::Input("rate_fit needs at least 3 points".into()));
    }
    if ns.contains(&0) || errors.iter().any(|e| !(*e > T::zero())) {
        return Err(Error::Input("rate_fit needs positive sample sizes and errors".into()));
    }
    let m = s::<T>(ns.len() as f64);
    let xs: Vec<T> = ns.iter().map(|&n| s::<T>(n as f64).ln()).collect();
    let ys: Vec<T> = errors.iter().map(|e| e.ln()).collect();
    let mean_x = xs.iter().copied().sum::<T>() / m;
    let mean_y = ys.iter().copied().sum::<T>() / m;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (x, y) in xs.iter().zip(&ys) {
        sxx = sxx + (*x - mean_x) * (*x - mean_x);
        sxy = sxy + (*x - mean_x) * (*y - mean_y);
    }
    if sxx <= T::zero() {
        return Err(Error::Input("rate_fit needs at least two distinct sample sizes".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}
