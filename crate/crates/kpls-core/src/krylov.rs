//! Krylov-subspace estimator family.
//!
//! One engine covers the whole family indexed by the inner-product order `r`:
//! iterate `i` minimizes `⟨y − Kv, Kʳ(y − Kv)⟩` over the Krylov space
//! `span{y, Ky, …, K^{i−1}y}`. `r = 0` is partial least squares (Euclidean
//! residual), `r = 1` is conjugate gradients on the normal equation (H-norm
//! residual), `r = 2` is exposed for completeness.
//!
//! The implementation keeps an explicitly re-orthogonalized Krylov basis and
//! performs a projected dense solve per iteration (O(n²·max_iter)). That is
//! deliberately the *definition* of the estimator rather than a two-term
//! recurrence: at desk scale, numerical faithfulness beats speed.

use crate::error::{Error, Result};
use crate::kernels::{eval_unchecked, KernelSpec};
use crate::linalg::{dot, norm2, sub, Matrix};
use crate::scalar::{s, Scalar};

/// Relative threshold below which a re-orthogonalized Krylov vector is treated
/// as numerically zero (rank exhaustion).
const DEGENERACY_RTOL: f64 = 1e-10;

/// Full per-iteration history of a Krylov-family fit.
#[derive(Debug, Clone)]
pub struct FitTrace<T> {
    /// Inner-product order r (0 = KPLS, 1 = KCG, 2 = extended family).
    pub order_r: u32,
    /// Requested iteration cap.
    pub max_iter: usize,
    /// Coefficient vectors α₁…α_m of `f_α = n⁻¹ Σ α_t k(·, X_t)`, one per
    /// completed iteration.
    pub coefficients: Vec<Vec<T>>,
    /// `‖y − K α_i‖ / √n` per iteration (Euclidean residual, rescaled).
    pub euclid_residuals: Vec<T>,
    /// `‖S_n f_{α_i} − T_n* y‖_H = √((y−Kα)ᵀK(y−Kα)/n)` per iteration.
    pub h_residuals: Vec<T>,
    /// Index at which the Krylov space became numerically degenerate, or
    /// `max_iter` if it never did.
    pub terminated_at: usize,
}

impl<T: Scalar> FitTrace<T> {
    /// Number of completed iterations.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

fn check_kernel_matrix<T: Scalar>(k: &Matrix<T>, y: &[T]) -> Result<()> {
    if k.rows() != k.cols() {
        return Err(Error::Input(format!("kernel matrix is {}×{}", k.rows(), k.cols())));
    }
    if k.rows() != y.len() {
        return Err(Error::Input(format!(
            "kernel matrix of size {} but response of length {}",
            k.rows(),
            y.len()
        )));
    }
    if !k.all_finite() || !y.iter().all(|v| v.is_finite()) {
        return Err(Error::Input("non-finite entries in kernel matrix or response".into()));
    }
    let scale = k.max_abs().max(T::one());
    if k.asymmetry() > s::<T>(1e-10) * scale {
        return Err(Error::Input("kernel matrix is not symmetric".into()));
    }
    Ok(())
}

/// Fits the order-`r` Krylov estimator and records the full trace.
///
/// `k` must be the rescaled kernel matrix (1/n baked in), symmetric positive
/// semi-definite; `1 ≤ max_iter ≤ n`.
pub fn fit_krylov<T: Scalar>(
    k: &Matrix<T>,
    y: &[T],
    order_r: u32,
    max_iter: usize,
) -> Result<FitTrace<T>> {
    check_kernel_matrix(k, y)?;
    if order_r > 2 {
        return Err(Error::Input(format!("order_r must be in {{0,1,2}}, got {order_r}")));
    }
    let n = y.len();
    if max_iter < 1 || max_iter > n {
        return Err(Error::Input(format!("max_iter must lie in [1, {n}], got {max_iter}")));
    }
    let norm_y = norm2(y);
    let inv_n = T::one() / s::<T>(n as f64);
    let ky = k.matvec(y);
    let h0_sq = (dot(y, &ky) * inv_n).max(T::zero());
    // Negative quadratic forms beyond tolerance mean K is not PSD.
    let psd_tol = s::<T>(1e-8) * k.max_abs().max(T::one()) * norm_y * norm_y;
    if dot(y, &ky) < -psd_tol {
        return Err(Error::Input("kernel matrix is not positive semi-definite".into()));
    }

    // Orthonormal Krylov basis b_j with cached u_j = K b_j and v_j = K u_j.
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut u: Vec<Vec<T>> = Vec::new();
    let mut v: Vec<Vec<T>> = Vec::new();

    let mut trace = FitTrace {
        order_r,
        max_iter,
        coefficients: Vec::new(),
        euclid_residuals: Vec::new(),
        h_residuals: Vec::new(),
        terminated_at: max_iter,
    };

    for i in 1..=max_iter {
        // Next raw Krylov direction: y for i=1, then K times the last basis vector.
        let mut w = if i == 1 { y.to_vec() } else { k.matvec(basis.last().unwrap()) };
        // Re-orthogonalize twice against the existing basis for stability.
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &w);
                for (wt, bt) in w.iter_mut().zip(b) {
                    *wt = *wt - proj * *bt;
                }
            }
        }
        let nw = norm2(&w);
        if nw <= s::<T>(DEGENERACY_RTOL) * norm_y || !nw.is_finite() {
            trace.terminated_at = i - 1;
            break;
        }
        let b: Vec<T> = w.iter().map(|&x| x / nw).collect();
        let ub = k.matvec(&b);
        let vb = k.matvec(&ub);
        basis.push(b);
        u.push(ub);
        v.push(vb);
        let m = basis.len();

        // Projected normal equations of the order-r objective.
        let (gram_a, gram_b, rhs_src): (&[Vec<T>], &[Vec<T>], &[T]) = match order_r {
            0 => (&u, &u, y),
            1 => (&u, &v, y),
            _ => (&v, &v, &ky),
        };
        let gram = Matrix::from_fn(m, m, |a, c| dot(&gram_a[a], &gram_b[c]));
        let rhs: Vec<T> = match order_r {
            0 => u.iter().map(|uj| dot(uj, rhs_src)).collect(),
            1 => v.iter().map(|vj| dot(vj, rhs_src)).collect(),
            _ => v.iter().map(|vj| dot(vj, rhs_src)).collect(),
        };
        // Symmetrize against round-off before the SPD solve.
        let gram_sym = Matrix::from_fn(m, m, |a, c| {
            (gram[(a, c)] + gram[(c, a)]) / s::<T>(2.0)
        });
        let coef = match gram_sym.solve_spd(&rhs) {
            Some(c) => c,
            None => {
                // The projected operator lost definiteness (possible for r ≥ 1
                // when K is singular on the Krylov space): stop cleanly.
                basis.pop();
                u.pop();
                v.pop();
                trace.terminated_at = i - 1;
                break;
            }
        };

        // α_i = Σ c_j b_j; fitted = Σ c_j u_j; K(y − fitted) = Ky − Σ c_j v_j.
        let mut alpha = vec![T::zero(); n];
        let mut fitted = vec![T::zero(); n];
        let mut k_res = ky.clone();
        for (j, cj) in coef.iter().enumerate() {
            for t in 0..n {
                alpha[t] = alpha[t] + *cj * basis[j][t];
                fitted[t] = fitted[t] + *cj * u[j][t];
                k_res[t] = k_res[t] - *cj * v[j][t];
            }
        }
        let res = sub(y, &fitted);
        let euclid = norm2(&res) * inv_n.sqrt();
        let h_rad = dot(&res, &k_res) * inv_n;
        let h_tol = s::<T>(1e-12) * h0_sq.max(T::one());
        let h = if h_rad >= T::zero() {
            h_rad.sqrt()
        } else if h_rad >= -h_tol {
            T::zero()
        } else {
            return Err(Error::Numerical(format!(
                "H-norm radicand {h_rad:e} negative beyond tolerance at iteration {i}"
            )));
        };
        trace.coefficients.push(alpha);
        trace.euclid_residuals.push(euclid);
        trace.h_residuals.push(h);

        if trace.terminated_at != max_iter {
            break;
        }
    }
    if trace.coefficients.is_empty() {
        return Err(Error::Numerical("Krylov space degenerate at the first iteration".into()));
    }
    Ok(trace)
}

/// Brute-force minimizer of the order-`r` objective over an explicitly
/// orthonormalized raw Krylov basis. Test oracle only: quadratic in `n` per
/// column and entirely independent of [`fit_krylov`]'s incremental path.
pub fn krylov_oracle<T: Scalar>(
    k: &Matrix<T>,
    y: &[T],
    order_r: u32,
    i: usize,
) -> Result<Vec<T>> {
    check_kernel_matrix(k, y)?;
    if order_r > 2 {
        return Err(Error::Input(format!("order_r must be in {{0,1,2}}, got {order_r}")));
    }
    let n = y.len();
    if i < 1 || i > n {
        return Err(Error::Input(format!("iteration index must lie in [1, {n}], got {i}")));
    }
    // Raw power basis, then one-shot modified Gram–Schmidt.
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(i);
    let mut cur = y.to_vec();
    for _ in 0..i {
        cols.push(cur.clone());
        cur = k.matvec(&cur);
    }
    let norm_y = norm2(y);
    let mut q: Vec<Vec<T>> = Vec::with_capacity(i);
    for mut c in cols {
        for b in &q {
            let proj = dot(b, &c);
            for (ct, bt) in c.iter_mut().zip(b) {
                *ct = *ct - proj * *bt;
            }
        }
        let nc = norm2(&c);
        if nc <= s::<T>(DEGENERACY_RTOL) * norm_y {
            return Err(Error::Rank(format!(
                "Krylov basis degenerate before reaching dimension {i}"
            )));
        }
        q.push(c.iter().map(|&x| x / nc).collect());
    }
    // a_j = K q_j, then w_j = K^r a_j.
    let a: Vec<Vec<T>> = q.iter().map(|col| k.matvec(col)).collect();
    let mut w = a.clone();
    for _ in 0..order_r {
        w = w.iter().map(|col| k.matvec(col)).collect();
    }
    let gram = Matrix::from_fn(i, i, |r0, c0| dot(&a[r0], &w[c0]));
    let gram_sym = Matrix::from_fn(i, i, |r0, c0| (gram[(r0, c0)] + gram[(c0, r0)]) / s::<T>(2.0));
    let rhs: Vec<T> = w.iter().map(|col| dot(col, y)).collect();
    let coef = gram_sym.solve_pivoted(&rhs)?;
    let mut alpha = vec![T::zero(); n];
    for (j, cj) in coef.iter().enumerate() {
        for t in 0..n {
            alpha[t] = alpha[t] + *cj * q[j][t];
        }
    }
    Ok(alpha)
}

/// Evaluates the fitted function `n⁻¹ Σ_t α_t k(x, X_t)` at a new point.
pub fn predict<T: Scalar>(
    inputs: &Matrix<T>,
    alpha: &[T],
    spec: &KernelSpec<T>,
    x: &[T],
) -> Result<T> {
    if inputs.rows() != alpha.len() {
        return Err(Error::Input(format!(
            "{} input rows but {} coefficients",
            inputs.rows(),
            alpha.len()
        )));
    }
    if inputs.cols() != x.len() {
        return Err(Error::Input(format!(
            "inputs have dimension {} but query point has {}",
            inputs.cols(),
            x.len()
        )));
    }
    spec.validate()?;
    let n = alpha.len();
    let inv_n = T::one() / s::<T>(n as f64);
    let mut acc = T::zero();
    for (t, &a) in alpha.iter().enumerate() {
        acc = acc + a * eval_unchecked(spec, x, inputs.row(t));
    }
    Ok(acc * inv_n)
}

/// `‖S_n f_α − T_n* y‖_H = √((y − Kα)ᵀ K (y − Kα) / n)`.
///
/// Radicands in `[−1e-12·scale, 0)` are clamped to zero; anything more
/// negative is a numerical error.
pub fn residual_h_norm<T: Scalar>(k: &Matrix<T>, y: &[T], alpha: &[T]) -> Result<T> {
    check_kernel_matrix(k, y)?;
    if alpha.len() != y.len() {
        return Err(Error::Input(format!(
            "coefficient length {} does not match sample size {}",
            alpha.len(),
            y.len()
        )));
    }
    let n = y.len();
    let inv_n = T::one() / s::<T>(n as f64);
    let res = sub(y, &k.matvec(alpha));
    let rad = dot(&res, &k.matvec(&res)) * inv_n;
    let scale = (dot(y, &k.matvec(y)).abs() * inv_n).max(T::one());
    if rad >= T::zero() {
        Ok(rad.sqrt())
    } else if rad >= -s::<T>(1e-12) * scale {
        Ok(T::zero())
    } else {
        Err(Error::Numerical(format!("H-norm radicand {rad:e} negative beyond tolerance")))
    }
}
