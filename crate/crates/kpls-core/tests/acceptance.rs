//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible under `cargo test -- --nocapture`).

use std::sync::OnceLock;
use std::time::Instant;

use kpls_core::evaluation::l2_error;
use kpls_core::gaussian_process::{covariance_factor, sample_path, AcfKind, AcfSpec};
use kpls_core::harness::{run_experiment, to_csv, ExperimentConfig, ExperimentReport, Method};
use kpls_core::kernels::{kernel_matrix, KernelSpec};
use kpls_core::krylov::{fit_krylov, krylov_oracle, residual_h_norm};
use kpls_core::linalg::{dot, norm2, sub};
use kpls_core::Matrix;
use kpls_core::source_theory::{
    acf_inequality_holds, effective_dim, effective_dim_bound, eval_source, gauss_kernel_eigs,
    l_mu, theta, theta_quad_coefficient, SourceFunctionSpec,
};
use kpls_core::stopping::{
    gamma_n, stopping_index_discrepancy, stopping_index_sum, StoppingForm, StoppingSpec,
};
use kpls_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn report(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion:2}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

/// Random SPD instance with eigenvalues in [0.25, 2.5]; moderate conditioning
/// keeps full-depth Krylov comparisons meaningful in double precision.
fn random_spd_instance(n: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    for j in 0..n {
        for i in 0..j {
            let prev = cols[i].clone();
            let proj = dot(&prev, &cols[j]);
            for (c, p) in cols[j].iter_mut().zip(&prev) {
                *c -= proj * p;
            }
        }
        let nc = norm2(&cols[j]);
        for c in cols[j].iter_mut() {
            *c /= nc;
        }
    }
    let eigs: Vec<f64> = (0..n).map(|i| 0.25 + 2.25 * (i as f64) / (n as f64 - 1.0)).collect();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut v = 0.0;
            for (t, &lam) in eigs.iter().enumerate() {
                v += lam * cols[t][i] * cols[t][j];
            }
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    let y: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    (k, y)
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    norm2(&sub(a, b)) / norm2(b).max(1e-300)
}

#[test]
fn criterion_01_krylov_oracle_equivalence() {
    let start = Instant::now();
    let sizes = [4usize, 8, 16];
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for instance in 0..200u64 {
        let n = sizes[(instance % 3) as usize];
        let (k, y) = random_spd_instance(n, 100 + instance);
        for r in 0..=2u32 {
            let trace = fit_krylov(&k, &y, r, n).unwrap();
            for i in 1..=trace.len() {
                let oracle = match krylov_oracle(&k, &y, r, i) {
                    Ok(a) => a,
                    // The oracle's raw power basis can exhaust its numerical
                    // rank before the re-orthogonalized production basis.
                    Err(Error::Rank(_)) => break,
                    Err(e) => panic!("oracle failed: {e}"),
                };
                let d = rel_diff(&k.matvec(&trace.coefficients[i - 1]), &k.matvec(&oracle));
                worst = worst.max(d);
                compared += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        worst < 1e-8 && elapsed < 10.0,
        &format!(
            "200 instances, {compared} iterates, worst rel diff {worst:.2e}, {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_02_terminal_coincidence() {
    let mut worst: f64 = 0.0;
    for instance in 0..50u64 {
        let n = 10usize;
        let (k, y) = random_spd_instance(n, 5000 + instance);
        let t0 = fit_krylov(&k, &y, 0, n).unwrap();
        let t1 = fit_krylov(&k, &y, 1, n).unwrap();
        assert_eq!(t0.terminated_at, n, "instance {instance} lost rank");
        assert_eq!(t1.terminated_at, n, "instance {instance} lost rank");
        let f0 = k.matvec(t0.coefficients.last().unwrap());
        let f1 = k.matvec(t1.coefficients.last().unwrap());
        worst = worst.max(rel_diff(&f0, &f1));
    }
    report(2, worst < 1e-6, &format!("50 full-rank instances, worst rel diff {worst:.2e}"));
}

#[test]
fn criterion_03_cross_optimality() {
    let sizes = [4usize, 8, 16];
    let mut checked = 0usize;
    let mut ok = true;
    for instance in 0..100u64 {
        let n = sizes[(instance % 3) as usize];
        let (k, y) = random_spd_instance(n, 9000 + instance);
        let t0 = fit_krylov(&k, &y, 0, n).unwrap();
        let t1 = fit_krylov(&k, &y, 1, n).unwrap();
        for i in 0..t0.len().min(t1.len()) {
            ok &= t1.h_residuals[i] <= t0.h_residuals[i] + 1e-10;
            ok &= t0.euclid_residuals[i] <= t1.euclid_residuals[i] + 1e-10;
            checked += 1;
        }
    }
    report(3, ok, &format!("100 instances, {checked} iteration comparisons within 1e-10"));
}

// ---------------------------------------------------------------------------
// Shared §6-scale Monte Carlo experiments (criteria 4 and 5).

const MC_REPETITIONS: usize = 100;
const MC_SEED: u64 = 20260825;
/// Multiplier on γ_n in the calibrated sum-rule threshold C·γ_n(q).
const MC_THRESHOLD_C: f64 = 0.05;
const MC_SIZES: [usize; 3] = [200, 400, 800];

fn benchmark_acfs() -> Vec<(&'static str, f64, AcfSpec<f64>)> {
    // Marginal variance tau0·sigma2 = 4 matches the N(0, 4) design. The
    // middle entry is the dependence exponent entering γ_n: any q > 1 gives
    // the short-range rate n^{-1/2} for the iid and geometric designs.
    vec![
        ("iid", 2.0, AcfSpec { kind: AcfKind::Iid, tau0: 1.0, sigma2: 4.0 }),
        ("geometric", 2.0, AcfSpec { kind: AcfKind::Geometric { phi: 0.9 }, tau0: 1.0, sigma2: 4.0 }),
        ("polynomial", 0.25, AcfSpec { kind: AcfKind::Polynomial { q: 0.25 }, tau0: 1.0, sigma2: 4.0 }),
    ]
}

/// One report per (ACF, n): the sum-rule threshold C·γ_n(q) depends on the
/// sample size, so each size runs as its own experiment. The shared master
/// seed gives common random numbers across designs and sizes.
fn mc_reports() -> &'static Vec<(&'static str, usize, ExperimentReport)> {
    static REPORTS: OnceLock<Vec<(&'static str, usize, ExperimentReport)>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        benchmark_acfs()
            .into_iter()
            .flat_map(|(label, q, acf)| {
                MC_SIZES.iter().map(move |&n| {
                    let mut config =
                        ExperimentConfig::benchmark(acf, vec![n], MC_REPETITIONS, MC_SEED);
                    config.stopping = StoppingSpec {
                        form: StoppingForm::Sum,
                        threshold: MC_THRESHOLD_C * gamma_n(q, n).unwrap(),
                        max_index: config.max_iterations,
                    };
                    (label, n, run_experiment(&config).unwrap())
                })
            })
            .collect()
    })
}

fn mc_report(label: &str, n: usize) -> &'static ExperimentReport {
    &mc_reports().iter().find(|(l, m, _)| *l == label && *m == n).unwrap().2
}

fn mean_error(report: &ExperimentReport, method: Method, n: usize) -> f64 {
    report
        .summary
        .iter()
        .find(|r| r.method == method && r.n == n)
        .map(|r| r.mean_error)
        .unwrap()
}

fn errors_of(report: &ExperimentReport, method: Method, n: usize) -> Vec<f64> {
    report
        .rows
        .iter()
        .filter(|r| r.method == method && r.n == n && r.failure.is_none())
        .map(|r| r.l2_error)
        .collect()
}

#[test]
fn criterion_04_scaled_figure4_reproduction() {
    let stat = |label: &str, method: Method, n: usize| {
        mean_error(mc_report(label, n), method, n) * n as f64 / (n as f64).ln()
    };
    let mut detail = String::new();
    let mut ok = true;

    for label in ["iid", "geometric"] {
        for method in [Method::Kpls, Method::Kcg] {
            let s: Vec<f64> = MC_SIZES.iter().map(|&n| stat(label, method, n)).collect();
            let ratio = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                / s.iter().cloned().fold(f64::INFINITY, f64::min);
            detail.push_str(&format!("{label}/{} ratio {ratio:.3}; ", method.label()));
            ok &= ratio < 1.8;
        }
    }
    for method in [Method::Kpls, Method::Kcg] {
        let s: Vec<f64> = MC_SIZES.iter().map(|&n| stat("polynomial", method, n)).collect();
        let monotone = s[0] < s[1] && s[1] < s[2];
        detail.push_str(&format!(
            "polynomial/{} statistic [{:.3e}, {:.3e}, {:.3e}] monotone: {monotone}; ",
            method.label(),
            s[0],
            s[1],
            s[2]
        ));
        ok &= monotone;
    }
    report(4, ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_05_scaled_figure2_ordering() {
    let poly_mean = mean_error(mc_report("polynomial", 400), Method::Kpls, 400);
    let iid_mean = mean_error(mc_report("iid", 400), Method::Kpls, 400);
    let mut ok = poly_mean > iid_mean;
    let mut detail =
        format!("n=400: poly mean {poly_mean:.3e} > iid mean {iid_mean:.3e}: {ok}; ");

    for label in ["iid", "geometric", "polynomial"] {
        let report = mc_report(label, 400);
        let kpls = errors_of(report, Method::Kpls, 400);
        let kcg_mean = mean_error(report, Method::Kcg, 400);
        let kpls_mean = mean_error(report, Method::Kpls, 400);
        let m = kpls.len() as f64;
        let var = kpls.iter().map(|e| (e - kpls_mean).powi(2)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        let holds = kcg_mean >= kpls_mean - se;
        detail.push_str(&format!("{label}: kcg ≥ kpls − se: {holds}; "));
        ok &= holds;
    }
    report(5, ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_06_effective_dimensionality_bound() {
    let pair = gauss_kernel_eigs(2.0, 4.0).unwrap();
    let mut ok = true;
    let (lo, hi) = (1e-4f64.ln(), 1.0f64.ln());
    for i in 0..50 {
        let lambda = (lo + (hi - lo) * i as f64 / 49.0).exp();
        let d = effective_dim(lambda, &pair, 1e-12).unwrap();
        let bound = effective_dim_bound(lambda, &pair).unwrap();
        ok &= d <= bound;
    }
    report(6, ok, "d_lambda ≤ D·log(1+a/λ) on 50 log-spaced λ ∈ [1e-4, 1]");
}

#[test]
fn criterion_07_acf_sum_inequality() {
    let mut ok = true;
    for &q in &[0.25, 0.5, 1.0, 1.5, 2.0] {
        for &n in &[10usize, 100, 1000, 10000] {
            ok &= acf_inequality_holds(q, n).unwrap();
        }
    }
    report(7, ok, "acf_weighted_sum ≤ C(q)·γ_n(q)² on the full q × n grid");
}

/// Composite-Simpson oracle for the μ-fold iterated-expectation form of L_μ.
fn iterated_expectation_oracle(x: f64, z: f64, mu: u32, l: f64, s2: f64) -> f64 {
    let half_width = 8.0 * s2.sqrt();
    let steps = 240usize;
    let h = 2.0 * half_width / steps as f64;
    let density = |y: f64| (-y * y / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2).sqrt();
    let kern = |u: f64, v: f64| (-l * (u - v) * (u - v)).exp();
    let nodes: Vec<f64> = (0..=steps).map(|i| -half_width + i as f64 * h).collect();
    let weight = |i: usize| -> f64 {
        if i == 0 || i == steps {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        }
    };
    let mut g: Vec<f64> = nodes.iter().map(|&y| kern(y, z)).collect();
    for _ in 1..mu {
        g = nodes
            .iter()
            .map(|&y| {
                nodes
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| weight(i) * kern(y, t) * g[i] * density(t))
                    .sum()
            })
            .collect();
    }
    nodes
        .iter()
        .enumerate()
        .map(|(i, &t)| weight(i) * kern(x, t) * g[i] * density(t))
        .sum()
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

#[test]
fn criterion_08_source_oracle_and_range() {
    let mut ok = true;
    let mut detail = String::new();
    for mu in [1u32, 2] {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for ix in 0..11 {
            let x = -3.0 + 0.6 * ix as f64;
            for iz in 0..11 {
                let z = -3.0 + 0.6 * iz as f64;
                lhs.push(l_mu(x, z, mu, 2.0, 4.0).unwrap());
                rhs.push(iterated_expectation_oracle(x, z, mu, 2.0, 4.0));
            }
        }
        let corr = correlation(&lhs, &rhs);
        detail.push_str(&format!("mu={mu} corr 1−{:.1e}; ", 1.0 - corr));
        ok &= corr > 1.0 - 1e-9;
    }

    let spec = SourceFunctionSpec::<f64>::benchmark();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for i in 0..=4000 {
        let x = -14.0 + 28.0 * i as f64 / 4000.0;
        let v = eval_source(&spec, x).unwrap();
        min = min.min(v);
        max = max.max(v);
    }
    detail.push_str(&format!("range [{min:.4}, {max:.4}]"));
    ok &= min >= -0.36 && max <= 0.66;
    report(8, ok, &detail);
}

#[test]
fn criterion_09_theta_properties() {
    let mut ok = theta(0.0, 1).unwrap() == 0.0;
    let rho_star = 2f64.powf(-0.25);
    let c = theta_quad_coefficient(rho_star, 1).unwrap();
    for i in 0..=400 {
        let rho = rho_star * i as f64 / 400.0;
        ok &= theta(rho, 1).unwrap() <= c * rho * rho + 1e-15;
    }
    report(9, ok, &format!("θ(0)=0, θ(ρ) ≤ {c:.6}·ρ² on [0, 2^(-1/4)]"));
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    let whole = simpson(f, a, b);
    recurse(f, a, b, whole, tol, 40)
}

#[test]
fn criterion_10_quadrature_and_determinism() {
    // Quadrature vs adaptive oracle on the §6-scale function pair.
    let spec = SourceFunctionSpec::<f64>::benchmark();
    let sigma2 = 4.0;
    let target = |x: f64| eval_source(&spec, x).unwrap();
    let estimate = |x: f64| 0.8 * target(x) + 0.01 * (-0.5 * x * x).exp();
    let gh = l2_error(estimate, target, sigma2, 64).unwrap();
    let density =
        |x: f64| (-x * x / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2).sqrt();
    let integrand = |x: f64| {
        let d = estimate(x) - target(x);
        d * d * density(x)
    };
    let oracle = adaptive_simpson(&integrand, -40.0, 40.0, 1e-12);
    let quad_ok = (gh - oracle).abs() < 1e-8;

    // Determinism: identical configs give byte-identical CSVs.
    let acf = AcfSpec { kind: AcfKind::Geometric { phi: 0.9 }, tau0: 1.0, sigma2: 4.0 };
    let mut config = ExperimentConfig::benchmark(acf, vec![60], 4, 99);
    config.max_iterations = 15;
    config.stopping.max_index = 15;
    let csv1 = to_csv(&run_experiment(&config).unwrap());
    let csv2 = to_csv(&run_experiment(&config).unwrap());
    let det_ok = csv1 == csv2;

    report(
        10,
        quad_ok && det_ok,
        &format!("|gh − oracle| = {:.2e}; byte-identical CSVs: {det_ok}", (gh - oracle).abs()),
    );
}

#[test]
fn criterion_11_stopping_rule_consistency() {
    // 100 simulated §6-style instances; residual traces from the r = 1 fit.
    // Noiseless responses keep the traces in the fast-decay regime where the
    // two rules make comparable decisions; with noise the traces plateau at
    // the noise floor, where neither rule's threshold calibration applies.
    let spec = SourceFunctionSpec::<f64>::benchmark();
    let kernel = KernelSpec::gaussian(2.0).unwrap();
    let acf = AcfSpec { kind: AcfKind::Iid, tau0: 1.0, sigma2: 4.0 };
    let factor = covariance_factor(&acf, 60).unwrap();

    let mut within_one = 0usize;
    let mut total = 0usize;
    let mut monotone = true;
    for instance in 0..100u64 {
        let x = sample_path(&factor, 40_000 + instance);
        let y: Vec<f64> = x.iter().map(|&xt| eval_source(&spec, xt).unwrap()).collect();
        let inputs = Matrix::from_fn(60, 1, |i, _| x[i]);
        let k = kernel_matrix(&kernel, &inputs).unwrap();
        let trace = fit_krylov(&k, &y, 1, 30).unwrap();

        let h0 = residual_h_norm(&k, &y, &vec![0.0; 60]).unwrap();
        let mut sum_res = vec![h0];
        sum_res.extend_from_slice(&trace.h_residuals);
        let mut disc_res = vec![f64::INFINITY];
        disc_res.extend_from_slice(&trace.h_residuals);

        // Thresholds are the traces' own residual levels (a threshold below
        // the smallest residual is unreachable for the discrepancy rule by
        // definition); across the 100 instances the assigned levels span the
        // whole residual range.
        let mut levels: Vec<f64> =
            trace.h_residuals.iter().cloned().filter(|&r| r > 0.0).collect();
        levels.sort_by(f64::total_cmp);
        let tau = levels[(instance as usize * (levels.len() - 1)) / 99];
        let a_sum = stopping_index_sum(&sum_res, tau).unwrap().index;
        let a_disc = stopping_index_discrepancy(&disc_res, tau).unwrap().index;
        total += 1;
        if a_sum.abs_diff(a_disc) <= 1 {
            within_one += 1;
        }

        // Monotonicity in the threshold, swept over the full level range.
        let mut prev_sum = usize::MAX;
        let mut prev_disc = usize::MAX;
        for i in 0..7 {
            let tau = levels[(i * (levels.len() - 1)) / 6];
            let a_sum = stopping_index_sum(&sum_res, tau).unwrap().index;
            let a_disc = stopping_index_discrepancy(&disc_res, tau).unwrap().index;
            // Larger thresholds stop no later.
            monotone &= a_sum <= prev_sum && a_disc <= prev_disc;
            prev_sum = a_sum;
            prev_disc = a_disc;
        }
    }
    let ok = within_one * 100 >= total * 95 && monotone;
    report(
        11,
        ok,
        &format!("agreement within ±1 on {within_one}/{total}; monotone in threshold: {monotone}"),
    );
}
