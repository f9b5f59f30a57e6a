//! `kpls` — command-line front end for the KPLS/KCG regression library.
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad config file,
//! invalid parameter combinations), 3 on numerical failures.

mod svg;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kpls_core::error::Error;
use kpls_core::gaussian_process::{covariance_factor, sample_path, AcfKind, AcfSpec};
use kpls_core::harness::{format_e12, parse_config, run_experiment, to_csv};
use kpls_core::kernels::{kernel_matrix, KernelKind, KernelSpec, Sample};
use kpls_core::krylov::fit_krylov;
use kpls_core::source_theory::{
    acf_sum_constant, effective_dim, effective_dim_bound, gauss_kernel_eigs,
};
use kpls_core::stopping::gamma_n;

#[derive(Parser)]
#[command(name = "kpls", version, about = "Kernel PLS / CG regression toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a stationary Gaussian path and emit it as CSV.
    Simulate(SimulateArgs),
    /// Fit one dataset and emit the residual trace as CSV.
    Fit(FitArgs),
    /// Run a full Monte Carlo experiment from a JSON config file.
    Experiment(ExperimentArgs),
    /// Tabulate effective dimensionality d_λ and its logarithmic bound.
    EdTable(EdTableArgs),
    /// Print the theory constants C(q), γ_n(q), a, b, D.
    Constants(ConstantsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AcfFamily {
    Iid,
    Geometric,
    Polynomial,
}

#[derive(Args)]
struct SimulateArgs {
    /// Autocorrelation family.
    #[arg(long, value_enum, default_value = "iid")]
    acf: AcfFamily,
    /// Geometric decay parameter φ ∈ (−1, 1); required for --acf geometric.
    #[arg(long)]
    phi: Option<f64>,
    /// Polynomial decay exponent q > 0; required for --acf polynomial.
    #[arg(long)]
    q: Option<f64>,
    /// Autocovariance scale τ₀ (marginal variance is τ₀·σ²).
    #[arg(long, default_value_t = 1.0)]
    tau0: f64,
    /// Innovation variance scale σ².
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Path length.
    #[arg(long)]
    n: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelFamily {
    Gaussian,
    Triangular,
    Epanechnikov,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with two columns `x,y` (header row optional).
    #[arg(long)]
    data: PathBuf,
    /// Kernel family.
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelFamily,
    /// Kernel bandwidth l.
    #[arg(long, default_value_t = 2.0)]
    bandwidth: f64,
    /// Inner-product order r (0 = KPLS, 1 = KCG, 2 = extended).
    #[arg(long, default_value_t = 0)]
    order_r: u32,
    /// Iteration cap (clamped to the sample size).
    #[arg(long, default_value_t = 40)]
    max_iter: usize,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render boxplot/line summaries to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EdTableArgs {
    /// Kernel bandwidth l.
    #[arg(long, default_value_t = 2.0)]
    bandwidth: f64,
    /// Design variance σ_x².
    #[arg(long, default_value_t = 4.0)]
    sigma2_x: f64,
    /// Smallest λ (log-spaced grid).
    #[arg(long, default_value_t = 1e-4)]
    lambda_min: f64,
    /// Largest λ.
    #[arg(long, default_value_t = 1.0)]
    lambda_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Dependence exponent q > 0.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Sample size entering γ_n(q).
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Kernel bandwidth l.
    #[arg(long, default_value_t = 2.0)]
    bandwidth: f64,
    /// Design variance σ_x².
    #[arg(long, default_value_t = 4.0)]
    sigma2_x: f64,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Config(_) => 2,
            _ => 3,
        };
        std::process::exit(code);
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Fit(args) => fit(args),
        Command::Experiment(args) => experiment(args),
        Command::EdTable(args) => ed_table(args),
        Command::Constants(args) => constants(args),
    }
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::Numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::Numerical(format!("cannot write to stdout: {e}")))
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let kind = match args.acf {
        AcfFamily::Iid => AcfKind::Iid,
        AcfFamily::Geometric => AcfKind::Geometric {
            phi: args
                .phi
                .ok_or_else(|| Error::Config("--phi is required for --acf geometric".into()))?,
        },
        AcfFamily::Polynomial => AcfKind::Polynomial {
            q: args
                .q
                .ok_or_else(|| Error::Config("--q is required for --acf polynomial".into()))?,
        },
    };
    let spec = AcfSpec { kind, tau0: args.tau0, sigma2: args.sigma2 };
    spec.validate().map_err(|e| Error::Config(e.to_string()))?;
    if args.n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let factor = covariance_factor(&spec, args.n)?;
    let path = sample_path(&factor, args.seed);
    let mut csv = String::from("index,value\n");
    for (i, x) in path.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", format_e12(*x)));
    }
    write_output(args.out.as_ref(), &csv)
}

fn parse_data_csv(text: &str) -> Result<Sample<f64>, Error> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(Error::Config(format!(
                    "line {}: expected exactly two comma-separated columns",
                    lineno + 1
                )))
            }
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            // Tolerate a single non-numeric header row.
            _ if lineno == 0 => continue,
            _ => {
                return Err(Error::Config(format!("line {}: cannot parse `{line}`", lineno + 1)))
            }
        }
    }
    Sample::from_series(&xs, &ys).map_err(|e| Error::Config(e.to_string()))
}

fn fit(args: FitArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.data)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.data.display())))?;
    let sample = parse_data_csv(&text)?;
    let kind = match args.kernel {
        KernelFamily::Gaussian => KernelKind::Gaussian,
        KernelFamily::Triangular => KernelKind::Triangular,
        KernelFamily::Epanechnikov => KernelKind::Epanechnikov,
    };
    let spec = KernelSpec { kind, bandwidth: args.bandwidth, kappa: 1.0 };
    spec.validate().map_err(|e| Error::Config(e.to_string()))?;
    if args.order_r > 2 {
        return Err(Error::Config(format!("--order-r must be 0, 1, or 2, got {}", args.order_r)));
    }
    if args.max_iter == 0 {
        return Err(Error::Config("--max-iter must be at least 1".into()));
    }
    let k = kernel_matrix(&spec, &sample.inputs)?;
    let max_iter = args.max_iter.min(sample.len());
    let trace = fit_krylov(&k, &sample.responses, args.order_r, max_iter)?;
    let mut csv = String::from("iteration,euclid_residual,h_residual\n");
    for i in 0..trace.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            format_e12(trace.euclid_residuals[i]),
            format_e12(trace.h_residuals[i]),
        ));
    }
    eprintln!("terminated_at: {}", trace.terminated_at);
    write_output(args.out.as_ref(), &csv)
}

fn experiment(args: ExperimentArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let config = parse_config(&text)?;
    let report = run_experiment(&config)?;
    write_output(args.out.as_ref(), &to_csv(&report))?;
    if let Some(svg_path) = &args.svg {
        let rendered = svg::render_summary(&report);
        fs::write(svg_path, rendered)
            .map_err(|e| Error::Numerical(format!("cannot write {}: {e}", svg_path.display())))?;
    }
    Ok(())
}

fn ed_table(args: EdTableArgs) -> Result<(), Error> {
    if args.count < 2 {
        return Err(Error::Config("--count must be at least 2".into()));
    }
    if !(args.lambda_min > 0.0 && args.lambda_min < args.lambda_max && args.lambda_max <= 1.0) {
        return Err(Error::Config(
            "require 0 < lambda_min < lambda_max <= 1 (the bound is proven on (0, 1])".into(),
        ));
    }
    let pair = gauss_kernel_eigs(args.bandwidth, args.sigma2_x)
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut csv = String::from("lambda,d_lambda,bound\n");
    let (lo, hi) = (args.lambda_min.ln(), args.lambda_max.ln());
    for i in 0..args.count {
        let t = i as f64 / (args.count - 1) as f64;
        let lambda = (lo + t * (hi - lo)).exp();
        let d = effective_dim(lambda, &pair, 1e-12)?;
        let bound = effective_dim_bound(lambda, &pair)?;
        csv.push_str(&format!(
            "{},{},{}\n",
            format_e12(lambda),
            format_e12(d),
            format_e12(bound)
        ));
    }
    write_output(args.out.as_ref(), &csv)
}

fn constants(args: ConstantsArgs) -> Result<(), Error> {
    let c_q = acf_sum_constant(args.q).map_err(|e| Error::Config(e.to_string()))?;
    let gamma = gamma_n(args.q, args.n).map_err(|e| Error::Config(e.to_string()))?;
    let pair = gauss_kernel_eigs(args.bandwidth, args.sigma2_x)
        .map_err(|e| Error::Config(e.to_string()))?;
    // D is the prefactor of the logarithmic effective-dimensionality bound
    // d_λ ≤ D·log(1 + a/λ); recover it at λ = 1.
    let d_big = effective_dim_bound(1.0, &pair)? / (1.0 + pair.a).ln();
    let out = format!(
        "C(q) = {}\ngamma_n(q) = {}\na = {}\nb = {}\nD = {}\n",
        format_e12(c_q),
        format_e12(gamma),
        format_e12(pair.a),
        format_e12(pair.b),
        format_e12(d_big),
    );
    write_output(None, &out)
}
