use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sigdelta_core::filters::{h_from_design, FilterDesign};
use sigdelta_core::modulator::{run_greedy, Alphabet};
use sigdelta_core::rate::{
    efficiency_curve, multilevel_table, sigma_quantization_curve, write_bound_curve, write_efficiency_curve,
    write_position_curve, write_rate_table, DesignCache,
};
use sigdelta_core::reconstruction::{design_kernel, log_log_slope, run_sweep, write_sweep_csv, SweepConfig};
use sigdelta_core::relaxed::{gamma_from_sigma, sigma_from_gamma};
use sigdelta_core::validate::{run_all, ValidateConfig};

#[derive(Parser)]
#[command(name = "sigdelta", version, about = "Sigma-Delta filter design and simulation")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal subordinate filter as JSON.
    Design {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        level: Level,
        #[command(flatten)]
        out: Out,
    },
    /// Greedy modulator trace for a two-tone input, as CSV.
    Simulate {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        level: Level,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Oversampling ratio.
        #[arg(long, default_value_t = 64.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Measured reconstruction error against the bound over a λ grid.
    Sweep {
        /// Comma-separated filter orders.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        m: Vec<usize>,
        #[command(flatten)]
        level: Level,
        #[command(flatten)]
        grid: LambdaGrid,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        /// Phase draws per point.
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Multi-level rate and efficiency table.
    Table {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,12")]
        levels: Vec<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Coding efficiency over a σ grid.
    Efficiency {
        #[arg(long, default_value_t = 1.0)]
        sigma_min: f64,
        #[arg(long, default_value_t = 8.0)]
        sigma_max: f64,
        #[arg(long, default_value_t = 29)]
        steps: usize,
        /// Order at which limits are estimated.
        #[arg(long, default_value_t = 2000)]
        m: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Optimal order and bound over a λ grid.
    Bounds {
        /// Largest order considered.
        #[arg(long, default_value_t = 2000)]
        m: usize,
        #[command(flatten)]
        level: Level,
        #[command(flatten)]
        grid: LambdaGrid,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Relaxed versus integer support positions over a σ grid.
    Positions {
        #[arg(long, default_value_t = 1.0)]
        sigma_min: f64,
        #[arg(long, default_value_t = 8.0)]
        sigma_max: f64,
        #[arg(long, default_value_t = 141)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        j: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        m: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Runs every invariant group; exits 1 on any failure.
    Validate {
        /// Steps per stability trace.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Level {
    #[arg(long, conflicts_with = "sigma")]
    gamma: Option<f64>,
    /// Alternative to --gamma via γ = cosh(π/√σ).
    #[arg(long)]
    sigma: Option<f64>,
}

impl Level {
    fn gamma(&self) -> Result<f64, Failure> {
        let g = match (self.gamma, self.sigma) {
            (Some(g), None) => g,
            (None, Some(s)) if s > 0.0 => gamma_from_sigma(s),
            (None, Some(s)) => return Err(Failure::Invalid(format!("sigma must be positive, got {s}"))),
            _ => 1.5,
        };
        if !(g > 1.0) {
            return Err(Failure::Invalid(format!("gamma must exceed 1, got {g}")));
        }
        Ok(g)
    }
}

#[derive(Args)]
struct LambdaGrid {
    #[arg(long, default_value_t = 32.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 256.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 4)]
    lambda_steps: usize,
}

impl LambdaGrid {
    /// Geometric grid, end points included.
    fn values(&self) -> Result<Vec<f64>, Failure> {
        let (a, b, n) = (self.lambda_min, self.lambda_max, self.lambda_steps);
        if !(a > 0.0 && b >= a) || n == 0 || (n == 1 && a != b) {
            return Err(Failure::Invalid(format!("bad lambda range {a}..{b} with {n} steps")));
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        Ok((0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect())
    }
}

#[derive(Args)]
struct Out {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Out {
    fn open(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if !(lo > 0.0 && hi >= lo) || n == 0 {
        return Err(Failure::Invalid(format!("bad sigma range {lo}..{hi} with {n} steps")));
    }
    Ok((0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect())
}

enum Failure {
    Invalid(String),
    Validation(String),
}

impl From<sigdelta_core::Error> for Failure {
    fn from(e: sigdelta_core::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(format!("io: {e}"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Design { m, level, out } => {
            let design = FilterDesign::new(m, level.gamma()?)?;
            let mut w = out.open()?;
            serde_json::to_writer_pretty(&mut w, &design.to_json()).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        Command::Simulate { m, level, levels, lambda, mu, samples, seed, out } => {
            let gamma = level.gamma()?;
            if gamma > levels as f64 {
                return Err(Failure::Invalid(format!("gamma {gamma} exceeds L = {levels}")));
            }
            if !(lambda >= 1.0) {
                return Err(Failure::Invalid(format!("lambda must be at least 1, got {lambda}")));
            }
            let design = FilterDesign::new(m, gamma)?;
            let cfg = SweepConfig { gamma, levels, mu, seed, ..Default::default() };
            let spec = cfg.signal(0)?;
            let tau = 1.0 / (2.0 * cfg.omega * lambda);
            let trace = run_greedy(&h_from_design(&design), &spec.samples(tau, samples), &Alphabet::new(levels)?)?;
            trace.write_csv(out.open()?)?;
            eprintln!("max |v| = {}", trace.max_abs_state());
        }
        Command::Sweep { m, level, grid, epsilon, mu, samples, seed, out } => {
            let cfg = SweepConfig { gamma: level.gamma()?, epsilon, mu, seed, phase_draws: samples, ..Default::default() };
            let lambdas = grid.values()?;
            let points: Vec<(usize, f64)> = m.iter().flat_map(|&m| lambdas.iter().map(move |&l| (m, l))).collect();
            let rows = run_sweep(&cfg, &points)?;
            write_sweep_csv(out.open()?, &points, &rows)?;
            let failed = rows.iter().filter(|r| r.is_err()).count();
            let above = rows.iter().filter(|r| matches!(r, Ok(r) if !r.within_bound())).count();
            for &order in &m {
                let ok: Vec<_> = rows.iter().filter_map(|r| r.as_ref().ok()).filter(|r| r.m == order).cloned().collect();
                if ok.len() >= 2 {
                    eprintln!("m = {order}: log-log slope {:.3}", log_log_slope(&ok));
                }
            }
            if failed + above > 0 {
                eprintln!("warning: {failed} failed rows, {above} rows above the bound");
            }
        }
        Command::Table { levels, out } => {
            write_rate_table(out.open()?, &multilevel_table(&levels)?)?;
        }
        Command::Efficiency { sigma_min, sigma_max, steps, m, out } => {
            let pts = efficiency_curve(&linspace(sigma_min, sigma_max, steps)?, m)?;
            write_efficiency_curve(out.open()?, &pts)?;
            let loose = pts.iter().filter(|p| !p.converged).count();
            if loose > 0 {
                eprintln!("warning: {loose} points not converged at m = {m}");
            }
        }
        Command::Bounds { m, level, grid, epsilon, out } => {
            let gamma = level.gamma()?;
            let cache = DesignCache::build(gamma, m)?;
            let log_phi = design_kernel(0.5, epsilon)?.l1_norm().ln();
            let curve = cache.bound_curve(&grid.values()?, epsilon, log_phi);
            write_bound_curve(out.open()?, &curve)?;
            if curve.iter().any(|c| c.at_boundary) {
                eprintln!("warning: optimum at m_max = {m} for some λ (σ = {:.4})", sigma_from_gamma(gamma));
            }
        }
        Command::Positions { sigma_min, sigma_max, steps, j, m, out } => {
            let rows = sigma_quantization_curve(&linspace(sigma_min, sigma_max, steps)?, &j, m)?;
            write_position_curve(out.open()?, &rows)?;
        }
        Command::Validate { samples, seed, out } => {
            let cfg = ValidateConfig { seed, stability_steps: samples, ..Default::default() };
            let groups = run_all(&cfg)?;
            let mut w = out.open()?;
            for g in &groups {
                writeln!(w, "{}", g.to_json())?;
            }
            w.flush()?;
            let failed: Vec<_> = groups.iter().filter(|g| !g.passed).map(|g| g.name).collect();
            if !failed.is_empty() {
                return Err(Failure::Validation(format!("failed groups: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
