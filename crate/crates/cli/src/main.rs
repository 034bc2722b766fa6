//! `toda`: flows, spectra, star products and verification suites from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 integration or eigensolver failure.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toda_core::flow::{drift_report, integrate, FlowError, IntegratorConfig, Method};
use toda_core::lax::{LaxFamily, LaxSystem};
use toda_core::liepoisson::{gutt_star, parse_function, r_bracket_constants, render_function};
use toda_core::spectral::{
    change_of_variable, compare_spectra, problems, solve, OdeEigenproblem, SpectralError, VarMap,
};
use toda_core::verify::{self, Suite};

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "toda", version, about = "Open Toda systems: flows, spectra, star products and checks")]
struct Cli {
    /// Key-value config file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a Lax flow and write the trajectory CSV.
    Flow(FlowArgs),
    /// Solve a Schrödinger eigenproblem and write the `k,E_k` CSV.
    Spectrum(SpectrumArgs),
    /// Gutt star product of two polynomials on gl(n), or the structure constants.
    Star(StarArgs),
    /// Run a verification suite: algebra, hierarchy, glN, spectral or all.
    Verify { suite: String },
}

#[derive(Args, Debug)]
struct FlowArgs {
    /// a1, a1toy, a2, hierarchy or gl.
    #[arg(long)]
    system: Option<String>,
    /// Deformation exponent of a1toy.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i32>,
    /// Hierarchy index.
    #[arg(long)]
    m: Option<u32>,
    /// Matrix size of gl.
    #[arg(long)]
    size: Option<usize>,
    /// Initial state, comma separated. Defaults: (0, 1) for a1 and a1toy, a symmetric
    /// matrix for gl, otherwise drawn from [-1, 1] with the seed.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    /// Horizon T (default 10).
    #[arg(long)]
    t: Option<f64>,
    /// RK4 step, or the initial step of dp (default 1e-3).
    #[arg(long)]
    h: Option<f64>,
    /// rk4 or dp.
    #[arg(long)]
    method: Option<String>,
    /// Relative tolerance of dp.
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance of dp.
    #[arg(long)]
    atol: Option<f64>,
    /// Record every stride-th step (default 100).
    #[arg(long)]
    stride: Option<usize>,
    /// Seed of the default initial state.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// schrodinger1, schrodinger2, toy, toy-u, oscillator or box.
    #[arg(long)]
    problem: Option<String>,
    /// Deformation exponent of toy and toy-u.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i32>,
    /// Interval `a:b`.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Interior grid points.
    #[arg(long = "N")]
    grid: Option<usize>,
    /// Number of levels (default 5).
    #[arg(long)]
    k: Option<usize>,
    /// identity, exp (x = e^y) or u (the linearising substitution of the toy problem).
    #[arg(long)]
    map: Option<String>,
    /// Append the eigenvector table.
    #[arg(long)]
    vectors: bool,
    /// Problem to solve on the same domain and compare against.
    #[arg(long)]
    compare: Option<String>,
    /// Relative tolerance of the comparison (default 1e-3).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StarArgs {
    /// Matrix size n of gl(n) (default 2).
    #[arg(long)]
    size: Option<usize>,
    /// Polynomial in L1_1, L1_2, ...
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Second factor.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Print the structure constants CSV instead.
    #[arg(long)]
    constants: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Verify(String),
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Config(_) => 2,
            Failure::Run(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::Config(m) | Failure::Run(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Flow(a) => {
            cfg.set_opt("system", a.system)?;
            cfg.set_opt("n", a.n)?;
            cfg.set_opt("m", a.m)?;
            cfg.set_opt("size", a.size)?;
            cfg.set_opt("z0", a.z0)?;
            cfg.set_opt("t", a.t)?;
            cfg.set_opt("h", a.h)?;
            cfg.set_opt("method", a.method)?;
            cfg.set_opt("rtol", a.rtol)?;
            cfg.set_opt("atol", a.atol)?;
            cfg.set_opt("stride", a.stride)?;
            cfg.set_opt("seed", a.seed)?;
            cfg.set_opt("out", a.out.map(|p| p.display().to_string()))?;
            cmd_flow(&cfg)
        }
        Command::Spectrum(a) => {
            cfg.set_opt("problem", a.problem)?;
            cfg.set_opt("n", a.n)?;
            cfg.set_opt("domain", a.domain)?;
            cfg.set_opt("grid", a.grid)?;
            cfg.set_opt("k", a.k)?;
            cfg.set_opt("map", a.map)?;
            if a.vectors {
                cfg.set("vectors", "true")?;
            }
            cfg.set_opt("compare", a.compare)?;
            cfg.set_opt("rel_tol", a.rel_tol)?;
            cfg.set_opt("out", a.out.map(|p| p.display().to_string()))?;
            cmd_spectrum(&cfg)
        }
        Command::Star(a) => {
            cfg.set_opt("size", a.size)?;
            cfg.set_opt("f", a.f)?;
            cfg.set_opt("g", a.g)?;
            cfg.set_opt("out", a.out.map(|p| p.display().to_string()))?;
            cmd_star(&cfg, a.constants)
        }
        Command::Verify { suite } => cmd_verify(&suite),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match cfg.raw("out") {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Config(format!("cannot write {path}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Run(e.to_string()))
        }
    }
}

fn lax_family(cfg: &RunConfig) -> Result<LaxFamily, Failure> {
    let system = cfg.raw("system").unwrap_or("a2");
    Ok(match system {
        "a1" => LaxFamily::A1,
        "a1toy" => LaxFamily::A1Toy(cfg.get_or("n", 0)?),
        "a2" => LaxFamily::A2,
        "hierarchy" => {
            let m: u32 = cfg.get_or("m", 1)?;
            if m == 0 {
                return Err(Failure::Config("hierarchy index m starts at 1".into()));
            }
            LaxFamily::A2Hierarchy(m)
        }
        "gl" => {
            let n: usize = cfg.get_or("size", 2)?;
            if n < 2 {
                return Err(Failure::Config("gl needs size >= 2".into()));
            }
            LaxFamily::GL(n)
        }
        other => return Err(Failure::Config(format!("unknown system {other} (a1, a1toy, a2, hierarchy, gl)"))),
    })
}

fn cmd_flow(cfg: &RunConfig) -> Result<(), Failure> {
    let family = lax_family(cfg)?;
    let sys = LaxSystem::<f64>::new(family);
    let dim = sys.state_dim();
    let z0 = match cfg.floats("z0")? {
        Some(z) if z.len() == dim => z,
        Some(z) => {
            return Err(Failure::Config(format!("z0 has {} entries, {} expects {dim}", z.len(), family.label())))
        }
        None => match family {
            LaxFamily::A1 | LaxFamily::A1Toy(_) => vec![0.0, 1.0],
            LaxFamily::GL(n) => {
                // Symmetric data stays symmetric and bounded under the Cholesky flow.
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.get_or("seed", 0)?);
                let mut z = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = rng.gen_range(-1.0..=1.0);
                        z[i * n + j] = v;
                        z[j * n + i] = v;
                    }
                }
                z
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.get_or("seed", 0)?);
                (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()
            }
        },
    };
    let method = match cfg.raw("method").unwrap_or("rk4") {
        "rk4" => Method::Rk4 { h: cfg.get_or("h", 1e-3)? },
        "dp" => Method::DormandPrince {
            rtol: cfg.get_or("rtol", 1e-10)?,
            atol: cfg.get_or("atol", 1e-12)?,
            h0: cfg.get_or("h", 1e-3)?,
        },
        other => return Err(Failure::Config(format!("unknown method {other} (rk4, dp)"))),
    };
    let icfg = IntegratorConfig { method, horizon: cfg.get_or("t", 10.0)?, stride: cfg.get_or("stride", 100)? };
    icfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    sys.state_rhs(&z0).map_err(|e| Failure::Config(format!("initial state: {e}")))?;
    let traj = integrate(&sys, &z0, &icfg).map_err(|e| match e {
        FlowError::Config(m) => Failure::Config(m),
        other => Failure::Run(other.to_string()),
    })?;
    let drift = drift_report(&traj, &[1, 2, 3]);
    let mut csv = traj.to_csv();
    csv.push_str(&drift.csv_footer());
    emit(cfg, &csv)?;
    let ret = traj.last_state().iter().zip(&z0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    eprintln!(
        "{}: {} samples, T = {}, return distance {ret:.3e}, eigenvalue drift {:.3e}, max trL^k drift {:.3e}",
        family.label(),
        traj.len(),
        icfg.horizon,
        drift.eigenvalue_drift,
        drift.max_invariant_drift()
    );
    Ok(())
}

fn default_domain(problem: &str, n: i32) -> (f64, f64) {
    match problem {
        "schrodinger1" => (-8.0, 3.0),
        "schrodinger2" => ((-8.0f64).exp(), 3.0f64.exp()),
        "toy" if n == 0 => (-10.0, 10.0),
        "toy" => (0.05, 6.0),
        "toy-u" => problems::u_domain(n, (0.05, 6.0)),
        "box" => (0.0, std::f64::consts::PI),
        _ => (-10.0, 10.0),
    }
}

fn build(problem: &str, n: i32, domain: (f64, f64)) -> Result<OdeEigenproblem, Failure> {
    Ok(match problem {
        "schrodinger1" => problems::schrodinger1(domain),
        "schrodinger2" => problems::schrodinger2(domain),
        "toy" => problems::toy_q(n, domain),
        "toy-u" if n == 1 => return Err(Failure::Config("toy-u needs n != 1".into())),
        "toy-u" => problems::toy_u(n, domain),
        "oscillator" => problems::oscillator(domain),
        "box" => problems::free_box(domain),
        other => {
            return Err(Failure::Config(format!(
                "unknown problem {other} (schrodinger1, schrodinger2, toy, toy-u, oscillator, box)"
            )))
        }
    })
}

fn spectral_failure(e: SpectralError) -> Failure {
    match e {
        SpectralError::NoConvergence => Failure::Run(e.to_string()),
        other => Failure::Config(other.to_string()),
    }
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<(), Failure> {
    let problem = cfg.require("problem")?.to_string();
    let n: i32 = cfg.get_or("n", 0)?;
    let domain = cfg.interval("domain")?.unwrap_or_else(|| default_domain(&problem, n));
    let grid: usize = cfg.get_or("grid", 4096)?;
    let k: usize = cfg.get_or("k", 5)?;
    let base = build(&problem, n, domain)?;
    let prob = match cfg.raw("map").unwrap_or("identity") {
        "identity" => base,
        "exp" => {
            if domain.0 <= 0.0 {
                return Err(Failure::Config("exp map needs a positive domain".into()));
            }
            change_of_variable(&base, VarMap::Exp, (domain.0.ln(), domain.1.ln())).map_err(spectral_failure)?
        }
        "u" => {
            if problem != "toy" {
                return Err(Failure::Config("u map applies to the toy problem".into()));
            }
            let m = problems::u_map(n).map_err(spectral_failure)?;
            change_of_variable(&base, m, problems::u_domain(n, domain)).map_err(spectral_failure)?
        }
        other => return Err(Failure::Config(format!("unknown map {other} (identity, exp, u)"))),
    };
    let spectrum = solve(&prob, grid, k).map_err(spectral_failure)?;
    let with_vectors = cfg.get_or("vectors", false)?;
    emit(cfg, &spectrum.to_csv(with_vectors))?;
    eprintln!("{}", prob.describe());
    if let Some(other) = cfg.raw("compare") {
        let reference = build(other, n, prob.domain)?;
        let rs = solve(&reference, grid, k).map_err(spectral_failure)?;
        let tol: f64 = cfg.get_or("rel_tol", 1e-3)?;
        let c = compare_spectra(&spectrum, &rs, k, tol);
        eprintln!("compare {other}: relative deviation {:.3e}, tolerance {tol:.0e}", c.max_relative_deviation);
        if !c.passed {
            return Err(Failure::Verify(format!("spectra differ by {:.3e}", c.max_relative_deviation)));
        }
    }
    Ok(())
}

fn cmd_star(cfg: &RunConfig, constants: bool) -> Result<(), Failure> {
    let n: usize = cfg.get_or("size", 2)?;
    if n < 2 {
        return Err(Failure::Config("star needs size >= 2".into()));
    }
    let s = r_bracket_constants(n);
    if constants {
        return emit(cfg, &s.to_csv());
    }
    let parse = |key: &str| -> Result<_, Failure> {
        parse_function(&s, cfg.require(key)?).map_err(|e| Failure::Config(format!("{key}: {e}")))
    };
    let (f, g) = (parse("f")?, parse("g")?);
    let star = gutt_star(&f, &g, &s);
    let mut out = format!("# f = {}\n# g = {}\n", render_function(&s, &f), render_function(&s, &g));
    for (k, p) in star.orders().iter().enumerate() {
        out.push_str(&format!("hbar^{k}: {}\n", render_function(&s, p)));
    }
    if star.is_zero() {
        out.push_str("hbar^0: 0\n");
    }
    emit(cfg, &out)
}

fn cmd_verify(suite: &str) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(Failure::Config)?;
    let report = verify::run(suite);
    print!("{report}");
    let failed = report.failures().count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verify(format!("{failed} of {} checks failed", report.checks.len())))
    }
}
