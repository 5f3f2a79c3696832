use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_mra::grid::{
    empirical_epsilon_net, empirical_separation, epsilon_net_bound, polar_mesh, sampling_condition,
    separation_lower_bound, DEFAULT_LEVEL_CAP,
};
use bergman_mra::orthonormal::PIVOT_RATIO_WARN;
use bergman_mra::transform::{analyze, analyze_function, direct_residual_norm, error_report, residuals, sample, synthesize_level};
use bergman_mra::{build_grid, io as fio, BergmanFunction, Error, ErrorClass, Grid, GridConfig, Multiresolution, NodalExpansion, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bergman-mra", version, about = "Hyperbolic wavelet multiresolution analysis of the Bergman space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the node table and print sampling diagnostics.
    Grid {
        #[command(flatten)]
        grid: GridArgs,
        /// Output file; the table goes to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print sampling diagnostics only.
    CheckSampling {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Orthonormalize the kernels at the nodes of a grid file and write the system cache.
    BuildSystem {
        #[arg(long)]
        grid: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sample a function literal at the nodes of a system.
    Sample {
        #[arg(long)]
        system: PathBuf,
        /// JSON literal: {"taylor": [[re, im], ...]} or {"kernels": [{"node": [re, im], "coeff": [re, im]}, ...]}
        #[arg(long)]
        function: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Wavelet coefficients from a samples file.
    Analyze {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate P_n f from a coefficients file.
    Synthesize {
        #[arg(long)]
        coefficients: PathBuf,
        #[arg(long)]
        system: PathBuf,
        /// Resolution level n (default: finest).
        #[arg(long)]
        level: Option<usize>,
        /// Polar evaluation mesh RxT (radial x angular); evaluates at the grid nodes when omitted.
        #[arg(long, value_parser = parse_mesh)]
        mesh: Option<(usize, usize)>,
        /// Outer radius of the mesh, < 1.
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        /// Samples to compare against at the nodes of levels 0..=n.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Tolerance for the reference comparison.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Per-level residuals ||f - P_n f|| for a function literal.
    Report {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        function: String,
        /// Use these coefficients instead of analyzing the literal.
        #[arg(long)]
        coefficients: Option<PathBuf>,
        /// Output file; the report goes to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Base a > 1 (default 2, or sqrt 2 for the sqrt2 preset).
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value_t = 2)]
    levels: usize,
    /// Preset (dyadic, sqrt2) or an explicit list N(0),N(1),... such as 1,32,128.
    #[arg(long, default_value = "dyadic")]
    schedule: String,
    /// Exponent of the dyadic preset: N(k) = 2^(2k + beta).
    #[arg(long, default_value_t = 3)]
    beta: u32,
    /// Bergman exponent for the sampling test.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Allow more than the default number of levels.
    #[arg(long)]
    allow_deep: bool,
}

fn parse_mesh(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, t) = s
        .split_once(['x', 'X', '×'])
        .ok_or_else(|| format!("mesh {s:?} is not of the form RxT"))?;
    let r: usize = r.trim().parse().map_err(|_| format!("invalid radial count {r:?}"))?;
    let t: usize = t.trim().parse().map_err(|_| format!("invalid angular count {t:?}"))?;
    if r == 0 || t == 0 {
        return Err("mesh dimensions must be positive".into());
    }
    Ok((r, t))
}

fn power_schedule(levels: usize, exp: impl Fn(usize) -> u32) -> Result<Vec<usize>> {
    let mut s = vec![1usize];
    for k in 1..=levels {
        let e = exp(k);
        let n = 1usize
            .checked_shl(e)
            .filter(|_| e < usize::BITS)
            .ok_or_else(|| Error::InvalidSchedule(format!("2^{e} nodes on level {k}")))?;
        s.push(n);
    }
    Ok(s)
}

impl GridArgs {
    fn config(&self) -> Result<GridConfig> {
        let (a, schedule) = match self.schedule.as_str() {
            "dyadic" => (self.a.unwrap_or(2.0), power_schedule(self.levels, |k| 2 * k as u32 + self.beta)?),
            "sqrt2" => (self.a.unwrap_or(std::f64::consts::SQRT_2), power_schedule(self.levels, |k| k as u32 + 2)?),
            list => {
                let s = list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidSchedule(format!("unknown preset or malformed list {list:?}")))?;
                (self.a.unwrap_or(2.0), s)
            }
        };
        let config = GridConfig::new(a, schedule, self.p)?;
        let levels = config.levels();
        if levels > DEFAULT_LEVEL_CAP {
            if !self.allow_deep {
                return Err(Error::PreconditionViolated(format!(
                    "{levels} levels exceed the default cap of {DEFAULT_LEVEL_CAP}; pass --allow-deep to proceed"
                )));
            }
            eprintln!(
                "warning: {levels} levels ({} nodes); construction cost grows with the cube of the node count",
                config.schedule().iter().sum::<usize>()
            );
        }
        Ok(config)
    }
}

fn with_path(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| with_path(path, e))?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| with_path(path, e))?))
}

fn load_system(path: &Path) -> Result<Multiresolution> {
    fio::read_system(open(path)?)
}

fn diagnostics<W: Write>(w: &mut W, grid: &Grid) -> Result<()> {
    let config = grid.config();
    writeln!(
        w,
        "a = {}, schedule = {:?}, levels = {}, M = {}",
        config.a_base(),
        config.schedule(),
        config.levels(),
        grid.len()
    )?;
    if config.levels() == 0 {
        writeln!(w, "single level: no separation or sampling diagnostics")?;
        return Ok(());
    }
    match separation_lower_bound(config) {
        Ok(d) => writeln!(w, "separation bound delta = {d:.8}")?,
        Err(e) => writeln!(w, "separation bound unavailable: {e}")?,
    }
    match epsilon_net_bound(config) {
        Ok(e) => writeln!(w, "epsilon-net radius eps0 = {e:.5}")?,
        Err(e) => writeln!(w, "epsilon-net radius unavailable: {e}")?,
    }
    match sampling_condition(config, config.p()) {
        Ok(s) => {
            let verdict = if s.holds { "holds" } else { "FAILS" };
            let rel = if s.holds { "<" } else { ">=" };
            writeln!(
                w,
                "sampling condition {verdict}: lhs = {:.5} {rel} 2p = {} (alpha = {}, eps0 = {:.5} vs sqrt(p/(p+2)) = {:.5})",
                s.lhs,
                2.0 * s.p,
                s.alpha,
                s.epsilon0,
                s.epsilon_threshold
            )?;
        }
        Err(e) => writeln!(w, "sampling condition not applicable: {e}")?,
    }
    if let Some(d) = empirical_separation(grid) {
        writeln!(w, "empirical separation = {d:.5}")?;
    }
    writeln!(w, "empirical covering radius (probe mesh) = {:.5}", empirical_epsilon_net(grid, 4096))?;
    Ok(())
}

fn warn_conditioning(mra: &Multiresolution) {
    let ratio = mra.system().pivot_ratio();
    if ratio > PIVOT_RATIO_WARN {
        eprintln!("warning: pivot ratio {ratio:.3e} exceeds {PIVOT_RATIO_WARN:.0e}; analysis amplifies sample errors accordingly");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Grid { grid, output } => {
            let grid = build_grid(&grid.config()?);
            match output {
                Some(path) => {
                    let mut w = create(&path)?;
                    fio::write_grid(&mut w, &grid)?;
                    w.flush()?;
                    diagnostics(&mut io::stdout().lock(), &grid)?;
                }
                None => {
                    let mut out = io::stdout().lock();
                    fio::write_grid(&mut out, &grid)?;
                    diagnostics(&mut io::stderr().lock(), &grid)?;
                }
            }
        }
        Command::CheckSampling { grid } => {
            let grid = build_grid(&grid.config()?);
            diagnostics(&mut io::stdout().lock(), &grid)?;
        }
        Command::BuildSystem { grid, output } => {
            let grid = fio::read_grid(open(&grid)?)?;
            let mra = Multiresolution::new(grid.clone(), bergman_mra::orthonormalize(&grid)?)?;
            let mut w = create(&output)?;
            fio::write_system(&mut w, &mra)?;
            w.flush()?;
            let audit = mra.system().orthonormality_audit();
            println!("M = {}", mra.len());
            println!(
                "orthonormality audit: max |<psi_i,psi_j> - delta_ij| = {:.3e} (diagonal {:.3e}, off-diagonal {:.3e})",
                audit.defect(),
                audit.max_diagonal,
                audit.max_off_diagonal
            );
            println!("pivot ratio = {:.3e}", mra.system().pivot_ratio());
            if mra.system().reorthogonalized() {
                println!("second projection pass applied");
            }
            warn_conditioning(&mra);
        }
        Command::Sample { system, function, output } => {
            let mra = load_system(&system)?;
            let f = fio::parse_function(&function)?;
            let s = sample(&f, &mra)?;
            let mut w = create(&output)?;
            fio::write_samples(&mut w, mra.grid(), &s)?;
            w.flush()?;
        }
        Command::Analyze { samples, system, output } => {
            let mra = load_system(&system)?;
            warn_conditioning(&mra);
            let s = fio::read_samples(open(&samples)?, mra.grid())?;
            let b = analyze(&s, &mra)?;
            let mut w = create(&output)?;
            fio::write_coefficients(&mut w, mra.grid(), &b)?;
            w.flush()?;
        }
        Command::Synthesize {
            coefficients,
            system,
            level,
            mesh,
            radius,
            reference,
            tol,
            output,
        } => {
            let mra = load_system(&system)?;
            let b = fio::read_coefficients(open(&coefficients)?, mra.grid())?;
            let n = level.unwrap_or(mra.levels());
            let points = match mesh {
                Some((r, t)) => {
                    if !(radius > 0.0 && radius < 1.0) {
                        return Err(Error::PreconditionViolated(format!("mesh radius {radius} must lie in (0, 1)")));
                    }
                    polar_mesh(radius, r, t)
                }
                None => mra.grid().nodes().to_vec(),
            };
            let values = points
                .iter()
                .map(|&z| Ok((z, synthesize_level(&b, &mra, n, z)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut w = create(&output)?;
            fio::write_evaluations(&mut w, &values)?;
            w.flush()?;
            if let Some(path) = reference {
                let s = fio::read_samples(open(&path)?, mra.grid())?;
                let count = mra.grid().count_through(n);
                let mut worst: f64 = 0.0;
                for (&a, fa) in mra.grid().nodes()[..count].iter().zip(&s) {
                    let err = (synthesize_level(&b, &mra, n, a)? - fa).norm() / (1.0 + fa.norm());
                    worst = worst.max(err);
                }
                let verdict = if worst < tol { "ok" } else { "EXCEEDS TOLERANCE" };
                println!("max |P_n f(a_j) - f(a_j)|/(1+|f(a_j)|) over {count} nodes = {worst:.3e} ({verdict}, tol {tol:e})");
            }
        }
        Command::Report {
            system,
            function,
            coefficients,
            output,
        } => {
            let mra = load_system(&system)?;
            let f = fio::parse_function(&function)?;
            let (b, report) = match coefficients {
                Some(path) => {
                    let b = fio::read_coefficients(open(&path)?, mra.grid())?;
                    let report = residuals(f.norm_sqr(), &b);
                    (b, report)
                }
                None => (analyze_function(&f, &mra)?, error_report(&f, &mra)?),
            };
            match output {
                Some(path) => {
                    let mut w = create(&path)?;
                    fio::write_error_report(&mut w, &report)?;
                    w.flush()?;
                }
                None => fio::write_error_report(&mut io::stdout().lock(), &report)?,
            }
            if let BergmanFunction::Kernels(k) = &f {
                let nodal = NodalExpansion::from(k);
                for r in &report {
                    let direct = direct_residual_norm(&nodal, &b, &mra, r.level)?;
                    eprintln!("level {}: direct residual norm {direct:.6e}", r.level);
                }
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Validation => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Io => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
