//! Command-line workbench for the piecewise-linear Riesz system.
//!
//! Exit codes: 0 success, 2 validation/usage error, 3 numerical-audit
//! failure, 4 solver non-convergence. Logging goes to stderr; stdout is
//! reserved for machine-readable results.

mod experiment;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rieszlab::approx::{approximate_barron, approximate_sobolev, Arch, ApproxInput};
use rieszlab::basis::{eval_basis, eval_scalar, BasisId, GeneratorKind, MultiIndex};
use rieszlab::lattice::{
    count_ball, enumerate_ball, enumerate_half_ball, BallSpec,
};
use rieszlab::network::{audit, build_inline, build_stacked, ReluNetwork};
use rieszlab::recovery::{
    basis_pursuit_recover, draw_samples, least_squares_recover, recovery_error_report,
    BoundContext,
};
use rieszlab::spectrum::{fourier_to_riesz, gram_matrix, mobius, riesz_to_fourier};
use rieszlab::{Config, Error};

use io::{fmt_float, load_coeffs, load_riesz, parse_list, write_json, Csv};

#[derive(Parser)]
#[command(name = "rieszlab", version, about = "Piecewise-linear Riesz system workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Const,
    Cos,
    Sin,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArchArg {
    Stacked,
    Inline,
}

impl From<ArchArg> for Arch {
    fn from(a: ArchArg) -> Arch {
        match a {
            ArchArg::Stacked => Arch::Stacked,
            ArchArg::Inline => Arch::Inline,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ls,
    Bp,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    F2r,
    R2f,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one basis function.
    Basis {
        #[command(subcommand)]
        cmd: BasisCmd,
    },
    /// Lattice point counting, enumeration, and bounds.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Möbius function value.
    Mobius { n: u64 },
    /// Convert between cosine/sine and sawtooth coefficients.
    Transform(TransformArgs),
    /// Exact Gram matrix of a ball's dilations with eigenvalue summary.
    Gram(GramArgs),
    /// Build, evaluate, audit, and export networks.
    Net {
        #[command(subcommand)]
        cmd: NetCmd,
    },
    /// Certified approximation pipelines.
    Approx {
        #[command(subcommand)]
        cmd: ApproxCmd,
    },
    /// Recover coefficients from sampled values.
    Recover(RecoverArgs),
    /// Run experiment grids from a config file.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
}

#[derive(Subcommand)]
enum BasisCmd {
    /// Print the value of 1, C_k, or S_k at a point.
    Eval {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Frequency vector, comma-separated integers (cos/sin only).
        #[arg(long)]
        k: Option<String>,
        /// Point in [0,1]^d, comma-separated.
        #[arg(long)]
        x: Option<String>,
        /// Scalar argument (evaluates the periodic generator directly).
        #[arg(long, conflicts_with_all = ["k", "x"])]
        t: Option<f64>,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Number of lattice points in the ball.
    Count(BallArgs),
    /// All points (or the half-lattice part) as CSV rows.
    Enum {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        half: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counts next to the analytic bounds over a grid.
    Bounds {
        /// Radii, comma-separated.
        #[arg(long)]
        t: String,
        /// Dimensions, comma-separated.
        #[arg(long)]
        d: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BallArgs {
    /// Radius.
    #[arg(long, conflicts_with = "t2")]
    t: Option<f64>,
    /// Exact squared radius (integer); classifies boundary shells exactly.
    #[arg(long)]
    t2: Option<u128>,
    /// Dimension.
    #[arg(long)]
    d: usize,
}

impl BallArgs {
    fn spec(&self) -> Result<BallSpec, Error> {
        match (self.t, self.t2) {
            (Some(t), None) => BallSpec::from_radius(t, self.d),
            (None, Some(q)) => BallSpec::from_radius_sq(q, self.d),
            _ => Err(Error::usage("specify exactly one of --t and --t2")),
        }
    }
}

#[derive(Args)]
struct TransformArgs {
    /// f2r: cosine/sine to sawtooth; r2f: the reverse.
    #[arg(long, value_enum)]
    dir: DirArg,
    /// Series truncation (dilation index for f2r, harmonic cap for r2f);
    /// defaults from the config.
    #[arg(long)]
    trunc: Option<u64>,
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct GramArgs {
    #[arg(long)]
    radius: f64,
    #[arg(long)]
    dim: usize,
    /// Rescale to the unit-norm system before reporting.
    #[arg(long)]
    normalized: bool,
    /// Include the constant function in the set.
    #[arg(long)]
    include_const: bool,
    /// CSV of matrix entries (row, col, value).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NetCmd {
    /// Build a network from sawtooth coefficients.
    Build {
        #[arg(long, value_enum)]
        arch: ArchArg,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Evaluate a network file at a point.
    Eval {
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
        /// Point, comma-separated.
        #[arg(long)]
        x: String,
    },
    /// Audit width/depth/weight bounds and evaluation exactness.
    Check {
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
        /// Print the full report as JSON instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// Re-emit a validated network document in canonical form.
    Export {
        #[arg(long, value_name = "FILE")]
        net: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ApproxCmd {
    /// Radius-truncation pipeline.
    Sobolev(ApproxArgs),
    /// Best n-term pipeline.
    Barron(ApproxArgs),
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "stacked")]
    arch: ArchArg,
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    radius: f64,
    #[arg(long)]
    n_samples: usize,
    /// Data-fit level for basis pursuit (empirical RMS).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long)]
    seed: u64,
    /// Coefficients of the function being sampled.
    #[arg(long, value_name = "FILE")]
    truth: PathBuf,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Write the recovered coefficients here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Redraw samples (seed+1, seed+2, …, up to 10 attempts) while the
    /// design matrix is ill-conditioned instead of reporting the failure.
    #[arg(long)]
    resample_on_fail: bool,
    /// Conditioning threshold used by --resample-on-fail.
    #[arg(long, default_value_t = 0.3)]
    min_sigma: f64,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run a grid described by a JSON config.
    Run {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
    /// Shorthand for a rates grid without a config file.
    Rates {
        #[arg(long, value_enum)]
        kind: RatesKind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        s: String,
        /// Radii (sobolev) or term counts (barron), comma-separated.
        #[arg(long)]
        grid: String,
        /// Seeds, comma-separated.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 64.0)]
        r_max: f64,
        #[arg(long, value_enum, default_value = "stacked")]
        arch: ArchArg,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RatesKind {
    Sobolev,
    Barron,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Solver(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = Config::load();
    match dispatch(cli.command, &cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn parse_point(text: &str) -> Result<Vec<f64>, Error> {
    parse_list::<f64>(text, "coordinate")
}

fn parse_index(text: &str) -> Result<MultiIndex, Error> {
    MultiIndex::new(parse_list::<i64>(text, "frequency")?)
}

fn dispatch(command: Command, cfg: &Config) -> Result<ExitCode, Error> {
    match command {
        Command::Basis { cmd } => basis_cmd(cmd),
        Command::Lattice { cmd } => lattice_cmd(cmd, cfg),
        Command::Mobius { n } => {
            println!("{}", mobius(n)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform(args) => transform_cmd(args, cfg),
        Command::Gram(args) => gram_cmd(args, cfg),
        Command::Net { cmd } => net_cmd(cmd),
        Command::Approx { cmd } => approx_cmd(cmd, cfg),
        Command::Recover(args) => recover_cmd(args, cfg),
        Command::Experiment { cmd } => experiment_cmd(cmd, cfg),
    }
}

fn basis_cmd(cmd: BasisCmd) -> Result<ExitCode, Error> {
    let BasisCmd::Eval { kind, k, x, t } = cmd;
    let value = match (kind, t) {
        (KindArg::Const, _) => 1.0,
        (KindArg::Cos, Some(t)) => eval_scalar(GeneratorKind::Cos, t)?,
        (KindArg::Sin, Some(t)) => eval_scalar(GeneratorKind::Sin, t)?,
        (kind, None) => {
            let k = parse_index(&k.ok_or_else(|| Error::usage("--k required"))?)?;
            let x = parse_point(&x.ok_or_else(|| Error::usage("--x required"))?)?;
            let id = match kind {
                KindArg::Cos => BasisId::cos(k)?,
                KindArg::Sin => BasisId::sin(k)?,
                KindArg::Const => unreachable!(),
            };
            eval_basis(&id, &x)?
        }
    };
    println!("{value}");
    Ok(ExitCode::SUCCESS)
}

fn lattice_cmd(cmd: LatticeCmd, cfg: &Config) -> Result<ExitCode, Error> {
    match cmd {
        LatticeCmd::Count(ball) => {
            println!("{}", count_ball(&ball.spec()?));
            Ok(ExitCode::SUCCESS)
        }
        LatticeCmd::Enum { ball, half, out } => {
            let spec = ball.spec()?;
            let points = if half {
                enumerate_half_ball(&spec, &cfg.lattice)?
            } else {
                enumerate_ball(&spec, &cfg.lattice)?
            };
            let header: Vec<String> = (0..spec.dim()).map(|i| format!("k{i}")).collect();
            let mut csv = Csv::new(
                &[
                    ("t", fmt_float(spec.radius())),
                    ("d", spec.dim().to_string()),
                    ("half", half.to_string()),
                ],
                &header.join(","),
            );
            for p in &points {
                csv.row(&p.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>());
            }
            emit_csv(csv, out)
        }
        LatticeCmd::Bounds { t, d, out } => {
            let ts = parse_list::<f64>(&t, "radius")?;
            let ds = parse_list::<usize>(&d, "dimension")?;
            let mut csv = Csv::new(&[], "t,d,count,bound_i,bound_ii");
            for &t in &ts {
                for &d in &ds {
                    let spec = BallSpec::from_radius(t, d)?;
                    let n = count_ball(&spec);
                    let df = d as f64;
                    let bound_i = if t > 0.0 {
                        (df * (cfg.lattice.c1 * t / df.sqrt()).ln()).exp()
                    } else {
                        1.0
                    };
                    let bound_ii = if t > 0.0 {
                        (t * t * (cfg.lattice.c2 * df / (t * t)).ln()).exp()
                    } else {
                        1.0
                    };
                    csv.row(&[
                        fmt_float(t),
                        d.to_string(),
                        n.to_string(),
                        fmt_float(bound_i),
                        fmt_float(bound_ii),
                    ]);
                }
            }
            emit_csv(csv, out)
        }
    }
}

fn emit_csv(csv: Csv, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    match out {
        Some(path) => csv.write(&path)?,
        None => print!("{}", csv.finish()),
    }
    Ok(ExitCode::SUCCESS)
}

fn transform_cmd(args: TransformArgs, cfg: &Config) -> Result<ExitCode, Error> {
    match args.dir {
        DirArg::F2r => {
            let input = match load_coeffs(&args.input)? {
                ApproxInput::Fourier(f) => f,
                ApproxInput::Riesz(_) => {
                    return Err(Error::usage(
                        "f2r expects cosine/sine coefficients (a0)",
                    ))
                }
            };
            let trunc = args.trunc.unwrap_or(cfg.spectrum.trunc_l);
            let (out, tail) = fourier_to_riesz(&input, trunc)?;
            write_json(&args.out, &out)?;
            println!("tail_bound={}", fmt_float(tail));
        }
        DirArg::R2f => {
            let input = load_riesz(&args.input)?;
            let trunc = args.trunc.unwrap_or(cfg.spectrum.trunc_p);
            let (out, tail) = riesz_to_fourier(&input, trunc)?;
            write_json(&args.out, &out)?;
            println!("tail_bound={}", fmt_float(tail));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gram_cmd(args: GramArgs, cfg: &Config) -> Result<ExitCode, Error> {
    let spec = BallSpec::from_radius(args.radius, args.dim)?;
    let mut ids = Vec::new();
    if args.include_const {
        ids.push(BasisId::Const);
    }
    for k in enumerate_half_ball(&spec, &cfg.lattice)? {
        ids.push(BasisId::Cos { k: k.clone() });
        ids.push(BasisId::Sin { k });
    }
    if ids.is_empty() {
        return Err(Error::usage("no basis functions within the radius"));
    }
    let mut gram = gram_matrix(&ids)?;
    if args.normalized {
        gram = gram.normalized();
    }
    let (lo, hi) = gram.eigen_range();
    if let Some(path) = args.out {
        let mut csv = Csv::new(
            &[
                ("radius", fmt_float(args.radius)),
                ("dim", args.dim.to_string()),
                ("normalized", args.normalized.to_string()),
            ],
            "i,j,value",
        );
        let m = gram.entries();
        for i in 0..gram.len() {
            for j in i..gram.len() {
                if m[(i, j)] != 0.0 {
                    csv.row(&[i.to_string(), j.to_string(), fmt_float(m[(i, j)])]);
                }
            }
        }
        csv.write(&path)?;
    }
    println!(
        "n={} lambda_min={} lambda_max={}",
        gram.len(),
        fmt_float(lo),
        fmt_float(hi)
    );
    Ok(ExitCode::SUCCESS)
}

fn net_cmd(cmd: NetCmd) -> Result<ExitCode, Error> {
    match cmd {
        NetCmd::Build { arch, input, out } => {
            let coeffs = load_riesz(&input)?;
            let net = match arch {
                ArchArg::Stacked => build_stacked(&coeffs)?,
                ArchArg::Inline => build_inline(&coeffs)?,
            };
            std::fs::write(&out, net.serialize())
                .map_err(|e| Error::usage(format!("cannot write {}: {e}", out.display())))?;
            println!("width={} depth={}", net.width(), net.depth());
            Ok(ExitCode::SUCCESS)
        }
        NetCmd::Eval { net, x } => {
            let net = load_net(&net)?;
            let x = parse_point(&x)?;
            println!("{}", net.eval(&x)?);
            Ok(ExitCode::SUCCESS)
        }
        NetCmd::Check { net, json } => {
            let net = load_net(&net)?;
            let report = audit(&net)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?
                );
            } else {
                println!(
                    "architecture={:?} width={}/{} depth={}/{:.3} exactness={:.3e}",
                    report.architecture,
                    report.width,
                    report.width_bound,
                    report.depth,
                    report.depth_bound,
                    report.exactness_max_err
                );
                if let (Some(w), Some(l)) = (report.weight_max, report.weight_limit) {
                    println!("weight_max={} weight_limit={}", fmt_float(w), fmt_float(l));
                }
                for v in &report.violations {
                    println!("violation: {v}");
                }
            }
            if report.ok() {
                println!("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        NetCmd::Export { net, out } => {
            let net = load_net(&net)?;
            std::fs::write(&out, net.serialize())
                .map_err(|e| Error::usage(format!("cannot write {}: {e}", out.display())))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_net(path: &PathBuf) -> Result<ReluNetwork, Error> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    ReluNetwork::deserialize(&bytes)
}

fn approx_cmd(cmd: ApproxCmd, cfg: &Config) -> Result<ExitCode, Error> {
    let (args, is_sobolev) = match cmd {
        ApproxCmd::Sobolev(a) => (a, true),
        ApproxCmd::Barron(a) => (a, false),
    };
    let input = load_coeffs(&args.input)?;
    let (net, report) = if is_sobolev {
        approximate_sobolev(&input, args.s, args.eps, args.arch.into(), cfg)?
    } else {
        approximate_barron(&input, args.s, args.eps, args.arch.into(), cfg)?
    };
    std::fs::write(&args.out, net.serialize())
        .map_err(|e| Error::usage(format!("cannot write {}: {e}", args.out.display())))?;
    if let Some(path) = args.report {
        write_json(&path, &report)?;
    }
    println!(
        "radius={} n_terms={} width={} depth={} error_l2={} certified={}",
        fmt_float(report.radius),
        report.n_terms,
        report.width,
        report.depth,
        fmt_float(report.error_l2_exact),
        fmt_float(report.error_bound_certified)
    );
    Ok(ExitCode::SUCCESS)
}

fn recover_cmd(args: RecoverArgs, cfg: &Config) -> Result<ExitCode, Error> {
    let truth = load_riesz(&args.truth)?;
    let mut attempt = 0u64;
    let (recovered, mut report) = loop {
        let samples = draw_samples(&truth, args.n_samples, args.seed + attempt)?;
        let outcome = match args.method {
            MethodArg::Ls => least_squares_recover(&samples, args.radius, cfg)?,
            MethodArg::Bp => basis_pursuit_recover(&samples, args.radius, args.delta, cfg)?,
        };
        let ill = outcome.1.rank_deficient || outcome.1.sigma_min < args.min_sigma;
        if args.resample_on_fail && ill && attempt < 10 {
            eprintln!(
                "attempt {attempt}: sigma_min = {:.3e}, redrawing samples",
                outcome.1.sigma_min
            );
            attempt += 1;
            continue;
        }
        break outcome;
    };
    let errors = recovery_error_report(
        &truth,
        &recovered,
        &[2.0, f64::INFINITY],
        4096,
        args.seed,
        Some(BoundContext {
            radius: args.radius,
            s: 0.5,
            k_sparsity: recovered.support_len().max(1),
            c_s: 1.0,
        }),
    )?;
    report.error_l2_exact = Some(errors.error_l2_exact);
    if let Some(path) = &args.out {
        write_json(path, &recovered)?;
    }
    if let Some(path) = &args.report {
        #[derive(serde::Serialize)]
        struct FullReport<'a> {
            recovery: &'a rieszlab::recovery::RecoveryReport,
            errors: &'a rieszlab::recovery::ErrorReport,
        }
        write_json(
            path,
            &FullReport {
                recovery: &report,
                errors: &errors,
            },
        )?;
    }
    println!(
        "n_basis={} residual_rms={} err_l2={} sigma_min={} iterations={}",
        report.n_basis,
        fmt_float(report.residual_rms),
        fmt_float(errors.error_l2_exact),
        fmt_float(report.sigma_min),
        report.iterations
    );
    Ok(ExitCode::SUCCESS)
}

fn experiment_cmd(cmd: ExperimentCmd, cfg: &Config) -> Result<ExitCode, Error> {
    match cmd {
        ExperimentCmd::Run { config } => {
            let exp = experiment::ExperimentConfig::load(&config)?;
            let hash = experiment::run_to_file(&exp, cfg)?;
            println!("wrote {} config_hash=sha256:{hash}", exp.output);
            Ok(ExitCode::SUCCESS)
        }
        ExperimentCmd::Rates {
            kind,
            dim,
            s,
            grid,
            seeds,
            r_max,
            arch,
            out,
        } => {
            let s_values = parse_list::<f64>(&s, "smoothness")?;
            let seeds = parse_list::<u64>(&seeds, "seed")?;
            let arch = match arch {
                ArchArg::Stacked => experiment::ArchChoice::Stacked,
                ArchArg::Inline => experiment::ArchChoice::Inline,
            };
            let exp = match kind {
                RatesKind::Sobolev => experiment::ExperimentConfig {
                    kind: experiment::ExperimentKind::RatesSobolev,
                    dims: vec![dim],
                    s_values,
                    radii: parse_list::<f64>(&grid, "radius")?,
                    n_terms: vec![],
                    n_samples: vec![],
                    seeds,
                    r_max,
                    arch,
                    method: None,
                    delta: None,
                    sparsity: None,
                    t_values: vec![],
                    d_values: vec![],
                    output: out.display().to_string(),
                },
                RatesKind::Barron => experiment::ExperimentConfig {
                    kind: experiment::ExperimentKind::RatesBarron,
                    dims: vec![dim],
                    s_values,
                    radii: vec![],
                    n_terms: parse_list::<usize>(&grid, "term count")?,
                    n_samples: vec![],
                    seeds,
                    r_max,
                    arch,
                    method: None,
                    delta: None,
                    sparsity: None,
                    t_values: vec![],
                    d_values: vec![],
                    output: out.display().to_string(),
                },
            };
            let hash = experiment::run_to_file(&exp, cfg)?;
            println!("wrote {} config_hash=sha256:{hash}", exp.output);
            Ok(ExitCode::SUCCESS)
        }
    }
}
