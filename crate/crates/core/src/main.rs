//! Command-line driver: verification runs, manifold sampling, spectrum
//! estimation, sigma certificates, and report audits.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use isopar::cli_report::{
    audit_report, load_config_file, parse_variant, resolve_config, run, Overrides,
};
use isopar::clifford_core::CliffordSystem;
use isopar::curvature_spectra::sigma_certificate;
use isopar::foliation_manifolds::{sample_coords, ManifoldId, SignTag};
use isopar::spectral_estimation::{estimate_spectrum, estimate_sphere_spectrum, GraphSpec};

#[derive(Parser)]
#[command(
    name = "isopar",
    version,
    about = "Numerical verification workbench for Clifford-type isoparametric foliations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// System selector shared by the subcommands.
#[derive(Args, Clone)]
struct SysArgs {
    /// Number of operators beyond the first in the Clifford system
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Representation multiplicity; the ambient dimension is 2 k delta(m)
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Construction variant; the quaternionic ones need (m,k) = (4,2)
    #[arg(long, default_value = "standard")]
    variant: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

impl SysArgs {
    fn build(&self) -> Result<CliffordSystem> {
        let variant = parse_variant(&self.variant)?;
        Ok(CliffordSystem::build(self.m, self.k, variant)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and write a machine-readable report
    Verify(VerifyArgs),
    /// Sample points on a foliation manifold as CSV
    Sample(SampleArgs),
    /// Estimate the low Laplace spectrum of a manifold from a neighbourhood graph
    Spectrum(SpectrumArgs),
    /// Certify the extremes of the normalized second fundamental form
    Sigma(SigmaArgs),
    /// Diff a written report against the built-in claim registry
    ReportAudit {
        /// Path to a report.json produced by `verify`
        report: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON config file; command-line flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// standard, q-same, or q-opposite
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count for the exact suites
    #[arg(long)]
    samples: Option<usize>,
    /// Graph size for the spectral suite
    #[arg(long)]
    spectral_points: Option<usize>,
    /// Base points for the sigma certificates
    #[arg(long)]
    sigma_points: Option<usize>,
    /// Optimizer restarts per sigma base point
    #[arg(long)]
    sigma_restarts: Option<usize>,
    /// Scale factor applied to every acceptance threshold
    #[arg(long)]
    tolerance_scale: Option<f64>,
    /// Suite to run (repeatable); default is all of them
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Directory for report.json and the CSV artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread budget (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    sys: SysArgs,
    /// Manifold name: sphere, m0, n2, u0:0.4, v2:-0.3, fu0:+, fv2:-, h:0.3
    #[arg(long, default_value = "m1")]
    manifold: String,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Output CSV file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    sys: SysArgs,
    /// Manifold name as in `sample`, or s<d> for a standalone round sphere
    #[arg(long, default_value = "m1")]
    manifold: String,
    /// Graph nodes
    #[arg(long, default_value_t = 4000)]
    points: usize,
    #[arg(long, default_value_t = 24)]
    neighbors: usize,
    /// Bandwidth as a multiple of the mean nearest-neighbour distance
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Number of nonzero eigenvalues to report
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// Output CSV file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SigmaArgs {
    #[command(flatten)]
    sys: SysArgs,
    /// plus (descending family), minus (ascending family), or both
    #[arg(long, default_value = "both")]
    side: String,
    #[arg(long, default_value_t = 8)]
    points: usize,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
}

/// Names used by `sample` and `spectrum`: sphere, m<i>, n<i>, u<i>:<c>,
/// v<i>:<c>, fu<i>:+|-, fv<i>:+|-, h:<t>.
fn parse_manifold(s: &str) -> Result<ManifoldId> {
    let s = s.trim().to_ascii_lowercase();
    if s == "sphere" {
        return Ok(ManifoldId::Sphere);
    }
    let index = |text: &str| -> Result<usize> {
        text.parse::<usize>().with_context(|| format!("bad manifold index in '{s}'"))
    };
    let level = |text: &str| -> Result<f64> {
        text.parse::<f64>().with_context(|| format!("bad level value in '{s}'"))
    };
    let sign = |text: &str| -> Result<SignTag> {
        match text {
            "+" | "plus" => Ok(SignTag::Plus),
            "-" | "minus" => Ok(SignTag::Minus),
            other => bail!("bad sign '{other}' in '{s}' (expected + or -)"),
        }
    };
    if let Some((head, tail)) = s.split_once(':') {
        if head == "h" {
            return Ok(ManifoldId::Hypersurface { t: level(tail)? });
        }
        if let Some(i) = head.strip_prefix("fu") {
            return Ok(ManifoldId::FocalU { i: index(i)?, sign: sign(tail)? });
        }
        if let Some(i) = head.strip_prefix("fv") {
            return Ok(ManifoldId::FocalV { i: index(i)?, sign: sign(tail)? });
        }
        if let Some(i) = head.strip_prefix('u') {
            return Ok(ManifoldId::LevelU { i: index(i)?, c: level(tail)? });
        }
        if let Some(i) = head.strip_prefix('v') {
            return Ok(ManifoldId::LevelV { i: index(i)?, c: level(tail)? });
        }
    } else {
        if let Some(i) = s.strip_prefix('m') {
            return Ok(ManifoldId::M(index(i)?));
        }
        if let Some(i) = s.strip_prefix('n') {
            return Ok(ManifoldId::N(index(i)?));
        }
    }
    bail!("unrecognized manifold '{s}' (try sphere, m1, n2, u0:0.4, fu0:+, h:0.3)")
}

fn write_lines(out: Option<&PathBuf>, lines: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            for line in lines {
                writeln!(file, "{line}")?;
            }
        }
        None => {
            for line in lines {
                println!("{line}");
            }
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let file = match &args.config {
        Some(path) => Some(
            load_config_file(path).with_context(|| format!("reading {}", path.display()))?,
        ),
        None => None,
    };
    let ov = Overrides {
        m: args.m,
        k: args.k,
        variant: args.variant,
        seed: args.seed,
        samples: args.samples,
        spectral_points: args.spectral_points,
        sigma_points: args.sigma_points,
        sigma_restarts: args.sigma_restarts,
        tolerance_scale: args.tolerance_scale,
        suites: args.suites,
        out: args.out,
        threads: args.threads,
    };
    let cfg = resolve_config(file.as_ref(), &ov)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let report = run(&cfg)?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    if let Some(out) = &cfg.out_dir {
        println!("report: {}", out.join("report.json").display());
    }
    let failures = report.gating_failures();
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for claim in failures {
            eprintln!("FAILED {}: {}", claim.id, claim.metrics);
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_sample(args: SampleArgs) -> Result<ExitCode> {
    let sys = args.sys.build()?;
    let id = parse_manifold(&args.manifold)?;
    let points = sample_coords(&sys, id, args.count, args.sys.seed)?;
    let mut lines = Vec::with_capacity(points.len() + 1);
    lines.push(
        (0..sys.dim_ambient()).map(|j| format!("x{j}")).collect::<Vec<_>>().join(","),
    );
    for p in &points {
        lines.push(p.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(","));
    }
    write_lines(args.out.as_ref(), &lines)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<ExitCode> {
    let spec = GraphSpec {
        n_points: args.points,
        k_neighbors: args.neighbors,
        bandwidth_scale: args.scale,
        seed: args.sys.seed,
    };
    let name = args.manifold.trim().to_ascii_lowercase();
    let est = if let Some(d) = name.strip_prefix('s').and_then(|d| d.parse::<usize>().ok()) {
        estimate_sphere_spectrum(d, &spec, args.count)?
    } else {
        let sys = args.sys.build()?;
        estimate_spectrum(&sys, parse_manifold(&name)?, &spec, args.count)?
    };
    let mut lines = vec![
        format!(
            "# manifold={} dim={} n_points={} k_neighbors={} bandwidth={:.6e}",
            est.manifold, est.dim, est.n_points, est.k_neighbors, est.bandwidth
        ),
        format!(
            "# calibration_constant={:.6e} calibration_residual={:.3e} zero_mode={:.3e}",
            est.calibration_constant, est.calibration_residual, est.zero_mode
        ),
        "index,eigenvalue".to_string(),
    ];
    for (j, v) in est.eigenvalues.iter().enumerate() {
        lines.push(format!("{},{v:.12e}", j + 1));
    }
    write_lines(args.out.as_ref(), &lines)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sigma(args: SigmaArgs) -> Result<ExitCode> {
    let sys = args.sys.build()?;
    let sides = match args.side.trim().to_ascii_lowercase().as_str() {
        "plus" => vec![SignTag::Plus],
        "minus" => vec![SignTag::Minus],
        "both" => vec![SignTag::Plus, SignTag::Minus],
        other => bail!("unknown side '{other}' (expected plus, minus, or both)"),
    };
    let mut out = Vec::new();
    for side in sides {
        let cert = sigma_certificate(&sys, side, args.points, args.restarts, args.sys.seed)?;
        out.push(serde_json::to_value(&cert)?);
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_audit(report: PathBuf) -> Result<ExitCode> {
    let outcome = audit_report(&report)?;
    println!("{}", serde_json::to_string_pretty(&outcome)?);
    if outcome.clean() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Sample(args) => cmd_sample(args),
        Cmd::Spectrum(args) => cmd_spectrum(args),
        Cmd::Sigma(args) => cmd_sigma(args),
        Cmd::ReportAudit { report } => cmd_audit(report),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
