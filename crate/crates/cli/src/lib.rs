//! `gcr generate | verify | flatcheck`.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 config or domain error, 3 geometric degeneracy.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gcr_core::geometry::{JetConfig, JetSource, DEFAULT_FD_STEP};
use gcr_core::io::{obj_string, scalars_csv, ConfigError, Manifest, ResolvedSurface, SurfaceConfig};
use gcr_core::verifier::{check_flatness, full_report, Grid, Tolerances, DEFAULT_FIELD_STEP};
use gcr_core::{Execution, VerifyOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gcr", version, about = "Build and verify space-like GCR surfaces in Minkowski 3-space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write mesh.obj, scalars.csv and manifest.json.
    Generate(CommonArgs),
    /// Run every check and write report.json.
    Verify(CommonArgs),
    /// Summarize flatness and write flatness.json.
    Flatcheck(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Jets {
    Analytic,
    Fd,
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// Surface config, or a manifest written by `generate`.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Grid size as NSxNT.
    #[arg(long, default_value = "41x41", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Where partial derivatives come from.
    #[arg(long, value_enum, default_value_t = Jets::Analytic)]
    pub jets: Jets,
    /// Finite-difference step for surface jets.
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Finite-difference step for derived fields (θ, k₂, e₁, metric).
    #[arg(long, default_value_t = DEFAULT_FIELD_STEP)]
    pub field_step: f64,
    /// Tolerance override, repeatable, e.g. `--tol principal_direction=1e-6`.
    #[arg(long = "tol", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    /// Run the grid sweep on one thread.
    #[arg(long)]
    pub sequential: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid must look like 41x41, got {s:?}"))?;
    let ns: usize = a.trim().parse().map_err(|e| format!("bad NS {a:?}: {e}"))?;
    let nt: usize = b.trim().parse().map_err(|e| format!("bad NT {b:?}: {e}"))?;
    if ns < 3 || nt < 3 {
        return Err(format!("grid needs NS, NT >= 3, got {ns}x{nt}"));
    }
    Ok((ns, nt))
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = value.trim().parse().map_err(|e| format!("bad tolerance value {value:?}: {e}"))?;
    Ok((name.trim().to_string(), v))
}

type Action = fn(&Prepared, &Path) -> Result<i32, String>;

struct Prepared {
    surface: ResolvedSurface,
    grid: Grid,
    opts: VerifyOptions,
}

fn prepare(args: &CommonArgs) -> Result<Prepared, String> {
    if !(args.fd_step > 0.0 && args.fd_step.is_finite()) {
        return Err(format!("--fd-step must be positive, got {}", args.fd_step));
    }
    if !(args.field_step > 0.0 && args.field_step.is_finite()) {
        return Err(format!("--field-step must be positive, got {}", args.field_step));
    }
    let cfg = SurfaceConfig::load(&args.config).map_err(describe)?;
    let surface = cfg.resolve().map_err(describe)?;
    let grid = surface.grid(args.grid.0, args.grid.1);
    let source = match args.jets {
        Jets::Analytic => JetSource::Analytic,
        Jets::Fd => JetSource::FiniteDifference,
    };
    let jet = JetConfig { source, step: args.fd_step };
    let mut opts = VerifyOptions {
        jet,
        field_step: args.field_step,
        tolerances: None,
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    if !args.tol.is_empty() {
        let probe = grid.points()[0];
        let analytic = source == JetSource::Analytic && surface.map.analytic_jet(probe.0, probe.1).is_some();
        let mut tol = if analytic { Tolerances::analytic() } else { Tolerances::finite_difference() };
        for (name, v) in &args.tol {
            tol.set(name, *v)?;
        }
        opts.tolerances = Some(tol);
    }
    Ok(Prepared { surface, grid, opts })
}

fn describe(e: ConfigError) -> String {
    e.to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> Result<String, String> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(name.to_string())
}

fn generate(p: &Prepared, out: &Path) -> Result<i32, String> {
    let mut vertices = Vec::with_capacity(p.grid.len());
    for (s, t) in p.grid.points() {
        match p.surface.map.eval(s, t) {
            Some(v) if v.is_finite() => vertices.push(v),
            _ => {
                eprintln!("surface is not defined at (s, t) = ({s}, {t})");
                return Ok(EXIT_DEGENERATE);
            }
        }
    }
    let report = full_report(p.surface.map.as_ref(), &p.grid, &p.opts);
    let files = vec![
        write(out, "mesh.obj", &obj_string(&vertices, p.grid.ns, p.grid.nt))?,
        write(out, "scalars.csv", &scalars_csv(&report.points))?,
    ];
    let mut manifest = Manifest::new(&p.surface, &report, files);
    manifest.files.push("manifest.json".into());
    write(out, "manifest.json", &manifest.to_json())?;
    println!("wrote {} vertices, {} faces to {}", manifest.vertex_count, manifest.face_count, out.display());
    if let Some(th) = manifest.theta {
        println!("theta in [{:.6}, {:.6}]", th.min, th.max);
    }
    Ok(EXIT_PASS)
}

fn verify(p: &Prepared, out: &Path) -> Result<i32, String> {
    let report = full_report(p.surface.map.as_ref(), &p.grid, &p.opts);
    write(out, "report.json", &report.to_json())?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    let flags = report.flags;
    println!(
        "flagged: {} umbilic, {} tangential, {} stencil, {} error",
        flags.umbilic, flags.tangential_degenerate, flags.stencil_degenerate, flags.error
    );
    if let Some(first) = report.points.iter().find_map(|p| p.error.as_ref()) {
        eprintln!("degenerate point: {first}");
    }
    match report.leading_violation {
        Some(c) => println!("overall {:?}, leading violation {c}", report.outcome),
        None => println!("overall {:?}", report.outcome),
    }
    Ok(report.exit_code())
}

fn flatcheck(p: &Prepared, out: &Path) -> Result<i32, String> {
    let f = check_flatness(p.surface.map.as_ref(), &p.grid, &p.opts);
    write(out, "flatness.json", &f.to_json())?;
    println!(
        "max |K_ext| {:.3e}, min |K_ext| {:.3e}, max |k_e1| {:.3e}",
        f.max_abs_k_ext, f.min_abs_k_ext, f.max_abs_k_e1
    );
    if let Some(v) = f.flat_condition {
        println!("max |e1(theta) + sinh(theta)/mu| {v:.3e}");
    }
    if let Some(v) = f.theta_plus_u {
        println!("max |theta + u - c1| {v:.3e}");
    }
    if let Some(k) = &f.k1_candidates {
        println!("k1 candidates: d/ds {:.3e}, e1 {:.3e} ({})", k.s_derivative, k.e1_derivative, k.holds);
    }
    println!("overall {:?} ({})", f.outcome, if f.flat { "flat" } else { "not flat" });
    Ok(f.exit_code())
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let (args, action): (&CommonArgs, Action) = match &cli.command {
        Command::Generate(a) => (a, generate),
        Command::Verify(a) => (a, verify),
        Command::Flatcheck(a) => (a, flatcheck),
    };
    let prepared = match prepare(args) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return EXIT_CONFIG;
    }
    match action(&prepared, &args.out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
