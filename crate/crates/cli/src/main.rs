use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncsphere::report::{catalog, run, sweep, Backend, RunSpec, Task};
use ncsphere::spheres::SPHERE_DEGREE_CAP;

/// Verifies the algebraic identities of the quaternionic noncommutative
/// seven-sphere and four-sphere at chosen deformation parameters.
#[derive(Parser)]
#[command(name = "ncsphere", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// R-matrix conditions, PBW basis and centrality of the norms.
    Check(Common),
    /// Projection, Y-system and the three-sphere, with prerequisites.
    Sphere(Common),
    /// Chern character components and their cycle conditions, with prerequisites.
    Chern(Common),
    /// SU(2) coaction, derivations and coinvariants, with prerequisites.
    Coaction(Common),
    /// Every task at one point.
    Report(Common),
    /// Every task (or `--tasks`) at several points; defaults to the built-in catalog.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Args)]
struct Common {
    /// Deformation point `u0,u1,u2`, for example `3/5,4/5,0`.
    #[arg(long, default_value = "3/5,4/5,0", allow_hyphen_values = true)]
    params: String,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Float comparison tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Largest degree the sphere reducer may reach.
    #[arg(long, default_value_t = SPHERE_DEGREE_CAP)]
    degree_cap: usize,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Print nothing; rely on the exit code.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: SweepCommon,
    /// Points separated by `;`, for example `1,0,0;3/5,4/5,0`.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Comma-separated subset of conditions,algebra,sphere,chern,coaction.
    #[arg(long)]
    tasks: Option<String>,
    /// Write the CSV summary here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepCommon {
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = SPHERE_DEGREE_CAP)]
    degree_cap: usize,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

fn backend(b: BackendArg) -> Backend {
    match b {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Float => Backend::Float,
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn single(c: Common, tasks: &[Task]) -> Result<bool> {
    let spec = RunSpec {
        params: c.params,
        backend: backend(c.backend),
        tasks: tasks.iter().copied().collect(),
        degree_cap: c.degree_cap,
        tol: c.tol,
        ..RunSpec::default()
    };
    let report = run(&spec)?;
    if let Some(path) = &c.json {
        write_file(path, &report.to_json()?)?;
    }
    if !c.quiet {
        println!("{report}");
    }
    Ok(report.all_pass)
}

fn do_sweep(a: SweepArgs) -> Result<bool> {
    let points = match &a.params {
        Some(list) => list.split(';').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect(),
        None => catalog(),
    };
    let tasks: BTreeSet<Task> = match &a.tasks {
        Some(list) => list.split(',').map(str::parse).collect::<ncsphere::Result<_>>()?,
        None => Task::ALL.into_iter().collect(),
    };
    let base = RunSpec {
        backend: backend(a.common.backend),
        tasks,
        degree_cap: a.common.degree_cap,
        tol: a.common.tol,
        ..RunSpec::default()
    };
    let out = sweep(&points, &base)?;
    if let Some(path) = &a.common.json {
        write_file(path, &out.to_json()?)?;
    }
    if let Some(path) = &a.csv {
        write_file(path, &out.csv)?;
    }
    if !a.common.quiet {
        for r in &out.reports {
            println!("{r}\n");
        }
        print!("{}", out.csv);
    }
    Ok(out.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.verb {
        Verb::Check(c) => single(c, &[Task::Conditions, Task::Algebra]),
        Verb::Sphere(c) => single(c, &[Task::Sphere]),
        Verb::Chern(c) => single(c, &[Task::Chern]),
        Verb::Coaction(c) => single(c, &[Task::Coaction]),
        Verb::Report(c) => single(c, &Task::ALL),
        Verb::Sweep(a) => do_sweep(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
