//! `ddfv` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub const CONFIG: u8 = 2;
    pub const SOLVER: u8 = 3;
    pub const PROPERTY: u8 = 4;

    pub fn config(msg: impl Into<String>) -> Self {
        Self { code: Self::CONFIG, msg: msg.into() }
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Self { code: Self::SOLVER, msg: msg.into() }
    }

    pub fn property(msg: impl Into<String>) -> Self {
        Self { code: Self::PROPERTY, msg: msg.into() }
    }
}

impl From<ddfv::Error> for CliError {
    fn from(e: ddfv::Error) -> Self {
        match e {
            ddfv::Error::Solver(_) => Self::solver(e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl From<ddfv::MeshError> for CliError {
    fn from(e: ddfv::MeshError) -> Self {
        Self::config(e.to_string())
    }
}

impl From<ddfv::SchemeError> for CliError {
    fn from(e: ddfv::SchemeError) -> Self {
        Self::config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::config(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "ddfv", version, about = "Nonlinear DDFV solver for anisotropic drift-diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, inspect or convert meshes.
    Mesh {
        #[command(subcommand)]
        action: MeshCommand,
    },
    /// Run one simulation and write `trace.csv`.
    Run(Common),
    /// Mesh-refinement convergence study.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Run the levels one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Relative-energy decay towards the discrete equilibrium.
    Longtime(Common),
    /// Operator property suite.
    Check(Common),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a structured mesh of the unit square.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Amplitude (quad) or zigzag slope (kershaw).
        #[arg(long)]
        param: Option<f64>,
        /// Output file; `mesh_<family>_<n>.txt` by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the quality report of a mesh file.
    Inspect {
        path: PathBuf,
        /// Tensor used for the condition-number check.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Read a mesh (reorienting cells if needed), validate it and write it back.
    Convert { input: PathBuf, output: PathBuf },
}

/// Flags shared by the simulation commands; they override `--config`.
#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long, conflicts_with_all = ["family", "n"])]
    mesh: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    family_param: Option<f64>,
    /// `identity`, `diag:l1,l2[,angle]` or `const:a11,a12,a22`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long)]
    newton_max_iter: Option<usize>,
    /// Comma-separated mesh parameters of a convergence study.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::default();
        if let Some(p) = &self.config {
            c.merge_file(p)?;
        }
        let mut set = |k: &str, v: Option<String>| match v {
            Some(v) => c.set(k, &v),
            None => Ok(()),
        };
        let s = |x: &Option<f64>| x.map(|v| v.to_string());
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        set("case", self.case.clone())?;
        set("kappa", s(&self.kappa))?;
        set("beta", s(&self.beta))?;
        set("dt", s(&self.dt))?;
        set("tfinal", s(&self.tfinal))?;
        set("family", self.family.clone())?;
        set("n", self.n.map(|v| v.to_string()))?;
        set("family_param", s(&self.family_param))?;
        set("lambda", self.lambda.clone())?;
        set("newton_tol", s(&self.newton_tol))?;
        set("newton_max_iter", self.newton_max_iter.map(|v| v.to_string()))?;
        set("levels", self.levels.clone())?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        if let Some(m) = &self.mesh {
            c.mesh = Some(m.clone());
        } else if self.family.is_some() || self.n.is_some() {
            c.mesh = None;
        }
        Ok(c)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Mesh { action } => match action {
            MeshCommand::Gen { family, n, param, out } => commands::mesh_gen(&family, n, param, out),
            MeshCommand::Inspect { path, lambda } => commands::mesh_inspect(&path, lambda.as_deref()),
            MeshCommand::Convert { input, output } => commands::mesh_convert(&input, &output),
        },
        Command::Run(c) => commands::run(&c.resolve()?),
        Command::Converge { common, sequential } => commands::converge(&common.resolve()?, !sequential),
        Command::Longtime(c) => commands::longtime(&c.resolve()?),
        Command::Check(c) => commands::check(&c.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
