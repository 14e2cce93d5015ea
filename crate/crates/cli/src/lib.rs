//! Command-line front end: synthesize datasets, evaluate indicators,
//! extract strips and render heatmaps.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod output;
pub mod render;

pub use commands::{
    cmd_invert, cmd_profile, cmd_render, cmd_synthesize, InvertArgs, ProfileArgs, RenderArgs, SynthesizeArgs,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] backscatter::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(backscatter::Error::Io(_)) | CliError::Io { .. } => EXIT_IO,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "backscatter", version, about = "Multi-frequency backscatter imaging of conducting obstacles")]
pub struct Cli {
    /// Worker threads; 0 uses every logical core.
    #[arg(long, global = true, env = "BACKSCATTER_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a far-field dataset for a shape.
    Synthesize(SynthesizeArgs),
    /// Evaluate the indicator on a grid.
    Invert(InvertArgs),
    /// Extract the strip for one incident direction.
    Profile(ProfileArgs),
    /// Render a plane field as a heatmap.
    Render(RenderArgs),
}

pub fn run(cli: Cli) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot configure {} worker threads: {e}", cli.threads)))?;
    let summary = match &cli.command {
        Command::Synthesize(a) => cmd_synthesize(a)?,
        Command::Invert(a) => cmd_invert(a)?,
        Command::Profile(a) => cmd_profile(a)?,
        Command::Render(a) => cmd_render(a)?,
    };
    println!("{summary}");
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
