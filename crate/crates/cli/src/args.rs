use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rigidspec", version, about = "Spectra and rigidity of block-diagonal weighted shifts")]
pub struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan radii for spectrum membership; writes annulus.json and profile.csv.
    Spectrum(SpectrumArgs),
    /// Measure ||u^{l!} y - y|| for growing l; writes rigidity.jsonl.
    Rigidity(RigidityArgs),
    /// Run the property suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Inner radius of the target annulus, in [0, 1); 1 needs --diagonal-roots.
    #[arg(long)]
    pub r: Option<f64>,

    /// Truncation horizon (number of blocks, at most 33).
    #[arg(long, default_value_t = 30)]
    pub k_max: usize,

    /// Radii as start:end:step, end included within half a step.
    #[arg(long, default_value = "0.05:1.5:0.05")]
    pub grid: String,

    /// Angles sampled per radius.
    #[arg(long, default_value_t = 4)]
    pub angular_samples: usize,

    /// Resolvent norm proving divergence.
    #[arg(long, default_value_t = 1e6)]
    pub divergence_threshold: f64,

    /// Resolvent norm bound required for a resolvent verdict.
    #[arg(long, default_value_t = 1e4)]
    pub bound_threshold: f64,

    /// Use the diagonal operator whose entries enumerate the roots of unity.
    #[arg(long)]
    pub diagonal_roots: bool,

    /// Number of diagonal entries with --diagonal-roots.
    #[arg(long, default_value_t = 500)]
    pub blocks: usize,

    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RigidityArgs {
    /// Inner radius of the family's spectrum, in [0, 1).
    #[arg(long)]
    pub r: f64,

    /// Truncation horizon; block k has dimension k!, so at most 7.
    #[arg(long, default_value_t = 7)]
    pub k_max: usize,

    #[arg(long, default_value_t = 6)]
    pub ell_max: usize,

    /// The final deficit must fall below this [default: half the deficit at l = 2].
    #[arg(long)]
    pub goal: Option<f64>,

    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Trials per fuzzed suite (each suite has its own default).
    #[arg(long)]
    pub fuzz: Option<usize>,

    /// Run only the named suite; repeatable.
    #[arg(long)]
    pub only: Vec<String>,
}
