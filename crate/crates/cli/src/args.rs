use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hpaqc",
    version,
    about = "HP lattice proteins as adiabatic optimization problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the protein Hamiltonian (or a preset) as a pseudo-Boolean JSON file.
    Build(BuildArgs),
    /// Reduce a Hamiltonian file to 2-local form.
    Reduce(ReduceArgs),
    /// Tabulate the instantaneous spectrum along the adiabatic sweep.
    Spectrum(SpectrumArgs),
    /// Exact HP ground state by self-avoiding-walk enumeration.
    Enumerate(EnumerateArgs),
    /// Compare term and qubit counts with the closed forms.
    Count(CountArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// H/P sequence, e.g. HPPH.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub sequence: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Self-overlap weight (default N + 1).
    #[arg(long)]
    pub lambda0: Option<i64>,
    /// Chain-continuity weight (default N).
    #[arg(long)]
    pub lambda1: Option<i64>,
    /// Built-in function instead of a protein (available: toy).
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value = "hamiltonian.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Per-residue blocks when the input carries them, greedy otherwise.
    Auto,
    Greedy,
    Blocks,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(
        long = "in",
        required_unless_present = "preset",
        conflicts_with = "preset"
    )]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Penalty weight; defaults to a provably safe value.
    #[arg(long)]
    pub delta: Option<i64>,
    #[arg(long, value_enum, default_value_t = Strategy::Auto)]
    pub strategy: Strategy,
    #[arg(long, default_value = "reduced.json")]
    pub out: PathBuf,
    /// Substitution ledger as an ordered list of {a, b, ancilla}.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    /// Verify even above the exhaustive limit (sampled).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(
        long = "in",
        required_unless_present = "preset",
        conflicts_with = "preset"
    )]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 15)]
    pub levels: usize,
    #[arg(long, default_value = "trace.csv")]
    pub out: PathBuf,
    /// Ground-state probabilities per grid point.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Gap and matrix-element statistics as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub sequence: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Allow chains longer than 16 residues (up to 24).
    #[arg(long)]
    pub long_run: bool,
    #[arg(long, default_value = "result.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub sequence: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}
