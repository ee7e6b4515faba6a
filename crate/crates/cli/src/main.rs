use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(name = "equibs", version, about = "Equivariant Benjamini-Schramm statistics of simplicial G-complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Family selection shared by generate, converge and criterion.
///
/// Families: sierpinski, cycle-rotation K, cycle-reflection, prism,
/// random D GROUP SEED. The range is `N`, `A..B` or `A..=B` (inclusive).
#[derive(Args, Clone, Debug)]
pub struct FamilyArgs {
    pub family: String,
    pub range: String,
    /// Family parameters.
    pub params: Vec<String>,
}

#[derive(Args, Clone, Debug)]
pub struct OutArgs {
    /// Output file, or `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Also write `<out>.json` with run metadata.
    #[arg(long)]
    pub sidecar: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Write complex and action files for a generator family.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Exact multiplicities m, m⁽²⁾ and kernel dimensions.
    Multiplicity {
        /// Action file; repeat for a family (row index = position).
        #[arg(long = "action", required = true)]
        actions: Vec<PathBuf>,
        #[arg(long)]
        n: usize,
        /// Character index or `all`.
        #[arg(long, default_value = "all")]
        rho: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Spectral measure dump of Δ_{n,ρ}.
    Spectrum {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Multiplicities, FK determinants and exact moments.
    Moments {
        #[arg(long = "action", required = true)]
        actions: Vec<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "all")]
        rho: String,
        #[arg(long = "r-max", default_value_t = 6)]
        r_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Total variation between consecutive family members.
    Converge {
        #[command(flatten)]
        family: FamilyArgs,
        /// Radii, comma separated.
        #[arg(long, default_value = "1")]
        r: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Moved-vertex fractions and the induced-limit verdict.
    Criterion {
        #[command(flatten)]
        family: FamilyArgs,
        /// `trivial`, `all`, a catalog group, or comma-separated element indices.
        #[arg(long = "H", alias = "h", default_value = "trivial")]
        h: String,
        #[arg(long = "Cmax", alias = "c-max", default_value_t = 4)]
        c_max: usize,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Both sides of the reciprocity identity for every ρ ∈ Irr(G).
    Reciprocity {
        #[arg(long = "G", alias = "g")]
        g: String,
        #[arg(long = "H", alias = "h")]
        h: String,
        /// Action file of the H-complex.
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mass-transport check of μ_K^G at depths 1..=depth.
    UnimodularCheck {
        #[arg(long)]
        action: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write G ×_H K for an H-complex K.
    Induce {
        #[arg(long = "G", alias = "g")]
        g: String,
        #[arg(long = "H", alias = "h")]
        h: String,
        #[arg(long)]
        action: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "induced")]
        stem: String,
    },
    /// Rooted distance between two rooted G-complexes.
    Distance {
        #[arg(long)]
        action: PathBuf,
        /// Root vertex; the root is its orbit.
        #[arg(long)]
        root: usize,
        #[arg(long = "other-action")]
        other_action: PathBuf,
        #[arg(long = "other-root")]
        other_root: usize,
        #[arg(long = "r-max", default_value_t = 8)]
        r_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
