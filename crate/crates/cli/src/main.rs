//! `stabgem`: build codes, run analyses and emit entanglement certificates.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stabgem_core::clifford::DEFAULT_LOCALITY_RADIUS;
use stabgem_core::Error;

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "stabgem",
    version,
    about = "Exact stabilizer entanglement audits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Seed for every random choice in the run.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    /// Worker threads (default: logical cores).
    #[arg(long, env = "STABGEM_JOBS", global = true)]
    pub jobs: Option<usize>,

    /// Cross-check exact results against the dense simulator where the size allows.
    #[arg(long, global = true)]
    pub oracle_check: bool,

    /// Maximum distance between qubits acted on by one gate, in layout units.
    #[arg(long, default_value_t = DEFAULT_LOCALITY_RADIUS, global = true)]
    pub locality_radius: f64,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build, describe or validate stabilizer codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Logical-operator and anyon-statistics analyses.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Geometric-entanglement quantities and certificates.
    #[command(subcommand)]
    Gem(GemCmd),
    /// Compare the exact engine with the dense simulator.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Toric,
    Honeycomb,
    Ghz,
    Trivial,
}

#[derive(Args, Debug, Clone)]
pub struct CodeArgs {
    /// Built-in family.
    #[arg(long, value_enum)]
    pub code: Option<Family>,
    /// Code file (JSON) instead of a built-in family.
    #[arg(long, conflicts_with = "code")]
    pub file: Option<PathBuf>,
    /// Toric linear size.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Honeycomb width.
    #[arg(long = "Lx")]
    pub lx: Option<usize>,
    /// Honeycomb height.
    #[arg(long = "Ly")]
    pub ly: Option<usize>,
    /// Qubit count for GHZ and trivial codes.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum CodeCmd {
    /// Emit the code file of a code.
    Build(CodeArgs),
    /// Parameters of a code.
    Info(CodeArgs),
    /// Validate a code file; optionally confirm its stated distance.
    Check {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        verify_distance: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCmd {
    /// Minimum logical weight by exhaustive search.
    Distance {
        #[command(flatten)]
        code: CodeArgs,
        /// Stop after this weight.
        #[arg(long)]
        max_weight: Option<usize>,
    },
    /// Whether a region supports only trivial logicals.
    Correctable {
        #[command(flatten)]
        code: CodeArgs,
        /// Comma-separated qubit ids.
        #[arg(long, value_delimiter = ',', conflicts_with = "box_region")]
        region: Option<Vec<usize>>,
        /// Box `x,y,width,height` in layout coordinates.
        #[arg(long = "box", value_delimiter = ',')]
        box_region: Option<Vec<f64>>,
    },
    /// Clean a logical pair into two meshes and locate their intersection square.
    Mesh {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Braiding phase of a crossing pair.
    Braiding {
        #[command(flatten)]
        code: CodeArgs,
        /// Build the pair from cleaned mesh logicals instead of the canonical loops.
        #[arg(long)]
        mesh: bool,
        #[command(flatten)]
        mesh_args: MeshArgs,
    },
    /// Exchange phase of a T-junction.
    Exchange {
        #[command(flatten)]
        code: CodeArgs,
        /// Junction vertex `i,j` (even `i + j`).
        #[arg(long, value_delimiter = ',')]
        junction: Option<Vec<isize>>,
        /// Arm lengths `left,right,up`.
        #[arg(long, value_delimiter = ',')]
        arms: Option<Vec<usize>>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct MeshArgs {
    /// Square side (default from the code distance).
    #[arg(long)]
    pub square_size: Option<f64>,
    /// Distance between squares (default from w and t).
    #[arg(long)]
    pub separation: Option<f64>,
    /// Diagonal shift of the second mesh (default: one separation).
    #[arg(long)]
    pub shift: Option<f64>,
    /// Circuit depth used for the default separation.
    #[arg(long, default_value_t = 0)]
    pub t: usize,
}

#[derive(Subcommand, Debug)]
pub enum GemCmd {
    /// Largest overlap with a product of Pauli eigenstates.
    E0 {
        #[command(flatten)]
        code: CodeArgs,
        /// Also run see-saw ascent over all product states.
        #[arg(long)]
        ascent: bool,
    },
    /// Numerical ascent on the dense state vector.
    Ascend {
        #[command(flatten)]
        code: CodeArgs,
        /// Circuit depth; without it, product-state ascent is used.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Iterations (product ascent) or sweeps (circuit ascent).
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Patch certificate for a (possibly dressed) toric code.
    Certify {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 0)]
        t: usize,
        /// Clifford circuit file dressing the ground state.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Certificate from braiding intersections of shifted meshes.
    Theorem2 {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 0)]
        t: usize,
    },
    /// Sequential projection bound on a random code word.
    Sequential {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 3.0)]
        patch_size: f64,
        #[arg(long, default_value_t = 2.0)]
        gap: f64,
    },
    /// Syndrome bound for the symmetric mixed state.
    MixedBound {
        #[command(flatten)]
        code: CodeArgs,
        /// Random product states in addition to |0...0>.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCmd {
    /// Random engine quantities against the dense simulator.
    Crosscheck {
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
}

/// Exit status for a failed run.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Certificate(_) | Error::Feasibility(_) => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match commands::run(&cli) {
        Ok(report) => match output::emit(&report, &cli.global) {
            Ok(()) => ExitCode::from(report.status),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
