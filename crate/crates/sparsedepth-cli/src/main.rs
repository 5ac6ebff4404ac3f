//! `sparsedepth`: geometry-aware sparse depth sampling from the command line.
//!
//! Every subcommand is a pure function of its flags, input files, and seed;
//! identical invocations produce byte-identical outputs. A `--config` file
//! can supply any long flag as a `key value` line (without the leading
//! dashes); explicit command-line flags win over the file.
//!
//! Exit codes: 0 success, 2 input or format error, 3 infeasible
//! configuration (more samples requested than eligible pixels).

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sparsedepth::{Error, Strategy};

use commands::{KList, NoiseTriple, SceneName};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\ndefaults: beta 2, window 5, radius 0.005, min-points 5"
);

#[derive(Parser)]
#[command(
    name = "sparsedepth",
    version,
    long_version = LONG_VERSION,
    about = "Geometry-aware sparse depth sampling",
    propagate_version = true
)]
pub struct Cli {
    /// Key-value file supplying any long flag (keys without dashes);
    /// command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Estimate per-pixel surface normals and curvature from a depth map
    Normals(NormalsArgs),
    /// Draw k depth samples, geometry-aware or uniformly at random
    Sample(SampleArgs),
    /// Render a synthetic scene, optionally with incidence-dependent noise
    Synth(SynthArgs),
    /// Densify a sparse depth map by inverse-distance weighting
    Complete(CompleteArgs),
    /// Report MAE/RMSE of a predicted depth map against ground truth
    Eval(EvalArgs),
    /// Benchmark geometry-aware vs uniform sampling over seeds and k
    Compare(CompareArgs),
}

#[derive(Args)]
pub struct NormalsArgs {
    /// Input 16-bit depth PNG
    #[arg(long, value_name = "FILE")]
    pub depth: Option<PathBuf>,
    /// Intrinsics key-value file (fx, fy, cx, cy)
    #[arg(long, value_name = "FILE")]
    pub intrinsics: Option<PathBuf>,
    /// Neighborhood window side length in pixels (odd)
    #[arg(long)]
    pub window: Option<usize>,
    /// Neighborhood radius cutoff in meters
    #[arg(long)]
    pub radius: Option<f64>,
    /// Minimum neighborhood size for a valid normal
    #[arg(long)]
    pub min_points: Option<usize>,
    /// Output normal-map binary stream
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Optional curvature image (8-bit PNG)
    #[arg(long, value_name = "FILE")]
    pub curvature_out: Option<PathBuf>,
    /// Depth PNG units per meter
    #[arg(long)]
    pub scale: Option<u32>,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Input 16-bit depth PNG
    #[arg(long, value_name = "FILE")]
    pub depth: Option<PathBuf>,
    /// Intrinsics key-value file (fx, fy, cx, cy)
    #[arg(long, value_name = "FILE")]
    pub intrinsics: Option<PathBuf>,
    /// Number of samples to draw
    #[arg(long)]
    pub k: Option<usize>,
    /// Reliability exponent on the incidence cosine
    #[arg(long)]
    pub beta: Option<f64>,
    /// Optional curvature gate threshold; unset disables the gate
    #[arg(long)]
    pub kappa_max: Option<f64>,
    /// geometry or uniform
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Sampling seed (required; no wall-clock default)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output sparse depth PNG with exactly k nonzero pixels
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Optional reliability image (geometry strategy only)
    #[arg(long, value_name = "FILE")]
    pub reliability_out: Option<PathBuf>,
    /// Optional sample list (`u v depth` per line, draw order)
    #[arg(long, value_name = "FILE")]
    pub samples_out: Option<PathBuf>,
    /// Neighborhood window side length in pixels (odd)
    #[arg(long)]
    pub window: Option<usize>,
    /// Neighborhood radius cutoff in meters
    #[arg(long)]
    pub radius: Option<f64>,
    /// Minimum neighborhood size for a valid normal
    #[arg(long)]
    pub min_points: Option<usize>,
    /// Depth PNG units per meter
    #[arg(long)]
    pub scale: Option<u32>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// plane, sphere, or corner
    #[arg(long)]
    pub scene: Option<SceneName>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Focal length x in pixels
    #[arg(long)]
    pub fx: Option<f64>,
    /// Focal length y in pixels
    #[arg(long)]
    pub fy: Option<f64>,
    /// Principal point x in pixels
    #[arg(long)]
    pub cx: Option<f64>,
    /// Principal point y in pixels
    #[arg(long)]
    pub cy: Option<f64>,
    /// Distance from the camera to the surface along the optical axis, meters
    #[arg(long)]
    pub distance: Option<f64>,
    /// Plane tilt about the x axis, degrees (0 = frontal)
    #[arg(long)]
    pub tilt: Option<f64>,
    /// Sphere radius in meters
    #[arg(long)]
    pub sphere_radius: Option<f64>,
    /// Half-opening tilt of each corner plane, degrees
    #[arg(long)]
    pub corner_angle: Option<f64>,
    /// Output clean depth PNG
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the intrinsics used to this key-value file
    #[arg(long, value_name = "FILE")]
    pub intrinsics_out: Option<PathBuf>,
    /// Optional ground-truth normal-map binary
    #[arg(long, value_name = "FILE")]
    pub normals_out: Option<PathBuf>,
    /// Optional noisy depth PNG; requires --seed
    #[arg(long, value_name = "FILE")]
    pub noisy_out: Option<PathBuf>,
    /// Depth noise standard deviation at normal incidence, meters
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// Growth of sigma with tan^2 of the incidence angle
    #[arg(long)]
    pub angle_gain: Option<f64>,
    /// Incidence angle beyond which pixels drop out, degrees
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Noise seed (required when --noisy-out is set)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Depth PNG units per meter
    #[arg(long)]
    pub scale: Option<u32>,
}

#[derive(Args)]
pub struct CompleteArgs {
    /// Input sparse depth PNG (nonzero pixels are the samples)
    #[arg(long, value_name = "FILE")]
    pub sparse: Option<PathBuf>,
    /// Nearest samples blended per pixel
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// Exponent on pixel distance in the IDW weight
    #[arg(long)]
    pub power: Option<f64>,
    /// Output dense depth PNG
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Depth PNG units per meter
    #[arg(long)]
    pub scale: Option<u32>,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Predicted depth PNG
    #[arg(long, value_name = "FILE")]
    pub pred: Option<PathBuf>,
    /// Ground-truth depth PNG
    #[arg(long, value_name = "FILE")]
    pub gt: Option<PathBuf>,
    /// Evaluate only pixels with ground truth at most this deep, in meters
    #[arg(long, value_name = "METERS")]
    pub max_depth: Option<f64>,
    /// Exclude a border this many pixels wide from evaluation
    #[arg(long, value_name = "PIXELS")]
    pub crop: Option<usize>,
    /// Depth PNG units per meter
    #[arg(long)]
    pub scale: Option<u32>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Ground-truth depth PNG (exactly one of --gt / --depth-dir)
    #[arg(long, value_name = "FILE")]
    pub gt: Option<PathBuf>,
    /// Directory of ground-truth depth PNGs, pooled per (strategy, k, seed)
    #[arg(long, value_name = "DIR")]
    pub depth_dir: Option<PathBuf>,
    /// Intrinsics key-value file shared by all frames
    #[arg(long, value_name = "FILE")]
    pub intrinsics: Option<PathBuf>,
    /// Comma-separated sample counts, e.g. 100,200,300,500
    #[arg(long)]
    pub k_list: Option<KList>,
    /// Number of replicate seeds
    #[arg(long)]
    pub seeds: Option<u64>,
    /// First seed; replicate s uses base-seed + s (required)
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Noise model as sigma0_m,angle_gain,dropout_deg
    #[arg(long)]
    pub noise: Option<NoiseTriple>,
    /// Output CSV table
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Reliability exponent on the incidence cosine
    #[arg(long)]
    pub beta: Option<f64>,
    /// Optional curvature gate threshold
    #[arg(long)]
    pub kappa_max: Option<f64>,
    /// Neighborhood window side length in pixels (odd)
    #[arg(long)]
    pub window: Option<usize>,
    /// Neighborhood radius cutoff in meters
    #[arg(long)]
    pub radius: Option<f64>,
    /// Minimum neighborhood size for a valid normal
    #[arg(long)]
    pub min_points: Option<usize>,
    /// Nearest samples blended per pixel during completion
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// Exponent on pixel distance in the IDW weight
    #[arg(long)]
    pub power: Option<f64>,
    /// Evaluate only pixels with ground truth at most this deep, in meters
    #[arg(long, value_name = "METERS")]
    pub max_depth: Option<f64>,
    /// Exclude a border this many pixels wide from evaluation
    #[arg(long, value_name = "PIXELS")]
    pub crop: Option<usize>,
    /// Depth PNG units per meter
    #[arg(long)]
    pub scale: Option<u32>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::InfeasibleK { .. } => 3,
            _ => 2,
        };
        std::process::exit(code);
    }
}
