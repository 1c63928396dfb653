use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "shearlet",
    version,
    about = "Digital shearlet transform toolkit"
)]
pub struct Cli {
    /// Worker threads for the transforms (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a system and write its descriptor.
    System {
        /// Grid size, e.g. 512x512 or 32x32x32.
        #[arg(long)]
        size: String,
        #[command(flatten)]
        profile: ProfileArgs,
        /// Descriptor output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print frame bounds A, B and B/A of a system.
    FrameBounds {
        #[arg(long)]
        size: String,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Forward transform of an image or volume into an SHCF file.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the system descriptor here.
        #[arg(long)]
        descriptor_out: Option<PathBuf>,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Inverse transform of an SHCF file.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Original signal; the maximum absolute difference is reported.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Maximum value for PGM output.
        #[arg(long, default_value_t = 255)]
        maxval: u16,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Add seeded Gaussian noise and remove it by hard thresholding.
    Denoise {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sigma: f64,
        /// Comma-separated per-scale factors, coarse to fine.
        #[arg(long = "K")]
        k: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Treat the input as already noisy: no noise is added.
        #[arg(long)]
        noisy_input: bool,
        /// Write the noisy signal here.
        #[arg(long)]
        noisy_out: Option<PathBuf>,
        /// Clean signal for PSNR when the input is already noisy.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Use K_j σ for every band instead of scaling by filter norms.
        #[arg(long)]
        strict_threshold: bool,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Fill in missing samples by iterative thresholding.
    Inpaint {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Binary mask (nonzero = observed). Without it a random mask is drawn.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Fraction of missing samples for the random mask.
        #[arg(long, default_value_t = 0.8)]
        missing: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = shearlet::apps::DEFAULT_INPAINT_DELTA_MIN)]
        delta_min: f64,
        /// Write the masked input here.
        #[arg(long)]
        masked_out: Option<PathBuf>,
        #[arg(long)]
        strict_threshold: bool,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Split an image into curvilinear and point-like parts.
    Separate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_curves: PathBuf,
        #[arg(long)]
        out_points: PathBuf,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = shearlet::apps::DEFAULT_SEPARATION_DELTA_MIN)]
        delta_min: f64,
        /// Binary ground truth for Q_opt of the curvilinear part.
        #[arg(long)]
        truth_curves: Option<PathBuf>,
        #[arg(long)]
        truth_points: Option<PathBuf>,
        #[arg(long)]
        strict_threshold: bool,
        #[command(flatten)]
        profile: ProfileArgs,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct ProfileArgs {
    /// Number of scales; must agree with --shear-levels or --alpha if given.
    #[arg(long)]
    pub scales: Option<usize>,
    /// Comma-separated shear levels d_j, coarse to fine.
    #[arg(long, conflicts_with = "alpha")]
    pub shear_levels: Option<String>,
    /// Comma-separated anisotropy α_j in (0, 2); 1 is parabolic.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Coarsest absolute scale.
    #[arg(long, default_value_t = 0)]
    pub j0: u32,
    /// Keep the near-duplicate boundary filters.
    #[arg(long)]
    pub full_system: bool,
    /// Fan dilation: "finest" or "per-scale".
    #[arg(long, default_value = "finest")]
    pub wedge: String,
    /// Read the whole system configuration from a descriptor file.
    #[arg(long, conflicts_with_all = ["scales", "shear_levels", "alpha", "full_system"])]
    pub descriptor: Option<PathBuf>,
}
