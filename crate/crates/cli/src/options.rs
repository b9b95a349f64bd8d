use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cecl", version, about = "Circle-based eye center localization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Localize both eye centers in one PGM frame.
    Detect(DetectArgs),
    /// Cross-validated accuracy over a dataset directory.
    Evaluate(EvaluateArgs),
    /// Pick the binarization threshold on a dataset directory.
    Tune(TuneArgs),
    /// Write a synthetic corpus with ground truth and eye regions.
    Synth(SynthArgs),
    /// Projection-histogram ROI for each eye region of a frame.
    Szp(SzpArgs),
}

/// Where eye regions come from: a face/eye cascade pair or a manifest of
/// rectangles (`filename x_l y_l w_l h_l x_r y_r w_r h_r` per line).
#[derive(Debug, Args, Clone)]
pub struct RegionArgs {
    /// Face cascade (legacy Haar XML).
    #[arg(long, value_name = "XML", requires = "eye_model", conflicts_with = "regions")]
    pub face_model: Option<PathBuf>,
    /// Eye cascade (legacy Haar XML).
    #[arg(long, value_name = "XML", requires = "face_model")]
    pub eye_model: Option<PathBuf>,
    /// Eye-region manifest.
    #[arg(long, value_name = "FILE")]
    pub regions: Option<PathBuf>,
}

/// Pipeline settings: defaults, then `--config`, then the flags below.
#[derive(Debug, Args, Clone)]
pub struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Binarization threshold.
    #[arg(long, value_name = "0-255")]
    pub t_b: Option<u8>,
    /// Fraction of each eye region cropped from the top.
    #[arg(long, value_name = "FRAC")]
    pub t_e: Option<f64>,
    /// Smallest Hough radius as a fraction of the region width.
    #[arg(long, value_name = "FRAC")]
    pub r_min_frac: Option<f64>,
    #[arg(long, value_name = "FRAC")]
    pub r_max_frac: Option<f64>,
    /// Smallest accepted fraction of a circle outline.
    #[arg(long, value_name = "FRAC")]
    pub min_completeness: Option<f64>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    pub image: PathBuf,
    #[command(flatten)]
    pub regions: RegionArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Write a copy of the frame with circles and centers drawn in.
    #[arg(long, value_name = "PGM")]
    pub annotate: Option<PathBuf>,
    /// Write the result as a CSV row.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Directory of `*.pgm` frames with `.eye` ground truth.
    pub dataset: PathBuf,
    #[command(flatten)]
    pub regions: RegionArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Candidate thresholds: `start:step:end`, a comma list or one value.
    #[arg(long, value_name = "SPEC")]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Fold-assignment seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Accuracy table output.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Accuracy as CSV.
    #[arg(long, value_name = "FILE")]
    pub report_csv: Option<PathBuf>,
    /// Per-image results CSV; defaults to `<report>.images.csv`.
    #[arg(long, value_name = "FILE")]
    pub results: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Write the effective configuration with the chosen threshold.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Standard,
    Decoy,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Salt-and-pepper fraction.
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    /// Largest fraction of an iris outline hidden by the eyelid.
    #[arg(long, default_value_t = 0.0)]
    pub occlusion: f64,
    #[arg(long)]
    pub no_eyebrow: bool,
    /// Dark hair band over the eyebrows.
    #[arg(long)]
    pub hair: bool,
    #[arg(long, value_enum, default_value_t = LayoutArg::Standard)]
    pub layout: LayoutArg,
}

#[derive(Debug, Args)]
pub struct SzpArgs {
    pub image: PathBuf,
    /// Eye-region manifest.
    #[arg(long, value_name = "FILE")]
    pub regions: Option<PathBuf>,
    /// Write a copy of the frame with the ROIs outlined.
    #[arg(long, value_name = "PGM")]
    pub annotate: Option<PathBuf>,
}
