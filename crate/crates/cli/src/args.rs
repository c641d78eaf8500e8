use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "linemask", about = "Text-line extraction from line-mask predictions")]
pub struct Cli {
    /// Flat `key = value` configuration file. Command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a grayscale page to an inverted binary page (ink = white).
    Binarize(BinarizeArgs),
    /// Sample random training crops of a page and its line labels.
    Patches(PatchesArgs),
    /// Predict a line mask with an external predictor over sliding windows.
    Predict(PredictArgs),
    /// Join broken line masks with orientation-aware dilation.
    Postprocess(PostprocessArgs),
    /// Label each connected line mask.
    Lines(LinesArgs),
    /// Score extracted lines against ground truth.
    Evaluate(EvaluateArgs),
    /// Render a synthetic page of dashed lines with ground-truth masks.
    Synth(SynthArgs),
    /// Tint each labelled line over the page.
    Overlay(OverlayArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Otsu,
    Sauvola,
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    #[arg(long = "in", value_name = "PNG")]
    pub input: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "sauvola")]
    pub method: Method,
    /// Sauvola window side (odd).
    #[arg(long, default_value_t = 31)]
    pub sauvola_window: u32,
    #[arg(long, default_value_t = 0.2)]
    pub sauvola_k: f64,
}

#[derive(Debug, Args)]
pub struct PatchesArgs {
    #[arg(long, value_name = "PNG")]
    pub page: PathBuf,
    /// 16-bit line label raster.
    #[arg(long, value_name = "PNG")]
    pub labels: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "PNG")]
    pub page: PathBuf,
    /// `cmd:<shell command>` reading a patch PNG on stdin and writing a mask PNG to stdout.
    #[arg(long, value_name = "SPEC")]
    pub predictor: String,
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub core: Option<u32>,
    #[arg(long)]
    pub threshold: Option<f32>,
    /// Keep one predictor process alive and exchange length-prefixed PNG frames.
    #[arg(long)]
    pub stream: bool,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PostprocessArgs {
    #[arg(long = "in", value_name = "PNG")]
    pub input: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
    /// Number of probe orientations.
    #[arg(long = "n")]
    pub n_subsets: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub kernel_length: Option<u32>,
    #[arg(long)]
    pub kernel_thickness: Option<u32>,
    /// Write per-component ellipse fits and subset memberships as JSON.
    #[arg(long, value_name = "JSON")]
    pub dump_ellipses: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LinesArgs {
    #[arg(long = "in", value_name = "PNG")]
    pub input: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AveragingArg {
    Macro,
    Micro,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth line labels.
    #[arg(long, value_name = "PNG")]
    pub gt: PathBuf,
    /// Extracted line labels.
    #[arg(long, value_name = "PNG")]
    pub pred: PathBuf,
    /// Binary page whose components are scored.
    #[arg(long, value_name = "PNG")]
    pub page: PathBuf,
    #[arg(long, value_enum)]
    pub averaging: Option<AveragingArg>,
    #[arg(long, value_name = "JSON")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_name = "JSON")]
    pub spec: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out_page: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out_gt: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OverlayArgs {
    /// Grayscale or binary page.
    #[arg(long, value_name = "PNG")]
    pub page: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub labels: PathBuf,
    #[arg(long, value_name = "PNG")]
    pub out: PathBuf,
}
