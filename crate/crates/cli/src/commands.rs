use std::path::Path;

use linemask::binarize::{binarize, Binarization};
use linemask::config::ToolConfig;
use linemask::io;
use linemask::metric::{evaluate_page, Averaging, EvalReport};
use linemask::pipeline::{masks_to_lines, sample_patches, stitch_predict_with, SubprocessMode, SubprocessPredictor};
use linemask::postprocess::{postprocess_detailed, ComponentFitReport, OrientationSubset};
use linemask::synth::{generate, SynthSpec};
use linemask::{SCHEMA_VERSION, TOOL_VERSION};
use serde::Serialize;

use crate::args::*;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn load_config(path: Option<&Path>) -> Result<ToolConfig> {
    let Some(path) = path else {
        return Ok(ToolConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    toml::from_str(&text).map_err(|e| CliError::Parse { path: path.into(), message: e.message().to_string() })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.into(), source })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Parse { path: path.into(), message: e.to_string() })
}

/// One-line JSON summary on stdout.
fn summary(value: serde_json::Value) {
    println!("{value}");
}

pub fn run(command: Command, mut cfg: ToolConfig) -> Result<()> {
    match command {
        Command::Binarize(a) => run_binarize(a),
        Command::Patches(a) => {
            if let Some(w) = a.window {
                cfg.window = w;
            }
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            // Training crops have no core block, so only the window is checked.
            run_patches(a, &cfg)
        }
        Command::Predict(a) => {
            if let Some(w) = a.window {
                cfg.window = w;
            }
            if let Some(c) = a.core {
                cfg.core = c;
            }
            if let Some(t) = a.threshold {
                cfg.threshold = t;
            }
            cfg.validate()?;
            run_predict(a, &cfg)
        }
        Command::Postprocess(a) => {
            if let Some(n) = a.n_subsets {
                cfg.n_subsets = n;
            }
            if let Some(e) = a.epsilon {
                cfg.epsilon = e;
            }
            if let Some(l) = a.kernel_length {
                cfg.kernel_length = l;
            }
            if let Some(t) = a.kernel_thickness {
                cfg.kernel_thickness = t;
            }
            cfg.validate()?;
            run_postprocess(a, &cfg)
        }
        Command::Lines(a) => run_lines(a),
        Command::Evaluate(a) => {
            if let Some(avg) = a.averaging {
                cfg.averaging = match avg {
                    AveragingArg::Macro => Averaging::Macro,
                    AveragingArg::Micro => Averaging::Micro,
                };
            }
            cfg.validate()?;
            run_evaluate(a, &cfg)
        }
        Command::Synth(a) => {
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            run_synth(a, &cfg)
        }
        Command::Overlay(a) => run_overlay(a),
    }
}

fn run_binarize(a: BinarizeArgs) -> Result<()> {
    let method = match a.method {
        Method::Otsu => Binarization::Otsu,
        Method::Sauvola => Binarization::Sauvola { window: a.sauvola_window, k: a.sauvola_k },
    };
    let gray = io::load_gray(&a.input)?;
    let bin = binarize(&gray, method)?;
    io::write_binary(&bin, &a.out)?;
    summary(serde_json::json!({ "foreground": bin.count_foreground() }));
    Ok(())
}

fn run_patches(a: PatchesArgs, cfg: &ToolConfig) -> Result<()> {
    let page = io::load_binary(&a.page)?;
    let labels = io::load_label_raster(&a.labels)?;
    let set = sample_patches(&page, &labels, a.count, cfg.window, cfg.seed)?
        .with_source(a.page.display().to_string());
    set.write_to_dir(&page, &labels, &a.out)?;
    summary(serde_json::json!({ "patches": set.len(), "out": a.out }));
    Ok(())
}

fn run_predict(a: PredictArgs, cfg: &ToolConfig) -> Result<()> {
    let mode = if a.stream { SubprocessMode::Streaming } else { SubprocessMode::PerPatch };
    let predictor = SubprocessPredictor::from_spec(&a.predictor, mode)?;
    let page = io::load_binary(&a.page)?;
    let mask = stitch_predict_with(&page, &predictor, &cfg.window_spec(), &cfg.stitch_options())?;
    io::write_binary(&mask, &a.out)?;
    summary(serde_json::json!({ "foreground": mask.count_foreground() }));
    Ok(())
}

#[derive(Serialize)]
struct EllipseDump<'a> {
    schema_version: u32,
    tool_version: &'a str,
    input: &'a Path,
    config: &'a ToolConfig,
    components: &'a [ComponentFitReport],
    subsets: &'a [OrientationSubset],
}

fn run_postprocess(a: PostprocessArgs, cfg: &ToolConfig) -> Result<()> {
    let mask = io::load_binary(&a.input)?;
    let res = postprocess_detailed(&mask, &cfg.postprocess_params())?;
    io::write_binary(&res.mask, &a.out)?;
    if let Some(path) = &a.dump_ellipses {
        let dump = EllipseDump {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            input: &a.input,
            config: cfg,
            components: &res.components,
            subsets: &res.subsets,
        };
        write_json(&dump, path)?;
    }
    summary(serde_json::json!({
        "components_in": res.components.len(),
        "foreground_in": mask.count_foreground(),
        "foreground_out": res.mask.count_foreground(),
    }));
    Ok(())
}

fn run_lines(a: LinesArgs) -> Result<()> {
    let mask = io::load_binary(&a.input)?;
    let labels = masks_to_lines(&mask);
    io::write_label_raster(&labels, &a.out)?;
    summary(serde_json::json!({ "lines": labels.max_label() }));
    Ok(())
}

#[derive(Serialize)]
struct Inputs<'a> {
    gt: &'a Path,
    pred: &'a Path,
    page: &'a Path,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    schema_version: u32,
    tool_version: &'a str,
    inputs: Inputs<'a>,
    config: &'a ToolConfig,
    #[serde(flatten)]
    report: &'a EvalReport,
}

fn run_evaluate(a: EvaluateArgs, cfg: &ToolConfig) -> Result<()> {
    let gt = io::load_label_raster(&a.gt)?;
    let pred = io::load_label_raster(&a.pred)?;
    let page = io::load_binary(&a.page)?;
    let report = evaluate_page(&page, &gt, &pred, &cfg.metric_config())?;
    if let Some(path) = &a.report {
        let file = ReportFile {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            inputs: Inputs { gt: &a.gt, pred: &a.pred, page: &a.page },
            config: cfg,
            report: &report,
        };
        write_json(&file, path)?;
    }
    summary(serde_json::json!({
        "recall": report.aggregate_recall,
        "precision": report.aggregate_precision,
        "f_measure": report.aggregate_f,
        "averaging": report.averaging,
        "lines": report.per_line.len(),
    }));
    Ok(())
}

fn run_synth(a: SynthArgs, cfg: &ToolConfig) -> Result<()> {
    let spec: SynthSpec = read_json(&a.spec)?;
    let page = generate(&spec.lines, (spec.width, spec.height), cfg.seed)?;
    io::write_binary(&page.page, &a.out_page)?;
    io::write_label_raster(&page.gt_masks, &a.out_gt)?;
    summary(serde_json::json!({ "lines": spec.lines.len(), "dashes": page.dashes.len() }));
    Ok(())
}

fn run_overlay(a: OverlayArgs) -> Result<()> {
    let page = io::load_gray(&a.page)?;
    let labels = io::load_label_raster(&a.labels)?;
    let img = linemask::overlay::overlay(&page, &labels)?;
    io::write_rgb(&img, &a.out)?;
    summary(serde_json::json!({ "lines": labels.line_ids().len() }));
    Ok(())
}

