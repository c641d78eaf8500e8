//! Non-neural core of a line-mask text-line segmentation pipeline.
//!
//! A pixel classifier predicts *line masks*, blobs that join the characters
//! of one text line. This crate covers everything around that classifier:
//!
//! - [`raster`], [`io`], [`binarize`], [`components`]: page rasters, PNG
//!   storage, ink extraction and connected-component labeling.
//! - [`ellipse`]: direct least-squares ellipse fitting to give every mask
//!   component an orientation and an elongation confidence.
//! - [`postprocess`]: reconnects broken masks by dilating components with a
//!   narrow kernel along their orientation class.
//! - [`metric`]: connectivity-component recall/precision of extracted lines
//!   against ground-truth lines.
//! - [`pipeline`]: random training patches and sliding-window prediction
//!   with central-window stitching over a pluggable [`pipeline::Predictor`].
//! - [`synth`]: seeded synthetic pages with known line masks.
//!
//! ```
//! use linemask::metric::{evaluate_page, MetricConfig};
//! use linemask::pipeline::{masks_to_lines, stitch_predict, GtReplayPredictor, WindowSpec};
//! use linemask::postprocess::{postprocess_mask, PostprocessParams};
//! use linemask::synth::{generate, random_layout};
//!
//! let page = generate(&random_layout(800, 600, 1), (800, 600), 1)?;
//! let predictor = GtReplayPredictor::new(page.gt_masks.clone());
//! let mask = stitch_predict(&page.page, &predictor, &WindowSpec::default())?;
//! let fixed = postprocess_mask(&mask, &PostprocessParams::default())?;
//! let report = evaluate_page(&page.page, &page.gt_masks, &masks_to_lines(&fixed), &MetricConfig::default())?;
//! assert_eq!(report.aggregate_f, 1.0);
//! # Ok::<(), linemask::Error>(())
//! ```

pub mod binarize;
pub mod components;
pub mod config;
pub mod ellipse;
pub mod error;
pub mod io;
pub mod metric;
pub mod overlay;
pub mod pipeline;
pub mod postprocess;
pub mod raster;
pub mod synth;

pub use components::{connected_components, BBox, Component, Connectivity};
pub use ellipse::{fit_component, fit_ellipse, EllipseFit};
pub use error::{Error, Result};
pub use raster::{BinaryRaster, GrayRaster, LabelRaster};

/// Version string echoed into every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the JSON report and dump schemas.
pub const SCHEMA_VERSION: u32 = 1;
