//! Training-patch sampling and sliding-window prediction.
//!
//! Prediction slides a `window`×`window` frame over the page in steps of
//! `core` and keeps only the central `core`×`core` block of every
//! prediction. The page is padded with background by `(window − core) / 2`
//! on all four sides, plus whatever the right and bottom edges need to
//! reach a whole number of cores, so the kept blocks tile the page exactly
//! once.

mod patches;
mod predictor;
mod stitch;
mod subprocess;

use serde::{Deserialize, Serialize};

use crate::components::{label_pixels, Connectivity};
use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, LabelRaster};

pub use patches::{sample_patches, PatchRecord, PatchSet};
pub use predictor::{
    CheckerboardDropout, ConstantPredictor, GtReplayPredictor, IdentityPredictor, PatchMask, PatchRequest, Predictor,
};
pub use stitch::{core_tiles, stitch_predict, stitch_predict_with, CoreTile, StitchOptions};
pub use subprocess::{SubprocessMode, SubprocessPredictor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowSpec {
    /// Side of the square prediction window.
    pub window: u32,
    /// Side of the retained central block.
    pub core: u32,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec { window: 320, core: 100 }
    }
}

impl WindowSpec {
    pub fn new(window: u32, core: u32) -> Result<Self> {
        let spec = WindowSpec { window, core };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.core == 0 || self.core > self.window {
            return Err(Error::contract(format!(
                "window spec needs 0 < core <= window, got core {} window {}",
                self.core, self.window
            )));
        }
        if (self.window - self.core) % 2 != 0 {
            return Err(Error::contract(format!(
                "window - core must be even, got {} - {}",
                self.window, self.core
            )));
        }
        Ok(())
    }

    /// Background padding on each side of the page.
    pub fn margin(&self) -> u32 {
        (self.window - self.core) / 2
    }
}

/// One label per 8-connected mask blob, in raster order of first pixel.
pub fn masks_to_lines(mask: &BinaryRaster) -> LabelRaster {
    label_pixels(mask, Connectivity::Eight).0
}
