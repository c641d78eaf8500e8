use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{write_binary, write_label_raster};
use crate::raster::{same_dims, BinaryRaster, LabelRaster};

/// Provenance of one sampled patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchRecord {
    pub index: usize,
    /// Top-left corner in page coordinates.
    pub x: u32,
    pub y: u32,
    /// Seed the offset was drawn from.
    pub seed: u64,
}

/// Randomly placed training crops of one page.
///
/// Only the manifest is stored; [`PatchSet::crop`] materialises a patch pair
/// on demand so that tens of thousands of patches fit in memory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchSet {
    pub source: String,
    pub page_width: u32,
    pub page_height: u32,
    pub window: u32,
    pub seed: u64,
    pub patches: Vec<PatchRecord>,
}

/// Draws `count` window-sized crops uniformly over all valid offsets.
/// Pages smaller than the window are treated as zero-padded on the right
/// and bottom. The result depends only on the page size, `window` and
/// `seed`.
pub fn sample_patches(page: &BinaryRaster, labels: &LabelRaster, count: usize, window: u32, seed: u64) -> Result<PatchSet> {
    same_dims(page.width(), page.height(), labels.width(), labels.height())?;
    if count == 0 {
        return Err(Error::contract("patch count must be positive"));
    }
    if window == 0 {
        return Err(Error::contract("patch window must be positive"));
    }
    let max_x = page.width().max(window) - window;
    let max_y = page.height().max(window) - window;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let patches = (0..count)
        .map(|index| {
            let patch_seed = master.next_u64();
            let mut rng = ChaCha8Rng::seed_from_u64(patch_seed);
            PatchRecord {
                index,
                x: rng.random_range(0..=max_x),
                y: rng.random_range(0..=max_y),
                seed: patch_seed,
            }
        })
        .collect();
    Ok(PatchSet {
        source: String::from("page"),
        page_width: page.width(),
        page_height: page.height(),
        window,
        seed,
        patches,
    })
}

impl PatchSet {
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn crop(&self, page: &BinaryRaster, labels: &LabelRaster, record: &PatchRecord) -> (BinaryRaster, LabelRaster) {
        let (x, y, w) = (record.x as i64, record.y as i64, self.window);
        (page.crop_padded(x, y, w, w), labels.crop_padded(x, y, w, w))
    }

    pub fn iter<'a>(
        &'a self,
        page: &'a BinaryRaster,
        labels: &'a LabelRaster,
    ) -> impl Iterator<Item = (BinaryRaster, LabelRaster)> + 'a {
        self.patches.iter().map(move |r| self.crop(page, labels, r))
    }

    /// Writes `NNNNNN_image.png` / `NNNNNN_labels.png` pairs and
    /// `manifest.json` into `dir`, creating it if needed.
    pub fn write_to_dir(&self, page: &BinaryRaster, labels: &LabelRaster, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        #[derive(Serialize)]
        struct Entry<'a> {
            #[serde(flatten)]
            record: &'a PatchRecord,
            image: String,
            labels: String,
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            schema_version: u32,
            tool_version: &'a str,
            source: &'a str,
            page_width: u32,
            page_height: u32,
            window: u32,
            seed: u64,
            count: usize,
            patches: Vec<Entry<'a>>,
        }
        let mut entries = Vec::with_capacity(self.len());
        for r in &self.patches {
            let (img, lab) = self.crop(page, labels, r);
            let image = format!("{:06}_image.png", r.index);
            let label_name = format!("{:06}_labels.png", r.index);
            write_binary(&img, dir.join(&image))?;
            write_label_raster(&lab, dir.join(&label_name))?;
            entries.push(Entry {
                record: r,
                image,
                labels: label_name,
            });
        }
        let manifest = Manifest {
            schema_version: crate::SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION,
            source: &self.source,
            page_width: self.page_width,
            page_height: self.page_height,
            window: self.window,
            seed: self.seed,
            count: self.len(),
            patches: entries,
        };
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}
