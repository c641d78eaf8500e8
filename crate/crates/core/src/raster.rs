//! Raster containers shared by every stage.
//!
//! All rasters are row-major with `(x, y)` addressing, `x` growing to the
//! right and `y` growing down.

use crate::error::{Error, Result};

/// Per-pixel foreground/background page image. `true` is ink (or line mask).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRaster {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryRaster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BinaryRaster")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("foreground", &self.count_foreground())
            .finish()
    }
}

fn check_dims(width: u32, height: u32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::contract(format!(
            "raster dimensions must be positive, got {width}x{height}"
        )));
    }
    if (width as usize) * (height as usize) != len {
        return Err(Error::contract(format!(
            "buffer of {len} pixels does not match {width}x{height}"
        )));
    }
    Ok(())
}

impl BinaryRaster {
    /// All-background raster.
    ///
    /// Panics if either dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        BinaryRaster {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(BinaryRaster { width, height, bits })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut r = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                r.bits[(y * width + x) as usize] = f(x, y);
            }
        }
        r
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[self.idx(x, y)]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && x < self.width as i64
            && y < self.height as i64
            && self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = self.idx(x, y);
        self.bits[i] = value;
    }

    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn row(&self, y: u32) -> &[bool] {
        let w = self.width as usize;
        &self.bits[y as usize * w..(y as usize + 1) * w]
    }

    pub fn foreground_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i as u32 % w, i as u32 / w))
    }

    /// Pixel-wise OR. Both rasters must have the same dimensions.
    pub fn or_assign(&mut self, other: &BinaryRaster) -> Result<()> {
        same_dims(self.width, self.height, other.width, other.height)?;
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    /// True when every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryRaster) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Copy a `width`x`height` window whose top-left corner sits at
    /// `(x0, y0)`. Pixels outside the raster read as background.
    pub fn crop_padded(&self, x0: i64, y0: i64, width: u32, height: u32) -> BinaryRaster {
        let mut out = BinaryRaster::new(width, height);
        for_each_overlap_row(self.width, self.height, x0, y0, width, height, |sy, dy, sx, dx, n| {
            let src = sy * self.width as usize + sx;
            let dst = dy * width as usize + dx;
            out.bits[dst..dst + n].copy_from_slice(&self.bits[src..src + n]);
        });
        out
    }

    /// Rotate 90° clockwise: pixel `(x, y)` moves to `(h - 1 - y, x)`.
    pub fn rotate90(&self) -> BinaryRaster {
        let (w, h) = (self.width, self.height);
        let mut out = BinaryRaster::new(h, w);
        for y in 0..h {
            for x in 0..w {
                if self.get(x, y) {
                    out.set(h - 1 - y, x, true);
                }
            }
        }
        out
    }
}

/// Per-pixel line identifiers; 0 is background.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LabelRaster {
    width: u32,
    height: u32,
    labels: Vec<u32>,
}

impl LabelRaster {
    /// All-background raster.
    ///
    /// Panics if either dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        LabelRaster {
            width,
            height,
            labels: vec![0; width as usize * height as usize],
        }
    }

    pub fn from_labels(width: u32, height: u32, labels: Vec<u32>) -> Result<Self> {
        check_dims(width, height, labels.len())?;
        Ok(LabelRaster { width, height, labels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, label: u32) {
        self.labels[y as usize * self.width as usize + x as usize] = label;
    }

    pub fn max_label(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Sorted distinct non-zero labels.
    pub fn line_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.labels.iter().copied().filter(|&l| l != 0).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Foreground wherever the label is non-zero.
    pub fn to_mask(&self) -> BinaryRaster {
        BinaryRaster {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&l| l != 0).collect(),
        }
    }

    pub fn crop_padded(&self, x0: i64, y0: i64, width: u32, height: u32) -> LabelRaster {
        let mut out = LabelRaster::new(width, height);
        for_each_overlap_row(self.width, self.height, x0, y0, width, height, |sy, dy, sx, dx, n| {
            let src = sy * self.width as usize + sx;
            let dst = dy * width as usize + dx;
            out.labels[dst..dst + n].copy_from_slice(&self.labels[src..src + n]);
        });
        out
    }

    /// Apply `f` to every label, keeping 0 as background.
    pub fn map_labels(&self, mut f: impl FnMut(u32) -> u32) -> LabelRaster {
        LabelRaster {
            width: self.width,
            height: self.height,
            labels: self
                .labels
                .iter()
                .map(|&l| if l == 0 { 0 } else { f(l) })
                .collect(),
        }
    }
}

/// 8-bit grayscale page (0 = black, 255 = white).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrayRaster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayRaster {
    pub fn from_data(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(GrayRaster { width, height, data })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayRaster { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Renders a binary page the way it is stored on disk: ink = 255.
    pub fn from_binary(b: &BinaryRaster) -> Self {
        GrayRaster {
            width: b.width,
            height: b.height,
            data: b.bits.iter().map(|&v| if v { 255 } else { 0 }).collect(),
        }
    }
}

pub(crate) fn same_dims(w0: u32, h0: u32, w1: u32, h1: u32) -> Result<()> {
    if (w0, h0) != (w1, h1) {
        return Err(Error::contract(format!(
            "raster dimensions differ: {w0}x{h0} vs {w1}x{h1}"
        )));
    }
    Ok(())
}

/// Calls `f(src_y, dst_y, src_x, dst_x, run)` for every row segment where a
/// `width`x`height` window at `(x0, y0)` overlaps a `src_w`x`src_h` raster.
fn for_each_overlap_row(
    src_w: u32,
    src_h: u32,
    x0: i64,
    y0: i64,
    width: u32,
    height: u32,
    mut f: impl FnMut(usize, usize, usize, usize, usize),
) {
    let sx0 = x0.max(0);
    let sx1 = (x0 + width as i64).min(src_w as i64);
    if sx1 <= sx0 {
        return;
    }
    let run = (sx1 - sx0) as usize;
    let dx = (sx0 - x0) as usize;
    for dy in 0..height as i64 {
        let sy = y0 + dy;
        if sy < 0 || sy >= src_h as i64 {
            continue;
        }
        f(sy as usize, dy as usize, sx0 as usize, dx, run);
    }
}
