use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::BinaryRaster;

use super::predictor::{predictor_error, PatchRequest, Predictor};
use super::WindowSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StitchOptions {
    /// Probability masks are foreground at or above this value.
    pub threshold: f32,
}

impl Default for StitchOptions {
    fn default() -> Self {
        StitchOptions { threshold: 0.5 }
    }
}

/// One prediction window and the page region its core block covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreTile {
    /// Page coordinates of the window's top-left corner.
    pub window_origin: (i64, i64),
    /// Page coordinates of the core's top-left corner.
    pub core_origin: (u32, u32),
    /// Core extent clipped to the page.
    pub core_width: u32,
    pub core_height: u32,
}

/// Windows needed to cover a `width`x`height` page, in raster order.
pub fn core_tiles(width: u32, height: u32, spec: &WindowSpec) -> Vec<CoreTile> {
    let core = spec.core;
    let margin = spec.margin() as i64;
    let nx = width.div_ceil(core);
    let ny = height.div_ceil(core);
    let mut tiles = Vec::with_capacity((nx * ny) as usize);
    for j in 0..ny {
        for i in 0..nx {
            let (cx, cy) = (i * core, j * core);
            tiles.push(CoreTile {
                window_origin: (cx as i64 - margin, cy as i64 - margin),
                core_origin: (cx, cy),
                core_width: core.min(width - cx),
                core_height: core.min(height - cy),
            });
        }
    }
    tiles
}

/// Sliding-window prediction with default options.
pub fn stitch_predict<P: Predictor + ?Sized>(page: &BinaryRaster, predictor: &P, spec: &WindowSpec) -> Result<BinaryRaster> {
    stitch_predict_with(page, predictor, spec, &StitchOptions::default())
}

pub fn stitch_predict_with<P: Predictor + ?Sized>(
    page: &BinaryRaster,
    predictor: &P,
    spec: &WindowSpec,
    opts: &StitchOptions,
) -> Result<BinaryRaster> {
    spec.validate()?;
    let tiles = core_tiles(page.width(), page.height(), spec);
    let run = |tile: &CoreTile| -> Result<BinaryRaster> {
        let (ox, oy) = tile.window_origin;
        let patch = page.crop_padded(ox, oy, spec.window, spec.window);
        let mask = predictor
            .predict(&PatchRequest { origin: (ox, oy), patch: &patch })
            .map_err(|e| predictor_error((ox, oy), e))?;
        let dims = mask.dimensions();
        if dims != (spec.window, spec.window) {
            return Err(Error::Predictor {
                x: ox,
                y: oy,
                message: format!(
                    "returned a {}x{} mask for a {}x{} window",
                    dims.0, dims.1, spec.window, spec.window
                ),
            });
        }
        let mask = mask.into_binary(opts.threshold)?;
        let m = spec.margin() as i64;
        Ok(mask.crop_padded(m, m, tile.core_width, tile.core_height))
    };
    let blocks: Vec<Result<BinaryRaster>> = if predictor.concurrent() {
        tiles.par_iter().map(run).collect()
    } else {
        tiles.iter().map(run).collect()
    };

    let mut out = BinaryRaster::new(page.width(), page.height());
    for (tile, block) in tiles.iter().zip(blocks) {
        let block = block?;
        let (cx, cy) = tile.core_origin;
        for (x, y) in block.foreground_pixels() {
            out.set(cx + x, cy + y, true);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{ConstantPredictor, IdentityPredictor, PatchMask};

    #[test]
    fn tiles_partition_the_page() {
        let spec = WindowSpec::new(320, 100).unwrap();
        for (w, h) in [(37, 41), (100, 100), (320, 320), (701, 450)] {
            let mut hits = vec![0u8; (w * h) as usize];
            for t in core_tiles(w, h, &spec) {
                for y in t.core_origin.1..t.core_origin.1 + t.core_height {
                    for x in t.core_origin.0..t.core_origin.0 + t.core_width {
                        hits[(y * w + x) as usize] += 1;
                    }
                }
                let m = spec.margin() as i64;
                assert_eq!(t.window_origin.0 + m, t.core_origin.0 as i64);
            }
            assert!(hits.iter().all(|&n| n == 1), "{w}x{h}");
        }
    }

    #[test]
    fn identity_and_saturation() {
        let spec = WindowSpec::new(32, 10).unwrap();
        let page = BinaryRaster::from_fn(27, 19, |x, y| (x * x + 3 * y) % 7 == 0);
        assert_eq!(stitch_predict(&page, &IdentityPredictor, &spec).unwrap(), page);
        let full = stitch_predict(&page, &ConstantPredictor(true), &spec).unwrap();
        assert_eq!(full.count_foreground(), 27 * 19);
    }

    struct WrongSize;
    impl Predictor for WrongSize {
        fn predict(&self, _: &PatchRequest<'_>) -> Result<PatchMask> {
            Ok(PatchMask::Binary(BinaryRaster::new(3, 3)))
        }
    }

    #[test]
    fn wrong_output_size_names_offset() {
        let spec = WindowSpec::new(32, 10).unwrap();
        let err = stitch_predict(&BinaryRaster::new(5, 5), &WrongSize, &spec).unwrap_err();
        match err {
            Error::Predictor { x, y, message } => {
                assert_eq!((x, y), (-11, -11));
                assert!(message.contains("3x3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
