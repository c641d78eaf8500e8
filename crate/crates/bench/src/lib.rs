//! Deterministic inputs shared by the benchmarks.

use linemask::pipeline::{stitch_predict, CheckerboardDropout, GtReplayPredictor, WindowSpec};
use linemask::synth::{generate, random_layout, SynthPage};
use linemask::BinaryRaster;

/// A synthetic page of mixed dashed lines.
pub fn page(width: u32, height: u32) -> SynthPage {
    generate(&random_layout(width, height, 17), (width, height), 17).expect("layout fits the page")
}

/// Ground-truth masks with every other core block blanked, the kind of
/// broken prediction post-processing has to repair.
pub fn broken_prediction(page: &SynthPage) -> BinaryRaster {
    let spec = WindowSpec::default();
    let replay = GtReplayPredictor::new(page.gt_masks.clone());
    stitch_predict(&page.page, &CheckerboardDropout::new(replay, spec), &spec).expect("in-process prediction")
}

/// Points on an ellipse with semi-axes 40 and 12 rotated by 0.3 rad.
pub fn ellipse_points(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            let (u, v) = (40.0 * t.cos(), 12.0 * t.sin());
            let (c, s) = (0.3f64.cos(), 0.3f64.sin());
            (100.0 + c * u - s * v, 80.0 + s * u + c * v)
        })
        .collect()
}
