use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, LabelRaster};

use super::WindowSpec;

/// One window handed to a predictor.
#[derive(Debug, Clone, Copy)]
pub struct PatchRequest<'a> {
    /// Page coordinates of the window's top-left pixel. Negative near the
    /// top and left edges, where the window covers padding.
    pub origin: (i64, i64),
    pub patch: &'a BinaryRaster,
}

/// A predictor's answer for one window.
#[derive(Debug, Clone, PartialEq)]
pub enum PatchMask {
    Binary(BinaryRaster),
    /// Row-major line probabilities in `[0, 1]`.
    Probability { width: u32, height: u32, values: Vec<f32> },
}

impl PatchMask {
    pub fn dimensions(&self) -> (u32, u32) {
        match self {
            PatchMask::Binary(b) => (b.width(), b.height()),
            PatchMask::Probability { width, height, .. } => (*width, *height),
        }
    }

    pub fn into_binary(self, threshold: f32) -> Result<BinaryRaster> {
        match self {
            PatchMask::Binary(b) => Ok(b),
            PatchMask::Probability { width, height, values } => {
                BinaryRaster::from_bits(width, height, values.into_iter().map(|p| p >= threshold).collect())
            }
        }
    }
}

/// Maps a window-sized binary patch to a same-sized line mask.
///
/// Implementations must be deterministic. Predictors that cannot serve
/// concurrent calls return `false` from [`Predictor::concurrent`] and the
/// harness calls them one window at a time.
pub trait Predictor: Sync {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask>;

    fn concurrent(&self) -> bool {
        true
    }
}

impl<P: Predictor + ?Sized> Predictor for &P {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        (**self).predict(request)
    }

    fn concurrent(&self) -> bool {
        (**self).concurrent()
    }
}

impl<P: Predictor + ?Sized> Predictor for Box<P> {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        (**self).predict(request)
    }

    fn concurrent(&self) -> bool {
        (**self).concurrent()
    }
}

/// Returns the input patch.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPredictor;

impl Predictor for IdentityPredictor {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        Ok(PatchMask::Binary(request.patch.clone()))
    }
}

/// Returns a patch filled with one value.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor(pub bool);

impl Predictor for ConstantPredictor {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        let (w, h) = (request.patch.width(), request.patch.height());
        Ok(PatchMask::Binary(BinaryRaster::from_fn(w, h, |_, _| self.0)))
    }
}

/// Replays the ground-truth line masks under each requested window.
#[derive(Debug, Clone)]
pub struct GtReplayPredictor {
    gt: LabelRaster,
}

impl GtReplayPredictor {
    pub fn new(gt: LabelRaster) -> Self {
        GtReplayPredictor { gt }
    }
}

impl Predictor for GtReplayPredictor {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        let (x, y) = request.origin;
        let crop = self
            .gt
            .crop_padded(x, y, request.patch.width(), request.patch.height());
        Ok(PatchMask::Binary(crop.to_mask()))
    }
}

/// Wraps a predictor and blanks every other window in a checkerboard
/// pattern over the core grid, simulating a predictor that misses parts of
/// lines.
#[derive(Debug, Clone)]
pub struct CheckerboardDropout<P> {
    inner: P,
    spec: WindowSpec,
}

impl<P> CheckerboardDropout<P> {
    pub fn new(inner: P, spec: WindowSpec) -> Self {
        CheckerboardDropout { inner, spec }
    }
}

impl<P: Predictor> Predictor for CheckerboardDropout<P> {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        let m = self.spec.margin() as i64;
        let core = self.spec.core as i64;
        let (i, j) = ((request.origin.0 + m) / core, (request.origin.1 + m) / core);
        if (i + j) % 2 == 1 {
            let (w, h) = (request.patch.width(), request.patch.height());
            return Ok(PatchMask::Binary(BinaryRaster::new(w, h)));
        }
        self.inner.predict(request)
    }

    fn concurrent(&self) -> bool {
        self.inner.concurrent()
    }
}

pub(crate) fn predictor_error(origin: (i64, i64), err: Error) -> Error {
    match err {
        e @ Error::Predictor { .. } => e,
        other => Error::Predictor {
            x: origin.0,
            y: origin.1,
            message: other.to_string(),
        },
    }
}
