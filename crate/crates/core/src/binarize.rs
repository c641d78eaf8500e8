//! Grayscale to ink-foreground conversion.
//!
//! Both methods output an *inverted* page: dark ink becomes `true`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, GrayRaster};

/// Dynamic range of the standard deviation in Sauvola's formula.
const SAUVOLA_R: f64 = 128.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Binarization {
    /// Global threshold maximising between-class variance.
    Otsu,
    /// Local threshold `m * (1 + k * (s / 128 - 1))` over a square window.
    Sauvola { window: u32, k: f64 },
}

impl Default for Binarization {
    fn default() -> Self {
        Binarization::Sauvola { window: 31, k: 0.2 }
    }
}

impl Binarization {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Binarization::Otsu => Ok(()),
            Binarization::Sauvola { window, k } => {
                if window < 3 || window % 2 == 0 {
                    return Err(Error::contract(format!(
                        "sauvola window must be odd and >= 3, got {window}"
                    )));
                }
                if !(k > 0.0 && k < 1.0) {
                    return Err(Error::contract(format!("sauvola k must lie in (0, 1), got {k}")));
                }
                Ok(())
            }
        }
    }
}

pub fn binarize(gray: &GrayRaster, method: Binarization) -> Result<BinaryRaster> {
    method.validate()?;
    let first = gray.data()[0];
    if gray.data().iter().all(|&v| v == first) {
        return Ok(BinaryRaster::new(gray.width(), gray.height()));
    }
    Ok(match method {
        Binarization::Otsu => {
            let t = otsu_threshold(gray).expect("non-constant image has a threshold");
            let bits = gray.data().iter().map(|&v| v <= t).collect();
            BinaryRaster::from_bits(gray.width(), gray.height(), bits)?
        }
        Binarization::Sauvola { window, k } => sauvola(gray, window, k),
    })
}

/// Otsu threshold: pixels `<= t` form the dark class. `None` when the image
/// holds a single gray level. Ties resolve to the smallest `t`.
pub fn otsu_threshold(gray: &GrayRaster) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &v in gray.data() {
        hist[v as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();

    let mut best = (f64::NEG_INFINITY, 0u8);
    let mut w0 = 0u64;
    let mut sum0 = 0.0;
    for t in 0..255usize {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if between > best.0 {
            best = (between, t as u8);
        }
    }
    Some(best.1)
}

fn sauvola(gray: &GrayRaster, window: u32, k: f64) -> BinaryRaster {
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    // Summed-area tables with a zero row/column in front.
    let stride = w + 1;
    let mut sum = vec![0u64; stride * (h + 1)];
    let mut sq = vec![0u64; stride * (h + 1)];
    for y in 0..h {
        let mut row_s = 0u64;
        let mut row_q = 0u64;
        for x in 0..w {
            let v = gray.data()[y * w + x] as u64;
            row_s += v;
            row_q += v * v;
            sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row_s;
            sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_q;
        }
    }
    let half = (window / 2) as usize;
    let mut bits = Vec::with_capacity(w * h);
    for y in 0..h {
        let y0 = y.saturating_sub(half);
        let y1 = (y + half + 1).min(h);
        for x in 0..w {
            let x0 = x.saturating_sub(half);
            let x1 = (x + half + 1).min(w);
            let n = ((y1 - y0) * (x1 - x0)) as f64;
            let area = |t: &[u64]| {
                (t[y1 * stride + x1] + t[y0 * stride + x0]) as f64
                    - (t[y0 * stride + x1] + t[y1 * stride + x0]) as f64
            };
            let mean = area(&sum) / n;
            let var = (area(&sq) / n - mean * mean).max(0.0);
            let t = mean * (1.0 + k * (var.sqrt() / SAUVOLA_R - 1.0));
            bits.push((gray.data()[y * w + x] as f64) < t);
        }
    }
    BinaryRaster::from_bits(gray.width(), gray.height(), bits).expect("dimensions carried over")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive Otsu: evaluates the between-class variance for every
    /// threshold directly from the pixel list.
    fn otsu_oracle(values: &[u8]) -> Option<u8> {
        let mut best: Option<(f64, u8)> = None;
        for t in 0..=254u8 {
            let (dark, light): (Vec<f64>, Vec<f64>) = {
                let d = values.iter().filter(|&&v| v <= t).map(|&v| v as f64).collect();
                let l = values.iter().filter(|&&v| v > t).map(|&v| v as f64).collect();
                (d, l)
            };
            if dark.is_empty() || light.is_empty() {
                continue;
            }
            let n = values.len() as f64;
            let (w0, w1) = (dark.len() as f64 / n, light.len() as f64 / n);
            let m0 = dark.iter().sum::<f64>() / dark.len() as f64;
            let m1 = light.iter().sum::<f64>() / light.len() as f64;
            let between = w0 * w1 * (m0 - m1).powi(2);
            if best.map_or(true, |(b, _)| between > b * (1.0 + 1e-12)) {
                best = Some((between, t));
            }
        }
        best.map(|(_, t)| t)
    }

    #[test]
    fn constant_image_is_background() {
        let g = GrayRaster::from_fn(9, 7, |_, _| 128);
        for m in [Binarization::Otsu, Binarization::default()] {
            assert!(binarize(&g, m).unwrap().is_empty());
        }
    }

    #[test]
    fn bimodal_ink_is_foreground_under_otsu() {
        let g = GrayRaster::from_fn(16, 16, |x, y| if (x / 4 + y / 3) % 2 == 0 { 10 } else { 240 });
        let t = otsu_threshold(&g).unwrap();
        assert_eq!(Some(t), otsu_oracle(g.data()));
        let b = binarize(&g, Binarization::Otsu).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                assert_eq!(b.get(x, y), g.get(x, y) == 10);
            }
        }
    }

    #[test]
    fn otsu_matches_exhaustive_oracle_on_mixtures() {
        let g = GrayRaster::from_fn(23, 11, |x, y| ((x * 37 + y * 91 + x * y) % 251) as u8);
        assert_eq!(otsu_threshold(&g), otsu_oracle(g.data()));
        let g = GrayRaster::from_fn(20, 20, |x, y| if x < 6 { 40 + (y % 5) as u8 } else { 200 - (x % 7) as u8 });
        assert_eq!(otsu_threshold(&g), otsu_oracle(g.data()));
    }

    #[test]
    fn dark_pixel_on_white_strip() {
        let mut data = vec![255u8; 8];
        data[0] = 0;
        let g = GrayRaster::from_data(8, 1, data).unwrap();
        let b = binarize(&g, Binarization::Otsu).unwrap();
        assert_eq!(b.foreground_pixels().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn sauvola_marks_strokes_on_gradient_paper() {
        // Paper brightness drifts left to right; one dark stroke per column band.
        let g = GrayRaster::from_fn(64, 40, |x, y| {
            let paper = 150 + (x * 100 / 64) as u8;
            if y == 20 || y == 21 { paper / 5 } else { paper }
        });
        let b = binarize(&g, Binarization::Sauvola { window: 15, k: 0.2 }).unwrap();
        for x in 0..64 {
            assert!(b.get(x, 20) && b.get(x, 21));
            assert!(!b.get(x, 5) && !b.get(x, 35));
        }
    }

    #[test]
    fn rejects_bad_sauvola_params() {
        let g = GrayRaster::from_fn(4, 4, |x, _| x as u8);
        assert!(binarize(&g, Binarization::Sauvola { window: 4, k: 0.2 }).is_err());
        assert!(binarize(&g, Binarization::Sauvola { window: 5, k: 1.5 }).is_err());
    }
}
