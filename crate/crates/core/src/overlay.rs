//! Colour overlays of line labels on a page, for visual inspection.

use image::{ImageBuffer, Rgb};

use crate::error::Result;
use crate::io::RgbImage;
use crate::raster::{same_dims, GrayRaster, LabelRaster};

/// Weight of the line colour against the page intensity.
const TINT: f64 = 0.6;

/// Deterministic colour of a line id: hues step by the golden angle so
/// consecutive ids stay far apart.
pub fn line_color(id: u32) -> [u8; 3] {
    let hue = (id as f64 * 137.507_764_050_037_85).rem_euclid(360.0);
    hsv_to_rgb(hue, 0.85, 0.95)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r, g, b].map(|u| ((u + m) * 255.0).round() as u8)
}

/// Tints every labelled pixel with its line colour; background pixels keep
/// the page's gray value.
pub fn overlay(page: &GrayRaster, labels: &LabelRaster) -> Result<RgbImage> {
    same_dims(page.width(), page.height(), labels.width(), labels.height())?;
    Ok(ImageBuffer::from_fn(page.width(), page.height(), |x, y| {
        let g = page.get(x, y);
        match labels.get(x, y) {
            0 => Rgb([g, g, g]),
            id => {
                let c = line_color(id);
                Rgb(c.map(|v| (TINT * v as f64 + (1.0 - TINT) * g as f64).round() as u8))
            }
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn empty_labels_keep_the_page() {
        let page = GrayRaster::from_fn(5, 4, |x, y| (x * 40 + y * 7) as u8);
        let img = overlay(&page, &LabelRaster::new(5, 4)).unwrap();
        for (x, y, p) in img.enumerate_pixels() {
            let g = page.get(x, y);
            assert_eq!(p.0, [g, g, g]);
        }
    }

    #[test]
    fn two_labels_two_colors() {
        let page = GrayRaster::from_fn(4, 1, |_, _| 255);
        let labels = LabelRaster::from_labels(4, 1, vec![0, 1, 2, 2]).unwrap();
        let img = overlay(&page, &labels).unwrap();
        let colors: BTreeSet<[u8; 3]> = img.pixels().map(|p| p.0).collect();
        assert_eq!(colors.len(), 3);
        assert_eq!(img.get_pixel(2, 0), img.get_pixel(3, 0));

        let swapped = labels.map_labels(|l| 3 - l);
        let img2 = overlay(&page, &swapped).unwrap();
        assert_eq!(img2.get_pixel(1, 0), img.get_pixel(2, 0));
        assert_eq!(img2.get_pixel(2, 0), img.get_pixel(1, 0));
    }

    #[test]
    fn dimension_mismatch() {
        let page = GrayRaster::from_fn(4, 1, |_, _| 255);
        assert!(overlay(&page, &LabelRaster::new(3, 1)).is_err());
    }

    #[test]
    fn first_colors_are_distinct() {
        let set: BTreeSet<[u8; 3]> = (1..=64).map(line_color).collect();
        assert_eq!(set.len(), 64);
    }
}
