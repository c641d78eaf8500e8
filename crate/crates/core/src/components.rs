//! Connected-component labeling of binary rasters.

use serde::{Deserialize, Serialize};

use crate::raster::{BinaryRaster, LabelRaster};

/// Pixel adjacency; serialized as the number 4 or 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl TryFrom<u32> for Connectivity {
    type Error = String;

    fn try_from(n: u32) -> Result<Self, Self::Error> {
        Connectivity::from_number(n).ok_or_else(|| format!("connectivity must be 4 or 8, got {n}"))
    }
}

impl From<Connectivity> for u32 {
    fn from(c: Connectivity) -> u32 {
        c.as_number()
    }
}

impl Connectivity {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }

    pub fn as_number(self) -> u32 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }

    fn offsets(self) -> &'static [(i64, i64)] {
        const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(i64, i64); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BBox {
    pub fn width(&self) -> u32 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0 + 1
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// A maximal connected set of foreground pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// 1-based, in raster order of each component's first pixel.
    pub id: u32,
    /// Member pixels in raster order.
    pub pixels: Vec<(u32, u32)>,
    pub bbox: BBox,
    pub centroid: (f64, f64),
}

impl Component {
    fn from_pixels(id: u32, mut pixels: Vec<(u32, u32)>) -> Self {
        debug_assert!(!pixels.is_empty());
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        let mut bbox = BBox {
            x0: u32::MAX,
            y0: u32::MAX,
            x1: 0,
            y1: 0,
        };
        let (mut sx, mut sy) = (0.0, 0.0);
        for &(x, y) in &pixels {
            bbox.x0 = bbox.x0.min(x);
            bbox.y0 = bbox.y0.min(y);
            bbox.x1 = bbox.x1.max(x);
            bbox.y1 = bbox.y1.max(y);
            sx += x as f64;
            sy += y as f64;
        }
        let n = pixels.len() as f64;
        Component {
            id,
            pixels,
            bbox,
            centroid: (sx / n, sy / n),
        }
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// Member pixels with at least one 4-neighbour outside the component.
    ///
    /// These trace the component's 8-connected outline.
    pub fn boundary_pixels(&self) -> Vec<(u32, u32)> {
        // Local occupancy grid with a one-pixel frame of background.
        let w = self.bbox.width() as usize + 2;
        let h = self.bbox.height() as usize + 2;
        let mut grid = vec![false; w * h];
        let local = |x: u32, y: u32| (y - self.bbox.y0 + 1) as usize * w + (x - self.bbox.x0 + 1) as usize;
        for &(x, y) in &self.pixels {
            grid[local(x, y)] = true;
        }
        self.pixels
            .iter()
            .copied()
            .filter(|&(x, y)| {
                let i = local(x, y);
                !(grid[i - 1] && grid[i + 1] && grid[i - w] && grid[i + w])
            })
            .collect()
    }

    /// Paints the component into `mask`.
    pub fn paint(&self, mask: &mut BinaryRaster) {
        for &(x, y) in &self.pixels {
            mask.set(x, y, true);
        }
    }
}

/// Labels every foreground pixel with its component id (0 = background).
pub fn label_pixels(img: &BinaryRaster, connectivity: Connectivity) -> (LabelRaster, u32) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut labels = vec![0u32; img.bits().len()];
    let mut next = 0u32;
    let mut stack: Vec<(i64, i64)> = Vec::new();
    for (start, &fg) in img.bits().iter().enumerate() {
        if !fg || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push((start as i64 % w, start as i64 / w));
        while let Some((x, y)) = stack.pop() {
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if img.bits()[j] && labels[j] == 0 {
                    labels[j] = next;
                    stack.push((nx, ny));
                }
            }
        }
    }
    let raster = LabelRaster::from_labels(img.width(), img.height(), labels).expect("same dimensions");
    (raster, next)
}

/// Connected components in deterministic raster-scan order of their first
/// pixel; ids start at 1. The components partition the foreground.
pub fn connected_components(img: &BinaryRaster, connectivity: Connectivity) -> Vec<Component> {
    let (labels, count) = label_pixels(img, connectivity);
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); count as usize];
    let w = img.width();
    for (i, &l) in labels.labels().iter().enumerate() {
        if l != 0 {
            buckets[(l - 1) as usize].push((i as u32 % w, i as u32 / w));
        }
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(i, px)| Component::from_pixels(i as u32 + 1, px))
        .collect()
}

pub fn count_components(img: &BinaryRaster, connectivity: Connectivity) -> u32 {
    label_pixels(img, connectivity).1
}
