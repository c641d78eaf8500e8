//! Seeded synthetic pages with dashed "text" lines and their line masks.
//!
//! Each line follows a path (straight, rotated, or sinusoidal about a
//! rotated baseline). Dashes are rectangles laid along the path by arc
//! length, each oriented along its chord. The ground-truth mask of a line
//! is the path thickened by `stroke_thickness / 2 + mask_margin`, united
//! with the line's dashes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, LabelRaster};

/// Path sampling step in pixels.
const PATH_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LineKind {
    Straight,
    /// Baseline rotated by `angle` degrees (clockwise on screen, y down).
    Skewed { angle: f64 },
    /// Sinusoid of `amplitude` px and `period` px about a baseline rotated by
    /// `angle` degrees.
    Curved {
        amplitude: f64,
        period: f64,
        #[serde(default)]
        angle: f64,
    },
}

fn default_mask_margin() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub kind: LineKind,
    /// Path start in pixel coordinates (pixel `(x, y)` spans `[x, x+1)`).
    pub start: (f64, f64),
    /// Path length measured along the baseline.
    pub length: f64,
    pub segment_length: f64,
    pub gap: f64,
    pub stroke_thickness: f64,
    /// Extra half-width of the line mask beyond the stroke.
    #[serde(default = "default_mask_margin")]
    pub mask_margin: f64,
    /// Dash lengths vary uniformly by up to ± this many pixels.
    #[serde(default)]
    pub jitter: f64,
}

impl LineSpec {
    pub fn straight(start: (f64, f64), length: f64, segment_length: f64, gap: f64, stroke_thickness: f64) -> Self {
        LineSpec {
            kind: LineKind::Straight,
            start,
            length,
            segment_length,
            gap,
            stroke_thickness,
            mask_margin: default_mask_margin(),
            jitter: 0.0,
        }
    }

    pub fn with_kind(mut self, kind: LineKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Generation(m));
        if !(self.length > 0.0) {
            return bad(format!("line length must be positive, got {}", self.length));
        }
        if !(self.segment_length > 0.0) {
            return bad(format!("segment length must be positive, got {}", self.segment_length));
        }
        if !(self.gap >= 0.0) {
            return bad(format!("gap must be non-negative, got {}", self.gap));
        }
        if !(self.stroke_thickness >= 1.0) {
            return bad(format!("stroke thickness must be at least 1, got {}", self.stroke_thickness));
        }
        if !(self.mask_margin >= 0.0) || !(self.jitter >= 0.0) || self.jitter >= self.segment_length {
            return bad("mask margin and jitter must be non-negative, jitter below segment length".into());
        }
        if let LineKind::Curved { amplitude, period, .. } = self.kind {
            if !(period > 0.0) || !(amplitude >= 0.0) || amplitude >= period / 2.0 {
                return bad(format!(
                    "curved line needs 0 <= amplitude < period / 2, got {amplitude} and {period}"
                ));
            }
        }
        Ok(())
    }

    fn baseline_angle(&self) -> f64 {
        match self.kind {
            LineKind::Straight => 0.0,
            LineKind::Skewed { angle } | LineKind::Curved { angle, .. } => angle.to_radians(),
        }
    }

    /// Point on the path at baseline parameter `u`.
    pub fn point(&self, u: f64) -> (f64, f64) {
        let a = self.baseline_angle();
        let (b, n) = ((a.cos(), a.sin()), (-a.sin(), a.cos()));
        let off = match self.kind {
            LineKind::Curved { amplitude, period, .. } => amplitude * (2.0 * PI * u / period).sin(),
            _ => 0.0,
        };
        (
            self.start.0 + u * b.0 + off * n.0,
            self.start.1 + u * b.1 + off * n.1,
        )
    }

    /// Unit tangent at baseline parameter `u`.
    pub fn tangent(&self, u: f64) -> (f64, f64) {
        let a = self.baseline_angle();
        let (b, n) = ((a.cos(), a.sin()), (-a.sin(), a.cos()));
        let slope = match self.kind {
            LineKind::Curved { amplitude, period, .. } => amplitude * 2.0 * PI / period * (2.0 * PI * u / period).cos(),
            _ => 0.0,
        };
        let t = (b.0 + slope * n.0, b.1 + slope * n.1);
        let len = t.0.hypot(t.1);
        (t.0 / len, t.1 / len)
    }
}

/// Page size plus line list; the `synth` command's input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub width: u32,
    pub height: u32,
    pub lines: Vec<LineSpec>,
}

/// Where one dash was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DashRecord {
    /// 1-based line label.
    pub line: u32,
    pub center: (f64, f64),
    /// Unit chord direction.
    pub direction: (f64, f64),
    /// Baseline parameter at the dash centre.
    pub u: f64,
}

#[derive(Debug, Clone)]
pub struct SynthPage {
    pub page: BinaryRaster,
    pub gt_masks: LabelRaster,
    pub dashes: Vec<DashRecord>,
}

/// Arc-length table of a path sampled every [`PATH_STEP`] of baseline.
struct ArcTable {
    u: Vec<f64>,
    s: Vec<f64>,
}

impl ArcTable {
    fn new(spec: &LineSpec) -> Self {
        let steps = (spec.length / PATH_STEP).ceil() as usize;
        let mut u = Vec::with_capacity(steps + 1);
        let mut s = Vec::with_capacity(steps + 1);
        let mut prev = spec.point(0.0);
        let mut acc = 0.0;
        for i in 0..=steps {
            let ui = (i as f64 * PATH_STEP).min(spec.length);
            let p = spec.point(ui);
            acc += (p.0 - prev.0).hypot(p.1 - prev.1);
            prev = p;
            u.push(ui);
            s.push(acc);
        }
        ArcTable { u, s }
    }

    fn total(&self) -> f64 {
        *self.s.last().expect("non-empty table")
    }

    /// Baseline parameter at arc length `s`, linearly interpolated.
    fn u_at(&self, s: f64) -> f64 {
        let i = self.s.partition_point(|&v| v < s);
        if i == 0 {
            return self.u[0];
        }
        if i >= self.s.len() {
            return *self.u.last().unwrap();
        }
        let (s0, s1) = (self.s[i - 1], self.s[i]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        self.u[i - 1] + t * (self.u[i] - self.u[i - 1])
    }
}

/// Calls `f` for every pixel whose centre satisfies `-hl <= along < hl`
/// and `-ht <= across < ht` in the frame `(center, dir)`.
fn for_each_rect_pixel(center: (f64, f64), dir: (f64, f64), hl: f64, ht: f64, mut f: impl FnMut(i64, i64)) {
    let n = (-dir.1, dir.0);
    let ext_x = hl * dir.0.abs() + ht * n.0.abs() + 1.0;
    let ext_y = hl * dir.1.abs() + ht * n.1.abs() + 1.0;
    let (x0, x1) = ((center.0 - ext_x).floor() as i64, (center.0 + ext_x).ceil() as i64);
    let (y0, y1) = ((center.1 - ext_y).floor() as i64, (center.1 + ext_y).ceil() as i64);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (qx, qy) = (x as f64 + 0.5 - center.0, y as f64 + 0.5 - center.1);
            let along = qx * dir.0 + qy * dir.1;
            let across = qx * n.0 + qy * n.1;
            if along >= -hl && along < hl && across >= -ht && across < ht {
                f(x, y);
            }
        }
    }
}

fn for_each_disc_pixel(center: (f64, f64), r: f64, mut f: impl FnMut(i64, i64)) {
    let (x0, x1) = ((center.0 - r - 1.0).floor() as i64, (center.0 + r + 1.0).ceil() as i64);
    let (y0, y1) = ((center.1 - r - 1.0).floor() as i64, (center.1 + r + 1.0).ceil() as i64);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (dx, dy) = (x as f64 + 0.5 - center.0, y as f64 + 0.5 - center.1);
            if dx * dx + dy * dy <= r * r {
                f(x, y);
            }
        }
    }
}

/// Renders the lines. Fails if a line leaves the page or two line masks
/// touch.
pub fn generate(specs: &[LineSpec], size: (u32, u32), seed: u64) -> Result<SynthPage> {
    let (w, h) = size;
    if w == 0 || h == 0 {
        return Err(Error::Generation(format!("page size must be positive, got {w}x{h}")));
    }
    let mut page = BinaryRaster::new(w, h);
    let mut gt = LabelRaster::new(w, h);
    let mut dashes = Vec::new();

    for (k, spec) in specs.iter().enumerate() {
        spec.validate()?;
        let label = k as u32 + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (label as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let table = ArcTable::new(spec);
        let total = table.total();

        let mut own: Vec<(i64, i64)> = Vec::new();
        let mut mask: Vec<(i64, i64)> = Vec::new();
        let mut s = 0.0;
        let mut end = 0.0;
        loop {
            let seg = if spec.jitter > 0.0 {
                spec.segment_length + rng.random_range(-spec.jitter..=spec.jitter)
            } else {
                spec.segment_length
            };
            if s + seg > total + 1e-9 {
                break;
            }
            let (u0, u1) = (table.u_at(s), table.u_at(s + seg));
            let (p0, p1) = (spec.point(u0), spec.point(u1));
            let chord = (p1.0 - p0.0, p1.1 - p0.1);
            let len = chord.0.hypot(chord.1);
            let dir = (chord.0 / len, chord.1 / len);
            let center = (0.5 * (p0.0 + p1.0), 0.5 * (p0.1 + p1.1));
            for_each_rect_pixel(center, dir, 0.5 * len, 0.5 * spec.stroke_thickness, |x, y| own.push((x, y)));
            dashes.push(DashRecord {
                line: label,
                center,
                direction: dir,
                u: table.u_at(s + 0.5 * seg),
            });
            end = s + seg;
            s += seg + spec.gap;
        }
        if own.is_empty() {
            return Err(Error::Generation(format!(
                "line {label} is shorter than one segment"
            )));
        }

        let r = 0.5 * spec.stroke_thickness + spec.mask_margin;
        let last = table.u_at(end);
        for &u in table.u.iter().take_while(|&&u| u <= last) {
            for_each_disc_pixel(spec.point(u), r, |x, y| mask.push((x, y)));
        }
        for_each_disc_pixel(spec.point(last), r, |x, y| mask.push((x, y)));
        mask.extend_from_slice(&own);

        for &(x, y) in &mask {
            if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
                return Err(Error::Generation(format!("line {label} leaves the {w}x{h} page")));
            }
            let existing = gt.get(x as u32, y as u32);
            if existing != 0 && existing != label {
                return Err(Error::Generation(format!(
                    "masks of lines {existing} and {label} overlap at ({x}, {y})"
                )));
            }
            gt.set(x as u32, y as u32, label);
        }
        for (x, y) in own {
            page.set(x as u32, y as u32, true);
        }
    }
    Ok(SynthPage {
        page,
        gt_masks: gt,
        dashes,
    })
}

/// A random mix of straight, skewed, curved and vertical lines that fills a
/// page without masks touching. Adjacent lines stay at least 24 px apart.
pub fn random_layout(width: u32, height: u32, seed: u64) -> Vec<LineSpec> {
    const BAND: f64 = 64.0;
    const MARGIN: f64 = 16.0;
    const PIECE_GAP: f64 = 48.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let side_column = width >= 400 && height >= 200;
    let main_right = if side_column { w - 80.0 } else { w - MARGIN };
    let mut lines = Vec::new();

    let dash = |rng: &mut ChaCha8Rng, kind: LineKind, start: (f64, f64), length: f64| LineSpec {
        kind,
        start,
        length,
        segment_length: rng.random_range(8.0..16.0f64).round(),
        gap: rng.random_range(3.0..7.0f64).round(),
        stroke_thickness: rng.random_range(3.0..5.0f64).round(),
        mask_margin: 2.0,
        jitter: 0.0,
    };

    let mut cy = MARGIN + BAND / 2.0;
    while cy + BAND / 2.0 <= h - MARGIN {
        let span = main_right - MARGIN;
        let pieces = if span > 3.0 * PIECE_GAP && rng.random_bool(0.4) { 2 } else { 1 };
        let piece_len = (span - PIECE_GAP * (pieces - 1) as f64) / pieces as f64;
        for p in 0..pieces {
            let x0 = MARGIN + p as f64 * (piece_len + PIECE_GAP);
            let kind_pick = rng.random_range(0..3u32);
            let line = match kind_pick {
                0 => dash(&mut rng, LineKind::Straight, (x0, cy), piece_len),
                1 => {
                    let mag = rng.random_range(3.0..12.0f64);
                    let angle = if rng.random_bool(0.5) { mag } else { -mag };
                    let a = angle.to_radians();
                    let max_rise = BAND - 36.0;
                    let length = (piece_len / a.cos()).min(max_rise / a.sin().abs());
                    let start = (x0, cy - 0.5 * length * a.sin());
                    dash(&mut rng, LineKind::Skewed { angle }, start, length)
                }
                _ => {
                    let amplitude = rng.random_range(4.0..10.0f64);
                    let period = rng.random_range(120.0..300.0f64);
                    dash(&mut rng, LineKind::Curved { amplitude, period, angle: 0.0 }, (x0, cy), piece_len)
                }
            };
            lines.push(line);
        }
        cy += BAND;
    }
    if side_column {
        let start = (w - 40.0, MARGIN + 8.0);
        lines.push(dash(&mut rng, LineKind::Skewed { angle: 90.0 }, start, h - 2.0 * MARGIN - 16.0));
    }
    lines
}
