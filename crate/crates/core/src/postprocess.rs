//! Orientation-aware repair of broken line masks.
//!
//! Each mask component gets an ellipse fit `(θ, α)`. For every probe
//! direction `v_j = (cos(jπ/N), sin(jπ/N))`, `j = 1..=N`, the subset `B_j`
//! holds the components with `α² · |v_j · θ| < ε`, i.e. those whose major
//! axis is close to perpendicular to `v_j`. Members of `B_j` are dilated
//! with a narrow line kernel running perpendicular to `v_j`, and all
//! dilated layers are OR-ed together with the original mask.
//!
//! Subsets may overlap, and near-isotropic components may belong to none;
//! those pass through unchanged.

use serde::{Deserialize, Serialize};

use crate::components::{connected_components, BBox, Component, Connectivity};
use crate::ellipse::{canonical_direction, fit_component, EllipseFit, FitPoints};
use crate::error::{Error, Result};
use crate::raster::BinaryRaster;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostprocessParams {
    /// Number of probe orientations `N`.
    pub n_subsets: u32,
    /// Membership threshold `ε` in `[0, 1]`.
    pub epsilon: f64,
    /// Kernel extent along the subset direction, in pixels.
    pub kernel_length: u32,
    /// Kernel extent across the subset direction, in pixels.
    pub kernel_thickness: u32,
    pub connectivity: Connectivity,
    pub fit_points: FitPoints,
}

impl Default for PostprocessParams {
    fn default() -> Self {
        PostprocessParams {
            n_subsets: 10,
            epsilon: 0.2,
            kernel_length: 21,
            kernel_thickness: 3,
            connectivity: Connectivity::Eight,
            fit_points: FitPoints::Boundary,
        }
    }
}

impl PostprocessParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_subsets < 1 {
            return Err(Error::contract("n_subsets must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::contract(format!("epsilon must lie in [0, 1], got {}", self.epsilon)));
        }
        if self.kernel_length < 1 || self.kernel_thickness < 1 {
            return Err(Error::contract("kernel length and thickness must be at least 1"));
        }
        Ok(())
    }
}

/// A mask component together with its ellipse fit.
#[derive(Debug, Clone)]
pub struct FittedComponent {
    pub component: Component,
    pub fit: EllipseFit,
}

impl FittedComponent {
    pub fn new(component: Component, which: FitPoints) -> Self {
        let fit = fit_component(&component, which);
        FittedComponent { component, fit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationSubset {
    /// Probe index, `1..=N`.
    pub j: u32,
    /// Probe direction `v_j`.
    pub v: (f64, f64),
    pub members: Vec<u32>,
    /// Dilation direction, perpendicular to `v`.
    pub kernel_direction: (f64, f64),
}

pub fn probe_vector(j: u32, n: u32) -> (f64, f64) {
    let phi = j as f64 * std::f64::consts::PI / n as f64;
    (phi.cos(), phi.sin())
}

/// The membership test `α² · |v · θ| < ε`.
pub fn is_member(fit: &EllipseFit, v: (f64, f64), epsilon: f64) -> bool {
    let dot = v.0 * fit.theta.0 + v.1 * fit.theta.1;
    fit.alpha * fit.alpha * dot.abs() < epsilon
}

pub fn orientation_subsets(components: &[FittedComponent], params: &PostprocessParams) -> Vec<OrientationSubset> {
    (1..=params.n_subsets)
        .map(|j| {
            let v = probe_vector(j, params.n_subsets);
            let members = components
                .iter()
                .filter(|c| is_member(&c.fit, v, params.epsilon))
                .map(|c| c.component.id)
                .collect();
            OrientationSubset {
                j,
                v,
                members,
                kernel_direction: canonical_direction((-v.1, v.0)),
            }
        })
        .collect()
}

/// Offsets of a line-segment structuring element centred on the origin.
///
/// The element covers `s·d + t·n` for `|s| <= (length-1)/2` and
/// `|t| <= (thickness-1)/2`, sampled every half pixel and rounded half away
/// from zero, where `n` is `d` turned by 90°. The offset set is symmetric
/// about the origin, contains it, and is 8-connected. Even lengths and
/// thicknesses therefore cover one extra pixel.
pub fn line_kernel(direction: (f64, f64), length: u32, thickness: u32) -> Vec<(i32, i32)> {
    let norm = direction.0.hypot(direction.1);
    let d = (direction.0 / norm, direction.1 / norm);
    let n = (-d.1, d.0);
    let half_steps = |extent: u32| (extent.max(1) - 1) as i32;
    let (sl, st) = (half_steps(length), half_steps(thickness));
    let mut out = Vec::with_capacity(((2 * sl + 1) * (2 * st + 1)) as usize);
    for a in -sl..=sl {
        let s = a as f64 * 0.5;
        for b in -st..=st {
            let t = b as f64 * 0.5;
            let x = round_half_away(s * d.0 + t * n.0);
            let y = round_half_away(s * d.1 + t * n.1);
            out.push((x, y));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Rounds half away from zero, treating values within 1e-9 of a half as
/// exact halves. Trigonometric directions are slightly off (sin 30° is just
/// below 0.5), and without the tolerance a kernel and its quarter-turned
/// copy would round differently.
fn round_half_away(v: f64) -> i32 {
    let m = (v.abs() + 0.5 + 1e-9).floor();
    (m.copysign(v)) as i32
}

fn stamp(out: &mut BinaryRaster, pixels: impl Iterator<Item = (u32, u32)>, kernel: &[(i32, i32)]) {
    let (w, h) = (out.width() as i64, out.height() as i64);
    for (x, y) in pixels {
        for &(dx, dy) in kernel {
            let (nx, ny) = (x as i64 + dx as i64, y as i64 + dy as i64);
            if nx >= 0 && ny >= 0 && nx < w && ny < h {
                out.set(nx as u32, ny as u32, true);
            }
        }
    }
}

/// Dilation of `layer` by [`line_kernel`]. The output contains the input.
pub fn directional_dilate(layer: &BinaryRaster, direction: (f64, f64), length: u32, thickness: u32) -> BinaryRaster {
    let kernel = line_kernel(direction, length, thickness);
    let mut out = BinaryRaster::new(layer.width(), layer.height());
    stamp(&mut out, layer.foreground_pixels(), &kernel);
    out
}

/// Per-component diagnostics of a post-processing run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentFitReport {
    pub id: u32,
    pub area: usize,
    pub bbox: BBox,
    #[serde(flatten)]
    pub fit: EllipseFit,
    /// Probe indices `j` of every subset containing the component.
    pub subsets: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct Postprocessed {
    pub mask: BinaryRaster,
    pub components: Vec<ComponentFitReport>,
    pub subsets: Vec<OrientationSubset>,
}

/// Repairs a predicted line mask. The output is a superset of the input.
pub fn postprocess_mask(predicted: &BinaryRaster, params: &PostprocessParams) -> Result<BinaryRaster> {
    postprocess_detailed(predicted, params).map(|p| p.mask)
}

pub fn postprocess_detailed(predicted: &BinaryRaster, params: &PostprocessParams) -> Result<Postprocessed> {
    params.validate()?;
    let fitted: Vec<FittedComponent> = connected_components(predicted, params.connectivity)
        .into_iter()
        .map(|c| FittedComponent::new(c, params.fit_points))
        .collect();
    let subsets = orientation_subsets(&fitted, params);

    // Dilation distributes over union, so each member is stamped directly
    // into the combined output instead of materialising N layers.
    let mut mask = predicted.clone();
    for subset in &subsets {
        if subset.members.is_empty() {
            continue;
        }
        let kernel = line_kernel(subset.kernel_direction, params.kernel_length, params.kernel_thickness);
        for &id in &subset.members {
            let c = &fitted[(id - 1) as usize].component;
            stamp(&mut mask, c.pixels.iter().copied(), &kernel);
        }
    }

    let components = fitted
        .iter()
        .map(|f| ComponentFitReport {
            id: f.component.id,
            area: f.component.area(),
            bbox: f.component.bbox,
            fit: f.fit,
            subsets: subsets
                .iter()
                .filter(|s| s.members.contains(&f.component.id))
                .map(|s| s.j)
                .collect(),
        })
        .collect();
    Ok(Postprocessed {
        mask,
        components,
        subsets,
    })
}
