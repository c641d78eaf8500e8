//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use linemask::BinaryRaster;
use num_rational::Ratio;
use rand::Rng;

pub type Q = Ratio<u64>;

/// Component → line assignments of one random page.
#[derive(Debug, Clone)]
pub struct Instance {
    pub gt: BTreeMap<u32, Option<u32>>,
    pub ex: BTreeMap<u32, Option<u32>>,
}

/// Up to 12 components, up to 4 ground-truth lines, up to 5 extracted lines;
/// about one component in ten belongs to no ground-truth line and one in
/// eight to no extracted line.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n = rng.random_range(1..=12u32);
    let gt_lines = rng.random_range(1..=4u32);
    let ex_lines = rng.random_range(1..=5u32);
    let mut gt = BTreeMap::new();
    let mut ex = BTreeMap::new();
    for id in 1..=n {
        let g = if rng.random_bool(0.1) { None } else { Some(rng.random_range(1..=gt_lines)) };
        let e = if rng.random_bool(0.125) { None } else { Some(rng.random_range(1..=ex_lines) + 100) };
        gt.insert(id, g);
        ex.insert(id, e);
    }
    Instance { gt, ex }
}

fn chain(members: &[u32]) -> Vec<(u32, u32)> {
    members.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Brute-force connectivity counting. For each ground-truth line the
/// connectivity components are materialised as explicit edges between
/// consecutive components (plus a beginning-of-line unit for single
/// component lines), then recall and precision are built as sums of
/// rationals. Components outside every ground-truth line are ignored.
pub fn oracle_scores(inst: &Instance) -> BTreeMap<u32, (Q, Q)> {
    let gt_of = |id: &u32| inst.gt.get(id).copied().flatten();
    let mut lines: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (&id, &g) in &inst.gt {
        if let Some(g) = g {
            lines.entry(g).or_default().push(id);
        }
    }
    let mut extracted: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (&id, &e) in &inst.ex {
        if let (Some(e), Some(_)) = (e, gt_of(&id)) {
            extracted.entry(e).or_default().push(id);
        }
    }

    let mut out = BTreeMap::new();
    for (&line, members) in &lines {
        let gt_set: BTreeSet<u32> = members.iter().copied().collect();
        let gt_units = chain(members).len() as u64;
        let singleton = members.len() == 1;

        let mut recall = Q::from_integer(0);
        let mut correct_total = 0u64;
        let mut extracted_total = 0u64;
        for e_members in extracted.values() {
            let inter: Vec<u32> = e_members.iter().copied().filter(|c| gt_set.contains(c)).collect();
            if inter.is_empty() {
                continue;
            }
            let (correct, all) = if singleton {
                // Beginning-of-line unit of the line plus the extracted line's edges.
                (1, chain(e_members).len() as u64 + 1)
            } else {
                (chain(&inter).len() as u64, chain(e_members).len() as u64)
            };
            recall += if singleton { Q::from_integer(1) } else { Q::new(correct, gt_units) };
            correct_total += correct;
            extracted_total += all;
        }
        let precision = if extracted_total == 0 {
            Q::from_integer(0)
        } else {
            Q::new(correct_total, extracted_total)
        };
        out.insert(line, (recall, precision));
    }
    out
}

/// Five `seg_w`×`seg_h` segments separated by `gap` pixels, starting at `(x0, y0)`.
pub fn paint_dashed_line(r: &mut BinaryRaster, x0: u32, y0: u32, seg_w: u32, seg_h: u32, gap: u32, count: u32) {
    for k in 0..count {
        let sx = x0 + k * (seg_w + gap);
        for y in y0..y0 + seg_h {
            for x in sx..sx + seg_w {
                r.set(x, y, true);
            }
        }
    }
}

/// The standard dashed fixture: five 10×3 segments with 4-pixel gaps.
pub fn dashed_page(lines_y: &[u32]) -> BinaryRaster {
    let mut r = BinaryRaster::new(100, 80);
    for &y in lines_y {
        paint_dashed_line(&mut r, 10, y, 10, 3, 4, 5);
    }
    r
}

/// Sliding-window prediction, post-processing, line labelling and scoring
/// of one synthetic page.
pub fn end_to_end<P: linemask::pipeline::Predictor>(
    page: &linemask::synth::SynthPage,
    predictor: &P,
    spec: &linemask::pipeline::WindowSpec,
    params: &linemask::postprocess::PostprocessParams,
) -> linemask::metric::EvalReport {
    use linemask::metric::{evaluate_page, MetricConfig};
    use linemask::pipeline::{masks_to_lines, stitch_predict};
    use linemask::postprocess::postprocess_mask;

    let predicted = stitch_predict(&page.page, predictor, spec).expect("prediction");
    let repaired = postprocess_mask(&predicted, params).expect("post-processing");
    let lines = masks_to_lines(&repaired);
    evaluate_page(&page.page, &page.gt_masks, &lines, &MetricConfig::default()).expect("evaluation")
}

/// `n` points spread evenly in parameter over an ellipse.
pub fn ellipse_points(cx: f64, cy: f64, a: f64, b: f64, phi: f64, n: usize, t0: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let t = t0 + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let (u, v) = (a * t.cos(), b * t.sin());
            (cx + u * phi.cos() - v * phi.sin(), cy + u * phi.sin() + v * phi.cos())
        })
        .collect()
}

pub fn angle_diff_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

pub fn rotate(points: &[(f64, f64)], phi: f64) -> Vec<(f64, f64)> {
    let (c, s) = (phi.cos(), phi.sin());
    points.iter().map(|&(x, y)| (c * x - s * y, s * x + c * y)).collect()
}
