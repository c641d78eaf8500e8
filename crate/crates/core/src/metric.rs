//! Connectivity-component line extraction accuracy.
//!
//! A line of `m` text components has `m − 1` connections between
//! consecutive components. An extracted line `E` credits a ground-truth line
//! `G` with `|E ∩ G| − 1` of them. Per ground-truth line:
//!
//! ```text
//! R = Σ_i (|E_i ∩ G| − 1) / (|G| − 1)
//! P = Σ_i (|E_i ∩ G| − 1) / Σ_i (|E_i| − 1)
//! ```
//!
//! summing over the extracted lines that intersect `G`. Splitting a line
//! lowers `R`; merging foreign components into it lowers `P`.
//!
//! Single-component lines have no internal connection. Under the default
//! [`SingletonPolicy::BeginningOfLine`] the line's one beginning-of-line
//! unit is counted instead: recall is 1 when some extracted line contains
//! the component, and precision is `1 / |E|` for that extracted line, i.e.
//! 1 exactly when `E = G`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::components::{connected_components, Component, Connectivity};
use crate::error::{Error, Result};
use crate::raster::{same_dims, BinaryRaster, LabelRaster};

pub type ComponentSet = BTreeSet<u32>;

/// Unreduced non-negative ratio. Kept as integers so that per-line scores
/// are exact and micro averages can sum numerators and denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "fraction with zero denominator");
        Fraction { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact comparison by cross-multiplication.
    pub fn same_value(self, other: Fraction) -> bool {
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Unweighted mean of per-line recall and precision.
    #[default]
    Macro,
    /// Ratio of summed numerators to summed denominators.
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonPolicy {
    /// Score single-component lines by their beginning-of-line unit.
    #[default]
    BeginningOfLine,
    /// Leave single-component lines out of the aggregates.
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub averaging: Averaging,
    pub singleton_policy: SingletonPolicy,
    /// Connectivity used to extract text components from the page.
    pub connectivity: Connectivity,
    /// Count components outside every ground-truth line in `|E_i|`.
    pub count_unassigned_in_ei: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            averaging: Averaging::Macro,
            singleton_policy: SingletonPolicy::BeginningOfLine,
            connectivity: Connectivity::Eight,
            count_unassigned_in_ei: false,
        }
    }
}

/// Identifies how components are matched to masks in reports.
pub const ASSIGNMENT_POLICY: &str = "majority_pixel_overlap_smaller_label_on_tie";

/// Maps every component to the mask label covering most of its pixels.
/// Components over background only map to `None`; ties go to the smaller
/// label.
pub fn assign_components(components: &[Component], masks: &LabelRaster) -> Result<BTreeMap<u32, Option<u32>>> {
    let mut out = BTreeMap::new();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for c in components {
        if c.bbox.x1 >= masks.width() || c.bbox.y1 >= masks.height() {
            return Err(Error::contract(format!(
                "component {} extends beyond the {}x{} mask raster",
                c.id,
                masks.width(),
                masks.height()
            )));
        }
        counts.clear();
        for &(x, y) in &c.pixels {
            let l = masks.get(x, y);
            if l != 0 {
                *counts.entry(l).or_default() += 1;
            }
        }
        // BTreeMap iterates labels ascending, so the first maximum wins ties.
        let mut best: Option<(u32, usize)> = None;
        for (&label, &n) in &counts {
            if best.map_or(true, |(_, m)| n > m) {
                best = Some((label, n));
            }
        }
        out.insert(c.id, best.map(|(l, _)| l));
    }
    Ok(out)
}

/// Ground-truth and extracted component sets of one page.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSets {
    pub ground_truth: BTreeMap<u32, ComponentSet>,
    pub extracted: BTreeMap<u32, ComponentSet>,
    /// Components that belong to no ground-truth line.
    pub unassigned: ComponentSet,
}

impl LineSets {
    /// Builds the sets from per-component assignments. Components without a
    /// ground-truth line only enter extracted sets when
    /// `count_unassigned_in_ei` is set.
    pub fn from_assignments(
        gt: &BTreeMap<u32, Option<u32>>,
        extracted: &BTreeMap<u32, Option<u32>>,
        count_unassigned_in_ei: bool,
    ) -> Self {
        let mut sets = LineSets::default();
        for (&id, &line) in gt {
            match line {
                Some(l) => {
                    sets.ground_truth.entry(l).or_default().insert(id);
                }
                None => {
                    sets.unassigned.insert(id);
                }
            }
        }
        for (&id, &line) in extracted {
            let Some(l) = line else { continue };
            if !count_unassigned_in_ei && !matches!(gt.get(&id), Some(Some(_))) {
                continue;
            }
            sets.extracted.entry(l).or_default().insert(id);
        }
        sets
    }

    /// Extracted lines intersecting `g`, ascending by id.
    pub fn intersecting(&self, g: &ComponentSet) -> Vec<(u32, &ComponentSet)> {
        self.extracted
            .iter()
            .filter(|(_, e)| !e.is_disjoint(g))
            .map(|(&id, e)| (id, e))
            .collect()
    }
}

fn check_gt(g: &ComponentSet) -> Result<()> {
    if g.is_empty() {
        return Err(Error::contract("ground-truth line has no components"));
    }
    Ok(())
}

/// Line recall. Extracted sets disjoint from `g` are ignored.
pub fn line_recall(g: &ComponentSet, es: &[&ComponentSet]) -> Result<Fraction> {
    check_gt(g)?;
    if g.len() == 1 {
        let hit = es.iter().any(|e| !e.is_disjoint(g));
        return Ok(if hit { Fraction::ONE } else { Fraction::ZERO });
    }
    let num: u64 = es
        .iter()
        .map(|e| e.intersection(g).count() as u64)
        .filter(|&n| n > 0)
        .map(|n| n - 1)
        .sum();
    Ok(Fraction::new(num, g.len() as u64 - 1))
}

/// Line precision. Extracted sets disjoint from `g` are ignored. A zero
/// denominator (every intersecting line holds a single component, or none
/// intersects) scores 0.
pub fn line_precision(g: &ComponentSet, es: &[&ComponentSet]) -> Result<Fraction> {
    check_gt(g)?;
    let hits: Vec<(u64, u64)> = es
        .iter()
        .map(|e| (e.intersection(g).count() as u64, e.len() as u64))
        .filter(|&(i, _)| i > 0)
        .collect();
    if g.len() == 1 {
        return Ok(match hits.first() {
            Some(&(_, size)) => Fraction::new(1, size),
            None => Fraction::ZERO,
        });
    }
    let num: u64 = hits.iter().map(|&(i, _)| i - 1).sum();
    let den: u64 = hits.iter().map(|&(_, n)| n - 1).sum();
    if den == 0 {
        debug_assert_eq!(num, 0);
        return Ok(Fraction::ZERO);
    }
    debug_assert!(num <= den);
    Ok(Fraction::new(num, den))
}

pub fn f_measure(recall: f64, precision: f64) -> f64 {
    if recall + precision > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectingLine {
    pub extracted_id: u32,
    pub intersection: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineScore {
    pub line_id: u32,
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
    pub recall_fraction: Fraction,
    pub precision_fraction: Fraction,
    /// `|G|`.
    pub gt_size: usize,
    pub intersecting_lines: Vec<IntersectingLine>,
    /// False when the singleton policy leaves this line out of the aggregates.
    pub counted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_line: Vec<LineScore>,
    /// The mode selected by `params.averaging`.
    pub aggregate_recall: f64,
    pub aggregate_precision: f64,
    pub aggregate_f: f64,
    pub averaging: Averaging,
    pub macro_average: Aggregate,
    pub micro_average: Aggregate,
    pub params: MetricConfig,
    pub assignment_policy: String,
    pub components: usize,
    pub unassigned_components: usize,
    /// Components in some ground-truth line but in no extracted line.
    pub missed_components: usize,
}

/// Scores every ground-truth line of `sets`.
pub fn score_lines(sets: &LineSets, cfg: &MetricConfig) -> Result<EvalReport> {
    if sets.ground_truth.is_empty() {
        return Err(Error::contract("ground truth contains no lines"));
    }
    let mut per_line = Vec::with_capacity(sets.ground_truth.len());
    for (&line_id, g) in &sets.ground_truth {
        let hits = sets.intersecting(g);
        let es: Vec<&ComponentSet> = hits.iter().map(|&(_, e)| e).collect();
        let r = line_recall(g, &es)?;
        let p = line_precision(g, &es)?;
        per_line.push(LineScore {
            line_id,
            recall: r.value(),
            precision: p.value(),
            f_measure: f_measure(r.value(), p.value()),
            recall_fraction: r,
            precision_fraction: p,
            gt_size: g.len(),
            intersecting_lines: hits
                .iter()
                .map(|&(id, e)| IntersectingLine {
                    extracted_id: id,
                    intersection: e.intersection(g).count(),
                    size: e.len(),
                })
                .collect(),
            counted: !(g.len() == 1 && cfg.singleton_policy == SingletonPolicy::Exclude),
        });
    }

    let counted: Vec<&LineScore> = per_line.iter().filter(|l| l.counted).collect();
    if counted.is_empty() {
        return Err(Error::contract("no ground-truth line is scored under the singleton policy"));
    }
    let n = counted.len() as f64;
    let macro_r = counted.iter().map(|l| l.recall).sum::<f64>() / n;
    let macro_p = counted.iter().map(|l| l.precision).sum::<f64>() / n;
    let sum = |f: fn(&LineScore) -> Fraction| {
        counted.iter().fold((0u64, 0u64), |(a, b), l| {
            let v = f(l);
            (a + v.num, b + v.den)
        })
    };
    let (rn, rd) = sum(|l| l.recall_fraction);
    let (pn, pd) = sum(|l| l.precision_fraction);
    let micro_r = rn as f64 / rd as f64;
    let micro_p = pn as f64 / pd as f64;
    let macro_average = Aggregate {
        recall: macro_r,
        precision: macro_p,
        f_measure: f_measure(macro_r, macro_p),
    };
    let micro_average = Aggregate {
        recall: micro_r,
        precision: micro_p,
        f_measure: f_measure(micro_r, micro_p),
    };
    let chosen = match cfg.averaging {
        Averaging::Macro => macro_average,
        Averaging::Micro => micro_average,
    };

    let in_extracted: ComponentSet = sets.extracted.values().flatten().copied().collect();
    let missed = sets
        .ground_truth
        .values()
        .flatten()
        .filter(|id| !in_extracted.contains(id))
        .count();
    let components = sets.ground_truth.values().map(|g| g.len()).sum::<usize>() + sets.unassigned.len();

    Ok(EvalReport {
        per_line,
        aggregate_recall: chosen.recall,
        aggregate_precision: chosen.precision,
        aggregate_f: chosen.f_measure,
        averaging: cfg.averaging,
        macro_average,
        micro_average,
        params: *cfg,
        assignment_policy: ASSIGNMENT_POLICY.to_string(),
        components,
        unassigned_components: sets.unassigned.len(),
        missed_components: missed,
    })
}

/// Evaluates extracted line masks against ground-truth line masks over the
/// given text components.
pub fn evaluate(
    page_components: &[Component],
    gt_masks: &LabelRaster,
    extracted_masks: &LabelRaster,
    cfg: &MetricConfig,
) -> Result<EvalReport> {
    same_dims(
        gt_masks.width(),
        gt_masks.height(),
        extracted_masks.width(),
        extracted_masks.height(),
    )?;
    let gt = assign_components(page_components, gt_masks)?;
    let ex = assign_components(page_components, extracted_masks)?;
    let sets = LineSets::from_assignments(&gt, &ex, cfg.count_unassigned_in_ei);
    score_lines(&sets, cfg)
}

/// [`evaluate`] with text components taken from a binary page.
pub fn evaluate_page(
    page: &BinaryRaster,
    gt_masks: &LabelRaster,
    extracted_masks: &LabelRaster,
    cfg: &MetricConfig,
) -> Result<EvalReport> {
    same_dims(page.width(), page.height(), gt_masks.width(), gt_masks.height())?;
    let components = connected_components(page, cfg.connectivity);
    evaluate(&components, gt_masks, extracted_masks, cfg)
}
