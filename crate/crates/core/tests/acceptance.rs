//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{angle_diff_mod_pi, dashed_page, ellipse_points, end_to_end, oracle_scores, random_instance, rotate, Q};
use linemask::components::count_components;
use linemask::ellipse::{fit_ellipse, FitMethod};
use linemask::metric::{line_precision, line_recall, ComponentSet, Fraction, LineSets};
use linemask::pipeline::{sample_patches, stitch_predict, CheckerboardDropout, GtReplayPredictor, IdentityPredictor, WindowSpec};
use linemask::postprocess::{postprocess_mask, PostprocessParams};
use linemask::synth::{generate, random_layout, LineKind};
use linemask::{BinaryRaster, Connectivity, LabelRaster};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{}; {:.2} s", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {:.0} s", o.detail, limit.as_secs_f64());
        }
    }
    o
}

fn q(f: Fraction) -> Q {
    Q::new(f.num, f.den)
}

fn metric_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let mut mismatches = 0;
    let mut lines = 0;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng);
        let sets = LineSets::from_assignments(&inst.gt, &inst.ex, false);
        let ours: BTreeMap<u32, (Q, Q)> = sets
            .ground_truth
            .iter()
            .map(|(&id, g)| {
                let es: Vec<&ComponentSet> = sets.intersecting(g).into_iter().map(|(_, e)| e).collect();
                (id, (q(line_recall(g, &es).unwrap()), q(line_precision(g, &es).unwrap())))
            })
            .collect();
        let oracle = oracle_scores(&inst);
        lines += oracle.len();
        if ours != oracle {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 instances, {lines} lines, {mismatches} mismatches"))
}

fn worked_examples() -> Outcome {
    let set = |ids: &[u32]| ids.iter().copied().collect::<ComponentSet>();
    let g = set(&[1, 2, 3, 4]);
    let (e1, e2) = (set(&[1, 2]), set(&[3, 4]));
    let over = (q(line_recall(&g, &[&e1, &e2]).unwrap()), q(line_precision(&g, &[&e1, &e2]).unwrap()));

    let (g1, g2) = (set(&[1, 2, 3]), set(&[4, 5, 6]));
    let merged = set(&[1, 2, 3, 4, 5, 6]);
    let under: Vec<(Q, Q)> = [&g1, &g2]
        .iter()
        .map(|g| (q(line_recall(g, &[&merged]).unwrap()), q(line_precision(g, &[&merged]).unwrap())))
        .collect();

    let over_ok = over == (Q::new(2, 3), Q::from_integer(1));
    let under_ok = under.iter().all(|&s| s == (Q::from_integer(1), Q::new(2, 5)));
    outcome(
        over_ok && under_ok,
        format!(
            "split pairs R={} P={}; merged lines R={} P={}",
            over.0, over.1, under[0].0, under[0].1
        ),
    )
}

fn ellipse_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_param, mut worst_angle, mut worst_prop) = (0.0f64, 0.0f64, 0.0f64);
    let mut non_direct = 0;
    for _ in 0..100 {
        let (cx, cy) = (rng.random_range(-200.0..200.0), rng.random_range(-200.0..200.0));
        let a = rng.random_range(3.0..80.0);
        let b = a * rng.random_range(0.15..0.9);
        let phi = rng.random_range(0.0..PI);
        let n = rng.random_range(8..60);
        let pts = ellipse_points(cx, cy, a, b, phi, n, rng.random_range(0.0..1.0));
        let fit = fit_ellipse(&pts, false).unwrap();
        if fit.method != FitMethod::Direct {
            non_direct += 1;
        }
        for err in [fit.center.0 - cx, fit.center.1 - cy, fit.r_major - a, fit.r_minor - b] {
            worst_param = worst_param.max(err.abs());
        }
        worst_angle = worst_angle.max(angle_diff_mod_pi(fit.angle(), phi).to_degrees());

        let (dx, dy) = (rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
        let moved: Vec<_> = pts.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        let ft = fit_ellipse(&moved, false).unwrap();
        let rot = rng.random_range(0.0..2.0 * PI);
        let fr = fit_ellipse(&rotate(&pts, rot), false).unwrap();
        let s = rng.random_range(0.2..5.0);
        let scaled: Vec<_> = pts.iter().map(|&(x, y)| (s * x, s * y)).collect();
        let fs = fit_ellipse(&scaled, false).unwrap();
        let (rc, rs) = (rot.cos(), rot.sin());
        let rotated_center = (rc * fit.center.0 - rs * fit.center.1, rs * fit.center.0 + rc * fit.center.1);
        for err in [
            ft.center.0 - fit.center.0 - dx,
            ft.center.1 - fit.center.1 - dy,
            ft.r_major - fit.r_major,
            ft.r_minor - fit.r_minor,
            angle_diff_mod_pi(ft.angle(), fit.angle()),
            fr.center.0 - rotated_center.0,
            fr.center.1 - rotated_center.1,
            fr.r_major - fit.r_major,
            fr.r_minor - fit.r_minor,
            angle_diff_mod_pi(fr.angle(), fit.angle() + rot),
            fs.center.0 - s * fit.center.0,
            fs.center.1 - s * fit.center.1,
            fs.r_major - s * fit.r_major,
            fs.r_minor - s * fit.r_minor,
            angle_diff_mod_pi(fs.angle(), fit.angle()),
            fs.alpha - fit.alpha,
        ] {
            worst_prop = worst_prop.max(err.abs());
        }
    }
    outcome(
        non_direct == 0 && worst_param < 1e-6 && worst_angle < 0.01 && worst_prop < 1e-6,
        format!(
            "100 ellipses, max parameter error {worst_param:.1e}, max angle error {worst_angle:.1e} deg, \
             max transform error {worst_prop:.1e}"
        ),
    )
}

fn postprocess_fixture() -> Outcome {
    let params = PostprocessParams { n_subsets: 10, epsilon: 0.2, kernel_length: 9, ..Default::default() };
    let single = dashed_page(&[20]);
    let joined = count_components(&postprocess_mask(&single, &params).unwrap(), Connectivity::Eight);

    let parallel = dashed_page(&[20, 40]);
    let out = postprocess_mask(&parallel, &params).unwrap();
    let pair = count_components(&out, Connectivity::Eight);
    let labels = linemask::pipeline::masks_to_lines(&out);
    // Each resulting blob must hold exactly one of the two lines.
    let separated = labels.get(10, 21) != labels.get(10, 41);

    let identity = postprocess_mask(&parallel, &PostprocessParams { epsilon: 0.0, ..params }).unwrap() == parallel;
    outcome(
        joined == 1 && pair == 2 && separated && identity,
        format!(
            "one line -> {joined} component(s); lines 20 px apart -> {pair}; epsilon 0 identity {identity}"
        ),
    )
}

fn stitch_identity() -> Outcome {
    let spec = WindowSpec::new(320, 100).unwrap();
    let mut failed = Vec::new();
    for (w, h) in [(37u32, 41u32), (320, 320), (700, 450)] {
        let page = BinaryRaster::from_fn(w, h, |x, y| (x * 7 + y * 13 + x * y) % 5 == 0);
        let out = stitch_predict(&page, &IdentityPredictor, &spec).unwrap();
        if out.bits() != page.bits() {
            failed.push(format!("{w}x{h}"));
        }
    }
    outcome(failed.is_empty(), format!("37x41, 320x320, 700x450 with window 320/core 100; failed: {failed:?}"))
}

fn end_to_end_oracle() -> Outcome {
    let spec = WindowSpec::default();
    let params = PostprocessParams::default();
    let mut ok = true;
    let mut kinds = [0usize; 3];
    let mut f_clean = Vec::new();
    let mut f_broken = Vec::new();
    for seed in 0..10u64 {
        let layout = random_layout(800, 640, seed);
        let mut present = [false; 3];
        for l in &layout {
            let k = match l.kind {
                LineKind::Straight => 0,
                LineKind::Skewed { .. } => 1,
                LineKind::Curved { .. } => 2,
            };
            present[k] = true;
            kinds[k] += 1;
        }
        ok &= present.iter().all(|&p| p);
        let page = generate(&layout, (800, 640), seed).unwrap();
        let replay = GtReplayPredictor::new(page.gt_masks.clone());
        let clean = end_to_end(&page, &replay, &spec, &params);
        let broken = end_to_end(&page, &CheckerboardDropout::new(&replay, spec), &spec, &params);
        ok &= clean.aggregate_f == 1.0;
        ok &= broken.aggregate_f < 1.0 && broken.aggregate_recall < clean.aggregate_recall;
        f_clean.push(clean.aggregate_f);
        f_broken.push(broken.aggregate_f);
    }
    let min_clean = f_clean.iter().copied().fold(f64::INFINITY, f64::min);
    let max_broken = f_broken.iter().copied().fold(0.0, f64::max);
    outcome(
        ok,
        format!(
            "10 pages ({} straight, {} skewed, {} curved lines); replay F min {min_clean}; dropout F max {max_broken:.4}",
            kinds[0], kinds[1], kinds[2]
        ),
    )
}

fn patch_sampler() -> Outcome {
    let (w, h) = (3000, 4000);
    let page = generate(&random_layout(w, h, 99), (w, h), 99).unwrap();
    let set = sample_patches(&page.page, &page.gt_masks, 50_000, 320, 1234).unwrap();
    let again = sample_patches(&page.page, &page.gt_masks, 50_000, 320, 1234).unwrap();
    let reproducible = set == again
        && serde_json::to_string(&set).unwrap() == serde_json::to_string(&again).unwrap();
    let in_bounds = set.patches.iter().all(|r| r.x + 320 <= w && r.y + 320 <= h);
    let bad_shapes = set
        .patches
        .par_iter()
        .filter(|r| {
            let (img, lab): (BinaryRaster, LabelRaster) = set.crop(&page.page, &page.gt_masks, r);
            (img.width(), img.height(), lab.width(), lab.height()) != (320, 320, 320, 320)
        })
        .count();
    outcome(
        set.len() == 50_000 && reproducible && in_bounds && bad_shapes == 0,
        format!(
            "{} patches from a {w}x{h} page, {bad_shapes} not 320x320, manifest reproducible {reproducible}",
            set.len()
        ),
    )
}

fn main() {
    let secs = |n| Some(Duration::from_secs(n));
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 7] = [
        ("metric oracle equivalence", secs(10), metric_oracle),
        ("metric worked examples", None, worked_examples),
        ("ellipse fit accuracy", secs(5), ellipse_accuracy),
        ("post-processing fixture", secs(2), postprocess_fixture),
        ("stitching identity", None, stitch_identity),
        ("end-to-end synthetic oracle", None, end_to_end_oracle),
        ("patch sampler", None, patch_sampler),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let o = timed(limit, run);
        if !o.pass {
            failures += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
