mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{oracle_scores, random_instance, Instance, Q};
use linemask::metric::{line_precision, line_recall, score_lines, ComponentSet, LineSets, MetricConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_q(f: linemask::metric::Fraction) -> Q {
    Q::new(f.num, f.den)
}

fn sets_of(inst: &Instance) -> LineSets {
    LineSets::from_assignments(&inst.gt, &inst.ex, false)
}

fn line_scores(sets: &LineSets) -> BTreeMap<u32, (Q, Q)> {
    sets.ground_truth
        .iter()
        .map(|(&id, g)| {
            let es: Vec<&ComponentSet> = sets.intersecting(g).into_iter().map(|(_, e)| e).collect();
            (id, (to_q(line_recall(g, &es).unwrap()), to_q(line_precision(g, &es).unwrap())))
        })
        .collect()
}

#[test]
fn matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..2000 {
        let inst = random_instance(&mut rng);
        let sets = sets_of(&inst);
        assert_eq!(line_scores(&sets), oracle_scores(&inst), "{inst:?}");
    }
}

#[test]
fn report_fractions_match_line_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        let sets = sets_of(&inst);
        if sets.ground_truth.is_empty() {
            continue;
        }
        let report = score_lines(&sets, &MetricConfig::default()).unwrap();
        let direct = line_scores(&sets);
        for l in &report.per_line {
            assert_eq!((to_q(l.recall_fraction), to_q(l.precision_fraction)), direct[&l.line_id]);
        }
    }
}

fn set(ids: impl IntoIterator<Item = u32>) -> ComponentSet {
    ids.into_iter().collect()
}

/// A ground-truth line plus a random partition of it (and of some outside
/// components) into extracted lines.
fn arb_line_and_partition() -> impl Strategy<Value = (ComponentSet, Vec<ComponentSet>)> {
    (2usize..10, 0usize..5, 1usize..5).prop_flat_map(|(g, outside, parts)| {
        let total = g + outside;
        prop::collection::vec(0..parts, total).prop_map(move |labels| {
            let gt = set(1..=g as u32);
            let mut es = vec![ComponentSet::new(); parts];
            for (i, &l) in labels.iter().enumerate() {
                es[l].insert(i as u32 + 1);
            }
            es.retain(|e| !e.is_empty());
            (gt, es)
        })
    })
}

proptest! {
    #[test]
    fn scores_lie_in_unit_interval((g, es) in arb_line_and_partition()) {
        let refs: Vec<_> = es.iter().collect();
        let r = line_recall(&g, &refs).unwrap().value();
        let p = line_precision(&g, &refs).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&p));
    }

    #[test]
    fn perfect_extraction_scores_one(n in 1u32..12) {
        let g = set(1..=n);
        prop_assert_eq!(line_recall(&g, &[&g]).unwrap().value(), 1.0);
        prop_assert_eq!(line_precision(&g, &[&g]).unwrap().value(), 1.0);
    }

    #[test]
    fn splitting_lowers_recall((g, es) in arb_line_and_partition(), pick in any::<prop::sample::Index>(), cut in any::<prop::sample::Index>()) {
        let candidates: Vec<usize> = (0..es.len()).filter(|&i| es[i].intersection(&g).count() >= 2).collect();
        prop_assume!(!candidates.is_empty());
        let i = candidates[pick.index(candidates.len())];
        let inside: Vec<u32> = es[i].intersection(&g).copied().collect();
        // Split so that both halves keep at least one component of g.
        let k = 1 + cut.index(inside.len() - 1);
        let first: ComponentSet = inside[..k].iter().copied().collect();
        let second: ComponentSet = es[i].difference(&first).copied().collect();
        let mut split = es.clone();
        split[i] = first;
        split.push(second);
        let before = line_recall(&g, &es.iter().collect::<Vec<_>>()).unwrap().value();
        let after = line_recall(&g, &split.iter().collect::<Vec<_>>()).unwrap().value();
        prop_assert!(after < before);
    }

    #[test]
    fn merging_foreign_components_lowers_precision((g, es) in arb_line_and_partition(), pick in any::<prop::sample::Index>(), extra in 1usize..4) {
        let refs: Vec<_> = es.iter().collect();
        let before = line_precision(&g, &refs).unwrap().value();
        prop_assume!(before > 0.0);
        let hits: Vec<usize> = (0..es.len()).filter(|&i| !es[i].is_disjoint(&g)).collect();
        let i = hits[pick.index(hits.len())];
        let mut merged = es.clone();
        for k in 0..extra {
            merged[i].insert(1000 + k as u32);
        }
        let after = line_precision(&g, &merged.iter().collect::<Vec<_>>()).unwrap().value();
        prop_assert!(after < before);
    }

    #[test]
    fn relabeling_lines_changes_nothing(seed in any::<u64>(), shift_gt in 1u32..50, shift_ex in 1u32..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng);
        // Reversing the order of labels plus an offset is a bijection.
        let relabel = |m: &BTreeMap<u32, Option<u32>>, shift: u32| -> BTreeMap<u32, Option<u32>> {
            m.iter().map(|(&c, &l)| (c, l.map(|l| 1000 - l + shift))).collect()
        };
        let moved = Instance { gt: relabel(&inst.gt, shift_gt), ex: relabel(&inst.ex, shift_ex) };
        let a = sets_of(&inst);
        let b = sets_of(&moved);
        prop_assume!(!a.ground_truth.is_empty());
        let ra = score_lines(&a, &MetricConfig::default()).unwrap();
        let rb = score_lines(&b, &MetricConfig::default()).unwrap();
        // The macro mean sums lines in label order, so only rounding may differ.
        prop_assert!((ra.aggregate_f - rb.aggregate_f).abs() < 1e-12);
        prop_assert_eq!(ra.micro_average, rb.micro_average);
        let fa: BTreeSet<_> = ra.per_line.iter().map(|l| (to_q(l.recall_fraction), to_q(l.precision_fraction), l.gt_size)).collect();
        let fb: BTreeSet<_> = rb.per_line.iter().map(|l| (to_q(l.recall_fraction), to_q(l.precision_fraction), l.gt_size)).collect();
        prop_assert_eq!(fa, fb);
    }
}

#[test]
fn split_in_half_closed_form() {
    // Every line of m components split into halves: R = (m − 2)/(m − 1), P = 1.
    for m in [4u32, 6, 8, 10] {
        let mut gt = BTreeMap::new();
        let mut ex = BTreeMap::new();
        for line in 0..3u32 {
            for k in 0..m {
                let id = line * 100 + k + 1;
                gt.insert(id, Some(line + 1));
                ex.insert(id, Some(2 * line + 1 + u32::from(k >= m / 2)));
            }
        }
        let inst = Instance { gt, ex };
        let report = score_lines(&sets_of(&inst), &MetricConfig::default()).unwrap();
        let expect = Q::new(m as u64 - 2, m as u64 - 1);
        for l in &report.per_line {
            assert_eq!(to_q(l.recall_fraction), expect);
            assert_eq!(to_q(l.precision_fraction), Q::from_integer(1));
        }
        assert_eq!(oracle_scores(&inst).values().next().unwrap().0, expect);
        assert!((report.macro_average.recall - (m as f64 - 2.0) / (m as f64 - 1.0)).abs() < 1e-15);
    }
}
