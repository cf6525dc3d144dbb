mod common;

use common::fixtures::TREES;
use common::{counts, trunc4};
use proptest::prelude::*;
use woodleaf::metrics::{confusion, kappa, mcc, overall_accuracy, throughput_report, ConfusionCounts};
use woodleaf::ClassLabel;

#[test]
fn every_row_matches_published_accuracy() {
    for row in &TREES {
        let c = counts(row);
        assert_eq!(c.total(), row.total, "tree {}", row.tree);
        let oa = overall_accuracy(&c).unwrap();
        let k = kappa(&c).unwrap().value;
        let m = mcc(&c).unwrap().value;
        for (name, got, want) in [("oa", oa, row.oa), ("kappa", k, row.kappa), ("mcc", m, row.mcc)] {
            assert!((got - want).abs() <= 5e-4, "tree {} {name}: {got} vs {want}", row.tree);
        }
    }
}

/// The table drops digits past the fourth decimal. Four values sit up to
/// 3e-6 under the next digit, so the published figures carry a few 1e-6 of
/// arithmetic noise before truncation.
#[test]
fn published_values_are_truncated() {
    for row in &TREES {
        let c = counts(row);
        let scores = [
            (overall_accuracy(&c).unwrap(), row.oa),
            (kappa(&c).unwrap().value, row.kappa),
            (mcc(&c).unwrap().value, row.mcc),
        ];
        for (got, published) in scores {
            assert!(
                got >= published - 5e-6 && got < published + 1e-4,
                "tree {}: {got} vs {published}",
                row.tree
            );
            if got >= published {
                assert_eq!(trunc4(got), published);
            }
        }
    }
}

#[test]
fn tree_22_low_kappa_row() {
    let row = TREES.iter().find(|r| r.tree == 22).unwrap();
    let c = counts(row);
    assert!((kappa(&c).unwrap().value - 0.7276).abs() < 5e-4);
    assert!((mcc(&c).unwrap().value - 0.7544).abs() < 5e-4);
    assert!((overall_accuracy(&c).unwrap() - 0.9295).abs() < 5e-4);
}

#[test]
fn time_per_million_points_matches() {
    for row in &TREES {
        let t = throughput_report(row.time_ms / 1e3, row.total as usize).unwrap();
        assert!(
            (t.ms_per_million - row.ms_per_million).abs() <= 1.0,
            "tree {}: {} vs {}",
            row.tree,
            t.ms_per_million,
            row.ms_per_million
        );
    }
}

#[test]
fn published_means() {
    let n = TREES.len() as f64;
    let mean_oa = TREES.iter().map(|r| r.oa).sum::<f64>() / n;
    let mean_kappa = TREES.iter().map(|r| r.kappa).sum::<f64>() / n;
    let mean_mcc = TREES.iter().map(|r| r.mcc).sum::<f64>() / n;
    assert!((mean_oa - 0.9550).abs() < 1e-4);
    assert!((mean_kappa - 0.8547).abs() < 1e-4);
    assert!((mean_mcc - 0.8627).abs() < 1e-4);
}

fn labels() -> impl Strategy<Value = Vec<(ClassLabel, ClassLabel)>> {
    let label = prop_oneof![Just(ClassLabel::Wood), Just(ClassLabel::Leaf)];
    prop::collection::vec((label.clone(), label), 1..300)
}

fn swap(l: ClassLabel) -> ClassLabel {
    match l {
        ClassLabel::Wood => ClassLabel::Leaf,
        ClassLabel::Leaf => ClassLabel::Wood,
        other => other,
    }
}

proptest! {
    #[test]
    fn label_swap_leaves_scores_unchanged(pairs in labels()) {
        let (pred, truth): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let a = confusion(&pred, &truth).unwrap();
        let pred_s: Vec<_> = pred.iter().map(|&l| swap(l)).collect();
        let truth_s: Vec<_> = truth.iter().map(|&l| swap(l)).collect();
        let b = confusion(&pred_s, &truth_s).unwrap();
        prop_assert_eq!(b, a.swapped());
        prop_assert!((overall_accuracy(&a).unwrap() - overall_accuracy(&b).unwrap()).abs() < 1e-12);
        let (ka, kb) = (kappa(&a).unwrap(), kappa(&b).unwrap());
        prop_assert_eq!(ka.degenerate, kb.degenerate);
        prop_assert!((ka.value - kb.value).abs() < 1e-12);
        let (ma, mb) = (mcc(&a).unwrap(), mcc(&b).unwrap());
        prop_assert_eq!(ma.degenerate, mb.degenerate);
        prop_assert!((ma.value - mb.value).abs() < 1e-12);
    }

    #[test]
    fn scores_bounded(tp in 0u64..1_000_000_000, tn in 0u64..1_000_000_000, fp in 0u64..1_000_000_000, fn_ in 0u64..1_000_000_000) {
        let c = ConfusionCounts::new(tp, tn, fp, fn_);
        prop_assume!(c.total() > 0);
        let oa = overall_accuracy(&c).unwrap();
        prop_assert!((0.0..=1.0).contains(&oa));
        let k = kappa(&c).unwrap().value;
        let m = mcc(&c).unwrap().value;
        prop_assert!(k.is_finite() && k <= 1.0 + 1e-12);
        prop_assert!(m.is_finite() && (-1.0 - 1e-12..=1.0 + 1e-12).contains(&m));
    }
}
