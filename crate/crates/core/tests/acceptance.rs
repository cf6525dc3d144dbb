//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::fixtures::TREES;
use common::{best_cut_interval, brute_knn, counts, shuffled};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use woodleaf::intensity::{fit_intensity_threshold, quarter_thresholds};
use woodleaf::io::write_labels;
use woodleaf::metrics::{confusion, kappa, mcc, overall_accuracy, AccuracyReport};
use woodleaf::refine::{expected_voxel_count, knn_refine, mean_neighbor_distance, SpacingModel};
use woodleaf::spatial::{NeighborIndex, VoxelGrid, VoxelIndex};
use woodleaf::synth::{default_acceptance_tree, generate_tree, SyntheticTreeSpec};
use woodleaf::verify::{tree_height_split, verify_wood, VerifyConfig};
use woodleaf::{classify, ClassLabel, LabeledCloud, PipelineParams, Point, ScanConfig, StageTrace};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Tree {
    spec: SyntheticTreeSpec,
    cloud: LabeledCloud,
}

impl Tree {
    fn scan(&self) -> ScanConfig {
        ScanConfig::new([0.0; 3], self.spec.angular_step).unwrap()
    }

    fn classify(&self, params: &PipelineParams) -> Result<(Vec<ClassLabel>, StageTrace), String> {
        classify(&self.cloud, &self.scan(), params).map_err(|e| e.to_string())
    }
}

fn metrics_golden() -> Outcome {
    let mut worst: f64 = 0.0;
    for row in &TREES {
        let c = counts(row);
        let got = [
            overall_accuracy(&c).map_err(|e| e.to_string())?,
            kappa(&c).map_err(|e| e.to_string())?.value,
            mcc(&c).map_err(|e| e.to_string())?.value,
        ];
        for (g, want) in got.iter().zip([row.oa, row.kappa, row.mcc]) {
            let err = (g - want).abs();
            worst = worst.max(err);
            ensure!(err <= 5e-4, "tree {}: {g:.6} vs published {want}", row.tree);
        }
    }
    Ok(format!("24 trees x 3 scores within 5e-4 (max deviation {worst:.2e})"))
}

fn equation_oracles() -> Outcome {
    let s = 0.01;
    let model = SpacingModel::new(0.001).map_err(|e| e.to_string())?;

    // planar 3x3 grid at 10 m: spacing exactly 0.01
    let grid: Vec<Point> = (-1..=1)
        .flat_map(|i| (-1..=1).map(move |j| Point::new(10.0, i as f64 * s, j as f64 * s, 0.0)))
        .collect();
    let cloud = LabeledCloud::new(grid).unwrap();
    let index = NeighborIndex::build(&cloud, &(0..9).collect::<Vec<_>>()).unwrap();
    let da = mean_neighbor_distance(&index, 4, 8).map_err(|e| e.to_string())?;
    let planar = (1.0 + 2f64.sqrt()) / 2.0 * s;
    ensure!(((da - planar) / planar).abs() < 1e-9, "planar d_a {da} vs {planar}");

    // 45° inclined plane: one grid direction stretched by √2
    let tilted: Vec<Point> = (-2..=2)
        .flat_map(|i| {
            (-2..=2).map(move |j| {
                let v = j as f64 * s * 2f64.sqrt();
                let t = std::f64::consts::FRAC_PI_4;
                Point::new(10.0 + v * t.sin(), i as f64 * s, v * t.cos(), 0.0)
            })
        })
        .collect();
    let cloud = LabeledCloud::new(tilted).unwrap();
    let index = NeighborIndex::build(&cloud, &(0..25).collect::<Vec<_>>()).unwrap();
    let da_tilt = mean_neighbor_distance(&index, 12, 8).map_err(|e| e.to_string())?;
    let s_s = model.spacing_at(&cloud.points()[12]).map_err(|e| e.to_string())?;
    ensure!(da_tilt <= 1.71 * s_s, "inclined d_a {da_tilt} exceeds 1.71 S_s");

    let q = quarter_thresholds(&[0.0, 1.0, 4.0, 8.0]);
    ensure!(q == Some((2.0, 6.0)), "quartering of [0, 8] gave {q:?}");

    let num_s = expected_voxel_count([0.1; 3], 10.0, 0.001).map_err(|e| e.to_string())?;
    let want = 100.0 * 2f64.sqrt();
    ensure!(((num_s - want) / want).abs() < 1e-6, "Num_s {num_s} vs {want}");

    Ok(format!(
        "planar d_a/S_s = {:.10}, inclined d_a/S_s = {:.4}, quartering (2, 6), Num_s = {num_s:.4}",
        da / s,
        da_tilt / s_s
    ))
}

fn synthetic_accuracy(tree: &Tree) -> Outcome {
    let t = Instant::now();
    let (labels, _) = tree.classify(&PipelineParams::default())?;
    let elapsed = t.elapsed();
    let c = confusion(&labels, tree.cloud.labels()).map_err(|e| e.to_string())?;
    let r = AccuracyReport::from_counts(c).map_err(|e| e.to_string())?;
    let summary = format!(
        "{} points, OA {:.4}, Kappa {:.4}, MCC {:.4}, {:.2} s",
        tree.cloud.len(),
        r.oa,
        r.kappa.value,
        r.mcc.value,
        elapsed.as_secs_f64()
    );
    ensure!(r.oa >= 0.90 && r.kappa.value >= 0.70 && r.mcc.value >= 0.70, "below floor: {summary}");
    ensure!(elapsed < Duration::from_secs(60), "too slow: {summary}");
    Ok(summary)
}

fn median_time(mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..3)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[1]
}

fn throughput(tree: &Tree) -> Outcome {
    let spec = SyntheticTreeSpec {
        angular_step: tree.spec.angular_step / 5f64.sqrt(),
        ..tree.spec
    };
    let big = Tree {
        spec,
        cloud: generate_tree(&spec).map_err(|e| e.to_string())?,
    };
    ensure!(big.cloud.len() >= 1_000_000, "only {} points generated", big.cloud.len());
    let t = Instant::now();
    big.classify(&PipelineParams::default())?;
    let elapsed = t.elapsed();
    ensure!(elapsed <= Duration::from_secs(30), "{} points took {elapsed:?}", big.cloud.len());

    let model = SpacingModel::new(tree.spec.angular_step).unwrap();
    let full: Vec<usize> = (0..tree.cloud.len()).collect();
    let half: Vec<usize> = full.iter().copied().step_by(2).collect();
    let time_full = median_time(|| {
        knn_refine(&tree.cloud, &full, &model, 8, 1.71).unwrap();
    });
    let time_half = median_time(|| {
        knn_refine(&tree.cloud, &half, &model, 8, 1.71).unwrap();
    });
    let ratio = time_full.as_secs_f64() / time_half.as_secs_f64();
    ensure!(ratio < 3.0, "k-NN {}k/{}k time ratio {ratio:.2}", full.len() / 1000, half.len() / 1000);
    Ok(format!(
        "{} points in {:.2} s ({:.0} ms per million); k-NN {}k vs {}k ratio {ratio:.2}",
        big.cloud.len(),
        elapsed.as_secs_f64(),
        elapsed.as_secs_f64() * 1e3 / (big.cloud.len() as f64 / 1e6),
        full.len() / 1000,
        half.len() / 1000
    ))
}

fn determinism(tree: &Tree) -> Outcome {
    let params = PipelineParams {
        rng_seed: 1234,
        ..PipelineParams::default()
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for run in 0..2 {
        let (labels, _) = tree.classify(&params)?;
        let path = dir.path().join(format!("run{run}.labels"));
        write_labels(&labels, &path).map_err(|e| e.to_string())?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(files[0] == files[1], "label files differ between identical runs");

    let (reference, _) = tree.classify(&params)?;
    let (perm_cloud, perm) = shuffled(&tree.cloud, 99);
    let permuted = Tree {
        spec: tree.spec,
        cloud: perm_cloud,
    };
    let (labels, _) = permuted.classify(&params)?;
    let changed = perm.iter().enumerate().filter(|&(new, &old)| labels[new] != reference[old]).count();
    ensure!(changed == 0, "{changed} points changed label after shuffling the input");
    Ok(format!(
        "two runs byte-identical ({} bytes); shuffled input gives identical labels",
        files[0].len()
    ))
}

fn partitions(a: &[usize], b: &[usize], of: &[usize]) -> bool {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    all == of
}

fn structural(tree: &Tree) -> Outcome {
    let (wood_c, final_wood, leaf_d, final_leaf) = (242_513u64, 393_211u64, 822_033u64, 671_335u64);
    ensure!(leaf_d - final_leaf == final_wood - wood_c, "published process table is inconsistent");
    let published = final_wood - wood_c;

    let params = PipelineParams::default();
    let (_, t) = tree.classify(&params)?;
    let all: Vec<usize> = (0..tree.cloud.len()).collect();
    ensure!(partitions(&t.wood_a, &t.leaf_a, &all), "stage A is not a partition");
    ensure!(partitions(&t.wood_b, &t.leaf_b, &t.wood_a), "stage B does not partition wood A");
    ensure!(partitions(&t.wood_c, &t.leaf_c, &t.wood_b), "stage C does not partition wood B");
    ensure!(partitions(&t.wood_c, &t.leaf_d, &all), "wood C and leaf D are not a partition");
    ensure!(partitions(&t.final_wood, &t.final_leaf, &all), "final sets are not a partition");
    ensure!(
        t.leaf_a.len() + t.leaf_b.len() + t.leaf_c.len() == t.leaf_d.len(),
        "leaf D is not the disjoint union of leaf A, B, C"
    );
    ensure!(
        t.wood_c.iter().all(|i| t.final_wood.binary_search(i).is_ok()),
        "verification demoted a wood point"
    );
    ensure!(t.wood_gain() == t.leaf_loss(), "promotions disagree: {} vs {}", t.wood_gain(), t.leaf_loss());

    let grid = VoxelGrid::build(&tree.cloud, &t.wood_b, params.voxel_divisions).unwrap();
    let config = VerifyConfig {
        spacing: SpacingModel::new(tree.spec.angular_step).unwrap(),
        intensity_threshold: t.threshold.value,
        sd1: params.sd1,
        sd2: params.sd2,
        z_split: tree_height_split(&tree.cloud, params.height_fraction).unwrap(),
    };
    let (w, _, _) = verify_wood(&tree.cloud, &t.final_wood, &t.final_leaf, &grid, config).map_err(|e| e.to_string())?;
    ensure!(w == t.final_wood, "verification is not idempotent");
    Ok(format!(
        "partitions hold, |leaf D| = {} = {} + {} + {}, promotions {} both ways, idempotent; published identity {published}",
        t.leaf_d.len(),
        t.leaf_a.len(),
        t.leaf_b.len(),
        t.leaf_c.len(),
        t.wood_gain()
    ))
}

fn brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let points: Vec<Point> = (0..1000)
        .map(|_| {
            let q = |r: &mut ChaCha8Rng| (r.random_range(0..40) as f64) * 0.025;
            Point::new(q(&mut rng), q(&mut rng), q(&mut rng), 0.0)
        })
        .collect();
    let cloud = LabeledCloud::new(points.clone()).unwrap();
    let all: Vec<usize> = (0..points.len()).collect();
    let index = NeighborIndex::build(&cloud, &all).unwrap();
    for q in 0..points.len() {
        let got: Vec<usize> = index.k_nearest(q, 8).unwrap().iter().map(|n| n.index).collect();
        let want: Vec<usize> = brute_knn(&points, &all, q, 8).iter().map(|p| p.0).collect();
        ensure!(got == want, "k-NN mismatch at query {q}");
    }

    let grid = VoxelGrid::build(&cloud, &all, 17).unwrap();
    let (min, _) = grid.bounds();
    let size = grid.sizes();
    for (v, members) in grid.buckets().iter() {
        for &m in members {
            let p = points[m as usize].position();
            let f = |a: usize| (((p[a] - min[a]) / size[a]).floor() as i64).clamp(0, 16) as u32;
            ensure!(v == VoxelIndex::new(f(0), f(1), f(2)), "point {m} bucketed in {v:?}");
        }
    }
    ensure!(grid.buckets().total_points() == points.len(), "voxel bucketing lost points");

    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wood: Vec<f64> = (0..2000).map(|_| Normal::new(75.0, 6.0).unwrap().sample(&mut rng)).collect();
        let leaf: Vec<f64> = (0..4000).map(|_| Normal::new(40.0, 6.0).unwrap().sample(&mut rng)).collect();
        let t = fit_intensity_threshold(&wood, &leaf).map_err(|e| e.to_string())?.value;
        let (lo, hi) = best_cut_interval(&wood, &leaf);
        let off = if t < lo { lo - t } else if t > hi { t - hi } else { 0.0 };
        worst = worst.max(off);
        ensure!(off <= 5.0, "seed {seed}: threshold {t:.2} vs best cuts [{lo:.2}, {hi:.2}]");
    }
    Ok(format!(
        "k-NN matches scan on 1000 points, voxel indices match floor division, threshold within {worst:.2} of best cut"
    ))
}

fn main() -> ExitCode {
    let spec = default_acceptance_tree();
    let tree = Tree {
        spec,
        cloud: generate_tree(&spec).expect("default tree"),
    };
    let criteria: [Criterion; 7] = [
        ("1 metrics golden values", Box::new(metrics_golden)),
        ("2 equation-level oracles", Box::new(equation_oracles)),
        ("3 synthetic end-to-end accuracy", Box::new(|| synthetic_accuracy(&tree))),
        ("4 throughput and k-NN scaling", Box::new(|| throughput(&tree))),
        ("5 determinism", Box::new(|| determinism(&tree))),
        ("6 structural invariants", Box::new(|| structural(&tree))),
        ("7 brute-force oracles", Box::new(brute_force)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
