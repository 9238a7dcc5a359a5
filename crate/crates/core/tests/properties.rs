use asgap::featurestore::{FeatureMatrix, Provenance};
use asgap::perf::{dummy_target, normalized_precision, PerformanceMatrix};
use asgap::portfolio::RunRecord;
use asgap::selector::{train_forest, ForestConfig};
use asgap::stats::argmin;
use asgap::suite::lhs_sample;
use proptest::prelude::*;

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn records(ys: &[Vec<f64>]) -> Vec<RunRecord> {
    // ys[run][alg]
    let mut out = Vec::new();
    for (run, row) in ys.iter().enumerate() {
        for (a, &y) in row.iter().enumerate() {
            out.push(RunRecord {
                problem_id: "p".into(),
                algorithm: format!("A{a}"),
                run,
                best_y: y,
                budget: 10,
            });
        }
    }
    out
}

proptest! {
    #[test]
    fn precision_ignores_affine_rescaling_of_one_run(
        ys in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 4), 1..5),
        scale in 0.01f64..100.0,
        shift in -1e3f64..1e3,
    ) {
        let algs = names("A", 4);
        let base = normalized_precision(&records(&ys), &algs).unwrap();
        let mut moved = ys.clone();
        moved[0].iter_mut().for_each(|v| *v = scale * *v + shift);
        let other = normalized_precision(&records(&moved), &algs).unwrap();
        for (a, b) in base.scores[0].iter().zip(&other.scores[0]) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn dummy_ignores_row_order(
        rows in prop::collection::vec(prop::collection::vec(0f64..1.0, 3), 1..30),
        seed in any::<u64>(),
    ) {
        let ids = names("p", rows.len());
        let m = PerformanceMatrix::new(ids.clone(), names("A", 3), rows.clone()).unwrap();
        let mut perm: Vec<usize> = (0..rows.len()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = PerformanceMatrix::new(
            perm.iter().map(|&i| ids[i].clone()).collect(),
            names("A", 3),
            perm.iter().map(|&i| rows[i].clone()).collect(),
        )
        .unwrap();
        prop_assert_eq!(dummy_target(&m).unwrap(), dummy_target(&shuffled).unwrap());
    }

    #[test]
    fn lhs_fills_every_stratum(dim in 1usize..6, n in 1usize..80, seed in any::<u64>()) {
        let x = lhs_sample(dim, n, seed);
        prop_assert_eq!(x.len(), n);
        let width = 10.0 / n as f64;
        for d in 0..dim {
            let mut hit = vec![false; n];
            for row in &x {
                let k = (((row[d] + 5.0) / width).floor() as usize).min(n - 1);
                prop_assert!(!hit[k]);
                hit[k] = true;
            }
        }
    }

    #[test]
    fn argmin_survives_increasing_maps(v in prop::collection::vec(-1e3f64..1e3, 1..20), k in 0.1f64..10.0) {
        let mapped: Vec<f64> = v.iter().map(|x| (x / 1e3).exp() * k + x.powi(3) / 1e9).collect();
        prop_assert_eq!(argmin(&v), argmin(&mapped));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn forest_ignores_row_order(
        rows in prop::collection::vec((prop::collection::vec(-1f64..1.0, 3), prop::collection::vec(0f64..1.0, 2)), 4..25),
        rotate in 0usize..25,
    ) {
        let n = rows.len();
        let ids = names("p", n);
        let fm = FeatureMatrix::new("g", ids.clone(), names("f", 3), rows.iter().map(|r| r.0.clone()).collect(), Provenance::Computed).unwrap();
        let pm = PerformanceMatrix::new(ids.clone(), names("A", 2), rows.iter().map(|r| r.1.clone()).collect()).unwrap();
        let cfg = ForestConfig { n_trees: 5, seed: 3, ..ForestConfig::default() };
        let mut order = ids.clone();
        order.rotate_left(rotate % n);
        order.reverse();
        let a = train_forest(&fm, &pm, &ids, &cfg).unwrap();
        let b = train_forest(&fm, &pm, &order, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}
