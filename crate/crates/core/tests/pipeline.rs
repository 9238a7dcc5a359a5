use asgap::pipeline::verify::{artifact_checks, diff_trees, smoke_config};
use asgap::pipeline::{Outcome, Pipeline, Stage};
use asgap::selector::read_results_csv;
use asgap::Error;

#[test]
fn stages_cache_refuse_stale_and_detect_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = smoke_config(out.clone(), 0);
    let p = Pipeline::new(cfg.clone(), false);

    assert!(matches!(p.run_stage(Stage::Sample), Err(Error::Usage(_))));

    let outcomes = p.run_all().unwrap();
    assert!(outcomes.iter().all(|(_, o)| *o == Outcome::Ran));
    assert!(p.run_all().unwrap().iter().all(|(_, o)| *o == Outcome::Cached));

    // instance split: one row per (group, fold) for the single portfolio
    let rows = read_results_csv(&out.join("results.csv")).unwrap();
    for g in ["ela", "tinytla"] {
        let n = rows.iter().filter(|r| r.protocol == "instance" && r.feature_group == g).count();
        assert_eq!(n, cfg.suite.instances.len());
    }
    assert!(out.join("report/summary.csv").exists());
    assert!(out.join("report/as_performance_2DE+2PSO.svg").exists());
    assert!(out.join("report/spearman_clustermap.svg").exists());

    // a changed config is refused unless forced
    let mut changed = cfg.clone();
    changed.selector.n_trees = 3;
    let stale = Pipeline::new(changed.clone(), false);
    assert!(matches!(stale.run_stage(Stage::TrainEval), Err(Error::Data(_))));
    assert_eq!(Pipeline::new(changed, true).run_stage(Stage::TrainEval).unwrap(), Outcome::Ran);

    // corrupting a feature file is caught by the hash check
    assert!(artifact_checks(&out).iter().all(|c| c.passed));
    let f = out.join("features/ela.csv");
    let mut text = std::fs::read_to_string(&f).unwrap();
    text.push_str("junk\n");
    std::fs::write(&f, text).unwrap();
    let failed: Vec<_> = artifact_checks(&out).into_iter().filter(|c| !c.passed).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0].detail.contains("features/ela.csv"));
}

#[test]
fn worker_count_does_not_change_any_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    Pipeline::new(smoke_config(a.clone(), 1), false).run_all().unwrap();
    Pipeline::new(smoke_config(b.clone(), 4), false).run_all().unwrap();
    assert_eq!(diff_trees(&a, &b), Vec::<std::path::PathBuf>::new());
}
