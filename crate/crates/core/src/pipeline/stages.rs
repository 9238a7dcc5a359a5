use std::path::Path;

use super::config::hash_json;
use super::{ensure_dir, write_text, Pipeline, Stage};
use crate::analysis;
use crate::error::{Error, Result};
use crate::featurestore::{concat_groups, file_sha256, import_features, FeatureMatrix, FeatureRegistry, Provenance};
use crate::par;
use crate::perf::{normalized_precision, PerformanceMatrix};
use crate::portfolio::{
    de_configs, pso_configs, run_portfolio, sort_records, write_runs_csv,
    Algorithm, Portfolio, PortfolioName,
};
use crate::selector::{evaluate_plan_with, write_importance_csv, write_results_csv, ResultRow};
use crate::splits::{build_plan, SplitPlan};
use crate::suite::{evaluate_sample, generate_suite, lhs_sample, Sample, SuiteManifest};

pub const SUITE: &str = "suite.json";
pub const RUNS: &str = "runs.csv";
pub const RESULTS: &str = "results.csv";

pub fn sample_rel(id: &str) -> String {
    format!("samples/{id}.csv")
}

pub fn perf_rel(p: PortfolioName) -> String {
    format!("performance/{}.csv", p.as_str())
}

pub fn features_rel(group: &str) -> String {
    format!("features/{group}.csv")
}

pub fn split_rel(protocol: crate::splits::Protocol) -> String {
    format!("splits/{}.json", protocol.as_str())
}

pub fn load_suite(out: &Path) -> Result<SuiteManifest> {
    let path = out.join(SUITE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Remove a stage-owned directory so stale files from an earlier config do
/// not linger next to fresh ones.
fn fresh_dir(out: &Path, rel: &str) -> Result<()> {
    let dir = out.join(rel);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    ensure_dir(&dir)
}

pub(super) fn run(p: &Pipeline, stage: Stage) -> Result<Vec<String>> {
    match stage {
        Stage::Generate => generate(p),
        Stage::Sample => sample(p),
        Stage::Run => run_portfolios(p),
        Stage::Features => features(p),
        Stage::Splits => splits(p),
        Stage::TrainEval => train_eval(p),
        Stage::Analyze => analyze(p),
        Stage::Report => super::report::render(p.out(), &p.config),
    }
}

fn generate(p: &Pipeline) -> Result<Vec<String>> {
    let manifest = generate_suite(&p.config.suite.suite_config())?;
    write_text(&p.out().join(SUITE), &serde_json::to_string_pretty(&manifest)?)?;
    log::info!("generate: {} problems", manifest.len());
    Ok(vec![SUITE.into()])
}

fn sample(p: &Pipeline) -> Result<Vec<String>> {
    let out = p.out();
    let suite = load_suite(out)?;
    fresh_dir(out, "samples")?;
    let seed = p.config.suite.sample_seed;
    let design = lhs_sample(suite.config.dim, p.config.suite.points(), seed);
    let files = par::try_map(&suite.problems, |entry| -> Result<Vec<String>> {
        let inst = entry.instantiate()?;
        let s = evaluate_sample(&inst, &design, seed)?;
        let rel = sample_rel(&entry.id);
        s.write_csv(&out.join(&rel))?;
        Ok(vec![format!("{rel}.json"), rel])
    })?;
    Ok(files.into_iter().flatten().collect())
}

/// Every algorithm used by any configured portfolio, in canonical order.
pub fn union_portfolio(names: &[PortfolioName]) -> Portfolio {
    let wanted: Vec<String> = names
        .iter()
        .flat_map(|n| Portfolio::new(*n).algorithm_names())
        .collect();
    let members: Vec<Algorithm> = de_configs()
        .into_iter()
        .map(Algorithm::De)
        .chain(pso_configs().into_iter().map(Algorithm::Pso))
        .filter(|a| wanted.iter().any(|w| w == a.name()))
        .collect();
    Portfolio {
        name: names[0],
        members,
    }
}

fn run_portfolios(p: &Pipeline) -> Result<Vec<String>> {
    let out = p.out();
    let suite = load_suite(out)?;
    let union = union_portfolio(&p.config.portfolio.names);
    let settings = p.config.portfolio.settings();
    let mut records: Vec<_> = par::try_map(&suite.problems, |entry| {
        let inst = entry.instantiate()?;
        run_portfolio(&inst, &union, &settings)
    })?
    .into_iter()
    .flatten()
    .collect();
    sort_records(&mut records);
    write_runs_csv(&out.join(RUNS), &records)?;
    fresh_dir(out, "performance")?;
    let mut files = vec![RUNS.to_string()];
    for &name in &p.config.portfolio.names {
        let algs = Portfolio::new(name).algorithm_names();
        let subset: Vec<_> = records
            .iter()
            .filter(|r| algs.contains(&r.algorithm))
            .cloned()
            .collect();
        let perf = normalized_precision(&subset, &algs)?;
        let rel = perf_rel(name);
        perf.write_csv(&out.join(&rel))?;
        files.push(rel);
    }
    Ok(files)
}

fn features(p: &Pipeline) -> Result<Vec<String>> {
    let out = p.out();
    let suite = load_suite(out)?;
    let ids = suite.ids();
    let groups = &p.config.features.groups;
    let tla = p.config.features.tinytla.tla_config();
    let per_problem = par::try_map(&suite.problems, |entry| -> Result<Vec<Vec<f64>>> {
        let s = Sample::read_csv(&out.join(sample_rel(&entry.id)))?;
        groups
            .iter()
            .map(|g| match g.as_str() {
                "ela" => Ok(crate::ela::ela_all(&s, false).values),
                "ela_scaled" => Ok(crate::ela::ela_all(&s, true).values),
                "tinytla" => crate::tla::tla_features(&s, &tla),
                other => Err(Error::Config(format!("unknown feature group {other}"))),
            })
            .collect()
    })?;
    fresh_dir(out, "features")?;
    let mut registry = FeatureRegistry::new();
    for (k, g) in groups.iter().enumerate() {
        let names = if g == "tinytla" {
            tla.feature_names()
        } else {
            crate::ela::feature_names()
        };
        let values = per_problem.iter().map(|row| row[k].clone()).collect();
        let m = FeatureMatrix::new(g.clone(), ids.clone(), names, values, Provenance::Computed)?;
        registry.register(m, None)?;
    }
    for imp in &p.config.features.imports {
        let m = import_features(&imp.path, &imp.name, &ids)?;
        registry.register(m, Some(file_sha256(&imp.path)?))?;
    }
    let mut files = Vec::new();
    for name in registry.names() {
        let rel = features_rel(&name);
        registry.get(&name).expect("registered").write_csv(&out.join(&rel))?;
        files.push(rel);
    }
    let manifest = serde_json::json!({
        "suite_config_hash": suite.config_hash,
        "features_config_hash": hash_json(&p.config.features),
        "groups": registry.manifest(),
    });
    let rel = "features/manifest.json".to_string();
    write_text(&out.join(&rel), &serde_json::to_string_pretty(&manifest)?)?;
    files.push(rel);
    Ok(files)
}

fn splits(p: &Pipeline) -> Result<Vec<String>> {
    let out = p.out();
    let suite = load_suite(out)?;
    fresh_dir(out, "splits")?;
    let s = &p.config.splits;
    let mut files = Vec::new();
    for &protocol in &s.protocols {
        let plan = build_plan(&suite, protocol, s.seed, s.random_k, s.problem_pairs)?;
        plan.validate(&suite)?;
        let rel = split_rel(protocol);
        plan.write_json(&out.join(&rel))?;
        log::info!("splits: {protocol} has {} folds", plan.folds.len());
        files.push(rel);
    }
    Ok(files)
}

pub fn load_group(out: &Path, name: &str) -> Result<FeatureMatrix> {
    FeatureMatrix::read_csv(&out.join(features_rel(name)), name, Provenance::Computed)
}

/// Configured groups plus concatenations, as selector inputs.
pub fn selector_inputs(out: &Path, cfg: &super::ExperimentConfig) -> Result<Vec<FeatureMatrix>> {
    let base: Vec<FeatureMatrix> = cfg
        .features
        .group_names()
        .iter()
        .map(|g| load_group(out, g))
        .collect::<Result<_>>()?;
    let mut all = base.clone();
    for combo in &cfg.features.combinations {
        let parts: Vec<&FeatureMatrix> = combo
            .iter()
            .map(|g| base.iter().find(|m| &m.group_name == g).expect("validated"))
            .collect();
        all.push(concat_groups(&parts)?);
    }
    Ok(all)
}

fn train_eval(p: &Pipeline) -> Result<Vec<String>> {
    let out = p.out();
    let cfg = &p.config;
    let inputs = selector_inputs(out, cfg)?;
    let plans: Vec<SplitPlan> = cfg
        .splits
        .protocols
        .iter()
        .map(|&pr| SplitPlan::read_json(&out.join(split_rel(pr))))
        .collect::<Result<_>>()?;
    fresh_dir(out, "importance")?;
    if cfg.dump_trees {
        fresh_dir(out, "trees")?;
    }
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for &name in &cfg.portfolio.names {
        let perf = PerformanceMatrix::read_csv(&out.join(perf_rel(name)))?;
        for group in &inputs {
            for plan in &plans {
                log::info!("train-eval: {name} / {} / {}", group.group_name, plan.protocol);
                let results = evaluate_plan_with(group, &perf, plan, &cfg.selector, cfg.dump_trees)?;
                for r in results {
                    let stem = format!("{}/{}/{}/{}", name.as_str(), group.group_name, plan.protocol, r.fold);
                    let rel = format!("importance/{stem}.csv");
                    ensure_dir(out.join(&rel).parent().expect("nested"))?;
                    write_importance_csv(&out.join(&rel), &r.importance)?;
                    files.push(rel);
                    if let Some(model) = &r.model {
                        let rel = format!("trees/{stem}.json");
                        write_text(&out.join(&rel), &model.to_json()?)?;
                        files.push(rel);
                    }
                    rows.push(ResultRow {
                        portfolio: name.as_str().to_string(),
                        feature_group: group.group_name.clone(),
                        protocol: plan.protocol.as_str().to_string(),
                        fold: r.fold,
                        model_as: r.model_as,
                        dummy_as: r.dummy_as,
                    });
                }
            }
        }
    }
    write_results_csv(&out.join(RESULTS), &rows)?;
    files.push(RESULTS.into());
    Ok(files)
}

/// Split a TinyTLA matrix into its homology blocks (`h0_`, `h1_`, ...).
pub fn tla_blocks(group: &FeatureMatrix) -> Vec<(String, Vec<usize>)> {
    let mut blocks: Vec<(String, Vec<usize>)> = Vec::new();
    for (k, n) in group.names.iter().enumerate() {
        let prefix = n.split('_').next().unwrap_or("").to_string();
        match blocks.iter_mut().find(|(b, _)| *b == prefix) {
            Some((_, cols)) => cols.push(k),
            None => blocks.push((prefix, vec![k])),
        }
    }
    blocks
}

fn analyze(p: &Pipeline) -> Result<Vec<String>> {
    let out = p.out();
    let cfg = &p.config;
    let a = &cfg.analysis;
    fresh_dir(out, "analysis")?;
    let dir = out.join("analysis");
    let groups: Vec<FeatureMatrix> = cfg
        .features
        .group_names()
        .iter()
        .map(|g| load_group(out, g))
        .collect::<Result<_>>()?;
    let mut files = Vec::new();

    // TinyTLA enters the clustermap PCA-reduced per homology block
    let mut clustermap_groups = Vec::new();
    for g in &groups {
        if g.group_name != "tinytla" {
            clustermap_groups.push(g.clone());
            continue;
        }
        let mut names = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for (block, idx) in tla_blocks(g) {
            let rows: Vec<Vec<f64>> = g.values.iter().map(|r| idx.iter().map(|&k| r[k]).collect()).collect();
            let pca = analysis::pca_reduce(&rows, a.pca_dims);
            let pca = match pca {
                Ok(pca) => pca,
                Err(e) => {
                    log::warn!("analyze: PCA of tinytla {block} failed: {e}");
                    continue;
                }
            };
            if let Some(note) = &pca.note {
                log::info!("analyze: tinytla {block}: {note}");
            }
            if a.pca {
                let rel = format!("analysis/pca_tinytla_{block}.csv");
                let mut w = csv::Writer::from_path(out.join(&rel))?;
                w.write_record(["component", "explained", "cumulative"])?;
                for (c, (e, cum)) in pca.explained.iter().zip(&pca.cumulative).enumerate() {
                    w.write_record([(c + 1).to_string(), fmt(*e), fmt(*cum)])?;
                }
                w.flush().map_err(|e| Error::io(out.join(&rel), e))?;
                files.push(rel);
            }
            for c in 0..pca.explained.len() {
                names.push(format!("{block}_pc{:02}", c + 1));
                cols.push(pca.projection.iter().map(|r| r[c]).collect());
            }
        }
        if !names.is_empty() {
            let values = (0..g.problems.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
            clustermap_groups.push(FeatureMatrix::new("tinytla_pca", g.problems.clone(), names, values, Provenance::Computed)?);
        }
    }

    if a.spearman && !clustermap_groups.is_empty() {
        let refs: Vec<&FeatureMatrix> = clustermap_groups.iter().collect();
        let m = analysis::spearman_matrix(&refs)?;
        analysis::write_correlation(&dir, "spearman", &m)?;
        files.push("analysis/spearman.csv".into());
        files.push("analysis/spearman_order.json".into());
    }
    if a.cosine {
        let refs: Vec<&FeatureMatrix> = groups.iter().collect();
        let recs = analysis::cosine_consistency(&refs, a.cosine_pairs, a.seed)?;
        let names: Vec<String> = groups.iter().map(|g| g.group_name.clone()).collect();
        analysis::write_pairs(&dir.join("cosine_pairs.csv"), &names, &recs)?;
        files.push("analysis/cosine_pairs.csv".into());
    }
    for &name in &cfg.portfolio.names {
        let perf = PerformanceMatrix::read_csv(&out.join(perf_rel(name)))?;
        for g in &groups {
            let tag = format!("{}_{}", g.group_name, name.as_str());
            if a.alignment {
                let al = analysis::alignment(g, &perf, a.alignment_problems, a.seed)?;
                let stem = format!("alignment_{tag}");
                analysis::write_alignment(&dir, &stem, &al)?;
                files.push(format!("analysis/{stem}.csv"));
                files.push(format!("analysis/{stem}_bins.csv"));
            }
            if a.perf_correlation {
                let per_alg = perf
                    .algorithms
                    .iter()
                    .enumerate()
                    .map(|(k, alg)| Ok((alg.clone(), analysis::per_feature_perf_corr(g, &perf, k)?)))
                    .collect::<Result<Vec<_>>>()?;
                let rel = format!("analysis/perf_corr_{tag}.csv");
                analysis::write_distribution(&out.join(&rel), &per_alg)?;
                files.push(rel);
            }
        }
    }
    Ok(files)
}

fn fmt(v: f64) -> String {
    crate::suite::sample::fmt_f64(v)
}
