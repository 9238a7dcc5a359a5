//! Summary tables and figures from the train-eval and analyze outputs.

use std::path::Path;

use super::config::ExperimentConfig;
use super::stages::RESULTS;
use super::{ensure_dir, svg, write_text};
use crate::error::{Error, Result};
use crate::selector::{read_results_csv, ResultRow};
use crate::stats::median;
use crate::suite::sample::fmt_f64;

/// One line of the summary table. `delta` is the model median minus the
/// dummy median; `median_fold_delta` is the median of per-fold differences.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub protocol: String,
    pub portfolio: String,
    pub feature_group: String,
    pub folds: usize,
    pub model_median: f64,
    pub dummy_median: f64,
    pub delta: f64,
    pub median_fold_delta: f64,
}

/// Group rows by (protocol, portfolio, group) in order of first appearance.
pub fn summary_table(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, String, String)> = Vec::new();
    for r in rows {
        let k = (r.protocol.clone(), r.portfolio.clone(), r.feature_group.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.sort_by_key(|k| {
        crate::splits::Protocol::ALL
            .iter()
            .position(|p| p.as_str() == k.0)
            .unwrap_or(usize::MAX)
    });
    keys.into_iter()
        .map(|(protocol, portfolio, feature_group)| {
            let sel: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.protocol == protocol && r.portfolio == portfolio && r.feature_group == feature_group)
                .collect();
            let model: Vec<f64> = sel.iter().map(|r| r.model_as).collect();
            let dummy: Vec<f64> = sel.iter().map(|r| r.dummy_as).collect();
            let deltas: Vec<f64> = sel.iter().map(|r| r.delta()).collect();
            let (m, d) = (median(&model), median(&dummy));
            SummaryRow {
                protocol,
                portfolio,
                feature_group,
                folds: sel.len(),
                model_median: m,
                dummy_median: d,
                delta: m - d,
                median_fold_delta: median(&deltas),
            }
        })
        .collect()
}

fn write_summary(out: &Path, table: &[SummaryRow], config_hash: &str) -> Result<Vec<String>> {
    let rel_csv = "report/summary.csv".to_string();
    let path = out.join(&rel_csv);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "protocol",
        "portfolio",
        "feature_group",
        "folds",
        "model_median",
        "dummy_median",
        "delta",
        "median_fold_delta",
    ])?;
    for r in table {
        w.write_record([
            r.protocol.clone(),
            r.portfolio.clone(),
            r.feature_group.clone(),
            r.folds.to_string(),
            fmt_f64(r.model_median),
            fmt_f64(r.dummy_median),
            fmt_f64(r.delta),
            fmt_f64(r.median_fold_delta),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let mut md = format!("# AS performance summary\n\nconfig hash `{config_hash}`\n\n");
    md.push_str("| protocol | portfolio | features | folds | model (median) | dummy (median) | delta |\n");
    md.push_str("|---|---|---|---:|---:|---:|---:|\n");
    for r in table {
        md.push_str(&format!(
            "| {} | {} | {} | {} | {:.4} | {:.4} | {:+.4} |\n",
            r.protocol, r.portfolio, r.feature_group, r.folds, r.model_median, r.dummy_median, r.delta
        ));
    }
    let rel_md = "report/summary.md".to_string();
    write_text(&out.join(&rel_md), &md)?;
    Ok(vec![rel_csv, rel_md])
}

fn boxplots(out: &Path, rows: &[ResultRow], cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for name in &cfg.portfolio.names {
        let p = name.as_str();
        let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.portfolio == p).collect();
        let mut groups: Vec<String> = Vec::new();
        for r in &mine {
            if !groups.contains(&r.feature_group) {
                groups.push(r.feature_group.clone());
            }
        }
        let categories: Vec<svg::Category> = cfg
            .splits
            .protocols
            .iter()
            .map(|pr| {
                let here: Vec<&&ResultRow> = mine.iter().filter(|r| r.protocol == pr.as_str()).collect();
                let mut series: Vec<(String, Vec<f64>)> = groups
                    .iter()
                    .map(|g| {
                        let v = here.iter().filter(|r| &r.feature_group == g).map(|r| r.model_as).collect();
                        (g.clone(), v)
                    })
                    .collect();
                // the baseline ignores features, so any one group's rows carry it
                if let Some(g) = groups.first() {
                    let v = here.iter().filter(|r| &r.feature_group == g).map(|r| r.dummy_as).collect();
                    series.push(("dummy".into(), v));
                }
                (pr.as_str().to_string(), series)
            })
            .collect();
        let rel = format!("report/as_performance_{p}.svg");
        write_text(
            &out.join(&rel),
            &svg::grouped_boxplot(&format!("AS performance, {p}"), "AS performance", &categories),
        )?;
        files.push(rel);
    }
    Ok(files)
}

fn heatmap(out: &Path) -> Result<Vec<String>> {
    let csv_path = out.join("analysis/spearman.csv");
    let order_path = out.join("analysis/spearman_order.json");
    if !csv_path.exists() || !order_path.exists() {
        return Ok(Vec::new());
    }
    let mut r = csv::Reader::from_path(&csv_path)?;
    let mut names = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        names.push(rec[0].to_string());
        values.push(
            rec.iter()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|e| Error::Data(format!("{}: {e}", csv_path.display()))))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    let text = std::fs::read_to_string(&order_path).map_err(|e| Error::io(&order_path, e))?;
    let order_names: Vec<String> = serde_json::from_str(&text)?;
    let order: Vec<usize> = order_names
        .iter()
        .filter_map(|n| names.iter().position(|m| m == n))
        .collect();
    let rel = "report/spearman_clustermap.svg".to_string();
    write_text(&out.join(&rel), &svg::heatmap("Spearman correlation", &names, &values, &order))?;
    Ok(vec![rel])
}

fn alignment_curves(out: &Path) -> Result<Vec<String>> {
    let dir = out.join("analysis");
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut bins: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| Error::io(&dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().to_string())
        .filter(|n| n.starts_with("alignment_") && n.ends_with("_bins.csv"))
        .collect();
    bins.sort();
    let mut files = Vec::new();
    for name in bins {
        let tag = name.trim_start_matches("alignment_").trim_end_matches("_bins.csv").to_string();
        let mut r = csv::Reader::from_path(dir.join(&name))?;
        let mut mean = Vec::new();
        let mut med = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let p = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok()).unwrap_or(f64::NAN);
            mean.push((p(0), p(2)));
            med.push((p(0), p(3)));
        }
        let rel = format!("report/alignment_{tag}.svg");
        write_text(
            &out.join(&rel),
            &svg::line_chart(
                &format!("feature vs performance similarity, {tag}"),
                "feature cosine similarity",
                "performance cosine similarity",
                &[("mean".into(), mean), ("median".into(), med)],
            ),
        )?;
        files.push(rel);
    }
    Ok(files)
}

pub fn render(out: &Path, cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let rows = read_results_csv(&out.join(RESULTS))?;
    let report_dir = out.join("report");
    if report_dir.exists() {
        std::fs::remove_dir_all(&report_dir).map_err(|e| Error::io(&report_dir, e))?;
    }
    ensure_dir(&report_dir)?;
    let table = summary_table(&rows);
    let mut files = write_summary(out, &table, &cfg.hash())?;
    files.extend(boxplots(out, &rows, cfg)?);
    files.extend(heatmap(out)?);
    files.extend(alignment_curves(out)?);
    for r in &table {
        log::info!(
            "{:<20} {:<9} {:<12} model {:.4} dummy {:.4} delta {:+.4}",
            r.protocol,
            r.portfolio,
            r.feature_group,
            r.model_median,
            r.dummy_median,
            r.delta
        );
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(protocol: &str, fold: &str, m: f64, d: f64) -> ResultRow {
        ResultRow {
            portfolio: "2DE+2PSO".into(),
            feature_group: "ela".into(),
            protocol: protocol.into(),
            fold: fold.into(),
            model_as: m,
            dummy_as: d,
        }
    }

    #[test]
    fn delta_is_difference_of_medians() {
        let rows = vec![
            row("problem", "1-2", 0.5, 0.6),
            row("instance", "1", 0.9, 0.8),
            row("instance", "2", 0.7, 0.75),
            row("instance", "3", 0.8, 0.7),
        ];
        let t = summary_table(&rows);
        assert_eq!(t[0].protocol, "instance");
        assert_eq!(t[0].folds, 3);
        assert!((t[0].delta - (0.8 - 0.75)).abs() < 1e-12);
        assert!((t[0].median_fold_delta - 0.1).abs() < 1e-12);
        assert_eq!(t[1].protocol, "problem");
    }
}
