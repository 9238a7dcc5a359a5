//! Stage-cached experiment pipeline. Each stage writes its artifacts under
//! the output directory plus `manifests/<stage>.json`, which records the
//! stage key (a hash of the stage's config section and its input hashes)
//! and the SHA-256 of every file it wrote.

pub mod config;
pub mod report;
pub mod stages;
pub mod svg;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::ExperimentConfig;

use crate::error::{Error, Result};
use crate::featurestore::file_sha256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Generate,
    Sample,
    Run,
    Features,
    Splits,
    TrainEval,
    Analyze,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Generate,
        Stage::Sample,
        Stage::Run,
        Stage::Features,
        Stage::Splits,
        Stage::TrainEval,
        Stage::Analyze,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Generate => "generate",
            Stage::Sample => "sample",
            Stage::Run => "run",
            Stage::Features => "features",
            Stage::Splits => "splits",
            Stage::TrainEval => "train-eval",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }

    pub fn dependencies(self) -> &'static [Stage] {
        match self {
            Stage::Generate => &[],
            Stage::Sample | Stage::Run | Stage::Splits => &[Stage::Generate],
            Stage::Features => &[Stage::Generate, Stage::Sample],
            Stage::TrainEval => &[Stage::Run, Stage::Features, Stage::Splits],
            Stage::Analyze => &[Stage::Run, Stage::Features],
            Stage::Report => &[Stage::TrainEval, Stage::Analyze],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    pub config_hash: String,
    pub key: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ran,
    /// Inputs and config unchanged and outputs intact.
    Cached,
}

pub struct Pipeline {
    pub config: ExperimentConfig,
    pub force: bool,
}

pub fn manifest_path(out: &Path, stage: Stage) -> PathBuf {
    out.join("manifests").join(format!("{}.json", stage.name()))
}

pub fn read_manifest(out: &Path, stage: Stage) -> Result<Option<StageManifest>> {
    let path = manifest_path(out, stage);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(Some(serde_json::from_str(&text)?))
}

/// Files whose current hash differs from the one recorded, or that are gone.
pub fn changed_outputs(out: &Path, manifest: &StageManifest) -> Vec<String> {
    manifest
        .outputs
        .iter()
        .filter(|(rel, want)| file_sha256(&out.join(rel)).map_or(true, |got| &got != *want))
        .map(|(rel, _)| rel.clone())
        .collect()
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

impl Pipeline {
    pub fn new(config: ExperimentConfig, force: bool) -> Self {
        Pipeline { config, force }
    }

    pub fn out(&self) -> &Path {
        &self.config.output_dir
    }

    fn section_hash(&self, stage: Stage) -> String {
        use config::hash_json;
        let c = &self.config;
        match stage {
            Stage::Generate => hash_json(&c.suite.suite_config()),
            Stage::Sample => hash_json(&(c.suite.sample_seed, c.suite.points())),
            Stage::Run => hash_json(&c.portfolio),
            Stage::Features => hash_json(&c.features),
            Stage::Splits => hash_json(&c.splits),
            Stage::TrainEval => hash_json(&(&c.selector, c.dump_trees, &c.features.combinations)),
            Stage::Analyze => hash_json(&c.analysis),
            Stage::Report => hash_json(&()),
        }
    }

    fn inputs(&self, stage: Stage) -> Result<BTreeMap<String, String>> {
        let mut inputs = BTreeMap::new();
        for &dep in stage.dependencies() {
            let m = read_manifest(self.out(), dep)?.ok_or_else(|| {
                Error::Usage(format!(
                    "stage {stage} needs the output of {dep}; run `{dep}` first"
                ))
            })?;
            inputs.extend(m.outputs);
        }
        if stage == Stage::Features {
            for imp in &self.config.features.imports {
                inputs.insert(format!("import:{}", imp.name), file_sha256(&imp.path)?);
            }
        }
        Ok(inputs)
    }

    /// Run one stage unless its cached outputs are current.
    pub fn run_stage(&self, stage: Stage) -> Result<Outcome> {
        let inputs = self.inputs(stage)?;
        let key = config::hash_json(&(stage.name(), self.section_hash(stage), &inputs));
        let out = self.out();
        if let Some(old) = read_manifest(out, stage)? {
            if old.key == key {
                let changed = changed_outputs(out, &old);
                if changed.is_empty() {
                    log::info!("{stage}: up to date");
                    return Ok(Outcome::Cached);
                }
                log::warn!("{stage}: {} output file(s) changed or missing, recomputing", changed.len());
            } else if !self.force {
                return Err(Error::Data(format!(
                    "{stage}: existing artifacts in {} were produced from a different config or inputs; \
                     rerun with --force to overwrite them",
                    out.display()
                )));
            }
        }
        ensure_dir(out)?;
        log::info!("{stage}: running");
        let files = crate::par::with_workers(self.config.workers, || stages::run(self, stage))?;
        let mut outputs = BTreeMap::new();
        for rel in files {
            let hash = file_sha256(&out.join(&rel))?;
            outputs.insert(rel, hash);
        }
        let manifest = StageManifest {
            stage: stage.name().to_string(),
            config_hash: self.config.hash(),
            key,
            inputs,
            outputs,
        };
        write_text(&manifest_path(out, stage), &serde_json::to_string_pretty(&manifest)?)?;
        Ok(Outcome::Ran)
    }

    /// Every stage in order.
    pub fn run_all(&self) -> Result<Vec<(Stage, Outcome)>> {
        Stage::ALL
            .into_iter()
            .map(|s| self.run_stage(s).map(|o| (s, o)))
            .collect()
    }
}
