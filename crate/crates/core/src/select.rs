//! Sequential forward selection of predictor attributes, scored by the
//! held-out correlation of a small network.

use std::io::Write;
use std::path::Path;

use crate::ann::{mlp_train, DEFAULT_HIDDEN};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::pipeline::{random_split, Dataset};
use crate::train::TrainConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct SfsConfig {
    pub n_hidden: usize,
    /// Network training settings; `seed` fixes both the split and every
    /// network's initialization.
    pub train: TrainConfig,
}

impl Default for SfsConfig {
    fn default() -> Self {
        Self {
            n_hidden: DEFAULT_HIDDEN,
            train: TrainConfig {
                epochs: 100,
                lr: 0.05,
                ..TrainConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfsStage {
    /// 1-based.
    pub stage: usize,
    pub attribute: String,
    pub cc: f64,
}

/// One scored candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub stage: usize,
    pub attributes: Vec<String>,
    pub cc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfsResult {
    /// Accepted attributes in selection order.
    pub selected: Vec<String>,
    pub trace: Vec<SfsStage>,
    /// Every candidate set tried.
    pub evaluations: Vec<Evaluation>,
}

impl SfsResult {
    /// CSV with columns `stage,attribute_added,cc`.
    pub fn to_writer(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "stage,attribute_added,cc")?;
        for s in &self.trace {
            writeln!(w, "{},{},{}", s.stage, s.attribute, s.cc)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.to_writer(&mut buf).map_err(|e| Error::io(path, e))?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

/// Held-out CC of a network trained on `names`; an undefined CC counts as 0.
fn score(train: &Dataset, test: &Dataset, names: &[String], config: &SfsConfig) -> Result<f64> {
    let cfg = TrainConfig {
        exec: Exec::Sequential,
        ..config.train.clone()
    };
    let (_, report) = mlp_train(&train.select(names)?, &test.select(names)?, config.n_hidden, &cfg)?;
    let cc = report.test_metrics.cc;
    Ok(if cc.is_finite() { cc } else { 0.0 })
}

/// Greedy forward selection over `candidates` (columns of `data`). Each
/// stage tries every remaining candidate added to the current set and keeps
/// the best; the search stops as soon as the best addition fails to raise
/// the held-out CC. The first stage always keeps its best attribute.
pub fn sfs(data: &Dataset, candidates: &[String], config: &SfsConfig) -> Result<SfsResult> {
    if candidates.is_empty() {
        return Err(Error::Config("feature selection needs at least one candidate".into()));
    }
    for (i, c) in candidates.iter().enumerate() {
        data.attribute_index(c)?;
        if candidates[..i].contains(c) {
            return Err(Error::Config(format!("candidate `{c}` listed twice")));
        }
    }
    config.train.validate()?;
    let (train, test) = random_split(data, config.train.split_fraction, config.train.seed)?;

    let mut selected: Vec<String> = Vec::new();
    let mut remaining: Vec<String> = candidates.to_vec();
    let mut trace = Vec::new();
    let mut evaluations = Vec::new();
    let mut current = f64::NEG_INFINITY;

    while !remaining.is_empty() {
        let stage = selected.len() + 1;
        let sets: Vec<Vec<String>> = remaining
            .iter()
            .map(|c| selected.iter().chain(std::iter::once(c)).cloned().collect())
            .collect();
        let scores = par::map(config.train.exec, sets.len(), |i| score(&train, &test, &sets[i], config))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        for (set, &cc) in sets.iter().zip(&scores) {
            log::info!("stage {stage}: {set:?} -> cc {cc:.4}");
            evaluations.push(Evaluation { stage, attributes: set.clone(), cc });
        }
        // first maximum wins ties, so candidate order breaks them
        let (best, &best_cc) = scores
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        if stage > 1 && best_cc <= current {
            log::info!("stopping: best addition `{}` gives cc {best_cc:.4} <= {current:.4}", remaining[best]);
            break;
        }
        if stage == 1 && best_cc <= 0.0 {
            log::warn!("no single attribute gives a positive held-out cc; keeping `{}` anyway", remaining[best]);
        }
        let attribute = remaining.remove(best);
        selected.push(attribute.clone());
        trace.push(SfsStage { stage, attribute, cc: best_cc });
        current = best_cc;
    }
    Ok(SfsResult { selected, trace, evaluations })
}
