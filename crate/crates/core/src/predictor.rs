use std::path::Path;

use crate::ann::MlpModel;
use crate::error::{Error, Result};
use crate::fuzzy::TskModel;
use crate::pipeline::{Dataset, Metrics};

/// A trained model mapping raw attribute vectors to raw target values.
pub trait Regressor: Send + Sync {
    fn attribute_names(&self) -> &[String];

    /// Returns the prediction and whether a degenerate-input fallback fired.
    fn predict_flagged(&self, x: &[f64]) -> Result<(f64, bool)>;

    fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict_flagged(x)?.0)
    }

    /// Predicts every row of `data`, whose columns must match the model's.
    fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.attribute_names != self.attribute_names() {
            return Err(Error::AttributeMismatch {
                expected: self.attribute_names().to_vec(),
                got: data.attribute_names.clone(),
            });
        }
        data.samples.iter().map(|s| self.predict(&s.predictors)).collect()
    }

    /// Lenient metrics (undefined CC or SI become NaN) on `data`.
    fn evaluate(&self, data: &Dataset) -> Result<Metrics> {
        Metrics::lenient(&self.predict_dataset(data)?, &data.targets())
    }
}

impl Regressor for TskModel {
    fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    fn predict_flagged(&self, x: &[f64]) -> Result<(f64, bool)> {
        let out = self.infer_detailed(x)?;
        Ok((out.value, out.fallback))
    }
}

/// Either model kind, as loaded from a model file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Tsk(TskModel),
    Mlp(MlpModel),
}

impl AnyModel {
    /// Loads a model file, dispatching on its `schema` tag.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(crate::fuzzy::model::TSK_SCHEMA) => Ok(Self::Tsk(TskModel::from_json(text)?)),
            Some(crate::ann::MLP_SCHEMA) => Ok(Self::Mlp(MlpModel::from_json(text)?)),
            other => Err(Error::Parse(format!("unknown model schema {other:?}"))),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        match self {
            Self::Tsk(m) => m.save(path),
            Self::Mlp(m) => m.save(path),
        }
    }
}

impl Regressor for AnyModel {
    fn attribute_names(&self) -> &[String] {
        match self {
            Self::Tsk(m) => m.attribute_names(),
            Self::Mlp(m) => m.attribute_names(),
        }
    }

    fn predict_flagged(&self, x: &[f64]) -> Result<(f64, bool)> {
        match self {
            Self::Tsk(m) => m.predict_flagged(x),
            Self::Mlp(m) => m.predict_flagged(x),
        }
    }
}
