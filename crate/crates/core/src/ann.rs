//! Single-hidden-layer feed-forward network: tanh hidden units, linear
//! output, trained by batch gradient descent with the same step-size rule
//! and best-snapshot selection as the fuzzy models.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::pipeline::metrics::rmse;
use crate::pipeline::{random_split, Dataset, MinMaxSpec, ZScoreSpec};
use crate::predictor::Regressor;
use crate::train::{normalized_step, Diagnostics, EpochRecord, Fitted, Prepared, StepSize, TrainConfig, TrainReport};

pub const MLP_SCHEMA: &str = "mlp";
const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_HIDDEN: usize = 10;
/// Initial weights are drawn uniformly from `[-INIT_RANGE, INIT_RANGE]`.
const INIT_RANGE: f64 = 0.5;
/// Training aborts once the SSE exceeds this multiple of its first value.
const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub attribute_names: Vec<String>,
    pub n_hidden: usize,
    /// `n_hidden` rows of `n_inputs` weights.
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub activation: Activation,
    pub input_norm: ZScoreSpec,
    pub target_norm: MinMaxSpec,
}

#[derive(Serialize, Deserialize)]
struct MlpFile {
    schema: String,
    version: u32,
    n_inputs: usize,
    #[serde(flatten)]
    model: MlpModel,
}

impl MlpModel {
    /// Random initial network. Parameters are drawn in the order of
    /// [`MlpModel::params`], so the weights of input `j` do not depend on how
    /// many inputs follow it.
    pub fn init(
        attribute_names: Vec<String>,
        n_hidden: usize,
        input_norm: ZScoreSpec,
        target_norm: MinMaxSpec,
        seed: u64,
    ) -> Result<Self> {
        let m = attribute_names.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = n_hidden * (m + 2) + 1;
        let params: Vec<f64> = (0..n).map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE)).collect();
        let mut model = Self {
            attribute_names,
            n_hidden,
            hidden_weights: vec![vec![0.0; m]; n_hidden],
            hidden_bias: vec![0.0; n_hidden],
            output_weights: vec![0.0; n_hidden],
            output_bias: 0.0,
            activation: Activation::Tanh,
            input_norm,
            target_norm,
        };
        model.set_params(&params)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.n_inputs();
        if m == 0 || self.n_hidden == 0 {
            return Err(Error::ParameterDomain("network needs at least one input and one hidden unit".into()));
        }
        if self.hidden_weights.len() != self.n_hidden
            || self.hidden_bias.len() != self.n_hidden
            || self.output_weights.len() != self.n_hidden
        {
            return Err(Error::dim(self.n_hidden, self.hidden_weights.len(), "hidden layer"));
        }
        if let Some(row) = self.hidden_weights.iter().find(|r| r.len() != m) {
            return Err(Error::dim(m, row.len(), "hidden weight row"));
        }
        if self.input_norm.dim() != m {
            return Err(Error::dim(m, self.input_norm.dim(), "input normalization"));
        }
        self.target_norm.validate()?;
        if self.params().iter().any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain("network has non-finite weights".into()));
        }
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn n_params(&self) -> usize {
        self.n_hidden * (self.n_inputs() + 2) + 1
    }

    /// Flattened parameters: output weights, output bias, hidden biases,
    /// then the hidden weights input by input.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(&self.output_weights);
        p.push(self.output_bias);
        p.extend_from_slice(&self.hidden_bias);
        for j in 0..self.n_inputs() {
            p.extend(self.hidden_weights.iter().map(|row| row[j]));
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.n_params() {
            return Err(Error::dim(self.n_params(), p.len(), "network parameters"));
        }
        let h = self.n_hidden;
        self.output_weights.copy_from_slice(&p[..h]);
        self.output_bias = p[h];
        self.hidden_bias.copy_from_slice(&p[h + 1..2 * h + 1]);
        for (j, col) in p[2 * h + 1..].chunks_exact(h).enumerate() {
            for (row, &w) in self.hidden_weights.iter_mut().zip(col) {
                row[j] = w;
            }
        }
        Ok(())
    }

    fn hidden(&self, xn: &[f64], out: &mut [f64]) {
        for ((a, row), b) in out.iter_mut().zip(&self.hidden_weights).zip(&self.hidden_bias) {
            let z = b + row.iter().zip(xn).map(|(w, x)| w * x).sum::<f64>();
            *a = match self.activation {
                Activation::Tanh => z.tanh(),
            };
        }
    }

    pub(crate) fn forward_normalized(&self, xn: &[f64]) -> f64 {
        let mut h = vec![0.0; self.n_hidden];
        self.hidden(xn, &mut h);
        self.output_bias + self.output_weights.iter().zip(&h).map(|(v, a)| v * a).sum::<f64>()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = MlpFile {
            schema: MLP_SCHEMA.into(),
            version: FORMAT_VERSION,
            n_inputs: self.n_inputs(),
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MlpFile = serde_json::from_str(text)?;
        if file.schema != MLP_SCHEMA || file.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "expected {MLP_SCHEMA} model version {FORMAT_VERSION}, found {} version {}",
                file.schema, file.version
            )));
        }
        if file.n_inputs != file.model.n_inputs() {
            return Err(Error::dim(file.n_inputs, file.model.n_inputs(), "network inputs"));
        }
        file.model.validate()?;
        Ok(file.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Prediction in raw target units for a raw input.
pub fn mlp_infer(model: &MlpModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.n_inputs() {
        return Err(Error::dim(model.n_inputs(), x.len(), "network input"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::ParameterDomain("network input must be finite".into()));
    }
    Ok(model.target_norm.invert(model.forward_normalized(&model.input_norm.apply(x))))
}

impl Regressor for MlpModel {
    fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    fn predict_flagged(&self, x: &[f64]) -> Result<(f64, bool)> {
        Ok((mlp_infer(self, x)?, false))
    }
}

fn prepare(model: &MlpModel, data: &Dataset) -> Result<Prepared> {
    Prepared::new(
        data,
        &model.attribute_names,
        |x| model.input_norm.apply(x),
        |t| model.target_norm.apply(t),
    )
}

/// Batch SSE gradient in [`MlpModel::params`] order, and the SSE itself.
fn gradient_normalized(model: &MlpModel, xn: &[Vec<f64>], tn: &[f64], exec: Exec) -> (Vec<f64>, f64) {
    let h = model.n_hidden;
    let np = model.n_params();
    par::chunked_reduce(
        exec,
        xn.len(),
        |range| {
            let mut g = vec![0.0; np];
            let mut sse = 0.0;
            let mut act = vec![0.0; h];
            for k in range {
                let x = &xn[k];
                model.hidden(x, &mut act);
                let y = model.output_bias + model.output_weights.iter().zip(&act).map(|(v, a)| v * a).sum::<f64>();
                let e = y - tn[k];
                sse += e * e;
                let de = 2.0 * e;
                for q in 0..h {
                    g[q] += de * act[q];
                }
                g[h] += de;
                for q in 0..h {
                    let dz = de * model.output_weights[q] * (1.0 - act[q] * act[q]);
                    g[h + 1 + q] += dz;
                    for (j, xj) in x.iter().enumerate() {
                        g[2 * h + 1 + j * h + q] += dz * xj;
                    }
                }
            }
            (g, sse)
        },
        |(mut g1, s1), (g2, s2)| {
            g1.iter_mut().zip(g2).for_each(|(a, b)| *a += b);
            (g1, s1 + s2)
        },
    )
    .unwrap_or_else(|| (vec![0.0; np], 0.0))
}

/// Gradient of the batch SSE (normalized target space) with respect to
/// [`MlpModel::params`].
pub fn mlp_gradient(model: &MlpModel, data: &Dataset) -> Result<Vec<f64>> {
    let prep = prepare(model, data)?;
    Ok(gradient_normalized(model, &prep.xn, &prep.tn, Exec::default()).0)
}

/// Batch SSE in normalized target space.
pub fn mlp_sse(model: &MlpModel, data: &Dataset) -> Result<f64> {
    let prep = prepare(model, data)?;
    Ok(prep
        .xn
        .iter()
        .zip(&prep.tn)
        .map(|(x, t)| (model.forward_normalized(x) - t).powi(2))
        .sum())
}

fn predictions(model: &MlpModel, xn: &[Vec<f64>], exec: Exec) -> Vec<f64> {
    par::map(exec, xn.len(), |k| model.target_norm.invert(model.forward_normalized(&xn[k])))
}

/// Trains `model` in place of a copy and returns the epoch snapshot with the
/// lowest test RMSE. With zero epochs the model comes back unchanged.
pub fn mlp_train_from(
    mut model: MlpModel,
    train_set: &Dataset,
    test_set: &Dataset,
    config: &TrainConfig,
) -> Result<(MlpModel, TrainReport)> {
    config.validate()?;
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::ParameterDomain("training needs non-empty train and test sets".into()));
    }
    let tr = prepare(&model, train_set)?;
    let te = prepare(&model, test_set)?;
    let mut step = StepSize::new(config.lr, config.adapt_lr);
    let mut history = Vec::with_capacity(config.epochs);
    let mut diagnostics = Diagnostics::default();
    let mut best: Option<(f64, usize, MlpModel)> = None;
    let mut initial_sse = None;

    for epoch in 1..=config.epochs {
        let (mut grad, sse) = gradient_normalized(&model, &tr.xn, &tr.tn, config.exec);
        let first = *initial_sse.get_or_insert(sse);
        if !sse.is_finite() || sse > DIVERGENCE_FACTOR * first.max(f64::MIN_POSITIVE) {
            return Err(Error::Numeric(format!(
                "network training diverged at epoch {epoch} (SSE {sse:e}, initial {first:e})"
            )));
        }
        step.observe(sse);
        let mut params = model.params();
        diagnostics.skipped_gradients += normalized_step(&mut params, &mut grad, step.lr);
        model.set_params(&params)?;

        let train_rmse = rmse(&predictions(&model, &tr.xn, config.exec), &tr.raw_t)?;
        let test_rmse = rmse(&predictions(&model, &te.xn, config.exec), &te.raw_t)?;
        history.push(EpochRecord { epoch, train_rmse, test_rmse, lr: step.lr });
        if best.as_ref().is_none_or(|(b, _, _)| test_rmse < *b) {
            best = Some((test_rmse, epoch, model.clone()));
        }
        if let (Some(p), Some((_, at, _))) = (config.patience, &best) {
            if epoch - at >= p {
                break;
            }
        }
    }

    let (best_epoch, model) = match best {
        Some((_, e, m)) => (e, m),
        None => (0, model),
    };
    let report = TrainReport {
        history,
        best_epoch,
        train_metrics: model.evaluate(train_set)?,
        test_metrics: model.evaluate(test_set)?,
        diagnostics,
    };
    Ok((model, report))
}

/// Fits normalization on `train_set`, initializes from `config.seed` and trains.
pub fn mlp_train(
    train_set: &Dataset,
    test_set: &Dataset,
    n_hidden: usize,
    config: &TrainConfig,
) -> Result<(MlpModel, TrainReport)> {
    if train_set.is_empty() {
        return Err(Error::ParameterDomain("cannot train on an empty dataset".into()));
    }
    let model = MlpModel::init(
        train_set.attribute_names.clone(),
        n_hidden,
        ZScoreSpec::fit(&train_set.predictors())?,
        MinMaxSpec::fit(&train_set.targets())?,
        config.seed,
    )?;
    mlp_train_from(model, train_set, test_set, config)
}

/// Splits `data` per `config` and trains a network on it.
pub fn fit(data: &Dataset, n_hidden: usize, config: &TrainConfig) -> Result<Fitted<MlpModel>> {
    config.validate()?;
    let (train_set, test_set) = random_split(data, config.split_fraction, config.seed)?;
    let (model, report) = mlp_train(&train_set, &test_set, n_hidden, config)?;
    Ok(Fitted { model, report, train: train_set, test: test_set })
}
