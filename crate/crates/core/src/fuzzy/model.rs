//! First-order Takagi–Sugeno–Kang fuzzy inference system.
//!
//! Membership functions live in z-scored input space and rule consequents
//! act on z-scored inputs; the model carries its normalization specs so
//! [`TskModel::infer`] takes raw attribute values and returns raw target
//! units.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mf::BellMf;
use crate::error::{Error, Result};
use crate::pipeline::{MinMaxSpec, ZScoreSpec};

pub const TSK_SCHEMA: &str = "tsk";
pub const FORMAT_VERSION: u32 = 1;

/// A membership function together with its linguistic label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMf {
    pub label: String,
    #[serde(flatten)]
    pub mf: BellMf,
}

impl LabeledMf {
    pub fn new(label: impl Into<String>, mf: BellMf) -> Self {
        Self {
            label: label.into(),
            mf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TskRule {
    /// Index into each input's membership bank.
    pub antecedent: Vec<usize>,
    /// One coefficient per input, then the constant term.
    pub consequent: Vec<f64>,
}

impl TskRule {
    /// Linear rule output for a normalized input.
    pub fn output(&self, x_norm: &[f64]) -> f64 {
        let (slope, constant) = self.consequent.split_at(x_norm.len());
        slope.iter().zip(x_norm).map(|(p, x)| p * x).sum::<f64>() + constant[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TskModel {
    pub attribute_names: Vec<String>,
    pub mf_banks: Vec<Vec<LabeledMf>>,
    pub rules: Vec<TskRule>,
    pub input_norm: ZScoreSpec,
    pub target_norm: MinMaxSpec,
}

/// Result of one forward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    /// Output in raw target units.
    pub value: f64,
    /// Output before the inverse min-max transform.
    pub normalized: f64,
    /// Every rule's firing strength underflowed to zero and the strongest
    /// rule (compared in log space) was used alone.
    pub fallback: bool,
}

/// Normalized firing strengths `w_i / sum(w)`.
pub fn normalize_firing(w: &[f64]) -> Result<Vec<f64>> {
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::ParameterDomain(
            "firing strengths must be finite and non-negative".into(),
        ));
    }
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return Err(Error::DegenerateInput("all firing strengths are zero".into()));
    }
    Ok(w.iter().map(|v| v / total).collect())
}

impl TskModel {
    pub fn new(
        attribute_names: Vec<String>,
        mf_banks: Vec<Vec<LabeledMf>>,
        rules: Vec<TskRule>,
        input_norm: ZScoreSpec,
        target_norm: MinMaxSpec,
    ) -> Result<Self> {
        let model = Self {
            attribute_names,
            mf_banks,
            rules,
            input_norm,
            target_norm,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.n_inputs();
        if m == 0 {
            return Err(Error::ParameterDomain("model needs at least one input".into()));
        }
        if self.attribute_names.len() != m {
            return Err(Error::dim(m, self.attribute_names.len(), "attribute names"));
        }
        if self.input_norm.dim() != m || self.input_norm.std.len() != m {
            return Err(Error::dim(m, self.input_norm.dim(), "input normalization"));
        }
        if self.input_norm.std.iter().any(|s| !(*s > 0.0 && s.is_finite()))
            || self.input_norm.mean.iter().any(|v| !v.is_finite())
        {
            return Err(Error::ParameterDomain("input normalization needs finite means and positive stds".into()));
        }
        self.target_norm.validate()?;
        if self.rules.is_empty() {
            return Err(Error::ParameterDomain("model needs at least one rule".into()));
        }
        for (j, bank) in self.mf_banks.iter().enumerate() {
            if bank.is_empty() {
                return Err(Error::ParameterDomain(format!("input {j} has no membership functions")));
            }
            let mut labels = BTreeSet::new();
            for lm in bank {
                lm.mf.validate()?;
                if !labels.insert(lm.label.as_str()) {
                    return Err(Error::ParameterDomain(format!(
                        "label `{}` repeated on input {j}",
                        lm.label
                    )));
                }
            }
        }
        for (i, rule) in self.rules.iter().enumerate() {
            if rule.antecedent.len() != m {
                return Err(Error::dim(m, rule.antecedent.len(), format!("rule {i} antecedent")));
            }
            if rule.consequent.len() != m + 1 {
                return Err(Error::dim(m + 1, rule.consequent.len(), format!("rule {i} consequent")));
            }
            for (j, &k) in rule.antecedent.iter().enumerate() {
                if k >= self.mf_banks[j].len() {
                    return Err(Error::ParameterDomain(format!(
                        "rule {i} references membership {k} on input {j}, which has {}",
                        self.mf_banks[j].len()
                    )));
                }
            }
            if rule.consequent.iter().any(|v| !v.is_finite()) {
                return Err(Error::ParameterDomain(format!("rule {i} has a non-finite consequent")));
            }
        }
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.mf_banks.len()
    }

    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn n_mfs(&self) -> usize {
        self.mf_banks.iter().map(Vec::len).sum()
    }

    /// Number of stacked consequent coefficients, `rules * (inputs + 1)`.
    pub fn n_consequents(&self) -> usize {
        self.n_rules() * (self.n_inputs() + 1)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_inputs() {
            return Err(Error::dim(self.n_inputs(), x.len(), "model input"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain("model input must be finite".into()));
        }
        Ok(())
    }

    /// Firing strength of `rule` at a normalized input: the product of its
    /// antecedent grades.
    pub fn fire_rule(&self, rule: &TskRule, x_norm: &[f64]) -> f64 {
        rule.antecedent
            .iter()
            .zip(x_norm)
            .enumerate()
            .map(|(j, (&k, &x))| self.mf_banks[j][k].mf.eval(x))
            .product()
    }

    /// Grades of every membership function, bank by bank.
    pub(crate) fn grades(&self, x_norm: &[f64]) -> Vec<Vec<f64>> {
        self.mf_banks
            .iter()
            .zip(x_norm)
            .map(|(bank, &x)| bank.iter().map(|lm| lm.mf.eval(x)).collect())
            .collect()
    }

    /// Writes normalized firing strengths into `wbar` and returns whether the
    /// log-space fallback was needed.
    pub(crate) fn normalized_firing_into(
        &self,
        x_norm: &[f64],
        grades: &[Vec<f64>],
        wbar: &mut [f64],
    ) -> bool {
        let mut total = 0.0;
        for (w, rule) in wbar.iter_mut().zip(&self.rules) {
            *w = rule
                .antecedent
                .iter()
                .enumerate()
                .map(|(j, &k)| grades[j][k])
                .product();
            total += *w;
        }
        if total > 0.0 {
            wbar.iter_mut().for_each(|w| *w /= total);
            return false;
        }
        let mut best = (0, f64::NEG_INFINITY);
        for (i, rule) in self.rules.iter().enumerate() {
            let lw: f64 = rule
                .antecedent
                .iter()
                .enumerate()
                .map(|(j, &k)| self.mf_banks[j][k].mf.ln_eval(x_norm[j]))
                .sum();
            if lw > best.1 {
                best = (i, lw);
            }
        }
        wbar.iter_mut().for_each(|w| *w = 0.0);
        wbar[best.0] = 1.0;
        true
    }

    /// Normalized firing strengths at a raw input.
    pub fn firing(&self, x: &[f64]) -> Result<(Vec<f64>, bool)> {
        self.check_input(x)?;
        let xn = self.input_norm.apply(x);
        let mut wbar = vec![0.0; self.n_rules()];
        let fallback = self.normalized_firing_into(&xn, &self.grades(&xn), &mut wbar);
        Ok((wbar, fallback))
    }

    /// Normalized-space output for a z-scored input, plus the fallback flag.
    pub(crate) fn forward_normalized(&self, xn: &[f64]) -> (f64, bool) {
        let mut wbar = vec![0.0; self.n_rules()];
        let fallback = self.normalized_firing_into(xn, &self.grades(xn), &mut wbar);
        let y = wbar
            .iter()
            .zip(&self.rules)
            .map(|(w, r)| w * r.output(xn))
            .sum::<f64>();
        (y, fallback)
    }

    pub fn infer_detailed(&self, x: &[f64]) -> Result<Inference> {
        self.check_input(x)?;
        let (normalized, fallback) = self.forward_normalized(&self.input_norm.apply(x));
        Ok(Inference {
            value: self.target_norm.invert(normalized),
            normalized,
            fallback,
        })
    }

    /// Prediction in raw target units.
    pub fn infer(&self, x: &[f64]) -> Result<f64> {
        Ok(self.infer_detailed(x)?.value)
    }

    /// Row `r` with `r · consequents_stacked() == infer_detailed(x).normalized`:
    /// for each rule in order, `w̄_i * (x_norm, 1)`.
    pub fn design_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let xn = self.input_norm.apply(x);
        let mut row = vec![0.0; self.n_consequents()];
        self.design_row_normalized(&xn, &mut row);
        Ok(row)
    }

    pub(crate) fn design_row_normalized(&self, xn: &[f64], row: &mut [f64]) -> bool {
        let mut wbar = vec![0.0; self.n_rules()];
        let fallback = self.normalized_firing_into(xn, &self.grades(xn), &mut wbar);
        let width = self.n_inputs() + 1;
        for (block, w) in row.chunks_exact_mut(width).zip(&wbar) {
            for (slot, x) in block.iter_mut().zip(xn) {
                *slot = w * x;
            }
            block[width - 1] = *w;
        }
        fallback
    }

    /// Rule-major stack of all consequent coefficients.
    pub fn consequents_stacked(&self) -> Vec<f64> {
        self.rules.iter().flat_map(|r| r.consequent.iter().copied()).collect()
    }

    pub fn set_consequents(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_consequents() {
            return Err(Error::dim(self.n_consequents(), theta.len(), "stacked consequents"));
        }
        let width = self.n_inputs() + 1;
        for (rule, chunk) in self.rules.iter_mut().zip(theta.chunks_exact(width)) {
            rule.consequent.copy_from_slice(chunk);
        }
        Ok(())
    }

    /// Premise parameters flattened as `(a, b, c)` per membership function,
    /// bank by bank.
    pub fn premise_params(&self) -> Vec<f64> {
        self.mf_banks
            .iter()
            .flatten()
            .flat_map(|lm| [lm.mf.a, lm.mf.b, lm.mf.c])
            .collect()
    }

    pub fn set_premise_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != 3 * self.n_mfs() {
            return Err(Error::dim(3 * self.n_mfs(), params.len(), "premise parameters"));
        }
        for (lm, p) in self.mf_banks.iter_mut().flatten().zip(params.chunks_exact(3)) {
            lm.mf = BellMf::new(p[0], p[1], p[2])?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TskFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TskFile = serde_json::from_str(text)?;
        file.into_model()
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

#[derive(Serialize, Deserialize)]
struct TskFile {
    schema: String,
    version: u32,
    n_inputs: usize,
    attribute_names: Vec<String>,
    mf_banks: Vec<Vec<LabeledMf>>,
    rules: Vec<TskRule>,
    input_norm: ZScoreSpec,
    target_norm: MinMaxSpec,
}

impl From<&TskModel> for TskFile {
    fn from(m: &TskModel) -> Self {
        Self {
            schema: TSK_SCHEMA.into(),
            version: FORMAT_VERSION,
            n_inputs: m.n_inputs(),
            attribute_names: m.attribute_names.clone(),
            mf_banks: m.mf_banks.clone(),
            rules: m.rules.clone(),
            input_norm: m.input_norm.clone(),
            target_norm: m.target_norm,
        }
    }
}

impl TskFile {
    fn into_model(self) -> Result<TskModel> {
        if self.schema != TSK_SCHEMA || self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "expected {TSK_SCHEMA} model version {FORMAT_VERSION}, found {} version {}",
                self.schema, self.version
            )));
        }
        if self.n_inputs != self.mf_banks.len() {
            return Err(Error::dim(self.n_inputs, self.mf_banks.len(), "membership banks"));
        }
        TskModel::new(
            self.attribute_names,
            self.mf_banks,
            self.rules,
            self.input_norm,
            self.target_norm,
        )
    }
}
