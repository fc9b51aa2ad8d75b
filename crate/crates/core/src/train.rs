//! Hybrid ANFIS learning: least squares for the rule consequents, batch
//! gradient descent for the membership parameters, and a snapshot of the
//! epoch with the lowest held-out RMSE.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::builder::{build, width_floor, Structure, DEFAULT_RULE_CAP};
use crate::error::{Error, Result};
use crate::fuzzy::TskModel;
use crate::par::{self, Exec};
use crate::pipeline::metrics::rmse;
use crate::pipeline::{random_split, Dataset, Metrics};
use crate::predictor::Regressor;

/// Bounds re-imposed on the slope exponent after every premise update.
pub const SLOPE_BOUNDS: (f64, f64) = (0.1, 10.0);

/// Above this condition number the normal equations get a small ridge.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Length of each premise (or weight) step in parameter space.
    pub lr: f64,
    /// Halve the step after an epoch whose error rose; grow it by 10% after
    /// two consecutive falls.
    pub adapt_lr: bool,
    pub seed: u64,
    /// Training share of the random split.
    pub split_fraction: f64,
    pub rule_cap: usize,
    /// Stop after this many epochs without a new best test RMSE.
    pub patience: Option<usize>,
    pub exec: Exec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            lr: 0.01,
            adapt_lr: true,
            seed: 0,
            split_fraction: 0.7,
            rule_cap: DEFAULT_RULE_CAP,
            patience: None,
            exec: Exec::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::ParameterDomain(format!("learning rate must be >= 0, got {}", self.lr)));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::ParameterDomain(format!(
                "split fraction must lie strictly between 0 and 1, got {}",
                self.split_fraction
            )));
        }
        if self.patience == Some(0) {
            return Err(Error::ParameterDomain("patience must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Training rows whose firing strengths all underflowed (summed over epochs).
    pub fallback_rows: usize,
    /// Gradient components dropped for being non-finite.
    pub skipped_gradients: usize,
    /// Least-squares solves that needed the ridge term.
    pub ridge_solves: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub history: Vec<EpochRecord>,
    /// 1-based epoch of the returned snapshot; 0 when no epoch ran.
    pub best_epoch: usize,
    pub train_metrics: Metrics,
    pub test_metrics: Metrics,
    pub diagnostics: Diagnostics,
}

impl TrainReport {
    pub fn best(&self) -> Option<&EpochRecord> {
        self.history.get(self.best_epoch.checked_sub(1)?)
    }

    /// CSV with columns `epoch,train_rmse,test_rmse`.
    pub fn to_writer(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "epoch,train_rmse,test_rmse")?;
        for r in &self.history {
            writeln!(w, "{},{},{}", r.epoch, r.train_rmse, r.test_rmse)?;
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

/// Jang's step-size heuristic, shared with the network trainer.
#[derive(Debug, Clone)]
pub(crate) struct StepSize {
    pub lr: f64,
    adapt: bool,
    prev: Option<f64>,
    falls: usize,
}

impl StepSize {
    pub fn new(lr: f64, adapt: bool) -> Self {
        Self { lr, adapt, prev: None, falls: 0 }
    }

    /// Feeds the latest epoch error and adjusts the step.
    pub fn observe(&mut self, err: f64) {
        if let (true, Some(prev)) = (self.adapt, self.prev) {
            if err > prev {
                self.lr *= 0.5;
                self.falls = 0;
            } else if err < prev {
                self.falls += 1;
                if self.falls == 2 {
                    self.lr *= 1.1;
                    self.falls = 0;
                }
            }
        }
        self.prev = Some(err);
    }
}

/// Moves `params` a distance `lr` against `grad`. Non-finite components are
/// dropped first; returns how many were.
pub(crate) fn normalized_step(params: &mut [f64], grad: &mut [f64], lr: f64) -> usize {
    let mut skipped = 0;
    for g in grad.iter_mut() {
        if !g.is_finite() {
            *g = 0.0;
            skipped += 1;
        }
    }
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if lr > 0.0 && norm > 0.0 && norm.is_finite() {
        let scale = lr / norm;
        params.iter_mut().zip(grad.iter()).for_each(|(p, g)| *p -= scale * g);
    }
    skipped
}

/// Training rows in model space.
pub(crate) struct Prepared {
    pub xn: Vec<Vec<f64>>,
    pub tn: Vec<f64>,
    pub raw_t: Vec<f64>,
}

impl Prepared {
    pub fn new(
        data: &Dataset,
        names: &[String],
        apply: impl Fn(&[f64]) -> Vec<f64>,
        target: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if data.attribute_names != names {
            return Err(Error::AttributeMismatch {
                expected: names.to_vec(),
                got: data.attribute_names.clone(),
            });
        }
        Ok(Self {
            xn: data.samples.iter().map(|s| apply(&s.predictors)).collect(),
            tn: data.samples.iter().map(|s| target(s.target)).collect(),
            raw_t: data.targets(),
        })
    }

    fn for_model(model: &TskModel, data: &Dataset) -> Result<Self> {
        Self::new(
            data,
            &model.attribute_names,
            |x| model.input_norm.apply(x),
            |t| model.target_norm.apply(t),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LseInfo {
    /// Ridge added to the normal equations, if any.
    pub ridge: Option<f64>,
    /// Condition estimate of `AᵀA` (infinite when singular).
    pub condition: f64,
}

/// Sets the consequents to the least-squares fit of the normalized targets
/// for the current premise parameters.
pub fn lse_consequents(model: &mut TskModel, data: &Dataset) -> Result<LseInfo> {
    let prep = Prepared::for_model(model, data)?;
    lse_normalized(model, &prep.xn, &prep.tn, Exec::default())
}

pub(crate) fn lse_normalized(
    model: &mut TskModel,
    xn: &[Vec<f64>],
    tn: &[f64],
    exec: Exec,
) -> Result<LseInfo> {
    if xn.is_empty() {
        return Err(Error::ParameterDomain("least squares needs at least one row".into()));
    }
    let n = model.n_consequents();
    let model_ref: &TskModel = model;
    let (ata, atb) = par::chunked_reduce(
        exec,
        xn.len(),
        |range| {
            let mut ata = vec![0.0; n * n];
            let mut atb = vec![0.0; n];
            let mut row = vec![0.0; n];
            for k in range {
                model_ref.design_row_normalized(&xn[k], &mut row);
                for i in 0..n {
                    let ri = row[i];
                    if ri == 0.0 {
                        continue;
                    }
                    atb[i] += ri * tn[k];
                    let line = &mut ata[i * n..(i + 1) * n];
                    for j in i..n {
                        line[j] += ri * row[j];
                    }
                }
            }
            (ata, atb)
        },
        |(mut a1, mut b1), (a2, b2)| {
            a1.iter_mut().zip(a2).for_each(|(x, y)| *x += y);
            b1.iter_mut().zip(b2).for_each(|(x, y)| *x += y);
            (a1, b1)
        },
    )
    .expect("non-empty rows");

    let a = DMatrix::from_fn(n, n, |i, j| if i <= j { ata[i * n + j] } else { ata[j * n + i] });
    let b = DVector::from_vec(atb);
    let trace = a.trace();
    let eig = SymmetricEigen::new(a);
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lmin = eig.eigenvalues.min();
    let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    let ridge = if condition > MAX_CONDITION || xn.len() < n {
        if xn.len() < n {
            log::warn!("{} rows for {n} consequent unknowns; using a ridge solve", xn.len());
        }
        Some(1e-8 * trace / n as f64)
    } else {
        None
    };
    let shift = ridge.unwrap_or(0.0);
    let proj = eig.eigenvectors.transpose() * &b;
    let scaled = DVector::from_iterator(
        n,
        proj.iter().zip(eig.eigenvalues.iter()).map(|(p, l)| {
            let d = l + shift;
            if d > 0.0 {
                p / d
            } else {
                0.0
            }
        }),
    );
    let theta = &eig.eigenvectors * scaled;
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("least-squares consequents are not finite".into()));
    }
    model.set_consequents(theta.as_slice())?;
    Ok(LseInfo { ridge, condition })
}

/// Gradient of the batch SSE (normalized target space) with respect to
/// [`TskModel::premise_params`].
pub fn premise_gradient(model: &TskModel, data: &Dataset) -> Result<Vec<f64>> {
    let prep = Prepared::for_model(model, data)?;
    Ok(gradient_normalized(model, &prep.xn, &prep.tn, Exec::default()).grad)
}

/// Batch SSE in normalized target space.
pub fn batch_sse(model: &TskModel, data: &Dataset) -> Result<f64> {
    let prep = Prepared::for_model(model, data)?;
    Ok(prep
        .xn
        .iter()
        .zip(&prep.tn)
        .map(|(x, t)| {
            let e = model.forward_normalized(x).0 - t;
            e * e
        })
        .sum())
}

pub(crate) struct GradOut {
    pub grad: Vec<f64>,
    pub sse: f64,
    pub fallbacks: usize,
}

pub(crate) fn gradient_normalized(model: &TskModel, xn: &[Vec<f64>], tn: &[f64], exec: Exec) -> GradOut {
    let m = model.n_inputs();
    let offsets: Vec<usize> = model
        .mf_banks
        .iter()
        .scan(0, |acc, bank| {
            let o = *acc;
            *acc += bank.len();
            Some(o)
        })
        .collect();
    let n_params = 3 * model.n_mfs();
    let zero = || GradOut { grad: vec![0.0; n_params], sse: 0.0, fallbacks: 0 };
    par::chunked_reduce(
        exec,
        xn.len(),
        |range| {
            let mut out = zero();
            let mut w = vec![0.0; model.n_rules()];
            let mut f = vec![0.0; model.n_rules()];
            for k in range {
                let x = &xn[k];
                let grades = model.grades(x);
                let mut total = 0.0;
                for (i, rule) in model.rules.iter().enumerate() {
                    w[i] = rule.antecedent.iter().enumerate().map(|(j, &a)| grades[j][a]).product();
                    f[i] = rule.output(x);
                    total += w[i];
                }
                if total == 0.0 {
                    let (y, _) = model.forward_normalized(x);
                    out.sse += (y - tn[k]) * (y - tn[k]);
                    out.fallbacks += 1;
                    continue;
                }
                let y: f64 = w.iter().zip(&f).map(|(wi, fi)| wi * fi).sum::<f64>() / total;
                let e = y - tn[k];
                out.sse += e * e;
                // dSSE/dmu for every membership grade
                let mut dmu: Vec<Vec<f64>> = model.mf_banks.iter().map(|b| vec![0.0; b.len()]).collect();
                for (i, rule) in model.rules.iter().enumerate() {
                    let coef = 2.0 * e * (f[i] - y) / total;
                    for j in 0..m {
                        let others: f64 = (0..m)
                            .filter(|&l| l != j)
                            .map(|l| grades[l][rule.antecedent[l]])
                            .product();
                        dmu[j][rule.antecedent[j]] += coef * others;
                    }
                }
                for (j, bank) in model.mf_banks.iter().enumerate() {
                    for (q, lm) in bank.iter().enumerate() {
                        let d = dmu[j][q];
                        if d == 0.0 {
                            continue;
                        }
                        let g = lm.mf.grad(x[j]);
                        let p = 3 * (offsets[j] + q);
                        out.grad[p] += d * g.da;
                        out.grad[p + 1] += d * g.db;
                        out.grad[p + 2] += d * g.dc;
                    }
                }
            }
            out
        },
        |mut a, b| {
            a.grad.iter_mut().zip(b.grad).for_each(|(x, y)| *x += y);
            a.sse += b.sse;
            a.fallbacks += b.fallbacks;
            a
        },
    )
    .unwrap_or_else(zero)
}

/// Per-input width floors from the spread of the normalized rows.
fn floors(model: &TskModel, xn: &[Vec<f64>]) -> Vec<f64> {
    (0..model.n_inputs())
        .map(|j| {
            let (lo, hi) = xn
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x[j]), hi.max(x[j])));
            width_floor(if hi > lo { hi - lo } else { 0.0 })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepInfo {
    pub skipped_gradients: usize,
    pub fallback_rows: usize,
}

/// One batch gradient step of length `lr` on every premise parameter,
/// followed by the width floor and slope bounds.
pub fn premise_step(model: &mut TskModel, data: &Dataset, lr: f64) -> Result<StepInfo> {
    let prep = Prepared::for_model(model, data)?;
    let fl = floors(model, &prep.xn);
    let g = gradient_normalized(model, &prep.xn, &prep.tn, Exec::default());
    apply_premise_step(model, g, lr, &fl)
}

fn apply_premise_step(model: &mut TskModel, g: GradOut, lr: f64, floors: &[f64]) -> Result<StepInfo> {
    let mut grad = g.grad;
    let mut params = model.premise_params();
    let skipped = normalized_step(&mut params, &mut grad, lr);
    if skipped > 0 {
        log::debug!("dropped {skipped} non-finite premise gradient components");
    }
    let mut p = 0;
    for (j, bank) in model.mf_banks.iter().enumerate() {
        for _ in bank {
            params[p] = params[p].max(floors[j]);
            params[p + 1] = params[p + 1].clamp(SLOPE_BOUNDS.0, SLOPE_BOUNDS.1);
            p += 3;
        }
    }
    model.set_premise_params(&params)?;
    Ok(StepInfo {
        skipped_gradients: skipped,
        fallback_rows: g.fallbacks,
    })
}

fn predictions(model: &TskModel, xn: &[Vec<f64>], exec: Exec) -> Vec<f64> {
    par::map(exec, xn.len(), |k| model.target_norm.invert(model.forward_normalized(&xn[k]).0))
}

/// Runs the hybrid loop and returns the snapshot with the lowest test RMSE.
/// Each epoch solves for the consequents, records train and test RMSE in
/// raw target units, then takes one premise step.
pub fn train(
    mut model: TskModel,
    train_set: &Dataset,
    test_set: &Dataset,
    config: &TrainConfig,
) -> Result<(TskModel, TrainReport)> {
    config.validate()?;
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::ParameterDomain("training needs non-empty train and test sets".into()));
    }
    let train_p = Prepared::for_model(&model, train_set)?;
    let test_p = Prepared::for_model(&model, test_set)?;
    let fl = floors(&model, &train_p.xn);
    let mut step = StepSize::new(config.lr, config.adapt_lr);
    let mut history = Vec::with_capacity(config.epochs);
    let mut diagnostics = Diagnostics::default();
    let mut best: Option<(f64, usize, TskModel)> = None;

    for epoch in 1..=config.epochs {
        let info = lse_normalized(&mut model, &train_p.xn, &train_p.tn, config.exec)?;
        if info.ridge.is_some() {
            diagnostics.ridge_solves += 1;
        }
        let train_rmse = rmse(&predictions(&model, &train_p.xn, config.exec), &train_p.raw_t)?;
        let test_rmse = rmse(&predictions(&model, &test_p.xn, config.exec), &test_p.raw_t)?;
        if !train_rmse.is_finite() {
            return Err(Error::Numeric(format!("training error became non-finite at epoch {epoch}")));
        }
        history.push(EpochRecord { epoch, train_rmse, test_rmse, lr: step.lr });
        log::debug!("epoch {epoch}: train rmse {train_rmse:.6}, test rmse {test_rmse:.6}, step {:.4e}", step.lr);
        if best.as_ref().is_none_or(|(b, _, _)| test_rmse < *b) {
            best = Some((test_rmse, epoch, model.clone()));
        }
        if let (Some(p), Some((_, at, _))) = (config.patience, &best) {
            if epoch - at >= p {
                log::info!("no test improvement for {p} epochs; stopping at epoch {epoch}");
                break;
            }
        }
        if epoch == config.epochs {
            break;
        }
        let g = gradient_normalized(&model, &train_p.xn, &train_p.tn, config.exec);
        step.observe(g.sse);
        let info = apply_premise_step(&mut model, g, step.lr, &fl)?;
        diagnostics.skipped_gradients += info.skipped_gradients;
        diagnostics.fallback_rows += info.fallback_rows;
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

/// A trained model together with the split it was trained on.
#[derive(Debug, Clone)]
pub struct Fitted<M> {
    pub model: M,
    pub report: TrainReport,
    pub train: Dataset,
    pub test: Dataset,
}

/// Splits `data`, builds the initial structure on the training part and
/// trains it.
pub fn fit(data: &Dataset, structure: &Structure, config: &TrainConfig) -> Result<Fitted<TskModel>> {
    config.validate()?;
    let (train_set, test_set) = random_split(data, config.split_fraction, config.seed)?;
    let initial = build(&train_set, structure, config.rule_cap)?;
    log::info!(
        "initial model: {} rules, {} membership functions",
        initial.n_rules(),
        initial.n_mfs()
    );
    let (model, report) = train(initial, &train_set, &test_set, config)?;
    Ok(Fitted { model, report, train: train_set, test: test_set })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::build_grid;
    use crate::fuzzy::model::tests::random_model;
    use crate::fuzzy::{BellMf, TskRule};
    use crate::pipeline::{MinMaxSpec, ZScoreSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(rng: &mut impl Rng, m: usize, n: usize) -> Dataset {
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let y = x.iter().map(|r| r.iter().map(|v| v.sin()).sum::<f64>() + rng.random_range(0.0..0.1)).collect();
        Dataset::from_rows((0..m).map(|j| format!("x{j}")).collect(), x, y).unwrap()
    }

    #[test]
    fn single_rule_recovers_a_line() {
        let mf = BellMf::new(1.0, 2.0, 0.0).unwrap();
        let mut model = TskModel::new(
            vec!["x".into()],
            vec![vec![crate::fuzzy::LabeledMf::new("only", mf)]],
            vec![TskRule { antecedent: vec![0], consequent: vec![0.0, 0.0] }],
            ZScoreSpec { mean: vec![0.0], std: vec![1.0] },
            MinMaxSpec::new(0.0, 1.0, 0.0, 1.0).unwrap(),
        )
        .unwrap();
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0 - 0.5).collect();
        let data = Dataset::from_rows(
            vec!["x".into()],
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|x| 2.0 * x + 1.0).collect(),
        )
        .unwrap();
        let info = lse_consequents(&mut model, &data).unwrap();
        assert!(info.ridge.is_none());
        let c = &model.rules[0].consequent;
        assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] - 1.0).abs() < 1e-9, "{c:?}");
    }

    #[test]
    fn lse_beats_zero_consequents() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let mut model = random_model(&mut rng, 2, 2);
            let data = random_data(&mut rng, 2, 40);
            model.set_consequents(&vec![0.0; model.n_consequents()]).unwrap();
            let zero = batch_sse(&model, &data).unwrap();
            lse_consequents(&mut model, &data).unwrap();
            assert!(batch_sse(&model, &data).unwrap() <= zero);
        }
    }

    #[test]
    fn underdetermined_lse_uses_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut model = random_model(&mut rng, 2, 3);
        let data = random_data(&mut rng, 2, 5);
        let info = lse_consequents(&mut model, &data).unwrap();
        assert!(info.ridge.is_some());
        assert!(model.consequents_stacked().iter().all(|v| v.is_finite()));
    }

    fn finite_difference(model: &TskModel, data: &Dataset, p: usize, h: f64) -> f64 {
        let base = model.premise_params();
        let eval = |delta: f64| {
            let mut m = model.clone();
            let mut q = base.clone();
            q[p] += delta;
            m.set_premise_params(&q).unwrap();
            batch_sse(&m, data).unwrap()
        };
        (eval(h) - eval(-h)) / (2.0 * h)
    }

    #[test]
    fn premise_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..4 {
            let model = random_model(&mut rng, 2, 2);
            let data = random_data(&mut rng, 2, 15);
            let grad = premise_gradient(&model, &data).unwrap();
            for (p, g) in grad.iter().enumerate() {
                let fd = finite_difference(&model, &data, p, 1e-6);
                let scale = g.abs().max(fd.abs()).max(1e-6);
                assert!((g - fd).abs() / scale < 1e-3, "param {p}: {g} vs {fd}");
            }
        }
    }

    #[test]
    fn zero_step_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut model = random_model(&mut rng, 2, 2);
        let data = random_data(&mut rng, 2, 20);
        let before = model.clone();
        premise_step(&mut model, &data, 0.0).unwrap();
        assert_eq!(model, before);
        premise_step(&mut model, &data, 0.05).unwrap();
        assert_ne!(model, before);
        assert!(model.mf_banks.iter().flatten().all(|l| (0.1..=10.0).contains(&l.mf.b)));
    }

    #[test]
    fn step_size_heuristic() {
        let mut s = StepSize::new(1.0, true);
        for e in [10.0, 9.0, 8.0] {
            s.observe(e);
        }
        assert!((s.lr - 1.1).abs() < 1e-15);
        s.observe(8.5);
        assert!((s.lr - 0.55).abs() < 1e-15);
    }

    #[test]
    fn one_epoch_is_pure_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = random_data(&mut rng, 2, 60);
        let (tr, te) = random_split(&data, 0.7, 1).unwrap();
        let initial = build_grid(&tr, 2, DEFAULT_RULE_CAP).unwrap();
        let mut expected = initial.clone();
        lse_consequents(&mut expected, &tr).unwrap();
        let config = TrainConfig { epochs: 1, lr: 0.0, ..Default::default() };
        let (model, report) = train(initial, &tr, &te, &config).unwrap();
        assert_eq!(model, expected);
        assert_eq!(report.history.len(), 1);
        assert_eq!(report.best_epoch, 1);
    }

    #[test]
    fn best_snapshot_reproduces_its_test_rmse() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let data = random_data(&mut rng, 2, 120);
        let config = TrainConfig { epochs: 15, lr: 0.05, ..Default::default() };
        let fitted = fit(&data, &Structure::grid(3), &config).unwrap();
        let best = fitted.report.best().unwrap();
        assert!(fitted.report.history.iter().all(|r| best.test_rmse <= r.test_rmse));
        let reloaded = TskModel::from_json(&fitted.model.to_json().unwrap()).unwrap();
        let again = reloaded.evaluate(&fitted.test).unwrap();
        assert_eq!(again.rmse.to_bits(), best.test_rmse.to_bits());
        assert_eq!(fitted.report.test_metrics, again);
    }

    #[test]
    fn training_is_deterministic_across_exec_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let data = random_data(&mut rng, 3, 700);
        let run = |exec| {
            let config = TrainConfig { epochs: 4, exec, ..Default::default() };
            fit(&data, &Structure::subtractive(0.3), &config).unwrap()
        };
        let (a, b) = (run(Exec::Sequential), run(Exec::Parallel));
        assert_eq!(a.model, b.model);
        assert_eq!(a.report, b.report);
    }

    #[test]
    fn zero_epochs_returns_initial_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let data = random_data(&mut rng, 1, 30);
        let (tr, te) = random_split(&data, 0.7, 0).unwrap();
        let initial = build_grid(&tr, 3, DEFAULT_RULE_CAP).unwrap();
        let config = TrainConfig { epochs: 0, ..Default::default() };
        let (model, report) = train(initial.clone(), &tr, &te, &config).unwrap();
        assert_eq!(model, initial);
        assert_eq!(report.best_epoch, 0);
        assert!(report.history.is_empty());
    }
}
