//! Initial rule bases: grid partition, or one rule per cluster.
//!
//! Membership functions are placed in the z-scored input space the model
//! works in. Clustering runs on joint `(inputs, target)` vectors min-max
//! scaled to `[0, 1]` per dimension, so a neighborhood radius is a fraction
//! of each attribute's range.

use crate::cluster::{fcm, fcm_from, subtractive, ClusterResult, FcmParams, SubtractiveParams};
use crate::error::{Error, Result};
use crate::fuzzy::{BellMf, LabeledMf, TskModel, TskRule};
use crate::pipeline::{Dataset, MinMaxSpec, ZScoreSpec};

pub const DEFAULT_RULE_CAP: usize = 10_000;

/// Slope exponent given to every freshly built membership function.
const INITIAL_SLOPE: f64 = 2.0;

/// Smallest allowed width for an input whose (z-scored) range is `range`.
pub fn width_floor(range: f64) -> f64 {
    1e-6 * range.max(1.0)
}

/// How to lay out the initial rule base.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    /// `p` membership functions per input and every combination as a rule.
    Grid { p: usize },
    /// Subtractive clustering centers with neighborhood radius `radius`.
    Subtractive(SubtractiveParams),
    /// Fuzzy c-means. With `clusters` unset the cluster count and starting
    /// centers come from subtractive clustering; otherwise centers are seeded
    /// by farthest-point selection.
    Fcm {
        subtractive: SubtractiveParams,
        clusters: Option<usize>,
        fcm: FcmParams,
    },
}

impl Structure {
    pub fn grid(p: usize) -> Self {
        Self::Grid { p }
    }

    pub fn subtractive(radius: f64) -> Self {
        Self::Subtractive(SubtractiveParams::with_radius(radius))
    }

    pub fn fcm(radius: f64, clusters: Option<usize>, seed: u64) -> Self {
        Self::Fcm {
            subtractive: SubtractiveParams::with_radius(radius),
            clusters,
            fcm: FcmParams {
                seed,
                ..FcmParams::default()
            },
        }
    }
}

/// Builds the initial model for `data` under `structure`.
pub fn build(data: &Dataset, structure: &Structure, rule_cap: usize) -> Result<TskModel> {
    match structure {
        Structure::Grid { p } => build_grid(data, *p, rule_cap),
        Structure::Subtractive(params) => {
            let scaler = JointScaler::fit(data)?;
            let result = subtractive(&scaler.points(data), params)?;
            log::info!("subtractive clustering found {} centers", result.centers.len());
            check_cap(result.centers.len(), rule_cap)?;
            build_from_clusters(data, &result.centers, params.radius)
        }
        Structure::Fcm {
            subtractive: sub,
            clusters,
            fcm: params,
        } => {
            let scaler = JointScaler::fit(data)?;
            let points = scaler.points(data);
            let result: ClusterResult = match clusters {
                Some(c) => fcm(&points, &FcmParams { clusters: *c, ..*params })?,
                None => {
                    let seeds = subtractive(&points, sub)?.centers;
                    fcm_from(&points, seeds, params)?
                }
            };
            log::info!(
                "fuzzy c-means settled on {} centers after {} iterations",
                result.centers.len(),
                result.iterations
            );
            check_cap(result.centers.len(), rule_cap)?;
            build_from_clusters(data, &result.centers, sub.radius)
        }
    }
}

fn check_cap(rules: usize, cap: usize) -> Result<()> {
    if rules > cap {
        return Err(Error::RuleExplosion { rules, cap });
    }
    Ok(())
}

fn fit_norms(data: &Dataset) -> Result<(ZScoreSpec, MinMaxSpec)> {
    if data.is_empty() {
        return Err(Error::ParameterDomain("cannot build a model from an empty dataset".into()));
    }
    if data.dim() == 0 {
        return Err(Error::ParameterDomain("dataset has no predictor attributes".into()));
    }
    Ok((ZScoreSpec::fit(&data.predictors())?, MinMaxSpec::fit(&data.targets())?))
}

/// Per-input `(min, max)` of z-scored predictors.
fn z_ranges(data: &Dataset, norm: &ZScoreSpec) -> Vec<(f64, f64)> {
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); data.dim()];
    for s in &data.samples {
        for ((lo, hi), z) in ranges.iter_mut().zip(norm.apply(&s.predictors)) {
            *lo = lo.min(z);
            *hi = hi.max(z);
        }
    }
    ranges
}

fn grid_label(k: usize, p: usize) -> String {
    match (p, k) {
        (2, 0) | (3, 0) => "low".into(),
        (3, 1) => "medium".into(),
        (2, 1) | (3, 2) => "high".into(),
        _ => format!("mf{k}"),
    }
}

/// Grid partition: `p` evenly spaced bell functions per input crossing at
/// 0.5, and the full cross product of them as rules with zero consequents.
/// An input that never varies gets a single function.
pub fn build_grid(data: &Dataset, p: usize, rule_cap: usize) -> Result<TskModel> {
    if p < 2 {
        return Err(Error::ParameterDomain(format!(
            "grid partition needs at least 2 membership functions per input, got {p}"
        )));
    }
    let (input_norm, target_norm) = fit_norms(data)?;
    let ranges = z_ranges(data, &input_norm);
    let banks: Vec<Vec<LabeledMf>> = ranges
        .iter()
        .map(|&(lo, hi)| {
            let range = hi - lo;
            if range <= 0.0 {
                let mf = BellMf::new(width_floor(range), INITIAL_SLOPE, lo)?;
                return Ok(vec![LabeledMf::new("constant", mf)]);
            }
            let a = (range / (2.0 * (p - 1) as f64)).max(width_floor(range));
            (0..p)
                .map(|k| {
                    let c = if k == p - 1 { hi } else { lo + range * k as f64 / (p - 1) as f64 };
                    Ok(LabeledMf::new(grid_label(k, p), BellMf::new(a, INITIAL_SLOPE, c)?))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let sizes: Vec<usize> = banks.iter().map(Vec::len).collect();
    let n_rules = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .unwrap_or(usize::MAX);
    if n_rules > rule_cap {
        return Err(Error::RuleExplosion { rules: n_rules, cap: rule_cap });
    }
    let m = sizes.len();
    let mut rules = Vec::with_capacity(n_rules);
    let mut antecedent = vec![0usize; m];
    for _ in 0..n_rules {
        rules.push(TskRule {
            antecedent: antecedent.clone(),
            consequent: vec![0.0; m + 1],
        });
        // odometer with the last input turning fastest
        for j in (0..m).rev() {
            antecedent[j] += 1;
            if antecedent[j] < sizes[j] {
                break;
            }
            antecedent[j] = 0;
        }
    }
    TskModel::new(data.attribute_names.clone(), banks, rules, input_norm, target_norm)
}

/// Min-max scaling of joint `(predictors, target)` vectors onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl JointScaler {
    /// Fits on `data`; the last dimension is the target.
    pub fn fit(data: &Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::ParameterDomain("cannot scale an empty dataset".into()));
        }
        let d = data.dim() + 1;
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for s in &data.samples {
            for (j, v) in s.predictors.iter().chain(std::iter::once(&s.target)).enumerate() {
                min[j] = min[j].min(*v);
                max[j] = max[j].max(*v);
            }
        }
        Ok(Self { min, max })
    }

    /// Scales one value of dimension `j`; a constant dimension maps to 0.
    pub fn scale(&self, j: usize, v: f64) -> f64 {
        let range = self.max[j] - self.min[j];
        if range > 0.0 {
            (v - self.min[j]) / range
        } else {
            0.0
        }
    }

    pub fn unscale(&self, j: usize, u: f64) -> f64 {
        self.min[j] + u * (self.max[j] - self.min[j])
    }

    pub fn points(&self, data: &Dataset) -> Vec<Vec<f64>> {
        data.samples
            .iter()
            .map(|s| {
                s.predictors
                    .iter()
                    .chain(std::iter::once(&s.target))
                    .enumerate()
                    .map(|(j, &v)| self.scale(j, v))
                    .collect()
            })
            .collect()
    }
}

/// One rule per cluster center. `centers` live in the joint unit-scaled
/// space of [`JointScaler`] fitted on `data` (inputs first, target last).
/// Each input gets a bell function per rule centered on the cluster
/// coordinate, of half-width `radius * range / sqrt(8)`; the rule's constant
/// term starts at the cluster's target coordinate.
pub fn build_from_clusters(data: &Dataset, centers: &[Vec<f64>], radius: f64) -> Result<TskModel> {
    if centers.is_empty() {
        return Err(Error::ParameterDomain("need at least one cluster center".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::ParameterDomain(format!("cluster radius must be positive, got {radius}")));
    }
    let (input_norm, target_norm) = fit_norms(data)?;
    let m = data.dim();
    if let Some(bad) = centers.iter().find(|c| c.len() != m + 1) {
        return Err(Error::ParameterDomain(format!(
            "cluster centers need {} coordinates (inputs plus target), got {}",
            m + 1,
            bad.len()
        )));
    }
    let scaler = JointScaler::fit(data)?;
    let mut banks = Vec::with_capacity(m);
    for j in 0..m {
        let z_range = (scaler.max[j] - scaler.min[j]) / input_norm.std[j];
        let a = (radius * z_range / 8f64.sqrt()).max(width_floor(z_range));
        let bank = centers
            .iter()
            .enumerate()
            .map(|(i, center)| {
                let raw = scaler.unscale(j, center[j]);
                let c = (raw - input_norm.mean[j]) / input_norm.std[j];
                Ok(LabeledMf::new(format!("c{i}"), BellMf::new(a, INITIAL_SLOPE, c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        banks.push(bank);
    }
    let rules = centers
        .iter()
        .enumerate()
        .map(|(i, center)| {
            let mut consequent = vec![0.0; m + 1];
            consequent[m] = center[m];
            TskRule {
                antecedent: vec![i; m],
                consequent,
            }
        })
        .collect();
    TskModel::new(data.attribute_names.clone(), banks, rules, input_norm, target_norm)
}
