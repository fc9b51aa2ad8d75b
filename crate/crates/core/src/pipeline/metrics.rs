//! CC, RMSE, AEM and SI between modeled (`x`) and observed (`y`) values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub cc: f64,
    pub rmse: f64,
    pub aem: f64,
    pub si: f64,
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::dim(y.len(), x.len(), "modeled vs observed"));
    }
    if x.is_empty() {
        return Err(Error::ParameterDomain("metrics need at least one pair".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson correlation coefficient.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        let which = if sxx == 0.0 { "modeled" } else { "observed" };
        return Err(Error::Undefined {
            metric: "CC",
            reason: format!("{which} values have zero variance"),
        });
    }
    // equal spreads share one root so identical series give exactly 1
    let denom = if sxx == syy { sxx } else { sxx.sqrt() * syy.sqrt() };
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

pub fn rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / x.len() as f64).sqrt())
}

pub fn aem(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64)
}

/// RMSE divided by the observed mean.
pub fn scatter_index(x: &[f64], y: &[f64]) -> Result<f64> {
    let r = rmse(x, y)?;
    let my = mean(y);
    if my == 0.0 {
        return Err(Error::Undefined {
            metric: "SI",
            reason: "observed mean is zero".into(),
        });
    }
    Ok(r / my)
}

impl Metrics {
    /// All four metrics; fails if any is undefined.
    pub fn compute(x: &[f64], y: &[f64]) -> Result<Self> {
        Ok(Self {
            cc: correlation(x, y)?,
            rmse: rmse(x, y)?,
            aem: aem(x, y)?,
            si: scatter_index(x, y)?,
        })
    }

    /// Like [`Metrics::compute`] but reports undefined CC or SI as NaN.
    pub fn lenient(x: &[f64], y: &[f64]) -> Result<Self> {
        let undefined_as_nan = |r: Result<f64>| match r {
            Ok(v) => Ok(v),
            Err(Error::Undefined { .. }) => Ok(f64::NAN),
            Err(e) => Err(e),
        };
        Ok(Self {
            cc: undefined_as_nan(correlation(x, y))?,
            rmse: rmse(x, y)?,
            aem: aem(x, y)?,
            si: undefined_as_nan(scatter_index(x, y))?,
        })
    }
}
