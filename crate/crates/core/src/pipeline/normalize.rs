//! Z-score scaling for predictors and min-max scaling for the target.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-attribute mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreSpec {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ZScoreSpec {
    /// Fits one (mean, std) pair per column of `rows`. Constant columns get a
    /// floored std of `1e-12 * max(|mean|, 1)` and a warning.
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::ParameterDomain("cannot fit z-score on zero rows".into()))?;
        let dim = first.as_ref().len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::dim(dim, row.len(), "z-score fit row"));
            }
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(row.as_ref()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .iter()
            .zip(&mean)
            .enumerate()
            .map(|(j, (s, m))| {
                let sd = (s / n).sqrt();
                let floor = 1e-12 * m.abs().max(1.0);
                if sd < floor {
                    log::warn!("attribute {j} is constant on the fit set; std floored to {floor:e}");
                    floor
                } else {
                    sd
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, v), (m, s)) in out.iter_mut().zip(x).zip(self.mean.iter().zip(&self.std)) {
            *o = (v - m) / s;
        }
    }

    pub fn invert(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| v * s + m)
            .collect()
    }
}

/// Affine map of `[min, max]` onto `[new_min, new_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxSpec {
    pub min: f64,
    pub max: f64,
    pub new_min: f64,
    pub new_max: f64,
}

impl MinMaxSpec {
    pub fn new(min: f64, max: f64, new_min: f64, new_max: f64) -> Result<Self> {
        let spec = Self {
            min,
            max,
            new_min,
            new_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Fits onto the default `[0, 1]` interval.
    pub fn fit(values: &[f64]) -> Result<Self> {
        Self::fit_to(values, 0.0, 1.0)
    }

    pub fn fit_to(values: &[f64], new_min: f64, new_max: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ParameterDomain("cannot fit min-max on zero values".into()));
        }
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if max <= min {
            return Err(Error::ParameterDomain(format!(
                "min-max scaling needs a varying column, all values equal {min}"
            )));
        }
        Self::new(min, max, new_min, new_max)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.min, self.max, self.new_min, self.new_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.max <= self.min || self.new_max <= self.new_min {
            return Err(Error::ParameterDomain(format!(
                "invalid min-max spec {self:?}"
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: f64) -> f64 {
        if x == self.min {
            return self.new_min;
        }
        if x == self.max {
            return self.new_max;
        }
        (x - self.min) / (self.max - self.min) * (self.new_max - self.new_min) + self.new_min
    }

    pub fn invert(&self, y: f64) -> f64 {
        if y == self.new_min {
            return self.min;
        }
        if y == self.new_max {
            return self.max;
        }
        (y - self.new_min) / (self.new_max - self.new_min) * (self.max - self.min) + self.min
    }

    /// Derivative of `invert`, used to convert errors between spaces.
    pub fn invert_scale(&self) -> f64 {
        (self.max - self.min) / (self.new_max - self.new_min)
    }
}
