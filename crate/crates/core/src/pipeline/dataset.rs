//! Aligned predictor/target rows and their CSV form.
//!
//! A dataset CSV has a header. `sand_fraction` is the target and is required;
//! `well_id` and `time_ms` are optional provenance tags; every other column is
//! a predictor attribute, kept in file order.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TARGET_COLUMN: &str = "sand_fraction";
pub const WELL_COLUMN: &str = "well_id";
pub const TIME_COLUMN: &str = "time_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub predictors: Vec<f64>,
    pub target: f64,
    pub well_id: Option<String>,
    pub time_ms: Option<f64>,
}

impl Sample {
    pub fn new(predictors: Vec<f64>, target: f64) -> Self {
        Self {
            predictors,
            target,
            well_id: None,
            time_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub attribute_names: Vec<String>,
    pub samples: Vec<Sample>,
}

impl Dataset {
    /// Builds a dataset, checking shared dimensionality and finiteness.
    pub fn new(attribute_names: Vec<String>, samples: Vec<Sample>) -> Result<Self> {
        let dim = attribute_names.len();
        for (i, s) in samples.iter().enumerate() {
            if s.predictors.len() != dim {
                return Err(Error::dim(dim, s.predictors.len(), format!("sample {i}")));
            }
            if s.predictors.iter().any(|v| !v.is_finite()) || !s.target.is_finite() {
                return Err(Error::Parse(format!("sample {i} has a non-finite value")));
            }
            if s.time_ms.is_some_and(|t| !t.is_finite()) {
                return Err(Error::Parse(format!("sample {i} has a non-finite time")));
            }
        }
        let unique: BTreeSet<&String> = attribute_names.iter().collect();
        if unique.len() != dim {
            return Err(Error::Parse("duplicate attribute names".into()));
        }
        Ok(Self {
            attribute_names,
            samples,
        })
    }

    /// Builds an untagged dataset from parallel predictor rows and targets.
    pub fn from_rows(attribute_names: Vec<String>, x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::dim(x.len(), y.len(), "targets vs predictor rows"));
        }
        let samples = x
            .into_iter()
            .zip(y)
            .map(|(p, t)| Sample::new(p, t))
            .collect();
        Self::new(attribute_names, samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn predictors(&self) -> Vec<&[f64]> {
        self.samples.iter().map(|s| s.predictors.as_slice()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.target).collect()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attribute_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Keeps only `names`, in the given order.
    pub fn select(&self, names: &[impl AsRef<str>]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.attribute_index(n.as_ref()))
            .collect::<Result<_>>()?;
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                predictors: idx.iter().map(|&j| s.predictors[j]).collect(),
                ..s.clone()
            })
            .collect();
        Self::new(names.iter().map(|n| n.as_ref().to_string()).collect(), samples)
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            attribute_names: self.attribute_names.clone(),
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    /// Distinct well ids in first-appearance order.
    pub fn well_ids(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.samples
            .iter()
            .filter_map(|s| s.well_id.clone())
            .filter(|w| seen.insert(w.clone()))
            .collect()
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let target_col = headers
            .iter()
            .position(|h| h == TARGET_COLUMN)
            .ok_or_else(|| Error::Parse(format!("missing `{TARGET_COLUMN}` column")))?;
        let well_col = headers.iter().position(|h| h == WELL_COLUMN);
        let time_col = headers.iter().position(|h| h == TIME_COLUMN);
        let attr_cols: Vec<usize> = (0..headers.len())
            .filter(|&j| j != target_col && Some(j) != well_col && Some(j) != time_col)
            .collect();
        let names = attr_cols.iter().map(|&j| headers[j].clone()).collect();

        let mut samples = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let num = |j: usize| -> Result<f64> {
                let raw = rec.get(j).unwrap_or("");
                raw.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "row {}: column `{}` is not a number: `{raw}`",
                        line + 2,
                        headers[j]
                    ))
                })
            };
            samples.push(Sample {
                predictors: attr_cols.iter().map(|&j| num(j)).collect::<Result<_>>()?,
                target: num(target_col)?,
                well_id: well_col.map(|j| rec.get(j).unwrap_or("").to_string()),
                time_ms: time_col.map(num).transpose()?,
            });
        }
        Self::new(names, samples)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.to_writer(std::io::BufWriter::new(file))
    }

    /// Writes `well_id,time_ms,<attributes>,sand_fraction`; the tag columns
    /// are emitted only when at least one sample carries them.
    pub fn to_writer(&self, writer: impl Write) -> Result<()> {
        let has_well = self.samples.iter().any(|s| s.well_id.is_some());
        let has_time = self.samples.iter().any(|s| s.time_ms.is_some());
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = Vec::new();
        if has_well {
            header.push(WELL_COLUMN);
        }
        if has_time {
            header.push(TIME_COLUMN);
        }
        header.extend(self.attribute_names.iter().map(String::as_str));
        header.push(TARGET_COLUMN);
        w.write_record(&header)?;
        for s in &self.samples {
            let mut rec: Vec<String> = Vec::with_capacity(header.len());
            if has_well {
                rec.push(s.well_id.clone().unwrap_or_default());
            }
            if has_time {
                rec.push(s.time_ms.map(|t| t.to_string()).unwrap_or_default());
            }
            rec.extend(s.predictors.iter().map(f64::to_string));
            rec.push(s.target.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<dataset writer>", e))?;
        Ok(())
    }
}
