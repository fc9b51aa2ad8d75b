//! Well logs in two-way time and their integration with seismic traces.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use super::dataset::{Dataset, Sample, TIME_COLUMN, WELL_COLUMN};
use super::spline::CubicSpline;
use crate::error::{Error, Result};
use crate::volume::SeismicCube;

/// One well's log samples.
#[derive(Debug, Clone, PartialEq)]
pub struct WellSeries {
    pub well_id: String,
    /// Strictly increasing sample times, ms.
    pub time_ms: Vec<f64>,
    /// Extra log columns carried along as candidate attributes.
    pub attributes: Vec<(String, Vec<f64>)>,
    pub sand_fraction: Vec<f64>,
}

impl WellSeries {
    pub fn validate(&self) -> Result<()> {
        let n = self.time_ms.len();
        if self.sand_fraction.len() != n || self.attributes.iter().any(|(_, v)| v.len() != n) {
            return Err(Error::Parse(format!(
                "well {}: log columns have unequal lengths",
                self.well_id
            )));
        }
        if self.time_ms.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse(format!(
                "well {}: times must be strictly increasing",
                self.well_id
            )));
        }
        if let Some(bad) = self
            .sand_fraction
            .iter()
            .find(|s| !(0.0..=1.0).contains(*s))
        {
            return Err(Error::Parse(format!(
                "well {}: sand fraction {bad} outside [0, 1]",
                self.well_id
            )));
        }
        Ok(())
    }

    /// Reads a log CSV with at least `well_id,time_ms,sand_fraction`. Rows are
    /// grouped by well in first-appearance order; any other column is kept.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<Self>> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_reader(reader: impl Read) -> Result<Vec<Self>> {
        let ds = Dataset::from_reader(reader)?;
        if ds.samples.iter().any(|s| s.well_id.is_none() || s.time_ms.is_none()) {
            return Err(Error::Parse(format!(
                "well logs need `{WELL_COLUMN}` and `{TIME_COLUMN}` columns"
            )));
        }
        let mut order: Vec<String> = Vec::new();
        let mut groups: BTreeMap<String, Vec<&Sample>> = BTreeMap::new();
        for s in &ds.samples {
            let id = s.well_id.clone().unwrap_or_default();
            if !groups.contains_key(&id) {
                order.push(id.clone());
            }
            groups.entry(id).or_default().push(s);
        }
        order
            .into_iter()
            .map(|id| {
                let rows = &groups[&id];
                let well = WellSeries {
                    time_ms: rows.iter().filter_map(|s| s.time_ms).collect(),
                    attributes: ds
                        .attribute_names
                        .iter()
                        .enumerate()
                        .map(|(j, name)| (name.clone(), rows.iter().map(|s| s.predictors[j]).collect()))
                        .collect(),
                    sand_fraction: rows.iter().map(|s| s.target).collect(),
                    well_id: id,
                };
                well.validate()?;
                Ok(well)
            })
            .collect()
    }
}

/// A well's trace position in the survey grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellLocation {
    pub well_id: String,
    pub inline: usize,
    pub crossline: usize,
}

pub fn read_locations(path: impl AsRef<Path>) -> Result<Vec<WellLocation>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    locations_from_reader(file)
}

/// Parses `well_id,inline,crossline`.
pub fn locations_from_reader(reader: impl Read) -> Result<Vec<WellLocation>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("locations file is missing `{name}`")))
    };
    let (w, il, xl) = (col(WELL_COLUMN)?, col("inline")?, col("crossline")?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let idx = |j: usize| {
            let raw = rec.get(j).unwrap_or("");
            raw.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad trace index `{raw}` in locations")))
        };
        out.push(WellLocation {
            well_id: rec.get(w).unwrap_or("").to_string(),
            inline: idx(il)?,
            crossline: idx(xl)?,
        });
    }
    Ok(out)
}

pub fn write_locations(path: impl AsRef<Path>, locations: &[WellLocation]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([WELL_COLUMN, "inline", "crossline"])?;
    for l in locations {
        w.write_record([l.well_id.clone(), l.inline.to_string(), l.crossline.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrepSummary {
    pub wells: usize,
    pub rows_kept: usize,
    /// Rows whose time fell outside the seismic trace span.
    pub rows_dropped: usize,
}

/// Extracts each well's seismic trace, resamples every attribute to the log
/// times with a not-a-knot spline, and merges them into one dataset with
/// columns `well_id,time_ms,<cube attributes>,<extra log columns>,sand_fraction`.
pub fn integrate_wells(
    wells: &[WellSeries],
    cube: &SeismicCube,
    locations: &[WellLocation],
) -> Result<(Dataset, PrepSummary)> {
    let g = cube.geometry;
    let knots = g.times();
    let (lo, hi) = (knots[0], knots[knots.len() - 1]);
    let extra_names: Vec<String> = wells
        .first()
        .map(|w| w.attributes.iter().map(|(n, _)| n.clone()).collect())
        .unwrap_or_default();
    let mut names = cube.names();
    for e in &extra_names {
        if names.contains(e) {
            return Err(Error::Config(format!(
                "log column `{e}` collides with a cube attribute"
            )));
        }
    }
    names.extend(extra_names.iter().cloned());

    let mut summary = PrepSummary::default();
    let mut samples = Vec::new();
    for well in wells {
        let loc = locations
            .iter()
            .find(|l| l.well_id == well.well_id)
            .ok_or_else(|| Error::Config(format!("no location given for well {}", well.well_id)))?;
        if loc.inline >= g.n_inline || loc.crossline >= g.n_crossline {
            return Err(Error::Config(format!(
                "well {} at ({}, {}) lies outside the {}x{} survey",
                well.well_id, loc.inline, loc.crossline, g.n_inline, g.n_crossline
            )));
        }
        let keep: Vec<usize> = (0..well.time_ms.len())
            .filter(|&i| (lo..=hi).contains(&well.time_ms[i]))
            .collect();
        summary.rows_dropped += well.time_ms.len() - keep.len();
        let query: Vec<f64> = keep.iter().map(|&i| well.time_ms[i]).collect();
        let mut columns = Vec::with_capacity(cube.attributes.len());
        for attr in &cube.attributes {
            let trace = attr.trace(loc.inline, loc.crossline);
            if trace.iter().any(|v| v.is_nan()) {
                return Err(Error::Parse(format!(
                    "attribute `{}` has null samples on the trace of well {}",
                    attr.name, well.well_id
                )));
            }
            columns.push(CubicSpline::new(&knots, &trace)?.eval_many(&query)?);
        }
        for (row, &i) in keep.iter().enumerate() {
            let mut predictors: Vec<f64> = columns.iter().map(|c| c[row]).collect();
            predictors.extend(well.attributes.iter().map(|(_, v)| v[i]));
            samples.push(Sample {
                predictors,
                target: well.sand_fraction[i],
                well_id: Some(well.well_id.clone()),
                time_ms: Some(well.time_ms[i]),
            });
        }
        summary.wells += 1;
        summary.rows_kept += keep.len();
    }
    Ok((Dataset::new(names, samples)?, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{CubeFile, Geometry};

    fn cube() -> SeismicCube {
        let g = Geometry::new(2, 2, 6, 100.0, 2.0).unwrap();
        let v: Vec<f32> = (0..24).map(|i| ((i * 7) % 11) as f32 + 0.25).collect();
        SeismicCube::new(vec![CubeFile::new(g, "impedance", v).unwrap()]).unwrap()
    }

    #[test]
    fn knot_times_reproduce_trace_values() {
        let c = cube();
        let well = WellSeries {
            well_id: "W".into(),
            time_ms: c.geometry.times(),
            attributes: vec![],
            sand_fraction: vec![0.5; 6],
        };
        let loc = WellLocation {
            well_id: "W".into(),
            inline: 1,
            crossline: 1,
        };
        let (ds, summary) = integrate_wells(&[well], &c, &[loc]).unwrap();
        assert_eq!(summary.rows_dropped, 0);
        let got: Vec<f64> = ds.samples.iter().map(|s| s.predictors[0]).collect();
        assert_eq!(got, c.attributes[0].trace(1, 1));
    }

    #[test]
    fn out_of_span_rows_are_dropped() {
        let c = cube();
        let well = WellSeries {
            well_id: "W".into(),
            time_ms: vec![99.0, 101.0, 105.5, 111.0],
            attributes: vec![("gr".into(), vec![1.0, 2.0, 3.0, 4.0])],
            sand_fraction: vec![0.1, 0.2, 0.3, 0.4],
        };
        let loc = WellLocation {
            well_id: "W".into(),
            inline: 0,
            crossline: 0,
        };
        let (ds, summary) = integrate_wells(&[well], &c, &[loc]).unwrap();
        assert_eq!(summary.rows_dropped, 2);
        assert_eq!(ds.attribute_names, ["impedance", "gr"]);
        assert_eq!(ds.samples[1].predictors[1], 3.0);
    }

    #[test]
    fn location_outside_survey_names_the_well() {
        let c = cube();
        let well = WellSeries {
            well_id: "C".into(),
            time_ms: vec![100.0],
            attributes: vec![],
            sand_fraction: vec![0.3],
        };
        let loc = WellLocation {
            well_id: "C".into(),
            inline: 5,
            crossline: 0,
        };
        let err = integrate_wells(&[well], &c, &[loc]).unwrap_err().to_string();
        assert!(err.contains("well C"), "{err}");
    }

    #[test]
    fn log_csv_groups_wells_and_checks_time_order() {
        let csv = "well_id,time_ms,sand_fraction\nA,1,0.1\nB,1,0.2\nA,2,0.3\n";
        let wells = WellSeries::from_reader(csv.as_bytes()).unwrap();
        assert_eq!(wells.len(), 2);
        assert_eq!(wells[0].time_ms, vec![1.0, 2.0]);
        let bad = "well_id,time_ms,sand_fraction\nA,2,0.1\nA,1,0.2\n";
        assert!(WellSeries::from_reader(bad.as_bytes()).is_err());
        let range = "well_id,time_ms,sand_fraction\nA,2,1.5\n";
        assert!(WellSeries::from_reader(range.as_bytes()).is_err());
    }

    #[test]
    fn locations_parse() {
        let locs = locations_from_reader("well_id,inline,crossline\nA,3,4\n".as_bytes()).unwrap();
        assert_eq!(locs[0].inline, 3);
        assert!(locations_from_reader("well_id,inline\nA,3\n".as_bytes()).is_err());
    }
}
