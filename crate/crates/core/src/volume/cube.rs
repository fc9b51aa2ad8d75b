//! Regular inline × crossline × time grids and the `SFCUBE1` file format.
//!
//! A cube file is one ASCII header line
//! `SFCUBE1 n_inline n_crossline n_t t0 dt attr_name\n` followed by
//! `n_inline * n_crossline * n_t` little-endian `f32` values in row-major
//! (inline, crossline, time) order. Quiet NaN marks null cells.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &str = "SFCUBE1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub n_inline: usize,
    pub n_crossline: usize,
    pub n_t: usize,
    /// Time of the first sample, ms.
    pub t0: f64,
    /// Sample interval, ms.
    pub dt: f64,
}

impl Geometry {
    pub fn new(n_inline: usize, n_crossline: usize, n_t: usize, t0: f64, dt: f64) -> Result<Self> {
        let g = Self {
            n_inline,
            n_crossline,
            n_t,
            t0,
            dt,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inline == 0 || self.n_crossline == 0 || self.n_t == 0 {
            return Err(Error::ParameterDomain(format!(
                "cube dimensions must be positive: {self:?}"
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite() && self.t0.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "cube needs finite t0 and dt > 0: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_inline * self.n_crossline * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, inline: usize, crossline: usize, t: usize) -> usize {
        (inline * self.n_crossline + crossline) * self.n_t + t
    }

    pub fn trace_range(&self, inline: usize, crossline: usize) -> std::ops::Range<usize> {
        let start = self.index(inline, crossline, 0);
        start..start + self.n_t
    }

    pub fn slice_len(&self) -> usize {
        self.n_crossline * self.n_t
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_t).map(|k| self.t0 + k as f64 * self.dt).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + (self.n_t - 1) as f64 * self.dt
    }
}

/// A single named attribute grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFile {
    pub geometry: Geometry,
    pub name: String,
    pub values: Vec<f32>,
}

impl CubeFile {
    pub fn new(geometry: Geometry, name: impl Into<String>, values: Vec<f32>) -> Result<Self> {
        geometry.validate()?;
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::ParameterDomain(format!(
                "attribute name `{name}` must be non-empty without whitespace"
            )));
        }
        if values.len() != geometry.len() {
            return Err(Error::dim(geometry.len(), values.len(), format!("cube `{name}`")));
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(Error::Parse(format!("cube `{name}` contains infinities")));
        }
        Ok(Self {
            geometry,
            name,
            values,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file)).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_reader(mut reader: impl BufRead) -> Result<Self> {
        let mut header = String::new();
        reader
            .read_line(&mut header)
            .map_err(|e| Error::io("<cube>", e))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 7 || fields[0] != MAGIC {
            return Err(Error::Parse(format!("bad cube header `{}`", header.trim_end())));
        }
        let count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad cube dimension `{s}`")))
        };
        let real = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad cube time field `{s}`")))
        };
        let geometry = Geometry::new(
            count(fields[1])?,
            count(fields[2])?,
            count(fields[3])?,
            real(fields[4])?,
            real(fields[5])?,
        )?;
        let mut bytes = Vec::with_capacity(geometry.len() * 4);
        reader
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io("<cube>", e))?;
        if bytes.len() != geometry.len() * 4 {
            return Err(Error::Parse(format!(
                "cube body has {} bytes, header implies {}",
                bytes.len(),
                geometry.len() * 4
            )));
        }
        let values = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        Self::new(geometry, fields[6], values)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.to_writer(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn to_writer(&self, mut w: impl Write) -> std::io::Result<()> {
        let g = &self.geometry;
        writeln!(
            w,
            "{MAGIC} {} {} {} {} {} {}",
            g.n_inline, g.n_crossline, g.n_t, g.t0, g.dt, self.name
        )?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Values of one trace, widened to `f64`.
    pub fn trace(&self, inline: usize, crossline: usize) -> Vec<f64> {
        self.values[self.geometry.trace_range(inline, crossline)]
            .iter()
            .map(|&v| v as f64)
            .collect()
    }
}

/// Attribute grids sharing one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SeismicCube {
    pub geometry: Geometry,
    pub attributes: Vec<CubeFile>,
}

impl SeismicCube {
    pub fn new(attributes: Vec<CubeFile>) -> Result<Self> {
        let first = attributes
            .first()
            .ok_or_else(|| Error::Config("at least one attribute cube is required".into()))?;
        let geometry = first.geometry;
        for a in &attributes {
            if a.geometry != geometry {
                return Err(Error::Config(format!(
                    "cube `{}` geometry {:?} differs from `{}` {:?}",
                    a.name, a.geometry, first.name, geometry
                )));
            }
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::Config(format!("attribute `{}` given twice", a.name)));
            }
        }
        Ok(Self {
            geometry,
            attributes,
        })
    }

    pub fn read_all(paths: &[impl AsRef<Path>]) -> Result<Self> {
        Self::new(paths.iter().map(CubeFile::read).collect::<Result<_>>()?)
    }

    pub fn attribute(&self, name: &str) -> Result<&CubeFile> {
        self.attributes
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::Config(format!("no cube provides attribute `{name}`")))
    }

    pub fn names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CubeFile {
        let g = Geometry::new(2, 3, 4, 1000.0, 2.0).unwrap();
        let values = (0..24).map(|i| i as f32 * 0.5 - 3.0).collect();
        CubeFile::new(g, "impedance", values).unwrap()
    }

    #[test]
    fn header_and_body_round_trip() {
        let mut cube = small();
        cube.values[5] = f32::NAN;
        let mut buf = Vec::new();
        cube.to_writer(&mut buf).unwrap();
        assert!(buf.starts_with(b"SFCUBE1 2 3 4 1000 2 impedance\n"));
        let back = CubeFile::from_reader(buf.as_slice()).unwrap();
        assert_eq!(back.geometry, cube.geometry);
        assert!(back.values[5].is_nan());
        for (a, b) in back.values.iter().zip(&cube.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn trace_indexing_is_row_major() {
        let cube = small();
        assert_eq!(cube.geometry.index(1, 2, 3), 23);
        assert_eq!(cube.trace(0, 1), vec![-1.0, -0.5, 0.0, 0.5]);
    }

    #[test]
    fn truncated_body_is_rejected() {
        let mut buf = Vec::new();
        small().to_writer(&mut buf).unwrap();
        buf.truncate(buf.len() - 2);
        assert!(matches!(CubeFile::from_reader(buf.as_slice()), Err(Error::Parse(_))));
    }

    #[test]
    fn mismatched_geometry_is_config_error() {
        let a = small();
        let g = Geometry::new(2, 3, 5, 1000.0, 2.0).unwrap();
        let b = CubeFile::new(g, "amplitude", vec![0.0; 30]).unwrap();
        assert!(matches!(SeismicCube::new(vec![a, b]), Err(Error::Config(_))));
    }
}
