use std::fmt::Write as _;
use std::path::Path;

use super::predict::PropertyCube;
use crate::error::{Error, Result};
use crate::pipeline::CubicSpline;

fn fmt_value(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else {
        // shortest representation that parses back to the same f64
        write!(out, "{v}").expect("writing to a String");
    }
}

/// One inline as CSV text: a row per time sample, a column per crossline,
/// no header. Masked cells are written as `nan`.
pub fn export_slice(cube: &PropertyCube, inline: usize) -> Result<String> {
    let slice = cube.inline_slice(inline)?;
    let g = &cube.geometry;
    let mut out = String::with_capacity(slice.len() * 20);
    for t in 0..g.n_t {
        for x in 0..g.n_crossline {
            if x > 0 {
                out.push(',');
            }
            fmt_value(&mut out, slice[x * g.n_t + t]);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_slice(cube: &PropertyCube, inline: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, export_slice(cube, inline)?).map_err(|e| Error::io(path, e))
}

/// Target log against the prediction at the well's trace, for every log
/// sample inside the cube's time span: `(time_ms, target, predicted)`. The
/// predicted trace is spline-interpolated to the log times when it has no
/// masked cells, and read at the nearest unmasked sample otherwise.
pub fn export_overlay(
    cube: &PropertyCube,
    inline: usize,
    crossline: usize,
    time_ms: &[f64],
    target: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let g = &cube.geometry;
    if inline >= g.n_inline || crossline >= g.n_crossline {
        return Err(Error::ParameterDomain(format!(
            "trace ({inline}, {crossline}) outside the {}x{} grid",
            g.n_inline, g.n_crossline
        )));
    }
    if time_ms.len() != target.len() {
        return Err(Error::dim(time_ms.len(), target.len(), "overlay target"));
    }
    let trace = cube.trace(inline, crossline);
    let knots = g.times();
    let (lo, hi) = (knots[0], knots[knots.len() - 1]);
    let spline = if trace.iter().all(|v| v.is_finite()) && knots.len() >= 4 {
        Some(CubicSpline::new(&knots, trace)?)
    } else {
        None
    };
    let nearest = |t: f64| -> f64 {
        (0..g.n_t)
            .filter(|&i| !trace[i].is_nan())
            .min_by(|&i, &j| (knots[i] - t).abs().total_cmp(&(knots[j] - t).abs()))
            .map_or(f64::NAN, |i| trace[i])
    };
    time_ms
        .iter()
        .zip(target)
        .filter(|(t, _)| (lo..=hi).contains(*t))
        .map(|(&t, &y)| {
            let p = match &spline {
                Some(s) => s.eval(t)?,
                None => nearest(t),
            };
            Ok((t, y, p))
        })
        .collect()
}

pub fn write_overlay(rows: &[(f64, f64, f64)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("time_ms,target,predicted\n");
    for &(t, y, p) in rows {
        fmt_value(&mut out, t);
        out.push(',');
        fmt_value(&mut out, y);
        out.push(',');
        fmt_value(&mut out, p);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
