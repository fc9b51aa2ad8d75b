use super::predict::PropertyCube;
use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Default window: 3 crosslines by 5 time samples.
pub const WINDOW: (usize, usize) = (3, 5);

/// Median filter of a crossline-major `n_crossline × n_t` image with a
/// centered `window = (crosslines, samples)` neighborhood. Borders replicate
/// the edge cells. NaN cells are left out of every neighborhood; with an
/// even number of remaining members the lower median is taken, and a
/// neighborhood with none stays NaN.
pub fn median_filter_inline(image: &[f64], n_crossline: usize, n_t: usize, window: (usize, usize)) -> Result<Vec<f64>> {
    let (wx, wt) = window;
    if wx % 2 == 0 || wt % 2 == 0 {
        return Err(Error::ParameterDomain(format!("median window {wx}x{wt} must have odd sides")));
    }
    if image.len() != n_crossline * n_t {
        return Err(Error::dim(n_crossline * n_t, image.len(), "median filter image"));
    }
    let (hx, ht) = ((wx / 2) as isize, (wt / 2) as isize);
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut out = vec![0.0; image.len()];
    let mut buf = Vec::with_capacity(wx * wt);
    for x in 0..n_crossline {
        for t in 0..n_t {
            buf.clear();
            for dx in -hx..=hx {
                let xx = clamp(x as isize + dx, n_crossline);
                for dt in -ht..=ht {
                    let v = image[xx * n_t + clamp(t as isize + dt, n_t)];
                    if !v.is_nan() {
                        buf.push(v);
                    }
                }
            }
            out[x * n_t + t] = if buf.is_empty() {
                f64::NAN
            } else {
                let k = (buf.len() - 1) / 2;
                *buf.select_nth_unstable_by(k, f64::total_cmp).1
            };
        }
    }
    Ok(out)
}

/// Median-filters every inline slice of `cube` independently.
pub fn smooth_cube(cube: &PropertyCube, exec: Exec) -> Result<PropertyCube> {
    let g = cube.geometry;
    let slices = par::map(exec, g.n_inline, |il| {
        median_filter_inline(cube.inline_slice(il)?, g.n_crossline, g.n_t, WINDOW)
    });
    let mut values = Vec::with_capacity(g.len());
    for s in slices {
        values.extend(s?);
    }
    let mask: Vec<bool> = values.iter().map(|v| v.is_nan()).collect();
    let mut diagnostics = cube.diagnostics;
    diagnostics.masked = mask.iter().filter(|&&m| m).count();
    Ok(PropertyCube {
        geometry: g,
        values,
        mask,
        fallback: cube.fallback.clone(),
        diagnostics,
    })
}
