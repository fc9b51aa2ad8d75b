use super::cube::{CubeFile, Geometry, SeismicCube};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::predictor::Regressor;

/// Name written into the header of exported property cubes.
pub const PROPERTY_NAME: &str = "sand_fraction";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VolumeDiagnostics {
    /// Cells with a null attribute value, left without a prediction.
    pub masked: usize,
    /// Predictions pulled back into `[0, 1]`.
    pub clamped: usize,
    /// Cells where every rule's firing underflowed.
    pub fallback: usize,
}

/// Predicted sand fraction on a cube grid. Masked cells hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCube {
    pub geometry: Geometry,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    /// Cells predicted through the degenerate-firing fallback.
    pub fallback: Vec<bool>,
    pub diagnostics: VolumeDiagnostics,
}

impl PropertyCube {
    /// Wraps values, masking the NaN cells.
    pub fn from_values(geometry: Geometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::dim(geometry.len(), values.len(), "property cube"));
        }
        let mask: Vec<bool> = values.iter().map(|v| v.is_nan()).collect();
        let diagnostics = VolumeDiagnostics {
            masked: mask.iter().filter(|&&m| m).count(),
            ..Default::default()
        };
        Ok(Self {
            geometry,
            fallback: vec![false; values.len()],
            values,
            mask,
            diagnostics,
        })
    }

    pub fn to_cube_file(&self) -> Result<CubeFile> {
        CubeFile::new(self.geometry, PROPERTY_NAME, self.values.iter().map(|&v| v as f32).collect())
    }

    pub fn from_cube_file(file: &CubeFile) -> Result<Self> {
        Self::from_values(file.geometry, file.values.iter().map(|&v| v as f64).collect())
    }

    pub fn write(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        self.to_cube_file()?.write(path)
    }

    /// One inline as a crossline-major `n_crossline × n_t` image.
    pub fn inline_slice(&self, inline: usize) -> Result<&[f64]> {
        let g = &self.geometry;
        if inline >= g.n_inline {
            return Err(Error::ParameterDomain(format!(
                "inline {inline} out of range 0..{}",
                g.n_inline
            )));
        }
        let n = g.slice_len();
        Ok(&self.values[inline * n..(inline + 1) * n])
    }

    pub fn trace(&self, inline: usize, crossline: usize) -> &[f64] {
        &self.values[self.geometry.trace_range(inline, crossline)]
    }
}

/// Predicts every cell from the cube attributes the model was trained on,
/// clamping to `[0, 1]`. Inlines run in parallel under [`Exec::Parallel`].
pub fn predict_cube(model: &dyn Regressor, cube: &SeismicCube, exec: Exec) -> Result<PropertyCube> {
    let inputs: Vec<&CubeFile> = model
        .attribute_names()
        .iter()
        .map(|n| cube.attribute(n))
        .collect::<Result<_>>()?;
    let g = cube.geometry;
    let slice = g.slice_len();
    let mut values = vec![0.0; g.len()];
    let mut flags = vec![0u8; g.len()];
    let mut out: Vec<(&mut [f64], &mut [u8])> = values.chunks_mut(slice).zip(flags.chunks_mut(slice)).collect();
    let run = |il: usize, vals: &mut [f64], fl: &mut [u8]| -> Result<()> {
        let mut x = vec![0.0; inputs.len()];
        for k in 0..slice {
            let cell = il * slice + k;
            let mut null = false;
            for (xj, attr) in x.iter_mut().zip(&inputs) {
                let v = attr.values[cell];
                null |= v.is_nan();
                *xj = v as f64;
            }
            if null {
                vals[k] = f64::NAN;
                fl[k] = MASKED;
                continue;
            }
            let (y, fallback) = model.predict_flagged(&x)?;
            let clamped = y.clamp(0.0, 1.0);
            fl[k] = if fallback { FALLBACK } else { 0 } | if clamped != y { CLAMPED } else { 0 };
            vals[k] = clamped;
        }
        Ok(())
    };
    let errors: Vec<Result<()>> = if exec.is_parallel() {
        parallel_inlines(&mut out, &run)
    } else {
        out.iter_mut().enumerate().map(|(il, (v, f))| run(il, v, f)).collect()
    };
    errors.into_iter().collect::<Result<Vec<()>>>()?;

    let count = |bit: u8| flags.iter().filter(|&&f| f & bit != 0).count();
    let diagnostics = VolumeDiagnostics {
        masked: count(MASKED),
        clamped: count(CLAMPED),
        fallback: count(FALLBACK),
    };
    if diagnostics.clamped > 0 || diagnostics.fallback > 0 {
        log::info!(
            "volume prediction: {} cells clamped to [0, 1], {} fallback cells, {} null cells",
            diagnostics.clamped,
            diagnostics.fallback,
            diagnostics.masked
        );
    }
    Ok(PropertyCube {
        geometry: g,
        mask: flags.iter().map(|f| f & MASKED != 0).collect(),
        fallback: flags.iter().map(|f| f & FALLBACK != 0).collect(),
        values,
        diagnostics,
    })
}

const MASKED: u8 = 1;
const CLAMPED: u8 = 2;
const FALLBACK: u8 = 4;

#[cfg(feature = "parallel")]
fn parallel_inlines<F>(out: &mut [(&mut [f64], &mut [u8])], run: &F) -> Vec<Result<()>>
where
    F: Fn(usize, &mut [f64], &mut [u8]) -> Result<()> + Sync,
{
    use rayon::prelude::*;
    out.par_iter_mut().enumerate().map(|(il, (v, f))| run(il, v, f)).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_inlines<F>(out: &mut [(&mut [f64], &mut [u8])], run: &F) -> Vec<Result<()>>
where
    F: Fn(usize, &mut [f64], &mut [u8]) -> Result<()> + Sync,
{
    out.iter_mut().enumerate().map(|(il, (v, f))| run(il, v, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::model::tests::random_model;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cube(rng: &mut impl Rng, g: Geometry, names: &[String]) -> SeismicCube {
        SeismicCube::new(
            names
                .iter()
                .map(|n| {
                    let v = (0..g.len()).map(|_| rng.random_range(-3.0f32..3.0)).collect();
                    CubeFile::new(g, n.clone(), v).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn matches_scalar_inference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model = random_model(&mut rng, 2, 2);
        let g = Geometry::new(2, 2, 4, 0.0, 2.0).unwrap();
        let cube = random_cube(&mut rng, g, &model.attribute_names);
        let p = predict_cube(&model, &cube, Exec::default()).unwrap();
        for cell in 0..g.len() {
            let x: Vec<f64> = model
                .attribute_names
                .iter()
                .map(|n| cube.attribute(n).unwrap().values[cell] as f64)
                .collect();
            assert_eq!(p.values[cell], model.infer(&x).unwrap().clamp(0.0, 1.0));
        }
    }

    #[test]
    fn constant_cube_gives_constant_prediction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = random_model(&mut rng, 2, 2);
        let g = Geometry::new(3, 2, 5, 100.0, 4.0).unwrap();
        let cube = SeismicCube::new(
            model
                .attribute_names
                .iter()
                .map(|n| CubeFile::new(g, n.clone(), vec![0.25; g.len()]).unwrap())
                .collect(),
        )
        .unwrap();
        let p = predict_cube(&model, &cube, Exec::Sequential).unwrap();
        let expected = model.infer(&[0.25, 0.25]).unwrap().clamp(0.0, 1.0);
        assert!(p.values.iter().all(|&v| v == expected));
    }

    #[test]
    fn nulls_are_masked_and_missing_attributes_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = random_model(&mut rng, 2, 2);
        let g = Geometry::new(1, 2, 4, 0.0, 1.0).unwrap();
        let mut cube = random_cube(&mut rng, g, &model.attribute_names);
        cube.attributes[1].values[3] = f32::NAN;
        let p = predict_cube(&model, &cube, Exec::default()).unwrap();
        assert!(p.mask[3] && p.values[3].is_nan());
        assert_eq!(p.diagnostics.masked, 1);
        assert!(p.values.iter().filter(|v| !v.is_nan()).all(|v| (0.0..=1.0).contains(v)));

        cube.attributes.pop();
        assert!(matches!(predict_cube(&model, &cube, Exec::default()), Err(Error::Config(_))));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = random_model(&mut rng, 3, 2);
        let g = Geometry::new(5, 4, 6, 0.0, 2.0).unwrap();
        let cube = random_cube(&mut rng, g, &model.attribute_names);
        assert_eq!(
            predict_cube(&model, &cube, Exec::Sequential).unwrap(),
            predict_cube(&model, &cube, Exec::Parallel).unwrap()
        );
    }
}
