//! Synthetic survey generator.
//!
//! Three smooth latent fields `F1..F3` (sums of random plane-wave cosines,
//! unit variance, lateral periods of 16-80 traces, temporal periods of
//! 40-160 ms) define the attributes
//!
//! ```text
//! impedance = 7000 + 600 F1
//! amplitude = 0.4 F2 - 0.2 F1
//! inst_freq = 35 + 6 F3 + 2 F2
//! ```
//!
//! and the sand fraction `s = sigmoid(g)` with
//!
//! ```text
//! u1 = (impedance - 7000) / 600,  u2 = amplitude / 0.4,  u3 = (inst_freq - 35) / 6
//! g  = 1.4 u1 - 0.9 u2 + 0.7 sin(1.3 u3) + 0.35 u1 u2
//! ```
//!
//! The written attribute cubes carry white noise of standard deviation
//! `5 * noise` in `u` units; the ground-truth cube is `s` of the clean
//! attributes. Well logs sample `s` of the clean traces, spline-resampled to
//! the finer log interval, plus Gaussian noise of standard deviation `noise`
//! clamped to `[0, 1]`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use seisfuzz_core::pipeline::well::write_locations;
use seisfuzz_core::pipeline::{spline_resample, WellLocation};
use seisfuzz_core::volume::{CubeFile, Geometry};
use seisfuzz_core::{Error, Result};

pub const ATTRIBUTES: [&str; 3] = ["impedance", "amplitude", "inst_freq"];
pub const NOISE_ATTRIBUTE: &str = "noise_attr";
pub const TRUTH_FILE: &str = "truth.sfc";
pub const WELLS_FILE: &str = "wells.csv";
pub const LOCATIONS_FILE: &str = "locations.csv";

/// Attribute noise, in `u` units, per unit of target noise.
const ATTRIBUTE_NOISE_RATIO: f64 = 5.0;
const TERMS: usize = 6;
/// Wells keep this many traces away from the survey edge when it fits.
const EDGE_MARGIN: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_wells: usize,
    pub n_inline: usize,
    pub n_crossline: usize,
    pub n_t: usize,
    pub t0: f64,
    pub dt: f64,
    /// Well log sample interval, ms.
    pub log_dt: f64,
    /// Standard deviation of the target noise.
    pub noise: f64,
    /// Also write a pure white-noise attribute cube.
    pub noise_attribute: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_wells: 6,
            n_inline: 64,
            n_crossline: 64,
            n_t: 128,
            t0: 1500.0,
            dt: 2.0,
            log_dt: 0.5,
            noise: 0.02,
            noise_attribute: false,
        }
    }
}

/// Files written by [`generate`].
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub wells: PathBuf,
    pub locations: PathBuf,
    pub cubes: Vec<PathBuf>,
    pub truth: PathBuf,
}

pub fn sigmoid(g: f64) -> f64 {
    1.0 / (1.0 + (-g).exp())
}

/// The latent mixture `g` of raw attribute values.
pub fn mixture(impedance: f64, amplitude: f64, inst_freq: f64) -> f64 {
    let u1 = (impedance - 7000.0) / 600.0;
    let u2 = amplitude / 0.4;
    let u3 = (inst_freq - 35.0) / 6.0;
    1.4 * u1 - 0.9 * u2 + 0.7 * (1.3 * u3).sin() + 0.35 * u1 * u2
}

/// Sand fraction for raw attribute values.
pub fn sand_fraction(attrs: [f64; 3]) -> f64 {
    sigmoid(mixture(attrs[0], attrs[1], attrs[2]))
}

struct Wave {
    amp: f64,
    k_inline: f64,
    k_crossline: f64,
    k_t: f64,
    phase: f64,
}

struct Field {
    waves: Vec<Wave>,
    norm: f64,
}

impl Field {
    fn random(rng: &mut impl Rng) -> Self {
        let waves: Vec<Wave> = (0..TERMS)
            .map(|_| {
                let lateral = rng.random_range(16.0..80.0);
                let heading = rng.random_range(0.0..2.0 * PI);
                let k = 2.0 * PI / lateral;
                Wave {
                    amp: rng.random_range(0.5..1.0),
                    k_inline: k * heading.cos(),
                    k_crossline: k * heading.sin(),
                    k_t: 2.0 * PI / rng.random_range(40.0..160.0),
                    phase: rng.random_range(0.0..2.0 * PI),
                }
            })
            .collect();
        let norm = (waves.iter().map(|w| w.amp * w.amp).sum::<f64>() / 2.0).sqrt();
        Self { waves, norm }
    }

    fn at(&self, il: f64, xl: f64, t: f64) -> f64 {
        self.waves
            .iter()
            .map(|w| w.amp * (w.k_inline * il + w.k_crossline * xl + w.k_t * t + w.phase).cos())
            .sum::<f64>()
            / self.norm
    }
}

fn check(config: &SynthConfig) -> Result<Geometry> {
    let g = Geometry::new(
        config.n_inline,
        config.n_crossline,
        config.n_t,
        config.t0,
        config.dt,
    )?;
    if config.n_t < 4 {
        return Err(Error::Config(
            "synthetic traces need at least 4 samples".into(),
        ));
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return Err(Error::Config(format!(
            "noise must be >= 0, got {}",
            config.noise
        )));
    }
    if !(config.log_dt > 0.0 && config.log_dt.is_finite()) {
        return Err(Error::Config(format!(
            "log interval must be positive, got {}",
            config.log_dt
        )));
    }
    if config.n_wells == 0 || config.n_wells > config.n_inline * config.n_crossline {
        return Err(Error::Config(format!(
            "cannot place {} wells on a {}x{} grid",
            config.n_wells, config.n_inline, config.n_crossline
        )));
    }
    Ok(g)
}

/// Distinct well traces, kept off the edges when the grid allows it.
fn place_wells(rng: &mut impl Rng, config: &SynthConfig) -> Vec<(usize, usize)> {
    let margin = |n: usize| {
        if n > 2 * EDGE_MARGIN + 1 {
            EDGE_MARGIN
        } else {
            0
        }
    };
    let (mi, mx) = (margin(config.n_inline), margin(config.n_crossline));
    let interior = (config.n_inline - 2 * mi) * (config.n_crossline - 2 * mx);
    let (mi, mx) = if interior >= config.n_wells {
        (mi, mx)
    } else {
        (0, 0)
    };
    let mut spots: Vec<(usize, usize)> = Vec::with_capacity(config.n_wells);
    while spots.len() < config.n_wells {
        let p = (
            rng.random_range(mi..config.n_inline - mi),
            rng.random_range(mx..config.n_crossline - mx),
        );
        if !spots.contains(&p) {
            spots.push(p);
        }
    }
    spots
}

/// Writes the synthetic survey into `dir`.
pub fn generate(config: &SynthConfig, dir: &Path) -> Result<SynthOutput> {
    let g = check(config)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let fields: Vec<Field> = (0..3).map(|_| Field::random(&mut rng)).collect();
    let wells = place_wells(&mut rng, config);

    // clean attributes, rounded to the f32 cube precision up front so the
    // truth and the well logs see exactly what a reader of the cubes sees
    let times = g.times();
    let mut clean: Vec<Vec<f32>> = (0..3).map(|_| Vec::with_capacity(g.len())).collect();
    for il in 0..g.n_inline {
        for xl in 0..g.n_crossline {
            for &t in &times {
                let f: Vec<f64> = fields
                    .iter()
                    .map(|fd| fd.at(il as f64, xl as f64, t - g.t0))
                    .collect();
                clean[0].push((7000.0 + 600.0 * f[0]) as f32);
                clean[1].push((0.4 * f[1] - 0.2 * f[0]) as f32);
                clean[2].push((35.0 + 6.0 * f[2] + 2.0 * f[1]) as f32);
            }
        }
    }
    let truth: Vec<f32> = (0..g.len())
        .map(|i| sand_fraction([clean[0][i] as f64, clean[1][i] as f64, clean[2][i] as f64]) as f32)
        .collect();

    let scales = [600.0, 0.4, 6.0];
    let attr_sd = ATTRIBUTE_NOISE_RATIO * config.noise;
    let mut cubes = Vec::new();
    for (k, name) in ATTRIBUTES.iter().enumerate() {
        let values: Vec<f32> = if attr_sd > 0.0 {
            let normal =
                Normal::new(0.0, attr_sd * scales[k]).map_err(|e| Error::Config(e.to_string()))?;
            clean[k]
                .iter()
                .map(|&v| (v as f64 + normal.sample(&mut rng)) as f32)
                .collect()
        } else {
            clean[k].clone()
        };
        let path = dir.join(format!("{name}.sfc"));
        CubeFile::new(g, *name, values)?.write(&path)?;
        cubes.push(path);
    }
    if config.noise_attribute {
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let values = (0..g.len())
            .map(|_| normal.sample(&mut rng) as f32)
            .collect();
        let path = dir.join(format!("{NOISE_ATTRIBUTE}.sfc"));
        CubeFile::new(g, NOISE_ATTRIBUTE, values)?.write(&path)?;
        cubes.push(path);
    }
    let truth_path = dir.join(TRUTH_FILE);
    CubeFile::new(g, "sand_fraction", truth)?.write(&truth_path)?;

    // well logs on the finer grid inside the trace span
    let n_log = ((g.t_end() - g.t0) / config.log_dt).floor() as usize + 1;
    let log_times: Vec<f64> = (0..n_log)
        .map(|i| g.t0 + i as f64 * config.log_dt)
        .collect();
    let target_noise = Normal::new(0.0, config.noise.max(f64::MIN_POSITIVE)).expect("valid sd");
    let mut writer = csv::Writer::from_path(dir.join(WELLS_FILE)).map_err(Error::from)?;
    writer.write_record(["well_id", "time_ms", "sand_fraction"])?;
    let mut locations = Vec::new();
    for (w, &(il, xl)) in wells.iter().enumerate() {
        let id = format!("W{}", w + 1);
        let range = g.trace_range(il, xl);
        let resampled: Vec<Vec<f64>> = clean
            .iter()
            .map(|c| {
                let trace: Vec<f64> = c[range.clone()].iter().map(|&v| v as f64).collect();
                spline_resample(&times, &trace, &log_times)
            })
            .collect::<Result<_>>()?;
        for (i, &t) in log_times.iter().enumerate() {
            let mut s = sand_fraction([resampled[0][i], resampled[1][i], resampled[2][i]]);
            if config.noise > 0.0 {
                s = (s + target_noise.sample(&mut rng)).clamp(0.0, 1.0);
            }
            writer.write_record([id.clone(), t.to_string(), s.to_string()])?;
        }
        locations.push(WellLocation {
            well_id: id,
            inline: il,
            crossline: xl,
        });
    }
    writer
        .flush()
        .map_err(|e| Error::io(dir.join(WELLS_FILE), e))?;
    let loc_path = dir.join(LOCATIONS_FILE);
    write_locations(&loc_path, &locations)?;
    log::info!(
        "synthetic survey: {} cubes of {}x{}x{}, {} wells of {} log samples",
        cubes.len(),
        g.n_inline,
        g.n_crossline,
        g.n_t,
        wells.len(),
        n_log
    );
    Ok(SynthOutput {
        wells: dir.join(WELLS_FILE),
        locations: loc_path,
        cubes,
        truth: truth_path,
    })
}
