use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use seisfuzz_core::builder::Structure;
use seisfuzz_core::pipeline::well::read_locations;
use seisfuzz_core::pipeline::{integrate_wells, WellSeries};
use seisfuzz_core::select::{sfs, SfsConfig};
use seisfuzz_core::train::{TrainConfig, TrainReport};
use seisfuzz_core::volume::{
    export_overlay, predict_cube, smooth_cube, write_overlay, write_slice, SeismicCube,
};
use seisfuzz_core::{ann, train, AnyModel, Dataset, Error, Exec, Metrics, Regressor, Result};

use crate::synth::{self, SynthConfig};
use crate::{
    Command, EvaluateArgs, ModelKind, PrepArgs, SelectArgs, SynthArgs, TrainArgs, VolumeArgs,
    ANN_EPOCHS, ANN_LR, FUZZY_EPOCHS, FUZZY_LR,
};

pub(crate) fn execute(command: Command) -> Result<()> {
    match command {
        Command::Prep(a) => prep(a),
        Command::Train(a) => train_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Volume(a) => volume(a),
        Command::Select(a) => select(a),
        Command::Synth(a) => synth_cmd(a),
    }
}

fn num(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else {
        let _ = write!(out, "{v}");
    }
}

fn metrics_row(out: &mut String, m: &Metrics) {
    for v in [m.cc, m.rmse, m.aem, m.si] {
        out.push(',');
        num(out, v);
    }
    out.push('\n');
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn prep(a: PrepArgs) -> Result<()> {
    let wells = WellSeries::read_csv(&a.wells)?;
    let locations = read_locations(&a.locations)?;
    let cube = SeismicCube::read_all(&a.cubes)?;
    let (data, summary) = integrate_wells(&wells, &cube, &locations)?;
    if summary.rows_dropped > 0 {
        log::warn!(
            "{} log rows outside the seismic time span were dropped",
            summary.rows_dropped
        );
    }
    data.write_csv(&a.out)?;
    println!(
        "wells={} rows_kept={} rows_dropped={}",
        summary.wells, summary.rows_kept, summary.rows_dropped
    );
    Ok(())
}

fn metrics_table(report: &TrainReport) -> String {
    let mut out = String::from("split,cc,rmse,aem,si\n");
    out.push_str("train");
    metrics_row(&mut out, &report.train_metrics);
    out.push_str("test");
    metrics_row(&mut out, &report.test_metrics);
    out
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let mut data = Dataset::read_csv(&a.data)?;
    if let Some(names) = &a.attributes {
        data = data.select(names)?;
    }
    let (default_epochs, default_lr) = match a.model {
        ModelKind::Ann => (ANN_EPOCHS, ANN_LR),
        _ => (FUZZY_EPOCHS, FUZZY_LR),
    };
    let config = TrainConfig {
        epochs: a.epochs.unwrap_or(default_epochs),
        lr: a.lr.unwrap_or(default_lr),
        adapt_lr: !a.fixed_lr,
        seed: a.seed,
        split_fraction: a.split,
        rule_cap: a.rule_cap,
        patience: a.patience,
        exec: Exec::default(),
    };
    let structure = match a.model {
        ModelKind::Grid => Some(Structure::grid(a.p)),
        ModelKind::Subtractive => Some(Structure::subtractive(a.radius)),
        ModelKind::Fcm => Some(Structure::fcm(a.radius, a.clusters, a.seed)),
        ModelKind::Ann => None,
    };
    let (model, report, train_set, test_set) = match structure {
        Some(s) => {
            let f = train::fit(&data, &s, &config)?;
            log::info!("trained {} rules", f.model.n_rules());
            (AnyModel::Tsk(f.model), f.report, f.train, f.test)
        }
        None => {
            let f = ann::fit(&data, a.hidden, &config)?;
            (AnyModel::Mlp(f.model), f.report, f.train, f.test)
        }
    };
    model.save(&a.out)?;
    if let Some(p) = &a.report {
        report.write_csv(p)?;
    }
    let table = metrics_table(&report);
    if let Some(p) = &a.metrics {
        write_text(p, &table)?;
    }
    if let Some(dir) = &a.save_split {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        train_set.write_csv(dir.join("train.csv"))?;
        test_set.write_csv(dir.join("test.csv"))?;
    }
    print!("{table}");
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let model = AnyModel::load(&a.model)?;
    let data = Dataset::read_csv(&a.data)?.select(model.attribute_names())?;
    let label = a.label.clone().unwrap_or_else(|| {
        a.model
            .file_stem()
            .map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned())
    });
    let predicted = model.predict_dataset(&data)?;
    let observed = data.targets();

    let mut out = String::from("model,well_id,n,cc,rmse,aem,si\n");
    let row = |out: &mut String, well: &str, idx: &[usize]| -> Result<()> {
        let x: Vec<f64> = idx.iter().map(|&i| predicted[i]).collect();
        let y: Vec<f64> = idx.iter().map(|&i| observed[i]).collect();
        let m = Metrics::lenient(&x, &y)?;
        let _ = write!(out, "{label},{well},{}", idx.len());
        metrics_row(out, &m);
        Ok(())
    };
    let all: Vec<usize> = (0..data.len()).collect();
    row(&mut out, "all", &all)?;
    if a.per_well {
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, s) in data.samples.iter().enumerate() {
            match &s.well_id {
                Some(w) => groups.entry(w.as_str()).or_default().push(i),
                None => {
                    return Err(Error::Parse(
                        "per-well metrics need a `well_id` column".into(),
                    ))
                }
            }
        }
        for (well, idx) in &groups {
            row(&mut out, well, idx)?;
        }
    }
    emit(a.out.as_deref(), &out)
}

fn default_slice_path(out: &Path, inline: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "volume".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_inline{inline}.csv"))
}

fn volume(a: VolumeArgs) -> Result<()> {
    let model = AnyModel::load(&a.model)?;
    let cube = SeismicCube::read_all(&a.cubes)?;
    let exec = Exec::default();
    let mut property = predict_cube(&model, &cube, exec)?;
    let d = property.diagnostics;
    log::info!(
        "{} masked, {} clamped, {} fallback cells",
        d.masked,
        d.clamped,
        d.fallback
    );
    if a.smooth {
        property = smooth_cube(&property, exec)?;
    }
    property.write(&a.out)?;
    if let Some(k) = a.slice {
        let path = a
            .slice_out
            .clone()
            .unwrap_or_else(|| default_slice_path(&a.out, k));
        write_slice(&property, k, path)?;
    }
    if let (Some(well), Some(wells), Some(locs), Some(out)) =
        (&a.overlay, &a.wells, &a.locations, &a.overlay_out)
    {
        let series = WellSeries::read_csv(wells)?;
        let log = series
            .iter()
            .find(|s| &s.well_id == well)
            .ok_or_else(|| Error::Config(format!("well {well} is not in {}", wells.display())))?;
        let loc = read_locations(locs)?
            .into_iter()
            .find(|l| &l.well_id == well)
            .ok_or_else(|| Error::Config(format!("no location given for well {well}")))?;
        let rows = export_overlay(
            &property,
            loc.inline,
            loc.crossline,
            &log.time_ms,
            &log.sand_fraction,
        )?;
        write_overlay(&rows, out)?;
    }
    println!(
        "masked={} clamped={} fallback={}",
        d.masked, d.clamped, d.fallback
    );
    Ok(())
}

fn select(a: SelectArgs) -> Result<()> {
    let data = Dataset::read_csv(&a.data)?;
    let candidates = a
        .candidates
        .clone()
        .unwrap_or_else(|| data.attribute_names.clone());
    let base = SfsConfig::default();
    let config = SfsConfig {
        n_hidden: a.hidden,
        train: TrainConfig {
            epochs: a.epochs,
            lr: a.lr,
            seed: a.seed,
            split_fraction: a.split,
            ..base.train
        },
    };
    let result = sfs(&data, &candidates, &config)?;
    let mut buf = Vec::new();
    result
        .to_writer(&mut buf)
        .map_err(|e| Error::io("<trace>", e))?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn synth_cmd(a: SynthArgs) -> Result<()> {
    let config = SynthConfig {
        seed: a.seed,
        n_wells: a.wells,
        n_inline: a.inlines,
        n_crossline: a.crosslines,
        n_t: a.samples,
        t0: a.t0,
        dt: a.dt,
        log_dt: a.log_dt,
        noise: a.noise,
        noise_attribute: a.noise_attr,
    };
    let out = synth::generate(&config, &a.out)?;
    println!(
        "wells={} cubes={} truth={}",
        out.wells.display(),
        out.cubes.len(),
        out.truth.display()
    );
    Ok(())
}
