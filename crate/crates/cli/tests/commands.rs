use std::path::{Path, PathBuf};

use seisfuzz_cli::synth::sand_fraction;
use seisfuzz_core::volume::{CubeFile, Geometry, PropertyCube};
use seisfuzz_core::{AnyModel, Dataset};
use tempfile::TempDir;

fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["seisfuzz"];
    full.extend_from_slice(args);
    seisfuzz_cli::run(full)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const ATTRS: [&str; 3] = ["impedance", "amplitude", "inst_freq"];

/// A small synthetic survey merged into `data.csv`.
struct Survey {
    dir: TempDir,
    synth: PathBuf,
    data: PathBuf,
}

impl Survey {
    fn new(seed: u64, noise: f64) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let (synth, data) = (dir.path().join("synth"), dir.path().join("data.csv"));
        let s = Self { dir, synth, data };
        let (seed, noise) = (seed.to_string(), noise.to_string());
        let args = [
            "synth", "--seed", &seed, "--noise", &noise, "--inlines", "16", "--crosslines", "16", "--samples", "48",
            "--out", p(&s.synth),
        ];
        assert_eq!(cli(&args), 0);
        let (wells, locs, data) = (s.synth().join("wells.csv"), s.synth().join("locations.csv"), s.data().to_path_buf());
        let cubes = s.cubes();
        let mut args = vec!["prep", "--wells", p(&wells), "--locations", p(&locs), "--out", p(&data), "--cube"];
        args.extend(cubes.iter().map(|c| p(c)));
        assert_eq!(cli(&args), 0);
        s
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn synth(&self) -> &Path {
        &self.synth
    }

    fn data(&self) -> &Path {
        &self.data
    }

    fn cubes(&self) -> Vec<PathBuf> {
        ATTRS.iter().map(|a| self.synth().join(format!("{a}.sfc"))).collect()
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cli(&["--help"]), 0);
    assert_eq!(cli(&["--version"]), 0);
    for cmd in ["prep", "train", "evaluate", "volume", "select", "synth"] {
        assert_eq!(cli(&[cmd, "--help"]), 0, "{cmd}");
    }
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(cli(&[]), 3);
    assert_eq!(cli(&["frobnicate"]), 3);
    assert_eq!(cli(&["train", "--data", "x.csv", "--model", "quadratic", "--out", "m.json"]), 3);
}

#[test]
fn missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.csv");
    let out = dir.path().join("m.json");
    assert_eq!(cli(&["train", "--data", p(&missing), "--model", "grid", "--out", p(&out)]), 2);
}

#[test]
fn prep_merges_six_wells() {
    let s = Survey::new(3, 0.02);
    let data = Dataset::read_csv(s.data()).unwrap();
    assert_eq!(data.well_ids().len(), 6);
    assert_eq!(data.attribute_names, ATTRS);
}

#[test]
fn prep_reproduces_trace_values_at_knots_and_drops_outside_rows() {
    let dir = tempfile::tempdir().unwrap();
    let g = Geometry::new(2, 2, 6, 100.0, 2.0).unwrap();
    let values: Vec<f32> = (0..g.len()).map(|i| (i as f32 * 1.37).sin()).collect();
    let cube = dir.path().join("amp.sfc");
    CubeFile::new(g, "amp", values.clone()).unwrap().write(&cube).unwrap();
    let wells = dir.path().join("wells.csv");
    let mut text = String::from("well_id,time_ms,sand_fraction\n");
    for t in [98.0, 100.0, 102.0, 104.0, 106.0, 108.0, 110.0, 120.0] {
        text.push_str(&format!("C,{t},0.5\n"));
    }
    std::fs::write(&wells, text).unwrap();
    let locs = dir.path().join("locations.csv");
    std::fs::write(&locs, "well_id,inline,crossline\nC,1,1\n").unwrap();
    let out = dir.path().join("data.csv");
    assert_eq!(cli(&["prep", "--wells", p(&wells), "--locations", p(&locs), "--cube", p(&cube), "--out", p(&out)]), 0);
    let data = Dataset::read_csv(&out).unwrap();
    assert_eq!(data.len(), 6);
    let trace = &values[g.trace_range(1, 1)];
    for (s, v) in data.samples.iter().zip(trace) {
        assert_eq!(s.predictors[0], *v as f64);
    }
}

#[test]
fn prep_names_a_well_outside_the_survey() {
    let s = Survey::new(4, 0.02);
    let locs = s.path("bad_locations.csv");
    let fixed: String = std::fs::read_to_string(s.synth().join("locations.csv"))
        .unwrap()
        .lines()
        .map(|l| if l.starts_with("W2,") { "W2,99,0".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&locs, fixed).unwrap();
    let out = s.path("out.csv");
    let wells = s.synth().join("wells.csv");
    let cubes = s.cubes();
    let mut args = vec!["prep", "--wells", p(&wells), "--locations", p(&locs), "--out", p(&out), "--cube"];
    args.extend(cubes.iter().map(|c| p(c)));
    assert_ne!(cli(&args), 0);
    assert!(!out.exists());
}

#[test]
fn grid_model_with_three_inputs_has_27_rules() {
    let s = Survey::new(5, 0.02);
    let model = s.path("grid.json");
    let args = ["train", "--data", p(s.data()), "--model", "grid", "--p", "3", "--epochs", "3", "--out", p(&model)];
    assert_eq!(cli(&args), 0);
    match AnyModel::load(&model).unwrap() {
        AnyModel::Tsk(m) => assert_eq!(m.n_rules(), 27),
        AnyModel::Mlp(_) => panic!("expected a fuzzy model"),
    }
}

#[test]
fn fcm_report_has_one_row_per_epoch() {
    let s = Survey::new(6, 0.02);
    let (model, report) = (s.path("fcm.json"), s.path("report.csv"));
    let args = [
        "train", "--data", p(s.data()), "--model", "fcm", "--clusters", "8", "--epochs", "12", "--out", p(&model),
        "--report", p(&report),
    ];
    assert_eq!(cli(&args), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epoch,train_rmse,test_rmse"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn rule_cap_is_a_config_error() {
    let s = Survey::new(6, 0.02);
    let model = s.path("grid.json");
    let args = ["train", "--data", p(s.data()), "--model", "grid", "--p", "4", "--rule-cap", "10", "--out", p(&model)];
    assert_eq!(cli(&args), 3);
}

fn metric_row(text: &str, first: &str) -> Vec<f64> {
    text.lines()
        .find(|l| l.starts_with(first))
        .unwrap()
        .split(',')
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect()
}

#[test]
fn evaluate_reproduces_training_metrics() {
    let s = Survey::new(8, 0.02);
    let (model, metrics, split) = (s.path("sub.json"), s.path("metrics.csv"), s.path("split"));
    let args = [
        "train", "--data", p(s.data()), "--model", "subtractive", "--epochs", "5", "--out", p(&model), "--metrics",
        p(&metrics), "--save-split", p(&split),
    ];
    assert_eq!(cli(&args), 0);
    let trained = std::fs::read_to_string(&metrics).unwrap();
    for part in ["train", "test"] {
        let eval = s.path(&format!("eval_{part}.csv"));
        let data = split.join(format!("{part}.csv"));
        assert_eq!(cli(&["evaluate", "--model", p(&model), "--data", p(&data), "--out", p(&eval)]), 0);
        let text = std::fs::read_to_string(&eval).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("sub,all,"), "{row}");
        let got: Vec<f64> = row.split(',').skip(3).map(|v| v.parse().unwrap()).collect();
        let want = metric_row(&trained, part);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12, "{part}: {g} vs {w}");
        }
    }
}

#[test]
fn per_well_rows_and_constant_target_cc_marker() {
    let s = Survey::new(9, 0.02);
    let model = s.path("ann.json");
    let args = ["train", "--data", p(s.data()), "--model", "ann", "--epochs", "20", "--out", p(&model)];
    assert_eq!(cli(&args), 0);

    // flatten one well's target
    let text = std::fs::read_to_string(s.data()).unwrap();
    let flat: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i > 0 && l.starts_with("W1,") {
                let mut f: Vec<&str> = l.split(',').collect();
                *f.last_mut().unwrap() = "0.25";
                f.join(",")
            } else {
                l.to_string()
            }
        })
        .collect();
    let data = s.path("flat.csv");
    std::fs::write(&data, flat.join("\n") + "\n").unwrap();

    let eval = s.path("eval.csv");
    let args = ["evaluate", "--model", p(&model), "--data", p(&data), "--per-well", "--label", "ann", "--out", p(&eval)];
    assert_eq!(cli(&args), 0);
    let out = std::fs::read_to_string(&eval).unwrap();
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "model,well_id,n,cc,rmse,aem,si");
    assert_eq!(rows.len(), 1 + 1 + 6);
    let w1: Vec<&str> = rows.iter().find(|r| r.starts_with("ann,W1,")).unwrap().split(',').collect();
    assert_eq!(w1[3], "nan");
    for v in &w1[4..] {
        assert!(v.parse::<f64>().unwrap().is_finite());
    }
}

#[test]
fn evaluate_with_missing_columns_exits_two() {
    let s = Survey::new(10, 0.02);
    let model = s.path("grid.json");
    assert_eq!(cli(&["train", "--data", p(s.data()), "--model", "grid", "--epochs", "2", "--out", p(&model)]), 0);
    let reduced = s.path("reduced.csv");
    let d = Dataset::read_csv(s.data()).unwrap().select(&["impedance", "amplitude"]).unwrap();
    d.write_csv(&reduced).unwrap();
    assert_eq!(cli(&["evaluate", "--model", p(&model), "--data", p(&reduced)]), 2);
}

#[test]
fn select_rejects_unknown_candidate() {
    let s = Survey::new(11, 0.02);
    assert_eq!(cli(&["select", "--data", p(s.data()), "--candidates", "impedance,porosity"]), 2);
}

#[test]
fn volume_writes_cube_slice_and_overlay() {
    let s = Survey::new(12, 0.02);
    let model = s.path("fcm.json");
    assert_eq!(cli(&["train", "--data", p(s.data()), "--model", "fcm", "--epochs", "5", "--out", p(&model)]), 0);
    let (vol, slice, overlay) = (s.path("vol.sfc"), s.path("slice.csv"), s.path("overlay.csv"));
    let (wells, locs) = (s.synth().join("wells.csv"), s.synth().join("locations.csv"));
    let cubes = s.cubes();
    let mut args = vec![
        "volume", "--model", p(&model), "--out", p(&vol), "--smooth", "--slice", "3", "--slice-out", p(&slice),
        "--overlay", "W1", "--wells", p(&wells), "--locations", p(&locs), "--overlay-out", p(&overlay), "--cube",
    ];
    args.extend(cubes.iter().map(|c| p(c)));
    assert_eq!(cli(&args), 0);

    let cube = PropertyCube::from_cube_file(&CubeFile::read(&vol).unwrap()).unwrap();
    assert_eq!((cube.geometry.n_inline, cube.geometry.n_crossline, cube.geometry.n_t), (16, 16, 48));
    assert!(cube.values.iter().all(|v| (0.0..=1.0).contains(v)));

    let text = std::fs::read_to_string(&slice).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 48);
    assert!(rows.iter().all(|r| r.split(',').count() == 16));

    let text = std::fs::read_to_string(&overlay).unwrap();
    assert!(text.starts_with("time_ms,target,predicted\n"));
    assert!(text.lines().count() > 48);
}

#[test]
fn synth_is_deterministic_and_bounded() {
    let a = Survey::new(13, 0.05);
    let b = Survey::new(13, 0.05);
    for name in ["wells.csv", "locations.csv", "impedance.sfc", "amplitude.sfc", "inst_freq.sfc", "truth.sfc"] {
        let (x, y) = (a.synth().join(name), b.synth().join(name));
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{name}");
    }
    let data = Dataset::read_csv(a.data()).unwrap();
    assert!(data.samples.iter().all(|s| (0.0..=1.0).contains(&s.target)));
}

#[test]
fn noiseless_synth_targets_match_the_mixture_exactly() {
    let s = Survey::new(14, 0.0);
    let data = Dataset::read_csv(s.data()).unwrap();
    for smp in &data.samples {
        let x = &smp.predictors;
        assert_eq!(smp.target, sand_fraction([x[0], x[1], x[2]]));
    }
}
