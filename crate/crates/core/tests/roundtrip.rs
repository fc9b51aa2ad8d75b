use proptest::prelude::*;
use seisfuzz_core::builder::Structure;
use seisfuzz_core::train::{fit, TrainConfig};
use seisfuzz_core::volume::{predict_cube, smooth_cube, CubeFile, Geometry, PropertyCube, SeismicCube};
use seisfuzz_core::{ann, AnyModel, Dataset, Exec, Regressor, Sample};

fn wave_data(n: usize) -> Dataset {
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            vec![100.0 + 40.0 * (7.0 * t).sin(), 0.3 * (11.0 * t).cos(), 20.0 + 5.0 * t]
        })
        .collect();
    let y = x.iter().map(|r| ((r[0] - 100.0) / 40.0 + r[1]).tanh() * 0.4 + 0.5).collect();
    Dataset::from_rows(vec!["imp".into(), "amp".into(), "freq".into()], x, y).unwrap()
}

fn short() -> TrainConfig {
    TrainConfig { epochs: 5, ..TrainConfig::default() }
}

#[test]
fn every_structure_trains_and_reloads_bit_exact() {
    let data = wave_data(300);
    let dir = tempfile::tempdir().unwrap();
    let structures = [Structure::grid(2), Structure::subtractive(0.3), Structure::fcm(0.3, Some(4), 1)];
    for (k, s) in structures.iter().enumerate() {
        let fitted = fit(&data, s, &short()).unwrap();
        assert_eq!(fitted.report.history.len(), 5);
        let path = dir.path().join(format!("m{k}.json"));
        let model = AnyModel::Tsk(fitted.model);
        model.save(&path).unwrap();
        let back = AnyModel::load(&path).unwrap();
        assert_eq!(back, model);
        let before = model.evaluate(&fitted.test).unwrap();
        let after = back.evaluate(&fitted.test).unwrap();
        assert_eq!(before.rmse.to_bits(), after.rmse.to_bits());
        assert_eq!(after.rmse.to_bits(), fitted.report.test_metrics.rmse.to_bits());
    }
}

#[test]
fn network_reloads_bit_exact() {
    let data = wave_data(200);
    let fitted = ann::fit(&data, 4, &short()).unwrap();
    let model = AnyModel::Mlp(fitted.model);
    let back = AnyModel::from_json(&match &model {
        AnyModel::Mlp(m) => m.to_json().unwrap(),
        AnyModel::Tsk(_) => unreachable!(),
    })
    .unwrap();
    assert_eq!(back, model);
}

#[test]
fn sequential_and_parallel_agree_exactly() {
    let data = wave_data(400);
    let seq = fit(&data, &Structure::grid(2), &TrainConfig { exec: Exec::Sequential, ..short() }).unwrap();
    let par = fit(&data, &Structure::grid(2), &TrainConfig { exec: Exec::Parallel, ..short() }).unwrap();
    assert_eq!(seq.model, par.model);
    assert_eq!(seq.report, par.report);

    let g = Geometry::new(3, 4, 16, 0.0, 2.0).unwrap();
    let cubes = ["imp", "amp", "freq"]
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let v = (0..g.len()).map(|i| data.samples[(i * 7 + j) % data.len()].predictors[j] as f32).collect();
            CubeFile::new(g, *n, v).unwrap()
        })
        .collect();
    let seismic = SeismicCube::new(cubes).unwrap();
    let a = predict_cube(&seq.model, &seismic, Exec::Sequential).unwrap();
    let b = predict_cube(&seq.model, &seismic, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(smooth_cube(&a, Exec::Sequential).unwrap(), smooth_cube(&b, Exec::Parallel).unwrap());
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(1e-300), Just(-123456.789e10)]
}

proptest! {
    #[test]
    fn dataset_csv_round_trips_bit_exact(
        rows in prop::collection::vec((prop::collection::vec(finite(), 2), finite(), 0u8..3, finite()), 1..30)
    ) {
        let samples = rows
            .iter()
            .map(|(p, t, w, time)| Sample {
                predictors: p.clone(),
                target: *t,
                well_id: Some(format!("W{w}")),
                time_ms: Some(*time),
            })
            .collect();
        let data = Dataset::new(vec!["a".into(), "b".into()], samples).unwrap();
        let mut buf = Vec::new();
        data.to_writer(&mut buf).unwrap();
        let back = Dataset::from_reader(buf.as_slice()).unwrap();
        prop_assert_eq!(back, data);
    }

    #[test]
    fn smoothing_keeps_values_within_input_range(
        values in prop::collection::vec(prop_oneof![4 => 0.0..1.0f64, 1 => Just(f64::NAN)], 2 * 3 * 7)
    ) {
        let g = Geometry::new(2, 3, 7, 100.0, 4.0).unwrap();
        let cube = PropertyCube::from_values(g, values.clone()).unwrap();
        let smoothed = smooth_cube(&cube, Exec::default()).unwrap();
        let lo = values.iter().copied().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max);
        for v in smoothed.values.iter().filter(|v| !v.is_nan()) {
            prop_assert!(*v >= lo && *v <= hi);
        }
    }
}
