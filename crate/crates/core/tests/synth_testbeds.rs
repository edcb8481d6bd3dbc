use gridcast_core::metrics::evaluate_samples;
use gridcast_core::nn::{LossKind, TrainConfig};
use gridcast_core::strategies::{predict, train_baseline, StageConfig};
use gridcast_core::synth::{
    generate, reself_testbed, testbed_config, weekly_testbed_config, SynthConfig, TestbedVariant, HOURS_PER_YEAR,
};
use std::f64::consts::PI;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (i, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= f * p;
            }
            b[col + 1 + i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = rows[0].len();
    let mut ata = vec![vec![0.0; p]; p];
    let mut aty = vec![0.0; p];
    for (r, &v) in rows.iter().zip(y) {
        for i in 0..p {
            aty[i] += r[i] * v;
            for j in 0..p {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    solve(ata, aty)
}

#[test]
fn noiseless_components_are_recoverable() {
    let cfg = SynthConfig {
        n_hours: 2 * 8760,
        seed: 12,
        noise_std: 0.0,
        day_noise_std: 0.0,
        weekday_offsets: [10.0, 20.0, 30.0, 40.0, 50.0, -300.0, -500.0],
        ..SynthConfig::default()
    };
    let data = generate(&cfg).unwrap();
    let temp = data.temperature.values();
    let mut rows = Vec::with_capacity(cfg.n_hours);
    for (t, &temperature) in temp.iter().enumerate() {
        let info = data.calendar.day(data.load.timestamp(t).date_naive());
        let tf = t as f64;
        // weekday dummies absorb the base level
        let mut r = vec![0.0; 7];
        r[info.day_of_week as usize] = 1.0;
        r.extend([
            (2.0 * PI * tf / 24.0).sin(),
            (2.0 * PI * tf / 168.0).sin(),
            (2.0 * PI * tf / HOURS_PER_YEAR).sin(),
            if info.is_holiday { -1.0 } else { 0.0 },
            temperature - cfg.temp_mean,
        ]);
        rows.push(r);
    }
    let coef = least_squares(&rows, data.load.values());
    let mut expected: Vec<f64> = cfg.weekday_offsets.iter().map(|o| cfg.base_mw + o).collect();
    expected.extend([cfg.daily_amp, cfg.weekly_amp, cfg.annual_amp, cfg.holiday_drop, cfg.temp_coupling]);
    for (i, (c, e)) in coef.iter().zip(&expected).enumerate() {
        assert!((c - e).abs() < 1e-6, "coefficient {i}: {c} vs {e}");
    }
}

#[test]
fn every_load_is_positive_on_the_testbeds() {
    for seed in 0..3 {
        for cfg in [
            testbed_config(seed, TestbedVariant::Weekday),
            testbed_config(seed, TestbedVariant::Null),
            weekly_testbed_config(seed),
        ] {
            assert!(cfg.min_load() > 0.0);
            assert!(generate(&cfg).unwrap().load.values().iter().all(|&v| v > 0.0));
        }
    }
    let w = weekly_testbed_config(0);
    assert!(w.weekly_amp >= 0.3 * w.base_mw);
}

#[test]
fn blinded_schema_drops_the_calendar_entries() {
    let tb = reself_testbed(0, TestbedVariant::Weekday).unwrap();
    assert_eq!(tb.blinded.len(), tb.full_dim - 3);
    assert_eq!(tb.full_dim, 171);
    assert!(tb.train.iter().chain(&tb.val).chain(&tb.test).all(|s| s.input.len() == 171));
    assert_eq!((tb.val.len(), tb.test.len()), (56, 140));
    assert!(tb.train.last().unwrap().day_id < tb.val[0].day_id);
    assert!(tb.val.last().unwrap().day_id < tb.test[0].day_id);
}

/// F-ratio of per-day mean residuals grouped by weekday.
fn weekday_f_ratio(groups: &[Vec<f64>; 7]) -> f64 {
    let n: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let means: Vec<f64> = groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect();
    let between: f64 = groups.iter().zip(&means).map(|(g, m)| g.len() as f64 * (m - grand).powi(2)).sum::<f64>() / 6.0;
    let within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum::<f64>()
        / (n - 7) as f64;
    between / within
}

fn blind_residual_groups(variant: TestbedVariant) -> [Vec<f64>; 7] {
    let tb = reself_testbed(0, variant).unwrap();
    let cfg = StageConfig {
        hidden: vec![16],
        train: TrainConfig {
            epochs: 400,
            learning_rate: 3e-3,
            early_stop_patience: Some(40),
            ..TrainConfig::default()
        },
        feature_subset: Some(tb.blinded.clone()),
    };
    let model = train_baseline(&tb.train, &tb.val, &cfg, LossKind::L2).unwrap();
    assert!(evaluate_samples(&model, &tb.test, "test").unwrap().metrics.mape_pct < 15.0);
    let mut groups: [Vec<f64>; 7] = Default::default();
    for s in &tb.test {
        let p = predict(&model, s).unwrap();
        let r = s.target.iter().zip(&p).map(|(t, p)| t - p).sum::<f64>() / 24.0;
        let dow = tb.data.calendar.day(s.day_id).day_of_week as usize;
        groups[dow].push(r);
    }
    groups
}

#[test]
fn blind_model_leaves_weekday_structure_in_residuals() {
    let f = weekday_f_ratio(&blind_residual_groups(TestbedVariant::Weekday));
    assert!(f > 1.0, "F = {f}");
}
