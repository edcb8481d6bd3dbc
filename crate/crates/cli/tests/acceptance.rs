//! Acceptance criteria A1-A10, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.
//! Positional arguments filter criteria by id (`cargo test --test
//! acceptance -- A5`); A10 needs `--ignored` or `--include-ignored` and a
//! data directory in `GRIDCAST_A10_DATA`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::Duration as Days;
use gridcast_core::dataset::{ingest_csv, ingest_weather, CalendarInfo, Channel};
use gridcast_core::features::{
    aggregate_daily, aggregate_monthly, build_day_ahead, build_day_ahead_many, build_month_ahead, build_year_ahead,
    day_ahead_input, window_count, FeatureSample,
};
use gridcast_core::metrics::{evaluate_samples, mae_rmse, mape, EvaluationReport, Scenario};
use gridcast_core::nn::{gradients, loss_value, train, Example, LossKind, MlpModel, TrainConfig};
use gridcast_core::strategies::{
    afore_decode, afore_encode, gap_fill, train_afore, train_baseline, train_reself, StageConfig, StrategyArtifact,
};
use gridcast_core::synth::{
    day_ahead_splits, generate, reself_testbed, weekly_testbed_config, SynthConfig, TestbedVariant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Option<Duration>,
    ignored: bool,
    run: fn() -> Outcome,
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let with_ignored = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let only_ignored = args.iter().any(|a| a == "--ignored");
    let filters: Vec<String> = args
        .iter()
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.to_lowercase())
        .collect();
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: "A1", title: "gradient suite", budget: secs(30), ignored: false, run: a1 },
        Criterion { id: "A2", title: "anchored target algebra", budget: secs(1), ignored: false, run: a2 },
        Criterion { id: "A3", title: "self-distillation identities", budget: secs(30), ignored: false, run: a3 },
        Criterion { id: "A4", title: "schema constants", budget: secs(5), ignored: false, run: a4 },
        Criterion { id: "A5", title: "residual learning directional", budget: secs(600), ignored: false, run: a5 },
        Criterion { id: "A6", title: "anchored target directional", budget: secs(600), ignored: false, run: a6 },
        Criterion { id: "A7", title: "gap-fill causality and equivalence", budget: secs(60), ignored: false, run: a7 },
        Criterion { id: "A8", title: "metrics oracle", budget: secs(5), ignored: false, run: a8 },
        Criterion { id: "A9", title: "end-to-end determinism", budget: None, ignored: false, run: a9 },
        Criterion { id: "A10", title: "public data directional", budget: None, ignored: true, run: a10 },
    ];

    let mut failed = 0;
    for c in &criteria {
        if !filters.is_empty() && !filters.iter().any(|f| c.id.to_lowercase() == *f) {
            continue;
        }
        if (c.ignored && !with_ignored) || (!c.ignored && only_ignored) {
            if c.ignored {
                println!("{} IGNORED {} (run with --ignored)", c.id, c.title);
            }
            continue;
        }
        let t = Instant::now();
        let o = (c.run)();
        let elapsed = t.elapsed();
        let in_budget = c.budget.is_none_or(|b| elapsed <= b);
        let pass = o.pass && in_budget;
        let budget = c.budget.map(|b| format!(" / {} s", b.as_secs())).unwrap_or_default();
        println!(
            "{} {} {}: {} [{:.1} s{budget}]",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.title,
            o.detail,
            elapsed.as_secs_f64()
        );
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------- A1

/// Hidden-layer pre-activations and output of `model` on `x`, computed
/// from the raw parameters.
fn plain_forward(model: &MlpModel, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dims = model.layer_dims();
    let mut hidden_pre = Vec::new();
    let mut a = x.to_vec();
    for k in 0..model.n_layers() {
        let (w, b) = (model.weights(k), model.biases(k));
        let mut z = vec![0.0; dims[k + 1]];
        for (j, zj) in z.iter_mut().enumerate() {
            *zj = b[j] + (0..dims[k]).map(|i| w[j * dims[k] + i] * a[i]).sum::<f64>();
        }
        if k + 1 < model.n_layers() {
            hidden_pre.extend(&z);
            a = z.iter().map(|v| v.max(0.0)).collect();
        } else {
            a = z;
        }
    }
    (hidden_pre, a)
}

const KINK_MARGIN: f64 = 1e-2;

/// True when any sample sits within the margin of a point where the loss or
/// the relu is not differentiable.
fn near_kink(model: &MlpModel, batch: &[Example], kind: LossKind) -> bool {
    batch.iter().any(|s| {
        let (pre, out) = plain_forward(model, &s.input);
        if pre.iter().any(|z| z.abs() < KINK_MARGIN) {
            return true;
        }
        out.iter().zip(&s.target).any(|(&p, &t)| match kind {
            LossKind::L2 => false,
            LossKind::L1 | LossKind::Mape => (p - t).abs() < KINK_MARGIN,
            LossKind::SmoothL1 => ((p - t).abs() - 1.0).abs() < KINK_MARGIN,
            LossKind::Osdf { lambda, .. } => {
                (t - (1.0 - lambda) * p).abs() < KINK_MARGIN || (t + lambda * p).abs() < 0.1
            }
        })
    })
}

fn batch_loss(model: &MlpModel, batch: &[Example], kind: LossKind) -> f64 {
    batch
        .iter()
        .map(|s| loss_value(kind, &plain_forward(model, &s.input).1, &s.target).unwrap())
        .sum::<f64>()
        / batch.len() as f64
}

fn a1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let mut redraws = 0;
    let mut covered = Vec::new();
    for trial in 0..20 {
        let kind = match trial % 5 {
            0 => LossKind::L1,
            1 => LossKind::L2,
            2 => LossKind::SmoothL1,
            3 => LossKind::Mape,
            _ => LossKind::Osdf {
                lambda: rng.random_range(0.05..0.6),
                stop_gradient: false,
            },
        };
        let (model, batch) = loop {
            let mut dims = vec![rng.random_range(2..7)];
            for _ in 0..rng.random_range(1..3) {
                dims.push(rng.random_range(3..9));
            }
            dims.push(rng.random_range(1..5));
            let model = MlpModel::new(&dims, rng.random()).unwrap();
            let batch: Vec<Example> = (0..rng.random_range(1..6))
                .map(|_| {
                    Example::new(
                        (0..dims[0]).map(|_| rng.random_range(-2.0..2.0)).collect(),
                        (0..dims[dims.len() - 1]).map(|_| rng.random_range(0.5..3.0)).collect(),
                    )
                })
                .collect();
            if near_kink(&model, &batch, kind) {
                redraws += 1;
                continue;
            }
            break (model, batch);
        };
        let (_, grads) = gradients(&model, &batch, kind).unwrap();
        let analytic = grads.flatten();
        let base = model.params();
        for (i, &a) in analytic.iter().enumerate() {
            let mut probe = model.clone();
            let mut p = base.clone();
            p[i] = base[i] + h;
            probe.set_params(&p).unwrap();
            let up = batch_loss(&probe, &batch, kind);
            p[i] = base[i] - h;
            probe.set_params(&p).unwrap();
            let down = batch_loss(&probe, &batch, kind);
            let numeric = (up - down) / (2.0 * h);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        covered.push(kind.name());
    }
    covered.sort();
    covered.dedup();
    outcome(
        worst < 1e-4 && covered.len() == 5,
        format!(
            "max relative error {worst:.2e} over 20 triples, {} loss kinds, {redraws} near-kink draws replaced",
            covered.len()
        ),
    )
}

// ---------- A2

fn a2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut encode_ok = true;
    for _ in 0..1000 {
        let load = rng.random_range(1e-3..1e5);
        let anchor = rng.random_range(1e-3..1e5);
        let pct = afore_encode(&[load], &[anchor]).unwrap();
        encode_ok &= (pct[0] - (load / anchor - 1.0)).abs() <= 1e-12 * (load / anchor).max(1.0);
        let back = afore_decode(&pct, &[anchor]).unwrap()[0];
        worst = worst.max((back - load).abs() / load);
    }
    let s1 = loss_value(LossKind::SmoothL1, &[0.5], &[0.0]).unwrap();
    let s2 = loss_value(LossKind::SmoothL1, &[2.0], &[0.0]).unwrap();
    outcome(
        worst <= 1e-9 && encode_ok && s1 == 0.125 && s2 == 1.5,
        format!("round-trip max relative error {worst:.2e}; smooth-l1(0.5) = {s1}, smooth-l1(2.0) = {s2}"),
    )
}

// ---------- A3

fn a3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data: Vec<Example> = (0..10)
        .map(|_| {
            Example::new(
                (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
                (0..3).map(|_| rng.random_range(1.0..5.0)).collect(),
            )
        })
        .collect();
    let model = MlpModel::new(&[4, 6, 3], 11).unwrap();
    // 10 samples in batches of 2 over 10 epochs: 50 steps
    let cfg = TrainConfig {
        epochs: 10,
        batch_size: 2,
        learning_rate: 1e-2,
        seed: 5,
        ..TrainConfig::default()
    };
    let reference = train(&model, &data, &[], LossKind::Mape, &cfg).unwrap();
    let bits = |m: &MlpModel| m.params().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
    let mut identical = bits(&reference.model) != bits(&model);
    for stop_gradient in [false, true] {
        let zero = LossKind::Osdf {
            lambda: 0.0,
            stop_gradient,
        };
        let run = train(&model, &data, &[], zero, &cfg).unwrap();
        identical &= bits(&run.model) == bits(&reference.model);
        identical &= run
            .history
            .iter()
            .zip(&reference.history)
            .all(|(a, b)| a.train_loss.to_bits() == b.train_loss.to_bits());
    }

    let mut worst: f64 = 0.0;
    for lambda in [0.1, 0.2, 0.5] {
        for _ in 0..100 {
            let g: Vec<f64> = (0..rng.random_range(1..25)).map(|_| rng.random_range(1e-2..1e4)).collect();
            let v = loss_value(LossKind::osdf(lambda).unwrap(), &g, &g).unwrap();
            worst = worst.max((v - lambda / (1.0 + lambda)).abs());
        }
    }
    outcome(
        identical && worst <= 1e-9,
        format!(
            "lambda=0 trajectory {} over 50 steps; loss at phi=g off by at most {worst:.1e}",
            if identical { "bit-identical" } else { "DIFFERS" }
        ),
    )
}

// ---------- A4

fn a4() -> Outcome {
    let data = generate(&SynthConfig {
        n_hours: 2 * 365 * 24,
        seed: 4,
        ..SynthConfig::default()
    })
    .unwrap();
    let humidity = data.weather.get("loc0", Channel::Humidity).unwrap();
    let first = data.load.first_date();
    let day = build_day_ahead(&data.load, &data.temperature, &data.calendar, first + Days::days(400)).unwrap();
    let months = aggregate_monthly(&data.load, &data.temperature, humidity);
    let year = build_year_ahead(&months, &data.calendar, 2017, 6).unwrap();
    let days = aggregate_daily(&data.load, &data.temperature, humidity);
    let month = build_month_ahead(&days, &data.calendar, first + Days::days(300)).unwrap();
    let dims = (day.input.len(), year.input.len(), month.input.len());

    let short = generate(&SynthConfig {
        n_hours: 1000,
        ..SynthConfig::default()
    })
    .unwrap();
    let day_windows = Scenario::DAY_AHEAD.with_stride(1).samples(&short.load, &short.weather).unwrap().len();
    let week_windows = Scenario::WEEK_AHEAD.with_stride(1).samples(&short.load, &short.weather).unwrap().len();
    let oracle = |input: usize, gap: usize, horizon: usize| 1000 - (input + gap + horizon) + 1;
    let counts_ok = day_windows == 857
        && window_count(1000, 72, 48, 24, 1) == 857
        && day_windows == oracle(72, 48, 24)
        && week_windows == oracle(336, 48, 168)
        && window_count(1000, 336, 48, 168, 1) == week_windows;
    outcome(
        dims == (171, 89, 115) && counts_ok,
        format!(
            "dimensions {}/{}/{}; 1000-hour windows: {day_windows} day-ahead, {week_windows} week-ahead",
            dims.0, dims.1, dims.2
        ),
    )
}

// ---------- A5 and A6

fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn test_mape(artifact: &StrategyArtifact, test: &[FeatureSample], reports: &mut Vec<EvaluationReport>) -> f64 {
    let r = evaluate_samples(artifact, test, "test").unwrap();
    let m = r.metrics.mape_pct;
    reports.push(r);
    m
}

fn stage(hidden: usize, epochs: usize, patience: usize, seed: u64, subset: Option<Vec<usize>>) -> StageConfig {
    StageConfig {
        hidden: vec![hidden],
        train: TrainConfig {
            epochs,
            batch_size: 32,
            learning_rate: 3e-3,
            seed,
            early_stop_patience: Some(patience),
            ..TrainConfig::default()
        },
        feature_subset: subset,
    }
}

fn a5() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut reports = Vec::new();
    for variant in [TestbedVariant::Weekday, TestbedVariant::Null] {
        let (mut base, mut res) = (Vec::new(), Vec::new());
        for seed in 0..10 {
            let tb = reself_testbed(seed, variant).unwrap();
            let first = stage(16, 400, 40, seed, Some(tb.blinded.clone()));
            let second = stage(16, 400, 40, seed + 1000, None);
            let b = train_baseline(&tb.train, &tb.val, &first, LossKind::L2).unwrap();
            let r = train_reself(&tb.train, &tb.val, &first, &second, LossKind::L2).unwrap();
            base.push(test_mape(&b, &tb.test, &mut reports));
            res.push(test_mape(&r, &tb.test, &mut reports));
        }
        let ((mb, sb), (mr, sr)) = (mean_std(&base), mean_std(&res));
        let pooled = ((sb * sb + sr * sr) / 2.0).sqrt();
        let gap = mb - mr;
        let ok = match variant {
            TestbedVariant::Weekday => mr < mb && gap > pooled,
            TestbedVariant::Null => gap.abs() <= pooled,
        };
        pass &= ok;
        lines.push(format!(
            "{variant:?}: baseline {mb:.3} ± {sb:.3}, residual {mr:.3} ± {sr:.3}, gap {gap:.3} vs pooled std {pooled:.3}"
        ));
    }
    pass &= rmse_dominates(&reports);
    outcome(pass, lines.join("; "))
}

fn a6() -> Outcome {
    let (mut base, mut anchored) = (Vec::new(), Vec::new());
    let mut reports = Vec::new();
    for seed in 0..10 {
        let data = generate(&weekly_testbed_config(seed)).unwrap();
        let (train, val, test) = day_ahead_splits(&data, 56, 140).unwrap();
        let cfg = stage(16, 200, 30, seed, None);
        let b = train_baseline(&train, &val, &cfg, LossKind::L2).unwrap();
        let a = train_afore(&train, &val, &cfg, LossKind::L2).unwrap();
        base.push(test_mape(&b, &test, &mut reports));
        anchored.push(test_mape(&a, &test, &mut reports));
    }
    let ((mb, sb), (ma, sa)) = (mean_std(&base), mean_std(&anchored));
    let wins = base.iter().zip(&anchored).filter(|(b, a)| a <= b).count();
    outcome(
        ma <= mb && rmse_dominates(&reports),
        format!("baseline {mb:.3} ± {sb:.3}, anchored {ma:.3} ± {sa:.3}; anchored better on {wins}/10 seeds"),
    )
}

fn rmse_dominates(reports: &[EvaluationReport]) -> bool {
    reports
        .iter()
        .all(|r| r.metrics.rmse_mw >= r.metrics.mae_mw * (1.0 - 1e-12) && r.metrics.rmse_norm >= r.metrics.mae_norm * (1.0 - 1e-12))
}

// ---------- A7

fn a7() -> Outcome {
    let data = generate(&SynthConfig {
        n_hours: 200 * 24,
        seed: 17,
        ..SynthConfig::default()
    })
    .unwrap();
    let first = data.load.first_date();
    let days: Vec<_> = (28..150).map(|k| first + Days::days(k)).collect();
    let (samples, _) = build_day_ahead_many(&data.load, &data.temperature, &data.calendar, days);
    let (train, val) = samples.split_at(100);
    let cfg = stage(8, 15, 5, 1, None);
    let artifacts = [
        train_baseline(train, val, &cfg, LossKind::L2).unwrap(),
        train_afore(train, val, &cfg, LossKind::L2).unwrap(),
    ];

    let gap_start = first + Days::days(160);
    let r0 = data.load.day_range(gap_start).unwrap().start;
    let mut holed = data.load.clone();
    for i in r0..r0 + 7 * 24 {
        holed.mask(i);
    }
    let mut equal = true;
    let mut causal = true;
    for a in &artifacts {
        let out = gap_fill(&holed, &data.temperature, &data.calendar, a, gap_start, 7).unwrap();

        // oracle: one day at a time on a plain vector
        let mut v = holed.values().to_vec();
        let temp = data.temperature.values();
        for k in 0..7usize {
            let at = r0 + 24 * k;
            let mut input = Vec::with_capacity(171);
            for lag in [1, 7, 28] {
                input.extend_from_slice(&v[at - 24 * lag..at - 24 * lag + 24]);
            }
            for lag in [1, 7, 28, 0] {
                input.extend_from_slice(&temp[at - 24 * lag..at - 24 * lag + 24]);
            }
            let info = data.calendar.day(gap_start + Days::days(k as i64));
            input.extend([f64::from(u8::from(info.is_holiday)), f64::from(u8::from(info.is_weekend)), f64::from(info.day_of_week)]);
            let anchor = v[at - 168..at - 144].to_vec();
            let p = a.predict_input(&input, Some(&anchor)).unwrap();
            v[at..at + 24].copy_from_slice(&p);
        }
        equal &= out.values() == &v[..];
        // the library's own input builder agrees with the oracle layout
        let (input, _) = day_ahead_input(&out, &data.temperature, &data.calendar, gap_start + Days::days(3)).unwrap();
        equal &= input[..24] == v[r0 + 48..r0 + 72];

        let mut poisoned = holed.clone();
        let mut temp_poisoned = data.temperature.clone();
        for i in r0 + 7 * 24..poisoned.len() {
            poisoned.mask(i);
            temp_poisoned.mask(i);
        }
        let again = gap_fill(&poisoned, &temp_poisoned, &data.calendar, a, gap_start, 7).unwrap();
        causal &= again.values()[..r0 + 7 * 24] == out.values()[..r0 + 7 * 24];
    }
    outcome(
        equal && causal,
        format!(
            "7-day fill {} the day-by-day oracle for baseline and anchored models; post-gap poisoning {}",
            if equal { "matches" } else { "DIFFERS FROM" },
            if causal { "leaves the fill unchanged" } else { "CHANGES the fill" }
        ),
    )
}

// ---------- A8

fn a8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
    let (mut oracle_ok, mut dominance_ok, mut scale_ok) = (true, true, true);
    for _ in 0..1000 {
        let n = rng.random_range(1..49);
        let actual: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..1e4)).collect();
        let predicted: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..1e4)).collect();
        let norm = rng.random_range(1.0..1e4);
        let (mut ape, mut ae, mut se) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let e = actual[i] - predicted[i];
            ape += (e / actual[i]).abs();
            ae += e.abs();
            se += e * e;
        }
        let nf = n as f64;
        let m = mape(&actual, &predicted).unwrap();
        let r = mae_rmse(&actual, &predicted, norm).unwrap();
        oracle_ok &= close(m, 100.0 * ape / nf)
            && close(r.mae_phys, ae / nf)
            && close(r.rmse_phys, (se / nf).sqrt())
            && close(r.mae_norm, ae / nf / norm)
            && close(r.rmse_norm, (se / nf).sqrt() / norm);
        dominance_ok &= r.rmse_phys >= r.mae_phys * (1.0 - 1e-12);
        let c = rng.random_range(1e-3..1e3);
        let ca: Vec<f64> = actual.iter().map(|v| v * c).collect();
        let cp: Vec<f64> = predicted.iter().map(|v| v * c).collect();
        scale_ok &= (mape(&ca, &cp).unwrap() - m).abs() <= 1e-10 * m.max(1.0);
    }
    outcome(
        oracle_ok && dominance_ok && scale_ok,
        format!(
            "1000 random pairs: loop oracle {}, rmse >= mae {}, mape scale invariance {}",
            verdict(oracle_ok),
            verdict(dominance_ok),
            verdict(scale_ok)
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "VIOLATED"
    }
}

// ---------- A9

fn gridcast(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gridcast"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).trim().to_string())
    }
}

fn pipeline(root: &Path) -> Result<Vec<u8>, String> {
    gridcast(&["synth", "--seed", "21", "--hours", "6000", "--out", "data"], root)?;
    gridcast(
        &["train", "--data", "data", "--out", "models", "--seed", "21", "--strategy", "reself", "--epochs", "15"],
        root,
    )?;
    gridcast(
        &["evaluate", "--data", "data", "--artifact", "models/reself_s21.json", "--out", "report"],
        root,
    )?;
    std::fs::read(root.join("report/report.json")).map_err(|e| e.to_string())
}

fn a9() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let runs: Vec<Result<Vec<u8>, String>> = dirs.iter().map(|d| pipeline(d.path())).collect();
    match (&runs[0], &runs[1]) {
        (Ok(a), Ok(b)) => {
            let has_field = String::from_utf8_lossy(a).contains("\"mape_pct\"");
            outcome(
                a == b && has_field,
                format!(
                    "synth -> train -> evaluate twice: report JSON {} ({} bytes)",
                    if a == b { "byte-identical" } else { "DIFFERS" },
                    a.len()
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => outcome(false, format!("pipeline failed: {e}")),
    }
}

// ---------- A10

/// Directory with `load.csv`, `weather.csv` and optionally `holidays.txt`
/// converted from the public Spanish demand data set.
fn a10() -> Outcome {
    let Some(dir) = std::env::var_os("GRIDCAST_A10_DATA").map(PathBuf::from) else {
        return outcome(false, "GRIDCAST_A10_DATA is not set");
    };
    let load = match ingest_csv(dir.join("load.csv"), Channel::Load) {
        Ok(l) => l,
        Err(e) => return outcome(false, format!("cannot read load: {e}")),
    };
    let weather = match ingest_weather(dir.join("weather.csv")) {
        Ok(w) => w,
        Err(e) => return outcome(false, format!("cannot read weather: {e}")),
    };
    let calendar = CalendarInfo::from_file(dir.join("holidays.txt")).unwrap_or_default();
    let Some(temperature) = weather.primary_temperature() else {
        return outcome(false, "weather has no temperature channel");
    };
    let first = load.first_date();
    let days = (0..load.len() / 24).map(|k| first + Days::days(k as i64));
    let (mut samples, _) = build_day_ahead_many(&load, temperature, &calendar, days);
    if samples.len() < 365 + 90 + 100 {
        return outcome(false, format!("only {} usable days", samples.len()));
    }
    let test = samples.split_off(samples.len() - 365);
    let val = samples.split_off(samples.len() - 90);
    let (mut base, mut res) = (Vec::new(), Vec::new());
    let mut reports = Vec::new();
    for seed in 0..3 {
        let first = stage(64, 300, 30, seed, None);
        let second = stage(32, 300, 30, seed + 1000, None);
        base.push(test_mape(&train_baseline(&samples, &val, &first, LossKind::L2).unwrap(), &test, &mut reports));
        res.push(test_mape(
            &train_reself(&samples, &val, &first, &second, LossKind::L2).unwrap(),
            &test,
            &mut reports,
        ));
    }
    let ((mb, sb), (mr, sr)) = (mean_std(&base), mean_std(&res));
    outcome(mr < mb, format!("baseline {mb:.3} ± {sb:.3}, residual {mr:.3} ± {sr:.3} over 3 seeds"))
}
