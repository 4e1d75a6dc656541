//! Acceptance criteria, one PASS/FAIL/SKIP line each.
//!
//! Criteria 10-12 need real competition data and run only when both
//! `SIMFORECAST_TARGETS` (targets, each series including its final `h`
//! holdout values) and `SIMFORECAST_REFERENCE` (reference corpus) point at
//! corpus CSV files.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;
use simforecast::dataio::{build_reference_set, rebuild_for_length, read_corpus, CorpusRecord};
use simforecast::forecaster::{
    aggregate_paths, calibrate_delta, delta_grid, forecast, forecast_with, interval_bounds,
    neighbor_paths,
};
use simforecast::metrics::{coverage_stats, mase, msis};
use simforecast::preprocess::{box_cox, inverse_box_cox, seasonality_test, stl_decompose};
use simforecast::similarity::{distance_dtw, nearest_k};
use simforecast::{
    Aggregator, DistanceMeasure, ForecastConfig, Frequency, PreprocessConfig, ReferenceSet,
    TimeSeries,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("DTW oracle equivalence", c01_dtw_oracle),
        ("Box-Cox round trip", c02_box_cox_round_trip),
        ("STL reconstruction", c03_stl),
        ("identity-neighbour exactness", c04_identity_neighbour),
        ("seasonality test calibration", c05_seasonality_test),
        ("MASE/MSIS hand cases", c06_metric_hand_cases),
        ("delta monotonicity and determinism", c07_delta),
        ("k-monotone trend on synthetic corpus", c08_k_trend),
        ("determinism across thread counts", c09_determinism),
        ("benchmark MASE reproduction", c10_benchmark_mase),
        ("benchmark interval quality", c11_interval_quality),
        ("DTW vs L2 runtime ratio", c12_runtime_ratio),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Outcome::Fail(format!("panicked: {}", panic_message(&p))));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{:>2}] {name}: {detail} ({secs:.1}s)", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

/// Minimum path cost over every monotone warping path, by exhaustive
/// recursion from the start cell.
fn dtw_enumerate(a: &[f64], b: &[f64]) -> f64 {
    fn walk(a: &[f64], b: &[f64], v: usize, w: usize, acc: f64) -> f64 {
        let acc = acc + (a[v] - b[w]).abs();
        if v + 1 == a.len() && w + 1 == b.len() {
            return acc;
        }
        let mut best = f64::INFINITY;
        if w + 1 < b.len() {
            best = best.min(walk(a, b, v, w + 1, acc));
        }
        if v + 1 < a.len() {
            best = best.min(walk(a, b, v + 1, w, acc));
        }
        if v + 1 < a.len() && w + 1 < b.len() {
            best = best.min(walk(a, b, v + 1, w + 1, acc));
        }
        best
    }
    walk(a, b, 0, 0, 0.0)
}

fn c01_dtw_oracle() -> Outcome {
    let mut rng = common::rng(101);
    let mut worst_real: f64 = 0.0;
    let mut exact_mismatch = 0;
    for pair in 0..500 {
        let la = rng.random_range(1..=7);
        let lb = rng.random_range(1..=7);
        if pair % 2 == 0 {
            // quarter-integer values: every partial sum is exact in f64
            let mut q = || f64::from(rng.random_range(-40i32..=40)) / 4.0;
            let a: Vec<f64> = (0..la).map(|_| q()).collect();
            let b: Vec<f64> = (0..lb).map(|_| q()).collect();
            if distance_dtw(&a, &b).unwrap() != dtw_enumerate(&a, &b) {
                exact_mismatch += 1;
            }
        } else {
            let a: Vec<f64> = (0..la).map(|_| rng.random_range(-100.0..100.0)).collect();
            let b: Vec<f64> = (0..lb).map(|_| rng.random_range(-100.0..100.0)).collect();
            let brute = dtw_enumerate(&a, &b);
            let rel = (distance_dtw(&a, &b).unwrap() - brute).abs() / brute.max(1.0);
            worst_real = worst_real.max(rel);
        }
    }
    ensure(
        exact_mismatch == 0 && worst_real < 1e-12,
        format!(
            "500 pairs, {exact_mismatch} exact-arithmetic mismatches, worst relative gap on real values {worst_real:.1e}"
        ),
    )
}

fn c02_box_cox_round_trip() -> Outcome {
    let mut rng = common::rng(202);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let lambda = match case {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..=1.0),
        };
        let len = rng.random_range(1..50);
        let x: Vec<f64> = (0..len)
            .map(|_| 10f64.powf(rng.random_range(-3.0..5.0)))
            .collect();
        let back = inverse_box_cox(&box_cox(&x, lambda).unwrap(), lambda).unwrap();
        for (a, b) in x.iter().zip(&back) {
            worst = worst.max((a - b).abs() / a);
        }
    }
    ensure(
        worst < 1e-10,
        format!("1000 cases, worst relative error {worst:.2e}"),
    )
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn c03_stl() -> Outcome {
    let mut rng = common::rng(303);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let period = rng.random_range(2..=12);
        let len = rng.random_range(2 * period + 1..=120);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-50.0..50.0)).collect();
        let d = stl_decompose(&x, period).unwrap();
        for t in 0..len {
            worst = worst.max((d.trend[t] + d.seasonal[t] + d.remainder[t] - x[t]).abs());
        }
    }
    let truth: Vec<f64> = (1..=48)
        .map(|t| 10.0 * (std::f64::consts::TAU * t as f64 / 4.0).sin())
        .collect();
    let x: Vec<f64> = (1..=48).map(|t| t as f64).zip(&truth).map(|(t, s)| t + s).collect();
    let d = stl_decompose(&x, 4).unwrap();
    let corr = pearson(&d.seasonal, &truth);
    ensure(
        worst <= 1e-12 && corr > 0.99,
        format!("max reconstruction error {worst:.1e} over 200 series; seasonal correlation {corr:.5}"),
    )
}

fn c04_identity_neighbour() -> Outcome {
    let h = 6;
    let n = 20;
    let corpus = common::ets_corpus(404, 60, 26..=40, Frequency::YEARLY, h);
    let (set, _) =
        build_reference_set(&corpus, n, h, Frequency::YEARLY, &PreprocessConfig::scaling_only())
            .unwrap();
    let mut worst: f64 = 0.0;
    let mut wrong_neighbour = 0;
    for entry in set.entries().iter().step_by(7) {
        let target = TimeSeries::new("t", Frequency::YEARLY, entry.history().to_vec(), h).unwrap();
        for distance in [DistanceMeasure::L1, DistanceMeasure::L2, DistanceMeasure::Dtw] {
            let cfg = ForecastConfig {
                distance,
                k: 1,
                ..Default::default()
            };
            let result = forecast(&target, &set, &cfg).unwrap();
            if result.neighbor_ids != [entry.id()] {
                wrong_neighbour += 1;
            }
            for (p, f) in result.point.iter().zip(entry.future_path()) {
                worst = worst.max(((p - f) / f).abs());
            }
        }
    }
    ensure(
        wrong_neighbour == 0 && worst <= 1e-12,
        format!("3 distances, worst relative deviation from the raw future {worst:.1e}"),
    )
}

fn c05_seasonality_test() -> Outcome {
    let mut rng = common::rng(505);
    let z = PreprocessConfig::for_frequency(Frequency::MONTHLY).acf_confidence_z;
    let false_positives = (0..1000)
        .filter(|_| seasonality_test(&common::white_noise(&mut rng, 120), 12, z))
        .count();
    let mut missed = 0;
    for _ in 0..1000 {
        let len = rng.random_range(60..=120);
        let amplitude = rng.random_range(0.1..100.0);
        let level = rng.random_range(-50.0..500.0);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let x: Vec<f64> = (0..len)
            .map(|t| level + amplitude * (std::f64::consts::TAU * t as f64 / 12.0 + phase).sin())
            .collect();
        if !seasonality_test(&x, 12, z) {
            missed += 1;
        }
    }
    let rate = false_positives as f64 / 1000.0;
    ensure(
        rate <= 0.15 && missed == 0,
        format!(
            "false-positive rate {:.1}% on noise, {missed}/1000 sinusoids missed",
            100.0 * rate
        ),
    )
}

fn c06_metric_hand_cases() -> Outcome {
    let ins = [1.0, 2.0, 3.0, 4.0];
    let cases: Vec<(&str, f64, f64)> = vec![
        ("mase perfect", mase(&[5.0], &[5.0], &ins, 1).unwrap(), 0.0),
        ("mase naive", mase(&[5.0], &[4.0], &ins, 1).unwrap(), 1.0),
        (
            "mase derived",
            mase(&[10.0, 10.0], &[12.0, 12.0], &[10.0, 10.0, 10.0, 12.0], 1).unwrap(),
            3.0,
        ),
        (
            "msis inside",
            msis(&[5.0, 6.0], &[4.0, 4.0], &[6.5, 8.0], &ins, 1, 0.05).unwrap(),
            3.25,
        ),
        (
            "msis upper miss",
            msis(&[5.0, 6.5], &[4.0, 4.0], &[6.0, 6.0], &ins, 1, 0.05).unwrap(),
            (2.0 + 2.0 + 40.0 * 0.5) / 2.0,
        ),
        (
            "msis degenerate",
            msis(&[3.0], &[3.0], &[3.0], &ins, 1, 0.05).unwrap(),
            0.0,
        ),
    ];
    let mut bad: Vec<String> = cases
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-12)
        .map(|(name, got, want)| format!("{name}: {got} != {want}"))
        .collect();
    let cov = |y: &[f64], l: &[f64], u: &[f64]| {
        let c = coverage_stats(y, l, u, &ins, 1).unwrap();
        (c.coverage, c.upper_coverage)
    };
    for (name, got, want) in [
        ("all inside", cov(&[1.0, 2.0], &[0.0; 2], &[3.0; 2]), (1.0, 1.0)),
        ("on upper bound", cov(&[3.0, 3.0], &[0.0; 2], &[3.0; 2]), (0.0, 0.0)),
        (
            "three of four",
            cov(&[1.0, 2.0, 2.5, 9.0], &[0.0; 4], &[3.0; 4]),
            (0.75, 0.75),
        ),
    ] {
        if got != want {
            bad.push(format!("coverage {name}: {got:?} != {want:?}"));
        }
    }
    let total = cases.len() + 3;
    ensure(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{total} cases exact")
        } else {
            bad.join("; ")
        },
    )
}

fn c07_delta() -> Outcome {
    let mut rng = common::rng(707);
    let grid = delta_grid(0.01);
    let mut violations = 0;
    for _ in 0..300 {
        let k = rng.random_range(2..60);
        let paths: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..6).map(|_| rng.random_range(0.1..1000.0)).collect())
            .collect();
        let mut previous: Option<Vec<f64>> = None;
        for &delta in &grid {
            let (l, u) = interval_bounds(&paths, 0.05, delta).unwrap();
            let width: Vec<f64> = u.iter().zip(&l).map(|(u, l)| u - l).collect();
            if let Some(p) = &previous {
                violations += width.iter().zip(p).filter(|(w, p)| **w < **p).count();
            }
            previous = Some(width);
        }
    }

    let h = 6;
    let corpus = common::ets_corpus(708, 300, 30..=50, Frequency::YEARLY, h);
    let (set, _) = build_reference_set(
        &corpus,
        20,
        h,
        Frequency::YEARLY,
        &PreprocessConfig::for_frequency(Frequency::YEARLY),
    )
    .unwrap();
    let cfg = ForecastConfig {
        k: 50,
        ..Default::default()
    };
    let mut off_grid = 0;
    let mut nondeterministic = 0;
    let mut target_rng = common::rng(709);
    for _ in 0..20 {
        let values = common::ets_series(&mut target_rng, 20, 1);
        let target = TimeSeries::new("t", Frequency::YEARLY, values, h).unwrap();
        let a = calibrate_delta(&target, &set, &cfg).unwrap();
        let b = calibrate_delta(&target, &set, &cfg).unwrap();
        if a != b {
            nondeterministic += 1;
        }
        if !grid.contains(&a.delta_star) {
            off_grid += 1;
        }
    }
    ensure(
        violations == 0 && off_grid == 0 && nondeterministic == 0,
        format!(
            "{violations} width decreases over 300 path sets x 101 deltas; 20 calibrations: {off_grid} off-grid, {nondeterministic} non-deterministic"
        ),
    )
}

fn c08_k_trend() -> Outcome {
    let (n, h) = (20, 6);
    let mut lines = Vec::new();
    let mut all_ok = true;
    for seed in [1u64, 2, 3] {
        let corpus = common::ets_corpus(800 + seed, 5000, n + h..=60, Frequency::YEARLY, h);
        let (set, _) = build_reference_set(
            &corpus,
            n,
            h,
            Frequency::YEARLY,
            &PreprocessConfig::for_frequency(Frequency::YEARLY),
        )
        .unwrap();
        let cfg = ForecastConfig {
            k: 100,
            ..Default::default()
        };
        let mut rng = common::rng(900 + seed);
        let (mut sum1, mut sum100, mut count) = (0.0, 0.0, 0usize);
        while count < 200 {
            let values = common::ets_series(&mut rng, n + h, 1);
            let (history, actual) = values.split_at(n);
            let target = TimeSeries::new("t", Frequency::YEARLY, history.to_vec(), h).unwrap();
            let rescaled = neighbor_paths(&target, &set, &cfg).unwrap();
            let (p1, _) = rescaled.prefix(1);
            let f1 = aggregate_paths(p1, Aggregator::Median, None).unwrap();
            let f100 = aggregate_paths(&rescaled.paths, Aggregator::Median, None).unwrap();
            let (Ok(m1), Ok(m100)) = (mase(actual, &f1, history, 1), mase(actual, &f100, history, 1))
            else {
                continue;
            };
            sum1 += m1;
            sum100 += m100;
            count += 1;
        }
        let (m1, m100) = (sum1 / 200.0, sum100 / 200.0);
        all_ok &= m100 < m1;
        lines.push(format!("seed {seed}: k=1 {m1:.3}, k=100 {m100:.3}"));
    }
    ensure(all_ok, format!("mean MASE over 200 targets; {}", lines.join("; ")))
}

fn c09_determinism() -> Outcome {
    let h = 8;
    let corpus = common::ets_corpus(909, 400, 40..=80, Frequency::QUARTERLY, h);
    let mut target_rng = common::rng(910);
    let targets: Vec<TimeSeries> = (0..12)
        .map(|i| {
            TimeSeries::new(
                format!("t{i}"),
                Frequency::QUARTERLY,
                common::ets_series(&mut target_rng, 32, 4),
                h,
            )
            .unwrap()
        })
        .collect();
    let run = |threads: usize| -> (Vec<u8>, String) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let config = PreprocessConfig::for_frequency(Frequency::QUARTERLY);
            let (set, _) = build_reference_set(&corpus, 32, h, Frequency::QUARTERLY, &config).unwrap();
            let cfg = ForecastConfig {
                k: 40,
                ..Default::default()
            };
            let results: Vec<_> = targets
                .iter()
                .map(|t| forecast(t, &set, &cfg).unwrap())
                .collect();
            (
                simforecast::dataio::encode_reference_set(&set),
                serde_json::to_string(&results).unwrap(),
            )
        })
    };
    let (set1, json1) = run(1);
    let (set4, json4) = run(4);
    ensure(
        set1 == set4 && json1 == json4,
        format!(
            "1 vs 4 threads: reference set {} bytes, forecast JSON {} bytes, identical = {}",
            set1.len(),
            json1.len(),
            set1 == set4 && json1 == json4
        ),
    )
}

/// Targets and reference corpus supplied through the environment.
struct Dataset {
    targets: Vec<CorpusRecord>,
    reference: Vec<CorpusRecord>,
}

fn dataset() -> Result<Dataset, Outcome> {
    let (Ok(targets), Ok(reference)) = (
        std::env::var("SIMFORECAST_TARGETS"),
        std::env::var("SIMFORECAST_REFERENCE"),
    ) else {
        return Err(Outcome::Skip(
            "set SIMFORECAST_TARGETS and SIMFORECAST_REFERENCE to run".into(),
        ));
    };
    let load = |p: &str| read_corpus(p).map_err(|e| Outcome::Fail(format!("{p}: {e}")));
    Ok(Dataset {
        targets: load(&targets)?,
        reference: load(&reference)?,
    })
}

/// Reference sets keyed by frequency and target length, built on demand.
struct SetCache<'a> {
    reference: &'a [CorpusRecord],
    sets: HashMap<(Frequency, usize, usize), Option<ReferenceSet>>,
}

impl<'a> SetCache<'a> {
    fn get(&mut self, freq: Frequency, n: usize, h: usize) -> Option<&ReferenceSet> {
        let reference = self.reference;
        self.sets
            .entry((freq, n, h))
            .or_insert_with(|| {
                build_reference_set(reference, n, h, freq, &PreprocessConfig::for_frequency(freq))
                    .ok()
                    .map(|(s, _)| s)
            })
            .as_ref()
    }
}

struct Split<'a> {
    record: &'a CorpusRecord,
    history: &'a [f64],
    actual: &'a [f64],
}

fn splits(targets: &[CorpusRecord]) -> Vec<Split<'_>> {
    targets
        .iter()
        .filter(|r| r.values.len() > r.horizon + r.frequency.period())
        .map(|r| {
            let (history, actual) = r.values.split_at(r.values.len() - r.horizon);
            Split {
                record: r,
                history,
                actual,
            }
        })
        .collect()
}

fn c10_benchmark_mase() -> Outcome {
    let data = match dataset() {
        Ok(d) => d,
        Err(o) => return o,
    };
    let mut cache = SetCache {
        reference: &data.reference,
        sets: HashMap::new(),
    };
    let cfg = ForecastConfig {
        k: 500,
        ..Default::default()
    };
    let (mut total_sum, mut total_count) = (0.0, 0usize);
    let (mut yearly_sum, mut yearly_count) = (0.0, 0usize);
    for s in splits(&data.targets) {
        let r = s.record;
        let Some(set) = cache.get(r.frequency, s.history.len(), r.horizon) else {
            continue;
        };
        let target = TimeSeries::new(&r.series_id, r.frequency, s.history.to_vec(), r.horizon)
            .unwrap();
        let rescaled = neighbor_paths(&target, set, &cfg).unwrap();
        let point = aggregate_paths(&rescaled.paths, Aggregator::Median, None).unwrap();
        let period = r.frequency.period();
        if let Ok(m) = mase(s.actual, &point, s.history, period) {
            total_sum += m;
            total_count += 1;
        }
        if r.frequency == Frequency::YEARLY {
            let (p100, _) = rescaled.prefix(100);
            let point = aggregate_paths(p100, Aggregator::Median, None).unwrap();
            if let Ok(m) = mase(s.actual, &point, s.history, period) {
                yearly_sum += m;
                yearly_count += 1;
            }
        }
    }
    if total_count == 0 || yearly_count == 0 {
        return Outcome::Fail("no scorable targets".into());
    }
    let total = total_sum / total_count as f64;
    let yearly = yearly_sum / yearly_count as f64;
    ensure(
        (total - 1.411).abs() <= 0.05 && (yearly - 2.777).abs() <= 0.05,
        format!("total MASE {total:.3} (target 1.411), yearly k=100 {yearly:.3} (target 2.777)"),
    )
}

fn c11_interval_quality() -> Outcome {
    let data = match dataset() {
        Ok(d) => d,
        Err(o) => return o,
    };
    let mut cache = SetCache {
        reference: &data.reference,
        sets: HashMap::new(),
    };
    let mut inner_cache = HashMap::new();
    let cfg = ForecastConfig::default();
    let (mut msis_sum, mut upper_sum, mut count) = (0.0, 0.0, 0usize);
    for s in splits(&data.targets)
        .into_iter()
        .filter(|s| s.record.frequency == Frequency::YEARLY)
    {
        let r = s.record;
        let (n, h) = (s.history.len(), r.horizon);
        let Some(set) = cache.get(r.frequency, n, h) else {
            continue;
        };
        let inner = if n > 2 * h {
            inner_cache
                .entry(n)
                .or_insert_with(|| rebuild_for_length(set, n - h).ok())
                .as_ref()
        } else {
            None
        };
        let target = TimeSeries::new(&r.series_id, r.frequency, s.history.to_vec(), h).unwrap();
        let Ok(result) = forecast_with(&target, set, inner, &cfg) else {
            continue;
        };
        let (Ok(m), Ok(c)) = (
            msis(s.actual, &result.lower, &result.upper, s.history, 1, cfg.alpha),
            coverage_stats(s.actual, &result.lower, &result.upper, s.history, 1),
        ) else {
            continue;
        };
        msis_sum += m;
        upper_sum += c.upper_coverage;
        count += 1;
    }
    if count == 0 {
        return Outcome::Fail("no scorable yearly targets".into());
    }
    let (m, u) = (msis_sum / count as f64, upper_sum / count as f64);
    ensure(
        m < 30.0 && u > 0.9,
        format!("yearly MSIS {m:.3} (< 30), upper coverage {:.2}% (> 90%)", 100.0 * u),
    )
}

fn c12_runtime_ratio() -> Outcome {
    let data = match dataset() {
        Ok(d) => d,
        Err(o) => return o,
    };
    let mut cache = SetCache {
        reference: &data.reference,
        sets: HashMap::new(),
    };
    let (mut l2, mut dtw) = (Duration::ZERO, Duration::ZERO);
    let mut timed = 0;
    for s in splits(&data.targets)
        .into_iter()
        .filter(|s| s.record.frequency == Frequency::MONTHLY)
        .take(50)
    {
        let r = s.record;
        let Some(set) = cache.get(r.frequency, s.history.len(), r.horizon) else {
            continue;
        };
        let target = TimeSeries::new(&r.series_id, r.frequency, s.history.to_vec(), r.horizon)
            .unwrap();
        let pre = simforecast::preprocess::preprocess_series(&target, set.preprocessing_config())
            .unwrap();
        let start = Instant::now();
        nearest_k(&pre.scaled, set, DistanceMeasure::L2, 500).unwrap();
        l2 += start.elapsed();
        let start = Instant::now();
        nearest_k(&pre.scaled, set, DistanceMeasure::Dtw, 500).unwrap();
        dtw += start.elapsed();
        timed += 1;
    }
    if timed == 0 {
        return Outcome::Fail("no monthly targets with a usable reference set".into());
    }
    let ratio = dtw.as_secs_f64() / l2.as_secs_f64();
    ensure(
        ratio > 3.0,
        format!("DTW/L2 distance time ratio {ratio:.1} over {timed} monthly targets"),
    )
}
