mod common;

use simforecast::dataio::{
    build_reference_set, load_reference_set, read_corpus, save_reference_set, write_corpus,
};
use simforecast::forecaster::delta_grid;
use simforecast::{forecast, CalibrationStatus, Error, ForecastConfig, Frequency, PreprocessConfig, TimeSeries};

#[test]
fn corpus_file_to_forecast() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = common::ets_corpus(11, 150, 40..=70, Frequency::MONTHLY, 18);
    let csv = dir.path().join("corpus.csv");
    write_corpus(&corpus, std::fs::File::create(&csv).unwrap()).unwrap();
    let read = read_corpus(&csv).unwrap();
    assert_eq!(read.len(), corpus.len());
    assert!(read.iter().all(|r| r.horizon == 18));

    let config = PreprocessConfig::for_frequency(Frequency::MONTHLY);
    let (set, report) = build_reference_set(&read, 24, 18, Frequency::MONTHLY, &config).unwrap();
    assert_eq!(report.considered, 150);
    assert_eq!(report.kept + report.dropped(), 150);
    assert!(set.entries().iter().all(|e| e.history().len() == 24 && e.future_path().len() == 18));

    let bin = dir.path().join("ref.bin");
    save_reference_set(&set, &bin).unwrap();
    let loaded = load_reference_set(&bin, Some(&config)).unwrap();
    assert_eq!(loaded, set);
    let other = PreprocessConfig { span_factor: 0.7, ..config };
    assert_eq!(load_reference_set(&bin, Some(&other)), Err(Error::ConfigMismatch));

    let mut rng = common::rng(12);
    let target = TimeSeries::new(
        "target",
        Frequency::MONTHLY,
        common::ets_series(&mut rng, 24, 12),
        18,
    )
    .unwrap();
    let cfg = ForecastConfig {
        k: 30,
        ..Default::default()
    };
    let a = forecast(&target, &set, &cfg).unwrap();
    let b = forecast(&target, &loaded, &cfg).unwrap();
    assert_eq!(a, b);
    // n = 24 is not above 2h = 36, so the interval is left uncalibrated
    assert_eq!(a.calibration, CalibrationStatus::Skipped);
    assert_eq!(a.point.len(), 18);
    assert_eq!(a.neighbor_ids.len(), 30);
    assert!(a.lower.iter().zip(&a.upper).all(|(l, u)| l <= u));
    assert!(a.neighbor_distances.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn long_target_is_calibrated() {
    let corpus = common::ets_corpus(21, 200, 30..=50, Frequency::YEARLY, 6);
    let (set, _) = build_reference_set(
        &corpus,
        18,
        6,
        Frequency::YEARLY,
        &PreprocessConfig::for_frequency(Frequency::YEARLY),
    )
    .unwrap();
    let mut rng = common::rng(22);
    let target =
        TimeSeries::new("t", Frequency::YEARLY, common::ets_series(&mut rng, 18, 1), 6).unwrap();
    let result = forecast(&target, &set, &ForecastConfig::default()).unwrap();
    assert_eq!(result.calibration, CalibrationStatus::Calibrated);
    assert!(delta_grid(0.01).contains(&result.delta_star));
    // k = 500 exceeds the 200 available series
    assert!(result.k_truncated);
    assert_eq!(result.neighbor_ids.len(), 200);
}
