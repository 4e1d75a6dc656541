use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use simforecast::dataio::{
    apply_history_cut, build_reference_set, export_json, read_corpus, save_reference_set,
    CorpusRecord,
};
use simforecast::forecaster::calibrate_delta_with;
use simforecast::metrics::{
    forecastability, mcb_ranks, EvaluationReport, McbOptions, SeriesForecast,
};
use simforecast::{
    forecast_with, CalibrationStatus, ForecastConfig, ForecastResult, TimeSeries,
};

use crate::args::{BuildRefArgs, EvaluateArgs, ForecastArgs};
use crate::error::{io_at, CliError, CliResult};
use crate::manifest::RunManifest;
use crate::references::References;

/// One forecast in the output JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub id: String,
    pub frequency: String,
    pub n: usize,
    pub horizon: usize,
    pub point: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub delta_star: f64,
    pub calibration: CalibrationStatus,
    pub neighbor_ids: Vec<String>,
    pub neighbor_distances: Vec<f64>,
    pub k_truncated: bool,
}

impl ForecastRecord {
    fn new(ts: &TimeSeries, r: ForecastResult) -> Self {
        ForecastRecord {
            id: ts.id().to_string(),
            frequency: ts.frequency().label(),
            n: ts.len(),
            horizon: ts.horizon(),
            point: r.point,
            lower: r.lower,
            upper: r.upper,
            delta_star: r.delta_star,
            calibration: r.calibration,
            neighbor_ids: r.neighbor_ids,
            neighbor_distances: r.neighbor_distances,
            k_truncated: r.k_truncated,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ForecastFile {
    pub config: ForecastConfig,
    pub forecasts: Vec<ForecastRecord>,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(io_at(path))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_at(path))?))
}

fn finish_manifest(manifest: &RunManifest, explicit: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let path = match (explicit, out) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(out)) => {
            let mut name = out.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        }
        (None, None) => return Ok(()),
    };
    manifest.write(&path)
}

pub fn build_ref(args: &BuildRefArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("build-ref");
    manifest.input("corpus", &args.corpus);
    let h = match args.h {
        Some(h) => h as usize,
        None => args.frequency.default_horizon().ok_or_else(|| {
            CliError::Usage(format!("--h is required for frequency {}", args.frequency))
        })?,
    };
    let n = args.n as usize;
    let config = args.preprocess.config(args.frequency);
    manifest.config(&serde_json::json!({
        "n": n,
        "h": h,
        "frequency": args.frequency.label(),
        "preprocess": config,
    }));
    let corpus = manifest.time("read_corpus", || read_corpus(&args.corpus))?;
    let (set, report) = manifest.time("build_reference", || {
        build_reference_set(&corpus, n, h, args.frequency, &config)
    })?;
    manifest.time("save", || save_reference_set(&set, &args.out))?;
    manifest.output("reference", &args.out);
    if let Some(json) = &args.json {
        write_file(json, &export_json(&set)?)?;
        manifest.output("json", json);
    }
    for (id, reason) in &report.failed {
        log::warn!("dropped `{id}`: {reason}");
    }
    println!(
        "m={} dropped={} (too short: {}, preprocessing failed: {}) considered={}",
        set.len(),
        report.dropped(),
        report.too_short,
        report.failed.len(),
        report.considered
    );
    finish_manifest(&manifest, args.manifest.as_deref(), Some(&args.out))
}

fn forecast_config(args: &ForecastArgs) -> CliResult<ForecastConfig> {
    let config = ForecastConfig {
        distance: args.distance,
        k: args.k as usize,
        aggregator: args.aggregator,
        alpha: args.alpha,
        delta_grid_step: args.delta_step,
    };
    config.validate()?;
    Ok(config)
}

fn load_targets(path: &Path, cut: Option<u64>) -> CliResult<Vec<TimeSeries>> {
    read_corpus(path)?
        .iter()
        .map(|r| {
            let ts = r.to_time_series()?;
            match cut {
                Some(years) => apply_history_cut(&ts, years as usize),
                None => Ok(ts),
            }
        })
        .collect::<simforecast::Result<_>>()
        .map_err(CliError::from)
}

/// Forecasts every target in input order; the first failure (by input
/// order) is reported with the series id.
fn run_forecasts(
    targets: &[TimeSeries],
    refs: &References,
    config: &ForecastConfig,
) -> CliResult<Vec<ForecastRecord>> {
    targets
        .par_iter()
        .map(|ts| {
            let set = refs.set_for(ts)?;
            forecast_with(ts, set, refs.inner_for(ts), config)
                .map(|r| ForecastRecord::new(ts, r))
                .map_err(|e| with_series(ts.id(), e.into()))
        })
        .collect()
}

fn with_series(id: &str, err: CliError) -> CliError {
    match err {
        CliError::Usage(m) => CliError::Usage(format!("series `{id}`: {m}")),
        CliError::Data(m) => CliError::Data(format!("series `{id}`: {m}")),
        CliError::Internal(m) => CliError::Internal(format!("series `{id}`: {m}")),
    }
}

fn emit_json(out: Option<&Path>, json: String) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, &(json + "\n")),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            writeln!(lock, "{json}")?;
            Ok(())
        }
    }
}

pub fn forecast(args: &ForecastArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("forecast");
    let config = forecast_config(args)?;
    manifest.input("targets", &args.targets);
    let targets = manifest.time("read_targets", || load_targets(&args.targets, args.cut))?;
    let refs = References::prepare(
        args.reference.as_deref(),
        args.corpus.as_deref(),
        &args.preprocess,
        &targets,
        &mut manifest,
    )?;
    let records = manifest.time("forecast", || run_forecasts(&targets, &refs, &config))?;
    let reference_config = manifest.config.take();
    manifest.config(&serde_json::json!({
        "forecast": config,
        "cut_years": args.cut,
        "reference": reference_config,
    }));

    let file = ForecastFile {
        config,
        forecasts: records,
    };
    emit_json(
        args.out.as_deref(),
        serde_json::to_string_pretty(&file).expect("forecasts serialise"),
    )?;
    if let Some(out) = &args.out {
        manifest.output("forecasts", out);
    }
    if let Some(plot) = &args.plot_csv {
        let actuals = match &args.actuals {
            Some(path) => {
                manifest.input("actuals", path);
                by_id(read_corpus(path)?)
            }
            None => HashMap::new(),
        };
        write_plot_csv(plot, &file.forecasts, &actuals)?;
        manifest.output("plot_csv", plot);
    }
    finish_manifest(&manifest, args.manifest.as_deref(), args.out.as_deref())
}

fn by_id(records: Vec<CorpusRecord>) -> HashMap<String, CorpusRecord> {
    records.into_iter().map(|r| (r.series_id.clone(), r)).collect()
}

fn write_plot_csv(
    path: &Path,
    forecasts: &[ForecastRecord],
    actuals: &HashMap<String, CorpusRecord>,
) -> CliResult<()> {
    let mut out = create(path)?;
    writeln!(out, "id,step,actual,point,lower,upper")?;
    for f in forecasts {
        let actual = actuals.get(&f.id).map(|r| r.values.as_slice());
        for step in 0..f.point.len() {
            let a = actual
                .and_then(|v| v.get(step))
                .map(|v| v.to_string())
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                f.id,
                step + 1,
                a,
                f.point[step],
                f.lower[step],
                f.upper[step]
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CalibrationRecord {
    id: String,
    n: usize,
    horizon: usize,
    delta_star: f64,
    calibration: CalibrationStatus,
    /// `None` for series shorter than 8 observations.
    forecastability: Option<f64>,
    forecastability_degenerate: bool,
    msis_by_delta: Vec<(f64, f64)>,
}

pub fn calibrate(args: &ForecastArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("calibrate");
    let config = forecast_config(args)?;
    manifest.input("targets", &args.targets);
    let targets = manifest.time("read_targets", || load_targets(&args.targets, args.cut))?;
    let refs = References::prepare(
        args.reference.as_deref(),
        args.corpus.as_deref(),
        &args.preprocess,
        &targets,
        &mut manifest,
    )?;
    let records: Vec<CalibrationRecord> = manifest.time("calibrate", || {
        targets
            .par_iter()
            .map(|ts| {
                let set = refs.set_for(ts)?;
                let calibration = match refs.inner_for(ts) {
                    Some(inner) => calibrate_delta_with(ts, inner, &config),
                    None => simforecast::calibrate_delta(ts, set, &config),
                }
                .map_err(|e| with_series(ts.id(), e.into()))?;
                let f = forecastability(ts.values()).ok();
                Ok(CalibrationRecord {
                    id: ts.id().to_string(),
                    n: ts.len(),
                    horizon: ts.horizon(),
                    delta_star: calibration.delta_star,
                    calibration: calibration.status,
                    forecastability: f.map(|f| f.value),
                    forecastability_degenerate: f.is_some_and(|f| f.degenerate),
                    msis_by_delta: calibration.scores,
                })
            })
            .collect::<CliResult<_>>()
    })?;
    let reference_config = manifest.config.take();
    manifest.config(&serde_json::json!({
        "forecast": config,
        "cut_years": args.cut,
        "reference": reference_config,
    }));
    emit_json(
        args.out.as_deref(),
        serde_json::to_string_pretty(&serde_json::json!({
            "config": config,
            "targets": records,
        }))
        .expect("calibrations serialise"),
    )?;
    if let Some(out) = &args.out {
        manifest.output("calibration", out);
    }
    finish_manifest(&manifest, args.manifest.as_deref(), args.out.as_deref())
}

fn method_name(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((name, path)) if !name.is_empty() => (name.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(spec);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (name, path)
        }
    }
}

fn read_forecast_file(path: &Path) -> CliResult<ForecastFile> {
    let text = std::fs::read_to_string(path).map_err(io_at(path))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: not a forecast file: {e}", path.display())))
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("evaluate");
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    manifest.input("history", &args.history);
    manifest.input("actuals", &args.actuals);
    let history_records = read_corpus(&args.history)?;
    let history = by_id(history_records.clone());
    let actuals = by_id(read_corpus(&args.actuals)?);

    let mut methods: Vec<(String, Vec<ForecastRecord>)> = Vec::new();
    for spec in &args.forecasts {
        let (name, path) = method_name(spec);
        if methods.iter().any(|(m, _)| *m == name) {
            return Err(CliError::Usage(format!("method name `{name}` given twice")));
        }
        manifest.input(&format!("forecasts:{name}"), &path);
        methods.push((name, read_forecast_file(&path)?.forecasts));
    }
    if !args.sweep_k.is_empty() {
        let targets: Vec<TimeSeries> = history_records
            .iter()
            .map(CorpusRecord::to_time_series)
            .collect::<simforecast::Result<_>>()?;
        let refs = References::prepare(
            args.reference.as_deref(),
            args.corpus.as_deref(),
            &args.preprocess,
            &targets,
            &mut manifest,
        )?;
        for &k in &args.sweep_k {
            let config = ForecastConfig {
                distance: args.distance,
                k: k as usize,
                aggregator: args.aggregator,
                alpha: args.alpha,
                delta_grid_step: args.delta_step,
            };
            config.validate()?;
            let records = manifest.time("sweep_forecast", || run_forecasts(&targets, &refs, &config))?;
            methods.push((format!("k={k}"), records));
        }
    }
    let reference_config = manifest.config.take();
    manifest.config(&serde_json::json!({
        "alpha": args.alpha,
        "rank_by": args.rank_by,
        "sweep_k": args.sweep_k,
        "distance": args.distance,
        "aggregator": args.aggregator,
        "delta_grid_step": args.delta_step,
        "reference": reference_config,
    }));

    let mut inputs = Vec::new();
    for (method, records) in &methods {
        for r in records {
            let h = history.get(&r.id).ok_or_else(|| {
                CliError::Data(format!("method `{method}`: series `{}` missing from --history", r.id))
            })?;
            let a = actuals.get(&r.id).ok_or_else(|| {
                CliError::Data(format!("method `{method}`: series `{}` missing from --actuals", r.id))
            })?;
            if a.values.len() != r.point.len() {
                return Err(CliError::Data(format!(
                    "method `{method}`: series `{}` has {} forecasts but {} actuals",
                    r.id,
                    r.point.len(),
                    a.values.len()
                )));
            }
            inputs.push(SeriesForecast {
                id: &r.id,
                frequency: h.frequency,
                method,
                insample: &h.values,
                actuals: &a.values,
                point: &r.point,
                lower: &r.lower,
                upper: &r.upper,
                alpha: args.alpha,
            });
        }
    }
    let report = manifest.time("score", || EvaluationReport::evaluate(&inputs))?;

    std::fs::create_dir_all(&args.out_dir).map_err(io_at(&args.out_dir))?;
    let per_series = args.out_dir.join("per_series.csv");
    report.write_csv(create(&per_series)?)?;
    manifest.output("per_series", &per_series);
    let aggregate = args.out_dir.join("aggregate.json");
    write_file(&aggregate, &(report.aggregate_json()? + "\n"))?;
    manifest.output("aggregate", &aggregate);
    for row in report.aggregates.iter().filter(|a| a.frequency == "total") {
        println!(
            "{}: n={} MASE={:.3} MSIS={:.3} coverage={:.1}% upper={:.1}% spread={:.3}",
            row.method,
            row.count,
            row.mase,
            row.msis,
            100.0 * row.coverage,
            100.0 * row.upper_coverage,
            row.spread
        );
    }
    if !report.exclusions.is_empty() {
        println!("excluded: {}", report.exclusions.len());
    }

    if methods.len() >= 2 {
        let ranks = rank_methods(&report, &methods, &args.rank_by)?;
        let ranks_json = args.out_dir.join("ranks.json");
        write_file(
            &ranks_json,
            &(serde_json::to_string_pretty(&ranks).expect("ranks serialise") + "\n"),
        )?;
        let mcb_csv = args.out_dir.join("mcb.csv");
        let mut out = create(&mcb_csv)?;
        writeln!(out, "method,mean_rank,ci_lower,ci_upper")?;
        for r in &ranks {
            writeln!(out, "{},{},{},{}", r.method, r.mean_rank, r.ci_lower, r.ci_upper)?;
        }
        out.flush()?;
        manifest.output("ranks", &ranks_json);
        manifest.output("mcb", &mcb_csv);
    }
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out_dir.join("manifest.json"));
    manifest.write(&manifest_path)
}

/// Mean ranks over the series every method could be scored on.
fn rank_methods(
    report: &EvaluationReport,
    methods: &[(String, Vec<ForecastRecord>)],
    metric: &str,
) -> CliResult<Vec<simforecast::metrics::McbRank>> {
    let mut scores: HashMap<(&str, &str), f64> = HashMap::new();
    for r in &report.rows {
        let value = if metric == "msis" { r.msis } else { r.mase };
        scores.insert((r.method.as_str(), r.id.as_str()), value);
    }
    let first = &methods[0].1;
    let common: Vec<&str> = first
        .iter()
        .map(|r| r.id.as_str())
        .filter(|id| methods.iter().all(|(m, _)| scores.contains_key(&(m.as_str(), *id))))
        .collect();
    let table: Vec<(String, Vec<f64>)> = methods
        .iter()
        .map(|(m, _)| (m.clone(), common.iter().map(|id| scores[&(m.as_str(), *id)]).collect()))
        .collect();
    mcb_ranks(&table, McbOptions::default()).map_err(|e| match e {
        simforecast::Error::TooShort { .. } => CliError::Data(format!(
            "mean ranks need at least 2 series scored by every method, found {}",
            common.len()
        )),
        other => other.into(),
    })
}
