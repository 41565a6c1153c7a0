//! Batch execution: simulate scanpaths across videos and seeds, evaluate
//! corpora into metric reports, and sweep single parameters.
//!
//! Every run's seed is derived from the spec's base seed and the run index,
//! so outputs are independent of scheduling and `--jobs`. Cells write to
//! distinct files and aggregation happens after all cells finish.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use oddm_core::baseline::simulate_baseline;
use oddm_core::metrics::{
    self, histogram_distance, MetricsReport, VideoCorpus, DIRECTION_BINS,
};
use oddm_core::rng::derive_run_seed;
use oddm_core::scene::events::read_events;
use oddm_core::scene::manifest::parse_manifest;
use oddm_core::scene::raster::MaskRaster;
use oddm_core::scene::SceneBundle;
use oddm_core::{simulate, ModelKind, Scanpath};

use crate::spec::{EvalSpec, RunSpec, SweepSpec, VideoSpec};
use crate::HarnessError;

fn with_pool<R: Send>(jobs: usize, work: impl FnOnce() -> R + Send) -> R {
    if jobs == 0 {
        return work();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool builds")
        .install(work)
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// Scanpath files produced for one video.
#[derive(Debug, Clone)]
pub struct VideoRunFiles {
    pub manifest_path: PathBuf,
    pub video_id: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub videos: Vec<VideoRunFiles>,
    pub warnings: Vec<String>,
}

/// Simulate `n_seeds` runs of the configured model on every listed scene
/// and write one scanpath CSV per (video, seed).
pub fn run_simulate(spec: &RunSpec, jobs: usize) -> Result<SimulateOutput, HarnessError> {
    spec.validate()?;
    let out_dir = spec.out_dir().to_path_buf();
    create_dir(&out_dir)?;

    let mut warnings = Vec::new();
    let mut scenes = Vec::new();
    for path in &spec.manifests {
        let (scene, scene_warnings) = SceneBundle::load(path)?;
        warnings.extend(
            scene_warnings
                .into_iter()
                .map(|w| format!("{}: {w}", path.display())),
        );
        scenes.push((path.clone(), scene));
    }

    let base_seed = match spec.model {
        ModelKind::ObjectDdm => spec.sim.seed,
        ModelKind::Baseline => spec.baseline.seed,
    };
    let cells: Vec<(usize, u32)> = (0..scenes.len())
        .flat_map(|v| (0..spec.n_seeds).map(move |k| (v, k)))
        .collect();

    let results: Result<Vec<(usize, PathBuf)>, HarnessError> = with_pool(jobs, || {
        cells
            .par_iter()
            .map(|&(video_idx, k)| {
                let (_, scene) = &scenes[video_idx];
                let run_seed = derive_run_seed(base_seed, k as u64);
                let path = simulate_cell(scene, spec, run_seed)?;
                let file = out_dir.join(format!(
                    "{}_{}_seed{k:03}.csv",
                    scene.manifest.video_id,
                    spec.model.as_str()
                ));
                path.write_csv(&file, &format!("run{k:03}"))?;
                Ok((video_idx, file))
            })
            .collect()
    });

    let mut videos: Vec<VideoRunFiles> = scenes
        .iter()
        .map(|(path, scene)| VideoRunFiles {
            manifest_path: path.clone(),
            video_id: scene.manifest.video_id.clone(),
            files: Vec::new(),
        })
        .collect();
    for (video_idx, file) in results? {
        videos[video_idx].files.push(file);
    }
    for video in &mut videos {
        video.files.sort();
    }
    Ok(SimulateOutput { videos, warnings })
}

fn simulate_cell(
    scene: &SceneBundle,
    spec: &RunSpec,
    run_seed: u64,
) -> Result<Scanpath, HarnessError> {
    match spec.model {
        ModelKind::ObjectDdm => {
            let mut config = spec.sim.clone();
            config.seed = run_seed;
            simulate(scene, &config).map_err(|e| HarnessError::Config(e.to_string()))
        }
        ModelKind::Baseline => {
            let mut config = spec.baseline.clone();
            config.seed = run_seed;
            simulate_baseline(scene, &config).map_err(|e| HarnessError::Config(e.to_string()))
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub reports: Vec<(String, MetricsReport)>,
    pub report_paths: Vec<PathBuf>,
    pub distances_path: PathBuf,
}

/// Compute one metrics report per corpus plus a cross-corpus distance table.
pub fn run_evaluate(spec: &EvalSpec, jobs: usize) -> Result<EvalOutput, HarnessError> {
    spec.validate()?;
    let out_dir = spec.out_dir().to_path_buf();
    create_dir(&out_dir)?;

    let reports: Result<Vec<(String, MetricsReport)>, HarnessError> = with_pool(jobs, || {
        spec.corpora
            .par_iter()
            .map(|corpus| {
                let videos: Result<Vec<VideoCorpus>, HarnessError> = corpus
                    .videos
                    .iter()
                    .map(load_video_corpus)
                    .collect();
                let report = metrics::compute_report(&videos?, spec.grid_w, spec.grid_h)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                Ok((corpus.name.clone(), report))
            })
            .collect()
    });
    let reports = reports?;

    let mut report_paths = Vec::new();
    for (name, report) in &reports {
        let path = out_dir.join(format!("{name}.report.json"));
        write_json(&path, report)?;
        write_metric_csvs(&out_dir, name, report)?;
        report_paths.push(path);
    }
    let distances_path = out_dir.join("distances.csv");
    write_distance_table(&distances_path, &reports)?;

    Ok(EvalOutput {
        reports,
        report_paths,
        distances_path,
    })
}

fn load_video_corpus(video: &VideoSpec) -> Result<VideoCorpus, HarnessError> {
    let text = std::fs::read_to_string(&video.manifest)
        .map_err(|e| HarnessError::Io(format!("cannot read {}: {e}", video.manifest.display())))?;
    let parsed = parse_manifest(&text)?;
    let base = video.manifest.parent().unwrap_or_else(|| Path::new("."));
    let masks = MaskRaster::read(&base.join(&parsed.manifest.mask_path), &parsed.manifest)?;
    let mut runs = Vec::new();
    for events_path in &video.events {
        let list = read_events(events_path, &parsed.manifest)?;
        runs.extend(list.subjects);
    }
    Ok(VideoCorpus {
        manifest: parsed.manifest,
        masks,
        runs,
    })
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)
        .map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", path.display())))?;
    writer
        .flush()
        .map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_csv_lines(
    path: &Path,
    header: &str,
    lines: impl Iterator<Item = String>,
) -> Result<(), HarnessError> {
    let io_err = |e: std::io::Error| HarnessError::Io(format!("cannot write {}: {e}", path.display()));
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{header}").map_err(io_err)?;
    for line in lines {
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Flat per-metric CSV exports for external plotting.
fn write_metric_csvs(dir: &Path, name: &str, report: &MetricsReport) -> Result<(), HarnessError> {
    write_csv_lines(
        &dir.join(format!("{name}.saccade_counts.csv")),
        "video_id,mean_saccades",
        report
            .n_saccades_per_video
            .iter()
            .map(|v| format!("{},{}", v.video_id, v.mean_saccades)),
    )?;
    write_csv_lines(
        &dir.join(format!("{name}.durations.csv")),
        "foveation_duration_ms",
        report.foveation_durations_ms.raw.iter().map(f64::to_string),
    )?;
    write_csv_lines(
        &dir.join(format!("{name}.amplitudes.csv")),
        "amplitude_dva",
        report.amplitudes_dva.raw.iter().map(f64::to_string),
    )?;
    write_csv_lines(
        &dir.join(format!("{name}.directions.csv")),
        "direction_rad",
        report.directions_rad.raw.iter().map(f64::to_string),
    )?;
    write_csv_lines(
        &dir.join(format!("{name}.latencies.csv")),
        "refoveation_latency_ms",
        report.refoveation.latencies_ms.iter().map(f64::to_string),
    )?;
    let gw = report.gaze_density.width;
    write_csv_lines(
        &dir.join(format!("{name}.density.csv")),
        "grid_x,grid_y,mass",
        report
            .gaze_density
            .values
            .iter()
            .enumerate()
            .map(|(i, mass)| {
                format!("{},{},{mass}", i as u32 % gw, i as u32 / gw)
            }),
    )
}

fn direction_histogram(report: &MetricsReport) -> metrics::Histogram {
    metrics::Histogram {
        lo: 0.0,
        hi: 2.0 * std::f64::consts::PI,
        counts: report.directions_rad.counts.clone(),
    }
}

fn write_distance_table(
    path: &Path,
    reports: &[(String, MetricsReport)],
) -> Result<(), HarnessError> {
    let mut lines = Vec::new();
    for i in 0..reports.len() {
        for j in i + 1..reports.len() {
            let (a_name, a) = &reports[i];
            let (b_name, b) = &reports[j];
            let pairs = [
                (
                    "foveation_duration_ms",
                    histogram_distance(
                        &a.foveation_durations_ms.histogram,
                        &b.foveation_durations_ms.histogram,
                    ),
                ),
                (
                    "amplitude_dva",
                    histogram_distance(&a.amplitudes_dva.histogram, &b.amplitudes_dva.histogram),
                ),
                (
                    "direction_rad",
                    histogram_distance(&direction_histogram(a), &direction_histogram(b)),
                ),
                (
                    "refoveation_latency_ms",
                    histogram_distance(
                        &a.refoveation.latency_histogram,
                        &b.refoveation.latency_histogram,
                    ),
                ),
                (
                    "gaze_density",
                    metrics::density_distance(&a.density_grid(), &b.density_grid()),
                ),
            ];
            for (metric, distance) in pairs {
                let distance = distance.map_err(|e| HarnessError::Config(e.to_string()))?;
                lines.push(format!("{a_name},{b_name},{metric},{distance}"));
            }
        }
    }
    write_csv_lines(path, "corpus_a,corpus_b,metric,distance", lines.into_iter())
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub label: String,
    pub value: serde_json::Value,
    pub report: MetricsReport,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    pub summary_path: PathBuf,
}

/// Simulate and evaluate once per swept value, then summarize each metric
/// as mean and standard deviation across videos.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepOutput, HarnessError> {
    spec.validate()?;
    let root = spec.run.out_dir().to_path_buf();
    create_dir(&root)?;

    let mut points = Vec::new();
    let mut summary_lines = Vec::new();
    for value in &spec.values {
        let label = spec.value_label(value);
        let point_dir = root.join(&label);
        let mut run_spec = spec.run.clone();
        run_spec.sim = spec.apply_to(&spec.run.sim, value)?;
        run_spec.out_dir = Some(point_dir.clone());

        let simulated = run_simulate(&run_spec, jobs)?;
        let eval_spec = EvalSpec {
            corpora: vec![crate::spec::CorpusSpec {
                name: label.clone(),
                videos: simulated
                    .videos
                    .iter()
                    .map(|v| VideoSpec {
                        manifest: v.manifest_path.clone(),
                        events: v.files.clone(),
                    })
                    .collect(),
            }],
            out_dir: Some(point_dir.clone()),
            grid_w: 64,
            grid_h: 48,
        };
        let evaluated = run_evaluate(&eval_spec, jobs)?;
        let report = evaluated.reports.into_iter().next().expect("one corpus").1;

        summarize_point(spec, value, &simulated, &mut summary_lines)?;
        points.push(SweepPoint {
            label,
            value: value.clone(),
            report,
            out_dir: point_dir,
        });
    }

    let summary_path = root.join("summary.csv");
    write_csv_lines(
        &summary_path,
        "parameter,value,metric,mean,std",
        summary_lines.into_iter(),
    )?;
    Ok(SweepOutput {
        points,
        summary_path,
    })
}

/// Per-video scalars for one sweep point, reduced to mean and std across
/// videos. Videos without re-foveations are skipped for the latency row.
fn summarize_point(
    spec: &SweepSpec,
    value: &serde_json::Value,
    simulated: &SimulateOutput,
    lines: &mut Vec<String>,
) -> Result<(), HarnessError> {
    let mut per_metric: Vec<(&str, Vec<f64>)> = vec![
        ("n_saccades", Vec::new()),
        ("foveation_duration_ms", Vec::new()),
        ("amplitude_dva", Vec::new()),
        ("within_object_ratio", Vec::new()),
        ("refoveation_ratio", Vec::new()),
        ("refoveation_latency_ms", Vec::new()),
    ];

    for video in &simulated.videos {
        let corpus = load_video_corpus(&VideoSpec {
            manifest: video.manifest_path.clone(),
            events: video.files.clone(),
        })?;
        let runs = &corpus.runs;
        let n_runs = runs.len().max(1) as f64;
        let n_saccades = runs
            .iter()
            .flat_map(|r| r.events.iter())
            .filter(|e| e.kind == oddm_core::EventKind::Saccade)
            .count() as f64
            / n_runs;
        per_metric[0].1.push(n_saccades);

        let durations = metrics::foveation_durations(runs, corpus.manifest.frame_rate_hz);
        per_metric[1].1.push(mean(&durations).unwrap_or(0.0));

        let (amplitudes, _) = metrics::saccade_distributions(runs, &corpus.manifest);
        if let Some(m) = mean(&amplitudes) {
            per_metric[2].1.push(m);
        }

        let within = metrics::within_object_ratio(runs, &corpus.masks)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        per_metric[3].1.push(within);

        let refov = metrics::refoveation_stats(runs, &corpus.masks, corpus.manifest.frame_rate_hz)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        per_metric[4].1.push(refov.ratio);
        if let Some(m) = mean(&refov.latencies_ms) {
            per_metric[5].1.push(m);
        }
    }

    let rendered_value = value.to_string().replace('"', "");
    for (metric, values) in per_metric {
        let (m, s) = match mean(&values) {
            Some(m) => (m.to_string(), std_dev(&values).to_string()),
            None => (String::new(), String::new()),
        };
        lines.push(format!(
            "{},{rendered_value},{metric},{m},{s}",
            spec.parameter
        ));
    }
    Ok(())
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values).unwrap();
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// The direction histogram bin count is pinned by the metrics module; keep
/// the two in sync.
const _: () = assert!(DIRECTION_BINS == 36);
