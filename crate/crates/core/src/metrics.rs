//! Scanpath statistics: saccade counts, foveation durations, amplitudes,
//! directions, within-object and re-foveation rates, gaze density, and
//! histogram comparison.
//!
//! All metrics operate on the ground-truth event schema, so simulated
//! scanpaths are evaluated through exactly the same code path as human
//! recordings. Gaze points are labelled against the mask of their own frame
//! at the nearest pixel. Within foveations the gaze position is linearly
//! interpolated between entry and exit for the density map; event files
//! carry no per-frame pursuit samples, so interpolation is the convention
//! for both corpora.

use serde::Serialize;
use thiserror::Error;

use crate::evidence::{OptionId, BACKGROUND};
use crate::grid::Grid;
use crate::scene::events::{EventKind, SubjectEvents};
use crate::scene::manifest::SceneManifest;
use crate::scene::raster::{MaskFrame, MaskRaster};
use crate::scene::px_to_dva;
use crate::scanpath::direction_rad;
use crate::grid::Point;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("gaze position ({x}, {y}) outside frame bounds")]
    OutOfBounds { x: f64, y: f64 },
    #[error("histogram binning mismatch: {0}")]
    BinningMismatch(String),
    #[error("no samples: {0}")]
    NoSamples(&'static str),
}

/// Uniform-bin histogram over `[lo, hi]`; samples beyond the range are
/// clamped into the edge bins so the counts always total the sample count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, n_bins: usize) -> Self {
        assert!(n_bins > 0 && hi > lo);
        Self {
            lo,
            hi,
            counts: vec![0; n_bins],
        }
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn add(&mut self, value: f64) {
        let n = self.counts.len();
        let raw = ((value - self.lo) / self.bin_width()).floor();
        let bin = if raw < 0.0 {
            0
        } else if raw >= n as f64 {
            n - 1
        } else {
            raw as usize
        };
        self.counts[bin] += 1;
    }

    pub fn from_values(lo: f64, hi: f64, n_bins: usize, values: &[f64]) -> Self {
        let mut h = Self::new(lo, hi, n_bins);
        for &v in values {
            h.add(v);
        }
        h
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total() as f64;
        if total == 0.0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Earth mover's distance between two normalized histograms with identical
/// binning: the cumulative-difference sum scaled by the bin width.
pub fn histogram_distance(a: &Histogram, b: &Histogram) -> Result<f64, MetricsError> {
    if a.lo != b.lo || a.hi != b.hi || a.counts.len() != b.counts.len() {
        return Err(MetricsError::BinningMismatch(format!(
            "[{}, {}] x {} vs [{}, {}] x {}",
            a.lo,
            a.hi,
            a.counts.len(),
            b.lo,
            b.hi,
            b.counts.len()
        )));
    }
    let pa = a.normalized();
    let pb = b.normalized();
    let mut cumulative = 0.0;
    let mut distance = 0.0;
    for (&x, &y) in pa.iter().zip(&pb) {
        cumulative += x - y;
        distance += cumulative.abs();
    }
    Ok(distance * a.bin_width())
}

/// Earth mover's distance between two same-shape density grids, computed on
/// the flattened row-major mass distributions with unit bin spacing. Zero
/// exactly when the grids are equal.
pub fn density_distance(a: &Grid<f64>, b: &Grid<f64>) -> Result<f64, MetricsError> {
    if !a.same_shape(b) {
        return Err(MetricsError::BinningMismatch(
            "density grids differ in shape".to_string(),
        ));
    }
    let mut cumulative = 0.0;
    let mut distance = 0.0;
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        cumulative += x - y;
        distance += cumulative.abs();
    }
    Ok(distance)
}

/// Mask label under a gaze position, read at the nearest pixel.
pub fn label_gaze(x: f64, y: f64, mask: MaskFrame<'_>) -> Result<OptionId, MetricsError> {
    let (px, py) = Point::new(x, y)
        .nearest_pixel(mask.width, mask.height)
        .ok_or(MetricsError::OutOfBounds { x, y })?;
    Ok(mask.label(px, py))
}

/// Saccades partitioned by their label transition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TransitionCounts {
    /// Start and landing on the same nonzero object.
    pub within_object: u64,
    /// Start and landing on different nonzero objects.
    pub cross_object: u64,
    /// Background involved on either end.
    pub background: u64,
}

impl TransitionCounts {
    pub fn total(&self) -> u64 {
        self.within_object + self.cross_object + self.background
    }
}

pub fn transition_counts(
    runs: &[SubjectEvents],
    masks: &MaskRaster,
) -> Result<TransitionCounts, MetricsError> {
    let mut counts = TransitionCounts::default();
    for run in runs {
        for event in &run.events {
            if event.kind != EventKind::Saccade {
                continue;
            }
            let from = label_gaze(event.start_x, event.start_y, masks.frame(event.start_frame))?;
            let to = label_gaze(event.end_x, event.end_y, masks.frame(event.end_frame))?;
            if from == BACKGROUND || to == BACKGROUND {
                counts.background += 1;
            } else if from == to {
                counts.within_object += 1;
            } else {
                counts.cross_object += 1;
            }
        }
    }
    Ok(counts)
}

/// Share of saccades that start and land on the same nonzero object.
/// Saccades within the background do not count as within-object.
pub fn within_object_ratio(
    runs: &[SubjectEvents],
    masks: &MaskRaster,
) -> Result<f64, MetricsError> {
    let counts = transition_counts(runs, masks)?;
    if counts.total() == 0 {
        return Ok(0.0);
    }
    Ok(counts.within_object as f64 / counts.total() as f64)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RefoveationStats {
    /// Re-foveations per saccade.
    pub ratio: f64,
    /// Time between leaving an object and landing on it again.
    pub latencies_ms: Vec<f64>,
    #[serde(skip)]
    pub n_saccades: u64,
    #[serde(skip)]
    pub n_refoveations: u64,
}

/// A saccade re-foveates when it lands on a nonzero object that was
/// foveated before but is not the one currently foveated. Latency counts
/// from the end of that object's most recent foveation.
pub fn refoveation_stats(
    runs: &[SubjectEvents],
    masks: &MaskRaster,
    frame_rate_hz: f64,
) -> Result<RefoveationStats, MetricsError> {
    let mut stats = RefoveationStats::default();
    for run in runs {
        let mut last_end: std::collections::BTreeMap<OptionId, u32> = Default::default();
        let mut current_label: Option<OptionId> = None;
        let mut open_foveation: Option<(OptionId, u32)> = None;
        for event in &run.events {
            match event.kind {
                EventKind::Foveation => {
                    let label =
                        label_gaze(event.start_x, event.start_y, masks.frame(event.start_frame))?;
                    open_foveation = Some((label, event.end_frame));
                }
                EventKind::Saccade => {
                    if let Some((label, end)) = open_foveation.take() {
                        if label != BACKGROUND {
                            last_end.insert(label, end);
                        }
                        current_label = Some(label);
                    }
                    stats.n_saccades += 1;
                    let landing =
                        label_gaze(event.end_x, event.end_y, masks.frame(event.end_frame))?;
                    if landing != BACKGROUND && current_label != Some(landing) {
                        if let Some(&end) = last_end.get(&landing) {
                            stats.n_refoveations += 1;
                            stats.latencies_ms.push(
                                (event.start_frame.saturating_sub(end)) as f64 / frame_rate_hz
                                    * 1000.0,
                            );
                        }
                    }
                }
            }
        }
    }
    if stats.n_saccades > 0 {
        stats.ratio = stats.n_refoveations as f64 / stats.n_saccades as f64;
    }
    Ok(stats)
}

/// Amplitudes (degrees of visual angle) and directions (radians, 0 right,
/// +pi/2 up) of every saccade.
pub fn saccade_distributions(
    runs: &[SubjectEvents],
    manifest: &SceneManifest,
) -> (Vec<f64>, Vec<f64>) {
    let mut amplitudes = Vec::new();
    let mut directions = Vec::new();
    for run in runs {
        for event in &run.events {
            if event.kind != EventKind::Saccade {
                continue;
            }
            amplitudes.push(px_to_dva(
                event.end_x - event.start_x,
                event.end_y - event.start_y,
                manifest,
            ));
            directions.push(direction_rad(
                Point::new(event.start_x, event.start_y),
                Point::new(event.end_x, event.end_y),
            ));
        }
    }
    (amplitudes, directions)
}

/// Foveation durations in milliseconds; an event spanning frames `a..=b`
/// lasts `b - a + 1` frames.
pub fn foveation_durations(runs: &[SubjectEvents], frame_rate_hz: f64) -> Vec<f64> {
    runs.iter()
        .flat_map(|run| run.events.iter())
        .filter(|e| e.kind == EventKind::Foveation)
        .map(|e| (e.end_frame - e.start_frame + 1) as f64 / frame_rate_hz * 1000.0)
        .collect()
}

/// Per-frame gaze samples of one video's runs, accumulated into a coarse
/// grid. Positions are interpolated across each foveation; saccades are
/// instantaneous and contribute no samples.
pub fn accumulate_gaze_density(
    runs: &[SubjectEvents],
    manifest: &SceneManifest,
    counts: &mut Grid<f64>,
) -> u64 {
    let gw = counts.width();
    let gh = counts.height();
    let mut samples = 0u64;
    for run in runs {
        for event in &run.events {
            if event.kind != EventKind::Foveation {
                continue;
            }
            let span = event.end_frame - event.start_frame;
            for f in 0..=span {
                let t = if span == 0 {
                    0.0
                } else {
                    f as f64 / span as f64
                };
                let x = event.start_x + (event.end_x - event.start_x) * t;
                let y = event.start_y + (event.end_y - event.start_y) * t;
                let bx = ((x / manifest.width_px as f64) * gw as f64)
                    .floor()
                    .clamp(0.0, (gw - 1) as f64) as u32;
                let by = ((y / manifest.height_px as f64) * gh as f64)
                    .floor()
                    .clamp(0.0, (gh - 1) as f64) as u32;
                counts.set(bx, by, counts.get(bx, by) + 1.0);
                samples += 1;
            }
        }
    }
    samples
}

/// Normalized gaze-density grid for one video's runs.
pub fn gaze_density(
    runs: &[SubjectEvents],
    manifest: &SceneManifest,
    grid_w: u32,
    grid_h: u32,
) -> Result<Grid<f64>, MetricsError> {
    let mut counts = Grid::filled(grid_w, grid_h, 0.0);
    let samples = accumulate_gaze_density(runs, manifest, &mut counts);
    if samples == 0 {
        return Err(MetricsError::NoSamples("no gaze samples in corpus"));
    }
    for cell in counts.as_mut_slice() {
        *cell /= samples as f64;
    }
    Ok(counts)
}

/// Direction histogram bin index: 36 bins of 10 degrees, centered on the
/// cardinal and oblique directions so the 0/90/180/-90 peaks sit on bin
/// centers. Bin `k` covers `k*10 - 5 .. k*10 + 5` degrees.
pub fn direction_bin(direction_rad: f64) -> usize {
    let degrees = direction_rad.to_degrees();
    let shifted = (degrees + 5.0).rem_euclid(360.0);
    (shifted / 10.0).floor().min(35.0) as usize
}

pub const DIRECTION_BINS: usize = 36;

/// Chi-square goodness-of-fit against a uniform distribution over the
/// integer support observed in the sample.
#[derive(Debug, Clone, Serialize)]
pub struct UniformityTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_1pct: f64,
    /// True when uniformity is rejected at the 1% level.
    pub rejected: bool,
}

/// Upper quantile of the chi-square distribution via the Wilson-Hilferty
/// cube approximation; accurate to well under a percent for df >= 3.
pub fn chi_square_quantile_99(df: usize) -> f64 {
    let k = df as f64;
    let z99 = 2.3263478740408408; // standard normal 0.99 quantile
    let term = 1.0 - 2.0 / (9.0 * k) + z99 * (2.0 / (9.0 * k)).sqrt();
    k * term * term * term
}

/// Per-integer-value test: one bin per integer in the observed support.
/// Suitable for large samples over narrow ranges.
pub fn chi_square_uniform(samples: &[u32]) -> UniformityTest {
    let span = match support_span(samples) {
        Some(span) => span,
        None => return trivial_test(),
    };
    chi_square_uniform_coarse(samples, span)
}

/// Like [`chi_square_uniform`] but with the observed integer support split
/// into at most `n_bins` contiguous ranges; expected counts are
/// proportional to the number of integers each range covers. Use this for
/// modest sample sizes over wide ranges.
pub fn chi_square_uniform_coarse(samples: &[u32], n_bins: usize) -> UniformityTest {
    let span = match support_span(samples) {
        Some(span) => span,
        None => return trivial_test(),
    };
    let min = *samples.iter().min().unwrap();
    let bins = n_bins.max(2).min(span);
    // integer counts per bin differ by at most one
    let base = span / bins;
    let remainder = span % bins;
    let width = |i: usize| base + usize::from(i < remainder);
    let mut start = Vec::with_capacity(bins + 1);
    let mut acc = 0usize;
    for i in 0..bins {
        start.push(acc);
        acc += width(i);
    }
    start.push(acc);

    let mut observed = vec![0u64; bins];
    for &s in samples {
        let offset = (s - min) as usize;
        let bin = start.partition_point(|&b| b <= offset) - 1;
        observed[bin] += 1;
    }
    let n = samples.len() as f64;
    let statistic: f64 = observed
        .iter()
        .enumerate()
        .map(|(i, &o)| {
            let expected = n * width(i) as f64 / span as f64;
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = bins - 1;
    let critical = chi_square_quantile_99(df);
    UniformityTest {
        statistic,
        degrees_of_freedom: df,
        critical_1pct: critical,
        rejected: statistic > critical,
    }
}

fn support_span(samples: &[u32]) -> Option<usize> {
    let min = samples.iter().min()?;
    let max = samples.iter().max()?;
    let span = (max - min + 1) as usize;
    (span >= 2).then_some(span)
}

fn trivial_test() -> UniformityTest {
    UniformityTest {
        statistic: 0.0,
        degrees_of_freedom: 0,
        critical_1pct: 0.0,
        rejected: false,
    }
}

/// One video's evaluation inputs: scene context plus all event sequences
/// (runs or subjects) recorded on it.
#[derive(Debug, Clone)]
pub struct VideoCorpus {
    pub manifest: SceneManifest,
    pub masks: MaskRaster,
    pub runs: Vec<SubjectEvents>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub raw: Vec<f64>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionDistribution {
    pub raw: Vec<f64>,
    /// 36 bins of 10 degrees centered on 0, 10, ..., 350 degrees.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VideoSaccadeCount {
    pub video_id: String,
    /// Mean saccades per run on this video.
    pub mean_saccades: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefoveationReport {
    pub ratio: f64,
    pub latencies_ms: Vec<f64>,
    pub latency_histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub width: u32,
    pub height: u32,
    /// Row-major cell masses, summing to one.
    pub values: Vec<f64>,
}

/// Histogram ranges shared by every report so corpora stay comparable.
pub const DURATION_HIST_MS: (f64, f64, usize) = (0.0, 2000.0, 40);
pub const AMPLITUDE_HIST_DVA: (f64, f64, usize) = (0.0, 40.0, 40);
pub const LATENCY_HIST_MS: (f64, f64, usize) = (0.0, 10000.0, 40);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n_saccades_per_video: Vec<VideoSaccadeCount>,
    pub foveation_durations_ms: Distribution,
    pub amplitudes_dva: Distribution,
    pub directions_rad: DirectionDistribution,
    pub within_object_ratio: f64,
    pub refoveation: RefoveationReport,
    pub gaze_density: DensityGrid,
}

impl MetricsReport {
    pub fn density_grid(&self) -> Grid<f64> {
        Grid::from_vec(
            self.gaze_density.width,
            self.gaze_density.height,
            self.gaze_density.values.clone(),
        )
    }
}

/// Pool every metric over a corpus of videos. Raw value lists are sorted so
/// the report does not depend on run or subject order.
pub fn compute_report(
    videos: &[VideoCorpus],
    grid_w: u32,
    grid_h: u32,
) -> Result<MetricsReport, MetricsError> {
    let mut per_video = Vec::with_capacity(videos.len());
    let mut durations = Vec::new();
    let mut amplitudes = Vec::new();
    let mut directions = Vec::new();
    let mut transitions = TransitionCounts::default();
    let mut refov_saccades = 0u64;
    let mut refov_count = 0u64;
    let mut latencies = Vec::new();
    let mut density_counts = Grid::filled(grid_w, grid_h, 0.0);
    let mut density_samples = 0u64;

    for video in videos {
        let runs = &video.runs;
        let manifest = &video.manifest;

        let counts: Vec<usize> = runs
            .iter()
            .map(|r| {
                r.events
                    .iter()
                    .filter(|e| e.kind == EventKind::Saccade)
                    .count()
            })
            .collect();
        let mean = if counts.is_empty() {
            0.0
        } else {
            counts.iter().sum::<usize>() as f64 / counts.len() as f64
        };
        per_video.push(VideoSaccadeCount {
            video_id: manifest.video_id.clone(),
            mean_saccades: mean,
        });

        durations.extend(foveation_durations(runs, manifest.frame_rate_hz));
        let (amp, dir) = saccade_distributions(runs, manifest);
        amplitudes.extend(amp);
        directions.extend(dir);

        let t = transition_counts(runs, &video.masks)?;
        transitions.within_object += t.within_object;
        transitions.cross_object += t.cross_object;
        transitions.background += t.background;

        let refov = refoveation_stats(runs, &video.masks, manifest.frame_rate_hz)?;
        refov_saccades += refov.n_saccades;
        refov_count += refov.n_refoveations;
        latencies.extend(refov.latencies_ms);

        density_samples += accumulate_gaze_density(runs, manifest, &mut density_counts);
    }

    if density_samples == 0 {
        return Err(MetricsError::NoSamples("no gaze samples in corpus"));
    }
    for cell in density_counts.as_mut_slice() {
        *cell /= density_samples as f64;
    }

    durations.sort_by(f64::total_cmp);
    amplitudes.sort_by(f64::total_cmp);
    directions.sort_by(f64::total_cmp);
    latencies.sort_by(f64::total_cmp);

    let mut direction_counts = vec![0u64; DIRECTION_BINS];
    for &d in &directions {
        direction_counts[direction_bin(d)] += 1;
    }

    Ok(MetricsReport {
        n_saccades_per_video: per_video,
        foveation_durations_ms: Distribution {
            histogram: Histogram::from_values(
                DURATION_HIST_MS.0,
                DURATION_HIST_MS.1,
                DURATION_HIST_MS.2,
                &durations,
            ),
            raw: durations,
        },
        amplitudes_dva: Distribution {
            histogram: Histogram::from_values(
                AMPLITUDE_HIST_DVA.0,
                AMPLITUDE_HIST_DVA.1,
                AMPLITUDE_HIST_DVA.2,
                &amplitudes,
            ),
            raw: amplitudes,
        },
        directions_rad: DirectionDistribution {
            raw: directions,
            counts: direction_counts,
        },
        within_object_ratio: if transitions.total() == 0 {
            0.0
        } else {
            transitions.within_object as f64 / transitions.total() as f64
        },
        refoveation: RefoveationReport {
            ratio: if refov_saccades == 0 {
                0.0
            } else {
                refov_count as f64 / refov_saccades as f64
            },
            latency_histogram: Histogram::from_values(
                LATENCY_HIST_MS.0,
                LATENCY_HIST_MS.1,
                LATENCY_HIST_MS.2,
                &latencies,
            ),
            latencies_ms: latencies,
        },
        gaze_density: DensityGrid {
            width: grid_w,
            height: grid_h,
            values: density_counts.as_slice().to_vec(),
        },
    })
}
