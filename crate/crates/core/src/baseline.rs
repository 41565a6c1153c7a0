//! Random scanpath baseline: a fixation/saccade sequence with uniform
//! fixation durations, mapped onto frame-wise local maxima of the feature
//! map. Object-agnostic and without smooth pursuit, it serves as the
//! contrast model for the object-based simulator.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Point;
use crate::rng::SimRng;
use crate::scanpath::{
    direction_rad, FoveationEvent, ModelKind, SaccadeEvent, ScanEvent, Scanpath,
};
use crate::scene::{px_to_dva, SceneBundle};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("invalid baseline config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Fixation duration range in frames, inclusive on both ends.
    pub min_fix_frames: u32,
    pub max_fix_frames: u32,
    /// Candidate saliency peaks per frame.
    pub top_k: usize,
    /// Minimum separation between selected peaks.
    pub min_peak_dist_px: f64,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            // 100-500 ms at 30 Hz
            min_fix_frames: 3,
            max_fix_frames: 15,
            top_k: 5,
            min_peak_dist_px: 32.0,
            seed: 0,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.min_fix_frames == 0 || self.min_fix_frames > self.max_fix_frames {
            return Err(BaselineError::InvalidConfig(format!(
                "fixation range [{}, {}] must satisfy 1 <= min <= max",
                self.min_fix_frames, self.max_fix_frames
            )));
        }
        if self.top_k == 0 {
            return Err(BaselineError::InvalidConfig("top_k must be >= 1".to_string()));
        }
        if !(self.min_peak_dist_px >= 0.0 && self.min_peak_dist_px.is_finite()) {
            return Err(BaselineError::InvalidConfig(format!(
                "min_peak_dist_px must be finite and >= 0, got {}",
                self.min_peak_dist_px
            )));
        }
        Ok(())
    }
}

/// Strict local maxima of a frame under 8-neighborhood comparison, greedily
/// selected by descending value (ties in row-major order) subject to a
/// pairwise minimum distance, capped at `top_k`. A frame without strict
/// maxima (e.g. constant) yields the frame center as the sole candidate.
pub fn local_maxima(
    frame: &[f32],
    width: u32,
    height: u32,
    top_k: usize,
    min_dist: f64,
) -> Vec<(u32, u32)> {
    debug_assert_eq!(frame.len(), width as usize * height as usize);
    let w = width as i64;
    let h = height as i64;
    let value = |x: i64, y: i64| frame[(y * w + x) as usize];

    let mut candidates: Vec<(f32, u32, u32)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = value(x, y);
            let mut strict_max = true;
            'neighbors: for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    if value(nx, ny) >= v {
                        strict_max = false;
                        break 'neighbors;
                    }
                }
            }
            if strict_max {
                candidates.push((v, x as u32, y as u32));
            }
        }
    }

    if candidates.is_empty() {
        let center = Point::new((width - 1) as f64 / 2.0, (height - 1) as f64 / 2.0);
        let (cx, cy) = center.nearest_pixel(width, height).unwrap();
        return vec![(cx, cy)];
    }

    // row-major candidate order makes the sort's tie behavior positional
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut selected: Vec<(u32, u32)> = Vec::new();
    for (_, x, y) in candidates {
        if selected.len() >= top_k {
            break;
        }
        let far_enough = selected.iter().all(|&(sx, sy)| {
            let dx = sx as f64 - x as f64;
            let dy = sy as f64 - y as f64;
            (dx * dx + dy * dy).sqrt() >= min_dist
        });
        if far_enough {
            selected.push((x, y));
        }
    }
    selected
}

/// Generate a random scanpath: fixations with uniform durations in
/// `[min_fix_frames, max_fix_frames]`, each followed by an instantaneous
/// saccade to a uniformly chosen local maximum of the current frame. Gaze
/// is static within fixations.
pub fn simulate_baseline(
    scene: &SceneBundle,
    config: &BaselineConfig,
) -> Result<Scanpath, BaselineError> {
    config.validate()?;
    let manifest = &scene.manifest;
    let n_frames = manifest.n_frames;
    let mut rng = SimRng::seed_from_u64(config.seed);
    let span = (config.max_fix_frames - config.min_fix_frames + 1) as usize;

    let mut gaze = Point::new(
        (manifest.width_px - 1) as f64 / 2.0,
        (manifest.height_px - 1) as f64 / 2.0,
    );
    let mut events = Vec::new();
    let mut start = 0u32;
    loop {
        let duration = config.min_fix_frames + rng.uniform_index(span) as u32;
        let end = (start + duration - 1).min(n_frames - 1);
        let gaze_label = crate::metrics::label_gaze(gaze.x, gaze.y, scene.masks.frame(start))
            .expect("baseline gaze stays inside the frame");
        events.push(ScanEvent::Foveation(FoveationEvent {
            start_frame: start,
            end_frame: end,
            entry: gaze,
            exit: gaze,
            option_id: gaze_label,
        }));
        if end + 1 >= n_frames {
            break;
        }

        let peaks = local_maxima(
            scene.features.frame(end),
            manifest.width_px,
            manifest.height_px,
            config.top_k,
            config.min_peak_dist_px,
        );
        let (tx, ty) = peaks[rng.uniform_index(peaks.len())];
        let target = Point::new(tx as f64, ty as f64);
        let target_label = scene.masks.frame(end).label(tx, ty);
        events.push(ScanEvent::Saccade(SaccadeEvent {
            frame: end,
            from: gaze,
            to: target,
            target_id: target_label,
            amplitude_dva: px_to_dva(target.x - gaze.x, target.y - gaze.y, manifest),
            direction_rad: direction_rad(gaze, target),
        }));
        gaze = target;
        start = end + 1;
    }

    let path = Scanpath {
        video_id: manifest.video_id.clone(),
        model: ModelKind::Baseline,
        run_seed: config.seed,
        events,
    };
    debug_assert!(path.check_alternation().is_ok());
    Ok(path)
}
