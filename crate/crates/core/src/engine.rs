//! The accumulator race: evidence integration, inhibition of return,
//! threshold-triggered saccades, probabilistic landing, and mask-following
//! gaze propagation between saccades.
//!
//! One step runs per video frame, including the first. A step builds the
//! sensitivity and information maps for the current gaze, refreshes drift
//! rates and inhibition, and advances every option's decision variable by
//! `mu * dt` (the foveated option ignores its inhibition; all others scale
//! their drift by `1 - xi`) plus `s * N(0,1)` of diffusion noise, reflecting
//! at zero. The first option at or above the threshold wins (largest
//! overshoot, ties to the lowest id), which closes the current foveation,
//! samples a landing position inside the winner proportional to the
//! information map, and restarts the race with all decision variables at
//! zero. Saccades are instantaneous: gaze is at the old position during the
//! trigger frame and at the landing from the next frame on. Between
//! saccades gaze follows the foveated object's mask centroid, which yields
//! fixation on static objects and smooth pursuit on moving ones.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evidence::{evidence_all, EvidenceVector, OptionId, BACKGROUND};
use crate::field::{
    apply_object_sensitivity, center_bias_map, gaussian_sensitivity, information_map,
    normalized_feature, CenterBiasParams,
};
use crate::grid::{Grid, Point};
use crate::rng::SimRng;
use crate::scanpath::{
    direction_rad, FoveationEvent, ModelKind, SaccadeEvent, ScanEvent, Scanpath,
};
use crate::scene::raster::MaskFrame;
use crate::scene::{px_to_dva, SceneBundle};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("landing target {0} is absent from the frame")]
    TargetAbsent(OptionId),
}

/// All model parameters. The defaults are the operating point used
/// throughout the evaluation tooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Decision threshold in evidence units.
    pub theta: f64,
    /// Diffusion scale per step.
    pub s: f64,
    /// Gaussian sensitivity spread in degrees of visual angle.
    pub sigma_dva: f64,
    /// Uniform sensitivity within the foveated object.
    pub omega: f64,
    /// Inhibition-of-return decay per frame.
    pub epsilon: f64,
    /// Step size in frames.
    pub dt: f64,
    pub center_bias: CenterBiasParams,
    pub seed: u64,
    /// Apply the log-area factor to the background option too.
    pub bg_log_scaling: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            theta: 0.03,
            s: 0.002,
            sigma_dva: 6.5,
            omega: 7e-8,
            epsilon: 1.0 / 120.0,
            dt: 1.0,
            center_bias: CenterBiasParams::default(),
            seed: 0,
            bg_log_scaling: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::InvalidConfig(msg));
        if !(self.theta > 0.0) {
            return bad(format!("theta must be > 0, got {}", self.theta));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return bad(format!("s must be finite and >= 0, got {}", self.s));
        }
        if !(self.sigma_dva > 0.0 && self.sigma_dva.is_finite()) {
            return bad(format!("sigma_dva must be positive, got {}", self.sigma_dva));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be finite and >= 0, got {}", self.omega));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        self.center_bias
            .validate()
            .map_err(|e| EngineError::InvalidConfig(e.to_string()))
    }
}

/// Race state of one option.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectState {
    pub option_id: OptionId,
    /// Decision variable, reflected at zero.
    pub v: f64,
    /// Inhibition of return in [0, 1].
    pub xi: f64,
    /// Frame at which this option's last foveation ended.
    pub last_foveation_end: Option<u32>,
    // Linear decay is computed from the departure point so xi hits exact
    // fractions of the decay rate instead of accumulating rounding error.
    xi_at_departure: f64,
    frames_since_departure: u32,
}

impl ObjectState {
    pub fn new(option_id: OptionId) -> Self {
        Self {
            option_id,
            v: 0.0,
            xi: 0.0,
            last_foveation_end: None,
            xi_at_departure: 0.0,
            frames_since_departure: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeState {
    pub pos: Point,
    pub foveated_id: OptionId,
    pub frame: u32,
}

/// Initial race state: all decision variables at zero, gaze at the frame
/// center, the option under the center pixel foveated with full inhibition,
/// and a generator seeded from the config.
pub fn init_run(scene: &SceneBundle, config: &SimConfig) -> (Vec<ObjectState>, GazeState, SimRng) {
    let manifest = &scene.manifest;
    let mut states: Vec<ObjectState> = Vec::with_capacity(manifest.object_ids.len() + 1);
    states.push(ObjectState::new(BACKGROUND));
    for id in manifest.sorted_object_ids() {
        states.push(ObjectState::new(id));
    }

    let center = Point::new(
        (manifest.width_px - 1) as f64 / 2.0,
        (manifest.height_px - 1) as f64 / 2.0,
    );
    let (cx, cy) = center
        .nearest_pixel(manifest.width_px, manifest.height_px)
        .expect("frame center lies inside the frame");
    let foveated_id = scene.masks.frame(0).label(cx, cy);
    for state in &mut states {
        if state.option_id == foveated_id {
            state.xi = 1.0;
            state.xi_at_departure = 1.0;
        }
    }

    let gaze = GazeState {
        pos: center,
        foveated_id,
        frame: 0,
    };
    (states, gaze, SimRng::seed_from_u64(config.seed))
}

/// Refresh inhibition: the foveated option is pinned at 1, all others decay
/// linearly by `epsilon * dt` per frame toward zero.
pub fn update_ior(states: &mut [ObjectState], foveated_id: OptionId, epsilon: f64, dt: f64) {
    for state in states {
        if state.option_id == foveated_id {
            state.xi = 1.0;
            state.xi_at_departure = 1.0;
            state.frames_since_departure = 0;
        } else {
            state.frames_since_departure = state.frames_since_departure.saturating_add(1);
            let decayed = state.xi_at_departure
                - (epsilon * dt) * state.frames_since_departure as f64;
            state.xi = decayed.max(0.0);
        }
    }
}

/// One accumulator step for every option. Noise is drawn in ascending
/// option-id order (the slice is kept sorted). Returns the winning option,
/// if any: the largest overshoot past the threshold, ties to the lowest id.
pub fn step_accumulators(
    states: &mut [ObjectState],
    evidences: &EvidenceVector,
    foveated_id: OptionId,
    config: &SimConfig,
    rng: &mut SimRng,
) -> Option<OptionId> {
    let mut winner: Option<(OptionId, f64)> = None;
    for state in states.iter_mut() {
        let mu = evidences.mu(state.option_id);
        let drift = if state.option_id == foveated_id {
            mu * config.dt
        } else {
            mu * (1.0 - state.xi) * config.dt
        };
        let dv = drift + config.s * rng.normal();
        state.v = (state.v + dv).max(0.0);
        if state.v >= config.theta {
            let overshoot = state.v - config.theta;
            let better = match winner {
                None => true,
                Some((_, best)) => overshoot > best,
            };
            if better {
                winner = Some((state.option_id, overshoot));
            }
        }
    }
    winner.map(|(id, _)| id)
}

/// Sample a landing pixel within the target's mask, with probability
/// proportional to the information map; a target whose information is all
/// zero falls back to a uniform choice over its pixels. Consumes exactly
/// one uniform draw.
pub fn sample_landing(
    info: &Grid<f64>,
    mask: MaskFrame<'_>,
    target: OptionId,
    rng: &mut SimRng,
) -> Result<Point, EngineError> {
    let width = mask.width as usize;
    let mut pixels: Vec<(u32, u32)> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for (i, (&label, &w)) in mask.labels.iter().zip(info.as_slice()).enumerate() {
        if label == target {
            pixels.push(((i % width) as u32, (i / width) as u32));
            weights.push(w);
            total += w;
        }
    }
    if pixels.is_empty() {
        return Err(EngineError::TargetAbsent(target));
    }

    let chosen = if total > 0.0 {
        let u = rng.uniform_f64() * total;
        let mut cumulative = 0.0;
        let mut chosen = pixels.len() - 1;
        for (i, &w) in weights.iter().enumerate() {
            cumulative += w;
            if u < cumulative {
                chosen = i;
                break;
            }
        }
        chosen
    } else {
        rng.uniform_index(pixels.len())
    };
    let (x, y) = pixels[chosen];
    Ok(Point::new(x as f64, y as f64))
}

/// Mean pixel position of an object's mask, if present in the frame.
pub fn mask_centroid(mask: MaskFrame<'_>, option: OptionId) -> Option<Point> {
    let width = mask.width as usize;
    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut count = 0usize;
    for (i, &label) in mask.labels.iter().enumerate() {
        if label == option {
            sum_x += (i % width) as f64;
            sum_y += (i / width) as f64;
            count += 1;
        }
    }
    if count == 0 {
        return None;
    }
    Some(Point::new(sum_x / count as f64, sum_y / count as f64))
}

/// Move gaze with the foveated object between consecutive frames. The gaze
/// shifts by the displacement of the object's mask centroid and clamps to
/// the frame; if the object vanished, the position holds and the foveation
/// falls back to the background.
pub fn propagate_gaze(gaze: &mut GazeState, prev: MaskFrame<'_>, next: MaskFrame<'_>) {
    if gaze.foveated_id == BACKGROUND {
        return;
    }
    let Some(next_centroid) = mask_centroid(next, gaze.foveated_id) else {
        gaze.foveated_id = BACKGROUND;
        return;
    };
    let Some(prev_centroid) = mask_centroid(prev, gaze.foveated_id) else {
        return;
    };
    gaze.pos = Point::new(
        gaze.pos.x + (next_centroid.x - prev_centroid.x),
        gaze.pos.y + (next_centroid.y - prev_centroid.y),
    )
    .clamped(next.width, next.height);
}

/// Run the full race over a scene and return the scanpath.
pub fn simulate(scene: &SceneBundle, config: &SimConfig) -> Result<Scanpath, EngineError> {
    simulate_traced(scene, config).map(|(path, _)| path)
}

/// Like [`simulate`], additionally returning the per-frame gaze trace
/// (one position per video frame).
pub fn simulate_traced(
    scene: &SceneBundle,
    config: &SimConfig,
) -> Result<(Scanpath, Vec<Point>), EngineError> {
    config.validate()?;
    let manifest = &scene.manifest;
    let n_frames = manifest.n_frames;
    let bias = center_bias_map(manifest, &config.center_bias);

    let (mut states, mut gaze, mut rng) = init_run(scene, config);
    let mut events: Vec<ScanEvent> = Vec::new();
    let mut trace: Vec<Point> = Vec::with_capacity(n_frames as usize);
    trace.push(gaze.pos);

    // Open foveation under construction; None only after a saccade on the
    // final frame.
    let mut foveation: Option<(u32, Point, OptionId)> = Some((0, gaze.pos, gaze.foveated_id));
    let mut just_saccaded = false;

    for t in 0..n_frames {
        if t > 0 {
            if just_saccaded {
                // The saccade replaced pursuit on this transition; gaze is
                // already at the landing position.
                just_saccaded = false;
            } else {
                propagate_gaze(&mut gaze, scene.masks.frame(t - 1), scene.masks.frame(t));
            }
            gaze.frame = t;
            trace.push(gaze.pos);
        }

        let mask = scene.masks.frame(t);
        let f_norm = normalized_feature(
            scene.features.frame(t),
            manifest.width_px,
            manifest.height_px,
        );
        let gauss = gaussian_sensitivity(gaze.pos, config.sigma_dva, manifest);
        let field = apply_object_sensitivity(gauss, mask, gaze.foveated_id, config.omega, gaze.pos);
        let info = information_map(&f_norm, &bias, &field)
            .expect("maps built from one manifest share a shape");
        let evidences = evidence_all(&info, mask, manifest, config.bg_log_scaling);

        update_ior(&mut states, gaze.foveated_id, config.epsilon, config.dt);
        let winner = step_accumulators(&mut states, &evidences, gaze.foveated_id, config, &mut rng);

        let Some(winner) = winner else {
            continue;
        };

        // A winner that vanished since its evidence was computed retargets
        // the background; a frame with no background either holds position.
        let (target, landing) = if evidences.area(winner) >= 1 {
            let landing = sample_landing(&info, mask, winner, &mut rng)
                .expect("winner area checked above");
            (winner, landing)
        } else if evidences.area(BACKGROUND) >= 1 {
            let landing = sample_landing(&info, mask, BACKGROUND, &mut rng)
                .expect("background area checked above");
            (BACKGROUND, landing)
        } else {
            (BACKGROUND, gaze.pos)
        };

        let (start_frame, entry, option_id) =
            foveation.take().expect("a foveation is open while stepping");
        events.push(ScanEvent::Foveation(FoveationEvent {
            start_frame,
            end_frame: t,
            entry,
            exit: gaze.pos,
            option_id,
        }));
        for state in states.iter_mut() {
            if state.option_id == gaze.foveated_id {
                state.last_foveation_end = Some(t);
            }
        }

        let amplitude_dva = px_to_dva(landing.x - gaze.pos.x, landing.y - gaze.pos.y, manifest);
        events.push(ScanEvent::Saccade(SaccadeEvent {
            frame: t,
            from: gaze.pos,
            to: landing,
            target_id: target,
            amplitude_dva,
            direction_rad: direction_rad(gaze.pos, landing),
        }));

        for state in states.iter_mut() {
            state.v = 0.0;
        }
        gaze.pos = landing;
        gaze.foveated_id = target;
        just_saccaded = true;
        if t + 1 < n_frames {
            foveation = Some((t + 1, landing, target));
        }
    }

    if let Some((start_frame, entry, option_id)) = foveation {
        events.push(ScanEvent::Foveation(FoveationEvent {
            start_frame,
            end_frame: n_frames - 1,
            entry,
            exit: gaze.pos,
            option_id,
        }));
    }

    let path = Scanpath {
        video_id: manifest.video_id.clone(),
        model: ModelKind::ObjectDdm,
        run_seed: config.seed,
        events,
    };
    debug_assert!(path.check_alternation().is_ok());
    Ok((path, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::evidence;
    use crate::scene::manifest::test_manifest;
    use crate::scene::raster::{FeatureRaster, MaskRaster};

    /// Static scene: one object covering the whole frame, constant features.
    fn full_object_scene(w: u32, h: u32, n: u32) -> SceneBundle {
        let manifest = test_manifest(w, h, n, &[1]);
        let cells = (w * h * n) as usize;
        let features = FeatureRaster::from_values(w, h, n, vec![1.0; cells]).unwrap();
        let masks = MaskRaster::from_labels(w, h, n, vec![1u16; cells], &manifest).unwrap();
        SceneBundle::new(manifest, features, masks).unwrap()
    }

    fn noise_free_config(omega: f64) -> SimConfig {
        SimConfig {
            s: 0.0,
            omega,
            center_bias: CenterBiasParams {
                enabled: false,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn init_starts_at_zero_with_center_foveation() {
        let scene = full_object_scene(8, 8, 4);
        let config = SimConfig::default();
        let (states, gaze, _) = init_run(&scene, &config);
        assert!(states.iter().all(|s| s.v == 0.0));
        assert_eq!(gaze.foveated_id, 1);
        let obj = states.iter().find(|s| s.option_id == 1).unwrap();
        assert_eq!(obj.xi, 1.0);
        let bg = states.iter().find(|s| s.option_id == 0).unwrap();
        assert_eq!(bg.xi, 0.0);
        assert_eq!(gaze.pos, Point::new(3.5, 3.5));
    }

    #[test]
    fn init_same_seed_same_stream() {
        let scene = full_object_scene(4, 4, 1);
        let config = SimConfig {
            seed: 99,
            ..Default::default()
        };
        let (_, _, mut a) = init_run(&scene, &config);
        let (_, _, mut b) = init_run(&scene, &config);
        for _ in 0..32 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn noise_free_step_arithmetic() {
        // mu 0.01, theta 0.03: the third step wins.
        let manifest = test_manifest(2, 2, 1, &[]);
        let info = Grid::filled(2, 2, 0.01 / 4.0f64.ln());
        let labels = vec![0u16; 4];
        let mask = MaskFrame {
            width: 2,
            height: 2,
            labels: &labels,
        };
        let ev = evidence_all(&info, mask, &manifest, true);
        let mut states = vec![ObjectState::new(0)];
        let config = SimConfig {
            s: 0.0,
            ..Default::default()
        };
        let mut rng = SimRng::seed_from_u64(0);
        assert_eq!(
            step_accumulators(&mut states, &ev, BACKGROUND, &config, &mut rng),
            None
        );
        assert!((states[0].v - 0.01).abs() < 1e-12);
        assert_eq!(
            step_accumulators(&mut states, &ev, BACKGROUND, &config, &mut rng),
            None
        );
        let w = step_accumulators(&mut states, &ev, BACKGROUND, &config, &mut rng);
        assert_eq!(w, Some(0));
    }

    #[test]
    fn foveated_branch_ignores_inhibition() {
        let manifest = test_manifest(2, 2, 1, &[1]);
        let info = Grid::filled(2, 2, 1.0);
        let labels = vec![1u16; 4];
        let mask = MaskFrame {
            width: 2,
            height: 2,
            labels: &labels,
        };
        let ev = evidence_all(&info, mask, &manifest, true);
        let config = SimConfig {
            s: 0.0,
            theta: 1e9,
            ..Default::default()
        };
        let mut rng = SimRng::seed_from_u64(0);

        let mut states = vec![ObjectState::new(0), ObjectState::new(1)];
        states[1].xi = 1.0;
        step_accumulators(&mut states, &ev, 1, &config, &mut rng);
        assert!((states[1].v - ev.mu(1)).abs() < 1e-12, "full drift while foveated");

        let mut states = vec![ObjectState::new(0), ObjectState::new(1)];
        states[1].xi = 1.0;
        step_accumulators(&mut states, &ev, 0, &config, &mut rng);
        assert_eq!(states[1].v, 0.0, "fully inhibited non-foveated option is frozen");
    }

    #[test]
    fn ior_linear_decay() {
        let mut states = vec![ObjectState::new(0), ObjectState::new(1)];
        // Foveate object 1 once, then leave it on the background.
        update_ior(&mut states, 1, 1.0 / 120.0, 1.0);
        assert_eq!(states[1].xi, 1.0);
        for _ in 0..60 {
            update_ior(&mut states, 0, 1.0 / 120.0, 1.0);
        }
        assert_eq!(states[1].xi, 0.5, "half decayed after 60 frames");
        for _ in 0..60 {
            update_ior(&mut states, 0, 1.0 / 120.0, 1.0);
        }
        assert_eq!(states[1].xi, 0.0, "fully decayed at 120 frames");
        update_ior(&mut states, 0, 1.0 / 120.0, 1.0);
        assert_eq!(states[1].xi, 0.0, "floor at zero");
    }

    #[test]
    fn ior_refoveation_resets_to_one() {
        let mut states = vec![ObjectState::new(0), ObjectState::new(1)];
        update_ior(&mut states, 1, 0.25, 1.0);
        update_ior(&mut states, 0, 0.25, 1.0);
        assert_eq!(states[1].xi, 0.75);
        update_ior(&mut states, 1, 0.25, 1.0);
        assert_eq!(states[1].xi, 1.0);
    }

    #[test]
    fn landing_on_single_pixel_target() {
        let info = Grid::filled(2, 2, 1.0);
        let labels = vec![0u16, 3, 0, 0];
        let mask = MaskFrame {
            width: 2,
            height: 2,
            labels: &labels,
        };
        let mut rng = SimRng::seed_from_u64(1);
        let p = sample_landing(&info, mask, 3, &mut rng).unwrap();
        assert_eq!(p, Point::new(1.0, 0.0));
    }

    #[test]
    fn landing_frequencies_follow_information() {
        let mut info = Grid::filled(2, 1, 0.0);
        info.set(0, 0, 0.75);
        info.set(1, 0, 0.25);
        let labels = vec![2u16, 2];
        let mask = MaskFrame {
            width: 2,
            height: 1,
            labels: &labels,
        };
        let mut rng = SimRng::seed_from_u64(7);
        let n = 100_000;
        let mut first = 0usize;
        for _ in 0..n {
            if sample_landing(&info, mask, 2, &mut rng).unwrap().x == 0.0 {
                first += 1;
            }
        }
        let freq = first as f64 / n as f64;
        assert!((freq - 0.75).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn landing_uniform_when_information_vanishes() {
        let info = Grid::filled(2, 1, 0.0);
        let labels = vec![4u16, 4];
        let mask = MaskFrame {
            width: 2,
            height: 1,
            labels: &labels,
        };
        let mut rng = SimRng::seed_from_u64(3);
        let n = 20_000;
        let mut first = 0usize;
        for _ in 0..n {
            if sample_landing(&info, mask, 4, &mut rng).unwrap().x == 0.0 {
                first += 1;
            }
        }
        let freq = first as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn landing_on_absent_target_errors() {
        let info = Grid::filled(2, 1, 1.0);
        let labels = vec![0u16, 0];
        let mask = MaskFrame {
            width: 2,
            height: 1,
            labels: &labels,
        };
        let mut rng = SimRng::seed_from_u64(3);
        assert!(sample_landing(&info, mask, 9, &mut rng).is_err());
    }

    #[test]
    fn pursuit_follows_translation_and_holds_on_static() {
        // 6x4 frames; object 1 occupies x in [0,1] then [2,3].
        let mk = |x0: u32| {
            let mut labels = vec![0u16; 24];
            for y in 0..4u32 {
                for x in x0..x0 + 2 {
                    labels[(y * 6 + x) as usize] = 1;
                }
            }
            labels
        };
        let prev = mk(0);
        let next = mk(2);
        let prev_frame = MaskFrame {
            width: 6,
            height: 4,
            labels: &prev,
        };
        let next_frame = MaskFrame {
            width: 6,
            height: 4,
            labels: &next,
        };

        let mut gaze = GazeState {
            pos: Point::new(1.0, 2.0),
            foveated_id: 1,
            frame: 0,
        };
        propagate_gaze(&mut gaze, prev_frame, next_frame);
        assert_eq!(gaze.pos, Point::new(3.0, 2.0));

        let mut gaze = GazeState {
            pos: Point::new(1.0, 2.0),
            foveated_id: 1,
            frame: 0,
        };
        propagate_gaze(&mut gaze, prev_frame, prev_frame);
        assert_eq!(gaze.pos, Point::new(1.0, 2.0));
    }

    #[test]
    fn pursuit_falls_back_when_object_vanishes() {
        let with_object = vec![1u16, 1, 0, 0];
        let without = vec![0u16; 4];
        let prev = MaskFrame {
            width: 2,
            height: 2,
            labels: &with_object,
        };
        let next = MaskFrame {
            width: 2,
            height: 2,
            labels: &without,
        };
        let mut gaze = GazeState {
            pos: Point::new(0.5, 0.0),
            foveated_id: 1,
            frame: 0,
        };
        propagate_gaze(&mut gaze, prev, next);
        assert_eq!(gaze.foveated_id, BACKGROUND);
        assert_eq!(gaze.pos, Point::new(0.5, 0.0));
    }

    #[test]
    fn noise_free_first_passage_period_three() {
        // Constant information map tuned so mu*dt is just above 0.01:
        // the race crosses theta = 0.03 every 3 frames, giving 100 saccades
        // over 300 frames (the last one on the final frame).
        let scene = full_object_scene(64, 48, 300);
        let area = (64 * 48) as f64;
        let omega = 0.0101 / area.ln();
        let config = noise_free_config(omega);
        let path = simulate(&scene, &config).unwrap();
        assert_eq!(path.n_saccades(), 100);
        for (k, saccade) in path.saccades().enumerate() {
            assert_eq!(saccade.frame, (k as u32 + 1) * 3 - 1);
        }
        // Every saccade stays within the single full-frame object.
        assert!(path.saccades().all(|s| s.target_id == 1));
    }

    #[test]
    fn noise_free_period_matches_evidence_oracle() {
        let scene = full_object_scene(64, 48, 300);
        let omega = 0.0009765625; // 2^-10, sums exactly
        let config = noise_free_config(omega);

        // Independent drift computation through the public evidence op.
        let info = Grid::filled(64, 48, omega);
        let mu = evidence(&info, scene.masks.frame(0), 1);
        let period = (config.theta / (mu * config.dt)).ceil() as u32;
        assert_eq!(period, 4);

        let path = simulate(&scene, &config).unwrap();
        for (k, saccade) in path.saccades().enumerate() {
            assert_eq!(saccade.frame + 1, (k as u32 + 1) * period);
        }
        assert_eq!(path.n_saccades() as u32, 300 / period);
    }

    #[test]
    fn unreachable_threshold_gives_single_foveation() {
        let scene = full_object_scene(16, 16, 300);
        let config = SimConfig {
            theta: f64::INFINITY,
            ..Default::default()
        };
        let path = simulate(&scene, &config).unwrap();
        assert_eq!(path.n_saccades(), 0);
        let foveations: Vec<_> = path.foveations().collect();
        assert_eq!(foveations.len(), 1);
        assert_eq!(foveations[0].start_frame, 0);
        assert_eq!(foveations[0].end_frame, 299);
    }

    #[test]
    fn same_seed_reproduces_scanpath() {
        let scene = full_object_scene(24, 24, 60);
        let config = SimConfig {
            seed: 1234,
            ..Default::default()
        };
        let a = simulate(&scene, &config).unwrap();
        let b = simulate(&scene, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_rejected() {
        let scene = full_object_scene(4, 4, 2);
        let config = SimConfig {
            theta: 0.0,
            ..Default::default()
        };
        assert!(simulate(&scene, &config).is_err());
    }

    #[test]
    fn trace_has_one_position_per_frame() {
        let scene = full_object_scene(16, 16, 50);
        let (path, trace) = simulate_traced(&scene, &SimConfig::default()).unwrap();
        assert_eq!(trace.len(), 50);
        path.check_alternation().unwrap();
    }
}
