//! Synthetic scene generation: axis-aligned rectangles bouncing inside the
//! frame, each carrying a constant feature value over a dim background.
//! Used by the test suites, the benchmarks, and the demo tooling; real
//! deployments ingest feature maps and masks produced by upstream vision
//! pipelines instead.

use std::path::{Path, PathBuf};

use crate::scene::manifest::{ObjectCategory, ObjectDecl, SceneManifest};
use crate::scene::raster::{FeatureRaster, MaskRaster};
use crate::scene::{SceneBundle, SceneError};

#[derive(Debug, Clone)]
pub struct RectSpec {
    pub id: u16,
    pub category: ObjectCategory,
    pub width: u32,
    pub height: u32,
    /// Center position on frame 0.
    pub center: (f64, f64),
    /// Center displacement per frame; rectangles reflect off the borders.
    pub velocity: (f64, f64),
    /// Feature value painted over the rectangle.
    pub feature: f32,
}

#[derive(Debug, Clone)]
pub struct SyntheticSceneSpec {
    pub video_id: String,
    pub width: u32,
    pub height: u32,
    pub n_frames: u32,
    pub frame_rate_hz: f64,
    pub px_per_dva: f64,
    pub background_feature: f32,
    pub rects: Vec<RectSpec>,
}

impl SyntheticSceneSpec {
    /// The fixed scene used across the crate's trend and contrast tests:
    /// 640x480, 300 frames, two large salient rectangles flanking the
    /// center almost edge to edge (so evidence races resolve by drift, not
    /// noise) and a third rectangle that starts off-center and drifts
    /// toward the pair, all over a dim background.
    pub fn three_rectangles() -> Self {
        Self {
            video_id: "synthetic3".to_string(),
            width: 640,
            height: 480,
            n_frames: 300,
            frame_rate_hz: 30.0,
            px_per_dva: 3.0,
            background_feature: 0.05,
            rects: vec![
                RectSpec {
                    id: 1,
                    category: ObjectCategory::Human,
                    width: 56,
                    height: 72,
                    center: (284.0, 240.0),
                    velocity: (-0.05, 0.04),
                    feature: 1.0,
                },
                RectSpec {
                    id: 2,
                    category: ObjectCategory::Vehicle,
                    width: 56,
                    height: 72,
                    center: (352.0, 240.0),
                    velocity: (0.05, -0.04),
                    feature: 0.98,
                },
                RectSpec {
                    id: 3,
                    category: ObjectCategory::Animal,
                    width: 56,
                    height: 48,
                    center: (370.0, 130.0),
                    velocity: (-0.35, 0.28),
                    feature: 0.92,
                },
            ],
        }
    }

    /// Crowded variant with `n` rectangles laid out on a grid, for sizing
    /// and performance work.
    pub fn many_rectangles(n: usize) -> Self {
        let mut rects = Vec::with_capacity(n);
        for i in 0..n {
            let col = (i % 5) as f64;
            let row = (i / 5) as f64;
            rects.push(RectSpec {
                id: (i + 1) as u16,
                category: ObjectCategory::Other,
                width: 70,
                height: 56,
                center: (80.0 + col * 120.0, 90.0 + row * 150.0),
                velocity: (
                    0.4 * if i % 2 == 0 { 1.0 } else { -1.0 },
                    0.3 * if i % 3 == 0 { 1.0 } else { -1.0 },
                ),
                feature: 0.7 + 0.3 * ((i % 4) as f32 / 3.0),
            });
        }
        Self {
            video_id: format!("synthetic{n}"),
            width: 640,
            height: 480,
            n_frames: 300,
            frame_rate_hz: 30.0,
            px_per_dva: 8.0,
            background_feature: 0.06,
            rects,
        }
    }
}

fn reflect(center: f64, velocity: f64, half: f64, limit: f64) -> (f64, f64) {
    let mut c = center + velocity;
    let mut v = velocity;
    if c - half < 0.0 {
        c = half + (half - c);
        v = -v;
    } else if c + half > limit {
        c = (limit - half) - (c + half - limit);
        v = -v;
    }
    (c, v)
}

/// Render the spec into a full scene bundle.
pub fn build_scene(spec: &SyntheticSceneSpec) -> SceneBundle {
    let manifest = SceneManifest {
        video_id: spec.video_id.clone(),
        width_px: spec.width,
        height_px: spec.height,
        n_frames: spec.n_frames,
        frame_rate_hz: spec.frame_rate_hz,
        px_per_dva: spec.px_per_dva,
        feature_path: PathBuf::from(format!("{}.feature.oddm", spec.video_id)),
        mask_path: PathBuf::from(format!("{}.mask.oddm", spec.video_id)),
        object_ids: spec
            .rects
            .iter()
            .map(|r| ObjectDecl {
                id: r.id,
                category: r.category,
            })
            .collect(),
    };

    let px = spec.width as usize * spec.height as usize;
    let mut features = vec![spec.background_feature; px * spec.n_frames as usize];
    let mut labels = vec![0u16; px * spec.n_frames as usize];

    let mut centers: Vec<(f64, f64)> = spec.rects.iter().map(|r| r.center).collect();
    let mut velocities: Vec<(f64, f64)> = spec.rects.iter().map(|r| r.velocity).collect();

    for t in 0..spec.n_frames as usize {
        let frame_features = &mut features[t * px..(t + 1) * px];
        let frame_labels = &mut labels[t * px..(t + 1) * px];
        // later rectangles paint over earlier ones where they overlap
        for (i, rect) in spec.rects.iter().enumerate() {
            let (cx, cy) = centers[i];
            let half_w = rect.width as f64 / 2.0;
            let half_h = rect.height as f64 / 2.0;
            let x0 = (cx - half_w).round().max(0.0) as usize;
            let x1 = ((cx + half_w).round() as usize).min(spec.width as usize);
            let y0 = (cy - half_h).round().max(0.0) as usize;
            let y1 = ((cy + half_h).round() as usize).min(spec.height as usize);
            for y in y0..y1 {
                let row = y * spec.width as usize;
                for x in x0..x1 {
                    frame_features[row + x] = rect.feature;
                    frame_labels[row + x] = rect.id;
                }
            }
        }
        for (i, rect) in spec.rects.iter().enumerate() {
            let half_w = rect.width as f64 / 2.0;
            let half_h = rect.height as f64 / 2.0;
            let (cx, vx) = reflect(centers[i].0, velocities[i].0, half_w, spec.width as f64);
            let (cy, vy) = reflect(centers[i].1, velocities[i].1, half_h, spec.height as f64);
            centers[i] = (cx, cy);
            velocities[i] = (vx, vy);
        }
    }

    let features =
        FeatureRaster::from_values(spec.width, spec.height, spec.n_frames, features).unwrap();
    let masks =
        MaskRaster::from_labels(spec.width, spec.height, spec.n_frames, labels, &manifest).unwrap();
    SceneBundle::new(manifest, features, masks).unwrap()
}

/// Write a scene's manifest and rasters into a directory; returns the
/// manifest path.
pub fn write_scene(scene: &SceneBundle, dir: &Path) -> Result<PathBuf, SceneError> {
    let io_err = |source: std::io::Error| SceneError::Io {
        path: dir.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    scene.features.write(&dir.join(&scene.manifest.feature_path))?;
    scene.masks.write(&dir.join(&scene.manifest.mask_path))?;
    let manifest_path = dir.join(format!("{}.manifest.json", scene.manifest.video_id));
    let json = serde_json::to_string_pretty(&scene.manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json).map_err(io_err)?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::mask_centroid;

    #[test]
    fn three_rectangle_scene_is_valid() {
        let scene = build_scene(&SyntheticSceneSpec::three_rectangles());
        assert_eq!(scene.manifest.n_frames, 300);
        assert_eq!(scene.manifest.object_ids.len(), 3);
        // every object visible on every frame
        for t in [0, 150, 299] {
            for id in [1u16, 2, 3] {
                assert!(mask_centroid(scene.masks.frame(t), id).is_some());
            }
        }
    }

    #[test]
    fn constant_velocity_moves_centroid_linearly() {
        let mut spec = SyntheticSceneSpec::three_rectangles();
        spec.rects.truncate(1);
        spec.rects[0].center = (100.0, 100.0);
        spec.rects[0].velocity = (2.0, 0.0);
        spec.n_frames = 50;
        let scene = build_scene(&spec);
        let c0 = mask_centroid(scene.masks.frame(0), 1).unwrap();
        let c1 = mask_centroid(scene.masks.frame(1), 1).unwrap();
        let c10 = mask_centroid(scene.masks.frame(10), 1).unwrap();
        assert_eq!(c1.x - c0.x, 2.0);
        assert_eq!(c10.x - c0.x, 20.0);
        assert_eq!(c1.y, c0.y);
    }

    #[test]
    fn scene_roundtrips_through_files() {
        let mut spec = SyntheticSceneSpec::three_rectangles();
        spec.width = 64;
        spec.height = 48;
        spec.n_frames = 10;
        spec.rects.truncate(1);
        spec.rects[0].width = 16;
        spec.rects[0].height = 12;
        spec.rects[0].center = (20.0, 20.0);
        let scene = build_scene(&spec);
        let dir = tempfile::tempdir().unwrap();
        let manifest_path = write_scene(&scene, dir.path()).unwrap();
        let (loaded, warnings) = SceneBundle::load(&manifest_path).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(loaded.features, scene.features);
        assert_eq!(loaded.masks, scene.masks);
    }
}
